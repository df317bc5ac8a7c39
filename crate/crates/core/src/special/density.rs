use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadConfig};

use super::{gamma_scaled, kummer_1f1, ln_gamma, ln_sum_of_squares, Scaled, DEFAULT_SERIES_TOL};

pub use num_complex::Complex64 as Complex;

/// Largest `|difference|` tolerated between the Kummer and quadrature routes
/// for `f_hat`.
pub const METHOD_AGREEMENT_TOL: f64 = 1e-8;

/// Absolute tolerance of the quadrature route for `f_hat`.
const FOURIER_QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    Kummer,
    Quadrature,
    Auto,
}

/// Evaluation strategy for the density at a fixed `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub alpha: f64,
    pub method: DensityMethod,
    /// Relative stopping threshold of the Kummer series, in `(0, 1e-6]`.
    pub series_tol: f64,
    /// `Auto` uses the Kummer route while `y^2/2 <= x_switch`.
    pub x_switch: f64,
}

impl DensityParams {
    pub fn new(alpha: f64) -> Result<Self> {
        let p = DensityParams {
            alpha,
            method: DensityMethod::Auto,
            series_tol: DEFAULT_SERIES_TOL,
            x_switch: 50.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_method(mut self, method: DensityMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("must be finite and > 0, got {}", self.alpha)));
        }
        if !(self.series_tol > 0.0 && self.series_tol <= 1e-6) {
            return Err(invalid("series_tol", "must lie in (0, 1e-6]"));
        }
        if !(self.x_switch > 0.0) {
            return Err(invalid("x_switch", "must be positive"));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite and > 0, got {alpha}")));
    }
    Ok(())
}

/// `(V_R(y), V_I(y))` in sign/log form.
fn v_parts(y: f64, alpha: f64, tol: f64) -> Result<(Scaled, Scaled)> {
    check_alpha(alpha)?;
    let x = 0.5 * y * y;
    let half_ln_gamma = 0.5 * ln_gamma(alpha + 1.0)?;

    // V_R = 2^{-a/2} Γ(a+1)^{1/2} Γ(1/2)/Γ(a/2+1/2) e^{-x} 1F1(1/2-a/2; 1/2; x)
    let f_r = kummer_1f1(0.5 - 0.5 * alpha, 0.5, x, tol)?;
    let ln_r = -0.5 * alpha * LN_2 + half_ln_gamma + ln_gamma(0.5)? - ln_gamma(0.5 * alpha + 0.5)? - x;
    let v_r = f_r.rescaled(ln_r);

    // V_I = -2^{-a/2-1/2} Γ(a+1)^{1/2} Γ(-1/2)/Γ(a/2) y e^{-x} 1F1(1-a/2; 3/2; x)
    if y == 0.0 {
        return Ok((v_r, Scaled::ZERO));
    }
    let f_i = kummer_1f1(1.0 - 0.5 * alpha, 1.5, x, tol)?;
    let g = gamma_scaled(-0.5)?;
    let ln_i = -(0.5 * alpha + 0.5) * LN_2 + half_ln_gamma + g.ln_abs - ln_gamma(0.5 * alpha)? - x;
    let v_i = f_i
        .mul(Scaled::from_f64(y))
        .mul(Scaled::new(0.0, g.sign))
        .rescaled(ln_i)
        .neg();
    Ok((v_r, v_i))
}

/// Real part of `f_hat` through the Kummer function; even in `y`.
pub fn v_r(y: f64, alpha: f64) -> Result<f64> {
    Ok(v_parts(y, alpha, DEFAULT_SERIES_TOL)?.0.to_f64())
}

/// Imaginary part of `f_hat` through the Kummer function; odd in `y`.
pub fn v_i(y: f64, alpha: f64) -> Result<f64> {
    Ok(v_parts(y, alpha, DEFAULT_SERIES_TOL)?.1.to_f64())
}

/// `V_R(y) + i V_I(y)`.
pub fn f_hat_kummer(y: f64, alpha: f64, series_tol: f64) -> Result<Complex> {
    let (r, i) = v_parts(y, alpha, series_tol)?;
    Ok(Complex::new(r.to_f64(), i.to_f64()))
}

/// `sqrt(2/pi) int_0^inf f(t) e^{iyt} dt` by adaptive quadrature, with its
/// error estimate (quadrature plus analytic tail bound).
///
/// For `alpha < 1` the substitution `t = s^{1/alpha}` removes the
/// `t^{alpha-1}` endpoint singularity.
pub fn f_hat_quadrature(y: f64, alpha: f64) -> Result<(Complex, f64)> {
    check_alpha(alpha)?;
    // sqrt(2/pi) * pi sqrt(a/Γ(a)) / sqrt(2 pi) = sqrt(a/Γ(a))
    let ln_c = 0.5 * (alpha.ln() - ln_gamma(alpha)?);
    let reach = (2.0 * (1.0 / FOURIER_QUAD_TOL).ln()).sqrt() + 10.0;
    let t_max = (alpha - 1.0).max(0.0).sqrt() + reach;
    let cfg = QuadConfig {
        abs_tol: 0.5 * FOURIER_QUAD_TOL,
        rel_tol: 1e-13,
        max_intervals: 5000,
    };

    let (re, im) = if alpha < 1.0 {
        let c = ln_c.exp() / alpha;
        let s_max = t_max.powf(alpha);
        let amp = move |s: f64| {
            let t = s.powf(1.0 / alpha);
            (c * (-0.5 * t * t).exp(), t)
        };
        let re = integrate(|s| { let (a, t) = amp(s); a * (y * t).cos() }, 0.0, s_max, &cfg)?;
        let im = integrate(|s| { let (a, t) = amp(s); a * (y * t).sin() }, 0.0, s_max, &cfg)?;
        (re, im)
    } else {
        let amp = move |t: f64| {
            if t == 0.0 {
                if alpha == 1.0 { ln_c.exp() } else { 0.0 }
            } else {
                ((alpha - 1.0) * t.ln() - 0.5 * t * t + ln_c).exp()
            }
        };
        let re = integrate(|t| amp(t) * (y * t).cos(), 0.0, t_max, &cfg)?;
        let im = integrate(|t| amp(t) * (y * t).sin(), 0.0, t_max, &cfg)?;
        (re, im)
    };

    // int_T^inf t^{a-1} e^{-t^2/2} dt <= T^{a-1} e^{-T^2/2} / (T - (a-1)/T)
    let tail = ((alpha - 1.0) * t_max.ln() - 0.5 * t_max * t_max + ln_c).exp()
        / (t_max - (alpha - 1.0) / t_max);
    Ok((Complex::new(re.value, im.value), re.error + im.error + 2.0 * tail))
}

/// `f_hat(y)` by the method selected in `params`.
///
/// `Auto` takes the Kummer route for `y^2/2 <= x_switch` and quadrature
/// beyond; on the overlap band `[x_switch/2, x_switch]` it evaluates both and
/// fails if they differ by more than [`METHOD_AGREEMENT_TOL`].
pub fn f_hat(y: f64, params: &DensityParams) -> Result<Complex> {
    params.validate()?;
    let alpha = params.alpha;
    match params.method {
        DensityMethod::Kummer => f_hat_kummer(y, alpha, params.series_tol),
        DensityMethod::Quadrature => Ok(f_hat_quadrature(y, alpha)?.0),
        DensityMethod::Auto => {
            let x = 0.5 * y * y;
            if x > params.x_switch {
                return Ok(f_hat_quadrature(y, alpha)?.0);
            }
            let k = f_hat_kummer(y, alpha, params.series_tol)?;
            if x >= 0.5 * params.x_switch {
                let (q, _) = f_hat_quadrature(y, alpha)?;
                let difference = (k - q).norm();
                if !(difference <= METHOD_AGREEMENT_TOL) {
                    return Err(Error::MethodDisagreement { y, difference });
                }
            }
            Ok(k)
        }
    }
}

/// The density `exp(-y^2/2) / sqrt(2 pi) / |f_hat(y)|^2`.
pub fn density(y: f64, params: &DensityParams) -> Result<f64> {
    params.validate()?;
    let ln_gauss = -0.5 * y * y - 0.5 * (2.0 * PI).ln();
    let use_kummer_logs = match params.method {
        DensityMethod::Kummer => true,
        DensityMethod::Quadrature => false,
        DensityMethod::Auto => 0.5 * y * y < 0.5 * params.x_switch,
    };
    if use_kummer_logs {
        let (r, i) = v_parts(y, params.alpha, params.series_tol)?;
        return Ok((ln_gauss - ln_sum_of_squares(r, i)).exp());
    }
    let fh = f_hat(y, params)?;
    Ok(ln_gauss.exp() / fh.norm_sqr())
}

/// Probability density of the semicircle law on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Cosine transform `sqrt(2/pi) int_0^inf t^{a-1} e^{-t^2/2} cos(yt) dt` in
/// closed form (Gradshteyn–Ryzhik 3.952(8)).
pub fn fourier_cosine_gr(y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 0.5 * y * y;
    let f = kummer_1f1(0.5 - 0.5 * alpha, 0.5, x, DEFAULT_SERIES_TOL)?;
    let ln_c = (0.5 * alpha - 0.5) * LN_2 + ln_gamma(0.5 * alpha)? - 0.5 * PI.ln() - x;
    Ok(f.rescaled(ln_c).to_f64())
}

/// Sine transform `sqrt(2/pi) int_0^inf t^{a-1} e^{-t^2/2} sin(yt) dt` in
/// closed form (Gradshteyn–Ryzhik 3.952(7)).
pub fn fourier_sine_gr(y: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 0.5 * y * y;
    let f = kummer_1f1(1.0 - 0.5 * alpha, 1.5, x, DEFAULT_SERIES_TOL)?;
    let ln_c = 0.5 * alpha * LN_2 + ln_gamma(0.5 * alpha + 0.5)? - 0.5 * PI.ln() - x;
    Ok(f.mul(Scaled::from_f64(y)).rescaled(ln_c).to_f64())
}

/// Moments of the density computed by quadrature.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub alpha: f64,
    /// Integration range `[-radius, radius]`.
    pub radius: f64,
    /// `int mu`.
    pub normalization: f64,
    /// `int y^{2n} mu`, `n = 0..=n_max`.
    pub even_moments: Vec<f64>,
    /// `|int y^{2n} mu - u_n| / u_n`.
    pub even_relative_deviation: Vec<f64>,
    /// `int y^{2n+1} mu`, `n = 0..=n_max`.
    pub odd_moments: Vec<f64>,
}

pub const MAX_MOMENT_CHECK_N: usize = 6;

/// Truncation radius for moment quadrature: past the peak of
/// `y^{2n + 2 alpha} e^{-y^2/2}` by a margin where the Gaussian factor is
/// negligible, and never below `max(8, 4 sqrt(alpha))`.
pub fn moment_radius(alpha: f64, n_max: usize) -> f64 {
    let peak = (2.0 * n_max as f64 + 2.0 * alpha).sqrt();
    8f64.max(4.0 * alpha.sqrt()).max(peak + 10.0)
}

/// Integrates `y^k` against the density for `k <= 2 n_max + 1` and compares
/// the even moments with the recurrence values.
pub fn density_moment_check(n_max: usize, params: &DensityParams) -> Result<MomentCheck> {
    params.validate()?;
    if n_max > MAX_MOMENT_CHECK_N {
        return Err(Error::BudgetExceeded {
            what: "density moment check order",
            limit: MAX_MOMENT_CHECK_N,
            requested: n_max,
        });
    }
    let alpha = params.alpha;
    let radius = moment_radius(alpha, n_max);
    let cfg = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };

    let expected = crate::moments::u_sequence_numeric(alpha, n_max)?.values;
    let mut even_moments = Vec::with_capacity(n_max + 1);
    let mut odd_moments = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let k = 2 * n as i32;
        let half = integrate(|y| y.powi(k) * density(y, params).unwrap_or(f64::NAN), 0.0, radius, &cfg)?;
        even_moments.push(2.0 * half.value);
        // the two half-line contributions are paired pointwise before integrating
        let odd = integrate(
            |y| {
                let both = density(y, params).and_then(|r| Ok(r - density(-y, params)?));
                y.powi(k + 1) * both.unwrap_or(f64::NAN)
            },
            0.0,
            radius,
            &cfg,
        )?;
        odd_moments.push(odd.value);
    }
    if even_moments.iter().chain(&odd_moments).any(|v| v.is_nan()) {
        // surface the underlying evaluation error
        density(radius, params)?;
        return Err(Error::Domain {
            function: "density_moment_check",
            reason: "density evaluation failed inside the integration range".into(),
        });
    }
    let even_relative_deviation = even_moments
        .iter()
        .zip(&expected)
        .map(|(m, u)| (m - u).abs() / u)
        .collect();
    Ok(MomentCheck {
        alpha,
        radius,
        normalization: even_moments[0],
        even_moments,
        even_relative_deviation,
        odd_moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64) -> DensityParams {
        DensityParams::new(alpha).unwrap()
    }

    #[test]
    fn v_r_at_origin() {
        // alpha = 1: sqrt(pi/2)
        assert!((v_r(0.0, 1.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-15);
        // general: 2^{-a/2} Γ(a+1)^{1/2} Γ(1/2) / Γ(a/2 + 1/2)
        for &a in &[0.5, 2.0, 3.7] {
            let direct = (-0.5 * a * LN_2 + 0.5 * ln_gamma(a + 1.0).unwrap() + 0.5 * PI.ln()
                - ln_gamma(0.5 * a + 0.5).unwrap())
            .exp();
            assert!((v_r(0.0, a).unwrap() - direct).abs() < 1e-14 * direct);
        }
        assert_eq!(v_i(0.0, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn parity() {
        for &a in &[0.5, 1.0, 2.5] {
            for &y in &[0.3, 1.7, 4.0] {
                assert_eq!(v_r(-y, a).unwrap(), v_r(y, a).unwrap());
                assert_eq!(v_i(-y, a).unwrap(), -v_i(y, a).unwrap());
                let p = params(a);
                assert_eq!(density(-y, &p).unwrap(), density(y, &p).unwrap());
            }
        }
    }

    #[test]
    fn alpha_two_sine_part() {
        for &y in &[-2.0, 0.5, 3.0] {
            let expected = PI.sqrt() * y * (-0.5 * y * y).exp();
            assert!((v_i(y, 2.0).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn f_hat_at_origin() {
        let (q, err) = f_hat_quadrature(0.0, 1.0).unwrap();
        assert!((q.re - (PI / 2.0).sqrt()).abs() < 1e-12, "{q} +- {err}");
        assert!(q.im.abs() < 1e-15);
        for &a in &[0.5, 2.0, 4.0] {
            let q = f_hat_quadrature(0.0, a).unwrap().0;
            assert!(q.re > 0.0);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for method in [DensityMethod::Kummer, DensityMethod::Quadrature] {
            let p = params(1.5).with_method(method);
            let a = f_hat(2.3, &p).unwrap();
            let b = f_hat(-2.3, &p).unwrap();
            assert!((a - b.conj()).norm() < 1e-12, "{method:?}");
        }
    }

    #[test]
    fn methods_agree_at_alpha_two() {
        let k = f_hat(3.0, &params(2.0).with_method(DensityMethod::Kummer)).unwrap();
        let q = f_hat(3.0, &params(2.0).with_method(DensityMethod::Quadrature)).unwrap();
        assert!((k.norm() - q.norm()).abs() < 1e-8);
    }

    #[test]
    fn auto_band_is_checked() {
        // y^2/2 = 32 lies in [25, 50]: both routes run and must agree
        let p = params(1.0);
        let k = f_hat(8.0, &p.with_method(DensityMethod::Kummer)).unwrap();
        assert!((f_hat(8.0, &p).unwrap() - k).norm() == 0.0);
    }

    #[test]
    fn density_at_origin_alpha_one() {
        let d = density(0.0, &params(1.0)).unwrap();
        let expected = 1.0 / (2.0 * PI).sqrt() / (PI / 2.0);
        assert!((d - expected).abs() < 1e-14 * expected, "{d} vs {expected}");
        assert!((d - 0.253_975).abs() < 5e-7);
    }

    #[test]
    fn density_is_positive_far_out() {
        for &a in &[0.5, 4.0, 64.0] {
            for &y in &[0.0, 5.0, 20.0] {
                let d = density(y, &params(a).with_method(DensityMethod::Kummer)).unwrap();
                assert!(d > 0.0 || (d == 0.0 && y >= 20.0), "a={a} y={y} d={d}");
                assert!(d.is_finite());
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(DensityParams::new(0.0).is_err());
        assert!(DensityParams::new(-1.0).is_err());
        let mut p = params(1.0);
        p.series_tol = 1e-3;
        assert!(p.validate().is_err());
        p.series_tol = 1e-10;
        p.x_switch = 0.0;
        assert!(density(0.0, &p).is_err());
    }

    #[test]
    fn semicircle_values() {
        assert!((semicircle_density(0.0) - 1.0 / PI).abs() < 1e-16);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert_eq!(semicircle_density(3.0), 0.0);
        let r = integrate(semicircle_density, -2.0, 2.0, &QuadConfig::new(1e-11, 1e-11)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn gr_forms_match_quadrature() {
        let cfg = QuadConfig::new(1e-13, 1e-13);
        for &a in &[1.0, 2.0, 3.5] {
            for &y in &[0.5, 2.0, 5.0] {
                let w = |t: f64| if t == 0.0 { if a == 1.0 { 1.0 } else { 0.0 } } else { t.powf(a - 1.0) * (-0.5 * t * t).exp() };
                let c = integrate(|t| w(t) * (y * t).cos(), 0.0, 40.0, &cfg).unwrap().value * (2.0 / PI).sqrt();
                let s = integrate(|t| w(t) * (y * t).sin(), 0.0, 40.0, &cfg).unwrap().value * (2.0 / PI).sqrt();
                assert!((c - fourier_cosine_gr(y, a).unwrap()).abs() < 1e-11, "cos a={a} y={y}");
                assert!((s - fourier_sine_gr(y, a).unwrap()).abs() < 1e-11, "sin a={a} y={y}");
            }
        }
    }

    #[test]
    fn moment_check_alpha_two() {
        let m = density_moment_check(1, &params(2.0)).unwrap();
        assert!((m.normalization - 1.0).abs() < 1e-8);
        assert!((m.even_moments[1] - 3.0).abs() < 1e-6 * 3.0);
        assert!(m.odd_moments.iter().all(|v| v.abs() <= 1e-10));
        assert!(density_moment_check(7, &params(2.0)).is_err());
    }
}
