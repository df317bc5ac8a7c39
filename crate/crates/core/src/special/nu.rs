use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

use super::{gamma_scaled, kummer_1f1, recip_gamma_scaled, Scaled, DEFAULT_SERIES_TOL};

/// Coefficients of `u_n = (a1 n + a2) u_{n-1} + a3 sum_{i=1}^{n-1} u_i u_{n-i}`
/// and the derived constants `k = 1/a1`, `a = a3/a1`, `b = -1 - a2/a1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfConvParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl SelfConvParams {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        if a1 == 0.0 || !a1.is_finite() {
            return Err(invalid("a1", "must be finite and nonzero"));
        }
        if !a2.is_finite() || !a3.is_finite() {
            return Err(invalid("a2/a3", "must be finite"));
        }
        Ok(SelfConvParams { a1, a2, a3 })
    }

    /// The even-moment recurrence of the mean spectral measure, indexed from
    /// `n = 0`: `(a1, a2, a3) = (2, -3, alpha)`.
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        Self::new(2.0, -3.0, alpha)
    }

    pub fn k(&self) -> f64 {
        1.0 / self.a1
    }

    pub fn a(&self) -> f64 {
        self.a3 / self.a1
    }

    pub fn b(&self) -> f64 {
        -1.0 - self.a2 / self.a1
    }
}

/// Density `nu(x)` on `x > 0` whose moments solve the self-convolutive
/// recurrence:
///
/// ```text
/// nu(x) = k (kx)^{-b} e^{-kx} / (Γ(a+1) Γ(a-b+1)) / (U_R(kx)^2 + U_I(kx)^2)
/// U_R(z) = e^{-z} [ Γ(1-b)/Γ(a-b+1) 1F1(b-a; b; z)
///                   - cos(pi b) Γ(b-1)/Γ(a) z^{1-b} 1F1(1-a; 2-b; z) ]
/// U_I(z) = sin(pi b) e^{-z} Γ(b-1)/Γ(a) z^{1-b} 1F1(1-a; 2-b; z)
/// ```
///
/// Only `0 < b < 1` is accepted; at `b = 1/2` the cosine term is dropped
/// exactly.
pub fn nu_general(x: f64, params: &SelfConvParams) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid("x", format!("must be finite and > 0, got {x}")));
    }
    let (k, a, b) = (params.k(), params.a(), params.b());
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Domain {
            function: "nu_general",
            reason: format!("b = {b} outside (0, 1)"),
        });
    }
    if !(k > 0.0) {
        return Err(Error::Domain {
            function: "nu_general",
            reason: format!("k = {k} must be positive for a density on x > 0"),
        });
    }
    let z = k * x;

    let first = kummer_1f1(b - a, b, z, DEFAULT_SERIES_TOL)?
        .mul(gamma_scaled(1.0 - b)?)
        .mul(recip_gamma_scaled(a - b + 1.0))
        .rescaled(-z);
    let second = kummer_1f1(1.0 - a, 2.0 - b, z, DEFAULT_SERIES_TOL)?
        .mul(gamma_scaled(b - 1.0)?)
        .mul(recip_gamma_scaled(a))
        .rescaled((1.0 - b) * z.ln() - z);

    let (cos_b, sin_b) = if b == 0.5 { (0.0, 1.0) } else { ((PI * b).cos(), (PI * b).sin()) };
    let m = [first, second]
        .iter()
        .filter(|s| !s.is_zero())
        .map(|s| s.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(Error::Domain {
            function: "nu_general",
            reason: "U_R and U_I vanish identically".into(),
        });
    }
    let t1 = first.rescaled(-m).to_f64();
    let t2 = second.rescaled(-m).to_f64();
    let u_r = t1 - cos_b * t2;
    let u_i = sin_b * t2;
    let ln_u_sq = 2.0 * m + (u_r * u_r + u_i * u_i).ln();

    let prefactor = Scaled::new(k.ln() - b * z.ln() - z, 1)
        .mul(recip_gamma_scaled(a + 1.0))
        .mul(recip_gamma_scaled(a - b + 1.0));
    Ok(prefactor.rescaled(-ln_u_sq).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{density, DensityMethod, DensityParams};

    #[test]
    fn specialization_constants() {
        let p = SelfConvParams::for_alpha(3.0).unwrap();
        assert_eq!((p.k(), p.a(), p.b()), (0.5, 1.5, 0.5));
        assert!(SelfConvParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn positive_on_half_line() {
        for &alpha in &[0.5, 1.0, 2.0, 6.0] {
            let p = SelfConvParams::for_alpha(alpha).unwrap();
            for &x in &[1e-6, 0.1, 1.0, 10.0, 80.0] {
                let v = nu_general(x, &p).unwrap();
                assert!(v > 0.0 && v.is_finite(), "alpha={alpha} x={x} v={v}");
            }
        }
    }

    #[test]
    fn folds_onto_density() {
        for &alpha in &[1.0, 2.0, 3.5] {
            let p = SelfConvParams::for_alpha(alpha).unwrap();
            let dp = DensityParams::new(alpha).unwrap().with_method(DensityMethod::Kummer);
            for &y in &[-3.0f64, -0.4, 0.25, 1.0, 5.0] {
                let folded = y.abs() * nu_general(y * y, &p).unwrap();
                let d = density(y, &dp).unwrap();
                assert!((folded - d).abs() <= 1e-12 * d.max(1e-300), "alpha={alpha} y={y}");
            }
        }
    }

    #[test]
    fn general_b_uses_cosine_term() {
        // b = 1/3: a1 = 3, a2 = -4
        let p = SelfConvParams::new(3.0, -4.0, 1.0).unwrap();
        assert!((p.b() - 1.0 / 3.0).abs() < 1e-15);
        let v = nu_general(2.0, &p).unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn rejects_b_outside_unit_interval() {
        // b = -1 - a2/a1 = 1
        let p = SelfConvParams::new(1.0, -2.0, 1.0).unwrap();
        assert!(nu_general(1.0, &p).is_err());
        let q = SelfConvParams::for_alpha(1.0).unwrap();
        assert!(nu_general(0.0, &q).is_err());
    }
}
