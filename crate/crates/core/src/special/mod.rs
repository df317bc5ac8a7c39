//! Closed-form density of the mean spectral measure and the special functions
//! behind it.
//!
//! The density is
//!
//! ```text
//! mu(y) = exp(-y^2/2) / sqrt(2 pi) / |f_hat(y)|^2
//! f_hat(y) = sqrt(2/pi) int_0^inf f(t) e^{iyt} dt,
//! f(t) = pi sqrt(alpha / Gamma(alpha)) t^{alpha-1} exp(-t^2/2) / sqrt(2 pi)
//! ```
//!
//! and `f_hat = V_R + i V_I` where `V_R`, `V_I` are Kummer-function
//! expressions. Everything that can overflow is carried as [`Scaled`]
//! (sign and log-magnitude) until the final exponentiation.

mod density;
mod gamma;
mod hermite;
mod kummer;
mod nu;

pub use density::{
    density, density_moment_check, f_hat, f_hat_kummer, f_hat_quadrature, fourier_cosine_gr, fourier_sine_gr,
    moment_radius, semicircle_density, v_i, v_r, Complex, DensityMethod, DensityParams, MomentCheck,
    METHOD_AGREEMENT_TOL,
};
pub use gamma::{gamma_scaled, ln_gamma, recip_gamma_scaled};
pub use hermite::{hermite_closed_form, hermite_he, HermiteForm, MAX_HERMITE_DEGREE};
pub use kummer::{kummer_1f1, DEFAULT_SERIES_TOL};
pub use nu::{nu_general, SelfConvParams};

/// A real number stored as `sign * exp(ln_abs)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub ln_abs: f64,
    /// -1, 0 or 1.
    pub sign: i8,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        ln_abs: f64::NEG_INFINITY,
        sign: 0,
    };
    pub const ONE: Scaled = Scaled { ln_abs: 0.0, sign: 1 };

    pub fn new(ln_abs: f64, sign: i8) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            Scaled { ln_abs, sign }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Scaled {
                ln_abs: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }

    /// Multiplies by `exp(ln_factor)`.
    pub fn rescaled(self, ln_factor: f64) -> Self {
        Scaled::new(self.ln_abs + ln_factor, self.sign)
    }

    pub fn mul(self, other: Scaled) -> Self {
        Scaled::new(self.ln_abs + other.ln_abs, self.sign * other.sign)
    }

    pub fn neg(self) -> Self {
        Scaled::new(self.ln_abs, -self.sign)
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }
}

/// `ln(a^2 + b^2)` for scaled `a`, `b` without leaving log space.
pub fn ln_sum_of_squares(a: Scaled, b: Scaled) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => f64::NEG_INFINITY,
        (true, false) => 2.0 * b.ln_abs,
        (false, true) => 2.0 * a.ln_abs,
        (false, false) => {
            let hi = a.ln_abs.max(b.ln_abs);
            let lo = a.ln_abs.min(b.ln_abs);
            2.0 * hi + (2.0 * (lo - hi)).exp().ln_1p()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_round_trip() {
        for &x in &[-3.5f64, 1e-300, 7.0] {
            let back = Scaled::from_f64(x).to_f64();
            assert!((back - x).abs() <= 1e-13 * x.abs(), "{x} -> {back}");
        }
        assert_eq!(Scaled::from_f64(0.0), Scaled::ZERO);
        assert_eq!(Scaled::ZERO.to_f64(), 0.0);
        let big = Scaled::from_f64(1e300).mul(Scaled::from_f64(-1e300));
        assert_eq!(big.sign, -1);
        assert!((big.ln_abs - 600.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sum_of_squares() {
        let v = ln_sum_of_squares(Scaled::from_f64(3.0), Scaled::from_f64(-4.0));
        assert!((v - 25f64.ln()).abs() < 1e-15);
        assert_eq!(ln_sum_of_squares(Scaled::ZERO, Scaled::from_f64(2.0)), 4f64.ln());
        let huge = ln_sum_of_squares(Scaled::new(1000.0, 1), Scaled::new(1000.0, -1));
        assert!((huge - (2000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
