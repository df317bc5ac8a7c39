use crate::error::{Error, Result};

use super::Scaled;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            reason: format!("argument must be positive and finite, got {x}"),
        });
    }
    Ok(libm::lgamma_r(x).0)
}

/// `Γ(x)` in sign/log form for any `x` that is not a pole.
pub fn gamma_scaled(x: f64) -> Result<Scaled> {
    if is_pole(x) || !x.is_finite() {
        return Err(Error::Domain {
            function: "gamma",
            reason: format!("pole or non-finite argument {x}"),
        });
    }
    let (ln_abs, sign) = libm::lgamma_r(x);
    Ok(Scaled::new(ln_abs, sign.signum() as i8))
}

/// `1/Γ(x)` in sign/log form; exactly zero at the poles.
pub fn recip_gamma_scaled(x: f64) -> Scaled {
    if is_pole(x) {
        return Scaled::ZERO;
    }
    let (ln_abs, sign) = libm::lgamma_r(x);
    Scaled::new(-ln_abs, sign.signum() as i8)
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classical_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!((ln_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-15);
        // ln(10!) = 15.104412573075516
        let r = ln_gamma(11.0).unwrap();
        assert!(((r - 15.104_412_573_075_516) / r).abs() < 1e-14);
        // reference: ln Γ(0.1) = 2.252712651734206
        let r = ln_gamma(0.1).unwrap();
        assert!(((r - 2.252_712_651_734_206) / r).abs() < 1e-13);
        // reference: ln Γ(100.5) = 361.4355404677776
        let r = ln_gamma(100.5).unwrap();
        assert!(((r - 361.435_540_467_777_6) / r).abs() < 1e-13);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(gamma_scaled(-2.0).is_err());
    }

    #[test]
    fn negative_half_integer() {
        // Γ(-1/2) = -2 sqrt(pi)
        let g = gamma_scaled(-0.5).unwrap();
        assert_eq!(g.sign, -1);
        assert!((g.to_f64() + 2.0 * PI.sqrt()).abs() < 1e-14);
        assert_eq!(recip_gamma_scaled(-3.0), Scaled::ZERO);
    }

    #[test]
    fn duplication_relation() {
        // Γ(a/2 + 1/2) Γ(a/2 + 1) / Γ(1/2) = 2^{-a} Γ(a + 1)
        for &a in &[0.5, 1.0, 3.0, 7.25, 40.0] {
            let lhs = ln_gamma(a / 2.0 + 0.5).unwrap() + ln_gamma(a / 2.0 + 1.0).unwrap()
                - ln_gamma(0.5).unwrap();
            let rhs = -a * 2f64.ln() + ln_gamma(a + 1.0).unwrap();
            assert!((lhs.exp() - rhs.exp()).abs() <= 1e-12 * rhs.exp(), "a = {a}");
        }
        // a = 3: both sides equal 3/4
        let lhs = (ln_gamma(2.0).unwrap() + ln_gamma(2.5).unwrap() - ln_gamma(0.5).unwrap()).exp();
        assert!((lhs - 0.75).abs() < 1e-12);
    }
}
