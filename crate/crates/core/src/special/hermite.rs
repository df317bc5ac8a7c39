use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::ln_gamma;

pub const MAX_HERMITE_DEGREE: usize = 50;

/// Probabilists' Hermite polynomial `He_m(y)` by the three-term recurrence.
pub fn hermite_he(m: usize, y: f64) -> Result<f64> {
    if m > MAX_HERMITE_DEGREE {
        return Err(Error::BudgetExceeded {
            what: "Hermite degree",
            limit: MAX_HERMITE_DEGREE,
            requested: m,
        });
    }
    let (mut prev, mut cur) = (1.0, y);
    if m == 0 {
        return Ok(prev);
    }
    for k in 1..m {
        let next = y * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Which Fourier component has an elementary form for integer `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HermiteForm {
    /// `alpha` odd: `f` extends to an even function, giving `V_R`.
    Cosine(f64),
    /// `alpha` even: `f` extends to an odd function, giving `V_I`.
    Sine(f64),
}

/// Elementary form of `V_R` (odd `alpha`) or `V_I` (even `alpha`):
///
/// ```text
/// odd:  V_R(y) =  i^{alpha-1} pi sqrt(alpha/Gamma(alpha)) He_{alpha-1}(y) e^{-y^2/2} / sqrt(2 pi)
/// even: V_I(y) = -i^{alpha}   pi sqrt(alpha/Gamma(alpha)) He_{alpha-1}(y) e^{-y^2/2} / sqrt(2 pi)
/// ```
pub fn hermite_closed_form(alpha: u32, y: f64) -> Result<HermiteForm> {
    if alpha == 0 {
        return Err(crate::error::invalid("alpha", "must be a positive integer"));
    }
    let a = f64::from(alpha);
    let amplitude = PI * (0.5 * (a.ln() - ln_gamma(a)?)).exp();
    let base = amplitude * hermite_he(alpha as usize - 1, y)? * (-0.5 * y * y).exp() / (2.0 * PI).sqrt();
    // i^{2k} = (-1)^k
    let unit = |even_power: u32| if (even_power / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(if alpha % 2 == 1 {
        HermiteForm::Cosine(unit(alpha - 1) * base)
    } else {
        HermiteForm::Sine(-unit(alpha) * base)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_he(0, 3.3).unwrap(), 1.0);
        assert_eq!(hermite_he(1, 3.3).unwrap(), 3.3);
        for &y in &[-2.0, 0.0, 0.7, 5.0] {
            assert!((hermite_he(2, y).unwrap() - (y * y - 1.0)).abs() < 1e-14);
        }
        assert_eq!(hermite_he(3, 2.0).unwrap(), 2.0);
        assert!(hermite_he(51, 1.0).is_err());
    }

    #[test]
    fn matches_derivative_definition() {
        // He_4(y) = y^4 - 6y^2 + 3
        for &y in &[-1.5f64, 0.3, 2.2] {
            let e = y.powi(4) - 6.0 * y * y + 3.0;
            assert!((hermite_he(4, y).unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_one_and_two() {
        let y: f64 = 0.8;
        // alpha = 1: V_R = sqrt(pi/2) e^{-y^2/2}
        match hermite_closed_form(1, y).unwrap() {
            HermiteForm::Cosine(v) => {
                assert!((v - (PI / 2.0).sqrt() * (-0.5 * y * y).exp()).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        // alpha = 2: V_I = sqrt(pi) y e^{-y^2/2}
        match hermite_closed_form(2, y).unwrap() {
            HermiteForm::Sine(v) => assert!((v - PI.sqrt() * y * (-0.5 * y * y).exp()).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
