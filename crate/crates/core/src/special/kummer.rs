use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

use super::Scaled;

/// Default relative stopping threshold for the Kummer series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-17;

const RESCALE_AT: f64 = 1e250;

/// The largest term may exceed the final sum by this factor before the series
/// is re-summed exactly.
const CANCELLATION_LIMIT: f64 = 1e4;

/// Precision beyond the initial guess at which a sum is declared zero.
const MAX_EXTRA_BITS: u64 = 4096;

/// `1F1(a; b; x) = sum_k (a)_k / (b)_k x^k / k!` for `x >= 0`, in sign/log
/// form.
///
/// The running sum is rescaled whenever it grows past `1e250`, so the result
/// survives arguments far beyond the `f64` exponent range of `e^x`. The series
/// stops once the terms have started shrinking and the next term is below
/// `tol` relative to the partial sum, or immediately when it terminates
/// (`a` a nonpositive integer).
///
/// When `a < 0` the leading terms alternate in sign and can cancel; if the
/// largest term exceeds the sum by more than a factor `1e4`, the series is
/// summed again in exact rational arithmetic.
pub fn kummer_1f1(a: f64, b: f64, x: f64, tol: f64) -> Result<Scaled> {
    if b <= 0.0 && b == b.floor() {
        return Err(Error::Domain {
            function: "kummer_1f1",
            reason: format!("b = {b} is a nonpositive integer"),
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "kummer_1f1",
            reason: format!("argument must be finite and >= 0, got {x}"),
        });
    }
    if !(tol > 0.0) {
        return Err(crate::error::invalid("series_tol", "must be positive"));
    }
    if x == 0.0 {
        return Ok(Scaled::ONE);
    }

    // terms keep alternating sign until a + k > 0
    let sign_changes_end = if a < 0.0 { (-a).ceil() } else { 0.0 };
    let max_terms = 10_000 + (10.0 * x) as usize;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut ln_scale = 0.0f64;
    let mut ln_max_term = 0.0f64;
    let finish = |sum: f64, ln_scale: f64, ln_max_term: f64| {
        let result = Scaled::from_f64(sum).rescaled(ln_scale);
        if a < 0.0 && ln_max_term - result.ln_abs > CANCELLATION_LIMIT.ln() {
            kummer_1f1_exact(a, b, x, tol)
        } else {
            Ok(result)
        }
    };
    for k in 0..max_terms {
        let kf = k as f64;
        let ratio = (a + kf) / (b + kf) * x / (kf + 1.0);
        term *= ratio;
        if term == 0.0 {
            return finish(sum, ln_scale, ln_max_term);
        }
        ln_max_term = ln_max_term.max(term.abs().ln() + ln_scale);
        sum += term;
        if sum.abs() > RESCALE_AT || term.abs() > RESCALE_AT {
            sum /= RESCALE_AT;
            term /= RESCALE_AT;
            ln_scale += RESCALE_AT.ln();
        }
        let past_peak = kf + 1.0 >= sign_changes_end && ratio.abs() < 1.0;
        if past_peak && term.abs() <= tol * sum.abs() {
            return finish(sum, ln_scale, ln_max_term);
        }
    }
    Err(Error::SeriesNonConvergence {
        function: "kummer_1f1",
        terms: max_terms,
    })
}

fn ln_abs_int(n: &BigInt) -> f64 {
    let shift = n.bits().saturating_sub(64);
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact polynomial value of the series when `a = -n`.
fn terminating_exact(a: &BigRational, b: &BigRational, x: &BigRational, n: usize) -> Scaled {
    let one = BigRational::from_integer(1.into());
    let mut term = one.clone();
    let mut sum = one.clone();
    for k in 0..n {
        let kr = BigRational::from_integer(k.into());
        term = term * (a + &kr) * x / ((b + &kr) * (&kr + &one));
        sum += &term;
    }
    if sum.is_zero() {
        return Scaled::ZERO;
    }
    let sign = if sum.is_positive() { 1 } else { -1 };
    Scaled::new(ln_abs_int(sum.numer()) - ln_abs_int(sum.denom()), sign)
}

/// The same series in binary fixed point: terms are integers scaled by
/// `2^-prec`, each multiplied by the exact term ratio and truncated. The
/// precision grows until the sum carries enough bits above the truncation
/// error.
fn kummer_1f1_exact(a: f64, b: f64, x: f64, tol: f64) -> Result<Scaled> {
    let exact = |v: f64| BigRational::from_float(v).expect("finite");
    let (ae, be, xe) = (exact(a), exact(b), exact(x));
    if a <= 0.0 && a == a.floor() {
        return Ok(terminating_exact(&ae, &be, &xe, (-a) as usize));
    }
    let sign_changes_end = if a < 0.0 { (-a).ceil() } else { 0.0 };
    let ln_tol = tol.ln();
    let max_terms = 10_000 + (10.0 * x) as usize;
    // bits needed to hold the largest term, which is below e^x
    let mut prec = 128 + (x / std::f64::consts::LN_2) as u64;
    let max_prec = prec + MAX_EXTRA_BITS;
    loop {
        let mut term = BigInt::from(1) << prec;
        let mut sum = term.clone();
        let mut used = 0usize;
        for k in 0..max_terms {
            let kf = k as f64;
            let kr = BigRational::from_integer(k.into());
            let r = (&ae + &kr) * &xe / ((&be + &kr) * (&kr + BigRational::from_integer(1.into())));
            term = term * r.numer() / r.denom();
            used = k + 1;
            if term.is_zero() {
                break;
            }
            sum += &term;
            let ratio = (a + kf) / (b + kf) * x / (kf + 1.0);
            let past_peak = kf + 1.0 >= sign_changes_end && ratio.abs() < 1.0;
            if past_peak && ln_abs_int(&term) - ln_abs_int(&sum) <= ln_tol {
                break;
            }
            if k + 1 == max_terms {
                return Err(Error::SeriesNonConvergence {
                    function: "kummer_1f1",
                    terms: max_terms,
                });
            }
        }
        // each truncation costs at most one unit; keep 64 good bits
        let error_bits = (used as f64).log2().ceil() as u64 + 1;
        if (sum.is_zero() || sum.bits() < error_bits + 64) && prec < max_prec {
            prec = (2 * prec).min(max_prec);
            continue;
        }
        if sum.bits() <= error_bits {
            // below the truncation error even at full precision
            return Ok(Scaled::ZERO);
        }
        let sign = if sum.is_positive() { 1 } else { -1 };
        return Ok(Scaled::new(
            ln_abs_int(&sum) - prec as f64 * std::f64::consts::LN_2,
            sign,
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: f64, b: f64, x: f64) -> f64 {
        kummer_1f1(a, b, x, DEFAULT_SERIES_TOL).unwrap().to_f64()
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(f(2.3, 0.7, 0.0), 1.0);
        assert_eq!(f(0.0, 0.5, 17.0), 1.0);
        for &x in &[0.5, 3.0, 40.0] {
            assert!((f(-1.0, 1.5, x) - (1.0 - 2.0 * x / 3.0)).abs() < 1e-13 * x.max(1.0));
        }
    }

    #[test]
    fn exponential_special_case() {
        // 1F1(a; a; x) = e^x
        for &x in &[0.1, 5.0, 50.0, 300.0] {
            let r = kummer_1f1(2.5, 2.5, x, DEFAULT_SERIES_TOL).unwrap();
            assert_eq!(r.sign, 1);
            assert!((r.ln_abs - x).abs() < 1e-13 * x.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn survives_large_arguments() {
        // e^x for x = 1000 overflows f64 but not the scaled form
        let r = kummer_1f1(1.0, 1.0, 1000.0, DEFAULT_SERIES_TOL).unwrap();
        assert!((r.ln_abs - 1000.0).abs() < 1e-10);
    }

    #[test]
    fn known_value() {
        // references from mpmath at 30 digits
        assert!((f(1.0, 1.5, 2.0) / 4.419_719_620_459_524_5 - 1.0).abs() < 1e-14);
        let v = f(-1.25, 0.5, 10.0);
        assert!((v / 299.368_532_179_110_8 - 1.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn cancelling_series_is_resummed() {
        // mpmath at 50 digits; terms reach ~1e15 before cancelling
        let v = f(-31.5, 0.5, 38.72);
        assert!((v / -257_433_510.393_804_14 - 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn exact_zeros_terminate() {
        // 1F1(-1; 1/2; x) = 1 - 2x
        assert_eq!(kummer_1f1(-1.0, 0.5, 0.5, DEFAULT_SERIES_TOL).unwrap(), Scaled::ZERO);
        let v = f(-3.0, 1.5, 2.75);
        let e = 1.0 - 2.0 * 2.75 + 4.0 / 5.0 * 2.75f64.powi(2) - 8.0 / 105.0 * 2.75f64.powi(3);
        assert!((v - e).abs() < 1e-13, "{v} vs {e}");
    }

    #[test]
    fn rejects_bad_b() {
        assert!(kummer_1f1(1.0, -2.0, 1.0, 1e-16).is_err());
        assert!(kummer_1f1(1.0, 0.0, 1.0, 1e-16).is_err());
        assert!(kummer_1f1(1.0, 1.0, -1.0, 1e-16).is_err());
    }
}
