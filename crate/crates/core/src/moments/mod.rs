//! Even moments `u_n(alpha)` of the mean spectral measure and the exact
//! polynomial identities connecting them to the tridiagonal beta-ensemble
//! model.
//!
//! Two independent routes compute `u_n`:
//!
//! * [`u_sequence_numeric`] / [`u_sequence_exact`] use the self-convolutive
//!   recurrence `u_n = (2n - 1) u_{n-1} + alpha * sum u_i u_{n-1-i}`;
//! * [`u_polynomials`] uses the cross-parameter recurrence
//!   `u_n(alpha) = (alpha + 1) * sum u_i(alpha + 1) u_{n-1-i}(alpha)` with
//!   exact Taylor shifts.
//!
//! [`dyck_weight_sum`] enumerates weighted Dyck paths and serves as the
//! oracle for both.

mod dyck;
mod walks;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::ratpoly::{rat, RationalPoly};

pub use dyck::{dyck_paths, dyck_weight_sum, dyck_weight_sum_exact, DyckPath, MAX_DYCK_SEMILENGTH};
pub use walks::{m_polynomial, GbeParams, MAX_WALK_HALF_LENGTH};

/// Largest `p` accepted by [`verify_duality`].
pub const MAX_DUALITY_P: usize = 8;
/// Largest `p` accepted by [`verify_u_h_relation`].
pub const MAX_U_H_P: usize = 10;

/// The even moments `u_0(alpha), ..., u_{n_max}(alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub alpha: f64,
    pub values: Vec<f64>,
}

/// `u_n = (2n - 1) u_{n-1} + alpha * sum_{i<n} u_i u_{n-1-i}`, `u_0 = 1`.
///
/// Generic so that the same recurrence runs in `f64` and in exact rationals.
pub fn self_convolutive<T>(alpha: &T, n_max: usize) -> Vec<T>
where
    T: Clone + Num + FromPrimitive,
{
    let mut u: Vec<T> = Vec::with_capacity(n_max + 1);
    u.push(T::one());
    for n in 1..=n_max {
        let conv = (0..n).fold(T::zero(), |acc, i| acc + u[i].clone() * u[n - 1 - i].clone());
        let odd = T::from_usize(2 * n - 1).expect("small integer");
        u.push(odd * u[n - 1].clone() + alpha.clone() * conv);
    }
    u
}

/// Even moments of the mean spectral measure by the self-convolutive
/// recurrence. Rejects `alpha < 0`.
pub fn u_sequence_numeric(alpha: f64, n_max: usize) -> Result<MomentSequence> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    Ok(MomentSequence {
        alpha,
        values: self_convolutive(&alpha, n_max),
    })
}

/// Exact rational version of [`u_sequence_numeric`].
pub fn u_sequence_exact(alpha: &BigRational, n_max: usize) -> Result<Vec<BigRational>> {
    if alpha.is_negative() {
        return Err(invalid("alpha", format!("must be >= 0, got {alpha}")));
    }
    Ok(self_convolutive(alpha, n_max))
}

/// `u_0(alpha), ..., u_{n_max}(alpha)` as exact polynomials in `alpha`,
/// built from the cross-parameter recurrence.
pub fn u_polynomials(n_max: usize) -> Vec<RationalPoly> {
    let one = rat(1);
    let alpha_plus_one = RationalPoly::from_ints(&[1, 1]);
    let mut u = vec![RationalPoly::one()];
    let mut shifted = vec![RationalPoly::one()];
    for n in 1..=n_max {
        let mut sum = RationalPoly::zero();
        for i in 0..n {
            sum = &sum + &(&shifted[i] * &u[n - 1 - i]);
        }
        let next = &alpha_plus_one * &sum;
        shifted.push(next.shift(&one));
        u.push(next);
    }
    u
}

/// `h_p(N) = H_N^{2p}(1,1)`: Dyck-path sum with rise weight `N - k - 1` for a
/// rise from level `k`, computed by a level-by-level transfer sweep.
pub fn h_polynomial(p: usize) -> RationalPoly {
    let rise_weight = |k: usize| RationalPoly::from_ints(&[-(k as i64) - 1, 1]);
    let steps = 2 * p;
    let mut levels = vec![RationalPoly::one()];
    for step in 0..steps {
        let remaining = steps - step - 1;
        let top = levels.len().min(remaining + 1);
        let mut next = vec![RationalPoly::zero(); top + 1];
        for (k, w) in levels.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            if k + 1 <= remaining {
                next[k + 1] = &next[k + 1] + &(w * &rise_weight(k));
            }
            if k > 0 {
                next[k - 1] = &next[k - 1] + w;
            }
        }
        while next.len() > 1 && next.last().is_some_and(RationalPoly::is_zero) {
            next.pop();
        }
        levels = next;
    }
    levels.swap_remove(0)
}

/// `true` iff `m_p(N, b) = (-1)^p b^p m_p(-b N, 1/b)` as polynomials in `N`.
pub fn verify_duality(p: usize, beta_hat: &BigRational) -> Result<bool> {
    verify_duality_with(p, beta_hat, m_polynomial)
}

/// [`verify_duality`] with a caller-supplied source of `m_p` polynomials.
pub fn verify_duality_with<F>(p: usize, beta_hat: &BigRational, m_poly: F) -> Result<bool>
where
    F: Fn(usize, &BigRational) -> Result<RationalPoly>,
{
    if p > MAX_DUALITY_P {
        return Err(Error::BudgetExceeded {
            what: "duality check p",
            limit: MAX_DUALITY_P,
            requested: p,
        });
    }
    if !beta_hat.is_positive() {
        return Err(invalid("beta_hat", "must be positive"));
    }
    let lhs = m_poly(p, beta_hat)?;
    let dual = m_poly(p, &beta_hat.recip())?;
    let sign = if p % 2 == 0 { rat(1) } else { rat(-1) };
    let factor = sign * num_traits::pow(beta_hat.clone(), p);
    let rhs = dual.compose_scale(&-beta_hat.clone()).scale(&factor);
    Ok(lhs == rhs)
}

/// `true` iff `u_p(alpha) = (-1)^p h_p(-alpha)` as polynomials.
pub fn verify_u_h_relation(p: usize) -> Result<bool> {
    if p > MAX_U_H_P {
        return Err(Error::BudgetExceeded {
            what: "u/h relation check p",
            limit: MAX_U_H_P,
            requested: p,
        });
    }
    let u = u_polynomials(p).swap_remove(p);
    Ok(u_h_relation_holds(p, &u, &h_polynomial(p)))
}

/// The identity check behind [`verify_u_h_relation`] for given polynomials.
pub fn u_h_relation_holds(p: usize, u: &RationalPoly, h: &RationalPoly) -> bool {
    let sign = if p % 2 == 0 { rat(1) } else { rat(-1) };
    *u == h.compose_scale(&rat(-1)).scale(&sign)
}

fn exact_from_f64(name: &'static str, x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(name, format!("not a finite number: {x}")))
}

fn exact_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `|beta_hat^{-p} m_p(N, beta_hat) - h_p(N)|` for each `beta_hat` in an
/// increasing grid. Evaluated exactly, rounded at the end.
pub fn verify_kappa_limit(p: usize, n: u64, beta_hat_grid: &[f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    if beta_hat_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("beta_hat_grid", "must be strictly increasing"));
    }
    let n_exact = BigRational::from_integer(BigInt::from(n));
    let h = h_polynomial(p).eval(&n_exact);
    beta_hat_grid
        .iter()
        .map(|&b| {
            let b = exact_from_f64("beta_hat", b)?;
            let m = m_polynomial(p, &b)?.eval(&n_exact);
            let scaled = m / num_traits::pow(b, p);
            Ok(exact_to_f64(&(scaled - &h).abs()))
        })
        .collect()
}

/// `|m_p(N, alpha / N) - u_p(alpha)|` for each `N` in an increasing grid with
/// `min N > p`.
pub fn verify_limit_to_u(p: usize, alpha: f64, n_grid: &[u64]) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite and > 0, got {alpha}")));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("N_grid", "must be strictly increasing"));
    }
    if n_grid.first().is_some_and(|&n| n as usize <= p) {
        return Err(invalid("N_grid", format!("smallest N must exceed p = {p}")));
    }
    let a = exact_from_f64("alpha", alpha)?;
    let target = u_polynomials(p)[p].eval(&a);
    n_grid
        .iter()
        .map(|&n| {
            let n_exact = BigRational::from_integer(BigInt::from(n));
            let m = m_polynomial(p, &(&a / &n_exact))?.eval(&n_exact);
            Ok(exact_to_f64(&(m - &target).abs()))
        })
        .collect()
}

/// Solves `b_0 = 1`, `a_n = (alpha + 1) sum_{i<n} b_i a_{n-1-i}` for `b`.
///
/// Each `a_n` with `n >= 1` determines `b_{n-1}`, so the result has one entry
/// fewer than `a`. Requires `a[0] = 1`.
pub fn lemma_two_step<T>(a: &[T], alpha: &T) -> Result<Vec<T>>
where
    T: Clone + Num,
{
    match a.first() {
        None => return Ok(Vec::new()),
        Some(a0) if !a0.is_one() => {
            return Err(invalid("a", "sequence must start with a_0 = 1"));
        }
        Some(_) => {}
    }
    let scale = alpha.clone() + T::one();
    if scale.is_zero() {
        return Err(invalid("alpha", "alpha + 1 must be nonzero"));
    }
    let mut b: Vec<T> = Vec::with_capacity(a.len().saturating_sub(1));
    for n in 1..a.len() {
        let partial = (0..n - 1).fold(T::zero(), |acc, i| acc + b[i].clone() * a[n - 1 - i].clone());
        b.push(a[n].clone() / scale.clone() - partial);
    }
    Ok(b)
}

/// Relative residuals `|s_n - (2n-1) s_{n-1} - alpha sum s_i s_{n-1-i}| / |s_n|`
/// of a sequence against the self-convolutive recurrence, for `n >= 1`.
pub fn recurrence_residuals(seq: &[f64], alpha: f64) -> Vec<f64> {
    (1..seq.len())
        .map(|n| {
            let conv: f64 = (0..n).map(|i| seq[i] * seq[n - 1 - i]).sum();
            let rhs = (2 * n - 1) as f64 * seq[n - 1] + alpha * conv;
            (seq[n] - rhs).abs() / seq[n].abs().max(f64::MIN_POSITIVE)
        })
        .collect()
}

/// The `n`-th Catalan number.
pub fn catalan(n: usize) -> BigInt {
    // C_n = binom(2n, n) / (n + 1)
    let mut c = BigInt::one();
    for k in 0..n {
        c = c * BigInt::from(2 * (2 * k + 1)) / BigInt::from(k + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::ratpoly::ratio;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    #[test]
    fn numeric_sequence_examples() {
        assert_eq!(u_sequence_numeric(0.0, 3).unwrap().values, vec![1.0, 1.0, 3.0, 15.0]);
        assert_eq!(u_sequence_numeric(1.0, 3).unwrap().values, vec![1.0, 2.0, 10.0, 74.0]);
        assert_eq!(u_sequence_numeric(2.7, 0).unwrap().values, vec![1.0]);
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(u_sequence_numeric(-0.5, 3).is_err());
        assert!(u_sequence_numeric(f64::NAN, 3).is_err());
        assert!(u_sequence_exact(&ratio(-1, 3), 3).is_err());
    }

    #[test]
    fn polynomial_examples() {
        let u = u_polynomials(3);
        assert_eq!(u[0], RationalPoly::one());
        assert_eq!(u[1], p(&[1, 1]));
        assert_eq!(u[2], p(&[3, 5, 2]));
        assert_eq!(u[3], p(&[15, 32, 22, 5]));
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_polynomial(0), RationalPoly::one());
        assert_eq!(h_polynomial(1), p(&[-1, 1]));
        assert_eq!(h_polynomial(2), p(&[3, -5, 2]));
    }

    #[test]
    fn m_examples() {
        assert_eq!(m_polynomial(0, &ratio(3, 7)).unwrap(), RationalPoly::one());
        let b = ratio(1, 2);
        // 1 + (N - 1) b
        let expected = RationalPoly::linear(b.clone(), rat(1) - &b);
        assert_eq!(m_polynomial(1, &b).unwrap(), expected);
        assert!(m_polynomial(1, &rat(0)).is_err());
        assert!(m_polynomial(MAX_WALK_HALF_LENGTH + 1, &rat(1)).is_err());
    }

    /// Brute-force expansion of E[T^4(1,1)] over all 3^4 index sequences for
    /// a fixed small N, using the moment rules directly.
    #[test]
    fn m2_matches_direct_expansion() {
        let b = ratio(3, 7);
        let m2 = m_polynomial(2, &b).unwrap();
        for n in 3..7i64 {
            // walks of length 4 from site 0: enumerate site sequences
            let mut total = BigRational::zero();
            let nn = n as usize;
            let mut seq = [0usize; 5];
            fn rec(
                depth: usize,
                seq: &mut [usize; 5],
                nn: usize,
                b: &BigRational,
                n: i64,
                total: &mut BigRational,
            ) {
                if depth == 4 {
                    if seq[4] != 0 {
                        return;
                    }
                    let mut a_count = vec![0u32; nn];
                    let mut e_count = vec![0u32; nn];
                    for w in seq.windows(2) {
                        if w[0] == w[1] {
                            a_count[w[0]] += 1;
                        } else {
                            e_count[w[0].min(w[1])] += 1;
                        }
                    }
                    let mut term = rat(1);
                    for &m in &a_count {
                        term *= match m {
                            0 | 2 => rat(1),
                            4 => rat(3),
                            _ => rat(0),
                        };
                    }
                    for (j, &c) in e_count.iter().enumerate() {
                        let shape = b * rat(n - j as i64 - 1);
                        term *= match c {
                            0 => rat(1),
                            2 => shape.clone(),
                            4 => &shape * (&shape + rat(1)),
                            _ => rat(0),
                        };
                    }
                    *total += term;
                    return;
                }
                let cur = seq[depth];
                for next in [cur.wrapping_sub(1), cur, cur + 1] {
                    if next < nn {
                        seq[depth + 1] = next;
                        rec(depth + 1, seq, nn, b, n, total);
                    }
                }
            }
            rec(0, &mut seq, nn, &b, n, &mut total);
            assert_eq!(m2.eval(&rat(n)), total, "N = {n}");
        }
    }

    #[test]
    fn gbe_params() {
        assert!(GbeParams::new(0, rat(1)).is_err());
        assert!(GbeParams::new(3, rat(0)).is_err());
        let g = GbeParams::new(5, ratio(1, 2)).unwrap();
        assert_eq!(g.beta(), 1.0);
        // 1 + (5 - 1)/2
        assert_eq!(g.expected_moment(1).unwrap(), rat(3));
    }

    #[test]
    fn duality_examples() {
        assert!(verify_duality(1, &ratio(1, 2)).unwrap());
        assert!(verify_duality(0, &ratio(5, 3)).unwrap());
        assert!(verify_duality(3, &ratio(3, 7)).unwrap());
        assert!(verify_duality(9, &rat(1)).is_err());
    }

    #[test]
    fn duality_detects_tampering() {
        let tampered = |p: usize, b: &BigRational| {
            let m = m_polynomial(p, b)?;
            Ok(if p == 2 { &m + &RationalPoly::constant(ratio(1, 1000)) } else { m })
        };
        assert!(verify_duality_with(1, &rat(2), tampered).unwrap());
        assert!(!verify_duality_with(2, &rat(2), tampered).unwrap());
    }

    #[test]
    fn u_h_relation_examples() {
        for p in 0..=3 {
            assert!(verify_u_h_relation(p).unwrap(), "p = {p}");
        }
        assert!(!u_h_relation_holds(2, &p(&[3, 5, 2]), &p(&[3, -5, 3])));
        assert!(verify_u_h_relation(MAX_U_H_P + 1).is_err());
    }

    #[test]
    fn kappa_limit_examples() {
        // p = 1: deviation is exactly 1 / beta_hat
        let d = verify_kappa_limit(1, 7, &[1.0, 4.0, 16.0]).unwrap();
        assert_eq!(d, vec![1.0, 0.25, 0.0625]);
        let d0 = verify_kappa_limit(0, 7, &[1.0, 2.0]).unwrap();
        assert_eq!(d0, vec![0.0, 0.0]);
        let d2 = verify_kappa_limit(2, 5, &[1.0, 10.0, 100.0]).unwrap();
        assert!(d2[0] > d2[1] && d2[1] > d2[2], "{d2:?}");
        assert!(verify_kappa_limit(1, 5, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn limit_to_u_examples() {
        // p = 1: deviation is exactly alpha / N
        let d = verify_limit_to_u(1, 1.5, &[4, 8, 16]).unwrap();
        assert_eq!(d, vec![1.5 / 4.0, 1.5 / 8.0, 1.5 / 16.0]);
        let d0 = verify_limit_to_u(0, 1.0, &[2, 3]).unwrap();
        assert_eq!(d0, vec![0.0, 0.0]);
        let d2 = verify_limit_to_u(2, 1.0, &[8, 16, 32]).unwrap();
        for w in d2.windows(2) {
            let r = w[0] / w[1];
            assert!((r - 2.0).abs() <= 0.3, "ratio {r}");
        }
        assert!(verify_limit_to_u(2, 1.0, &[2, 8]).is_err());
        assert!(verify_limit_to_u(2, 0.0, &[8]).is_err());
    }

    #[test]
    fn lemma_examples() {
        let a = [1.0, 1.0, 3.0, 15.0, 105.0];
        assert_eq!(lemma_two_step(&a, &0.0).unwrap(), vec![1.0, 2.0, 10.0, 74.0]);
        assert!(lemma_two_step(&[1.0], &0.0).unwrap().is_empty());
        let u1 = u_sequence_numeric(1.0, 8).unwrap().values;
        let u2 = u_sequence_numeric(2.0, 7).unwrap().values;
        assert_eq!(lemma_two_step(&u1, &1.0).unwrap(), u2);
        assert!(lemma_two_step(&[2.0, 1.0], &0.0).is_err());
    }

    #[test]
    fn lemma_exact() {
        let a = u_sequence_exact(&ratio(7, 2), 10).unwrap();
        let b = lemma_two_step(&a, &ratio(7, 2)).unwrap();
        assert_eq!(b, u_sequence_exact(&ratio(9, 2), 9).unwrap());
    }

    #[test]
    fn catalan_numbers() {
        let c: Vec<BigInt> = (0..8).map(catalan).collect();
        let expected: Vec<BigInt> = [1, 1, 2, 5, 14, 42, 132, 429].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(c, expected);
    }

    #[test]
    fn moment_sequence_is_increasing_for_positive_alpha() {
        for &alpha in &[0.01, 0.5, 1.0, 7.0] {
            let v = u_sequence_numeric(alpha, 12).unwrap().values;
            assert!(v.iter().all(|&x| x > 0.0));
            assert!(v[1..].windows(2).all(|w| w[0] < w[1]), "alpha = {alpha}");
        }
    }
}
