//! Exact univariate polynomials over the rationals.
//!
//! Coefficients are stored lowest degree first with no trailing zeros, so the
//! zero polynomial is the empty vector and structural equality is polynomial
//! equality. All identity checks in [`crate::moments`] rely on that.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

/// Univariate polynomial with arbitrary-precision rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl RationalPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = RationalPoly { coeffs };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    /// `c0 + c1 x + ...` from integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Linear polynomial `slope * x + intercept`.
    pub fn linear(slope: BigRational, intercept: BigRational) -> Self {
        Self::new(vec![intercept, slope])
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Returns `q` with `q(x) = p(c x)`.
    pub fn compose_scale(&self, c: &BigRational) -> Self {
        let mut power = BigRational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &power);
            power *= c;
        }
        Self::new(out)
    }

    /// Taylor shift: returns `q` with `q(x) = p(x + c)`, by repeated
    /// synthetic division.
    pub fn shift(&self, c: &BigRational) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        if n < 2 || c.is_zero() {
            return self.clone();
        }
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let carry = c * &a[j + 1];
                a[j] += carry;
            }
        }
        Self::new(a)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// Horner evaluation in floating point. Coefficients are rounded first.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * x + a.to_f64().unwrap_or(f64::NAN))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({}/{})", mag.numer(), mag.denom())?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $method(self, rhs: &RationalPoly) -> RationalPoly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

/// Formats a rational as `"num/den"`; integers keep the `/1`.
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&rational_to_string(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        let coeffs = raw
            .iter()
            .map(|s| {
                parse_rational(s)
                    .ok_or_else(|| de::Error::custom(format!("invalid rational coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalPoly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(&[1, 1]) + &RationalPoly::zero(), p(&[1, 1]));
        assert_eq!(&p(&[0, 1]) + &p(&[0, -1]), RationalPoly::zero());
        assert!((&p(&[0, 1]) + &p(&[0, -1])).coeffs().is_empty());
        assert_eq!(&p(&[1, 1]) + &p(&[2, 3]), p(&[3, 4]));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p(&[1, 1]) * &p(&[2, 1]), p(&[2, 3, 1]));
        let q = p(&[3, -5, 2]);
        assert_eq!(&q * &RationalPoly::one(), q);
        assert_eq!(&p(&[1, 1]) * &p(&[3, 2]), p(&[3, 5, 2]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(p(&[0, 1]).shift(&rat(1)), p(&[1, 1]));
        assert_eq!(p(&[0, 0, 1]).shift(&rat(1)), p(&[1, 2, 1]));
        // 2(x-1)^2 + 5(x-1) + 3 = 2x^2 + x
        assert_eq!(p(&[3, 5, 2]).shift(&rat(-1)), p(&[0, 1, 2]));
    }

    #[test]
    fn eval_examples() {
        let u2 = p(&[3, 5, 2]);
        assert_eq!(u2.eval(&rat(0)), rat(3));
        assert_eq!(u2.eval(&rat(1)), rat(10));
        assert_eq!(p(&[1, 1]).eval(&rat(-1)), rat(0));
        assert_eq!(u2.eval_f64(1.0), 10.0);
        assert_eq!(RationalPoly::zero().eval(&rat(5)), rat(0));
    }

    #[test]
    fn degree_and_leading() {
        assert_eq!(RationalPoly::zero().degree(), None);
        assert_eq!(p(&[3, 5, 2, 0, 0]).degree(), Some(2));
        assert_eq!(p(&[3, 5, 2]).leading_coeff(), Some(&rat(2)));
    }

    #[test]
    fn compose_scale_substitutes() {
        // (2x^2 - 5x + 3)(-x) = 2x^2 + 5x + 3
        assert_eq!(p(&[3, -5, 2]).compose_scale(&rat(-1)), p(&[3, 5, 2]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[3, -5, 2]).to_string(), "2x^2 - 5x + 3");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        assert_eq!(RationalPoly::zero().to_string(), "0");
        let half = RationalPoly::new(vec![ratio(1, 2), ratio(-3, 4)]);
        assert_eq!(half.to_string(), "-(3/4)x + (1/2)");
    }

    #[test]
    fn json_is_num_den_strings_lowest_degree_first() {
        let q = RationalPoly::new(vec![ratio(1, 2), rat(-3), ratio(6, 4)]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"["1/2","-3/1","3/2"]"#);
        let back: RationalPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        let bare: RationalPoly = serde_json::from_str(r#"["2","0"]"#).unwrap();
        assert_eq!(bare, p(&[2]));
        assert!(serde_json::from_str::<RationalPoly>(r#"["1/0"]"#).is_err());
    }

    fn arb_rat() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| ratio(n, d))
    }

    fn arb_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec(arb_rat(), 0..7).prop_map(RationalPoly::new)
    }

    proptest! {
        #[test]
        fn distributes(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn shift_round_trips(a in arb_poly(), c in arb_rat()) {
            prop_assert_eq!(a.shift(&c).shift(&-c.clone()), a);
        }

        #[test]
        fn shift_agrees_with_evaluation(a in arb_poly(), c in arb_rat(), x in arb_rat()) {
            prop_assert_eq!(a.shift(&c).eval(&x), a.eval(&(&x + &c)));
        }

        #[test]
        fn eval_is_multiplicative(a in arb_poly(), b in arb_poly(), x in arb_rat()) {
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        }
    }
}
