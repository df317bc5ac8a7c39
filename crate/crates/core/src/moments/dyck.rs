//! Brute-force enumeration of Dyck paths.
//!
//! Used as an oracle: it shares no code with the recurrences in the parent
//! module.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::ratpoly::rat;

/// Largest semilength accepted by the enumerators (C_10 = 16796 paths).
pub const MAX_DYCK_SEMILENGTH: usize = 10;

/// A lattice path of `+1`/`-1` steps from height 0 back to 0 that never goes
/// below the axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyckPath {
    steps: Vec<i8>,
}

impl DyckPath {
    /// Validates the step list.
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        let mut height = 0i64;
        for &s in &steps {
            if s != 1 && s != -1 {
                return Err(crate::error::invalid("steps", "steps must be +1 or -1"));
            }
            height += i64::from(s);
            if height < 0 {
                return Err(crate::error::invalid("steps", "path goes below the axis"));
            }
        }
        if height != 0 {
            return Err(crate::error::invalid("steps", "path does not return to the axis"));
        }
        Ok(DyckPath { steps })
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn semilength(&self) -> usize {
        self.steps.len() / 2
    }

    /// Product of `rise_weight(k)` over every rise from level `k` to `k + 1`.
    pub fn weight<T, F>(&self, rise_weight: F) -> T
    where
        T: One + Mul<Output = T>,
        F: Fn(usize) -> T,
    {
        let mut level = 0usize;
        let mut w = T::one();
        for &s in &self.steps {
            if s == 1 {
                w = w * rise_weight(level);
                level += 1;
            } else {
                level -= 1;
            }
        }
        w
    }
}

/// All Dyck paths of length `2n`, in lexicographic order with rises first.
pub fn dyck_paths(n: usize) -> Result<Vec<DyckPath>> {
    if n > MAX_DYCK_SEMILENGTH {
        return Err(Error::BudgetExceeded {
            what: "Dyck path enumeration semilength",
            limit: MAX_DYCK_SEMILENGTH,
            requested: n,
        });
    }
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(2 * n);
    extend(n, 0, 0, &mut steps, &mut out);
    Ok(out)
}

fn extend(n: usize, rises: usize, height: usize, steps: &mut Vec<i8>, out: &mut Vec<DyckPath>) {
    if steps.len() == 2 * n {
        out.push(DyckPath {
            steps: steps.clone(),
        });
        return;
    }
    if rises < n {
        steps.push(1);
        extend(n, rises + 1, height + 1, steps, out);
        steps.pop();
    }
    if height > 0 {
        steps.push(-1);
        extend(n, rises, height - 1, steps, out);
        steps.pop();
    }
}

fn weighted_sum<T, F>(n: usize, rise_weight: F) -> Result<T>
where
    T: Zero + One + Add<Output = T> + Mul<Output = T>,
    F: Fn(usize) -> T,
{
    Ok(dyck_paths(n)?
        .iter()
        .fold(T::zero(), |acc, path| acc + path.weight(&rise_weight)))
}

/// Sum over all Dyck paths of length `2n` of the product of `(alpha + k + 1)`
/// over rises from level `k`.
pub fn dyck_weight_sum(n: usize, alpha: f64) -> Result<f64> {
    weighted_sum(n, |k| alpha + k as f64 + 1.0)
}

/// Exact rational version of [`dyck_weight_sum`].
pub fn dyck_weight_sum_exact(n: usize, alpha: &BigRational) -> Result<BigRational> {
    weighted_sum(n, |k| alpha + rat(k as i64 + 1))
}
