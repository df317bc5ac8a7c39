//! Spectral data of finite Jacobi matrices.
//!
//! [`spectral_decomposition`] runs implicit-shift QL on the tridiagonal
//! matrix and tracks only the first row of the accumulated rotations, which is
//! all the spectral measure of `(J, e_1)` needs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 50;

/// Largest `k * N` accepted by [`matrix_power_entry`].
pub const MAX_POWER_WORK: usize = 1_000_000;

/// Symmetric tridiagonal matrix with strictly positive off-diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteJacobi {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl FiniteJacobi {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("diag", "matrix must have at least one row"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(invalid(
                "offdiag",
                format!("expected length {}, got {}", diag.len() - 1, offdiag.len()),
            ));
        }
        if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
            return Err(invalid("diag", format!("entry {i} is not finite")));
        }
        if let Some(i) = offdiag.iter().position(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(invalid(
                "offdiag",
                format!("entry {i} = {} must be finite and > 0", offdiag[i]),
            ));
        }
        Ok(FiniteJacobi { diag, offdiag })
    }

    /// Leading `m x m` block of the deterministic matrix with zero diagonal and
    /// off-diagonal `sqrt(alpha + 1), sqrt(alpha + 2), ...`.
    pub fn a_alpha(m: usize, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        let offdiag = (1..m).map(|j| (alpha + j as f64).sqrt()).collect();
        Self::new(vec![0.0; m], offdiag)
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `out = J v`.
    fn apply(&self, v: &[f64], out: &mut [f64], active: usize) {
        let n = self.n();
        for i in 0..active.min(n) {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.offdiag[i] * v[i + 1];
            }
            out[i] = s;
        }
    }
}

/// `sum_j weights[j] * delta(points[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpectralMeasure {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteSpectralMeasure {
    pub fn moment(&self, k: u32) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * x.powi(k as i32))
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Eigenvalues (ascending) and squared first eigenvector components.
pub fn spectral_decomposition(j: &FiniteJacobi) -> Result<DiscreteSpectralMeasure> {
    let n = j.n();
    let mut d = j.diag.clone();
    let mut e = j.offdiag.clone();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigenNonConvergence {
                    index: l,
                    iterations: MAX_QL_ITERATIONS,
                });
            }

            // Wilkinson shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                let r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(DiscreteSpectralMeasure {
        points: order.iter().map(|&i| d[i]).collect(),
        weights: order.iter().map(|&i| z[i] * z[i]).collect(),
    })
}

/// `J^k(1,1)` by applying `J` to `e_1` `k` times.
pub fn matrix_power_entry(j: &FiniteJacobi, k: usize) -> Result<f64> {
    Ok(*matrix_power_entries(j, k)?.last().unwrap())
}

/// `[J^0(1,1), J^1(1,1), ..., J^k_max(1,1)]`.
pub fn matrix_power_entries(j: &FiniteJacobi, k_max: usize) -> Result<Vec<f64>> {
    let n = j.n();
    if k_max.saturating_mul(n) > MAX_POWER_WORK {
        return Err(Error::BudgetExceeded {
            what: "matrix power work k*N",
            limit: MAX_POWER_WORK,
            requested: k_max.saturating_mul(n),
        });
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    for k in 1..=k_max {
        // after k steps only the first k+1 entries can be nonzero
        j.apply(&v, &mut w, k + 1);
        std::mem::swap(&mut v, &mut w);
        out.push(v[0]);
    }
    Ok(out)
}
