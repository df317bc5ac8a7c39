//! Exact expectation `E[T_N(2 beta_hat)^{2p}(1,1)]` as a polynomial in `N`.
//!
//! The (1,1) entry of the `2p`-th power is a sum over closed walks of length
//! `2p` on the half-line started at site 1: a flat step at site `i` picks up
//! the diagonal entry `a_i`, a step across edge `j` picks up `b_j`. Entries
//! are independent, so each walk contributes
//! `prod_i E[a_i^{m_i}] * prod_j E[b_j^{2k_j}]` where `E[a^m] = (m-1)!!` for
//! even `m` and `E[b_j^{2k}] = ((N - j) beta_hat)_k` (rising factorial),
//! since `b_j^2 ~ Gamma((N - j) beta_hat, 1)`.
//!
//! Walks are aggregated by a forward sweep over (site, exponent tally) states
//! with integer multiplicities, then grouped by edge tally so that every
//! distinct product of rising factorials is formed once.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::ratpoly::{rat, RationalPoly};

/// Upper bound on `p` for the walk enumeration.
pub const MAX_WALK_HALF_LENGTH: usize = 10;

/// `(m - 1)!!` for even `m`, zero for odd `m`: the `m`-th moment of N(0, 1).
fn gaussian_moment(m: u8) -> u128 {
    if m % 2 == 1 {
        return 0;
    }
    (1..m as u128).step_by(2).product()
}

/// Exact `m_p(N, beta_hat)` as a polynomial in `N`.
pub fn m_polynomial(p: usize, beta_hat: &BigRational) -> Result<RationalPoly> {
    if !beta_hat.is_positive() {
        return Err(invalid("beta_hat", "must be positive"));
    }
    if p > MAX_WALK_HALF_LENGTH {
        return Err(Error::BudgetExceeded {
            what: "walk enumeration half-length",
            limit: MAX_WALK_HALF_LENGTH,
            requested: p,
        });
    }
    if p == 0 {
        return Ok(RationalPoly::one());
    }

    let steps = 2 * p;
    let sites = p + 1;
    // key layout: [site, a_0..a_p, e_0..e_{p-1}]
    let key_len = 1 + sites + p;
    let start = vec![0u8; key_len];
    let mut states: HashMap<Vec<u8>, u64> = HashMap::from([(start, 1)]);

    for step in 0..steps {
        let remaining = steps - step - 1;
        let mut next: HashMap<Vec<u8>, u64> = HashMap::with_capacity(states.len() * 2);
        for (key, count) in &states {
            let site = key[0] as usize;
            // flat step
            if site <= remaining {
                let mut k = key.clone();
                k[1 + site] += 1;
                *next.entry(k).or_insert(0) += count;
            }
            // up across edge `site`
            if site + 1 < sites && site + 1 <= remaining {
                let mut k = key.clone();
                k[0] += 1;
                k[1 + sites + site] += 1;
                *next.entry(k).or_insert(0) += count;
            }
            // down across edge `site - 1`
            if site > 0 {
                let mut k = key.clone();
                k[0] -= 1;
                k[1 + sites + site - 1] += 1;
                *next.entry(k).or_insert(0) += count;
            }
        }
        states = next;
    }

    let mut by_edges: HashMap<Vec<u8>, BigInt> = HashMap::new();
    for (key, count) in states {
        debug_assert_eq!(key[0], 0);
        let diag: u128 = key[1..1 + sites].iter().map(|&m| gaussian_moment(m)).product();
        if diag == 0 {
            continue;
        }
        let edges = key[1 + sites..].to_vec();
        *by_edges.entry(edges).or_insert_with(BigInt::zero) += BigInt::from(diag) * BigInt::from(count);
    }

    let mut rising = RisingCache::new(beta_hat);
    let mut total = RationalPoly::zero();
    for (edges, coeff) in by_edges {
        let mut term = RationalPoly::constant(BigRational::from_integer(coeff));
        for (j, &crossings) in edges.iter().enumerate() {
            if crossings > 0 {
                debug_assert_eq!(crossings % 2, 0);
                term = &term * rising.get(j + 1, crossings as usize / 2);
            }
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Memoized `((N - j) beta_hat)_k` as polynomials in `N`.
struct RisingCache<'a> {
    beta_hat: &'a BigRational,
    cache: HashMap<(usize, usize), RationalPoly>,
}

impl<'a> RisingCache<'a> {
    fn new(beta_hat: &'a BigRational) -> Self {
        RisingCache {
            beta_hat,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, j: usize, k: usize) -> &RationalPoly {
        let beta_hat = self.beta_hat;
        self.cache.entry((j, k)).or_insert_with(|| {
            (0..k).fold(RationalPoly::one(), |acc, i| {
                let factor = RationalPoly::linear(
                    beta_hat.clone(),
                    rat(i as i64) - beta_hat * rat(j as i64),
                );
                &acc * &factor
            })
        })
    }
}

/// Matrix size and scaled inverse temperature of the tridiagonal model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GbeParams {
    n: u64,
    beta_hat: BigRational,
}

impl GbeParams {
    pub fn new(n: u64, beta_hat: BigRational) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N", "matrix size must be at least 1"));
        }
        if !beta_hat.is_positive() {
            return Err(invalid("beta_hat", "must be positive"));
        }
        Ok(GbeParams { n, beta_hat })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn beta_hat(&self) -> &BigRational {
        &self.beta_hat
    }

    /// `beta = 2 beta_hat` as a float.
    pub fn beta(&self) -> f64 {
        use num_traits::ToPrimitive;
        2.0 * self.beta_hat.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact `E[T_N(beta)^{2p}(1,1)]`.
    pub fn expected_moment(&self, p: usize) -> Result<BigRational> {
        let n = BigRational::from_integer(BigInt::from(self.n));
        Ok(m_polynomial(p, &self.beta_hat)?.eval(&n))
    }
}
