//! Random Jacobi matrices and Monte Carlo estimates of the mean spectral
//! measure.
//!
//! Work is split into chunks of [`CHUNK_SIZE`] samples. Chunk `c` draws from
//! the stream `(seed, c)` and chunk results are merged in chunk order, so a
//! report depends only on the seed and the chunk layout, never on the number
//! of worker threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{matrix_power_entries, spectral_decomposition, FiniteJacobi};

/// Samples per chunk.
pub const CHUNK_SIZE: usize = 1000;

/// Deterministic random source identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draw from `sqrt(Gamma(k/2, 1))`.
pub fn sample_chi_tilde<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64> {
    Ok(chi_tilde(k)?.sample(rng).sqrt())
}

fn chi_tilde(k: f64) -> Result<Gamma<f64>> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(invalid("k", format!("must be finite and > 0, got {k}")));
    }
    Gamma::new(0.5 * k, 1.0).map_err(|e| invalid("k", e.to_string()))
}

// A gamma draw with tiny shape can underflow to exactly zero; the smallest
// positive normal keeps the matrix a valid Jacobi matrix and is far below
// anything the eigen solver can resolve.
fn positive(b: f64) -> f64 {
    b.max(f64::MIN_POSITIVE)
}

/// `T_N(beta)`: standard normal diagonal, off-diagonal entry `j` (1-based)
/// distributed as `chi_tilde((N - j) beta)`.
///
/// Entries are drawn in the order `a_1, b_1, a_2, b_2, ..., a_N`.
pub fn build_t<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<FiniteJacobi> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("must be finite and > 0, got {beta}")));
    }
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n - 1);
    for j in 1..=n {
        diag.push(rng.sample::<f64, _>(StandardNormal));
        if j < n {
            let b = chi_tilde((n - j) as f64 * beta)?.sample(rng).sqrt();
            offdiag.push(positive(b));
        }
    }
    FiniteJacobi::new(diag, offdiag)
}

/// Leading `m x m` block of `J_alpha`: standard normal diagonal, i.i.d.
/// `chi_tilde(2 alpha)` off-diagonal.
///
/// Entries are drawn in the order `a_1, b_1, a_2, b_2, ..., a_m`, so for a
/// fixed stream a smaller truncation is exactly the leading block of a larger
/// one.
pub fn build_j_trunc<R: Rng + ?Sized>(m: usize, alpha: f64, rng: &mut R) -> Result<FiniteJacobi> {
    if m == 0 {
        return Err(invalid("M", "must be at least 1"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite and > 0, got {alpha}")));
    }
    let gamma = chi_tilde(2.0 * alpha)?;
    let mut diag = Vec::with_capacity(m);
    let mut offdiag = Vec::with_capacity(m - 1);
    for j in 1..=m {
        diag.push(rng.sample::<f64, _>(StandardNormal));
        if j < m {
            offdiag.push(positive(gamma.sample(rng).sqrt()));
        }
    }
    FiniteJacobi::new(diag, offdiag)
}

/// Streaming mean and variance, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / n;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.count as f64 * w;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation over `sqrt(count)`.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        (self.m2.max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: usize,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub center: f64,
    pub mass: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: usize,
    pub y_max: f64,
}

impl HistogramSpec {
    pub fn width(&self) -> f64 {
        2.0 * self.y_max / self.bins as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.y_max + (i as f64 + 0.5) * self.width()
    }

    pub fn edges(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        (-self.y_max + i as f64 * w, -self.y_max + (i + 1) as f64 * w)
    }

    fn index(&self, y: f64) -> Option<usize> {
        if !(y >= -self.y_max && y < self.y_max) {
            return None;
        }
        let i = ((y + self.y_max) / self.width()).floor() as usize;
        Some(i.min(self.bins - 1))
    }
}

/// Monte Carlo run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub alpha: f64,
    pub truncation: usize,
    pub samples: usize,
    /// Estimate `E[J^{2p}(1,1)]` for `p = 0..=p_max`.
    pub p_max: Option<usize>,
    pub histogram: Option<HistogramSpec>,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Never changes results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("must be finite and > 0, got {}", self.alpha)));
        }
        if self.truncation == 0 {
            return Err(invalid("truncation", "must be at least 1"));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        if let Some(p) = self.p_max {
            if self.truncation < p + 1 {
                return Err(invalid(
                    "truncation",
                    format!("must be >= p_max + 1 = {} for exact moment estimates", p + 1),
                ));
            }
        }
        if let Some(h) = self.histogram {
            if h.bins == 0 {
                return Err(invalid("bins", "must be at least 1"));
            }
            if !(h.y_max > 0.0) || !h.y_max.is_finite() {
                return Err(invalid("y_max", "must be finite and > 0"));
            }
        }
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub alpha: f64,
    pub truncation: usize,
    pub samples: usize,
    pub seed: u64,
    pub chunk_size: usize,
    pub chunks: usize,
    pub moment_estimates: Vec<MomentEstimate>,
    pub histogram_spec: Option<HistogramSpec>,
    pub histogram: Vec<HistogramBin>,
    /// Mean spectral mass falling outside `[-y_max, y_max)`.
    pub out_of_range_mass: Option<f64>,
    pub out_of_range_std_error: Option<f64>,
}

#[derive(Clone, Debug)]
struct ChunkResult {
    moments: Vec<Accumulator>,
    bins: Vec<Accumulator>,
    outside: Accumulator,
}

fn run_chunk(cfg: &McConfig, chunk: usize) -> Result<ChunkResult> {
    let mut rng = RngStream::new(cfg.seed, chunk as u64);
    let start = chunk * CHUNK_SIZE;
    let count = CHUNK_SIZE.min(cfg.samples - start);
    let n_moments = cfg.p_max.map_or(0, |p| p + 1);
    let n_bins = cfg.histogram.map_or(0, |h| h.bins);
    let mut out = ChunkResult {
        moments: vec![Accumulator::default(); n_moments],
        bins: vec![Accumulator::default(); n_bins],
        outside: Accumulator::default(),
    };
    let mut masses = vec![0.0; n_bins];
    for _ in 0..count {
        let j = build_j_trunc(cfg.truncation, cfg.alpha, &mut rng)?;
        if let Some(p_max) = cfg.p_max {
            let powers = matrix_power_entries(&j, 2 * p_max)?;
            for (p, acc) in out.moments.iter_mut().enumerate() {
                acc.push(powers[2 * p]);
            }
        }
        if let Some(h) = cfg.histogram {
            let mu = spectral_decomposition(&j)?;
            masses.iter_mut().for_each(|m| *m = 0.0);
            let mut outside = 0.0;
            for (&y, &w) in mu.points.iter().zip(&mu.weights) {
                match h.index(y) {
                    Some(i) => masses[i] += w,
                    None => outside += w,
                }
            }
            for (acc, &m) in out.bins.iter_mut().zip(&masses) {
                acc.push(m);
            }
            out.outside.push(outside);
        }
    }
    Ok(out)
}

/// Runs the Monte Carlo described by `cfg`.
pub fn mc_run(cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    let chunks = cfg.samples.div_ceil(CHUNK_SIZE);
    let work = || -> Result<Vec<ChunkResult>> {
        (0..chunks).into_par_iter().map(|c| run_chunk(cfg, c)).collect()
    };
    let results = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| invalid("threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut total = results[0].clone();
    for r in &results[1..] {
        total.moments.iter_mut().zip(&r.moments).for_each(|(a, b)| a.merge(b));
        total.bins.iter_mut().zip(&r.bins).for_each(|(a, b)| a.merge(b));
        total.outside.merge(&r.outside);
    }

    let moment_estimates = total
        .moments
        .iter()
        .enumerate()
        .map(|(p, a)| MomentEstimate {
            p,
            mean: a.mean(),
            std_error: a.std_error(),
        })
        .collect();
    let histogram = match cfg.histogram {
        Some(h) => total
            .bins
            .iter()
            .enumerate()
            .map(|(i, a)| HistogramBin {
                center: h.center(i),
                mass: a.mean(),
                std_error: a.std_error(),
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(McReport {
        alpha: cfg.alpha,
        truncation: cfg.truncation,
        samples: cfg.samples,
        seed: cfg.seed,
        chunk_size: CHUNK_SIZE,
        chunks,
        moment_estimates,
        histogram_spec: cfg.histogram,
        histogram,
        out_of_range_mass: cfg.histogram.map(|_| total.outside.mean()),
        out_of_range_std_error: cfg.histogram.map(|_| total.outside.std_error()),
    })
}

/// Mean and standard error of `J^{2p}(1,1)` for `p = 0..=p_max` over
/// truncations of size `m`.
pub fn mc_mean_moments(
    alpha: f64,
    m: usize,
    samples: usize,
    p_max: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<McReport> {
    mc_run(&McConfig {
        alpha,
        truncation: m,
        samples,
        p_max: Some(p_max),
        histogram: None,
        seed,
        threads,
    })
}

/// Mean spectral mass per bin on `[-y_max, y_max)` over truncations of size
/// `m`.
pub fn mc_histogram(
    alpha: f64,
    m: usize,
    samples: usize,
    bins: usize,
    y_max: f64,
    seed: u64,
    threads: Option<usize>,
) -> Result<McReport> {
    mc_run(&McConfig {
        alpha,
        truncation: m,
        samples,
        p_max: None,
        histogram: Some(HistogramSpec { bins, y_max }),
        seed,
        threads,
    })
}
