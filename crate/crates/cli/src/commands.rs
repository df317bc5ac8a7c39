use std::hash::{BuildHasher, Hasher};

use gbe_spectral::moments::{
    dyck_weight_sum_exact, lemma_two_step, m_polynomial, recurrence_residuals, u_sequence_exact,
    u_sequence_numeric, verify_duality_with, verify_kappa_limit, verify_limit_to_u, verify_u_h_relation,
    MAX_DUALITY_P, MAX_DYCK_SEMILENGTH, MAX_U_H_P,
};
use gbe_spectral::ratpoly::{parse_rational, rational_to_string, RationalPoly};
use gbe_spectral::sampler::{mc_run, HistogramSpec, McConfig};
use gbe_spectral::special::{
    density as density_at, density_moment_check, f_hat_kummer, f_hat_quadrature, semicircle_density, DensityMethod,
    DensityParams, METHOD_AGREEMENT_TOL,
};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::output::{csv, fmt_num, Artifact, CommandOutput};
use crate::{
    CliError, DensityArgs, FormatArg, MethodArg, MomentsArgs, RunManifest, SampleArgs, SemicircleArgs, VerifyArgs,
};

/// Tolerance on the density normalization.
pub const NORMALIZATION_TOL: f64 = 1e-8;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Accepts `p/q`, an integer, or a decimal (taken at its exact binary value).
pub fn parse_number(s: &str) -> Result<BigRational, CliError> {
    if let Some(r) = parse_rational(s) {
        return Ok(r);
    }
    let x: f64 = s.trim().parse().map_err(|_| usage(format!("not a number: {s:?}")))?;
    BigRational::from_float(x).ok_or_else(|| usage(format!("not a finite number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<BigRational>, CliError> {
    let items: Vec<BigRational> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_number)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(usage("empty list"));
    }
    Ok(items)
}

fn default_beta_hats() -> Vec<BigRational> {
    parse_list("1/2,1,2,3/7").expect("static list")
}

#[derive(Debug, Serialize)]
pub struct MomentChecks {
    pub duality: bool,
    pub dyck: bool,
    pub u_h: bool,
    pub duality_max_p: usize,
    pub dyck_max_n: usize,
    pub u_h_max_p: usize,
}

#[derive(Debug, Serialize)]
pub struct MomentsDoc {
    pub alpha: f64,
    pub alpha_exact: String,
    pub n_max: usize,
    pub u: Vec<f64>,
    pub u_exact: Vec<String>,
    pub checks: Option<MomentChecks>,
}

pub fn moments(args: &MomentsArgs) -> Result<CommandOutput, CliError> {
    let alpha = parse_number(&args.alpha)?;
    if alpha.is_negative() {
        return Err(usage(format!("--alpha must be >= 0, got {}", args.alpha)));
    }
    let alpha_f = alpha.to_f64().unwrap_or(f64::NAN);
    let u = u_sequence_numeric(alpha_f, args.n)?.values;
    if let Some(n) = u.iter().position(|v| !v.is_finite()) {
        return Err(usage(format!("u_{n} overflows f64; lower --n")));
    }
    let exact = u_sequence_exact(&alpha, args.n)?;

    let checks = if args.checks {
        let dyck_max_n = args.n.min(MAX_DYCK_SEMILENGTH);
        let mut dyck = true;
        for n in 0..=dyck_max_n {
            dyck &= dyck_weight_sum_exact(n, &alpha)? == exact[n];
        }
        let duality_max_p = args.n.min(MAX_DUALITY_P);
        let mut duality = true;
        for b in default_beta_hats() {
            for p in 0..=duality_max_p {
                duality &= verify_duality_with(p, &b, m_polynomial)?;
            }
        }
        let u_h_max_p = args.n.min(MAX_U_H_P);
        let mut u_h = true;
        for p in 0..=u_h_max_p {
            u_h &= verify_u_h_relation(p)?;
        }
        Some(MomentChecks {
            duality,
            dyck,
            u_h,
            duality_max_p,
            dyck_max_n,
            u_h_max_p,
        })
    } else {
        None
    };

    let mut failures = Vec::new();
    if let Some(c) = &checks {
        for (name, ok) in [("duality", c.duality), ("dyck", c.dyck), ("u_h", c.u_h)] {
            if !ok {
                failures.push(format!("{name} check failed at alpha = {}", rational_to_string(&alpha)));
            }
        }
    }
    let doc = MomentsDoc {
        alpha: alpha_f,
        alpha_exact: rational_to_string(&alpha),
        n_max: args.n,
        u,
        u_exact: exact.iter().map(rational_to_string).collect(),
        checks,
    };
    Ok(CommandOutput {
        primary: Artifact::json("moments.json", &doc)?,
        sidecars: Vec::new(),
        manifest: RunManifest::new("moments")
            .param("alpha", &args.alpha)
            .param("n", args.n)
            .param("checks", args.checks),
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Serialize)]
pub struct MethodAgreement {
    pub max_difference: f64,
    pub tolerance: f64,
    pub points_compared: usize,
}

#[derive(Debug, Serialize)]
pub struct DensityDiagnostics {
    pub alpha: f64,
    pub method: DensityMethod,
    pub ymax: f64,
    pub points: usize,
    pub normalization: Option<f64>,
    pub normalization_error: Option<f64>,
    pub normalization_tolerance: f64,
    pub integration_radius: Option<f64>,
    pub method_agreement: MethodAgreement,
    /// `max |mu(y) - mu(-y)|` over the grid.
    pub max_asymmetry: f64,
    pub failures: Vec<String>,
}

fn symmetric_grid(half_width: f64, points: usize) -> Vec<f64> {
    let m = (points - 1) as f64;
    (0..points)
        .map(|i| half_width * (2.0 * i as f64 - m) / m)
        .collect()
}

pub fn density(args: &DensityArgs) -> Result<CommandOutput, CliError> {
    if !(args.ymax > 0.0) || !args.ymax.is_finite() {
        return Err(usage("--ymax must be positive"));
    }
    if args.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let method = match args.method {
        MethodArg::Kummer => DensityMethod::Kummer,
        MethodArg::Quadrature => DensityMethod::Quadrature,
        MethodArg::Auto => DensityMethod::Auto,
    };
    let params = DensityParams::new(args.alpha)?.with_method(method);
    let ys = symmetric_grid(args.ymax, args.points);

    let mut failures = Vec::new();
    let values: Vec<f64> = ys
        .iter()
        .map(|&y| {
            density_at(y, &params).unwrap_or_else(|e| {
                failures.push(format!("density at y = {y}: {e}"));
                f64::NAN
            })
        })
        .collect();
    let n = values.len();
    let max_asymmetry = (0..n / 2)
        .map(|i| (values[i] - values[n - 1 - i]).abs())
        .filter(|d| !d.is_nan())
        .fold(0.0, f64::max);

    let (mut max_difference, mut points_compared) = (0.0f64, 0);
    for &y in ys.iter().filter(|y| 0.5 * *y * *y <= params.x_switch) {
        match (f_hat_kummer(y, args.alpha, params.series_tol), f_hat_quadrature(y, args.alpha)) {
            (Ok(k), Ok((q, _))) => {
                max_difference = max_difference.max((k - q).norm());
                points_compared += 1;
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("f_hat at y = {y}: {e}")),
        }
    }
    if max_difference > METHOD_AGREEMENT_TOL {
        failures.push(format!(
            "Kummer and quadrature f_hat differ by {max_difference:e} > {METHOD_AGREEMENT_TOL:e}"
        ));
    }

    let (normalization, integration_radius) = match density_moment_check(0, &params) {
        Ok(c) => (Some(c.normalization), Some(c.radius)),
        Err(e) => {
            failures.push(format!("normalization: {e}"));
            (None, None)
        }
    };
    let normalization_error = normalization.map(|v| (v - 1.0).abs());
    if let Some(err) = normalization_error.filter(|&e| !(e <= NORMALIZATION_TOL)) {
        failures.push(format!("normalization off by {err:e}"));
    }

    let diag = DensityDiagnostics {
        alpha: args.alpha,
        method,
        ymax: args.ymax,
        points: args.points,
        normalization,
        normalization_error,
        normalization_tolerance: NORMALIZATION_TOL,
        integration_radius,
        method_agreement: MethodAgreement {
            max_difference,
            tolerance: METHOD_AGREEMENT_TOL,
            points_compared,
        },
        max_asymmetry,
        failures: failures.clone(),
    };
    let table = csv(&["y", "density"], ys.iter().zip(&values).map(|(&y, &d)| vec![y, d]));
    Ok(CommandOutput {
        primary: Artifact {
            file_name: "density.csv".into(),
            contents: table,
        },
        sidecars: vec![Artifact::json("density.json", &diag)?],
        manifest: RunManifest::new("density")
            .param("alpha", args.alpha)
            .param("ymax", args.ymax)
            .param("points", args.points)
            .param("method", method),
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityRow {
    pub p: usize,
    pub beta_hat: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UhRow {
    pub p: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaRow {
    pub p: usize,
    pub n: u64,
    pub beta_hat_grid: Vec<f64>,
    pub deviations: Vec<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub p: usize,
    pub alpha: f64,
    pub n_grid: Vec<u64>,
    pub deviations: Vec<f64>,
    pub ratios: Vec<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaRow {
    pub alpha: f64,
    pub max_residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub pmax: usize,
    pub beta_hat: Vec<String>,
    pub duality: Vec<DualityRow>,
    pub u_h: Vec<UhRow>,
    pub kappa_limit: Vec<KappaRow>,
    pub limit_to_u: Vec<LimitRow>,
    pub lemma: Vec<LemmaRow>,
    pub all_pass: bool,
    pub failures: Vec<String>,
}

/// Largest `p` used for the two limit checks.
pub const LIMIT_CHECK_MAX_P: usize = 4;
const KAPPA_N: u64 = 5;
const KAPPA_GRID: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const LIMIT_N_GRID: [u64; 6] = [8, 16, 32, 64, 128, 256];
const LIMIT_RATIO_TOL: f64 = 0.3;
const LEMMA_TOL: f64 = 1e-10;

/// Runs every identity check; `m_poly` supplies the `m_p` polynomials used by
/// the duality rows.
pub fn verify_report<F>(pmax: usize, beta_hats: &[BigRational], m_poly: F) -> Result<VerifyReport, CliError>
where
    F: Fn(usize, &BigRational) -> gbe_spectral::Result<RationalPoly>,
{
    if pmax > MAX_DUALITY_P {
        return Err(usage(format!("--pmax is limited to {MAX_DUALITY_P}")));
    }
    if let Some(b) = beta_hats.iter().find(|b| !b.is_positive()) {
        return Err(usage(format!("beta_hat must be positive, got {}", rational_to_string(b))));
    }
    let mut failures = Vec::new();

    let mut duality = Vec::new();
    for b in beta_hats {
        for p in 0..=pmax {
            let holds = verify_duality_with(p, b, &m_poly)?;
            if !holds {
                failures.push(format!("duality: p = {p}, beta_hat = {}", rational_to_string(b)));
            }
            duality.push(DualityRow {
                p,
                beta_hat: rational_to_string(b),
                holds,
            });
        }
    }

    let mut u_h = Vec::new();
    for p in 0..=pmax.min(MAX_U_H_P) {
        let holds = verify_u_h_relation(p)?;
        if !holds {
            failures.push(format!("u/h relation: p = {p}"));
        }
        u_h.push(UhRow { p, holds });
    }

    let mut kappa_limit = Vec::new();
    for p in 0..=pmax.min(LIMIT_CHECK_MAX_P) {
        let deviations = verify_kappa_limit(p, KAPPA_N, &KAPPA_GRID)?;
        let holds = if p == 0 {
            deviations.iter().all(|&d| d == 0.0)
        } else {
            deviations.windows(2).all(|w| w[1] < w[0])
        };
        if !holds {
            failures.push(format!("kappa limit: p = {p}, N = {KAPPA_N}"));
        }
        kappa_limit.push(KappaRow {
            p,
            n: KAPPA_N,
            beta_hat_grid: KAPPA_GRID.to_vec(),
            deviations,
            holds,
        });
    }

    let mut limit_to_u = Vec::new();
    for alpha in [1.0, 2.0] {
        for p in 1..=pmax.min(LIMIT_CHECK_MAX_P) {
            let deviations = verify_limit_to_u(p, alpha, &LIMIT_N_GRID)?;
            let ratios: Vec<f64> = deviations.windows(2).map(|w| w[0] / w[1]).collect();
            let holds = ratios.iter().all(|r| (r - 2.0).abs() <= LIMIT_RATIO_TOL);
            if !holds {
                failures.push(format!("limit to u: p = {p}, alpha = {alpha}"));
            }
            limit_to_u.push(LimitRow {
                p,
                alpha,
                n_grid: LIMIT_N_GRID.to_vec(),
                deviations,
                ratios,
                holds,
            });
        }
    }

    let mut lemma = Vec::new();
    for alpha in [0.0, 1.0, 2.0, 3.5] {
        let a = u_sequence_numeric(alpha, 10)?.values;
        let b = lemma_two_step(&a, &alpha)?;
        let max_residual = recurrence_residuals(&b, alpha + 1.0).into_iter().fold(0.0, f64::max);
        let holds = max_residual <= LEMMA_TOL;
        if !holds {
            failures.push(format!("two-step lemma: alpha = {alpha}"));
        }
        lemma.push(LemmaRow {
            alpha,
            max_residual,
            holds,
        });
    }

    Ok(VerifyReport {
        pmax,
        beta_hat: beta_hats.iter().map(rational_to_string).collect(),
        duality,
        u_h,
        kappa_limit,
        limit_to_u,
        lemma,
        all_pass: failures.is_empty(),
        failures,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<CommandOutput, CliError> {
    let beta_hats = parse_list(&args.beta_hat)?;
    let report = verify_report(args.pmax, &beta_hats, m_polynomial)?;
    Ok(CommandOutput {
        primary: Artifact::json("verify.json", &report)?,
        sidecars: Vec::new(),
        manifest: RunManifest::new("verify")
            .param("pmax", args.pmax)
            .param("beta_hat", &report.beta_hat),
        passed: report.all_pass,
        failures: report.failures,
    })
}

/// A seed from the process-wide random hasher state.
pub fn fresh_seed() -> u64 {
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0),
    );
    h.finish()
}

pub fn sample(args: &SampleArgs, threads: Option<usize>) -> Result<CommandOutput, CliError> {
    let seed = args.seed.unwrap_or_else(fresh_seed);
    let histogram = (args.bins > 0).then_some(HistogramSpec {
        bins: args.bins,
        y_max: args.ymax,
    });
    let report = mc_run(&McConfig {
        alpha: args.alpha,
        truncation: args.trunc,
        samples: args.samples,
        p_max: Some(args.pmax),
        histogram,
        seed,
        threads,
    })?;
    let table = Artifact {
        file_name: "sample.csv".into(),
        contents: csv(
            &["bin_center", "mass", "std_error"],
            report.histogram.iter().map(|b| vec![b.center, b.mass, b.std_error]),
        ),
    };
    let json = Artifact::json("sample.json", &report)?;
    let (primary, sidecar) = match args.format {
        FormatArg::Csv => (table, json),
        FormatArg::Json => (json, table),
    };
    let mut manifest = RunManifest::new("sample")
        .param("alpha", args.alpha)
        .param("trunc", args.trunc)
        .param("samples", args.samples)
        .param("pmax", args.pmax)
        .param("bins", args.bins)
        .param("ymax", args.ymax)
        .param("seed_generated", args.seed.is_none());
    manifest.seed = Some(seed);
    Ok(CommandOutput {
        primary,
        sidecars: vec![sidecar],
        manifest,
        passed: true,
        failures: Vec::new(),
    })
}

#[derive(Debug, Serialize)]
pub struct SemicircleSummary {
    pub alpha: Vec<f64>,
    /// Range `[-x, x]` of the sup-deviation.
    pub sup_range: f64,
    pub sup_deviation: Vec<f64>,
    pub decreasing: bool,
}

/// Half-width and spacing of the fixed grid for the sup-deviation.
pub const SUP_RANGE: f64 = 1.9;
const SUP_POINTS: usize = 381;

pub fn semicircle(args: &SemicircleArgs) -> Result<CommandOutput, CliError> {
    let alphas: Vec<f64> = parse_list(&args.alpha)?
        .iter()
        .map(|a| a.to_f64().unwrap_or(f64::NAN))
        .collect();
    if !(args.xmax > 0.0) || !args.xmax.is_finite() {
        return Err(usage("--xmax must be positive"));
    }
    if args.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let params: Vec<DensityParams> = alphas
        .iter()
        .map(|&a| Ok(DensityParams::new(a)?.with_method(DensityMethod::Kummer)))
        .collect::<Result<_, CliError>>()?;
    let rescaled = |p: &DensityParams, x: f64| -> Result<f64, CliError> {
        let s = p.alpha.sqrt();
        Ok(s * density_at(s * x, p)?)
    };

    let xs = symmetric_grid(args.xmax, args.points);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut row = vec![x, semicircle_density(x)];
        for p in &params {
            row.push(rescaled(p, x)?);
        }
        rows.push(row);
    }

    let mut sup_deviation = Vec::with_capacity(params.len());
    for p in &params {
        let mut sup = 0.0f64;
        for &x in &symmetric_grid(SUP_RANGE, SUP_POINTS) {
            sup = sup.max((rescaled(p, x)? - semicircle_density(x)).abs());
        }
        sup_deviation.push(sup);
    }
    let summary = SemicircleSummary {
        decreasing: sup_deviation.windows(2).all(|w| w[1] < w[0]),
        alpha: alphas.clone(),
        sup_range: SUP_RANGE,
        sup_deviation,
    };

    let names: Vec<String> = alphas.iter().map(|&a| format!("alpha_{}", fmt_num(a))).collect();
    let mut header = vec!["x", "semicircle"];
    header.extend(names.iter().map(String::as_str));
    Ok(CommandOutput {
        primary: Artifact {
            file_name: "semicircle.csv".into(),
            contents: csv(&header, rows),
        },
        sidecars: vec![Artifact::json("semicircle.json", &summary)?],
        manifest: RunManifest::new("semicircle")
            .param("alpha", &alphas)
            .param("xmax", args.xmax)
            .param("points", args.points),
        passed: true,
        failures: Vec::new(),
    })
}
