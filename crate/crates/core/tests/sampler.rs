use gbe_spectral::quadrature::{integrate, QuadConfig};
use gbe_spectral::sampler::{mc_histogram, mc_mean_moments, McReport};
use gbe_spectral::special::{density, DensityParams};

#[test]
fn short_and_long_truncations_agree() {
    for p_max in [1usize, 3] {
        let short = mc_mean_moments(1.5, p_max + 1, 20_000, p_max, 5, None).unwrap();
        let long = mc_mean_moments(1.5, 4 * (p_max + 1), 20_000, p_max, 6, None).unwrap();
        for (a, b) in short.moment_estimates.iter().zip(&long.moment_estimates) {
            let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!((a.mean - b.mean).abs() <= 4.0 * se + 1e-12, "p={} {a:?} {b:?}", a.p);
        }
    }
}

fn sup_bin_deviation(r: &McReport) -> f64 {
    let spec = r.histogram_spec.unwrap();
    let params = DensityParams::new(r.alpha).unwrap();
    let cfg = QuadConfig::new(1e-12, 1e-10);
    r.histogram
        .iter()
        .enumerate()
        .map(|(i, bin)| {
            let (a, b) = spec.edges(i);
            let exact = integrate(|y| density(y, &params).unwrap(), a, b, &cfg).unwrap().value;
            (bin.mass - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn edge_effect_shrinks_with_truncation() {
    // matched seed: the 25 x 25 matrices are leading blocks of the 200 x 200 ones
    let small = mc_histogram(1.0, 25, 2_000, 60, 6.0, 31, None).unwrap();
    let large = mc_histogram(1.0, 200, 2_000, 60, 6.0, 31, None).unwrap();
    assert!(sup_bin_deviation(&large) <= sup_bin_deviation(&small));
}
