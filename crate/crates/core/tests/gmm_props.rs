mod oracles;

use ndarray::{Array1, Array2};
use oracles::{rng, simpson, uniform_matrix, z_panel};
use physio_core::gmm::{fit, fit_with_trace};
use physio_core::{GmmConfig, GmmModel};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn cfg(components: usize, seed: u64) -> GmmConfig {
    GmmConfig {
        components,
        seed,
        ..GmmConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn em_never_loses_likelihood(seed in any::<u64>(), m in 1usize..=5, n in 10usize..60, b in 1usize..4) {
        let panel = z_panel(uniform_matrix(&mut rng(seed), n, b, 3.0));
        let (model, trace) = fit_with_trace(&panel, &cfg(m, seed)).unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
        prop_assert!((model.final_log_likelihood - trace.last().unwrap()).abs() < 1e-12);
        prop_assert!((model.weights.sum() - 1.0).abs() < 1e-9);
        prop_assert!(model.variances.iter().all(|&v| v >= 0.1));
    }
}

#[test]
fn one_dimensional_density_integrates_to_one() {
    let mut r = rng(17);
    for _ in 0..20 {
        let m = r.random_range(1..=4);
        let mut w = Array1::from_shape_fn(m, |_| r.random_range(0.1..1.0));
        w /= w.sum();
        let model = GmmModel {
            weights: w,
            means: Array2::from_shape_fn((m, 1), |_| r.random_range(-5.0..5.0)),
            variances: Array2::from_shape_fn((m, 1), |_| r.random_range(0.1..3.0)),
            config: cfg(m, 0),
            final_log_likelihood: 0.0,
            iterations: 0,
            converged: true,
        };
        let mass = simpson(|x| model.density(ndarray::arr1(&[x]).view()).unwrap(), -20.0, 20.0, 20_000);
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }
}

#[test]
fn recovers_well_separated_pair() {
    let mut r = rng(2);
    let mut z = Array2::zeros((40, 1));
    for i in 0..40 {
        let centre = if i < 20 { -5.0 } else { 5.0 };
        let e: f64 = r.sample(StandardNormal);
        z[[i, 0]] = centre + 0.5 * e;
    }
    let model = fit(&z_panel(z), &cfg(2, 0)).unwrap();
    let mut means: Vec<(f64, f64)> = (0..2).map(|c| (model.means[[c, 0]], model.weights[c])).collect();
    means.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!((means[0].0 + 5.0).abs() < 0.5 && (means[1].0 - 5.0).abs() < 0.5);
    assert!((means[0].1 - 0.5).abs() < 0.05);
}

#[test]
fn sampled_cohort_has_component_labels() {
    let panel = z_panel(uniform_matrix(&mut rng(8), 30, 3, 2.0));
    let model = fit(&panel, &cfg(3, 1)).unwrap();
    let (rows, labels) = model.sample(500, 4);
    assert_eq!(rows.dim(), (500, 3));
    assert!(labels.iter().all(|&l| l < 3));
    assert_eq!(model.sample(500, 4), (rows, labels));
}
