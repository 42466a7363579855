mod common;

use gridless_doa::conic::SolverConfig;
use gridless_doa::geometry::{build_virtual_grid, spatial_frequency, ArrayGeometry};
use gridless_doa::pswf::compute_basis;
use gridless_doa::recovery::*;
use gridless_doa::signal::{apply_noise, synthesize, SourceScene, WidebandParams};
use gridless_doa::Error;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn vandermonde_t(nodes: &[Complex64], powers: &[f64], n: usize) -> DMatrix<Complex64> {
    let v = DMatrix::from_fn(n, nodes.len(), |m, k| nodes[k].powu(m as u32));
    let p = DMatrix::from_diagonal(&DVector::from_iterator(nodes.len(), powers.iter().map(|&p| Complex64::new(p, 0.0))));
    &v * p * v.adjoint()
}

/// Prony: linear prediction on the first column, then companion-matrix roots.
fn prony_nodes(t: &DMatrix<Complex64>, k: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = t.column(0).iter().copied().collect();
    let rows = v.len() - k;
    let h = DMatrix::from_fn(rows, k, |m, i| v[m + i]);
    let rhs = DVector::from_fn(rows, |m, _| -v[m + k]);
    let a = h.svd(true, true).solve(&rhs, 1e-13).unwrap();
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            -a[k - 1 - j]
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    nalgebra::Schur::new(companion).eigenvalues().unwrap().iter().copied().collect()
}

fn sorted_by_arg(mut z: Vec<Complex64>) -> Vec<Complex64> {
    z.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    z
}

#[test]
fn pencil_agrees_with_prony_on_exact_rank() {
    let omegas = [-1.3, -0.2, 0.45, 1.1];
    let nodes: Vec<Complex64> = omegas.iter().map(|&w| Complex64::from_polar(1.0, w)).collect();
    let t = vandermonde_t(&nodes, &[1.0, 0.5, 2.0, 0.8], 20);
    let pencil = sorted_by_arg(extract_nodes(&t, 4).unwrap().nodes);
    let prony = sorted_by_arg(prony_nodes(&t, 4));
    for ((a, b), want) in pencil.iter().zip(&prony).zip(sorted_by_arg(nodes.clone())) {
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        assert!((a - want).norm() < 1e-9);
    }
    let ex = extract_nodes(&t, 4).unwrap();
    assert!(ex.rank_ratio < 1e-10 && !ex.rank_warning);
    let p = vandermonde_powers(&t, &ex.nodes).unwrap();
    let mut by_node: Vec<(f64, f64)> = ex.nodes.iter().map(|z| z.arg()).zip(p).collect();
    by_node.sort_by(|a, b| a.0.total_cmp(&b.0));
    for ((_, got), want) in by_node.iter().zip([1.0, 0.5, 2.0, 0.8]) {
        assert!((got - want).abs() < 1e-8);
    }
}

#[test]
fn rank_guard_flags_an_underestimated_order() {
    let nodes: Vec<Complex64> = [-1.0, 0.3, 1.2].iter().map(|&w| Complex64::from_polar(1.0, w)).collect();
    let t = vandermonde_t(&nodes, &[1.0, 1.0, 1.0], 12);
    let ex = extract_nodes(&t, 2).unwrap();
    assert!(ex.rank_warning);
    assert!(ex.rank_ratio >= RANK_RATIO_GUARD);
    assert!(ex.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    assert!(matches!(extract_nodes(&t, 0), Err(Error::InvalidParameter(_))));
    assert!(matches!(extract_nodes(&t, 12), Err(Error::InvalidParameter(_))));
}

#[test]
fn angle_conversion() {
    assert!((freq_to_theta(0.25).unwrap() - 30.0).abs() < 1e-12);
    assert!((freq_to_theta(-0.5).unwrap() + 90.0).abs() < 1e-12);
    assert!(freq_to_theta(0.6).is_err());
    let e = DoaEstimate::new(vec![0.3, -0.1, 0.0], vec![1.0, 2.0, 3.0]).unwrap();
    assert_eq!(e.powers, vec![2.0, 3.0, 1.0]);
    assert!(e.thetas_deg.windows(2).all(|w| w[0] < w[1]));
}

fn setup(seed: u64, j: usize) -> (ArrayGeometry, WidebandParams) {
    let p = WidebandParams::underwater(j);
    let g = ArrayGeometry::random(8, p.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    (g, p)
}

#[test]
fn noiseless_single_source_round_trip() {
    let (g, p) = setup(3, 4);
    let theta = (0.2f64).asin().to_degrees();
    let snap = synthesize(&g, &SourceScene::new(vec![theta]).unwrap(), &p, 1).unwrap();
    let r = srw_doa(&g, &snap, 1, 0.0, &SrwConfig::default()).unwrap();
    assert!((r.estimate.frequencies[0] - 0.1).abs() < 1e-4, "{:?}", r.estimate);
    assert!(!r.warnings());
    assert_eq!(r.m_tilde, 7 * 4 + 1);
}

#[test]
fn noisy_two_sources() {
    let (g, p) = setup(4, 4);
    let truth = [-20.0, 25.0];
    let snap = synthesize(&g, &SourceScene::new(truth.to_vec()).unwrap(), &p, 9).unwrap();
    let (noisy, sigma) = apply_noise(&snap, 20.0, 10);
    let cfg = SrwConfig { solver: SolverConfig::default().with_tolerance(1e-5), ..SrwConfig::default() };
    let r = srw_doa(&g, &noisy, 2, sigma, &cfg).unwrap();
    for (est, t) in r.estimate.thetas_deg.iter().zip(truth) {
        assert!((est - t).abs() < 1.0, "{:?}", r.estimate.thetas_deg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frequency_node_round_trip(seed in any::<u64>(), f in -0.5f64..0.5) {
        let (g, p) = setup(seed, 5);
        let alphas: Vec<f64> = gridless_doa::signal::select_bins(&p).unwrap().iter().map(|&b| p.alpha(b)).collect();
        let grid = build_virtual_grid(&g, &alphas, None).unwrap();
        let basis = compute_basis(PI * grid.max_position(), 1e-4).unwrap();
        let omega = 2.0 * PI * f * grid.max_position() / basis.d() as f64;
        let z = Complex64::from_polar(1.0, -omega);
        let (fs, aliased) = nodes_to_frequencies(&[z], &grid, &basis);
        prop_assert!(!aliased);
        prop_assert!((fs[0] - f).abs() < 1e-12);
        let theta = freq_to_theta(fs[0]).unwrap();
        prop_assert!((spatial_frequency(theta) - f).abs() < 1e-12);
    }

    #[test]
    fn pencil_recovers_separated_nodes(a in -2.8f64..-1.0, b in -0.5f64..0.5, c in 1.0f64..2.8, pw in 0.2f64..5.0) {
        let nodes: Vec<Complex64> = [a, b, c].iter().map(|&w| Complex64::from_polar(1.0, w)).collect();
        let t = vandermonde_t(&nodes, &[1.0, pw, 1.0 / pw], 16);
        let got = sorted_by_arg(extract_nodes(&t, 3).unwrap().nodes);
        for (x, y) in got.iter().zip(&nodes) {
            prop_assert!((x - y).norm() < 1e-8);
        }
    }
}
