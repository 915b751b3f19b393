//! Cross-module invariants: quadrature convergence rate, total mass, label
//! stability, multiset consistency and unitary invariance of the report.

mod common;

use common::offdiag_2x2_pair;

use bmv::assign;
use bmv::config::RunConfig;
use bmv::contour::{
    choose_radius, label_branches, pencil_eigenvalues, track_branches_with_tol,
};
use bmv::eigen::hermitian_eigen;
use bmv::linalg::CMatrix;
use bmv::measure::{assemble_measure, density_raw, density_sample_points};
use bmv::pair::{random_hermitian, random_pair, HermitianPair};
use bmv::reduce::{default_eps_split, reduce_pair};
use bmv::verify::{laplace_of_measure, trace_exp, verify};

fn reduce_default(pair: &HermitianPair) -> bmv::ReducedPair {
    reduce_pair(pair, default_eps_split(pair.b()).unwrap()).unwrap()
}

#[test]
fn quadrature_convergence_is_geometric() {
    let pair = offdiag_2x2_pair();
    let red = reduce_default(&pair);
    let radius = choose_radius(&red, 256, 1e-10).unwrap();
    let samples = density_sample_points(red.b_eigs(), 8);

    let density_at_nodes = |n_nodes: usize| -> Vec<f64> {
        let contour = label_branches(
            track_branches_with_tol(&red, radius, n_nodes, 1e-10).unwrap(),
            &red,
        )
        .unwrap();
        samples
            .iter()
            .map(|&s| density_raw(&contour, &red, s).unwrap().0)
            .collect()
    };

    let reference = density_at_nodes(8192);
    let err = |w: &[f64]| -> f64 {
        w.iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let mut prev = err(&density_at_nodes(64));
    for n_nodes in [128usize, 256, 512] {
        let cur = err(&density_at_nodes(n_nodes));
        if prev < 1e-3 && prev > 1e-13 {
            assert!(
                cur < 0.5 * prev,
                "error did not halve: {prev:.3e} -> {cur:.3e} at N = {n_nodes}"
            );
        }
        prev = cur;
    }
    assert!(prev < 1e-12, "final error {prev:.3e}");
}

#[test]
fn total_mass_matches_trace_exp_at_zero() {
    let cfg = RunConfig::default();
    for seed in 0..6u64 {
        let n = 2 + (seed as usize % 3);
        let pair = random_pair(n, 400 + seed).unwrap();
        let red = reduce_default(&pair);
        let asm = assemble_measure(&red, &cfg).unwrap();
        let mass = laplace_of_measure(&asm.measure, 0.0, false);
        let expect = trace_exp(&pair, 0.0).unwrap();
        assert!(
            (mass - expect).abs() / expect < 1e-6,
            "mass {mass} vs Tr e^A {expect} (n={n}, seed={seed})"
        );
    }
}

#[test]
fn labels_stable_under_doubling() {
    let pair = random_pair(3, 77).unwrap();
    let red = reduce_default(&pair);
    let radius = choose_radius(&red, 256, 1e-10).unwrap();
    let base = label_branches(
        track_branches_with_tol(&red, radius, 256, 1e-10).unwrap(),
        &red,
    )
    .unwrap();
    let min_gap = red.min_gap();
    for (r, n_nodes) in [(radius, 512usize), (2.0 * radius, 256), (2.0 * radius, 512)] {
        let other = label_branches(
            track_branches_with_tol(&red, r, n_nodes, 1e-10).unwrap(),
            &red,
        )
        .unwrap();
        for (a, b) in base
            .slope_estimates()
            .iter()
            .zip(other.slope_estimates().iter())
        {
            assert!(
                (a - b).abs() < min_gap / 8.0,
                "slope drift {a} vs {b} at R={r}, N={n_nodes}"
            );
        }
    }
}

#[test]
fn branch_multiset_matches_pencil_solver() {
    let pair = random_pair(4, 99).unwrap();
    let red = reduce_default(&pair);
    let radius = choose_radius(&red, 256, 1e-10).unwrap();
    let contour = label_branches(
        track_branches_with_tol(&red, radius, 256, 1e-10).unwrap(),
        &red,
    )
    .unwrap();
    let scale = contour.max_branch_abs();
    let n = red.n();
    for k in (0..contour.n_nodes()).step_by(16) {
        let fresh = pencil_eigenvalues(&red, contour.nodes()[k]).unwrap();
        let stored: Vec<_> = contour.branches().iter().map(|br| br[k]).collect();
        let mut cost = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                cost[i * n + j] = (stored[i] - fresh[j]).norm();
            }
        }
        let (best, _) = assign::best_and_second(&cost, n).unwrap();
        assert!(
            best.total / scale < 1e-10,
            "multiset mismatch {:.3e} at node {k}",
            best.total / scale
        );
    }
}

#[test]
fn determinant_residual_bounded_on_random_instance() {
    let pair = random_pair(3, 123).unwrap();
    let red = reduce_default(&pair);
    let radius = choose_radius(&red, 256, 1e-10).unwrap();
    let contour = label_branches(
        track_branches_with_tol(&red, radius, 256, 1e-10).unwrap(),
        &red,
    )
    .unwrap();
    assert!(contour.determinant_residual(&red) < 1e-8);
}

#[test]
fn verify_is_unitarily_invariant() {
    let a = random_hermitian(3, 61);
    let b = random_hermitian(3, 62);
    let v = hermitian_eigen(&random_hermitian(3, 63)).unwrap().vectors;
    let pair1 = HermitianPair::new(a.clone(), b.clone()).unwrap();
    let pair2 = HermitianPair::new(
        v.adjoint().mul(&a).mul(&v),
        v.adjoint().mul(&b).mul(&v),
    )
    .unwrap();
    let cfg = RunConfig::default();
    let r1 = verify(&pair1, &cfg).unwrap();
    let r2 = verify(&pair2, &cfg).unwrap();
    assert!(r1.all_pass() && r2.all_pass());
    assert!((r1.max_rel_error - r2.max_rel_error).abs() < 1e-9);
    assert!((r1.min_density - r2.min_density).abs() < 1e-9 * (1.0 + r1.max_density));
    assert!((r1.max_density - r2.max_density).abs() < 1e-9 * (1.0 + r1.max_density));
    assert!((r1.shift - r2.shift).abs() < 1e-12);
}

#[test]
fn core_types_are_send_and_sync() {
    fn check<T: Send + Sync>() {}
    check::<bmv::HermitianPair>();
    check::<bmv::ReducedPair>();
    check::<bmv::SpectralContour>();
    check::<bmv::MeasureRepresentation>();
    check::<bmv::VerificationReport>();
    check::<bmv::RunConfig>();
}

#[test]
fn radius_search_on_exact_linear_branches() {
    // A = 0: branches are -b_j zeta, no branch points; the first tried radius
    // already satisfies every test
    let pair = HermitianPair::new(CMatrix::zeros(2), CMatrix::diag_real(&[1.0, 2.0])).unwrap();
    let red = reduce_default(&pair);
    let r = choose_radius(&red, 256, 1e-10).unwrap();
    assert!(r > 0.0 && r < 1.0, "expected the small starting radius, got {r}");
}
