//! Shared test support: the independent inverse-Laplace oracle for the 2x2
//! reference pair, ensemble generators, and contour integrity assertions.
// not every test target uses every helper
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bmv::contour::SpectralContour;
use bmv::linalg::CMatrix;
use bmv::pair::HermitianPair;
use bmv::reduce::ReducedPair;

/// Density of the representing measure for A = [[0,1],[1,0]], B = diag(1,2)
/// at s in (1, 2), frozen from the inverse-Laplace oracle below (cross-checked
/// against a 60-digit evaluation of the same series).
pub const ORACLE_W_125: f64 = 1.0967258957148532;
pub const ORACLE_W_150: f64 = 1.1303182079849701;
pub const ORACLE_W_175: f64 = 1.0967258957148532;

/// Wynn epsilon extrapolation of a sequence of partial sums.
fn wynn_epsilon(psums: &[f64]) -> f64 {
    let mut prev = vec![0.0f64; psums.len() + 1];
    let mut cur = psums.to_vec();
    let mut best = *cur.last().unwrap();
    let mut col = 1usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 1 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Independent numerical inverse Laplace transform of
/// g(t) = Tr exp(A - tB) - atom terms for A = [[0,1],[1,0]], B = diag(1,2):
/// the density w(s) on (1, 2). Trapezoidal Bromwich sum with step pi/s (an
/// exact discretization here: shifted copies of the compactly supported
/// density fall outside its support), accelerated by Wynn's epsilon.
/// f(t) is hand-coded from the 2x2 characteristic polynomial, so this path
/// shares nothing with the library implementation.
pub fn oracle_density_2x2(s: f64) -> f64 {
    assert!(s > 1.0 && s < 2.0);
    let damping = 1.0;
    let step = std::f64::consts::PI / s;
    let g = |t: Complex64| -> Complex64 {
        let f = 2.0 * (-1.5 * t).exp() * (0.25 * t * t + 1.0).sqrt().cosh();
        f - (-t).exp() - (-2.0 * t).exp()
    };
    let k_max = 140usize;
    let mut partial = Vec::with_capacity(k_max + 1);
    let mut acc = g(Complex64::new(damping, 0.0)).re;
    partial.push(acc);
    for k in 1..=k_max {
        let v = g(Complex64::new(damping, k as f64 * step)).re;
        let signed = if k % 2 == 0 { 2.0 * v } else { -2.0 * v };
        acc += signed;
        partial.push(acc);
    }
    let est = wynn_epsilon(&partial[10..]);
    (damping * s).exp() / (2.0 * s) * est
}

pub fn offdiag_2x2_pair() -> HermitianPair {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let a = CMatrix::from_rows(&[vec![zero, one], vec![one, zero]]).unwrap();
    let b = CMatrix::diag_real(&[1.0, 2.0]);
    HermitianPair::new(a, b).unwrap()
}

/// Random diagonal instance for the exactness suite: diag A with entries in
/// [-2, 2], diag B sorted with all entries in [-2, 2] and gaps >= 0.1.
pub fn diagonal_instance(seed: u64) -> HermitianPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6usize);
    let adiag: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let gaps: Vec<f64> = (0..n - 1)
        .map(|_| rng.gen_range(0.1..0.6f64))
        .collect();
    let total: f64 = gaps.iter().sum();
    let start = rng.gen_range(-2.0..(2.0 - total));
    let mut b = Vec::with_capacity(n);
    let mut v = start;
    b.push(v);
    for g in gaps {
        v += g;
        b.push(v);
    }
    HermitianPair::new(CMatrix::diag_real(&adiag), CMatrix::diag_real(&b)).unwrap()
}

/// Branch integrity bounds enforced on every tracked contour in the suites.
pub fn assert_contour_integrity(contour: &SpectralContour, pair: &ReducedPair, label: &str) {
    let closure = contour.closure_residual();
    assert!(closure < 1e-10, "{label}: closure residual {closure:.3e}");
    let trace = contour.trace_identity_residual(pair);
    assert!(trace < 1e-10, "{label}: trace identity residual {trace:.3e}");
    let conj = contour.conjugate_symmetry_residual();
    assert!(conj < 1e-10, "{label}: conjugate symmetry residual {conj:.3e}");
}
