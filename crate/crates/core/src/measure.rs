//! The representing measure: point masses exp(a_jj) at the b_j plus the
//! continuous density w on (b_1, b_n), evaluated by trapezoidal quadrature of
//! the branch exponentials around the contour. The trapezoid rule on a
//! uniform circle grid is exponentially accurate here because the integrand
//! is analytic and periodic in the angle.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::contour::{choose_radius, label_branches, track_branches_with_tol, SpectralContour};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::reduce::ReducedPair;

/// Atoms, sampled density and the spectrum shift needed to map back to the
/// original B coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureRepresentation {
    /// (location b_j, weight exp(a_jj)), strictly increasing locations
    pub atoms: Vec<(f64, f64)>,
    /// closed support interval [b_1, b_n] in reduced coordinates
    pub support: (f64, f64),
    /// density samples (s, w(s)) on Chebyshev points of each open interval
    /// (b_k, b_{k+1}); empty for n = 1
    pub density: Vec<(f64, f64)>,
    /// points per interval used for the density grid
    pub points_per_interval: usize,
    /// scalar added to B's spectrum during reduction
    pub shift: f64,
}

impl MeasureRepresentation {
    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn max_density(&self) -> f64 {
        self.density
            .iter()
            .map(|&(_, w)| w.abs())
            .fold(0.0, f64::max)
    }

    pub fn min_density(&self) -> f64 {
        self.density
            .iter()
            .map(|&(_, w)| w)
            .fold(f64::INFINITY, f64::min)
    }

    /// Atom locations translated back to the original-B coordinates.
    pub fn atoms_original(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|&(s, w)| (s - self.shift, w))
            .collect()
    }

    pub fn density_original(&self) -> Vec<(f64, f64)> {
        self.density
            .iter()
            .map(|&(s, w)| (s - self.shift, w))
            .collect()
    }
}

/// Discrete component: (b_j, exp(a_jj)). Off-diagonal entries of A do not
/// enter; the diagonal of a Hermitian matrix is real.
pub fn atoms(pair: &ReducedPair) -> Result<Vec<(f64, f64)>> {
    let adiag = pair.a_diag()?;
    Ok(pair
        .b_eigs()
        .iter()
        .zip(adiag.iter())
        .map(|(&b, &a)| (b, a.exp()))
        .collect())
}

struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan { sum: 0.0, c: 0.0 }
    }
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        self.c += if self.sum.abs() >= v.abs() {
            (self.sum - t) + v
        } else {
            (v - t) + self.sum
        };
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Shared quadrature core: (1/N) sum over the selected branches and all
/// nodes of zeta_k exp(lambda_j(zeta_k) + s zeta_k), with the largest
/// exponent factored out per branch. Returns (complex total, max exponent).
fn branch_sum(
    contour: &SpectralContour,
    branch_indices: &[usize],
    s: f64,
) -> Result<(C64, f64)> {
    let nodes = contour.nodes();
    let nn = nodes.len() as f64;
    let mut total_re = Kahan::new();
    let mut total_im = Kahan::new();
    let mut exp_max_all = f64::NEG_INFINITY;
    for &j in branch_indices {
        let br = &contour.branches()[j];
        let mut emax = f64::NEG_INFINITY;
        for (k, &z) in nodes.iter().enumerate() {
            emax = emax.max(br[k].re + s * z.re);
        }
        exp_max_all = exp_max_all.max(emax);
        if emax > 700.0 {
            return Err(Error::Accuracy {
                reason: format!("exponent {emax:.1} overflows f64 (radius too large)"),
            });
        }
        let mut sre = Kahan::new();
        let mut sim = Kahan::new();
        for (k, &z) in nodes.iter().enumerate() {
            let e = br[k].re + s * z.re - emax;
            let p = br[k].im + s * z.im;
            let mag = e.exp();
            let (sin_p, cos_p) = p.sin_cos();
            sre.add(mag * (z.re * cos_p - z.im * sin_p));
            sim.add(mag * (z.re * sin_p + z.im * cos_p));
        }
        let scale = emax.exp();
        total_re.add(scale * sre.value());
        total_im.add(scale * sim.value());
    }
    Ok((
        C64::new(total_re.value() / nn, total_im.value() / nn),
        exp_max_all,
    ))
}

/// Raw density value at s with its normalized imaginary residual; no domain
/// or accuracy policing. The branch set summed over is chosen between
/// {j : b_j < s} and its complement (the two agree up to the closed-contour
/// residual of the full sum and the complement keeps the exponents smaller
/// on the far half of the support).
pub fn density_raw(contour: &SpectralContour, pair: &ReducedPair, s: f64) -> Result<(f64, f64)> {
    if !contour.is_labeled() {
        return Err(Error::Labeling {
            reason: "density requires a labeled contour".into(),
        });
    }
    let b = pair.b_eigs();
    let n = b.len();
    let lower = (s - b[0]) <= (b[n - 1] - s);
    let (indices, sign): (Vec<usize>, f64) = if lower {
        ((0..n).filter(|&j| b[j] < s).collect(), 1.0)
    } else {
        ((0..n).filter(|&j| b[j] > s).collect(), -1.0)
    };
    let (total, emax) = branch_sum(contour, &indices, s)?;
    let scale = emax.exp() * contour.radius();
    let value = sign * total.re;
    let im_residual = total.im.abs() / scale.max(f64::MIN_POSITIVE);
    Ok((value, im_residual))
}

/// Density of the continuous component at an interior point s, per the
/// residue-sum formula. Errors outside the open support, at an atom, or when
/// the imaginary residual exceeds tau_im (a sign the node count is too low).
pub fn density_at(
    contour: &SpectralContour,
    pair: &ReducedPair,
    s: f64,
    tau_im: f64,
) -> Result<f64> {
    let b = pair.b_eigs();
    let n = b.len();
    let (lo, hi) = (b[0], b[n - 1]);
    if !(s > lo && s < hi) {
        return Err(Error::Domain { s, lo, hi });
    }
    if b.iter().any(|&bj| bj == s) {
        return Err(Error::Domain { s, lo, hi });
    }
    let (value, im_residual) = density_raw(contour, pair, s)?;
    if im_residual > tau_im {
        return Err(Error::Accuracy {
            reason: format!(
                "imaginary residual {im_residual:.3e} exceeds tau_im {tau_im:.3e} at s = {s}"
            ),
        });
    }
    Ok(value)
}

/// Normalized residual of the closed-contour integral summed over all n
/// branches; the exact value is zero (the summed integrand extends to an
/// entire function), so small values certify quadrature and tracking jointly.
pub fn all_branches_residual(contour: &SpectralContour, pair: &ReducedPair, s: f64) -> Result<f64> {
    let n = pair.n();
    let indices: Vec<usize> = (0..n).collect();
    let (total, emax) = branch_sum(contour, &indices, s)?;
    let scale = (emax.exp() * contour.radius()).max(f64::MIN_POSITIVE);
    Ok(total.norm() / scale)
}

/// Chebyshev (first kind) interior nodes of (lo, hi), ascending.
pub fn chebyshev_points(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..m)
        .rev()
        .map(|i| {
            let theta = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64;
            mid + half * theta.cos()
        })
        .collect()
}

/// Fejer quadrature weights matching `chebyshev_points` (same ascending
/// order; the weights are symmetric so order only matters for pairing).
/// Exact for polynomials of degree < m on [-1, 1], scaled by the interval.
pub fn fejer_weights(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let half = 0.5 * (hi - lo);
    (0..m)
        .rev()
        .map(|i| {
            let theta = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64;
            let mut acc = 0.0;
            for l in 1..=(m / 2) {
                acc += (2.0 * l as f64 * theta).cos() / ((4 * l * l - 1) as f64);
            }
            half * (2.0 / m as f64) * (1.0 - 2.0 * acc)
        })
        .collect()
}

/// All density sample locations: Chebyshev interior points of every interval
/// (b_k, b_{k+1}), so each b_j is a cell boundary and never sampled.
pub fn density_sample_points(b: &[f64], points_per_interval: usize) -> Vec<f64> {
    let mut pts = Vec::new();
    for w in b.windows(2) {
        pts.extend(chebyshev_points(w[0], w[1], points_per_interval));
    }
    pts
}

/// Sample the density on the standard grid. `tau_im` as in `density_at`.
pub fn density_grid(
    contour: &SpectralContour,
    pair: &ReducedPair,
    points_per_interval: usize,
    tau_im: f64,
) -> Result<Vec<(f64, f64)>> {
    if points_per_interval < 2 {
        return Err(Error::Parameter {
            name: "points_per_interval",
            reason: format!("must be at least 2, got {points_per_interval}"),
        });
    }
    density_sample_points(pair.b_eigs(), points_per_interval)
        .into_iter()
        .map(|s| density_at(contour, pair, s, tau_im).map(|w| (s, w)))
        .collect()
}

/// A converged measure together with the contour it was computed on and the
/// node-doubling convergence trace (N, max change).
pub struct Assembly {
    pub measure: MeasureRepresentation,
    pub contour: SpectralContour,
    pub convergence: Vec<(usize, f64)>,
}

/// Full pipeline: radius search, tracking, labeling, then the density grid
/// with the node count doubled until the samples move less than
/// tau_quad * max(1, max |w|) between refinements.
pub fn assemble_measure(pair: &ReducedPair, config: &RunConfig) -> Result<Assembly> {
    config.validate()?;
    let radius = match config.radius {
        Some(r) => r,
        None => choose_radius(pair, 256, config.tau_closure).map_err(|e| e.in_stage("radius"))?,
    };
    let n = pair.n();
    let sample_points = if n >= 2 {
        density_sample_points(pair.b_eigs(), config.points_per_interval)
    } else {
        vec![]
    };

    let mut n_nodes = config.n_nodes_initial;
    let mut prev: Option<Vec<f64>> = None;
    let mut trace: Vec<(usize, f64)> = Vec::new();
    loop {
        let contour = track_branches_with_tol(pair, radius, n_nodes, config.tau_closure)
            .and_then(|c| label_branches(c, pair))
            .map_err(|e| e.in_stage("tracking"))?;
        let mut w = Vec::with_capacity(sample_points.len());
        let mut im_worst = 0.0f64;
        for &s in &sample_points {
            let (v, imres) = density_raw(&contour, pair, s)?;
            im_worst = im_worst.max(imres);
            w.push(v);
        }
        let wmax = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let converged = match &prev {
            None => n == 1, // single-atom case has no density to compare
            Some(p) => {
                let delta = w
                    .iter()
                    .zip(p.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                trace.push((n_nodes, delta));
                delta < config.tau_quad * wmax.max(1.0)
            }
        };
        if converged {
            if im_worst > config.tau_im {
                return Err(Error::Accuracy {
                    reason: format!(
                        "imaginary residual {im_worst:.3e} above tau_im at converged N"
                    ),
                });
            }
            // closed-contour sum over all branches vanishes identically;
            // a large residual here means tracking or quadrature is off
            let mid = 0.5 * (pair.b_eigs()[0] + pair.b_eigs()[n - 1]);
            let sanity = all_branches_residual(&contour, pair, mid)?;
            if sanity > 1e-8 {
                return Err(Error::Accuracy {
                    reason: format!("closed-contour residual {sanity:.3e} at converged N"),
                });
            }
            let atoms = atoms(pair)?;
            let measure = MeasureRepresentation {
                support: (pair.b_eigs()[0], pair.b_eigs()[n - 1]),
                atoms,
                density: sample_points.iter().copied().zip(w).collect(),
                points_per_interval: config.points_per_interval,
                shift: pair.shift(),
            };
            return Ok(Assembly {
                measure,
                contour,
                convergence: trace,
            });
        }
        prev = Some(w);
        if 2 * n_nodes > config.n_nodes_max {
            return Err(Error::Convergence {
                max_nodes: config.n_nodes_max,
                trace,
            });
        }
        n_nodes *= 2;
    }
}
