//! The circle contour and the n eigenvalue branches of the pencil
//! det(lambda I - A + zeta B) = 0 tracked around it. Branches are continued
//! node to node by minimal-cost assignment with local angular subdivision
//! when the assignment is ambiguous, then labeled by their asymptotic slopes
//! (branch j behaves like -b_j zeta + a_jj for large |zeta|).

use num_complex::Complex64;

use crate::assign;
use crate::eigen::{general_eigenvalues, hermitian_spectral_norm, polish_eigenvalue};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::reduce::ReducedPair;

/// Closure tolerance for branch monodromy, relative to max |lambda|.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-10;
/// Newton polishing: max iterations and relative step tolerance.
const POLISH_ITERS: usize = 5;
const POLISH_REL_TOL: f64 = 1e-14;
/// Deepest angular subdivision while continuing past an ambiguous step.
const MAX_REFINE_DEPTH: usize = 10;

/// Contour data: nodes zeta_k = R e^{2 pi i k/N} and branch values at each.
/// After labeling, branch j satisfies lambda_j(zeta) ~ -b_j zeta + a_jj.
#[derive(Debug, Clone)]
pub struct SpectralContour {
    radius: f64,
    nodes: Vec<C64>,
    /// branches[j][k] = lambda_j(zeta_k)
    branches: Vec<Vec<C64>>,
    closure_residual: f64,
    labeled: bool,
    /// mean of -lambda_j/zeta over the contour; approximates b_j once labeled
    slope_estimates: Vec<f64>,
    /// mean of lambda_j + b_j zeta; approximates a_jj once labeled
    diag_estimates: Vec<f64>,
    /// soft secondary check: diag_estimates within half the diagonal scale
    diag_check_ok: bool,
}

impl SpectralContour {
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }
    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }
    pub fn branches(&self) -> &[Vec<C64>] {
        &self.branches
    }
    pub fn is_labeled(&self) -> bool {
        self.labeled
    }
    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }
    pub fn slope_estimates(&self) -> &[f64] {
        &self.slope_estimates
    }
    pub fn diag_estimates(&self) -> &[f64] {
        &self.diag_estimates
    }
    pub fn diag_check_ok(&self) -> bool {
        self.diag_check_ok
    }

    pub fn max_branch_abs(&self) -> f64 {
        self.branches
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest distance between two branch values over all nodes.
    pub fn min_branch_separation(&self) -> f64 {
        let n = self.branches.len();
        let mut sep = f64::INFINITY;
        for k in 0..self.nodes.len() {
            for i in 0..n {
                for j in i + 1..n {
                    sep = sep.min((self.branches[i][k] - self.branches[j][k]).norm());
                }
            }
        }
        sep
    }

    /// max_k |sum_j lambda_j(zeta_k) - (Tr A - zeta_k Tr B)| / scale.
    pub fn trace_identity_residual(&self, pair: &ReducedPair) -> f64 {
        let tr_a = pair.a_red().trace();
        let tr_b: f64 = pair.b_eigs().iter().sum();
        let scale = 1.0f64.max(tr_a.norm() + self.radius * tr_b.abs());
        let mut worst = 0.0f64;
        for (k, &z) in self.nodes.iter().enumerate() {
            let sum: C64 = self.branches.iter().map(|br| br[k]).sum();
            let expect = tr_a - z * tr_b;
            worst = worst.max((sum - expect).norm() / scale);
        }
        worst
    }

    /// max over conjugate node pairs of |lambda_j(conj zeta) - conj lambda_j(zeta)|,
    /// relative to max |lambda|. Branch indices must agree across the pairing.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let nn = self.nodes.len();
        let scale = self.max_branch_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for br in &self.branches {
            for k in 1..nn {
                let other = nn - k;
                if other == k {
                    continue;
                }
                worst = worst.max((br[other] - br[k].conj()).norm() / scale);
            }
        }
        worst
    }

    /// max over nodes and branches of |det(lambda_j I - A + zeta B)| relative
    /// to the product of pairwise branch gaps at that node.
    pub fn determinant_residual(&self, pair: &ReducedPair) -> f64 {
        let n = self.branches.len();
        let mut worst = 0.0f64;
        for (k, &z) in self.nodes.iter().enumerate() {
            for j in 0..n {
                let lam = self.branches[j][k];
                let m = pair
                    .pencil(z)
                    .scale(C64::new(-1.0, 0.0))
                    .add_scaled_identity(lam);
                let det = m.det().norm();
                let mut gaps = 1.0f64;
                for i in 0..n {
                    if i != j {
                        gaps *= (lam - self.branches[i][k]).norm();
                    }
                }
                worst = worst.max(det / gaps.max(f64::MIN_POSITIVE));
            }
        }
        worst
    }

    /// Per-node deviation of branch j from its affine asymptote:
    /// r_j(zeta_k) = lambda_j(zeta_k) + b_j zeta_k - a_jj. Labeled contours only.
    pub fn deviations(&self, pair: &ReducedPair) -> Result<Vec<Vec<C64>>> {
        if !self.labeled {
            return Err(Error::Labeling {
                reason: "deviations requested on unlabeled contour".into(),
            });
        }
        let adiag = pair.a_diag()?;
        Ok(self
            .branches
            .iter()
            .enumerate()
            .map(|(j, br)| {
                br.iter()
                    .zip(self.nodes.iter())
                    .map(|(&lam, &z)| lam + pair.b_eigs()[j] * z - adiag[j])
                    .collect()
            })
            .collect())
    }

    /// CSV dump for external plotting: k, Re zeta, Im zeta, then per-branch
    /// Re lambda_j, Im lambda_j.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "k,re_zeta,im_zeta")?;
        for j in 0..self.branches.len() {
            write!(w, ",re_lambda_{j},im_lambda_{j}")?;
        }
        writeln!(w)?;
        for (k, z) in self.nodes.iter().enumerate() {
            write!(w, "{k},{:.16e},{:.16e}", z.re, z.im)?;
            for br in &self.branches {
                write!(w, ",{:.16e},{:.16e}", br[k].re, br[k].im)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Eigenvalue multiset of the pencil a_red - zeta diag(b_eigs), unordered.
pub fn pencil_eigenvalues(pair: &ReducedPair, zeta: C64) -> Result<Vec<C64>> {
    let m = pair.pencil(zeta);
    let raw = general_eigenvalues(&m, None).map_err(|_| Error::EigenSolver { node: Some(zeta) })?;
    Ok(raw
        .into_iter()
        .map(|lam| polish_eigenvalue(&m, lam, POLISH_ITERS, POLISH_REL_TOL))
        .collect())
}

fn eigenvalues_at(pair: &ReducedPair, zeta: C64, warm: Option<&[C64]>) -> Result<Vec<C64>> {
    let m = pair.pencil(zeta);
    let raw =
        general_eigenvalues(&m, warm).map_err(|_| Error::EigenSolver { node: Some(zeta) })?;
    Ok(raw
        .into_iter()
        .map(|lam| polish_eigenvalue(&m, lam, POLISH_ITERS, POLISH_REL_TOL))
        .collect())
}

/// Continue branch values from angle th0 to th1 (radius fixed), subdividing
/// the arc when the assignment between consecutive eigenvalue sets is
/// ambiguous (second-best total below twice the best).
fn continue_arc(
    pair: &ReducedPair,
    radius: f64,
    prev: &[C64],
    th0: f64,
    th1: f64,
    depth: usize,
) -> Result<Vec<C64>> {
    let n = prev.len();
    let zeta1 = Complex64::from_polar(radius, th1);
    let cur = eigenvalues_at(pair, zeta1, Some(prev))?;
    let mut cost = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = (prev[i] - cur[j]).norm();
        }
    }
    let (best, second) =
        assign::best_and_second(&cost, n).ok_or(Error::EigenSolver { node: Some(zeta1) })?;
    if second < 2.0 * best.total {
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::Tracking {
                theta_from: th0,
                theta_to: th1,
            });
        }
        let thm = 0.5 * (th0 + th1);
        let mid = continue_arc(pair, radius, prev, th0, thm, depth + 1)?;
        return continue_arc(pair, radius, &mid, thm, th1, depth + 1);
    }
    Ok(best.cols.iter().map(|&j| cur[j]).collect())
}

/// Track the n branches around the circle of the given radius on N uniform
/// nodes (N a power of two, N >= 64). The returned contour is unlabeled;
/// branch order is fixed by a lexicographic sort at the first node.
pub fn track_branches(pair: &ReducedPair, radius: f64, n_nodes: usize) -> Result<SpectralContour> {
    track_branches_with_tol(pair, radius, n_nodes, DEFAULT_CLOSURE_TOL)
}

pub fn track_branches_with_tol(
    pair: &ReducedPair,
    radius: f64,
    n_nodes: usize,
    closure_tol: f64,
) -> Result<SpectralContour> {
    if n_nodes < 64 || !n_nodes.is_power_of_two() {
        return Err(Error::Parameter {
            name: "n_nodes",
            reason: format!("must be a power of two >= 64, got {n_nodes}"),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::Parameter {
            name: "radius",
            reason: format!("must be positive, got {radius}"),
        });
    }
    let n = pair.n();
    let tau = 2.0 * std::f64::consts::PI;
    let nodes: Vec<C64> = (0..n_nodes)
        .map(|k| Complex64::from_polar(radius, tau * k as f64 / n_nodes as f64))
        .collect();

    let mut first = eigenvalues_at(pair, nodes[0], None)?;
    first.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });

    let mut branches = vec![vec![C64::new(0.0, 0.0); n_nodes]; n];
    for (j, &v) in first.iter().enumerate() {
        branches[j][0] = v;
    }
    let mut prev = first;
    for k in 1..n_nodes {
        let th0 = tau * (k - 1) as f64 / n_nodes as f64;
        let th1 = tau * k as f64 / n_nodes as f64;
        let cur = continue_arc(pair, radius, &prev, th0, th1, 0)?;
        for (j, &v) in cur.iter().enumerate() {
            branches[j][k] = v;
        }
        prev = cur;
    }
    let th0 = tau * (n_nodes - 1) as f64 / n_nodes as f64;
    let wrapped = continue_arc(pair, radius, &prev, th0, tau, 0)?;
    let scale = branches
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(f64::MIN_POSITIVE, f64::max);
    let closure_residual = wrapped
        .iter()
        .zip(branches.iter().map(|br| br[0]))
        .map(|(&w, b0)| (w - b0).norm())
        .fold(0.0, f64::max)
        / scale;
    if closure_residual > closure_tol {
        return Err(Error::Monodromy {
            residual: closure_residual,
            tol: closure_tol,
        });
    }

    Ok(SpectralContour {
        radius,
        nodes,
        branches,
        closure_residual,
        labeled: false,
        slope_estimates: vec![],
        diag_estimates: vec![],
        diag_check_ok: false,
    })
}

/// Label branches by their mean slope m_j = mean_k(-lambda_j(zeta_k)/zeta_k):
/// each branch is assigned to the nearest b eigenvalue. Fails when the
/// assignment is not a bijection or some slope is off by more than a quarter
/// of the smallest b gap. The recovered diagonal entries are a soft check
/// (finite-radius bias is expected), recorded in `diag_check_ok`.
pub fn label_branches(contour: SpectralContour, pair: &ReducedPair) -> Result<SpectralContour> {
    let n = pair.n();
    let b = pair.b_eigs();
    let min_gap = pair.min_gap();
    let nn = contour.nodes.len();

    let mut slope = vec![0.0f64; n];
    for (j, br) in contour.branches.iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &z) in contour.nodes.iter().enumerate() {
            acc += -br[k] / z;
        }
        slope[j] = (acc / nn as f64).re;
    }

    let mut assigned = vec![usize::MAX; n];
    for j in 0..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (i, &bi) in b.iter().enumerate() {
            let d = (slope[j] - bi).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if best_d >= min_gap / 4.0 {
            return Err(Error::Labeling {
                reason: format!(
                    "slope {:.6} of branch {} is {:.3e} away from nearest b (limit {:.3e})",
                    slope[j],
                    j,
                    best_d,
                    min_gap / 4.0
                ),
            });
        }
        assigned[j] = best;
    }
    let mut seen = vec![false; n];
    for &a in &assigned {
        if seen[a] {
            return Err(Error::Labeling {
                reason: "slope assignment is not a bijection".into(),
            });
        }
        seen[a] = true;
    }

    // reorder branches so index j corresponds to b_eigs[j]
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| assigned[j]);
    let branches: Vec<Vec<C64>> = order.iter().map(|&j| contour.branches[j].clone()).collect();
    let slope_estimates: Vec<f64> = order.iter().map(|&j| slope[j]).collect();

    let adiag = pair.a_diag()?;
    let ascale = 1.0f64.max(adiag.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut diag_estimates = vec![0.0f64; n];
    let mut diag_check_ok = true;
    for j in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &z) in contour.nodes.iter().enumerate() {
            acc += branches[j][k] + b[j] * z;
        }
        diag_estimates[j] = (acc / nn as f64).re;
        if (diag_estimates[j] - adiag[j]).abs() > ascale / 2.0 {
            diag_check_ok = false;
        }
    }

    Ok(SpectralContour {
        labeled: true,
        branches,
        slope_estimates,
        diag_estimates,
        diag_check_ok,
        ..contour
    })
}

/// Hard variant of the labeling diagnostics used by the radius search: the
/// diagonal recovery must hold, and the branch deviations r_j must carry no
/// significant positive Laurent powers (an inner-annulus sheet does).
fn radius_quality(contour: &SpectralContour, pair: &ReducedPair) -> std::result::Result<(), String> {
    if !contour.diag_check_ok {
        return Err("diagonal recovery failed".into());
    }
    let adiag = match pair.a_diag() {
        Ok(d) => d,
        Err(e) => return Err(e.to_string()),
    };
    let nn = contour.nodes.len();
    let scale = contour.max_branch_abs().max(1.0);
    let r = contour.radius;
    for (j, br) in contour.branches.iter().enumerate() {
        for q in [2i32, 3] {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &z) in contour.nodes.iter().enumerate() {
                let dev = br[k] + pair.b_eigs()[j] * z - adiag[j];
                acc += dev * z.powi(-q);
            }
            let cq = (acc / nn as f64).norm() * r.powi(q);
            if cq > 1e-6 * scale {
                return Err(format!(
                    "branch {j} has positive Laurent power zeta^{q} of size {cq:.3e}"
                ));
            }
        }
    }
    Ok(())
}

fn try_radius(
    pair: &ReducedPair,
    radius: f64,
    probe_nodes: usize,
    closure_tol: f64,
) -> std::result::Result<SpectralContour, String> {
    let contour =
        track_branches_with_tol(pair, radius, probe_nodes, closure_tol).map_err(|e| e.to_string())?;
    if pair.n() > 1 {
        let polish_abs = POLISH_REL_TOL * contour.max_branch_abs();
        if contour.min_branch_separation() <= 10.0 * polish_abs {
            return Err("branch separation too small".into());
        }
    }
    let contour = label_branches(contour, pair).map_err(|e| e.to_string())?;
    radius_quality(&contour, pair)?;
    Ok(contour)
}

/// Find a contour radius on which all branch tests pass: monodromy closure,
/// branch separation, unambiguous labeling with diagonal recovery, no
/// positive Laurent powers, and stability of everything under doubling the
/// radius (including a three-point density cross-check). The search walks
/// upward from a small start so the accepted radius stays close to the
/// outermost branch point, where the quadrature is best conditioned.
pub fn choose_radius(pair: &ReducedPair, probe_nodes: usize, closure_tol: f64) -> Result<f64> {
    let n = pair.n();
    let norm_a = hermitian_spectral_norm(pair.a_red())?;
    let min_gap = pair.min_gap();
    let mut radius = 0.25 * (1.0 + norm_a) / min_gap;
    let mut last_reason = String::from("no radius tried");
    const MAX_STEPS: usize = 60;
    for _step in 0..MAX_STEPS {
        match try_radius(pair, radius, probe_nodes, closure_tol) {
            Err(why) => last_reason = why,
            Ok(contour) => match try_radius(pair, 2.0 * radius, 2 * probe_nodes, closure_tol) {
                Err(why) => last_reason = format!("at 2R: {why}"),
                Ok(doubled) => {
                    let drift = contour
                        .slope_estimates
                        .iter()
                        .zip(doubled.slope_estimates.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    if drift > min_gap / 16.0 {
                        last_reason = format!("slope drift {drift:.3e} under radius doubling");
                    } else if n >= 2 {
                        let b = pair.b_eigs();
                        let span = b[n - 1] - b[0];
                        let mut worst = 0.0f64;
                        let mut wmax = 0.0f64;
                        for frac in [0.29, 0.52, 0.77] {
                            let s = b[0] + span * frac;
                            let (w1, _) = crate::measure::density_raw(&contour, pair, s)?;
                            let (w2, _) = crate::measure::density_raw(&doubled, pair, s)?;
                            worst = worst.max((w1 - w2).abs());
                            wmax = wmax.max(w1.abs());
                        }
                        if worst > 1e-4 * wmax.max(1.0) + 1e-9 {
                            last_reason =
                                format!("density canary drift {worst:.3e} under radius doubling");
                        } else {
                            return Ok(radius);
                        }
                    } else {
                        return Ok(radius);
                    }
                }
            },
        }
        radius *= 1.5;
    }
    Err(Error::RadiusSearch {
        steps: MAX_STEPS,
        last_radius: radius,
        diagnostics: last_reason,
    })
}
