//! Verification surface: the direct trace f(t) = Tr exp(A - tB), its
//! reconstruction from the measure, the closed-contour residual checks, and
//! the polynomial-coefficient statement for positive semi-definite B.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::eigen::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::measure::{all_branches_residual, assemble_measure, fejer_weights, Assembly, MeasureRepresentation};
use crate::pair::HermitianPair;
use crate::reduce::{default_eps_split, reduce_pair, ReducedPair};

/// Positivity scale: density samples must stay above -POSITIVITY_TOL * max(1, max w).
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Normalized closed-contour residual bound at converged node counts.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// f(t) = Tr exp(A - tB) = sum_i exp(nu_i), nu_i the (real) eigenvalues of
/// the Hermitian matrix A - tB. Always positive.
pub fn trace_exp(pair: &HermitianPair, t: f64) -> Result<f64> {
    let n = pair.n();
    let mut m = pair.a().clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= C64::new(t, 0.0) * pair.b()[(i, j)];
        }
    }
    Ok(hermitian_eigenvalues(&m)?.iter().map(|v| v.exp()).sum())
}

/// Same for a reduced pair (B diagonal).
pub fn trace_exp_reduced(pair: &ReducedPair, t: f64) -> Result<f64> {
    let m = pair.pencil(C64::new(t, 0.0));
    Ok(hermitian_eigenvalues(&m)?.iter().map(|v| v.exp()).sum())
}

/// Laplace transform of the measure: sum_j weight_j e^{-b_j t} plus the
/// density integral, the latter via Fejer weights on the stored Chebyshev
/// samples of each interval. With `original_coords` the stored shift is
/// unapplied, i.e. the value refers to the original (perturbed) B.
pub fn laplace_of_measure(m: &MeasureRepresentation, t: f64, original_coords: bool) -> f64 {
    let mut total = 0.0;
    for &(b, w) in &m.atoms {
        total += w * (-b * t).exp();
    }
    let ppi = m.points_per_interval;
    if !m.density.is_empty() && ppi >= 2 {
        let boundaries: Vec<f64> = m.atoms.iter().map(|&(b, _)| b).collect();
        for (iv, wnd) in boundaries.windows(2).enumerate() {
            let weights = fejer_weights(wnd[0], wnd[1], ppi);
            for (i, wt) in weights.iter().enumerate() {
                let (s, w) = m.density[iv * ppi + i];
                total += wt * w * (-s * t).exp();
            }
        }
    }
    if original_coords {
        total * (m.shift * t).exp()
    } else {
        total
    }
}

/// Tolerances a report was judged against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportTolerances {
    pub tau_laplace: f64,
    pub tau_residual: f64,
    pub tau_positivity: f64,
}

/// Outcome of the full verification pipeline on one pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub t_grid: Vec<f64>,
    pub f_direct: Vec<f64>,
    pub f_from_measure: Vec<f64>,
    pub max_rel_error: f64,
    /// max normalized closed-contour residual over the probe s values
    pub residual_max: f64,
    pub min_density: f64,
    pub max_density: f64,
    pub positivity_pass: bool,
    pub laplace_pass: bool,
    pub residual_pass: bool,
    pub tolerances: ReportTolerances,
    pub shift: f64,
    pub radius: f64,
    pub n_nodes: usize,
    pub eps_split: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.positivity_pass && self.laplace_pass && self.residual_pass
    }

    pub fn summary(&self) -> String {
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        format!(
            "laplace round-trip: max rel error {:.3e} ({})\n\
             contour residual:   max {:.3e} ({})\n\
             density range:      [{:.3e}, {:.3e}] ({})\n\
             radius {:.4}, nodes {}, shift {:.3e}, eps_split {:.3e}",
            self.max_rel_error,
            flag(self.laplace_pass),
            self.residual_max,
            flag(self.residual_pass),
            self.min_density,
            self.max_density,
            flag(self.positivity_pass),
            self.radius,
            self.n_nodes,
            self.shift,
            self.eps_split,
        )
    }
}

/// Reduce, assemble the measure, compare both sides of the Laplace identity
/// on the t grid, probe the closed-contour residual at five interior points
/// and scan the density sign.
pub fn verify(pair: &HermitianPair, config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let eps = match config.eps_split {
        Some(e) => e,
        None => default_eps_split(pair.b()).map_err(|e| e.in_stage("reduce"))?,
    };
    let red = reduce_pair(pair, eps).map_err(|e| e.in_stage("reduce"))?;
    let Assembly {
        measure, contour, ..
    } = assemble_measure(&red, config).map_err(|e| e.in_stage("assemble"))?;

    let t_grid = config.t_grid.values();
    let mut f_direct = Vec::with_capacity(t_grid.len());
    let mut f_meas = Vec::with_capacity(t_grid.len());
    let mut max_rel: f64 = 0.0;
    for &t in &t_grid {
        let fd = trace_exp_reduced(&red, t).map_err(|e| e.in_stage("trace"))?;
        let fm = laplace_of_measure(&measure, t, false);
        max_rel = max_rel.max((fd - fm).abs() / fd);
        f_direct.push(fd);
        f_meas.push(fm);
    }

    let b = red.b_eigs();
    let n = red.n();
    let probes: Vec<f64> = if n >= 2 {
        (1..=5)
            .map(|i| b[0] + (b[n - 1] - b[0]) * i as f64 / 6.0)
            .collect()
    } else {
        (-2..=2).map(|i| b[0] + 0.1 * i as f64).collect()
    };
    let mut residual_max: f64 = 0.0;
    for s in probes {
        residual_max =
            residual_max.max(all_branches_residual(&contour, &red, s).map_err(|e| e.in_stage("residual"))?);
    }

    let (min_density, max_density) = if measure.density.is_empty() {
        (0.0, 0.0)
    } else {
        (measure.min_density(), measure.max_density())
    };

    let tolerances = ReportTolerances {
        tau_laplace: config.tau_laplace,
        tau_residual: RESIDUAL_TOL,
        tau_positivity: POSITIVITY_TOL,
    };
    Ok(VerificationReport {
        positivity_pass: min_density >= -POSITIVITY_TOL * max_density.max(1.0),
        laplace_pass: max_rel < config.tau_laplace,
        residual_pass: residual_max < RESIDUAL_TOL,
        t_grid,
        f_direct,
        f_from_measure: f_meas,
        max_rel_error: max_rel,
        residual_max,
        min_density,
        max_density,
        tolerances,
        shift: measure.shift,
        radius: contour.radius(),
        n_nodes: contour.n_nodes(),
        eps_split: eps,
    })
}

/// Coefficients c_0..c_p of t -> Tr (A + tB)^p for positive semi-definite B,
/// by polynomial-entry matrix powers (exact convolution bookkeeping, no
/// interpolation). All coefficients are non-negative for such pairs.
pub fn trace_poly_coeffs(pair: &HermitianPair, p: usize) -> Result<Vec<f64>> {
    if p < 1 || p > 20 {
        return Err(Error::Parameter {
            name: "p",
            reason: format!("need 1 <= p <= 20, got {p}"),
        });
    }
    let min_eig = hermitian_eigenvalues(pair.b())?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -1e-12 {
        return Err(Error::NotPsd { min_eig });
    }
    let n = pair.n();
    // entries of (A + tB) as degree-1 polynomials in t
    let base: Vec<Vec<C64>> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            vec![pair.a()[(i, j)], pair.b()[(i, j)]]
        })
        .collect();
    let mut acc = base.clone();
    for _ in 1..p {
        let mut next = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut poly = vec![C64::new(0.0, 0.0); acc[0].len() + 1];
                for l in 0..n {
                    let left = &acc[i * n + l];
                    let right = &base[l * n + j];
                    for (dl, &cl) in left.iter().enumerate() {
                        for (dr, &cr) in right.iter().enumerate() {
                            poly[dl + dr] += cl * cr;
                        }
                    }
                }
                next[i * n + j] = poly;
            }
        }
        acc = next;
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); p + 1];
    for i in 0..n {
        for (d, &c) in acc[i * n + i].iter().enumerate() {
            coeffs[d] += c;
        }
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let mut out = Vec::with_capacity(p + 1);
    for c in coeffs {
        if c.im.abs() > 1e-10 * scale {
            return Err(Error::Accuracy {
                reason: format!("trace coefficient has imaginary part {:.3e}", c.im),
            });
        }
        out.push(c.re);
    }
    Ok(out)
}
