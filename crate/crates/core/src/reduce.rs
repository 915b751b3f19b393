//! Canonicalization of a Hermitian pair: simultaneous conjugation taking B to
//! diagonal form with distinct, strictly positive, ascending eigenvalues. The
//! record (unitary, shift, perturbation) is enough to map any result back to
//! the original pair.

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};
use crate::pair::HermitianPair;

/// Canonical form of a pair: B diagonalized (eigenvalues `b_eigs`, ascending,
/// all > 0 after the shift), A conjugated by the same unitary.
#[derive(Debug, Clone)]
pub struct ReducedPair {
    n: usize,
    a_red: CMatrix,
    b_eigs: Vec<f64>,
    /// scalar added to B's (split) spectrum to make it strictly positive
    shift: f64,
    /// conjugating unitary U with U^* B U diagonal
    unitary: CMatrix,
    /// per-eigenvalue splitting deltas, applied in B's eigenbasis before the shift
    perturbation: Vec<f64>,
    eps_split: f64,
}

/// Default splitting scale: 1e-6 times the spectral diameter of B, or 1e-6
/// for scalar B.
pub fn default_eps_split(b: &CMatrix) -> Result<f64> {
    let eigs = crate::eigen::hermitian_eigenvalues(b)?;
    let diam = eigs.last().unwrap() - eigs.first().unwrap();
    Ok(if diam > 0.0 { 1e-6 * diam } else { 1e-6 })
}

/// Split sorted eigenvalues so all gaps are at least eps: each maximal run of
/// values with consecutive gaps < eps is replaced by an eps-stepped
/// progression of integer multiples around the run mean (biased upward for
/// even runs, so a doubly degenerate value {m, m} becomes {m, m + eps}).
/// Regrouping repeats until no gap is below eps.
fn split_degenerate(sorted: &[f64], eps: f64) -> Vec<f64> {
    let n = sorted.len();
    let mut vals = sorted.to_vec();
    let merge_tol = eps * (1.0 - 1e-12);
    for _pass in 0..=n {
        let mut changed = false;
        let mut out = Vec::with_capacity(n);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && vals[end] - vals[end - 1] < merge_tol {
                end += 1;
            }
            let g = end - start;
            if g == 1 {
                out.push(vals[start]);
            } else {
                changed = true;
                let mean = vals[start..end].iter().sum::<f64>() / g as f64;
                let base = (g - 1) / 2;
                for k in 0..g {
                    out.push(mean + (k as f64 - base as f64) * eps);
                }
            }
            start = end;
        }
        vals = out;
        if !changed {
            break;
        }
    }
    vals
}

impl ReducedPair {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn a_red(&self) -> &CMatrix {
        &self.a_red
    }
    pub fn b_eigs(&self) -> &[f64] {
        &self.b_eigs
    }
    pub fn shift(&self) -> f64 {
        self.shift
    }
    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }
    pub fn perturbation(&self) -> &[f64] {
        &self.perturbation
    }
    pub fn eps_split(&self) -> f64 {
        self.eps_split
    }

    /// Real diagonal entries of the conjugated A (imaginary parts checked).
    pub fn a_diag(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.n);
        for z in self.a_red.diag() {
            if z.im.abs() > 1e-12 * (1.0 + z.norm()) {
                return Err(Error::Accuracy {
                    reason: format!("diagonal entry has imaginary part {:.3e}", z.im),
                });
            }
            out.push(z.re);
        }
        Ok(out)
    }

    /// Smallest gap between consecutive b eigenvalues (1.0 for n = 1, where
    /// no gap exists; the value only ever scales heuristics).
    pub fn min_gap(&self) -> f64 {
        if self.n == 1 {
            return 1.0;
        }
        self.b_eigs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// The perturbed original-basis B this reduction is exact for:
    /// B + U diag(perturbation) U^*.
    pub fn b_perturbed(&self, original_b: &CMatrix) -> CMatrix {
        let delta = CMatrix::diag_real(&self.perturbation);
        let d = self.unitary.mul(&delta).mul(&self.unitary.adjoint());
        let n = original_b.n();
        let mut out = original_b.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += d[(i, j)];
            }
        }
        out
    }

    /// Pencil matrix a_red - zeta * diag(b_eigs).
    pub fn pencil(&self, zeta: C64) -> CMatrix {
        let mut m = self.a_red.clone();
        for (i, &b) in self.b_eigs.iter().enumerate() {
            m[(i, i)] -= zeta * b;
        }
        m
    }
}

/// Reduce a validated pair: diagonalize B by a unitary (deterministic column
/// phases), split any near-degenerate eigenvalues, then shift the spectrum by
/// sigma = eps_split + max(0, -min eigenvalue) so everything is positive.
pub fn reduce_pair(pair: &HermitianPair, eps_split: f64) -> Result<ReducedPair> {
    if !(eps_split > 0.0) {
        return Err(Error::Parameter {
            name: "eps_split",
            reason: format!("must be positive, got {eps_split}"),
        });
    }
    let n = pair.n();
    let eig = hermitian_eigen(pair.b())?;
    let mut unitary = eig.vectors;

    // column phase convention: first component above threshold made real positive
    for j in 0..n {
        let col_max = (0..n).map(|i| unitary[(i, j)].norm()).fold(0.0, f64::max);
        let lead = (0..n)
            .find(|&i| unitary[(i, j)].norm() > 1e-8 * col_max)
            .unwrap_or(0);
        let z = unitary[(lead, j)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                unitary[(i, j)] *= phase;
            }
        }
    }

    let split = split_degenerate(&eig.values, eps_split);
    let perturbation: Vec<f64> = split
        .iter()
        .zip(eig.values.iter())
        .map(|(s, v)| s - v)
        .collect();
    let min_split = split.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = eps_split + (-min_split).max(0.0);
    let b_eigs: Vec<f64> = split.iter().map(|v| v + shift).collect();

    let mut a_red = unitary.adjoint().mul(pair.a()).mul(&unitary);
    // symmetrize away conjugation roundoff
    let adj = a_red.adjoint();
    for i in 0..n {
        for j in 0..n {
            a_red[(i, j)] = (a_red[(i, j)] + adj[(i, j)]) * 0.5;
        }
    }

    Ok(ReducedPair {
        n,
        a_red,
        b_eigs,
        shift,
        unitary,
        perturbation,
        eps_split,
    })
}
