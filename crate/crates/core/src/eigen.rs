//! Eigenvalue solvers: cyclic Jacobi for complex Hermitian matrices (values
//! and vectors) and a characteristic-polynomial / Aberth iteration for the
//! eigenvalues of general complex matrices. Both are written for the small
//! dense matrices this library works with; accuracy is favored over speed.



use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};

/// Eigendecomposition A = V diag(values) V^* of a Hermitian matrix, values
/// ascending, V unitary with eigenvectors in columns.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Cyclic Jacobi with complex plane rotations. Quadratically convergent;
/// the sweep cap is generous for the matrix sizes in play.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.n();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() * std::f64::consts::SQRT_2 <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let gamma = a[(p, q)];
                let g = gamma.norm();
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                if g <= 1e-17 * (alpha.abs() + beta.abs() + g) {
                    continue;
                }
                let phase = gamma / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = phase * (t * c);

                // A <- J^* A J with J = [[c, sigma], [-conj(sigma), c]] on (p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sigma.conj() * akq;
                    a[(k, q)] = sigma * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sigma * aqk;
                    a[(q, k)] = sigma.conj() * apk + c * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sigma.conj() * vkq;
                    v[(k, q)] = sigma * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
pub fn hermitian_spectral_norm(m: &CMatrix) -> Result<f64> {
    let vals = hermitian_eigenvalues(m)?;
    Ok(vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Characteristic polynomial coefficients of `m` after the shift/scale
/// m' = (m - mu I)/s: p(z) = z^n + c[n-1] z^{n-1} + ... + c[0], returned as
/// (mu, s, coeffs c[0..n]). Coefficients are recovered exactly (up to
/// rounding) by DFT interpolation of det(z I - m') at n+1 unit-circle nodes.
fn shifted_char_poly(m: &CMatrix) -> (C64, f64, Vec<C64>) {
    let n = m.n();
    let mu = m.trace() / n as f64;
    let shifted = m.add_scaled_identity(-mu);
    let s = shifted.max_abs().max(1e-300) * n as f64;
    let scaled = shifted.scale(C64::new(1.0 / s, 0.0));

    let samples = n + 1;
    let mut vals = Vec::with_capacity(samples);
    for k in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let z = C64::from_polar(1.0, theta);
        let mz = scaled.scale(C64::new(-1.0, 0.0)).add_scaled_identity(z);
        vals.push(mz.det());
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (k, val) in vals.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (k * j) as f64 / samples as f64;
            acc += val * C64::from_polar(1.0, theta);
        }
        coeffs[j] = acc / samples as f64;
    }
    (mu, s, coeffs)
}

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    // p monic of degree n with low-order coefficients `coeffs`; returns (p, p').
    let n = coeffs.len();
    let mut p = C64::new(1.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for j in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[j];
    }
    (p, dp)
}

/// All eigenvalues of a general complex matrix via Aberth-Ehrlich iteration
/// on the interpolated characteristic polynomial. `guess` (in original
/// coordinates) warms the start when continuing along a path.
pub fn general_eigenvalues(m: &CMatrix, guess: Option<&[C64]>) -> Result<Vec<C64>> {
    let n = m.n();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let (mu, s, coeffs) = shifted_char_poly(m);

    let mut z: Vec<C64> = match guess {
        Some(g) if g.len() == n => g.iter().map(|&v| (v - mu) / s).collect(),
        _ => {
            let bound = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            (0..n)
                .map(|i| {
                    let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64 + 0.7;
                    C64::from_polar(0.5 * bound, theta)
                })
                .collect()
        }
    };

    let mut converged = vec![false; n];
    let mut ok = false;
    for _iter in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = horner(&coeffs, z[i]);
            let w = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulse = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm_sqr() > 0.0 {
                        repulse += C64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - w * repulse;
            let step = if denom.norm() > 1e-30 { w / denom } else { w };
            z[i] -= step;
            let rel = step.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
            if rel < 1e-15 {
                converged[i] = true;
            }
        }
        if max_step < 1e-15 {
            ok = true;
            break;
        }
    }
    if !ok {
        // accept clusters: every residual must still be tiny for the multiset contract
        let tol = 1e-10;
        for &zi in &z {
            let (p, _) = horner(&coeffs, zi);
            let mag: f64 = (1.0 + zi.norm()).powi(n as i32);
            if p.norm() > tol * mag {
                return Err(Error::EigenSolver { node: None });
            }
        }
    }
    Ok(z.into_iter().map(|zi| mu + zi * s).collect())
}

/// Newton refinement of an approximate eigenvalue of `m`, iterating
/// lambda <- lambda - 1 / tr((lambda I - m)^{-1}). At most `max_iter` steps,
/// stopping once the step falls below `rel_tol` relative to |lambda|.
pub fn polish_eigenvalue(m: &CMatrix, lambda: C64, max_iter: usize, rel_tol: f64) -> C64 {
    let scale = m.max_abs().max(1e-300);
    let mut lam = lambda;
    for _ in 0..max_iter {
        let shifted = m.scale(C64::new(-1.0, 0.0)).add_scaled_identity(lam);
        let Some(lu) = shifted.lu() else { break };
        let trace_inv = lu.trace_inverse();
        if trace_inv.norm() < 1e-300 {
            break;
        }
        let step = C64::new(1.0, 0.0) / trace_inv;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        lam -= step;
        if step.norm() <= rel_tol * lam.norm().max(scale * 1e-6) {
            break;
        }
    }
    lam
}
