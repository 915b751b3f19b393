//! Input representation and validation of the Hermitian pair (A, B), plus the
//! JSON matrix file format consumed by the CLI.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, CMatrix};

/// Default hermiticity tolerance, relative to (1 + max entry magnitude).
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-12;

/// Checks `m` against its conjugate transpose. Returns (is_hermitian, max
/// deviation); the test is |m_ij - conj(m_ji)| <= tol * (1 + max |m_ij|).
pub fn validate_hermitian(m: &CMatrix, tol: f64) -> (bool, f64) {
    let dev = m.hermitian_deviation();
    (dev <= tol * (1.0 + m.max_abs()), dev)
}

/// A validated pair of n x n Hermitian matrices.
#[derive(Debug, Clone)]
pub struct HermitianPair {
    n: usize,
    a: CMatrix,
    b: CMatrix,
}

impl HermitianPair {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        Self::with_tolerance(a, b, DEFAULT_HERMITICITY_TOL)
    }

    pub fn with_tolerance(a: CMatrix, b: CMatrix, tol: f64) -> Result<Self> {
        if a.n() == 0 {
            return Err(Error::Parameter {
                name: "n",
                reason: "dimension must be at least 1".into(),
            });
        }
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                got: b.n(),
            });
        }
        for m in [&a, &b] {
            let (ok, dev) = validate_hermitian(m, tol);
            if !ok {
                return Err(Error::NotHermitian {
                    deviation: dev,
                    tol: tol * (1.0 + m.max_abs()),
                });
            }
        }
        Ok(HermitianPair { n: a.n(), a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }
}

/// Matrix file format: row-major real and (optional) imaginary parts.
#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.n;
        let check = |name: &'static str, rows: &Vec<Vec<f64>>| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parameter {
                    name,
                    reason: format!("expected {n}x{n} array"),
                });
            }
            Ok(())
        };
        check("re", &self.re)?;
        if let Some(im) = &self.im {
            check("im", im)?;
        }
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let re = self.re[i][j];
                let im = self.im.as_ref().map_or(0.0, |im| im[i][j]);
                m[(i, j)] = C64::new(re, im);
            }
        }
        Ok(m)
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.n();
        let re = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
            .collect();
        let any_im = (0..n).any(|i| (0..n).any(|j| m[(i, j)].im != 0.0));
        let im = any_im.then(|| {
            (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect()
        });
        MatrixFile { n, re, im }
    }
}

/// Parse a matrix from the JSON file format.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file.to_matrix()
}

/// Seeded random Hermitian pair used by the CLI and the test ensembles:
/// A has independent real/imaginary parts uniform in [-1, 1] (hermitized),
/// B = diag(1, ..., n).
pub fn random_pair(n: usize, seed: u64) -> Result<HermitianPair> {
    let a = random_hermitian(n, seed);
    let b = CMatrix::diag_real(&(1..=n).map(|k| k as f64).collect::<Vec<_>>());
    HermitianPair::new(a, b)
}

/// Seeded random Hermitian matrix with entries' real/imag parts in [-lim, lim].
pub fn random_hermitian_scaled(n: usize, seed: u64, lim: f64) -> CMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = C64::new(rng.gen_range(-lim..lim), rng.gen_range(-lim..lim));
        }
    }
    // hermitize: (M + M^*)/2
    let h = m.adjoint();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (m[(i, j)] + h[(i, j)]) * 0.5;
        }
    }
    out
}

pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    random_hermitian_scaled(n, seed, 1.0)
}

#[allow(unused)]
fn complex(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validate_real_symmetric() {
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let (ok, dev) = validate_hermitian(&m, 1e-12);
        assert!(ok);
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn validate_rejects_ii() {
        // [[0, i], [i, 0]]: conj(i) = -i != i, deviation |i - (-i)| = 2
        let m = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let (ok, dev) = validate_hermitian(&m, 1e-12);
        assert!(!ok);
        assert_eq!(dev, 2.0);
    }

    #[test]
    fn validate_exact_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let (ok, dev) = validate_hermitian(&m, 1e-12);
        assert!(ok);
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn json_roundtrip_and_default_im() {
        let text = r#"{"n": 2, "re": [[0.0, 1.0], [1.0, 0.0]]}"#;
        let m = matrix_from_json(text).unwrap();
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, 0.0));

        let text = r#"{"n": 2, "re": [[2.0, 1.0], [1.0, 3.0]], "im": [[0.0, 1.0], [-1.0, 0.0]]}"#;
        let m = matrix_from_json(text).unwrap();
        assert_eq!(m[(0, 1)], c(1.0, 1.0));
        let back = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        let m2 = matrix_from_json(&back).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn json_bad_shape_rejected() {
        let text = r#"{"n": 2, "re": [[0.0, 1.0]]}"#;
        assert!(matrix_from_json(text).is_err());
    }

    #[test]
    fn pair_validation() {
        let a = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let b = CMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(
            HermitianPair::new(a, b),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn random_pair_is_hermitian_and_deterministic() {
        let p1 = random_pair(4, 7).unwrap();
        let p2 = random_pair(4, 7).unwrap();
        assert_eq!(p1.a(), p2.a());
        assert!(p1.a().hermitian_deviation() < 1e-15);
    }
}
