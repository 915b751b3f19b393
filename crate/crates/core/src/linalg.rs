//! Dense complex matrices at desk scale: storage, products, LU determinant
//! and solves. Everything here is plain row-major `Vec<Complex64>`; the
//! matrices in this problem are tiny (n of order 10), so no blocking or
//! external backends.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Ok(CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = CMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn add_scaled_identity(&self, c: C64) -> CMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] += c;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max deviation from the conjugate transpose, max_{ij} |m_ij - conj(m_ji)|.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Solve self * x = b in place of b. Returns Err on exactly singular pivots.
    pub fn solve(&self, b: &mut [C64]) -> Result<()> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(Error::EigenSolver { node: None });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                b.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                let bv = b[col];
                b[r] -= f * bv;
            }
        }
        for col in (0..n).rev() {
            let mut acc = b[col];
            for j in col + 1..n {
                acc -= a[col * n + j] * b[j];
            }
            b[col] = acc / a[col * n + col];
        }
        Ok(())
    }
}

/// LU factorization with partial pivoting, for repeated solves against one
/// matrix.
pub struct Lu {
    n: usize,
    a: Vec<C64>,
    perm: Vec<usize>,
    det_sign: f64,
}

impl CMatrix {
    /// Factorize; returns None on an exactly singular pivot.
    pub fn lu(&self) -> Option<Lu> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det_sign = 1.0;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
                det_sign = -det_sign;
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                a[r * n + col] = f;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col + 1..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        Some(Lu {
            n,
            a,
            perm,
            det_sign,
        })
    }
}

impl Lu {
    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.det_sign, 0.0);
        for i in 0..self.n {
            d *= self.a[i * self.n + i];
        }
        d
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.a[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.a[i * n + j] * x[j];
            }
            x[i] = acc / self.a[i * n + i];
        }
        x
    }

    /// Trace of the inverse of the factored matrix.
    pub fn trace_inverse(&self) -> C64 {
        let n = self.n;
        let mut tr = C64::new(0.0, 0.0);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for v in e.iter_mut() {
                *v = C64::new(0.0, 0.0);
            }
            e[i] = C64::new(1.0, 0.0);
            let x = self.solve(&e);
            tr += x[i];
        }
        tr
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}
