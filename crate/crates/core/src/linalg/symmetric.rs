use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Dense `n × n` symmetric matrix.
///
/// Symmetry is exact: every constructor either builds a symmetric matrix by
/// definition or averages `a_ij` and `a_ji`. Entries are always finite.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds the matrix from a generator, symmetrizing `(f(i,j) + f(j,i)) / 2`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = f(i, i);
            for j in (i + 1)..n {
                let v = 0.5 * (f(i, j) + f(j, i));
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Builds from row-major entries, symmetrizing the off-diagonal pairs.
    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Self::from_fn(n, |i, j| entries[i * n + j])
    }

    /// `w ⊗ w`.
    pub fn outer(w: &[f64]) -> Self {
        let n = w.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = w[i] * w[j];
            }
        }
        m
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(domain("symmetric matrix has non-finite entries"))
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major view of all `n²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max |a_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check_len(w)?;
        Ok((0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(w).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// `wᵀ A w`.
    pub fn quadratic_form(&self, w: &[f64]) -> Result<f64> {
        let aw = self.mul_vec(w)?;
        Ok(aw.iter().zip(w).map(|(a, b)| a * b).sum())
    }

    /// Frobenius inner product `Σ_ij a_ij b_ij`.
    pub fn contract(&self, other: &SymmetricMatrix) -> Result<f64> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, t: f64) -> SymmetricMatrix {
        SymmetricMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * t).collect(),
        }
    }

    /// `self + t · other`.
    pub fn add_scaled(&self, t: f64, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(SymmetricMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    /// The principal submatrix on the given (sorted, distinct) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> SymmetricMatrix {
        let k = idx.len();
        let mut m = Self::zeros(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.data[a * k + b] = self.get(i, j);
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv == 0.0 {
                return 0.0;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let piv = a[k * n + k];
            det *= piv;
            for i in (k + 1)..n {
                let l = a[i * n + k] / piv;
                if l != 0.0 {
                    for c in (k + 1)..n {
                        a[i * n + c] -= l * a[k * n + c];
                    }
                }
            }
        }
        det
    }

    fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                got: w.len(),
            })
        }
    }
}

impl fmt::Debug for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for i in 0..self.n {
            l.entry(&&self.data[i * self.n..(i + 1) * self.n]);
        }
        l.finish()
    }
}
