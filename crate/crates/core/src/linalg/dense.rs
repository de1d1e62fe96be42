use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(DenseMatrix { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `max_j Σ_i |a_ij|`.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for i in 0..self.n {
            for (c, a) in col.iter_mut().zip(self.row(i)) {
                *c += a.abs();
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }
}

const PANEL: usize = 64;
const TILE: usize = 256;

/// `PA = LU` with partial pivoting, stored in place (unit lower `L`).
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<f64>,
    /// Row `i` of the factors came from row `perm[i]` of the input.
    perm: Vec<usize>,
    norm1: f64,
}

impl LuFactorization {
    /// Blocked right-looking factorization. Consumes the matrix to avoid a copy.
    pub fn factor(a: DenseMatrix) -> Result<Self> {
        let n = a.n;
        let norm1 = a.norm1();
        let mut m = a.data;
        let mut perm: Vec<usize> = (0..n).collect();

        let mut kb = 0;
        while kb < n {
            let kend = (kb + PANEL).min(n);
            factor_panel(&mut m, n, kb, kend, &mut perm)?;
            if kend < n {
                solve_u12(&mut m, n, kb, kend);
                update_trailing(&mut m, n, kb, kend);
            }
            kb = kend;
        }
        Ok(LuFactorization {
            n,
            lu: m,
            perm,
            norm1,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, y)| u * y)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = b.to_vec();
        // Uᵀ z = b, column-oriented over rows of U
        for i in 0..n {
            let row = &self.lu[i * n..(i + 1) * n];
            z[i] /= row[i];
            let zi = z[i];
            for (zj, u) in z[i + 1..].iter_mut().zip(&row[i + 1..]) {
                *zj -= u * zi;
            }
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let row = &self.lu[i * n..i * n + i];
            let wi = z[i];
            for (zj, l) in z[..i].iter_mut().zip(row) {
                *zj -= l * wi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Hager's estimate of `‖A⁻¹‖₁`, a lower bound that is almost always sharp.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<f64> = y
                .iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, -1.0), |acc, (k, v)| {
                if v.abs() > acc.1 {
                    (k, v.abs())
                } else {
                    acc
                }
            });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            x[j] = 1.0;
            last_j = j;
        }
        est
    }

    /// `‖A‖₁ · est(‖A⁻¹‖₁)`.
    pub fn condition_estimate(&self) -> f64 {
        self.norm1 * self.inverse_norm1_estimate()
    }
}

fn factor_panel(m: &mut [f64], n: usize, kb: usize, kend: usize, perm: &mut [usize]) -> Result<()> {
    for j in kb..kend {
        let mut p = j;
        let mut best = m[j * n + j].abs();
        for i in (j + 1)..n {
            let v = m[i * n + j].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        if p != j {
            let (head, tail) = m.split_at_mut(p * n);
            head[j * n..(j + 1) * n].swap_with_slice(&mut tail[..n]);
            perm.swap(j, p);
        }
        let pivot = m[j * n + j];
        let (head, tail) = m.split_at_mut((j + 1) * n);
        let prow = &head[j * n + j + 1..j * n + kend];
        for row in tail.chunks_exact_mut(n) {
            let l = row[j] / pivot;
            row[j] = l;
            if l != 0.0 {
                for (r, u) in row[j + 1..kend].iter_mut().zip(prow) {
                    *r -= l * u;
                }
            }
        }
    }
    Ok(())
}

/// `U12 ← L11⁻¹ A12` for the block rows `kb..kend`.
fn solve_u12(m: &mut [f64], n: usize, kb: usize, kend: usize) {
    for i in (kb + 1)..kend {
        let (head, tail) = m.split_at_mut(i * n);
        let row_i = &mut tail[..n];
        for p in kb..i {
            let l = row_i[p];
            if l != 0.0 {
                let row_p = &head[p * n + kend..(p + 1) * n];
                for (r, u) in row_i[kend..].iter_mut().zip(row_p) {
                    *r -= l * u;
                }
            }
        }
    }
}

/// `A22 ← A22 − L21 U12`, tiled over columns so a `PANEL × TILE` block of
/// `U12` stays cache resident while all trailing rows stream past it.
fn update_trailing(m: &mut [f64], n: usize, kb: usize, kend: usize) {
    let (head, tail) = m.split_at_mut(kend * n);
    let u12 = &head[kb * n..kend * n];
    let mut ct = kend;
    while ct < n {
        let ce = (ct + TILE).min(n);
        for row in tail.chunks_exact_mut(n) {
            let (lpart, rpart) = row.split_at_mut(kend);
            let l = &lpart[kb..kend];
            let r = &mut rpart[ct - kend..ce - kend];
            let mut p = 0;
            while p + 4 <= l.len() {
                let (l0, l1, l2, l3) = (l[p], l[p + 1], l[p + 2], l[p + 3]);
                let u0 = &u12[p * n + ct..p * n + ce];
                let u1 = &u12[(p + 1) * n + ct..(p + 1) * n + ce];
                let u2 = &u12[(p + 2) * n + ct..(p + 2) * n + ce];
                let u3 = &u12[(p + 3) * n + ct..(p + 3) * n + ce];
                for ((((x, a), b), c), d) in r.iter_mut().zip(u0).zip(u1).zip(u2).zip(u3) {
                    *x -= l0 * a + l1 * b + l2 * c + l3 * d;
                }
                p += 4;
            }
            while p < l.len() {
                let lp = l[p];
                let u = &u12[p * n + ct..p * n + ce];
                for (x, a) in r.iter_mut().zip(u) {
                    *x -= lp * a;
                }
                p += 1;
            }
        }
        ct = ce;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        DenseMatrix::from_row_major(n, data).unwrap()
    }

    #[test]
    fn solves_across_block_boundaries() {
        for &n in &[1usize, 5, 63, 64, 65, 200, 300] {
            let a = random_matrix(n, n as u64);
            let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let b = a.mul_vec(&x_true);
            let lu = LuFactorization::factor(a.clone()).unwrap();
            let x = lu.solve(&b);
            let err = x
                .iter()
                .zip(&x_true)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-9, "n={n} err={err}");

            // transpose solve
            let mut bt = vec![0.0; n];
            for (i, xi) in x_true.iter().enumerate() {
                for (j, b) in bt.iter_mut().enumerate() {
                    *b += a.get(i, j) * xi;
                }
            }
            let xt = lu.solve_transpose(&bt);
            let err = xt
                .iter()
                .zip(&x_true)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-9, "transpose n={n} err={err}");
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DenseMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            LuFactorization::factor(a),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn condition_estimate_of_diagonal_is_exact() {
        let mut a = DenseMatrix::zeros(4);
        for (i, d) in [1.0, 10.0, 0.01, 3.0].into_iter().enumerate() {
            a.set(i, i, d);
        }
        let lu = LuFactorization::factor(a).unwrap();
        assert!((lu.condition_estimate() - 1000.0).abs() < 1e-9);
    }
}
