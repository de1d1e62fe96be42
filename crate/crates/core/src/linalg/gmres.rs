use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::jacobi::symmetric_eigenvalues;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Relative residual target `‖b − Ax‖ / ‖b‖`.
    pub tolerance: f64,
    pub restart: usize,
    pub max_iterations: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            tolerance: 1e-11,
            restart: 120,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Ratio of extreme singular values of the first-cycle Hessenberg matrix.
    /// This underestimates the true condition number of the operator.
    pub condition_estimate: f64,
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations, starting
/// from the zero vector. Deterministic: no randomness, fixed summation order.
pub fn gmres(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    opts: GmresOptions,
) -> Result<GmresOutcome> {
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
            condition_estimate: 1.0,
        });
    }
    let m = opts.restart.max(1);
    let mut total = 0;
    let mut cond = 1.0;
    let mut first_cycle = true;
    let mut ax = vec![0.0; n];
    loop {
        apply(&x, &mut ax);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        let mut rel = beta / bnorm;
        if rel <= opts.tolerance {
            return Ok(GmresOutcome {
                solution: x,
                iterations: total,
                relative_residual: rel,
                condition_estimate: cond,
            });
        }
        if total >= opts.max_iterations {
            return Err(Error::NotConverged {
                iterations: total,
                residual: rel,
            });
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // h is (m+1) × m, column-major by Arnoldi step
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        let mut w = vec![0.0; n];
        while k < m && total < opts.max_iterations {
            apply(&basis[k], &mut w);
            let mut col = vec![0.0; k + 2];
            for (j, vj) in basis.iter().enumerate() {
                let hij = dot(&w, vj);
                col[j] = hij;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hij * vi;
                }
            }
            let hk = norm(&w);
            col[k + 1] = hk;
            for (j, (&c, &s)) in cs.iter().zip(&sn).enumerate() {
                let (a, bb) = (col[j], col[j + 1]);
                col[j] = c * a + s * bb;
                col[j + 1] = -s * a + c * bb;
            }
            let (a, bb) = (col[k], col[k + 1]);
            let d = a.hypot(bb);
            let (c, s) = if d == 0.0 {
                (1.0, 0.0)
            } else {
                (a / d, bb / d)
            };
            col[k] = d;
            col[k + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g[k + 1] = -s * g[k];
            g[k] *= c;
            h.push(col);
            total += 1;
            k += 1;
            rel = g[k].abs() / bnorm;
            if hk == 0.0 || rel <= opts.tolerance {
                break;
            }
            basis.push(w.iter().map(|v| v / hk).collect());
        }
        // h[j] now holds the rotated (upper triangular) column j
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = ((i + 1)..k).map(|j| h[j][i] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
        if first_cycle {
            // Singular values of the triangular factor R equal those of the
            // Hessenberg matrix (Givens rotations are orthogonal).
            cond = triangular_condition(&h, k);
            first_cycle = false;
        }
    }
}

fn triangular_condition(cols: &[Vec<f64>], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // RᵀR
    let mut rtr = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let s: f64 = (0..=a.min(b)).map(|i| cols[a][i] * cols[b][i]).sum();
            rtr[a * k + b] = s;
        }
    }
    let ev = symmetric_eigenvalues(k, &rtr);
    let lo = ev[0].max(0.0);
    let hi = ev[k - 1];
    if lo == 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn solves_diagonally_dominant_system() {
        let n = 50;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    4.0
                } else {
                    1.0 / (1.0 + (i as f64 - j as f64).abs())
                };
                a.set(i, j, v);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let b = a.mul_vec(&x_true);
        let out = gmres(n, |x, y| a.mul_vec_into(x, y), &b, GmresOptions::default()).unwrap();
        let err = out
            .solution
            .iter()
            .zip(&x_true)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-9, "err={err}");
        assert!(out.condition_estimate >= 1.0);
    }

    #[test]
    fn restarts_reach_tolerance() {
        let n = 40;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 1.0 + i as f64);
            if i + 1 < n {
                a.set(i, i + 1, 0.5);
            }
        }
        let b = vec![1.0; n];
        let opts = GmresOptions {
            restart: 5,
            ..GmresOptions::default()
        };
        let out = gmres(n, |x, y| a.mul_vec_into(x, y), &b, opts).unwrap();
        assert!(out.relative_residual <= 1e-11);
        let r = a.mul_vec(&out.solution);
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn three_distinct_eigenvalues_take_three_steps() {
        let n = 30;
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, [1.0, 2.5, 7.0][i % 3]);
        }
        let b: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64).sin()).collect();
        let out = gmres(n, |x, y| a.mul_vec_into(x, y), &b, GmresOptions::default()).unwrap();
        assert_eq!(out.iterations, 3);
        let r = a.mul_vec(&out.solution);
        assert!(r.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-12));
    }
}
