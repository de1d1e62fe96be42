//! Elementary symmetric functions `S_k` of symmetric matrices, the `S²`
//! tensor `∂S₂/∂a_ij`, and Newton's inequality `S₂(A) ≤ (n−1)/(2n) Tr(A)²`
//! with detection of its equality case `A = (Tr A / n) I`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::linalg::SymmetricMatrix;

/// Largest dimension for which `S_k` is summed over principal minors.
const MINOR_ENUMERATION_MAX_N: usize = 6;

/// `S_k(A)`: the sum of all `k × k` principal minors, i.e. the `k`-th
/// elementary symmetric function of the eigenvalues.
pub fn sym_elementary(a: &SymmetricMatrix, k: usize) -> Result<f64> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(domain(format!("S_k needs 1 <= k <= n = {n}, got k = {k}")));
    }
    if n <= MINOR_ENUMERATION_MAX_N {
        Ok(sum_principal_minors(a, k))
    } else {
        Ok(char_poly_coefficients(a, k)[k])
    }
}

fn sum_principal_minors(a: &SymmetricMatrix, k: usize) -> f64 {
    let n = a.dim();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut total = 0.0;
    loop {
        total += match k {
            1 => a.get(idx[0], idx[0]),
            2 => {
                let (i, j) = (idx[0], idx[1]);
                a.get(i, i) * a.get(j, j) - a.get(i, j) * a.get(j, i)
            }
            _ => a.principal_submatrix(&idx).determinant(),
        };
        // next k-subset in lexicographic order
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return total;
        }
        idx[pos - 1] += 1;
        for q in pos..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// `e_0..=e_k` from power sums `p_j = Tr(Aʲ)` by Newton's identities; `e_j` is
/// `(−1)ʲ` times the coefficient of `λ^{n−j}` in `det(λI − A)`.
fn char_poly_coefficients(a: &SymmetricMatrix, k: usize) -> Vec<f64> {
    let n = a.dim();
    let base = a.as_slice();
    let mut power = base.to_vec();
    let mut p = Vec::with_capacity(k + 1);
    p.push(n as f64);
    for j in 1..=k {
        p.push((0..n).map(|i| power[i * n + i]).sum());
        if j < k {
            let mut next = alloc::vec![0.0; n * n];
            for r in 0..n {
                for c in 0..n {
                    next[r * n + c] = (0..n).map(|m| power[r * n + m] * base[m * n + c]).sum();
                }
            }
            power = next;
        }
    }
    let mut e = alloc::vec![0.0; k + 1];
    e[0] = 1.0;
    for j in 1..=k {
        let mut s = 0.0;
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[j - i] * p[i];
        }
        e[j] = s / j as f64;
    }
    e
}

/// `S²_ij(A) = ∂S₂/∂a_ij`: `−a_ji` off the diagonal, `Tr(A) − a_ii` on it.
pub fn s2_tensor(a: &SymmetricMatrix) -> SymmetricMatrix {
    let tr = a.trace();
    let n = a.dim();
    let mut entries = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            entries[i * n + j] = if i == j {
                tr - a.get(i, i)
            } else {
                -a.get(j, i)
            };
        }
    }
    // exact: built from a symmetric matrix
    SymmetricMatrix::from_row_major(n, &entries).expect("finite entries from a finite matrix")
}

/// `wᵀ S²(A) w`, contracted through the tensor.
pub fn s2_quadratic_form(a: &SymmetricMatrix, w: &[f64]) -> Result<f64> {
    s2_tensor(a).quadratic_form(w)
}

/// `(n−1)/(2n) Tr(A)² − S₂(A)`, nonnegative up to rounding.
///
/// The kernel does not clamp: rounding may leave values slightly below zero
/// (of order `ε Tr(A)²`).
pub fn newton_deficit(a: &SymmetricMatrix) -> f64 {
    let n = a.dim() as f64;
    let tr = a.trace();
    let s2 = if a.dim() >= 2 {
        sum_principal_minors(a, 2)
    } else {
        0.0
    };
    (n - 1.0) / (2.0 * n) * tr * tr - s2
}

/// Whether `‖A − (Tr A/n) I‖_max ≤ tol · max(1, ‖A‖_max)`.
pub fn is_identity_multiple(a: &SymmetricMatrix, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let n = a.dim();
    let c = a.trace() / n as f64;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { c } else { 0.0 };
            dev = dev.max((a.get(i, j) - target).abs());
        }
    }
    Ok(dev <= tol * a.max_abs().max(1.0))
}
