use capacitary_core::symfun::{newton_deficit, s2_tensor, sym_elementary};
use capacitary_core::SymmetricMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = SymmetricMatrix> {
    prop::collection::vec(-3.0f64..3.0, n * n).prop_map(move |e| {
        SymmetricMatrix::from_fn(n, |i, j| 0.5 * (e[i * n + j] + e[j * n + i])).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = SymmetricMatrix> {
    (2usize..=6).prop_flat_map(matrix)
}

fn eigenvalues(a: &SymmetricMatrix) -> Vec<f64> {
    let n = a.dim();
    let m = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
    m.symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// `e_k` of a list of numbers via the generating polynomial `Π(1 + λ t)`.
fn elementary_of(values: &[f64], k: usize) -> f64 {
    let mut coef = vec![0.0; values.len() + 1];
    coef[0] = 1.0;
    for (m, &l) in values.iter().enumerate() {
        for j in (1..=m + 1).rev() {
            coef[j] += l * coef[j - 1];
        }
    }
    coef[k]
}

proptest! {
    #[test]
    fn elementary_functions_match_eigenvalues(a in sized_matrix()) {
        let lambda = eigenvalues(&a);
        for k in 1..=a.dim() {
            let direct = sym_elementary(&a, k).unwrap();
            let spectral = elementary_of(&lambda, k);
            let scale = 1.0 + lambda.iter().map(|l| l.abs()).fold(0.0, f64::max).powi(k as i32);
            prop_assert!((direct - spectral).abs() <= 1e-10 * scale * 20.0, "k={} {} vs {}", k, direct, spectral);
        }
    }

    #[test]
    fn newton_deficit_is_nonnegative(a in sized_matrix()) {
        let slack = 1e-12 * (1.0 + a.frobenius_norm().powi(2));
        prop_assert!(newton_deficit(&a) >= -slack);
    }

    #[test]
    fn newton_deficit_is_spread_of_eigenvalues(a in sized_matrix()) {
        let lambda = eigenvalues(&a);
        let n = lambda.len() as f64;
        let mean = lambda.iter().sum::<f64>() / n;
        let spread: f64 = lambda.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / 2.0;
        prop_assert!((newton_deficit(&a) - spread).abs() <= 1e-10 * (1.0 + spread));
    }

    #[test]
    fn s2_tensor_is_the_gradient_of_s2(a in sized_matrix(), i in 0usize..6, j in 0usize..6) {
        let n = a.dim();
        let (i, j) = (i % n, j % n);
        let h = 1e-5;
        let bump = |t: f64| SymmetricMatrix::from_fn(n, |p, q| {
            let hit = (p == i && q == j) || (p == j && q == i);
            a.get(p, q) + if hit { t } else { 0.0 }
        }).unwrap();
        let d = (sym_elementary(&bump(h), 2).unwrap() - sym_elementary(&bump(-h), 2).unwrap()) / (2.0 * h);
        let expected = if i == j { s2_tensor(&a).get(i, i) } else { 2.0 * s2_tensor(&a).get(i, j) };
        prop_assert!((d - expected).abs() <= 1e-7 * (1.0 + expected.abs()));
    }

    #[test]
    fn scaling_is_homogeneous(a in sized_matrix(), t in 0.1f64..10.0) {
        for k in 1..=a.dim().min(3) {
            let lhs = sym_elementary(&a.scaled(t), k).unwrap();
            let rhs = t.powi(k as i32) * sym_elementary(&a, k).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs() + t.powi(k as i32) * a.frobenius_norm().powi(k as i32)));
        }
    }
}

#[test]
fn identity_multiples_have_zero_deficit() {
    for n in 2..=8 {
        assert!(newton_deficit(&SymmetricMatrix::scaled_identity(n, 3.7)).abs() < 1e-12);
    }
    let d = SymmetricMatrix::diagonal(&[1.0, 2.0, 3.0]);
    assert!((newton_deficit(&d) - 1.0).abs() < 1e-14);
}
