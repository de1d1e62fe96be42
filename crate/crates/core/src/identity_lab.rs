//! Finite-difference verification of the differential identities satisfied
//! by `S₂` and `S²ᵢⱼ` of a Hessian, the level-set curvature identities, the
//! γ-coefficient algebra and the far-sphere boundary fluxes.
//!
//! Divergences of composite vector fields are taken by central differences
//! of the field, itself built from the closed-form value, gradient and
//! Hessian of a [`TestFunction`]. Every other quantity is closed form.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::geometry::make_sphere_mesh;
use crate::jet::Jet;
use crate::linalg::SymmetricMatrix;
use crate::oracles::{unit_sphere_area, RadialSolution};
use crate::symfun::{s2_tensor, sym_elementary};

type Evaluator = Box<dyn Fn(&[f64]) -> Jet + Send + Sync>;

/// A closed-form scalar field on `Rⁿ` with its gradient and Hessian.
pub struct TestFunction {
    name: String,
    n: usize,
    positive: bool,
    eval: Evaluator,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("positive", &self.positive)
            .finish()
    }
}

impl TestFunction {
    /// Registers a field after checking its gradient and Hessian against
    /// central differences of the value and gradient at seeded points: the
    /// error must shrink by a factor of at least 3 when the step halves, or
    /// already sit at rounding level.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        positive: bool,
        eval: impl Fn(&[f64]) -> Jet + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = TestFunction {
            name: name.into(),
            n,
            positive,
            eval: Box::new(eval),
        };
        if n == 0 {
            return Err(domain("test function needs n >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..3 {
            let x = random_point(&mut rng, n, 0.7);
            let jet = f.jet(&x)?;
            let scale = jet
                .gradient
                .iter()
                .chain(jet.hessian.as_slice())
                .fold(jet.value.abs(), |m, v| m.max(v.abs()))
                .max(1.0);
            let (e0, e1) = (
                derivative_error(&f, &x, 1e-3)?,
                derivative_error(&f, &x, 5e-4)?,
            );
            if !(e0 <= 1e-9 * scale || e1 <= e0 / 3.0) {
                return Err(domain(format!(
                    "test function '{}' fails the derivative self-check at {x:?}: errors {e0:e}, {e1:e}",
                    f.name
                )));
            }
        }
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Whether the function is positive on the region where it is sampled.
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn jet(&self, x: &[f64]) -> Result<Jet> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((self.eval)(x))
    }
}

fn derivative_error(f: &TestFunction, x: &[f64], h: f64) -> Result<f64> {
    let n = f.n;
    let jet = f.jet(x)?;
    let mut err: f64 = 0.0;
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let p = f.jet(&xp)?;
        xp[j] = x[j] - h;
        let m = f.jet(&xp)?;
        xp[j] = x[j];
        err = err.max(((p.value - m.value) / (2.0 * h) - jet.gradient[j]).abs());
        for i in 0..n {
            let d = (p.gradient[i] - m.gradient[i]) / (2.0 * h);
            err = err.max((d - jet.hessian.get(i, j)).abs());
        }
    }
    Ok(err)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r2: f64 = p.iter().map(|v| v * v).sum();
        if r2 <= 1.0 && r2 > 1e-4 {
            return p.into_iter().map(|v| v * radius).collect();
        }
    }
}

/// Built-in closed-form fields in dimension `n`.
pub mod functions {
    use super::*;

    fn jet(value: f64, gradient: Vec<f64>, hessian: SymmetricMatrix) -> Jet {
        Jet {
            value,
            gradient,
            hessian,
        }
    }

    fn sym(n: usize, f: impl Fn(usize, usize) -> f64) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(n, f).expect("finite closed-form Hessian")
    }

    /// `1 + |x|²`.
    pub fn shifted_square(n: usize) -> Result<TestFunction> {
        TestFunction::new("1+|x|^2", n, true, move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            jet(
                1.0 + r2,
                x.iter().map(|v| 2.0 * v).collect(),
                SymmetricMatrix::scaled_identity(n, 2.0),
            )
        })
    }

    /// `1 + Σ k x_k²` with `k = 1..n`.
    pub fn anisotropic_quadratic(n: usize) -> Result<TestFunction> {
        TestFunction::new("1+sum k x_k^2", n, true, move |x| {
            let c = |k: usize| (k + 1) as f64;
            let value = 1.0 + x.iter().enumerate().map(|(k, v)| c(k) * v * v).sum::<f64>();
            let g = x.iter().enumerate().map(|(k, v)| 2.0 * c(k) * v).collect();
            let d: Vec<f64> = (0..n).map(|k| 2.0 * c(k)).collect();
            jet(value, g, SymmetricMatrix::diagonal(&d))
        })
    }

    /// `3 + Σ_k (x_k³/3 − x_k x_{k+1}/2 + x_k/4)`, indices cyclic.
    /// Positive on `|x| ≤ 1`.
    pub fn shifted_cubic(n: usize) -> Result<TestFunction> {
        TestFunction::new("cubic", n, true, move |x| {
            let nx = |k: usize| (k + 1) % n;
            let pv = |k: usize| (k + n - 1) % n;
            let mut value = 3.0;
            for k in 0..n {
                value += x[k].powi(3) / 3.0 - x[k] * x[nx(k)] / 2.0 + x[k] / 4.0;
            }
            let g = (0..n)
                .map(|k| x[k] * x[k] - (x[nx(k)] + x[pv(k)]) / 2.0 + 0.25)
                .collect();
            let h = sym(n, |i, j| {
                let mut v = if i == j { 2.0 * x[i] } else { 0.0 };
                if n > 1 && i != j && (j == nx(i) || i == nx(j)) {
                    v -= if n == 2 { 1.0 } else { 0.5 };
                }
                v
            });
            jet(value, g, h)
        })
    }

    /// `exp(a·x)` with `a_k = (−1)^k (0.3 + 0.1 k)`.
    pub fn exponential(n: usize) -> Result<TestFunction> {
        let a: Vec<f64> = (0..n)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * (0.3 + 0.1 * k as f64))
            .collect();
        TestFunction::new("exp(a.x)", n, true, move |x| {
            let e = a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>().exp();
            jet(
                e,
                a.iter().map(|v| v * e).collect(),
                SymmetricMatrix::outer(&a).scaled(e),
            )
        })
    }

    /// `2 + sin x₁ cos x₂ + x_n²` (for `n ≥ 2`).
    pub fn trigonometric(n: usize) -> Result<TestFunction> {
        if n < 2 {
            return Err(domain("trigonometric test function needs n >= 2"));
        }
        TestFunction::new("2+sin(x1)cos(x2)+xn^2", n, true, move |x| {
            let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
            let last = n - 1;
            let mut g = vec![0.0; n];
            g[0] = c1 * c2;
            g[1] = -s1 * s2;
            g[last] += 2.0 * x[last];
            let h = sym(n, |i, j| {
                let mut v = match (i, j) {
                    (0, 0) => -s1 * c2,
                    (1, 1) => -s1 * c2,
                    (0, 1) | (1, 0) => -c1 * s2,
                    _ => 0.0,
                };
                if i == last && j == last {
                    v += 2.0;
                }
                v
            });
            jet(2.0 + s1 * c2 + x[last] * x[last], g, h)
        })
    }

    /// `1 + |x|⁴`.
    pub fn shifted_quartic(n: usize) -> Result<TestFunction> {
        TestFunction::new("1+|x|^4", n, true, move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            jet(
                1.0 + r2 * r2,
                x.iter().map(|v| 4.0 * r2 * v).collect(),
                sym(n, |i, j| {
                    8.0 * x[i] * x[j] + if i == j { 4.0 * r2 } else { 0.0 }
                }),
            )
        })
    }

    /// `1 / (2 + |x|²)`.
    pub fn rational(n: usize) -> Result<TestFunction> {
        TestFunction::new("1/(2+|x|^2)", n, true, move |x| {
            let q = 2.0 + x.iter().map(|v| v * v).sum::<f64>();
            jet(
                1.0 / q,
                x.iter().map(|v| -2.0 * v / (q * q)).collect(),
                sym(n, |i, j| {
                    8.0 * x[i] * x[j] / (q * q * q) - if i == j { 2.0 / (q * q) } else { 0.0 }
                }),
            )
        })
    }

    /// `|x|⁴`.
    pub fn quartic(n: usize) -> Result<TestFunction> {
        TestFunction::new("|x|^4", n, false, move |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            jet(
                r2 * r2,
                x.iter().map(|v| 4.0 * r2 * v).collect(),
                sym(n, |i, j| {
                    8.0 * x[i] * x[j] + if i == j { 4.0 * r2 } else { 0.0 }
                }),
            )
        })
    }

    /// `|x|²`.
    pub fn square(n: usize) -> Result<TestFunction> {
        TestFunction::new("|x|^2", n, false, move |x| {
            jet(
                x.iter().map(|v| v * v).sum(),
                x.iter().map(|v| 2.0 * v).collect(),
                SymmetricMatrix::scaled_identity(n, 2.0),
            )
        })
    }

    /// `exp(x₁) sin(x₂)` (for `n ≥ 2`).
    pub fn exp_sin(n: usize) -> Result<TestFunction> {
        if n < 2 {
            return Err(domain("exp(x1)sin(x2) needs n >= 2"));
        }
        TestFunction::new("exp(x1)sin(x2)", n, false, move |x| {
            let (e, s, c) = (x[0].exp(), x[1].sin(), x[1].cos());
            let mut g = vec![0.0; n];
            g[0] = e * s;
            g[1] = e * c;
            let h = sym(n, |i, j| match (i, j) {
                (0, 0) => e * s,
                (1, 1) => -e * s,
                (0, 1) | (1, 0) => e * c,
                _ => 0.0,
            });
            jet(e * s, g, h)
        })
    }

    /// `2 + Σ_k x_k / (k + 1)`.
    pub fn linear(n: usize) -> Result<TestFunction> {
        TestFunction::new("linear", n, true, move |x| {
            let a = |k: usize| 1.0 / (k + 1) as f64;
            jet(
                2.0 + x.iter().enumerate().map(|(k, v)| a(k) * v).sum::<f64>(),
                (0..n).map(a).collect(),
                SymmetricMatrix::zeros(n),
            )
        })
    }

    /// `1.5`.
    pub fn constant(n: usize) -> Result<TestFunction> {
        TestFunction::new("constant", n, true, move |_| {
            jet(1.5, vec![0.0; n], SymmetricMatrix::zeros(n))
        })
    }

    /// `1 + x₁² + 2x₂² + 3x₃²` in three dimensions.
    pub fn ellipsoidal() -> Result<TestFunction> {
        TestFunction::new("1+x1^2+2x2^2+3x3^2", 3, true, |x| {
            jet(
                1.0 + x[0] * x[0] + 2.0 * x[1] * x[1] + 3.0 * x[2] * x[2],
                vec![2.0 * x[0], 4.0 * x[1], 6.0 * x[2]],
                SymmetricMatrix::diagonal(&[2.0, 4.0, 6.0]),
            )
        })
    }

    /// Positive fields used with fractional powers.
    pub fn positive_registry(n: usize) -> Result<Vec<TestFunction>> {
        Ok(vec![
            shifted_square(n)?,
            anisotropic_quadratic(n)?,
            shifted_cubic(n)?,
            exponential(n)?,
            trigonometric(n)?,
            shifted_quartic(n)?,
            rational(n)?,
        ])
    }
}

/// `v^p` for real `p`, defined for `v > 0`, and for any nonzero `v` (or
/// `p ≥ 0`) when `p` is an integer.
fn power(v: f64, p: f64) -> Result<f64> {
    if p == p.round() && p.abs() < 64.0 {
        if p < 0.0 && v == 0.0 {
            return Err(domain(format!("0 raised to the negative power {p}")));
        }
        return Ok(v.powi(p as i32));
    }
    if !(v > 0.0) {
        return Err(domain(format!(
            "the fractional power {p} needs a positive base, got {v}"
        )));
    }
    Ok(v.powf(p))
}

/// `c · v^p`, zero when `c = 0` whatever `v`.
fn term(c: f64, v: f64, p: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(c * power(v, p)?)
}

/// Central-difference divergence of a vector field.
fn fd_divergence(
    n: usize,
    field: &dyn Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    h: f64,
) -> Result<(f64, f64)> {
    let mut div = 0.0;
    let mut scale: f64 = 0.0;
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let p = field(&xp)?;
        xp[j] = x[j] - h;
        let m = field(&xp)?;
        xp[j] = x[j];
        div += (p[j] - m[j]) / (2.0 * h);
        scale = scale.max(p[j].abs()).max(m[j].abs());
    }
    Ok((div, scale))
}

fn row_contract(s: &SymmetricMatrix, w: &[f64]) -> Vec<f64> {
    s.mul_vec(w).expect("matching dimensions")
}

/// Residual of one identity at one step, with the size of the terms for
/// judging rounding level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

/// `Σⱼ ∂ⱼ S²ᵢⱼ(D²f)` for each row `i`.
pub fn check_div_free_s2(f: &TestFunction, x: &[f64], h: f64) -> Result<Vec<f64>> {
    Ok(div_free_residual(f, x, h, false)?.0)
}

fn div_free_residual(f: &TestFunction, x: &[f64], h: f64, faulty: bool) -> Result<(Vec<f64>, f64)> {
    check_step(h)?;
    let n = f.dim();
    let mut out = Vec::with_capacity(n);
    let mut scale: f64 = 0.0;
    for i in 0..n {
        let row = |y: &[f64]| -> Result<Vec<f64>> {
            let d2 = f.jet(y)?.hessian;
            let s = if faulty { d2 } else { s2_tensor(&d2) };
            Ok((0..n).map(|j| s.get(i, j)).collect())
        };
        let (d, s) = fd_divergence(n, &row, x, h)?;
        out.push(d);
        scale = scale.max(s);
    }
    Ok((out, scale))
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("step must be positive, got {h}")));
    }
    Ok(())
}

fn check_power_domain(f: &TestFunction, gamma: f64, x: &[f64]) -> Result<Jet> {
    let jet = f.jet(x)?;
    if gamma != gamma.round() && !(jet.value > 0.0) {
        return Err(domain(format!(
            "'{}' is not positive at {x:?} (value {}), fractional gamma {gamma} undefined",
            f.name(),
            jet.value
        )));
    }
    Ok(jet)
}

/// Size of the products entering the identities before any cancellation.
fn factor_scale(jet: &Jet, gamma: f64) -> Result<f64> {
    let v = jet.value;
    let g = jet.gradient_norm_sq().sqrt();
    let d2 = jet.hessian.frobenius_norm();
    let a = power(v, gamma)?.abs() * d2 * g;
    let b = if g > 0.0 {
        power(v, gamma - 1.0)?.abs() * g * g * (d2 + g * g / v.abs().max(f64::MIN_POSITIVE))
    } else {
        0.0
    };
    Ok(a.max(b))
}

/// `|div(v^γ S²ᵢⱼ vᵢ) − 2v^γ S₂(D²v) − γ v^{γ−1} S²ᵢⱼ vᵢ vⱼ|`.
pub fn check_identity_a(f: &TestFunction, gamma: f64, x: &[f64], h: f64) -> Result<f64> {
    Ok(identity_a(f, gamma, x, h, false)?.value)
}

fn identity_a(f: &TestFunction, gamma: f64, x: &[f64], h: f64, faulty: bool) -> Result<Residual> {
    check_step(h)?;
    let jet = check_power_domain(f, gamma, x)?;
    let n = f.dim();
    let field = |y: &[f64]| -> Result<Vec<f64>> {
        let j = f.jet(y)?;
        let w = power(j.value, gamma)?;
        Ok(row_contract(&s2_tensor(&j.hessian), &j.gradient)
            .into_iter()
            .map(|c| w * c)
            .collect())
    };
    let (lhs, s0) = fd_divergence(n, &field, x, h)?;
    let v = jet.value;
    let s2 = sym_elementary(&jet.hessian, 2)?;
    let quad = s2_tensor(&jet.hessian).quadratic_form(&jet.gradient)?;
    let t1 = 2.0 * power(v, gamma)? * s2;
    let coef = if faulty { gamma + 1.0 } else { gamma };
    let t2 = term(coef, v, gamma - 1.0)? * quad;
    Ok(Residual {
        value: (lhs - t1 - t2).abs(),
        scale: s0
            .max(t1.abs())
            .max(t2.abs())
            .max(factor_scale(&jet, gamma)?),
    })
}

/// `|v^{γ−1} S²ᵢⱼvᵢvⱼ − (3/2)v^{γ−1}|Dv|²Δv − ((γ−1)/2)v^{γ−2}|Dv|⁴ + (1/2)div(v^{γ−1}|Dv|²Dv)|`.
pub fn check_identity_b(f: &TestFunction, gamma: f64, x: &[f64], h: f64) -> Result<f64> {
    Ok(identity_b(f, gamma, x, h, false)?.value)
}

fn identity_b(f: &TestFunction, gamma: f64, x: &[f64], h: f64, faulty: bool) -> Result<Residual> {
    check_step(h)?;
    let jet = check_power_domain(f, gamma, x)?;
    let n = f.dim();
    let field = |y: &[f64]| -> Result<Vec<f64>> {
        let j = f.jet(y)?;
        let w = power(j.value, gamma - 1.0)? * j.gradient_norm_sq();
        Ok(j.gradient.iter().map(|g| w * g).collect())
    };
    let (div, s0) = fd_divergence(n, &field, x, h)?;
    let v = jet.value;
    let g2 = jet.gradient_norm_sq();
    let lap = jet.hessian.trace();
    let quad = s2_tensor(&jet.hessian).quadratic_form(&jet.gradient)?;
    let lhs = power(v, gamma - 1.0)? * quad;
    let t1 = 1.5 * power(v, gamma - 1.0)? * g2 * lap;
    let coef = if faulty {
        (gamma + 1.0) / 2.0
    } else {
        (gamma - 1.0) / 2.0
    };
    let t2 = term(coef, v, gamma - 2.0)? * g2 * g2;
    let t3 = -0.5 * div;
    Ok(Residual {
        value: (lhs - t1 - t2 - t3).abs(),
        scale: s0
            .max(lhs.abs())
            .max(t1.abs())
            .max(t2.abs())
            .max(factor_scale(&jet, gamma)?),
    })
}

/// `|2v^γS₂(D²v) − div((γ/2)v^{γ−1}|Dv|²Dv + v^γ S²ᵢⱼvᵢ)
///  + (3/2)γ v^{γ−1}|Dv|²Δv + (γ(γ−1)/2) v^{γ−2}|Dv|⁴|`.
pub fn check_identity_c(f: &TestFunction, gamma: f64, x: &[f64], h: f64) -> Result<f64> {
    Ok(identity_c(f, gamma, x, h, false)?.value)
}

fn identity_c(f: &TestFunction, gamma: f64, x: &[f64], h: f64, faulty: bool) -> Result<Residual> {
    check_step(h)?;
    let jet = check_power_domain(f, gamma, x)?;
    let n = f.dim();
    let field = |y: &[f64]| -> Result<Vec<f64>> {
        let j = f.jet(y)?;
        let a = term(gamma / 2.0, j.value, gamma - 1.0)? * j.gradient_norm_sq();
        let b = power(j.value, gamma)?;
        let s = row_contract(&s2_tensor(&j.hessian), &j.gradient);
        Ok(j.gradient
            .iter()
            .zip(s)
            .map(|(g, s)| a * g + b * s)
            .collect())
    };
    let (div, s0) = fd_divergence(n, &field, x, h)?;
    let v = jet.value;
    let g2 = jet.gradient_norm_sq();
    let lhs = 2.0 * power(v, gamma)? * sym_elementary(&jet.hessian, 2)?;
    let t1 = term(1.5 * gamma, v, gamma - 1.0)? * g2 * jet.hessian.trace();
    let sign = if faulty { -1.0 } else { 1.0 };
    let t2 = term(sign * gamma * (gamma - 1.0) / 2.0, v, gamma - 2.0)? * g2 * g2;
    Ok(Residual {
        value: (lhs - (div - t1 - t2)).abs(),
        scale: s0
            .max(lhs.abs())
            .max(t1.abs())
            .max(t2.abs())
            .max(factor_scale(&jet, gamma)?),
    })
}

/// Residuals of the level-set identities at `x`, relative to the size of
/// their terms. The level-set mean curvature is computed as the trace of the
/// Hessian projected onto the tangent space of the level set:
/// `H = Tr(P D²v P) / ((n−1)|Dv|)` with `P = I − ννᵀ`, `ν = Dv/|Dv|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetResiduals {
    pub mean_curvature: f64,
    /// `|Dv|²Δv = (n−1)H|Dv|³ + vᵢvᵢⱼvⱼ`.
    pub laplacian_form: f64,
    /// `S²ᵢⱼvᵢvⱼ = (n−1)H|Dv|³`.
    pub s2_form: f64,
}

pub fn check_level_set_identity(f: &TestFunction, x: &[f64]) -> Result<LevelSetResiduals> {
    let n = f.dim();
    if n < 2 {
        return Err(domain("level sets need n >= 2"));
    }
    let jet = f.jet(x)?;
    let g = jet.gradient_norm_sq().sqrt();
    if !(g > 0.0) {
        return Err(domain(format!("critical point at {x:?}: Df = 0")));
    }
    let nu: Vec<f64> = jet.gradient.iter().map(|v| v / g).collect();
    let d2 = &jet.hessian;
    let mut projected_trace = 0.0;
    for i in 0..n {
        for k in 0..n {
            let pik = if i == k { 1.0 } else { 0.0 } - nu[i] * nu[k];
            for l in 0..n {
                let pli = if l == i { 1.0 } else { 0.0 } - nu[l] * nu[i];
                projected_trace += pik * d2.get(k, l) * pli;
            }
        }
    }
    let nf = n as f64;
    let h = projected_trace / ((nf - 1.0) * g);
    let g2 = g * g;
    let curv = (nf - 1.0) * h * g2 * g;
    let hess_quad = d2.quadratic_form(&jet.gradient)?;
    let lhs1 = g2 * d2.trace();
    let natural = g2 * d2.frobenius_norm() * (nf - 1.0);
    let scale1 = lhs1
        .abs()
        .max(curv.abs())
        .max(hess_quad.abs())
        .max(natural)
        .max(f64::MIN_POSITIVE);
    let s2q = s2_tensor(d2).quadratic_form(&jet.gradient)?;
    let scale2 = s2q
        .abs()
        .max(curv.abs())
        .max(natural)
        .max(f64::MIN_POSITIVE);
    Ok(LevelSetResiduals {
        mean_curvature: h,
        laplacian_form: (lhs1 - curv - hess_quad).abs() / scale1,
        s2_form: (s2q - curv).abs() / scale2,
    })
}

/// `n(n−1)/4 − γ(1−γ)/2 + 3nγ/4`.
pub fn gamma_coefficient(n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / 4.0 - gamma * (1.0 - gamma) / 2.0 + 1.5 * gamma * nf / 2.0
}

/// [`gamma_coefficient`] in exact rational arithmetic.
pub fn gamma_coefficient_exact(n: usize, gamma: Ratio<i64>) -> Ratio<i64> {
    let nr = Ratio::from_integer(n as i64);
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    let four = Ratio::from_integer(4);
    nr * (nr - one) / four - gamma * (one - gamma) / two + Ratio::new(3, 2) * gamma * nr / two
}

/// The two roots `(γ₁, γ₂)` of [`gamma_coefficient`], exactly: with the
/// coefficient scaled by 4 the quadratic is `2γ² + (3n−2)γ + n(n−1)`, whose
/// discriminant is the perfect square `(n−2)²`.
pub fn gamma_roots(n: usize) -> Result<(Ratio<i64>, Ratio<i64>)> {
    if n < 3 {
        return Err(domain(format!("dimension must be at least 3, got {n}")));
    }
    let ni = n as i64;
    let (a, b, c) = (2i64, 3 * ni - 2, ni * (ni - 1));
    let disc = b * b - 4 * a * c;
    let root = integer_sqrt(disc).ok_or_else(|| domain("discriminant is not a perfect square"))?;
    let g1 = Ratio::new(-b - root, 2 * a);
    let g2 = Ratio::new(-b + root, 2 * a);
    Ok((g1, g2))
}

fn integer_sqrt(d: i64) -> Option<i64> {
    if d < 0 {
        return None;
    }
    let mut r = (d as f64).sqrt() as i64;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    (r * r == d).then_some(r)
}

/// Nodes and weights for integrating over the unit sphere `S^{n−1}`.
///
/// For `n = 3`, centroids of a level-`level` icosphere projected outward with
/// flat-panel area weights rescaled to the exact total `ω₃ = 4π`. Otherwise
/// the `2n` axis points and `2ⁿ` cube diagonals with equal weights summing
/// to `ω_n`, which integrates radial integrands exactly.
pub fn sphere_nodes(n: usize, level: u32) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let omega = unit_sphere_area(n)?;
    if n == 3 {
        let mesh = make_sphere_mesh(1.0, level)?;
        let total = mesh.total_area();
        let nodes = mesh
            .centroids()
            .iter()
            .map(|c| c.normalized().to_array().to_vec())
            .collect();
        let weights = mesh.areas().iter().map(|a| a / total * omega).collect();
        return Ok((nodes, weights));
    }
    let mut nodes = Vec::new();
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; n];
            p[k] = s;
            nodes.push(p);
        }
    }
    let d = 1.0 / (n as f64).sqrt();
    for mask in 0..(1usize << n) {
        nodes.push(
            (0..n)
                .map(|k| if mask >> k & 1 == 1 { -d } else { d })
                .collect(),
        );
    }
    let w = omega / nodes.len() as f64;
    let weights = vec![w; nodes.len()];
    Ok((nodes, weights))
}

/// `∫_{∂B_R} v^γ S²ᵢⱼ(D²v) vᵢ νⱼ + (γ/2) v^{γ−1} |Dv|² vⱼνⱼ` with `v` given by its jets.
pub fn boundary_flux(
    n: usize,
    gamma: f64,
    radius: f64,
    v: &dyn Fn(&[f64]) -> Result<Jet>,
    nodes: &(Vec<Vec<f64>>, Vec<f64>),
) -> Result<f64> {
    let mut total = 0.0;
    for (dir, w) in nodes.0.iter().zip(&nodes.1) {
        let x: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let j = v(&x)?;
        if j.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: j.dim(),
            });
        }
        let s = row_contract(&s2_tensor(&j.hessian), &j.gradient);
        let a: f64 = s.iter().zip(dir).map(|(s, d)| s * d).sum();
        let b: f64 = j.gradient.iter().zip(dir).map(|(g, d)| g * d).sum();
        let integrand = power(j.value, gamma)? * a
            + term(gamma / 2.0, j.value, gamma - 1.0)? * j.gradient_norm_sq() * b;
        total += w * integrand * radius.powi(n as i32 - 1);
    }
    Ok(total)
}

/// `2(n−2)ω_n (Cap/((n−2)ω_n))^{(n−4)/(n−2)}`, the limit of the γ₂ flux.
pub fn gamma2_flux_limit(n: usize, capacity: f64) -> Result<f64> {
    let nf = n as f64;
    let omega = unit_sphere_area(n)?;
    let base = capacity / ((nf - 2.0) * omega);
    let factor = if n == 4 {
        1.0
    } else {
        base.powf((nf - 4.0) / (nf - 2.0))
    };
    Ok(2.0 * (nf - 2.0) * omega * factor)
}

/// One row of [`check_boundary_limits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLimitRow {
    pub radius: f64,
    /// Flux with `γ₁ = 1 − n`; tends to 0.
    pub flux_gamma1: f64,
    /// Flux with `γ₂ = −n/2`; tends to [`BoundaryLimitRow::limit_gamma2`].
    pub flux_gamma2: f64,
    pub limit_gamma2: f64,
}

impl BoundaryLimitRow {
    pub fn gamma2_relative_error(&self) -> f64 {
        (self.flux_gamma2 - self.limit_gamma2).abs() / self.limit_gamma2
    }
}

/// Far-sphere fluxes for `v = u^{−2/(n−2)}` of a ball, at each radius.
pub fn check_boundary_limits(
    ball: &RadialSolution,
    radii: &[f64],
) -> Result<Vec<BoundaryLimitRow>> {
    let n = ball.n;
    let v = |x: &[f64]| ball.v_fields(x);
    boundary_limits_with(n, ball.capacity(), &v, radii, 1.0 + ball.radius)
}

/// [`check_boundary_limits`] for any field `v` with the given capacity;
/// every radius must exceed `min_radius`.
pub fn boundary_limits_with(
    n: usize,
    capacity: f64,
    v: &dyn Fn(&[f64]) -> Result<Jet>,
    radii: &[f64],
    min_radius: f64,
) -> Result<Vec<BoundaryLimitRow>> {
    let (g1, g2) = gamma_roots(n)?;
    let to_f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
    let nodes = sphere_nodes(n, 4)?;
    let limit = gamma2_flux_limit(n, capacity)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > min_radius) {
            return Err(Error::OutsideDomain(format!(
                "flux sphere of radius {r} meets the domain (needs > {min_radius})"
            )));
        }
        rows.push(BoundaryLimitRow {
            radius: r,
            flux_gamma1: boundary_flux(n, to_f(g1), r, v, &nodes)?,
            flux_gamma2: boundary_flux(n, to_f(g2), r, v, &nodes)?,
            limit_gamma2: limit,
        });
    }
    Ok(rows)
}

/// Which identity a finite-difference check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityKind {
    DivFreeS2,
    A,
    B,
    C,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 4] = [
        IdentityKind::DivFreeS2,
        IdentityKind::A,
        IdentityKind::B,
        IdentityKind::C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::DivFreeS2 => "div-free S2 rows",
            IdentityKind::A => "identity A",
            IdentityKind::B => "identity B",
            IdentityKind::C => "identity C",
        }
    }

    /// Short key: `div-free`, `a`, `b` or `c`.
    pub fn key(self) -> &'static str {
        match self {
            IdentityKind::DivFreeS2 => "div-free",
            IdentityKind::A => "a",
            IdentityKind::B => "b",
            IdentityKind::C => "c",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        IdentityKind::ALL
            .into_iter()
            .find(|k| k.key().eq_ignore_ascii_case(key))
    }
}

/// Residuals at steps `h, h/2, h/4` and the observed order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub residuals: [f64; 3],
    /// `log₂(r(h)/r(h/4)) / 2`, or `log₂(r(h)/r(h/2))` when `r(h/4)` is near
    /// rounding level; `None` when already `r(h/2)` is.
    pub order: Option<f64>,
}

impl OrderEstimate {
    /// Rounding-level residuals are accepted as exact.
    pub fn is_exact(&self) -> bool {
        self.order.is_none()
    }

    pub fn passes(&self, lo: f64, hi: f64) -> bool {
        match self.order {
            None => true,
            Some(p) => (lo..=hi).contains(&p),
        }
    }
}

/// Default step `1e−4 (1 + |x|)`.
pub fn default_step(x: &[f64]) -> f64 {
    1e-4 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Evaluates an identity at `h, h/2, h/4` and estimates the convergence order.
/// A residual below `30 ε · scale / step` is taken to be rounding noise.
pub fn estimate_order(
    kind: IdentityKind,
    f: &TestFunction,
    gamma: f64,
    x: &[f64],
    h: f64,
) -> Result<OrderEstimate> {
    order_with(kind, f, gamma, x, h, None)
}

fn order_with(
    kind: IdentityKind,
    f: &TestFunction,
    gamma: f64,
    x: &[f64],
    h: f64,
    fault: Option<IdentityKind>,
) -> Result<OrderEstimate> {
    let mut residuals = [0.0; 3];
    let mut resolved = [false; 3];
    for (k, r) in residuals.iter_mut().enumerate() {
        let step = h / f64::from(1u32 << k);
        let res = match kind {
            IdentityKind::DivFreeS2 => {
                let (v, scale) = div_free_residual(f, x, step, fault == Some(kind))?;
                Residual {
                    value: v.iter().fold(0.0, |m, r| m.max(r.abs())),
                    scale,
                }
            }
            IdentityKind::A => identity_a(f, gamma, x, step, fault == Some(kind))?,
            IdentityKind::B => identity_b(f, gamma, x, step, fault == Some(kind))?,
            IdentityKind::C => identity_c(f, gamma, x, step, fault == Some(kind))?,
        };
        *r = res.value;
        resolved[k] = res.value > 30.0 * f64::EPSILON * res.scale.max(1e-300) / step;
    }
    let order = if resolved[2] {
        Some((residuals[0] / residuals[2]).log2() / 2.0)
    } else if resolved[1] {
        Some((residuals[0] / residuals[1]).log2())
    } else {
        None
    };
    Ok(OrderEstimate { residuals, order })
}

/// One finite-difference check in a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub kind: IdentityKind,
    pub function: String,
    pub n: usize,
    pub gamma: f64,
    pub point: Vec<f64>,
    pub estimate: OrderEstimate,
}

/// Summary of an identity suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub dims: Vec<usize>,
    pub checks: Vec<CheckRecord>,
    /// Largest relative residual of the level-set identities.
    pub level_set_max: f64,
    pub level_set_count: usize,
    /// `(n, γ₁, γ₂, coefficient at γ₁, coefficient at γ₂)`.
    pub gamma_table: Vec<GammaRow>,
    /// Per dimension, the ball boundary-limit table.
    pub boundary_limits: Vec<(usize, Vec<BoundaryLimitRow>)>,
}

/// `(n, γ₁, γ₂, coefficient at γ₁, coefficient at γ₂)`.
pub type GammaRow = (usize, Ratio<i64>, Ratio<i64>, Ratio<i64>, Ratio<i64>);

/// Accepted range of observed orders.
pub const ORDER_RANGE: (f64, f64) = (1.8, 2.2);
/// Tolerance of the level-set identities.
pub const LEVEL_SET_TOLERANCE: f64 = 1e-11;
/// Tolerance of the γ₂ flux limit at the largest radius.
pub const FLUX_TOLERANCE: f64 = 0.01;

impl SuiteReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks
            .iter()
            .filter(|c| !c.estimate.passes(ORDER_RANGE.0, ORDER_RANGE.1))
    }

    /// Order range over non-exact checks of one kind.
    pub fn order_range(&self, kind: IdentityKind) -> Option<(f64, f64)> {
        self.checks
            .iter()
            .filter(|c| c.kind == kind)
            .filter_map(|c| c.estimate.order)
            .fold(None, |acc, p| match acc {
                None => Some((p, p)),
                Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
            })
    }

    pub fn gamma_roots_ok(&self) -> bool {
        self.gamma_table.iter().all(|&(n, g1, g2, c1, c2)| {
            let ni = n as i64;
            c1 == Ratio::from_integer(0)
                && c2 == Ratio::from_integer(0)
                && g1 == Ratio::from_integer(1 - ni)
                && g2 == Ratio::new(-ni, 2)
        })
    }

    pub fn boundary_limits_ok(&self) -> bool {
        self.boundary_limits.iter().all(|(_, rows)| {
            rows.last().is_some_and(|r| {
                r.gamma2_relative_error() <= FLUX_TOLERANCE
                    && r.flux_gamma1.abs() <= FLUX_TOLERANCE * r.limit_gamma2
            })
        })
    }

    pub fn level_sets_ok(&self) -> bool {
        self.level_set_max <= LEVEL_SET_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.failed_checks().next().is_none()
            && self.level_sets_ok()
            && self.gamma_roots_ok()
            && self.boundary_limits_ok()
    }
}

/// Suite settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub dims: Vec<usize>,
    pub points_per_function: usize,
    pub seed: u64,
    /// Deliberately corrupts one identity, to show that the suite catches it.
    pub fault: Option<IdentityKind>,
    /// Dimensions of the γ-root table.
    pub gamma_dims: Vec<usize>,
    pub flux_radii: Vec<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            dims: vec![3, 4, 5, 6],
            points_per_function: 10,
            seed: 7,
            fault: None,
            gamma_dims: (3..=10).collect(),
            flux_radii: vec![10.0, 100.0, 1000.0],
        }
    }
}

/// Runs every identity over the registered functions at seeded points.
///
/// `div-free S2` runs on every function; identities A, B and C run on the
/// positive functions with `γ ∈ {0, 1, γ₁, γ₂, −3/2}`.
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut level_set_max: f64 = 0.0;
    let mut level_set_count = 0;
    let mut boundary_limits = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for &n in &opts.dims {
        if n < 3 {
            return Err(domain(format!("suite dimensions start at 3, got {n}")));
        }
        let positive = functions::positive_registry(n)?;
        let mut all = functions::positive_registry(n)?;
        all.push(functions::exp_sin(n)?);
        all.push(functions::quartic(n)?);
        let nf = n as f64;
        let mut gammas = vec![0.0, 1.0, 1.0 - nf, -nf / 2.0, -1.5];
        gammas.sort_by(f64::total_cmp);
        gammas.dedup();
        for f in &all {
            for _ in 0..opts.points_per_function {
                let x = random_point(&mut rng, n, 0.8);
                let h = default_step(&x);
                let estimate = order_with(IdentityKind::DivFreeS2, f, 0.0, &x, h, opts.fault)?;
                checks.push(CheckRecord {
                    kind: IdentityKind::DivFreeS2,
                    function: f.name().into(),
                    n,
                    gamma: 0.0,
                    point: x,
                    estimate,
                });
            }
        }
        for f in &positive {
            for _ in 0..opts.points_per_function {
                let x = random_point(&mut rng, n, 0.8);
                let h = default_step(&x);
                for kind in [IdentityKind::A, IdentityKind::B, IdentityKind::C] {
                    for &gamma in &gammas {
                        let estimate = order_with(kind, f, gamma, &x, h, opts.fault)?;
                        checks.push(CheckRecord {
                            kind,
                            function: f.name().into(),
                            n,
                            gamma,
                            point: x.clone(),
                            estimate,
                        });
                    }
                }
                let ls = check_level_set_identity(f, &x)?;
                level_set_max = level_set_max.max(ls.laplacian_form).max(ls.s2_form);
                level_set_count += 1;
            }
        }
        let ball = RadialSolution::new(n, 1.0)?;
        boundary_limits.push((n, check_boundary_limits(&ball, &opts.flux_radii)?));
    }
    let mut gamma_table = Vec::new();
    for &n in &opts.gamma_dims {
        let (g1, g2) = gamma_roots(n)?;
        gamma_table.push((
            n,
            g1,
            g2,
            gamma_coefficient_exact(n, g1),
            gamma_coefficient_exact(n, g2),
        ));
    }
    Ok(SuiteReport {
        dims: opts.dims.clone(),
        checks,
        level_set_max,
        level_set_count,
        gamma_table,
        boundary_limits,
    })
}
