//! Closed-form reference solutions: radial capacitary potentials, the
//! corresponding `v` fields, ball and ellipsoid capacities, and the area of
//! the unit sphere in any dimension.
//!
//! All derivatives here are hand-derived closed forms. These values are the
//! ground truth against which the discretized solvers are judged.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::jet::Jet;
use crate::linalg::SymmetricMatrix;
use crate::quadrature::integrate_adaptive;

/// Dimension together with `ω_n`, the surface area of the unit sphere in Rⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimConstant {
    pub n: usize,
    pub omega_n: f64,
}

impl DimConstant {
    pub fn new(n: usize) -> Result<Self> {
        Ok(DimConstant {
            n,
            omega_n: unit_sphere_area(n)?,
        })
    }
}

/// `ω_n = 2 π^{n/2} / Γ(n/2)`.
///
/// `Γ(n/2)` is expanded by the half-integer recursion, so the `√π` factors
/// cancel symbolically: for even `n = 2m`, `ω = 2πᵐ/(m−1)!`; for odd
/// `n = 2k+1`, `ω = 2^{k+1} πᵏ / (2k−1)!!`.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("unit sphere area needs n >= 2, got {n}")));
    }
    if n % 2 == 0 {
        let m = n / 2;
        let fact: f64 = (1..m).map(|i| i as f64).product();
        Ok(2.0 * PI.powi(m as i32) / fact)
    } else {
        let k = n / 2;
        let double_fact: f64 = (1..=k).map(|i| (2 * i - 1) as f64).product();
        Ok(2.0f64.powi(k as i32 + 1) * PI.powi(k as i32) / double_fact)
    }
}

/// The ball `B_R ⊂ Rⁿ` and its capacitary potential `u = (R/|x|)^{n−2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSolution {
    pub n: usize,
    pub radius: f64,
}

impl RadialSolution {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!(
                "capacitary potential needs n >= 3, got {n}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("radius must be positive, got {radius}")));
        }
        Ok(RadialSolution { n, radius })
    }

    pub fn potential(&self, x: &[f64]) -> Result<Jet> {
        radial_potential(self.n, self.radius, x)
    }

    pub fn v_fields(&self, x: &[f64]) -> Result<Jet> {
        radial_v_fields(self.n, self.radius, x)
    }

    pub fn capacity(&self) -> f64 {
        (self.n as f64 - 2.0)
            * unit_sphere_area(self.n).unwrap_or(f64::NAN)
            * self.radius.powi(self.n as i32 - 2)
    }

    /// `|Du|` on the boundary sphere: `(n−2)/R`.
    pub fn boundary_gradient(&self) -> f64 {
        (self.n as f64 - 2.0) / self.radius
    }

    /// Mean curvature (average of principal curvatures) of the boundary: `1/R`.
    pub fn boundary_mean_curvature(&self) -> f64 {
        1.0 / self.radius
    }

    /// `ω_n R^{n−1}`.
    pub fn boundary_area(&self) -> f64 {
        unit_sphere_area(self.n).unwrap_or(f64::NAN) * self.radius.powi(self.n as i32 - 1)
    }
}

fn exterior_radius(n: usize, radius: f64, x: &[f64]) -> Result<f64> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    // |x| = R is admitted up to rounding in the norm
    if r < radius * (1.0 - 4.0 * f64::EPSILON) {
        return Err(Error::OutsideDomain(format!(
            "|x| = {r} is inside the ball of radius {radius}"
        )));
    }
    Ok(r)
}

/// `u = (R/|x|)^{n−2}` with its exact gradient and Hessian:
/// `Du = −(n−2) u x/|x|²`, `D²u = (n−2) u |x|^{−2} (n x xᵀ/|x|² − I)`.
pub fn radial_potential(n: usize, radius: f64, x: &[f64]) -> Result<Jet> {
    RadialSolution::new(n, radius)?;
    let r = exterior_radius(n, radius, x)?;
    let nm2 = n as f64 - 2.0;
    let r2 = r * r;
    let u = (radius / r).powi(n as i32 - 2);
    let gradient: Vec<f64> = x.iter().map(|xi| -nm2 * u * xi / r2).collect();
    let c = nm2 * u / r2;
    let hessian = SymmetricMatrix::from_fn(n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        c * (n as f64 * x[i] * x[j] / r2 - delta)
    })?;
    Ok(Jet {
        value: u,
        gradient,
        hessian,
    })
}

/// `(n−2) ω_n R^{n−2}`.
pub fn ball_capacity(n: usize, radius: f64) -> Result<f64> {
    Ok(RadialSolution::new(n, radius)?.capacity())
}

/// `v = u^{−2/(n−2)} = |x|²/R²` for the ball: `Dv = 2x/R²`, `D²v = (2/R²) I`.
pub fn radial_v_fields(n: usize, radius: f64, x: &[f64]) -> Result<Jet> {
    RadialSolution::new(n, radius)?;
    let r = exterior_radius(n, radius, x)?;
    let inv = 1.0 / (radius * radius);
    Ok(Jet {
        value: r * r * inv,
        gradient: x.iter().map(|xi| 2.0 * xi * inv).collect(),
        hessian: SymmetricMatrix::scaled_identity(n, 2.0 * inv),
    })
}

/// Capacity of the solid ellipsoid with semi-axes `a, b, c`:
/// `8π / ∫₀^∞ ds / √((a²+s)(b²+s)(c²+s))`.
///
/// With `s = t²/(1−t)²` the integrand becomes `2t / √Π(a_k²(1−t)² + t²)` on
/// `[0, 1]`, which is smooth up to both endpoints.
pub fn ellipsoid_capacity(a: f64, b: f64, c: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!(
                "semi-axis {name} must be positive, got {v}"
            )));
        }
    }
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let integrand = |t: f64| {
        let w = (1.0 - t) * (1.0 - t);
        let t2 = t * t;
        2.0 * t / ((a2 * w + t2) * (b2 * w + t2) * (c2 * w + t2)).sqrt()
    };
    let integral = integrate_adaptive(integrand, 0.0, 1.0, 1e-12)?;
    Ok(8.0 * PI / integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_sphere_areas() {
        assert_relative_eq!(unit_sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(unit_sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(
            unit_sphere_area(4).unwrap(),
            2.0 * PI * PI,
            max_relative = 1e-15
        );
        // ω₅ = 8π²/3, ω₆ = π³
        assert_relative_eq!(
            unit_sphere_area(5).unwrap(),
            8.0 * PI * PI / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit_sphere_area(6).unwrap(),
            PI.powi(3),
            max_relative = 1e-15
        );
        assert!(unit_sphere_area(1).is_err());
        assert!(unit_sphere_area(0).is_err());
    }

    #[test]
    fn radial_potential_examples() {
        let j = radial_potential(3, 1.0, &[0.0, 2.0, 0.0]).unwrap();
        assert_relative_eq!(j.value, 0.5, max_relative = 1e-15);

        let j = radial_potential(3, 1.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(j.gradient_norm_sq().sqrt(), 1.0, max_relative = 1e-15);

        for n in 3..8 {
            let mut x = alloc::vec![0.0; n];
            x[n - 1] = 2.5;
            let j = radial_potential(n, 2.5, &x).unwrap();
            assert_eq!(j.value, 1.0);
        }
        assert!(matches!(
            radial_potential(3, 1.0, &[0.5, 0.0, 0.0]),
            Err(Error::OutsideDomain(_))
        ));
        assert!(radial_potential(2, 1.0, &[2.0, 0.0]).is_err());
        assert!(radial_potential(3, 1.0, &[2.0, 0.0]).is_err());
    }

    #[test]
    fn ball_capacities() {
        assert_relative_eq!(
            ball_capacity(3, 1.0).unwrap(),
            4.0 * PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            ball_capacity(3, 2.0).unwrap(),
            8.0 * PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            ball_capacity(4, 1.0).unwrap(),
            4.0 * PI * PI,
            max_relative = 1e-15
        );
    }

    #[test]
    fn radial_v_examples() {
        let j = radial_v_fields(3, 1.0, &[0.3, -1.2, 2.0]).unwrap();
        assert_eq!(j.hessian, SymmetricMatrix::scaled_identity(3, 2.0));
        let j = radial_v_fields(5, 1.0, &[0.0, 0.0, 3.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(j.value, 9.0, max_relative = 1e-15);
        let j = radial_v_fields(4, 1.5, &[0.0, 1.5, 0.0, 0.0]).unwrap();
        assert_relative_eq!(j.value, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn ellipsoid_reduces_to_ball() {
        assert_relative_eq!(
            ellipsoid_capacity(1.0, 1.0, 1.0).unwrap(),
            4.0 * PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            ellipsoid_capacity(2.0, 2.0, 2.0).unwrap(),
            8.0 * PI,
            max_relative = 1e-12
        );
        assert!(ellipsoid_capacity(0.0, 1.0, 1.0).is_err());
        assert!(ellipsoid_capacity(1.0, -1.0, 1.0).is_err());
    }
}
