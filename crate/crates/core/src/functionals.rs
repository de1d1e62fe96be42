//! Boundary functionals of the capacitary potential and the symmetry
//! diagnostics built on them.
//!
//! With `|Du|`, `H` and area per boundary panel:
//!
//! - `F1 = Σ area·|Du|²·(H − |Du|/(n−2))`, nonnegative, zero only for balls;
//! - `F2 = Σ area·|Du|²·((n−1)H − n|Du|/(2(n−2)))` bounded below by
//!   `((n−2)³/2) ω_n (Cap/((n−2)ω_n))^{(n−4)/(n−2)}`, with equality only for balls;
//! - for `n = 3`, `Cap · F2 ≥ 8π²`.
//!
//! Off the boundary, `v = u^{−2/(n−2)}` solves `Δv = (n/2)|Dv|²/v`, and `D²v`
//! is a multiple of the identity everywhere only for balls; the Newton
//! deficit of `D²v` measures the departure.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bem::{solve_equilibrium, EquilibriumSolution};
use crate::error::{domain, Error, Result};
use crate::geometry::{make_sphere_mesh, BoundaryFields};
use crate::jet::Jet;
use crate::linalg::SymmetricMatrix;
use crate::oracles::{unit_sphere_area, RadialSolution};
use crate::symfun::newton_deficit;
use crate::vec3::Vec3;

/// Number of exterior points used by the Newton scan in reports.
pub const DEFAULT_SAMPLE_COUNT: usize = 64;
/// Seed of the default sample points.
pub const DEFAULT_SEED: u64 = 20_240_601;

fn check_dimension(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(domain(format!("dimension must be at least 3, got {n}")));
    }
    Ok(n as f64)
}

fn check_fields(fields: &BoundaryFields) -> Result<()> {
    if fields.is_empty() {
        return Err(domain("boundary fields are empty"));
    }
    Ok(())
}

/// `Σ area·|Du|²·(H − |Du|/(n−2))`.
pub fn f1(fields: &BoundaryFields, n: usize) -> Result<f64> {
    let nf = check_dimension(n)?;
    check_fields(fields)?;
    Ok(fields
        .panels()
        .map(|(g, h, a)| a * g * g * (h - g / (nf - 2.0)))
        .sum())
}

/// `Σ area·|Du|³`, the natural size of [`f1`]: `F1 / scale` is invariant
/// under dilations.
pub fn f1_scale(fields: &BoundaryFields) -> f64 {
    fields.panels().map(|(g, _, a)| a * g * g * g).sum()
}

/// `(lhs, rhs)` of the second boundary inequality.
pub fn f2(fields: &BoundaryFields, capacity: f64, n: usize) -> Result<(f64, f64)> {
    let nf = check_dimension(n)?;
    check_fields(fields)?;
    if !(capacity > 0.0 && capacity.is_finite()) {
        return Err(domain(format!("capacity must be positive, got {capacity}")));
    }
    let lhs = fields
        .panels()
        .map(|(g, h, a)| a * g * g * ((nf - 1.0) * h - nf * g / (2.0 * (nf - 2.0))))
        .sum();
    Ok((lhs, f2_rhs(capacity, n)?))
}

/// `((n−2)³/2) ω_n (Cap/((n−2)ω_n))^{(n−4)/(n−2)}`.
pub fn f2_rhs(capacity: f64, n: usize) -> Result<f64> {
    let nf = check_dimension(n)?;
    let omega = unit_sphere_area(n)?;
    let base = capacity / ((nf - 2.0) * omega);
    let exponent = (nf - 4.0) / (nf - 2.0);
    let factor = if n == 4 { 1.0 } else { base.powf(exponent) };
    Ok((nf - 2.0).powi(3) / 2.0 * omega * factor)
}

/// The three-dimensional lower bound `Cap·F2 ≥ 8π²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// `Cap · F2_lhs`.
    pub product: f64,
    /// `(n−2)⁴ ω_n² / 2 = 8π²`, attained by every ball.
    pub rhs: f64,
    /// `(n−2)³ ω_n / 2 = 2π`, the constant as it is sometimes quoted. Balls
    /// give `product = 8π²`, so this value is not the optimal bound.
    pub quoted_rhs: f64,
}

impl LowerBound {
    pub fn relative_gap(&self) -> f64 {
        (self.product - self.rhs) / self.rhs
    }
}

pub fn lower_bound_n3(capacity: f64, fields: &BoundaryFields) -> Result<LowerBound> {
    let (lhs, _) = f2(fields, capacity, 3)?;
    Ok(LowerBound {
        product: capacity * lhs,
        rhs: 8.0 * PI * PI,
        quoted_rhs: 2.0 * PI,
    })
}

/// `v = u^{−2/(n−2)}` with its gradient and Hessian by the chain rule:
/// `Dv = −(2/(n−2)) u^{−n/(n−2)} Du`,
/// `D²v = −(2/(n−2)) u^{−n/(n−2)} D²u + (2n/(n−2)²) u^{−(2n−2)/(n−2)} Du⊗Du`.
///
/// `u` must lie in `(0, 1]`.
pub fn v_transform(u: f64, du: &[f64], d2u: &SymmetricMatrix, n: usize) -> Result<Jet> {
    let nf = check_dimension(n)?;
    if du.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: du.len(),
        });
    }
    if d2u.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: d2u.dim(),
        });
    }
    if !(u > 0.0 && u <= 1.0 + 1e-9) {
        return Err(domain(format!("v-transform needs 0 < u <= 1, got {u}")));
    }
    let m = nf - 2.0;
    let value = u.powf(-2.0 / m);
    let c1 = -2.0 / m * u.powf(-nf / m);
    let c2 = 2.0 * nf / (m * m) * u.powf(-(2.0 * nf - 2.0) / m);
    let gradient = du.iter().map(|g| c1 * g).collect();
    let hessian = d2u.scaled(c1).add_scaled(c2, &SymmetricMatrix::outer(du))?;
    Ok(Jet {
        value,
        gradient,
        hessian,
    })
}

/// [`v_transform`] applied to a jet of `u`.
pub fn v_transform_jet(u: &Jet, n: usize) -> Result<Jet> {
    v_transform(u.value, &u.gradient, &u.hessian, n)
}

/// `Tr(D²v) − (n/2)|Dv|²/v`.
pub fn pbv_residual(v: &Jet, n: usize) -> Result<f64> {
    let nf = check_dimension(n)?;
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    if !(v.value > 0.0) {
        return Err(domain(format!("v must be positive, got {}", v.value)));
    }
    Ok(v.hessian.trace() - nf / 2.0 * v.gradient_norm_sq() / v.value)
}

/// [`pbv_residual`] divided by `(n/2)|Dv|²/v`.
pub fn pbv_relative_residual(v: &Jet, n: usize) -> Result<f64> {
    let r = pbv_residual(v, n)?;
    let scale = n as f64 / 2.0 * v.gradient_norm_sq() / v.value;
    Ok(r / scale)
}

/// Newton deficit of `D²v` divided by `Tr(D²v)²`.
pub fn normalized_newton_deficit(v: &Jet) -> f64 {
    let tr = v.hessian.trace();
    newton_deficit(&v.hessian) / (tr * tr)
}

/// Per-point normalized Newton deficits and their supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonScan {
    pub sup_deficit: f64,
    pub deficits: Vec<f64>,
}

impl NewtonScan {
    fn from_deficits(deficits: Vec<f64>) -> Self {
        let sup_deficit = deficits.iter().copied().fold(0.0, f64::max);
        NewtonScan {
            sup_deficit,
            deficits,
        }
    }
}

/// Evaluates `u` by the boundary-element solution at each sample point, maps
/// it through [`v_transform`] and records the normalized Newton deficit.
/// Points must be exterior and at least one panel diameter from the surface.
pub fn newton_scan(sol: &EquilibriumSolution<'_>, points: &[Vec3]) -> Result<NewtonScan> {
    let jets = exterior_v_jets(sol, points)?;
    Ok(NewtonScan::from_deficits(
        jets.iter().map(normalized_newton_deficit).collect(),
    ))
}

/// [`newton_scan`] for the exact potential of a ball in `Rⁿ`.
pub fn newton_scan_radial(ball: &RadialSolution, points: &[Vec<f64>]) -> Result<NewtonScan> {
    let mut deficits = Vec::with_capacity(points.len());
    for p in points {
        let v = v_transform_jet(&ball.potential(p)?, ball.n)?;
        deficits.push(normalized_newton_deficit(&v));
    }
    Ok(NewtonScan::from_deficits(deficits))
}

fn exterior_v_jets(sol: &EquilibriumSolution<'_>, points: &[Vec3]) -> Result<Vec<Jet>> {
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let u = sol.eval_jet(*p)?;
        let ratio = sol.near_surface_ratio(*p);
        if ratio < 1.0 {
            return Err(domain(format!(
                "sample point {p:?} is {ratio:.3} panel diameters from the surface; at least 1 is required"
            )));
        }
        out.push(v_transform_jet(&u, 3)?);
    }
    Ok(out)
}

/// `count` seeded points uniformly distributed in direction, at distances
/// between `1.5` and `3` times `radius` from `center`.
pub fn sample_points(center: Vec3, radius: f64, count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..(2.0 * PI));
            let s = (1.0 - z * z).max(0.0).sqrt();
            let rho: f64 = rng.gen_range(1.5..=3.0);
            center + Vec3::new(s * phi.cos(), s * phi.sin(), z) * (rho * radius)
        })
        .collect()
}

/// [`sample_points`] around the mesh of a solution, scaled by its bounding radius
/// and pushed out on coarse meshes so every point clears the panels.
pub fn mesh_sample_points(sol: &EquilibriumSolution<'_>, count: usize, seed: u64) -> Vec<Vec3> {
    let mesh = sol.mesh();
    let center = mesh.center();
    let radius = mesh
        .vertices()
        .iter()
        .map(|v| (*v - center).norm())
        .fold(0.0, f64::max);
    let radius = radius.max((radius + 1.5 * mesh.max_panel_diameter()) / 1.5);
    sample_points(center, radius, count, seed)
}

/// The same construction in `Rⁿ` for the ball oracle: directions from
/// normalized Gaussian-free rejection sampling in the unit cube.
pub fn sample_points_nd(n: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r2: f64 = d.iter().map(|x| x * x).sum();
        if !(r2 > 1e-4 && r2 <= 1.0) {
            continue;
        }
        let rho: f64 = rng.gen_range(1.5..=3.0) * radius / r2.sqrt();
        out.push(d.into_iter().map(|x| x * rho).collect());
    }
    out
}

/// Boundary fields of a solution: `|Du| = σ`, the mesh's per-panel mean
/// curvature (exact for analytic meshes) and panel areas.
pub fn boundary_fields(sol: &EquilibriumSolution<'_>) -> Result<BoundaryFields> {
    let mesh = sol.mesh();
    BoundaryFields::new(
        sol.boundary_gradient(),
        mesh.panel_mean_curvature()?,
        mesh.areas().to_vec(),
    )
}

/// Thresholds of [`symmetry_verdict`], all relative:
/// `F1 ≤ f1·Σ area|Du|³`, `|F2_lhs − F2_rhs| ≤ f2·F2_rhs`,
/// `newton_sup_deficit ≤ newton`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub f1: f64,
    pub f2: f64,
    pub newton: f64,
}

impl Thresholds {
    /// Tight thresholds for exact (oracle) fields.
    pub fn exact() -> Self {
        Thresholds {
            f1: 1e-11,
            f2: 1e-11,
            newton: 1e-11,
        }
    }

    /// Three times the measured noise floor.
    pub fn from_noise_floor(floor: &NoiseFloor) -> Self {
        Thresholds {
            f1: 3.0 * floor.f1,
            f2: 3.0 * floor.f2,
            newton: 3.0 * floor.newton,
        }
    }

    /// Solves the unit sphere at `level` and returns [`Thresholds::from_noise_floor`].
    pub fn calibrated(level: u32, quad_order: usize, seed: u64) -> Result<Self> {
        Ok(Thresholds::from_noise_floor(&NoiseFloor::measure(
            level, quad_order, seed,
        )?))
    }
}

/// Deviations of the discrete unit sphere from the exact equality case, in
/// the relative units of [`Thresholds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseFloor {
    pub level: u32,
    pub f1: f64,
    pub f2: f64,
    pub newton: f64,
}

impl NoiseFloor {
    pub fn measure(level: u32, quad_order: usize, seed: u64) -> Result<Self> {
        let mesh = make_sphere_mesh(1.0, level)?;
        let sol = solve_equilibrium(&mesh, quad_order)?;
        NoiseFloor::of_sphere_solution(&sol, seed)
    }

    /// The floor read off an already solved sphere.
    pub fn of_sphere_solution(sol: &EquilibriumSolution<'_>, seed: u64) -> Result<Self> {
        let fields = boundary_fields(sol)?;
        let (lhs, rhs) = f2(&fields, sol.capacity(), 3)?;
        let points = mesh_sample_points(sol, DEFAULT_SAMPLE_COUNT, seed);
        let scan = newton_scan(sol, &points)?;
        let tiny = f64::EPSILON;
        Ok(NoiseFloor {
            level: sol.mesh().level().unwrap_or(0),
            f1: (f1(&fields, 3)? / f1_scale(&fields)).abs().max(tiny),
            f2: ((lhs - rhs) / rhs).abs().max(tiny),
            newton: scan.sup_deficit.abs().max(tiny),
        })
    }
}

/// Outcome of [`symmetry_verdict`].
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub ball: bool,
    /// One entry per failed test.
    pub reasons: Vec<String>,
}

/// Everything the boundary and interior diagnostics say about one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub n: usize,
    pub capacity: f64,
    pub f1: f64,
    /// `Σ area·|Du|³`.
    pub f1_scale: f64,
    pub f2_lhs: f64,
    pub f2_rhs: f64,
    /// Present for `n = 3`.
    pub lower_bound: Option<LowerBound>,
    pub newton_sup_deficit: f64,
    /// Largest [`pbv_relative_residual`] magnitude over the sample points.
    pub pbv_max_residual: f64,
    pub sample_count: usize,
    pub panels: Option<usize>,
    pub level: Option<u32>,
    pub thresholds: Thresholds,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn f1_relative(&self) -> f64 {
        self.f1 / self.f1_scale
    }

    pub fn f2_relative_gap(&self) -> f64 {
        (self.f2_lhs - self.f2_rhs) / self.f2_rhs
    }

    /// Report for a solved mesh; sample points from [`mesh_sample_points`].
    pub fn from_solution(
        sol: &EquilibriumSolution<'_>,
        thresholds: Thresholds,
        sample_count: usize,
        seed: u64,
    ) -> Result<Self> {
        let fields = boundary_fields(sol)?;
        let capacity = sol.capacity();
        let (f2_lhs, f2_rhs) = f2(&fields, capacity, 3)?;
        let points = mesh_sample_points(sol, sample_count, seed);
        let jets = exterior_v_jets(sol, &points)?;
        let scan = NewtonScan::from_deficits(jets.iter().map(normalized_newton_deficit).collect());
        let mut pbv: f64 = 0.0;
        for v in &jets {
            pbv = pbv.max(pbv_relative_residual(v, 3)?.abs());
        }
        let mesh = sol.mesh();
        Ok(TheoremReport::assemble(
            3,
            capacity,
            f1(&fields, 3)?,
            f1_scale(&fields),
            (f2_lhs, f2_rhs),
            Some(lower_bound_n3(capacity, &fields)?),
            scan.sup_deficit,
            pbv,
            sample_count,
            (Some(mesh.num_panels()), mesh.level()),
            thresholds,
        ))
    }

    /// Report for the exact ball of radius `radius` in `Rⁿ`.
    pub fn for_ball(n: usize, radius: f64, sample_count: usize, seed: u64) -> Result<Self> {
        let ball = RadialSolution::new(n, radius)?;
        let fields = BoundaryFields::for_ball(&ball);
        let capacity = ball.capacity();
        let points = sample_points_nd(n, radius, sample_count, seed);
        let mut deficits = Vec::with_capacity(points.len());
        let mut pbv: f64 = 0.0;
        for p in &points {
            let v = v_transform_jet(&ball.potential(p)?, n)?;
            deficits.push(normalized_newton_deficit(&v));
            pbv = pbv.max(pbv_relative_residual(&v, n)?.abs());
        }
        let scan = NewtonScan::from_deficits(deficits);
        let lb = if n == 3 {
            Some(lower_bound_n3(capacity, &fields)?)
        } else {
            None
        };
        Ok(TheoremReport::assemble(
            n,
            capacity,
            f1(&fields, n)?,
            f1_scale(&fields),
            f2(&fields, capacity, n)?,
            lb,
            scan.sup_deficit,
            pbv,
            sample_count,
            (None, None),
            Thresholds::exact(),
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        n: usize,
        capacity: f64,
        f1: f64,
        f1_scale: f64,
        (f2_lhs, f2_rhs): (f64, f64),
        lower_bound: Option<LowerBound>,
        newton_sup_deficit: f64,
        pbv_max_residual: f64,
        sample_count: usize,
        (panels, level): (Option<usize>, Option<u32>),
        thresholds: Thresholds,
    ) -> Self {
        let mut report = TheoremReport {
            n,
            capacity,
            f1,
            f1_scale,
            f2_lhs,
            f2_rhs,
            lower_bound,
            newton_sup_deficit,
            pbv_max_residual,
            sample_count,
            panels,
            level,
            thresholds,
            verdict: Verdict {
                ball: false,
                reasons: Vec::new(),
            },
        };
        report.verdict = symmetry_verdict(&report, &thresholds);
        report
    }
}

/// Ball iff `F1`, the `F2` gap and the Newton deficit are all within thresholds.
pub fn symmetry_verdict(report: &TheoremReport, thresholds: &Thresholds) -> Verdict {
    let mut reasons = Vec::new();
    let f1_rel = report.f1_relative();
    if !(f1_rel <= thresholds.f1) {
        reasons.push(format!(
            "F1 positive: F1/scale = {f1_rel:.3e} exceeds {:.3e}",
            thresholds.f1
        ));
    }
    let gap = report.f2_relative_gap().abs();
    if !(gap <= thresholds.f2) {
        reasons.push(format!(
            "F2 gap: |lhs - rhs|/rhs = {gap:.3e} exceeds {:.3e}",
            thresholds.f2
        ));
    }
    if !(report.newton_sup_deficit <= thresholds.newton) {
        reasons.push(format!(
            "Newton deficit: sup = {:.3e} exceeds {:.3e}",
            report.newton_sup_deficit, thresholds.newton
        ));
    }
    Verdict {
        ball: reasons.is_empty(),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ball_fields(n: usize, r: f64) -> (BoundaryFields, f64) {
        let b = RadialSolution::new(n, r).unwrap();
        (BoundaryFields::for_ball(&b), b.capacity())
    }

    #[test]
    fn f1_vanishes_on_balls() {
        for r in [1.0, 2.0] {
            let (f, _) = ball_fields(3, r);
            assert_eq!(f1(&f, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn f2_ball_values() {
        let (f, cap) = ball_fields(3, 1.0);
        let (l, r) = f2(&f, cap, 3).unwrap();
        assert!((l - 2.0 * PI).abs() < 1e-13);
        assert!((r - 2.0 * PI).abs() < 1e-13);
        let (f, cap) = ball_fields(4, 1.7);
        let (l, r) = f2(&f, cap, 4).unwrap();
        assert!((r - 8.0 * PI * PI).abs() < 1e-12);
        assert!((l - r).abs() < 1e-12 * r);
    }

    #[test]
    fn lower_bound_is_radius_independent() {
        for r in [0.5, 1.0, 2.0, 5.0] {
            let (f, cap) = ball_fields(3, r);
            let lb = lower_bound_n3(cap, &f).unwrap();
            assert!(lb.relative_gap().abs() < 1e-13);
            assert!((lb.quoted_rhs - 2.0 * PI).abs() < 1e-15);
        }
    }

    #[test]
    fn v_transform_of_radial_potential() {
        let x = [2.0, 0.0, 0.0];
        let u = crate::oracles::radial_potential(3, 1.0, &x).unwrap();
        let v = v_transform_jet(&u, 3).unwrap();
        assert!((v.value - 4.0).abs() < 1e-14);
        let two_i = SymmetricMatrix::scaled_identity(3, 2.0);
        assert!(v.hessian.add_scaled(-1.0, &two_i).unwrap().max_abs() < 1e-13);
        let at_boundary = v_transform(1.0, &[0.0; 3], &SymmetricMatrix::zeros(3), 3).unwrap();
        assert_eq!(at_boundary.value, 1.0);
    }

    #[test]
    fn v_transform_rejects_nonpositive_u() {
        let h = SymmetricMatrix::zeros(3);
        assert!(v_transform(0.0, &[0.0; 3], &h, 3).is_err());
        assert!(v_transform(-0.5, &[0.0; 3], &h, 3).is_err());
        assert!(v_transform(0.5, &[0.0; 2], &h, 3).is_err());
    }

    #[test]
    fn pbv_residual_negative_control() {
        // u = exp(-|x|) at |x| = 3 along the first axis
        let r: f64 = 3.0;
        let u = (-r).exp();
        let du = vec![-u, 0.0, 0.0];
        let d2u = SymmetricMatrix::diagonal(&[u, -u / r, -u / r]);
        let v = v_transform(u, &du, &d2u, 3).unwrap();
        assert!(pbv_residual(&v, 3).unwrap().abs() > 1e-3);
    }

    #[test]
    fn verdict_reasons() {
        let mut rep = TheoremReport::for_ball(3, 1.0, 8, 1).unwrap();
        assert!(rep.verdict.ball);
        rep.f1 = 0.5 * rep.f1_scale;
        let v = symmetry_verdict(&rep, &rep.thresholds);
        assert!(!v.ball);
        assert!(v.reasons[0].starts_with("F1 positive"));
    }

    #[test]
    fn sample_points_are_seeded() {
        let a = sample_points(Vec3::ZERO, 1.0, 10, 7);
        assert_eq!(a, sample_points(Vec3::ZERO, 1.0, 10, 7));
        assert_ne!(a, sample_points(Vec3::ZERO, 1.0, 10, 8));
        assert!(a
            .iter()
            .all(|p| (1.5 - 1e-12..=3.0 + 1e-12).contains(&p.norm())));
        let b = sample_points_nd(5, 2.0, 10, 3);
        for p in &b {
            let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((3.0 - 1e-12..=6.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn empty_fields_are_rejected() {
        let f = BoundaryFields::new(vec![], vec![], vec![]).unwrap();
        assert!(f1(&f, 3).is_err());
        assert!(f2(&f, 1.0, 3).is_err());
    }
}
