use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::mesh::{AnalyticSurface, TriMesh};
use crate::error::{domain, Result};
use crate::vec3::Vec3;

/// Unit icosahedron with two vertices on the x-axis, faces oriented outward.
fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let h = 1.0 / 5.0f64.sqrt();
    let rho = 2.0 * h;
    let mut v = Vec::with_capacity(12);
    v.push(Vec3::new(1.0, 0.0, 0.0));
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0;
        v.push(Vec3::new(h, rho * a.cos(), rho * a.sin()));
    }
    for k in 0..5 {
        let a = 2.0 * PI * k as f64 / 5.0 + PI / 5.0;
        v.push(Vec3::new(-h, rho * a.cos(), rho * a.sin()));
    }
    v.push(Vec3::new(-1.0, 0.0, 0.0));

    let mut t = Vec::with_capacity(20);
    for k in 0..5 {
        let (u0, u1) = (1 + k, 1 + (k + 1) % 5);
        let (l0, l1) = (6 + k, 6 + (k + 1) % 5);
        t.push([0, u0, u1]);
        t.push([u0, l0, u1]);
        t.push([u1, l0, l1]);
        t.push([11, l1, l0]);
    }
    // orient every face away from the origin (valid for a convex body around it)
    for tri in t.iter_mut() {
        let [a, b, c] = tri.map(|i| v[i]);
        if (b - a).cross(c - a).dot(a + b + c) < 0.0 {
            tri.swap(1, 2);
        }
    }
    (v, t)
}

/// Unit-sphere icosphere: `level` rounds of 4:1 midpoint subdivision, every
/// vertex projected to the unit sphere.
fn unit_icosphere(level: u32) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let (mut v, mut t) = icosahedron();
    for _ in 0..level {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut midpoint = |a: usize, b: usize, v: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                v.push(((v[a] + v[b]) * 0.5).normalized());
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * t.len());
        for &[a, b, c] in &t {
            let ab = midpoint(a, b, &mut v);
            let bc = midpoint(b, c, &mut v);
            let ca = midpoint(c, a, &mut v);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        t = next;
    }
    (v, t)
}

/// Icosphere of radius `R`: `20·4^level` panels, every vertex exactly at radius `R`
/// (up to the rounding of one normalization and one scaling).
pub fn make_sphere_mesh(radius: f64, level: u32) -> Result<TriMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(domain(format!(
            "sphere radius must be positive, got {radius}"
        )));
    }
    let (v, t) = unit_icosphere(level);
    let v = v.into_iter().map(|p| p * radius).collect();
    Ok(TriMesh::new(v, t)?.with_tags(Some(AnalyticSurface::Sphere { radius }), Some(level)))
}

/// The unit icosphere mapped by `(x, y, z) ↦ (a x, b y, c z)`.
pub fn make_ellipsoid_mesh(a: f64, b: f64, c: f64, level: u32) -> Result<TriMesh> {
    for (name, s) in [("a", a), ("b", b), ("c", c)] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain(format!(
                "semi-axis {name} must be positive, got {s}"
            )));
        }
    }
    let (v, t) = unit_icosphere(level);
    let v = v
        .into_iter()
        .map(|p| Vec3::new(a * p.x, b * p.y, c * p.z))
        .collect();
    Ok(TriMesh::new(v, t)?.with_tags(Some(AnalyticSurface::Ellipsoid { a, b, c }), Some(level)))
}

/// Star-shaped perturbation of the sphere, `r = R (1 + ε sin³θ sin 3φ)` with
/// polar axis `z`. The factor equals `(3x²y − y³)` on the unit sphere, so the
/// surface is smooth.
pub fn make_bumpy_sphere_mesh(radius: f64, amplitude: f64, level: u32) -> Result<TriMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(domain(format!("radius must be positive, got {radius}")));
    }
    if !(amplitude.abs() < 1.0) {
        return Err(domain(format!(
            "amplitude must lie in (-1, 1), got {amplitude}"
        )));
    }
    let (v, t) = unit_icosphere(level);
    let v = v
        .into_iter()
        .map(|p| p * (radius * (1.0 + amplitude * (3.0 * p.x * p.x * p.y - p.y.powi(3)))))
        .collect();
    let tag = AnalyticSurface::BumpySphere { radius, amplitude };
    Ok(TriMesh::new(v, t)?.with_tags(Some(tag), Some(level)))
}

/// Mean curvature of the bumpy sphere at the surface point on the ray
/// through `p`, from the level set `F = |x| − R − Rε g(x)/|x|³` with the
/// cubic `g = 3x²y − y³`: `H = (|∇F|² ΔF − ∇Fᵀ D²F ∇F) / (2|∇F|³)`.
pub fn bumpy_sphere_mean_curvature(radius: f64, amplitude: f64, p: Vec3) -> f64 {
    let d = p.normalized();
    let g_dir = 3.0 * d.x * d.x * d.y - d.y.powi(3);
    let x = d * (radius * (1.0 + amplitude * g_dir));
    let r = x.norm();
    let g = 3.0 * x.x * x.x * x.y - x.y.powi(3);
    let dg = [6.0 * x.x * x.y, 3.0 * (x.x * x.x - x.y * x.y), 0.0];
    let d2g = [
        [6.0 * x.y, 6.0 * x.x, 0.0],
        [6.0 * x.x, -6.0 * x.y, 0.0],
        [0.0; 3],
    ];
    let xs = x.to_array();
    let (r3, r5, r7) = (r.powi(3), r.powi(5), r.powi(7));
    let k = radius * amplitude;
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        let dphi = dg[i] / r3 - 3.0 * g * xs[i] / r5;
        grad[i] = xs[i] / r - k * dphi;
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let d2phi =
                d2g[i][j] / r3 - 3.0 * (dg[i] * xs[j] + xs[i] * dg[j]) / r5 - 3.0 * g * delta / r5
                    + 15.0 * g * xs[i] * xs[j] / r7;
            hess[i][j] = (delta - xs[i] * xs[j] / (r * r)) / r - k * d2phi;
        }
    }
    let n2: f64 = grad.iter().map(|v| v * v).sum();
    let lap = hess[0][0] + hess[1][1] + hess[2][2];
    let mut quad = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            quad += grad[i] * hess[i][j] * grad[j];
        }
    }
    (n2 * lap - quad) / (2.0 * n2 * n2.sqrt())
}

/// Mean curvature of `x²/a² + y²/b² + z²/c² = 1` at the surface point `p`,
/// positive with the outward normal:
/// `H = (|N|² Σ 1/a_k² − Σ p_k²/a_k⁶) / (2 |N|³)` with `N = (x/a², y/b², z/c²)`.
pub fn ellipsoid_mean_curvature(a: f64, b: f64, c: f64, p: Vec3) -> f64 {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let nrm = Vec3::new(p.x / a2, p.y / b2, p.z / c2);
    let n2 = nrm.norm_sq();
    let tr = 1.0 / a2 + 1.0 / b2 + 1.0 / c2;
    let quad = p.x * p.x / (a2 * a2 * a2) + p.y * p.y / (b2 * b2 * b2) + p.z * p.z / (c2 * c2 * c2);
    (n2 * tr - quad) / (2.0 * n2 * n2.sqrt())
}

/// Surface area of the prolate spheroid with polar semi-axis `a > b` and
/// equatorial semi-axis `b`: `2πb² + 2πab·asin(e)/e`, `e = √(1 − b²/a²)`.
pub fn prolate_spheroid_area(a: f64, b: f64) -> f64 {
    if a == b {
        return 4.0 * PI * a * a;
    }
    let e = (1.0 - b * b / (a * a)).sqrt();
    2.0 * PI * b * b + 2.0 * PI * a * b * e.asin() / e
}
