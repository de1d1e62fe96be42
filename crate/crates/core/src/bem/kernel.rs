//! Panel integrals of the Laplace kernel `G(x, y) = 1/(4π|x − y|)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::quadrature::BaryPoint;
use crate::vec3::Vec3;

pub(crate) const INV_4PI: f64 = 0.25 / PI;

/// `∫_T 1/|c − y| dA(y)` for a point `c` in the plane of the triangle,
/// by splitting `T` into the three triangles `(c, v_a, v_b)`. Each contributes
/// `h (asinh(s_b/h) − asinh(s_a/h))` with `h` the signed distance from `c` to
/// the edge line and `s_a, s_b` the edge endpoints measured from the foot of
/// the perpendicular.
pub fn coplanar_inverse_distance_integral(c: Vec3, tri: [Vec3; 3]) -> f64 {
    let n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
    let mut total = 0.0;
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let len = (b - a).norm();
        let e = (b - a) / len;
        let h = (c - a).dot(n.cross(e));
        if h.abs() <= 1e-14 * len {
            continue;
        }
        let sa = -(c - a).dot(e);
        let sb = sa + len;
        total += h * ((sb / h).asinh() - (sa / h).asinh());
    }
    total
}

/// Quadrature nodes `(y, weight)` for panel `tri` as seen from `x`: the
/// base rule on the whole panel, or on its 4:1 children (recursively, up to
/// `depth` levels) while `x` is closer than `near_factor` child diameters.
pub(crate) fn panel_nodes(
    x: Vec3,
    tri: [Vec3; 3],
    area: f64,
    rule: &[BaryPoint],
    near_factor: f64,
    depth: u32,
    out: &mut Vec<(Vec3, f64)>,
) {
    let diam = (tri[1] - tri[0])
        .norm()
        .max((tri[2] - tri[1]).norm())
        .max((tri[0] - tri[2]).norm());
    let centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
    if depth == 0 || (x - centroid).norm() >= near_factor * diam {
        for &(l1, l2, l3, w) in rule {
            out.push((tri[0] * l1 + tri[1] * l2 + tri[2] * l3, w * area));
        }
        return;
    }
    let [a, b, c] = tri;
    let (ab, bc, ca) = ((a + b) * 0.5, (b + c) * 0.5, (c + a) * 0.5);
    let quarter = 0.25 * area;
    for child in [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]] {
        panel_nodes(x, child, quarter, rule, near_factor, depth - 1, out);
    }
}

/// `G`, `∇ₓG` and the six independent entries of `∇ₓ²G` (xx, xy, xz, yy, yz, zz),
/// accumulated with weight `w`.
#[inline]
pub(crate) fn accumulate_jet(x: Vec3, y: Vec3, w: f64, acc: &mut [f64; 10]) {
    let d = x - y;
    let r2 = d.norm_sq();
    let inv_r = 1.0 / r2.sqrt();
    let inv_r3 = inv_r / r2;
    let inv_r5 = inv_r3 / r2;
    let g = w * INV_4PI;
    acc[0] += g * inv_r;
    acc[1] -= g * d.x * inv_r3;
    acc[2] -= g * d.y * inv_r3;
    acc[3] -= g * d.z * inv_r3;
    acc[4] += g * (3.0 * d.x * d.x * inv_r5 - inv_r3);
    acc[5] += g * (3.0 * d.x * d.y * inv_r5);
    acc[6] += g * (3.0 * d.x * d.z * inv_r5);
    acc[7] += g * (3.0 * d.y * d.y * inv_r5 - inv_r3);
    acc[8] += g * (3.0 * d.y * d.z * inv_r5);
    acc[9] += g * (3.0 * d.z * d.z * inv_r5 - inv_r3);
}
