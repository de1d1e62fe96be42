//! Point queries against a mesh: inside/outside classification and distance.

use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::mesh::TriMesh;
use crate::vec3::Vec3;

impl TriMesh {
    /// Generalized winding number: ≈ 1 inside a closed outward-oriented
    /// surface, ≈ 0 outside. Sum of signed solid angles over `4π`.
    pub fn winding_number(&self, x: Vec3) -> f64 {
        let mut total = 0.0;
        for t in 0..self.num_panels() {
            let [a, b, c] = self.triangle_vertices(t).map(|p| p - x);
            let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
            let num = a.dot(b.cross(c));
            let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
            total += 2.0 * num.atan2(den);
        }
        total / (4.0 * PI)
    }

    /// Euclidean distance from `x` to the surface.
    pub fn distance_to(&self, x: Vec3) -> f64 {
        (0..self.num_panels())
            .map(|t| {
                let [a, b, c] = self.triangle_vertices(t);
                (closest_point_on_triangle(x, a, b, c) - x).norm_sq()
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }
}

/// Closest point to `p` on triangle `abc` (Voronoi-region classification).
pub(crate) fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
