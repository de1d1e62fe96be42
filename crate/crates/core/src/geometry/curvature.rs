use alloc::vec;
use alloc::vec::Vec;

use crate::vec3::Vec3;

/// Discrete mean curvature per vertex and per panel (vertex average).
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurvature {
    pub per_vertex: Vec<f64>,
    pub per_panel: Vec<f64>,
}

fn cot(u: Vec3, v: Vec3) -> f64 {
    u.dot(v) / u.cross(v).norm()
}

/// Mixed Voronoi areas and signed mean curvature `H = (K · n) / 2` where
/// `K = (1/2A) Σ_j (cot α_ij + cot β_ij)(x_i − x_j)` is the mean-curvature
/// normal and `n` the area-weighted vertex normal. Vertices without incident
/// panels get zero area and `NaN` curvature.
pub(crate) fn vertex_mean_curvature(
    vertices: &[Vec3],
    triangles: &[[usize; 3]],
    normals: &[Vec3],
    areas: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let nv = vertices.len();
    let mut mixed = vec![0.0; nv];
    let mut k = vec![Vec3::ZERO; nv];
    let mut vnormal = vec![Vec3::ZERO; nv];

    for (t, tri) in triangles.iter().enumerate() {
        let p = tri.map(|i| vertices[i]);
        let area = areas[t];
        // cot of the angle at corner c, for c = 0, 1, 2
        let cots: [f64; 3] = core::array::from_fn(|c| {
            let a = p[c];
            cot(p[(c + 1) % 3] - a, p[(c + 2) % 3] - a)
        });
        let obtuse = (0..3).find(|&c| {
            let a = p[c];
            (p[(c + 1) % 3] - a).dot(p[(c + 2) % 3] - a) < 0.0
        });
        for c in 0..3 {
            let (i, j, l) = (tri[c], tri[(c + 1) % 3], tri[(c + 2) % 3]);
            // edge (j, l) is opposite corner c
            let w = cots[c];
            k[j] += (vertices[j] - vertices[l]) * w;
            k[l] += (vertices[l] - vertices[j]) * w;
            vnormal[i] += normals[t] * area;

            mixed[i] += match obtuse {
                None => {
                    let eij = (vertices[j] - vertices[i]).norm_sq();
                    let eil = (vertices[l] - vertices[i]).norm_sq();
                    // edge (i, j) is opposite corner (c + 2), edge (i, l) opposite (c + 1)
                    (eij * cots[(c + 2) % 3] + eil * cots[(c + 1) % 3]) / 8.0
                }
                Some(o) if o == c => area / 2.0,
                Some(_) => area / 4.0,
            };
        }
    }
    let h = (0..nv)
        .map(|i| {
            if mixed[i] > 0.0 {
                let n = vnormal[i].normalized();
                k[i].dot(n) / (4.0 * mixed[i])
            } else {
                f64::NAN
            }
        })
        .collect();
    (mixed, h)
}
