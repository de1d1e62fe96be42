use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::mesh::TriMesh;

/// Dihedral angles below this (radians) flag the mesh as creased.
const CREASE_ANGLE: f64 = 2.0 * PI / 3.0;

/// Outcome of [`TriMesh::validate`]. Report-only: nothing here fails.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub euler_characteristic: i64,
    /// Edges used by exactly one triangle.
    pub open_edges: Vec<(usize, usize)>,
    /// Edges used by three or more triangles.
    pub nonmanifold_edges: Vec<(usize, usize)>,
    /// Edges traversed twice in the same direction by their two triangles.
    pub misoriented_edges: Vec<(usize, usize)>,
    pub unreferenced_vertices: usize,
    pub min_area: f64,
    /// Smallest interior angle between adjacent panels (π for coplanar panels).
    pub min_dihedral_angle: f64,
    /// `Σ area · (centroid · normal)`; positive when normals point outward.
    pub position_flux: f64,
}

impl ValidationReport {
    pub fn is_closed(&self) -> bool {
        self.open_edges.is_empty() && self.nonmanifold_edges.is_empty()
    }

    pub fn is_consistently_oriented(&self) -> bool {
        self.misoriented_edges.is_empty()
    }

    pub fn is_outward(&self) -> bool {
        self.position_flux > 0.0
    }

    /// Sharp creases: the surface approximates a merely Lipschitz shape.
    pub fn has_creases(&self) -> bool {
        self.min_dihedral_angle < CREASE_ANGLE
    }

    pub fn is_valid(&self) -> bool {
        self.failures().is_empty()
    }

    /// Human-readable reasons, empty when every check passes.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.open_edges.is_empty() {
            out.push(format!(
                "open edge: {} boundary edge(s) {:?}",
                self.open_edges.len(),
                self.open_edges
            ));
        }
        if !self.nonmanifold_edges.is_empty() {
            out.push(format!("non-manifold edges {:?}", self.nonmanifold_edges));
        }
        if !self.misoriented_edges.is_empty() {
            out.push(format!(
                "orientation: {} edge(s) traversed twice in the same direction {:?}",
                self.misoriented_edges.len(),
                self.misoriented_edges
            ));
        }
        if self.unreferenced_vertices > 0 {
            out.push(format!(
                "{} unreferenced vertices",
                self.unreferenced_vertices
            ));
        }
        if self.euler_characteristic != 2 {
            out.push(format!(
                "Euler characteristic {} (expected 2 for a sphere-like surface)",
                self.euler_characteristic
            ));
        }
        if !(self.min_area > 0.0) {
            out.push(format!("minimum panel area {}", self.min_area));
        }
        if self.is_closed() && self.is_consistently_oriented() && !self.is_outward() {
            out.push("normals point inward".into());
        }
        out
    }
}

impl TriMesh {
    pub fn validate(&self) -> ValidationReport {
        // undirected edge -> (panel, directed?) incidences
        let mut edges: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (t, tri) in self.triangles().iter().enumerate() {
            for c in 0..3 {
                let (i, j) = (tri[c], tri[(c + 1) % 3]);
                edges
                    .entry((i.min(j), i.max(j)))
                    .or_default()
                    .push((t, i < j));
            }
        }
        let mut open_edges = Vec::new();
        let mut nonmanifold_edges = Vec::new();
        let mut misoriented_edges = Vec::new();
        let mut min_dihedral = PI;
        let normals = self.normals();
        let centroids = self.centroids();
        for (&e, inc) in &edges {
            match inc.len() {
                1 => open_edges.push(e),
                2 => {
                    let ((t0, d0), (t1, d1)) = (inc[0], inc[1]);
                    if d0 == d1 {
                        misoriented_edges.push(e);
                    }
                    // interior dihedral angle: π minus the angle between normals,
                    // reflex when the neighbour bends outward
                    let cosn = normals[t0].dot(normals[t1]).clamp(-1.0, 1.0);
                    let bend = cosn.acos();
                    let convex = (centroids[t1] - centroids[t0]).dot(normals[t0]) <= 0.0;
                    let angle = if convex { PI - bend } else { PI + bend };
                    min_dihedral = min_dihedral.min(angle);
                }
                _ => nonmanifold_edges.push(e),
            }
        }
        let unreferenced = self
            .vertex_count_per_triangle()
            .iter()
            .filter(|&&c| c == 0)
            .count();
        let v = self.vertices().len() as i64;
        let f = self.num_panels() as i64;
        let e = edges.len() as i64;
        ValidationReport {
            vertices: v as usize,
            triangles: f as usize,
            edges: e as usize,
            euler_characteristic: v - e + f,
            open_edges,
            nonmanifold_edges,
            misoriented_edges,
            unreferenced_vertices: unreferenced,
            min_area: self.areas().iter().copied().fold(f64::INFINITY, f64::min),
            min_dihedral_angle: min_dihedral,
            position_flux: self.position_flux(),
        }
    }
}
