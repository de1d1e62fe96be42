use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::curvature::{self, MeanCurvature};
use super::shapes::{bumpy_sphere_mean_curvature, ellipsoid_mean_curvature};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Exact shape a mesh was sampled from, when known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticSurface {
    Sphere {
        radius: f64,
    },
    /// Axis-aligned, centered at the origin.
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `r = R (1 + ε (3x²y − y³))` on unit directions, centered at the origin.
    BumpySphere {
        radius: f64,
        amplitude: f64,
    },
}

impl AnalyticSurface {
    /// Exact mean curvature at the surface point obtained by scaling `p`
    /// along the ray from the center.
    pub fn mean_curvature_near(&self, p: Vec3) -> f64 {
        match *self {
            AnalyticSurface::Sphere { radius } => 1.0 / radius,
            AnalyticSurface::Ellipsoid { a, b, c } => {
                let s = (p.x * p.x / (a * a) + p.y * p.y / (b * b) + p.z * p.z / (c * c)).sqrt();
                ellipsoid_mean_curvature(a, b, c, p / s)
            }
            AnalyticSurface::BumpySphere { radius, amplitude } => {
                bumpy_sphere_mean_curvature(radius, amplitude, p)
            }
        }
    }

    fn scaled(&self, t: f64) -> AnalyticSurface {
        match *self {
            AnalyticSurface::Sphere { radius } => AnalyticSurface::Sphere { radius: radius * t },
            AnalyticSurface::Ellipsoid { a, b, c } => AnalyticSurface::Ellipsoid {
                a: a * t,
                b: b * t,
                c: c * t,
            },
            AnalyticSurface::BumpySphere { radius, amplitude } => AnalyticSurface::BumpySphere {
                radius: radius * t,
                amplitude,
            },
        }
    }
}

/// Triangulated surface with per-panel and per-vertex geometry cached at
/// construction. Immutable afterwards.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
    normals: Vec<Vec3>,
    centroids: Vec<Vec3>,
    mixed_areas: Vec<f64>,
    vertex_h: Vec<f64>,
    analytic: Option<AnalyticSurface>,
    level: Option<u32>,
}

impl TriMesh {
    /// Builds a mesh and its caches. Fails on out-of-range indices, repeated
    /// indices within a triangle, non-finite coordinates or zero-area panels.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices
            .iter()
            .any(|v| !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()))
        {
            return Err(Error::DegenerateMesh("non-finite vertex coordinate".into()));
        }
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(triangles.len());
        let mut normals = Vec::with_capacity(triangles.len());
        let mut centroids = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::DegenerateMesh(format!(
                    "triangle {t} references a vertex index >= {nv}"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateMesh(format!(
                    "triangle {t} repeats a vertex"
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let cr = (b - a).cross(c - a);
            let twice_area = cr.norm();
            if !(twice_area > 0.0) {
                return Err(Error::DegenerateMesh(format!("triangle {t} has zero area")));
            }
            areas.push(0.5 * twice_area);
            normals.push(cr / twice_area);
            centroids.push((a + b + c) / 3.0);
        }
        let (mixed_areas, vertex_h) =
            curvature::vertex_mean_curvature(&vertices, &triangles, &normals, &areas);
        Ok(TriMesh {
            vertices,
            triangles,
            areas,
            normals,
            centroids,
            mixed_areas,
            vertex_h,
            analytic: None,
            level: None,
        })
    }

    pub(crate) fn with_tags(
        mut self,
        analytic: Option<AnalyticSurface>,
        level: Option<u32>,
    ) -> Self {
        self.analytic = analytic;
        self.level = level;
        self
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_panels(&self) -> usize {
        self.triangles.len()
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    /// Unit normals, oriented by the right-hand rule on the vertex order.
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn centroids(&self) -> &[Vec3] {
        &self.centroids
    }

    /// Mixed Voronoi area per vertex.
    pub fn mixed_areas(&self) -> &[f64] {
        &self.mixed_areas
    }

    pub fn analytic(&self) -> Option<AnalyticSurface> {
        self.analytic
    }

    /// Subdivision level of generated meshes; `None` for imported meshes.
    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    /// Longest edge of panel `t`.
    pub fn panel_diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        (b - a).norm().max((c - b).norm()).max((a - c).norm())
    }

    pub fn max_panel_diameter(&self) -> f64 {
        (0..self.num_panels())
            .map(|t| self.panel_diameter(t))
            .fold(0.0, f64::max)
    }

    /// Area-weighted centroid of the surface.
    pub fn center(&self) -> Vec3 {
        let total = self.total_area();
        self.centroids
            .iter()
            .zip(&self.areas)
            .fold(Vec3::ZERO, |acc, (c, a)| acc + *c * (*a / total))
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d2 = d2.max((*a - *b).norm_sq());
            }
        }
        d2.sqrt()
    }

    /// `Σ area · (centroid · normal) = 3 · enclosed volume`, positive for outward normals.
    pub fn position_flux(&self) -> f64 {
        self.centroids
            .iter()
            .zip(&self.normals)
            .zip(&self.areas)
            .map(|((c, n), a)| a * c.dot(*n))
            .sum()
    }

    /// `Σ area · normal`, which vanishes on a closed surface.
    pub fn vector_area(&self) -> Vec3 {
        self.normals
            .iter()
            .zip(&self.areas)
            .fold(Vec3::ZERO, |acc, (n, a)| acc + *n * *a)
    }

    /// Discrete mean curvature (cotangent formula, mixed Voronoi areas), with
    /// the sign convention `H = +1/R` on an outward-oriented sphere.
    pub fn mean_curvature(&self) -> Result<MeanCurvature> {
        if let Some(v) = self.mixed_areas.iter().position(|a| !(*a > 0.0)) {
            return Err(Error::DegenerateMesh(format!(
                "vertex {v} has zero mixed area"
            )));
        }
        let per_panel = self
            .triangles
            .iter()
            .map(|t| (self.vertex_h[t[0]] + self.vertex_h[t[1]] + self.vertex_h[t[2]]) / 3.0)
            .collect();
        Ok(MeanCurvature {
            per_vertex: self.vertex_h.clone(),
            per_panel,
        })
    }

    /// Per-panel mean curvature used by the functionals: exact values at the
    /// projected centroids for analytic meshes, vertex averages otherwise.
    pub fn panel_mean_curvature(&self) -> Result<Vec<f64>> {
        match self.analytic {
            Some(s) => Ok(self
                .centroids
                .iter()
                .map(|c| s.mean_curvature_near(*c))
                .collect()),
            None => Ok(self.mean_curvature()?.per_panel),
        }
    }

    /// Uniform scaling about the origin. Analytic tags are scaled along.
    pub fn scaled(&self, t: f64) -> Result<TriMesh> {
        let m = TriMesh::new(
            self.vertices.iter().map(|v| *v * t).collect(),
            self.triangles.clone(),
        )?;
        Ok(m.with_tags(self.analytic.map(|s| s.scaled(t)), self.level))
    }

    /// `x ↦ R x + shift` for a rotation `R` (rows). Drops the analytic tag.
    pub fn rigidly_moved(&self, rotation: [[f64; 3]; 3], shift: Vec3) -> Result<TriMesh> {
        let vs = self
            .vertices
            .iter()
            .map(|v| {
                let r = |row: [f64; 3]| row[0] * v.x + row[1] * v.y + row[2] * v.z;
                Vec3::new(r(rotation[0]), r(rotation[1]), r(rotation[2])) + shift
            })
            .collect();
        Ok(TriMesh::new(vs, self.triangles.clone())?.with_tags(None, self.level))
    }

    /// A copy without the triangle `t` (for constructing defects).
    pub fn without_triangle(&self, t: usize) -> Result<TriMesh> {
        let mut tris = self.triangles.clone();
        tris.remove(t);
        TriMesh::new(self.vertices.clone(), tris)
    }

    /// A copy with the orientation of triangle `t` reversed.
    pub fn with_flipped_triangle(&self, t: usize) -> Result<TriMesh> {
        let mut tris = self.triangles.clone();
        tris[t].swap(1, 2);
        TriMesh::new(self.vertices.clone(), tris)
    }

    pub(crate) fn vertex_count_per_triangle(&self) -> Vec<usize> {
        let mut count = vec![0; self.vertices.len()];
        for t in &self.triangles {
            for &i in t {
                count[i] += 1;
            }
        }
        count
    }
}
