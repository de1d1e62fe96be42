use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::oracles::RadialSolution;

/// Per-panel boundary data entering the functionals: `|Du|`, the mean
/// curvature `H` and the panel area (the surface-measure weight).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFields {
    gradient: Vec<f64>,
    mean_curvature: Vec<f64>,
    area: Vec<f64>,
}

impl BoundaryFields {
    pub fn new(gradient: Vec<f64>, mean_curvature: Vec<f64>, area: Vec<f64>) -> Result<Self> {
        if gradient.len() != mean_curvature.len() || gradient.len() != area.len() {
            return Err(domain(format!(
                "boundary field lengths differ: |Du| {}, H {}, area {}",
                gradient.len(),
                mean_curvature.len(),
                area.len()
            )));
        }
        if gradient
            .iter()
            .chain(&mean_curvature)
            .chain(&area)
            .any(|v| !v.is_finite())
        {
            return Err(domain("boundary fields contain non-finite values"));
        }
        Ok(BoundaryFields {
            gradient,
            mean_curvature,
            area,
        })
    }

    /// Exact fields of the ball `B_R ⊂ Rⁿ` as a single panel carrying the
    /// whole sphere: `|Du| = (n−2)/R`, `H = 1/R`, area `ω_n R^{n−1}`.
    pub fn for_ball(ball: &RadialSolution) -> Self {
        BoundaryFields {
            gradient: vec![ball.boundary_gradient()],
            mean_curvature: vec![ball.boundary_mean_curvature()],
            area: vec![ball.boundary_area()],
        }
    }

    pub fn len(&self) -> usize {
        self.area.len()
    }

    pub fn is_empty(&self) -> bool {
        self.area.is_empty()
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }

    pub fn mean_curvature(&self) -> &[f64] {
        &self.mean_curvature
    }

    pub fn area(&self) -> &[f64] {
        &self.area
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }

    /// Iterator over `(|Du|, H, area)` per panel.
    pub fn panels(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.gradient
            .iter()
            .zip(&self.mean_curvature)
            .zip(&self.area)
            .map(|((g, h), a)| (*g, *h, *a))
    }

    /// Scales lengths by `t`: `|Du|/t`, `H/t`, `t²·area`.
    pub fn scaled(&self, t: f64) -> Self {
        BoundaryFields {
            gradient: self.gradient.iter().map(|g| g / t).collect(),
            mean_curvature: self.mean_curvature.iter().map(|h| h / t).collect(),
            area: self.area.iter().map(|a| a * t * t).collect(),
        }
    }
}
