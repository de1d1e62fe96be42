//! Single-layer boundary-element solver for the exterior Dirichlet problem
//! `Δu = 0` outside a closed surface, `u = 1` on it, `u → 0` at infinity.
//!
//! The potential is represented as `u(x) = ∫ σ(y) / (4π|x − y|) dA(y)` with a
//! piecewise-constant density collocated at panel centroids. The discrete
//! first-kind system `S σ = 1` is solved densely. On the surface the layer
//! jump gives `∂u/∂ν = −σ` (interior potential is constant), so `|Du| = σ`,
//! and the capacity is the total charge `Σ σ_j · area_j`.

mod kernel;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use kernel::coplanar_inverse_distance_integral;
use kernel::{accumulate_jet, panel_nodes, INV_4PI};

use crate::error::{domain, Error, Result};
use crate::geometry::{make_sphere_mesh, TriMesh};
use crate::jet::Jet;
use crate::linalg::{gmres, DenseMatrix, GmresOptions, LuFactorization, SymmetricMatrix};
use crate::quadrature::triangle_rule;
use crate::vec3::Vec3;

/// Discretization and solver settings.
#[derive(Debug, Clone, Copy)]
pub struct BemOptions {
    /// Points per panel of the base triangle rule: 1, 3, 6 or 12.
    pub quad_order: usize,
    /// A panel is near a point closer than this many panel diameters.
    pub near_factor: f64,
    /// Levels of 4:1 subdivision applied to near panels.
    pub near_depth: u32,
    /// Above this many panels the system is solved by GMRES instead of LU.
    pub direct_max_panels: usize,

    /// Solves with a larger condition estimate are refused.
    pub max_condition: f64,
    pub gmres: GmresOptions,
}

impl Default for BemOptions {
    fn default() -> Self {
        BemOptions {
            quad_order: 6,
            near_factor: 2.0,
            near_depth: 1,
            direct_max_panels: 6000,
            max_condition: 1e12,
            gmres: GmresOptions::default(),
        }
    }
}

impl BemOptions {
    pub fn with_quad_order(quad_order: usize) -> Self {
        BemOptions {
            quad_order,
            ..BemOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveMethod {
    /// Dense LU with partial pivoting.
    DirectLu,
    /// Restarted GMRES on the stored dense matrix.
    Gmres { iterations: usize },
}

/// Solver metadata carried by an [`EquilibriumSolution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverInfo {
    pub quad_order: usize,
    pub method: SolveMethod,
    /// `‖S σ − 1‖_∞`.
    pub residual_inf: f64,
    /// 1-norm condition estimate (Hager) for LU; Krylov estimate for GMRES.
    pub condition_estimate: f64,
    /// Whether every panel density is positive.
    pub positive: bool,
    pub min_sigma: f64,
    pub max_sigma: f64,
    /// The mesh has sharp creases; `σ` is then singular and convergence
    /// properties of smooth surfaces are not expected.
    pub creased: bool,
}

/// Capacity from the total charge, the far-field decay and the Dirichlet energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimates {
    pub charge: f64,
    pub asymptotic: f64,
    pub energy: f64,
}

impl CapacityEstimates {
    /// Largest pairwise relative difference.
    pub fn spread(&self) -> f64 {
        let v = [self.charge, self.asymptotic, self.energy];
        let mut s: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                s = s.max((v[i] - v[j]).abs() / v[i].abs().min(v[j].abs()));
            }
        }
        s
    }
}

/// The solved equilibrium density on a mesh. Immutable.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution<'m> {
    mesh: &'m TriMesh,
    sigma: Vec<f64>,
    capacity: f64,
    info: SolverInfo,
    options: BemOptions,
}

/// Collocation matrix `S_ij = ∫_{T_j} G(c_i, y) dA(y)` at panel centroids `c_i`.
///
/// Diagonal entries use the exact in-plane integral; panels closer than
/// `near_factor` diameters to the collocation point are subdivided.
pub fn assemble_single_layer(mesh: &TriMesh, quad_order: usize) -> Result<DenseMatrix> {
    assemble_with(mesh, &BemOptions::with_quad_order(quad_order))
}

pub fn assemble_with(mesh: &TriMesh, opts: &BemOptions) -> Result<DenseMatrix> {
    let rule = triangle_rule(opts.quad_order)?;
    let n = mesh.num_panels();
    if n == 0 {
        return Err(Error::DegenerateMesh("mesh has no panels".into()));
    }
    let tris: Vec<[Vec3; 3]> = (0..n).map(|t| mesh.triangle_vertices(t)).collect();
    let diam: Vec<f64> = (0..n).map(|t| mesh.panel_diameter(t)).collect();
    let centroids = mesh.centroids();
    let areas = mesh.areas();

    // far-field nodes of every panel, laid out contiguously
    let stride = rule.len();
    let mut far_nodes = Vec::with_capacity(n * stride);
    for (t, tri) in tris.iter().enumerate() {
        for &(l1, l2, l3, w) in rule {
            let y = tri[0] * l1 + tri[1] * l2 + tri[2] * l3;
            far_nodes.push((y, w * areas[t] * INV_4PI));
        }
    }

    let mut m = DenseMatrix::zeros(n);
    let mut buf = Vec::new();
    for i in 0..n {
        let c = centroids[i];
        let row = m.row_mut(i);
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = if j == i {
                INV_4PI * coplanar_inverse_distance_integral(c, tris[j])
            } else if (c - centroids[j]).norm() < opts.near_factor * diam[j] {
                buf.clear();
                panel_nodes(
                    c,
                    tris[j],
                    areas[j],
                    rule,
                    opts.near_factor,
                    opts.near_depth,
                    &mut buf,
                );
                INV_4PI * buf.iter().map(|(y, w)| w / (c - *y).norm()).sum::<f64>()
            } else {
                far_nodes[j * stride..(j + 1) * stride]
                    .iter()
                    .map(|(y, w)| w / (c - *y).norm())
                    .sum()
            };
        }
    }
    Ok(m)
}

/// Solves `S σ = 1` with default options at the given quadrature order.
pub fn solve_equilibrium(mesh: &TriMesh, quad_order: usize) -> Result<EquilibriumSolution<'_>> {
    solve_equilibrium_with(mesh, &BemOptions::with_quad_order(quad_order))
}

pub fn solve_equilibrium_with<'m>(
    mesh: &'m TriMesh,
    opts: &BemOptions,
) -> Result<EquilibriumSolution<'m>> {
    let matrix = assemble_with(mesh, opts)?;
    let n = matrix.dim();
    let ones = vec![1.0; n];

    let (sigma, method, condition, residual_inf) = if n <= opts.direct_max_panels {
        let copy = matrix.clone();
        let lu = LuFactorization::factor(matrix)?;
        let condition = lu.condition_estimate();
        if !(condition <= opts.max_condition) {
            return Err(Error::IllConditioned { condition });
        }
        let sigma = lu.solve(&ones);
        let residual = residual_inf(&copy, &sigma);
        (sigma, SolveMethod::DirectLu, condition, residual)
    } else {
        let out = gmres(n, |x, y| matrix.mul_vec_into(x, y), &ones, opts.gmres)?;
        if !(out.condition_estimate <= opts.max_condition) {
            return Err(Error::IllConditioned {
                condition: out.condition_estimate,
            });
        }
        let residual = residual_inf(&matrix, &out.solution);
        (
            out.solution,
            SolveMethod::Gmres {
                iterations: out.iterations,
            },
            out.condition_estimate,
            residual,
        )
    };

    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let capacity = sigma.iter().zip(mesh.areas()).map(|(s, a)| s * a).sum();
    let min_sigma = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    let max_sigma = sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let info = SolverInfo {
        quad_order: opts.quad_order,
        method,
        residual_inf,
        condition_estimate: condition,
        positive: min_sigma > 0.0,
        min_sigma,
        max_sigma,
        creased: mesh.validate().has_creases(),
    };
    Ok(EquilibriumSolution {
        mesh,
        sigma,
        capacity,
        info,
        options: *opts,
    })
}

fn residual_inf(m: &DenseMatrix, sigma: &[f64]) -> f64 {
    m.mul_vec(sigma)
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max)
}

impl<'m> EquilibriumSolution<'m> {
    pub fn mesh(&self) -> &'m TriMesh {
        self.mesh
    }

    /// Per-panel density.
    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `Σ σ_j · area_j`.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn info(&self) -> &SolverInfo {
        &self.info
    }

    pub fn options(&self) -> &BemOptions {
        &self.options
    }

    /// `|Du|` per panel: the density, by the layer-jump relation.
    pub fn boundary_gradient(&self) -> Vec<f64> {
        self.sigma.clone()
    }

    /// Distance from `x` to the surface in units of the largest panel
    /// diameter. Evaluations below 1 are less accurate.
    pub fn near_surface_ratio(&self, x: Vec3) -> f64 {
        self.mesh.distance_to(x) / self.mesh.max_panel_diameter()
    }

    fn check_exterior(&self, x: Vec3) -> Result<()> {
        let scale = self.mesh.max_panel_diameter();
        let d = self.mesh.distance_to(x);
        if d <= 1e-9 * scale {
            return Err(Error::OutsideDomain(format!("{x:?} lies on the surface")));
        }
        if self.mesh.winding_number(x) > 0.5 {
            return Err(Error::OutsideDomain(format!(
                "{x:?} lies inside the surface"
            )));
        }
        Ok(())
    }

    fn raw_jet(&self, x: Vec3) -> Result<[f64; 10]> {
        self.check_exterior(x)?;
        let rule = triangle_rule(self.options.quad_order)?;
        let mut acc = [0.0; 10];
        let mut buf = Vec::new();
        for (t, s) in self.sigma.iter().enumerate() {
            buf.clear();
            panel_nodes(
                x,
                self.mesh.triangle_vertices(t),
                self.mesh.areas()[t],
                rule,
                self.options.near_factor,
                self.options.near_depth + 2,
                &mut buf,
            );
            for (y, w) in &buf {
                accumulate_jet(x, *y, w * s, &mut acc);
            }
        }
        Ok(acc)
    }

    /// `u(x)`, `Du(x)` and `D²u(x)` by differentiating the kernel under the integral.
    pub fn eval_jet(&self, x: Vec3) -> Result<Jet> {
        let a = self.raw_jet(x)?;
        let hessian = SymmetricMatrix::from_row_major(
            3,
            &[a[4], a[5], a[6], a[5], a[7], a[8], a[6], a[8], a[9]],
        )?;
        Ok(Jet {
            value: a[0],
            gradient: vec![a[1], a[2], a[3]],
            hessian,
        })
    }

    pub fn eval_potential(&self, x: Vec3) -> Result<f64> {
        Ok(self.raw_jet(x)?[0])
    }

    pub fn eval_gradient(&self, x: Vec3) -> Result<Vec3> {
        let a = self.raw_jet(x)?;
        Ok(Vec3::new(a[1], a[2], a[3]))
    }

    pub fn eval_hessian(&self, x: Vec3) -> Result<SymmetricMatrix> {
        Ok(self.eval_jet(x)?.hessian)
    }

    /// Capacity three ways: total charge; `4π · mean(u · |x − x₀|)` over a
    /// sphere of radius `far_radius` about the surface centroid `x₀`; and the
    /// energy `∫ u ∂u/∂ν dA`, which with `u = 1` on the surface is again
    /// `Σ σ · area`.
    pub fn capacity_three_ways(&self, far_radius: f64) -> Result<CapacityEstimates> {
        let diameter = self.mesh.diameter();
        if !(far_radius >= 10.0 * diameter) {
            return Err(domain(format!(
                "far radius {far_radius} must be at least 10 mesh diameters ({})",
                10.0 * diameter
            )));
        }
        let center = self.mesh.center();
        let (dirs, weights) = unit_sphere_nodes(3)?;
        let mut asymptotic = 0.0;
        for (d, w) in dirs.iter().zip(&weights) {
            let u = self.eval_potential(center + *d * far_radius)?;
            asymptotic += w * u * far_radius;
        }
        let energy = self
            .sigma
            .iter()
            .zip(self.mesh.areas())
            .map(|(s, a)| 1.0 * s * a)
            .sum();
        Ok(CapacityEstimates {
            charge: self.capacity,
            asymptotic,
            energy,
        })
    }
}

/// Quadrature on the unit sphere: centroids of an icosphere projected
/// outward, weighted by flat panel area rescaled to total `4π`.
pub fn unit_sphere_nodes(level: u32) -> Result<(Vec<Vec3>, Vec<f64>)> {
    let m = make_sphere_mesh(1.0, level)?;
    let total = m.total_area();
    let dirs = m.centroids().iter().map(|c| c.normalized()).collect();
    let weights = m.areas().iter().map(|a| a / total * 4.0 * PI).collect();
    Ok((dirs, weights))
}
