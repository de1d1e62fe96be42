//! Closed oriented triangulated surfaces in R³: construction, validation,
//! discrete mean curvature and the per-panel boundary fields fed to the
//! functionals.

mod curvature;
mod fields;
mod mesh;
mod off;
mod query;
mod shapes;
mod validate;

pub use curvature::MeanCurvature;
pub use fields::BoundaryFields;
pub use mesh::{AnalyticSurface, TriMesh};
pub use off::{format_off, parse_off};
pub use shapes::{
    bumpy_sphere_mean_curvature, ellipsoid_mean_curvature, make_bumpy_sphere_mesh,
    make_ellipsoid_mesh, make_sphere_mesh, prolate_spheroid_area,
};
pub use validate::ValidationReport;
