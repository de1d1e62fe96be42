//! Small dense linear algebra: symmetric matrices for Hessians, and the dense
//! row-major systems produced by the boundary-element discretization.

mod dense;
mod gmres;
mod jacobi;
mod symmetric;

pub use dense::{DenseMatrix, LuFactorization};
pub use gmres::{gmres, GmresOptions, GmresOutcome};
pub use jacobi::symmetric_eigenvalues;
pub use symmetric::SymmetricMatrix;
