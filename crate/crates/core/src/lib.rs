//! Numerical potential theory for the exterior capacitary problem.
//!
//! The crate computes the capacitary potential of a bounded domain, its
//! electrostatic capacity, and the boundary mean-curvature functionals whose
//! sign characterizes balls. Everything here is pure computation on
//! in-memory values: no file access, no threads, no global state. With the
//! default `std` feature disabled the crate is `no_std` and needs only
//! `alloc`; float math then comes from `libm`.
//!
//! Module map:
//!
//! - [`oracles`]: closed-form radial potentials, ball and ellipsoid capacities.
//! - [`symfun`]: elementary symmetric functions, the `S²` tensor and Newton's inequality.
//! - [`geometry`]: closed triangulated surfaces, validation and discrete mean curvature.
//! - [`bem`]: single-layer boundary-element solver for the exterior Dirichlet problem in R³.
//! - [`functionals`]: boundary functionals, the `v = u^{-2/(n-2)}` transform and symmetry diagnostics.
//! - [`identity_lab`]: finite-difference verification of the divergence identities.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bem;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod identity_lab;
mod jet;
pub mod linalg;
pub mod oracles;
pub mod quadrature;
pub mod symfun;
mod vec3;

pub use error::{Error, Result};
pub use jet::Jet;
pub use linalg::SymmetricMatrix;
pub use vec3::Vec3;
