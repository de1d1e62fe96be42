use alloc::vec::Vec;

use crate::linalg::SymmetricMatrix;

/// Value, gradient and Hessian of a scalar field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymmetricMatrix,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn gradient_norm_sq(&self) -> f64 {
        self.gradient.iter().map(|g| g * g).sum()
    }
}
