#![no_std]
extern crate alloc;

pub mod adaptivity;
pub mod cholesky;
pub mod error;
pub mod estimator;
pub mod goal;
pub mod lagrange;
pub mod math;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod theory;

pub use error::{Error, Result};
