//! Numerical laboratory for weighted multilinear Hardy-Cesaro and Hausdorff
//! operators: sharp norm constants, singular quadrature, weighted Lebesgue
//! and central Morrey norms, and extremal-witness checks.
//!
//! The modules build on each other bottom-up:
//! [`expr`] -> [`quad`] -> [`weights`] -> [`kernels`] -> [`constants`],
//! [`spaces`], [`operators`] -> [`harness`] -> [`cli`].

pub mod cli;
pub mod constants;
pub mod error;
pub mod expr;
pub mod harness;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
