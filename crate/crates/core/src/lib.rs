//! Numerical laboratory for lower bounds on programmable quantum measurements.
//!
//! The crate builds separated nets of pure states, simulates POVMs steered by
//! an ancilla program, evaluates the worst-case statistical distance between
//! measurements exactly at small dimension, and runs the net-size versus
//! ancilla-dimension argument as a checkable certificate on concrete devices.
//!
//! Layout:
//! - [`linalg`]: dense complex operators, tensor products, partial traces,
//!   Hermitian eigendecomposition and norms.
//! - [`metrics`]: the pure-state distance `D` and the POVM distance `dist`.
//! - [`packing`]: greedy sphere packings and nets of pure states.
//! - [`bounds`]: closed-form lower bounds on the ancilla dimension.
//! - [`device`]: programmable devices, program search and certificates.
//! - [`io`] and [`cli`]: file formats and the command-line front end.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod device;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod packing;
pub mod rng;
mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
