//! Solver-and-inversion toolkit for the variable-exponent sub-diffusion
//! equation on the unit square: the perturbation-transformed forward model,
//! the time-reversed adjoint model, a spectral verification oracle, and two
//! regularized source-reconstruction algorithms driven from JSON experiment
//! configs.

pub mod config;
pub mod error;
pub mod grid;
pub mod inversion;
pub mod io;
pub mod kernel;
pub mod oracle;
pub mod runner;
pub mod specfun;
pub mod timestep;

pub use error::{Error, Result};
