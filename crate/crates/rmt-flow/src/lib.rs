//! Simulation and verification toolkit for Gaussian random-matrix processes,
//! their eigenvalue diffusions and the associated closed-form densities.

pub mod ensembles;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod matproc;
pub mod kernels;
pub mod quad;
pub mod rng;
pub mod schur;
pub mod sde;
pub mod specfun;
pub mod stats;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
