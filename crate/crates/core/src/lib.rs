//! Robust low-rank plus sparse matrix recovery.
//!
//! [`solver::decompose`] splits an observation `Y` into a low-rank `X` and a
//! sparse `E`, choosing low-rank atoms by how many bits they cost to encode
//! against how much of `Y` they explain. [`baselines::rpca_ialm`] is the
//! convex nuclear-norm plus l1 baseline.

pub mod atoms;
pub mod baselines;
pub mod bench;
pub mod codelength;
pub mod error;
pub mod imaging;
pub mod io;
pub mod mask;
pub mod matrix;
pub mod rng;
pub mod solver;
pub mod svd;

pub use error::{Error, Result};
pub use mask::BinaryMask;
pub use matrix::{nrmse, DenseMatrix};
pub use solver::{decompose, DecompositionResult, Mu1Rule, SolverConfig, Status};
pub use svd::{top_svd, SvdFactors};
