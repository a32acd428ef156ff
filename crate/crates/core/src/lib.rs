//! A desk-scale classical laboratory for the multidimensional (lattice-based)
//! quantum factoring procedure.
//!
//! The crate is split along the stages of the algorithm:
//!
//! - [`arith`]: modular arithmetic, prime utilities and the instrumented
//!   product-tree exponentiation schedule.
//! - [`intlat`]: integer lattices in Hermite normal form and the Smith
//!   decomposition used for exact quotient-group sampling.
//! - [`relattice`]: the relation lattice of a factoring instance, its
//!   `±1` sublattice and factor extraction.
//! - [`gauss`]: discrete Gaussian functions and the classical oracle for the
//!   output distribution of the quantum procedure.
//! - [`qsim`]: exact statevector simulation of the quantum procedure for tiny
//!   parameters.
//! - [`latred`]: exact LLL reduction, short-generator extraction and the
//!   extended lattice built from noisy dual samples.
//! - [`pipeline`]: the end-to-end factoring driver and the gate-cost model.
//! - [`suites`]: the randomized property suites shared by the CLI and the
//!   acceptance tests.

pub mod arith;
pub mod error;
pub mod gauss;
pub mod intlat;
pub mod latred;
pub mod pipeline;
pub mod qsim;
pub mod relattice;
pub mod rng;
pub mod suites;

pub use error::{Error, Result};
