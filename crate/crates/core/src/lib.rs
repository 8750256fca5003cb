//! Gaussian ensembles of real homogeneous polynomials on spheres, their
//! universal local limit, and the topology of their zero sets.
//!
//! The crate is `no_std` (with `alloc`). IO, the command line and parallel
//! executors live in the companion `nodal` crate.

#![no_std]

extern crate alloc;

pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod field;
pub mod func;
pub mod kernel;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod rkhs;
pub mod rng;
pub mod topology;

pub use error::{Error, Result};
