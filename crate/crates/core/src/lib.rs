//! Simulation and verification of central measures on continuous graded
//! graphs of Gelfand-Tsetlin type.
//!
//! The crate builds the same measures by independent routes and checks
//! that they agree:
//!
//! * [`simplex`]: uniform points of the ordered simplex, the cube transport
//!   map and the closed-form increment marginal.
//! * [`cesaro`]: exponential random walks (Cesàro measures) and their
//!   products.
//! * [`restriction`]: rejection of product Cesàro paths onto the
//!   Gelfand-Tsetlin and Young-jumps cones.
//! * [`wishart`]: spectral paths of nested minors of rank-d Wishart
//!   matrices through a d×d Gram reduction.
//! * [`discrete_young`]: Bernoulli walks on the Pascal graph restricted to
//!   the Weyl chamber, checked against Schur functions.
//! * [`stats`] and [`verify`]: the statistics and the acceptance suites.
//!
//! Level convention: the vertex at level `n` of a sampled path carries
//! exactly `n` increments (or `n` Gaussian rows for Wishart paths), so
//! `x(n) / n` is an unbiased frequency estimate.

pub mod batch;
pub mod cesaro;
pub mod discrete_young;
pub mod error;
pub mod graph;
pub mod restriction;
pub mod rng;
pub mod simplex;
pub mod stats;
pub mod verify;
pub mod wishart;

pub use error::{Error, Result};
pub use graph::{ConeKind, FrequencyVector, PathWindow, Vertex};
pub use rng::RandomStream;
pub use stats::SampleReport;
