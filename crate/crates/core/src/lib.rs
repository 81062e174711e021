//! Mean-field bosons with attractive contact interaction on a ring threaded
//! by an Aharonov-Bohm flux.
//!
//! The crate provides closed-form states (the half-flux `cn` ground state,
//! plane-wave branches, the rigidly rotating lump), a pseudospectral solver
//! for the nonlinear Schrödinger equation on the ring, and scripted
//! experiments that compare the branches and persist their results.

pub mod analytic;
pub mod cli;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod harness;
pub mod roots;
pub mod solver;

pub use analytic::{HalfFluxAnalytic, RingProblem};
pub use elliptic::EllipticModulus;
pub use error::{Error, Result};
pub use field::{Frame, RingGrid, WaveField};
pub use solver::{SolverConfig, StationaryState};
