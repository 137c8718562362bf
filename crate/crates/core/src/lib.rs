//! Quotient quantum graphs.
//!
//! A quantum graph is a metric graph with a (negative) second-derivative
//! operator and homogeneous vertex conditions `A_v f + B_v f' = 0`. Given a
//! finite group acting on such a graph and a complex matrix representation of
//! that group, this crate builds the quotient quantum graph whose spectrum
//! equals the representation-weighted subspectrum of the parent, solves the
//! resulting secular equations numerically, and constructs transplantation
//! maps between isospectral quotients.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! group  ──►  rep                 (finite groups, matrix representations)
//!   │          │
//!   ▼          ▼
//! graph  ──►  action  ──►  quotient  ──►  spectral  ──►  transplant
//! ```
//!
//! with [`catalog`] providing ready-made graphs, actions and representations
//! used by the test suite and the command line tool, and [`io`] the JSON/CSV
//! file formats.

pub mod action;
pub mod catalog;
pub mod error;
pub mod graph;
pub mod group;
pub mod io;
pub mod linalg;
pub mod quotient;
pub mod rep;
pub mod spectral;
pub mod transplant;

pub use error::{Error, Result};

/// Default tolerance for representation arithmetic (max-norm).
pub const TOL_REP: f64 = 1e-10;
/// Default relative rank / singular value threshold.
pub const TOL_RANK: f64 = 1e-10;
/// Default relative nullspace threshold used by the secular solver.
pub const TOL_NULL: f64 = 1e-9;
/// Default eigenvalue resolution in `k`; closer roots are merged.
pub const RESOLUTION: f64 = 1e-6;
