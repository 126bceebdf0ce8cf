//! Numerical laboratory for graphical translating solitons of mean curvature flow.
//!
//! A translator is a graph `z = u(x, y)` solving
//!
//! ```text
//! div( Du / sqrt(1 + |Du|^2) ) = 1 / sqrt(1 + |Du|^2)
//! ```
//!
//! The crate provides closed-form solution families, the rotational ODE
//! reduction, a Shortley–Weller finite-difference Dirichlet solver driven by
//! damped Newton and continuation, a Perron disk-lift process on strips and
//! truncated unbounded convex domains, and checks for the comparison
//! principle, a priori estimates, barriers and the flux identity.

pub mod analysis;
pub mod closed_form;
pub mod elliptic;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod io;
pub mod perron;
pub mod radial;

mod linalg;

pub use error::{Error, Result};
pub use geometry::{Domain, Grid, Point, ScalarField};
pub use linalg::set_worker_threads;
