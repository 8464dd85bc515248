//! Rost reversed-barrier boundaries for the Skorokhod embedding.
//!
//! Given a starting law `nu` and a target law `mu`, the boundaries `s_+` and
//! `s_-` of the reversed barrier are computed by a backward recursion on a
//! uniform time grid that solves a pair of nonlinear Volterra integral
//! equations. The result can be checked against an optimal-stopping lattice
//! and by Monte Carlo simulation of the embedding stopping time.

pub mod kernel;
pub mod measures;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod value;
pub mod verify;

pub use measures::{Measure, MeasureError, MeasureSpec};
pub use par::Execution;
