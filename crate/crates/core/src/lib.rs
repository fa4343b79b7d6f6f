//! Numerical laboratory for the semilinear heat equation `u_t = Δu + f(u)` with
//! singular initial data.
//!
//! The crate is split into the nonlinearity calculus (`F`, `F⁻¹`, the exponents
//! `q` and `p`), a regime classifier, builders for singular radial data and
//! heat-semigroup experiments (Picard iteration, supersolution checks and the
//! blow-up functional).

pub mod classifier;
pub mod error;
pub mod heat_solver;
pub mod initial_data;
pub mod nonlinearity;
pub mod numerics;

pub use error::{Error, Result};
