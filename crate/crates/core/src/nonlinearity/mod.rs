//! Evaluation of `f`, `f'`, the tail `F(u) = ∫_u^∞ dτ/f(τ)`, its inverse, and
//! the exponents `q` and `p`.

pub mod exponents;
pub mod spec;
pub mod tail;

pub use exponents::{
    check_fprime_tail_bound, exponent_profile, karamata_profile, BoundCheck, DiagnosticRow, ExponentProfile,
    KaramataProfile, DEFAULT_WINDOW,
};
pub use spec::NonlinearitySpec;
pub use tail::{eval_tail, eval_tail_inverse, f_prime_tail, ln_tail, scaled_tail, tail_at_zero, TailTable};

use crate::error::Result;

/// `f(u)`.
pub fn eval_f(spec: &NonlinearitySpec, u: f64) -> Result<f64> {
    spec.validate()?;
    spec.value(u)
}
