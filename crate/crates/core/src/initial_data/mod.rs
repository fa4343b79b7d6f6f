//! Singular radial initial data, their uniformly local norms and the
//! truncation test for the closure class.

pub mod norms;
pub mod profile;

pub use norms::{
    closure_membership_heuristic, log_radial_integral, off_center_ball_integral, singular_integrability, ul_norm,
    ClosureMembership, CoreIntegral, SingularIntegral, TruncationStep, ULNormEstimate, UlMethod,
};
pub use profile::{
    build_counterexample, build_f_inverse_power, convexity_onset, h_tilde, ln_h_beta, CounterexampleReport,
    FInversePowerReport, ProfileCore, ProfileEval, RadialProfile,
};
