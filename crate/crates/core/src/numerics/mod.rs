//! Quadrature, root finding, extrapolation and small special-function helpers.

pub mod extended;
pub mod extrapolate;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use quadrature::Estimate;

/// Tolerances and transforms shared by the quadrature-backed operations.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail_transform: TailTransform,
    /// Relative central-difference step for derivatives without closed forms.
    pub fd_rel_step: f64,
}

/// Substitution used to map the tail `∫_u^∞ dτ/f(τ)` to a well-behaved integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailTransform {
    /// `τ = u/s` on `s ∈ (0, 1]`.
    Reciprocal,
    /// `τ = u + σ(e^y − 1)` with `σ = f/f'`, integrated in unit chunks of `y`.
    Exponential,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-12,
            max_subdivisions: 400,
            tail_transform: TailTransform::Exponential,
            fd_rel_step: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1 && self.fd_rel_step > 0.0) {
            return Err(crate::Error::InvalidParameter("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}
