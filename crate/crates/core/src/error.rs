use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("tail integral of 1/f diverges at u = {u}")]
    DivergentTail { u: f64 },
    #[error("quadrature failed to reach tolerance: estimate {estimate:e}, error {error:e}")]
    QuadratureFailure { estimate: f64, error: f64 },
    #[error("tabulated nonlinearity evaluated outside its sample range at u = {u}")]
    OutsideSampleRange { u: f64 },
    #[error("tabulated nonlinearity has no tail beyond its samples; F is undefined")]
    TabulatedTail,
    #[error("value {v:e} outside the attainable range ({lo:e}, {hi:e})")]
    OutOfRange { v: f64, lo: f64, hi: f64 },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("time {t:e} is below the resolution floor {floor:e} of the grid")]
    TimeBelowFloor { t: f64, floor: f64 },
    #[error("monotone iteration lost monotonicity at step {step} (drop {drop:e})")]
    NonMonotone { step: usize, drop: f64 },
    #[error("integral diverges near the singularity (local decay exponent {exponent:.4})")]
    DivergentCore { exponent: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
