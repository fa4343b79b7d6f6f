//! Regime classification, monitor functions and hypothesis checks.

pub mod hypotheses;
pub mod kappa;
pub mod monitor;
pub mod regime;

pub use hypotheses::{
    check_convex_transform, check_growth_corollaries, check_log_correction_bound, check_sourcewise_solvability,
    tail_condition, ConvexTransformCheck, CorollaryCheck, Extremum, GrowthCorollaries, LogCorrectionBound,
    SourcewiseCheck, TailCondition, Trend,
};
pub use kappa::{kappa, KappaConstant};
pub use monitor::{Monitor, MonitorSpec};
pub use regime::{
    classify_f_beta, classify_qr_regime, f_beta_clause, region_map, ClassificationOutcome, DataClass,
    DoublyCriticalVerdict, FBetaClause, FiredCheck, RegimeQuery, RegionCell, Verdict, EQUALITY_BAND,
};
