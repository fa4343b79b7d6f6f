//! Heat semigroup, monotone Picard iteration, supersolution checks and the
//! blow-up functional on radial grids.

pub mod blowup;
pub mod grid;
pub mod picard;
pub mod probes;
pub mod semigroup;
pub mod supersolution;

pub use blowup::{c2, c3, contradiction_sides, default_h0, integrate_h, BlowupFunctional, ContradictionSides};
pub use grid::{GridFunction, GridSpec, RadialGrid};
pub use picard::{picard_iterate, time_grid, IterationRecord, IterationTrace, IterationVerdict, PicardOptions, TimeRecord};
pub use probes::{scaling_check, smoothing_exponent_probe, ScalingCheck, SmoothingProbe};
pub use semigroup::{apply_semigroup, gaussian, SemigroupOperator};
pub use supersolution::{jensen_check, lift_datum, verify_supersolution, JensenCheck, SupersolutionCheck};
