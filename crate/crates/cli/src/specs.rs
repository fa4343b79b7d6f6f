//! JSON input formats, one per command.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use semilinear_core::classifier::{DataClass, MonitorSpec};
use semilinear_core::heat_solver::{GridSpec, PicardOptions};
use semilinear_core::initial_data::{build_counterexample, build_f_inverse_power, RadialProfile};
use semilinear_core::nonlinearity::NonlinearitySpec;
use semilinear_core::numerics::QuadratureConfig;

use crate::manifest::SpecError;

pub fn parse<T: DeserializeOwned>(command: &str, spec: &serde_json::Value) -> Result<T, SpecError> {
    serde_json::from_value(spec.clone()).map_err(|e| SpecError(format!("invalid {command} spec: {e}")))
}

fn closure_class() -> DataClass {
    DataClass::ClosureL1ul
}

#[derive(Deserialize, Debug)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassifySpec {
    /// The `f_β` table; data with `J_α(u₀) ∈ L¹_ul`.
    FBeta { dim: u32, alpha: f64, beta: f64 },
    /// A point of the `(q, r)` plane.
    Qr {
        dim: u32,
        q: f64,
        r: f64,
        #[serde(default)]
        bound_holds: Option<bool>,
        #[serde(default = "closure_class")]
        data_class: DataClass,
    },
    /// `q` computed from `f`, then placed on the plane.
    Nonlinearity {
        dim: u32,
        r: f64,
        f: NonlinearitySpec,
        #[serde(default = "closure_class")]
        data_class: DataClass,
    },
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub f: NonlinearitySpec,
}

/// How to obtain the initial datum.
#[derive(Deserialize, Serialize, Debug, Clone)]
#[serde(tag = "build", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DatumSpec {
    Profile {
        profile: RadialProfile,
    },
    /// The nonexistence datum built from `f_β`.
    Counterexample {
        beta: f64,
        eps: f64,
        #[serde(default)]
        alpha: f64,
        dim: u32,
        #[serde(default)]
        f: Option<NonlinearitySpec>,
    },
    /// `F⁻¹(min{|x|^α, F(0)})`.
    FInversePower { f: NonlinearitySpec, alpha: f64, r: f64, dim: u32 },
}

impl DatumSpec {
    /// The profile and the builder's diagnostics, if any.
    pub fn build(&self, cfg: &QuadratureConfig) -> semilinear_core::Result<(RadialProfile, serde_json::Value)> {
        match self {
            DatumSpec::Profile { profile } => {
                profile.validate()?;
                Ok((profile.clone(), serde_json::Value::Null))
            }
            DatumSpec::Counterexample { beta, eps, alpha, dim, f } => {
                let (p, rep) = build_counterexample(*beta, *eps, *alpha, *dim, f.clone(), cfg)?;
                Ok((p, serde_json::to_value(&rep).unwrap_or_default()))
            }
            DatumSpec::FInversePower { f, alpha, r, dim } => {
                let (p, rep) = build_f_inverse_power(f, *alpha, *r, *dim, cfg)?;
                Ok((p, serde_json::to_value(&rep).unwrap_or_default()))
            }
        }
    }
}

fn default_rho() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub datum: DatumSpec,
    /// Monitor for the singular-ball integral; `J = u` when absent.
    #[serde(default)]
    pub monitor: Option<MonitorSpec>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "one")]
    pub ul_radius: f64,
    /// Run the truncation test for the closure class.
    #[serde(default = "yes")]
    pub closure: bool,
}

fn yes() -> bool {
    true
}

fn default_eps() -> f64 {
    0.1
}

fn default_delta() -> f64 {
    0.05
}

/// Blow-up functional evidence for a simulation.
#[derive(Deserialize, Serialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    pub beta: f64,
    pub rho: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Overrides `C₂(ρ)` computed from `c1` and `delta`.
    #[serde(default)]
    pub c2: Option<f64>,
    #[serde(default = "one")]
    pub c_star: f64,
    /// Smoothing time for the ball mass; `ρ²` when absent.
    #[serde(default)]
    pub tau: Option<f64>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub f: NonlinearitySpec,
    pub datum: DatumSpec,
    #[serde(default)]
    pub monitor: Option<MonitorSpec>,
    #[serde(default)]
    pub picard: PicardOptions,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub blowup: Option<BlowupSpec>,
}

fn default_sigma() -> f64 {
    0.5
}

fn default_verify_tol() -> f64 {
    1e-8
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub f: NonlinearitySpec,
    pub datum: DatumSpec,
    pub monitor: MonitorSpec,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub xi: f64,
    /// Jensen direction: `false` for convex monitors.
    #[serde(default)]
    pub concave: bool,
    #[serde(default)]
    pub picard: PicardOptions,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_verify_tol")]
    pub tol: f64,
}

fn default_cells() -> usize {
    41
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FigureMapSpec {
    pub dim: u32,
    pub q: (f64, f64),
    pub r: (f64, f64),
    #[serde(default = "default_cells")]
    pub nq: usize,
    #[serde(default = "default_cells")]
    pub nr: usize,
}
