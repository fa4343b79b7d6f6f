//! Radial singular data and their builders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::exponents::q_limit;
use crate::nonlinearity::tail::{self, TailTable};
use crate::nonlinearity::NonlinearitySpec;
use crate::numerics::QuadratureConfig;

const E: f64 = std::f64::consts::E;

/// Core of a radial profile as a function of `s = |x|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum ProfileCore {
    /// `h⁻¹(s^{−N}(log 1/s)^{−N/2−1+ε})` with `h = F^{−N/2}` for `f`
    /// (`f = f_β` in the plain construction).
    Counterexample { beta: f64, eps: f64, f: NonlinearitySpec },
    /// `F⁻¹(min{s^α, F(0)})`.
    FInversePower { alpha: f64, f: NonlinearitySpec },
    Constant { c: f64 },
    /// `s^{−a}`.
    PowerCore { a: f64 },
    /// `s^{−a}(log 1/s)^{−λ}`; with `a = N` this is the model integrand of the
    /// singular-ball estimates.
    LogPowerCore { a: f64, lambda: f64 },
    /// The heat kernel `G(s, τ) = (4πτ)^{−N/2} exp(−s²/4τ)` scaled by `mass`.
    Gaussian { tau: f64, mass: f64 },
}

/// `u₀(x) = core(|x|)` for `|x| ≤ cutoff`, the core value at `cutoff` beyond it,
/// and the core value at `truncation` inside that radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub core: ProfileCore,
    pub dim: u32,
    pub cutoff: Option<f64>,
    pub truncation: Option<f64>,
}

impl RadialProfile {
    pub fn new(core: ProfileCore, dim: u32, cutoff: Option<f64>) -> Self {
        Self { core, dim, cutoff, truncation: None }
    }

    /// The model profile `s^{−N}(log 1/s)^{−λ}` capped at `s = 1/e`.
    pub fn model(dim: u32, lambda: f64) -> Self {
        Self::new(ProfileCore::LogPowerCore { a: dim as f64, lambda }, dim, Some(1.0 / E))
    }

    /// `φ_n`: the core replaced by its value at radius `2^{−n}·m` inside that ball,
    /// `m` being the cutoff (or 1).
    pub fn truncated(&self, n: u32) -> Self {
        let m = self.cutoff.unwrap_or(1.0);
        Self { truncation: Some(m * 0.5f64.powi(n as i32)), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dim == 0 {
            return bad("profile dimension must be >= 1".into());
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0) {
                return bad(format!("cutoff radius must be positive, got {c}"));
            }
        }
        match &self.core {
            ProfileCore::Counterexample { beta, eps, f } => {
                f.validate()?;
                if !(*eps > 0.0 && *eps < self.dim as f64 / 2.0) || !beta.is_finite() {
                    return bad(format!("counterexample needs 0 < eps < N/2, got {eps}"));
                }
                if self.cutoff.map_or(true, |m| m >= 1.0) {
                    return bad("counterexample needs a cutoff m < 1".into());
                }
            }
            ProfileCore::FInversePower { alpha, f } => {
                f.validate()?;
                if !(*alpha > 0.0) {
                    return bad(format!("F-inverse power needs alpha > 0, got {alpha}"));
                }
            }
            ProfileCore::Constant { c } if !(*c >= 0.0 && c.is_finite()) => {
                return bad(format!("constant profile needs c >= 0, got {c}"))
            }
            ProfileCore::PowerCore { a } if !(*a >= 0.0) => return bad(format!("power core needs a >= 0, got {a}")),
            ProfileCore::LogPowerCore { a, lambda } => {
                if !(*a >= 0.0) || !lambda.is_finite() {
                    return bad(format!("log-power core needs a >= 0, got {a}"));
                }
                if self.cutoff.map_or(true, |m| m >= 1.0) {
                    return bad("log-power core needs a cutoff < 1".into());
                }
            }
            ProfileCore::Gaussian { tau, mass } if !(*tau > 0.0 && *mass >= 0.0) => {
                return bad(format!("Gaussian needs tau > 0 and mass >= 0, got {tau}, {mass}"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Whether the profile is bounded (no singular core survives).
    pub fn is_bounded(&self) -> bool {
        self.truncation.is_some()
            || matches!(self.core, ProfileCore::Constant { .. } | ProfileCore::Gaussian { .. })
            || matches!(self.core, ProfileCore::PowerCore { a } if a == 0.0)
    }

    pub fn evaluator(&self, cfg: &QuadratureConfig) -> Result<ProfileEval> {
        self.validate()?;
        let table = match &self.core {
            ProfileCore::Counterexample { f, .. } | ProfileCore::FInversePower { f, .. } => {
                Some(match TailTable::validated(f, cfg) {
                    Some(t) => t,
                    None => TailTable::build(f, -30.0, tail::LN_U_MAX, 64, cfg)?,
                })
            }
            _ => None,
        };
        let ln_f0 = match &self.core {
            ProfileCore::FInversePower { f, .. } => tail::tail_at_zero(f, cfg)?.ln(),
            _ => f64::INFINITY,
        };
        Ok(ProfileEval { profile: self.clone(), table, ln_f0 })
    }
}

/// Evaluator holding the tail table a profile needs.
#[derive(Clone, Debug)]
pub struct ProfileEval {
    profile: RadialProfile,
    table: Option<TailTable>,
    ln_f0: f64,
}

impl ProfileEval {
    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `ln` of the core at `s = e^{−t}`, before cutoff and truncation.
    fn ln_core_t(&self, t: f64) -> Result<f64> {
        let n = self.profile.dim as f64;
        match &self.profile.core {
            ProfileCore::Counterexample { eps, .. } => {
                let ln_v = n * t + (-n / 2.0 - 1.0 + eps) * t.ln();
                let u = self.table.as_ref().unwrap().inverse_ln(-2.0 / n * ln_v)?;
                Ok(u.ln())
            }
            ProfileCore::FInversePower { alpha, .. } => {
                let ln_target = -alpha * t;
                if ln_target >= self.ln_f0 {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(self.table.as_ref().unwrap().inverse_ln(ln_target)?.ln())
            }
            ProfileCore::Constant { c } => Ok(c.ln()),
            ProfileCore::PowerCore { a } => Ok(a * t),
            ProfileCore::LogPowerCore { a, lambda } => Ok(a * t - lambda * t.ln()),
            ProfileCore::Gaussian { tau, mass } => {
                let s2 = (-2.0 * t).exp();
                Ok(mass.ln() - n / 2.0 * (4.0 * std::f64::consts::PI * tau).ln() - s2 / (4.0 * tau))
            }
        }
    }

    /// `ln u₀(e^{−t})`.
    pub fn ln_value_t(&self, t: f64) -> Result<f64> {
        let mut t = t;
        if let Some(m) = self.profile.cutoff {
            t = t.max(-m.ln());
        }
        if let Some(r) = self.profile.truncation {
            t = t.min(-r.ln());
        }
        if t == f64::INFINITY {
            return Err(Error::InvalidParameter("singular profile evaluated at the origin".into()));
        }
        self.ln_core_t(t)
    }

    /// `u₀(s)`.
    pub fn value(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be >= 0, got {s}")));
        }
        if s == 0.0 && self.profile.is_bounded() {
            return match (&self.profile.core, self.profile.truncation) {
                (_, Some(r)) => self.value(r),
                (ProfileCore::Gaussian { .. }, _) => Ok(self.ln_core_t(f64::INFINITY)?.exp()),
                _ => Ok(self.ln_core_t(0.0)?.exp()),
            };
        }
        Ok(self.ln_value_t(-s.ln())?.exp())
    }

    /// `(s, u₀(s))` on a logarithmic grid, for export.
    pub fn sample_log_grid(&self, s_min: f64, s_max: f64, per_decade: usize) -> Result<Vec<(f64, f64)>> {
        let n = ((s_max / s_min).log10() * per_decade as f64).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| {
                let s = s_min * (s_max / s_min).powf(k as f64 / n as f64);
                Ok((s, self.value(s)?))
            })
            .collect()
    }

    /// Largest increase `u₀(s_{k+1}) − u₀(s_k)` on a log grid, relative to the value;
    /// nonpositive for a nonincreasing profile.
    pub fn monotonicity_defect(&self, s_min: f64, s_max: f64) -> Result<f64> {
        let pts = self.sample_log_grid(s_min, s_max, 40)?;
        Ok(pts
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / w[0].1.max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// `h_β(u) = F_β(u)^{−N/2}` in log form.
pub fn ln_h_beta(beta: f64, dim: u32, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let fb = NonlinearitySpec::f_beta(dim, beta);
    Ok(-0.5 * dim as f64 * tail::ln_tail(&fb, u, cfg)?)
}

/// The explicit lower bound `h̃_β(u) = (N/4)^{N/2} u [log(u+e)]^{−Nβ/2}` for `h_β⁻¹`.
pub fn h_tilde(beta: f64, dim: u32, u: f64) -> f64 {
    let n = dim as f64;
    (n / 4.0).powf(n / 2.0) * u * (u + E).ln().powf(-n * beta / 2.0)
}

/// Smallest sampled `C₀` with `f'' ≥ 0` on every later sample of `[0, 10⁶]`.
pub fn convexity_onset(f: &NonlinearitySpec) -> Result<f64> {
    let mut us = vec![0.0];
    us.extend((0..=72).map(|k| 10f64.powf(-3.0 + k as f64 / 8.0)));
    let mut onset = 0.0;
    for &u in us.iter().rev() {
        if u == 0.0 {
            break;
        }
        let h = 1e-4 * u;
        let d2 = (f.derivative(u + h)? - f.derivative(u - h)?) / (2.0 * h);
        let scale = f.derivative(u)?.abs() / u;
        if d2 < -1e-8 * scale {
            return Ok(onset);
        }
        onset = u;
    }
    Ok(0.0)
}

/// Diagnostics of the counterexample construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub m: f64,
    /// Convexity onset of `f_β`.
    pub c0: f64,
    /// `ln h_β(C₀)`, the floor the core must clear on `(0, m]`.
    pub ln_floor: f64,
    /// `ln` of the core argument at `s = m`.
    pub ln_core_at_m: f64,
}

/// `ln(s^{−N}(log 1/s)^{−N/2−1+ε})`.
fn ln_core_argument(dim: u32, eps: f64, s: f64) -> f64 {
    let n = dim as f64;
    -n * s.ln() + (-n / 2.0 - 1.0 + eps) * (-s.ln()).ln()
}

/// Largest dyadic `m < 1/e` with the core argument above `h_β(C₀)` and
/// decreasing on `(0, m]`.
fn select_m(dim: u32, eps: f64, ln_floor: f64) -> Result<f64> {
    let n = dim as f64;
    // d/dt of N t + (−N/2−1+ε) ln t is positive iff t > (N/2+1−ε)/N
    let t_mono = (n / 2.0 + 1.0 - eps) / n;
    for k in 2..=60 {
        let m = 0.5f64.powi(k);
        if -m.ln() > t_mono && ln_core_argument(dim, eps, m) >= ln_floor {
            return Ok(m);
        }
    }
    Err(Error::InvalidParameter(format!("no dyadic m in (0, 1/e) clears the core floor {ln_floor:.4}")))
}

/// The nonexistence datum built from `f_β`. With `f = Some(..)` the core is
/// composed with `F⁻¹∘F_β`, i.e. uses `h = F^{−N/2}` of that `f`.
pub fn build_counterexample(
    beta: f64,
    eps: f64,
    alpha: f64,
    dim: u32,
    f: Option<NonlinearitySpec>,
    cfg: &QuadratureConfig,
) -> Result<(RadialProfile, CounterexampleReport)> {
    let n = dim as f64;
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("counterexample needs beta > 0, got {beta}")));
    }
    if !(alpha >= 0.0 && alpha < n / 2.0) {
        return Err(Error::InvalidParameter(format!("counterexample needs 0 <= alpha < N/2, got {alpha}")));
    }
    if !(eps > 0.0 && eps < n / 2.0 - alpha) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, N/2 - alpha) = (0, {}), got {eps}", n / 2.0 - alpha)));
    }
    let fb = NonlinearitySpec::f_beta(dim, beta);
    let c0 = convexity_onset(&fb)?;
    let ln_floor = if c0 == 0.0 { f64::NEG_INFINITY } else { ln_h_beta(beta, dim, c0, cfg)? };
    let m = select_m(dim, eps, ln_floor)?;
    let core = ProfileCore::Counterexample { beta, eps, f: f.unwrap_or(fb) };
    let profile = RadialProfile::new(core, dim, Some(m));
    profile.validate()?;
    Ok((profile, CounterexampleReport { m, c0, ln_floor, ln_core_at_m: ln_core_argument(dim, eps, m) }))
}

/// Diagnostics of the `F⁻¹(|x|^α)` construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FInversePowerReport {
    pub q: f64,
    /// `q ≤ 1+r`, required for the datum to lie outside the existence class.
    pub q_condition_holds: bool,
    /// `F(0)`, infinite when the clamp is inactive.
    #[serde(with = "crate::numerics::extended")]
    pub tail_at_zero: f64,
}

/// `u₀ = F⁻¹(min{|x|^α, F(0)})` for `0 < r < N/2` and `2 < α < N/r`.
///
/// The requirement `q ≤ 1+r` is reported, not enforced: the critical power
/// examples sit just outside it.
pub fn build_f_inverse_power(
    f: &NonlinearitySpec,
    alpha: f64,
    r: f64,
    dim: u32,
    cfg: &QuadratureConfig,
) -> Result<(RadialProfile, FInversePowerReport)> {
    let n = dim as f64;
    if !(r > 0.0 && r < n / 2.0) {
        return Err(Error::InvalidParameter(format!("need 0 < r < N/2, got r = {r}")));
    }
    if !(alpha > 2.0 && alpha < n / r) {
        return Err(Error::InvalidParameter(format!("need 2 < alpha < N/r = {}, got {alpha}", n / r)));
    }
    f.validate()?;
    let (q, _) = q_limit(f, cfg)?;
    let profile = RadialProfile::new(ProfileCore::FInversePower { alpha, f: f.clone() }, dim, None);
    let report = FInversePowerReport {
        q: q.value,
        q_condition_holds: q.value <= 1.0 + r + 1e-6,
        tail_at_zero: tail::tail_at_zero(f, cfg)?,
    };
    Ok((profile, report))
}
