//! Monitor functions `J` used to measure singular data: `J(u₀) ∈ L¹_ul`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinearity::spec::{g, g_inverse, g_prime, g_second};
use crate::nonlinearity::{tail, NonlinearitySpec, TailTable};
use crate::numerics::{roots, QuadratureConfig};

const E: f64 = std::f64::consts::E;

/// Catalog of monitor functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum MonitorSpec {
    /// `J(u) = u`.
    Identity,
    /// `J(u) = u^r`.
    Power { r: f64 },
    /// `J(u) = u[log(u+e)]^γ`.
    LogWeighted { gamma: f64 },
    /// `J(u) = F(u)^{−r}`.
    TailPower { r: f64, f: NonlinearitySpec },
    /// `J(u) = g_α(F(u)^{−N/2})` with `g_α(v) = v[log(v+e)]^α`.
    LogCorrected { alpha: f64, dim: u32, f: NonlinearitySpec },
}

impl MonitorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        match self {
            Self::Power { r } if !(*r > 0.0) => bad("monitor power needs r > 0"),
            Self::LogWeighted { gamma } if !(*gamma >= 0.0) => bad("log-weighted monitor needs gamma >= 0"),
            Self::TailPower { r, f } => {
                if !(*r > 0.0) {
                    return bad("tail-power monitor needs r > 0");
                }
                f.validate()
            }
            Self::LogCorrected { alpha, dim, f } => {
                if !(*alpha >= 0.0) || *dim == 0 {
                    return bad("log-corrected monitor needs alpha >= 0 and dim >= 1");
                }
                f.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Identity => "u".into(),
            Self::Power { r } => format!("u^{r}"),
            Self::LogWeighted { gamma } => format!("u[log(u+e)]^{gamma}"),
            Self::TailPower { r, f } => format!("F(u)^-{r} for f = {}", f.label()),
            Self::LogCorrected { alpha, dim, f } => {
                format!("g_{alpha}(F(u)^-{}) for f = {}", *dim as f64 / 2.0, f.label())
            }
        }
    }

    fn tail_source(&self) -> Option<&NonlinearitySpec> {
        match self {
            Self::TailPower { f, .. } | Self::LogCorrected { f, .. } => Some(f),
            _ => None,
        }
    }
}

/// `ln L` and `s = v/(v+e)` with `L = log(v+e)`, from `ln v`.
fn log_parts(lv: f64) -> (f64, f64) {
    if lv > 40.0 {
        (lv, 1.0)
    } else {
        let v = lv.exp();
        ((v + E).ln(), v / (v + E))
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn ln_g_from_ln(alpha: f64, lv: f64) -> f64 {
    if lv == f64::NEG_INFINITY {
        return lv;
    }
    let (l, _) = log_parts(lv);
    lv + alpha * l.ln()
}

/// Evaluator for a [`MonitorSpec`], caching a table of `ln F` for the
/// tail-based kinds.
#[derive(Clone, Debug)]
pub struct Monitor {
    spec: MonitorSpec,
    table: Option<TailTable>,
    cfg: QuadratureConfig,
}

impl Monitor {
    pub fn new(spec: MonitorSpec, cfg: &QuadratureConfig) -> Result<Self> {
        spec.validate()?;
        let table = match spec.tail_source() {
            Some(f) => TailTable::validated(f, cfg),
            None => None,
        };
        Ok(Self { spec, table, cfg: *cfg })
    }

    pub fn spec(&self) -> &MonitorSpec {
        &self.spec
    }

    fn ln_tail(&self, f: &NonlinearitySpec, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(tail::tail_at_zero(f, &self.cfg)?.ln());
        }
        match &self.table {
            Some(t) => t.ln_tail(u),
            None => tail::ln_tail(f, u, &self.cfg),
        }
    }

    fn fprime_tail(&self, f: &NonlinearitySpec, u: f64, ln_tail: f64) -> Result<f64> {
        Ok(f.log_derivative(u)? * (f.ln_value(u)? + ln_tail).exp())
    }

    /// `ln J(u)`.
    pub fn ln_value(&self, u: f64) -> Result<f64> {
        check(u)?;
        Ok(match &self.spec {
            MonitorSpec::Identity => u.ln(),
            MonitorSpec::Power { r } => r * u.ln(),
            MonitorSpec::LogWeighted { gamma } => u.ln() + gamma * (u + E).ln().ln(),
            MonitorSpec::TailPower { r, f } => -r * self.ln_tail(f, u)?,
            MonitorSpec::LogCorrected { alpha, dim, f } => {
                let lv = -0.5 * *dim as f64 * self.ln_tail(f, u)?;
                ln_g_from_ln(*alpha, lv)
            }
        })
    }

    /// `ln J(e^{lu})`; the power-type kinds never leave log space.
    pub fn ln_value_of_ln(&self, lu: f64) -> Result<f64> {
        match &self.spec {
            MonitorSpec::Identity => Ok(lu),
            MonitorSpec::Power { r } => Ok(r * lu),
            MonitorSpec::LogWeighted { gamma } => Ok(lu + gamma * log_add(lu, 1.0).ln()),
            _ => self.ln_value(lu.exp()),
        }
    }

    /// `J(u)`.
    pub fn value(&self, u: f64) -> Result<f64> {
        match &self.spec {
            MonitorSpec::Identity => Ok(u),
            MonitorSpec::Power { r } => Ok(u.powf(*r)),
            MonitorSpec::LogWeighted { gamma } => Ok(g(*gamma, u)),
            _ => Ok(self.ln_value(u)?.exp()),
        }
    }

    /// `ln J'(u)`.
    pub fn ln_derivative(&self, u: f64) -> Result<f64> {
        check(u)?;
        Ok(match &self.spec {
            MonitorSpec::Identity => 0.0,
            MonitorSpec::Power { r } => r.ln() + (r - 1.0) * u.ln(),
            MonitorSpec::LogWeighted { gamma } => g_prime(*gamma, u).ln(),
            MonitorSpec::TailPower { r, f } => r.ln() - (r + 1.0) * self.ln_tail(f, u)? - f.ln_value(u)?,
            MonitorSpec::LogCorrected { alpha, dim, f } => {
                let n2 = 0.5 * *dim as f64;
                let lt = self.ln_tail(f, u)?;
                let lv = -n2 * lt;
                let (l, s) = log_parts(lv);
                let ln_gp = alpha * l.ln() + (alpha * s / l).ln_1p();
                ln_gp + n2.ln() + lv - lt - f.ln_value(u)?
            }
        })
    }

    /// `J'(u)`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        Ok(self.ln_derivative(u)?.exp())
    }

    /// `J J'' / J'^2`.
    pub fn curvature(&self, u: f64) -> Result<f64> {
        check(u)?;
        Ok(match &self.spec {
            MonitorSpec::Identity => 0.0,
            MonitorSpec::Power { r } => (r - 1.0) / r,
            MonitorSpec::LogWeighted { gamma } => {
                let gp = g_prime(*gamma, u);
                g(*gamma, u) * g_second(*gamma, u) / (gp * gp)
            }
            MonitorSpec::TailPower { r, f } => {
                let lt = self.ln_tail(f, u)?;
                ((r + 1.0) - self.fprime_tail(f, u, lt)?) / r
            }
            MonitorSpec::LogCorrected { alpha, dim, f } => {
                let n2 = 0.5 * *dim as f64;
                let lt = self.ln_tail(f, u)?;
                let (l, s) = log_parts(-n2 * lt);
                let den = 1.0 + alpha * s / l;
                let gg = s * alpha / l * (2.0 - s + (alpha - 1.0) * s / l) / (den * den);
                gg + ((n2 + 1.0) - self.fprime_tail(f, u, lt)?) / (n2 * den)
            }
        })
    }

    /// `J''(u)`.
    pub fn second_derivative(&self, u: f64) -> Result<f64> {
        let c = self.curvature(u)?;
        Ok(c * (2.0 * self.ln_derivative(u)? - self.ln_value(u)?).exp())
    }

    /// `J J''' / (J' J'')` by a central difference of `ln |J''|` in `ln u`.
    pub fn third_ratio(&self, u: f64) -> Result<f64> {
        let h = 1e-4;
        let ln_abs = |x: f64| -> Result<f64> {
            let uu = x.exp();
            let c = self.curvature(uu)?;
            Ok(c.abs().ln() + 2.0 * self.ln_derivative(uu)? - self.ln_value(uu)?)
        };
        let x = u.ln();
        let d = (ln_abs(x + h)? - ln_abs(x - h)?) / (2.0 * h);
        // d ln|J''|/d ln u = u J'''/J'', and J/(u J') converts it
        Ok(d * (self.ln_value(u)? - self.ln_derivative(u)? - x).exp())
    }

    /// `J⁻¹(y)` for `y ≥ J(0)`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::OutOfRange { v: y, lo: 0.0, hi: f64::INFINITY });
        }
        match &self.spec {
            MonitorSpec::Identity => Ok(y),
            MonitorSpec::Power { r } => Ok(y.powf(1.0 / r)),
            MonitorSpec::LogWeighted { gamma } => g_inverse(*gamma, y),
            _ => {
                if y == 0.0 {
                    return Ok(0.0);
                }
                self.inverse_ln(y.ln())
            }
        }
    }

    /// `J⁻¹(e^{ln_y})`.
    pub fn inverse_ln(&self, ln_y: f64) -> Result<f64> {
        match &self.spec {
            MonitorSpec::TailPower { r, f } => self.tail_inverse_ln(f, -ln_y / r),
            MonitorSpec::LogCorrected { alpha, dim, f } => {
                let lv = if ln_y < 600.0 {
                    g_inverse(*alpha, ln_y.exp())?.ln()
                } else {
                    let phi = |lv: f64| ln_g_from_ln(*alpha, lv) - ln_y;
                    let (a, b) = roots::expand_bracket(phi, ln_y - 10.0 * alpha.max(1.0), ln_y, -1e6, 1e6)?;
                    roots::brent(phi, a, b, 1e-14 * ln_y.abs(), 300)?
                };
                self.tail_inverse_ln(f, -lv * 2.0 / *dim as f64)
            }
            _ => self.inverse(ln_y.exp()),
        }
    }

    fn tail_inverse_ln(&self, f: &NonlinearitySpec, ln_v: f64) -> Result<f64> {
        match &self.table {
            Some(t) => t.inverse_ln(ln_v),
            None => tail::eval_tail_inverse(f, ln_v.exp(), &self.cfg),
        }
    }
}

fn check(u: f64) -> Result<()> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("monitor argument must be finite and >= 0, got {u}")));
    }
    Ok(())
}
