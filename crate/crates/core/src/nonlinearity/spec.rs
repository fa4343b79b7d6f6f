//! The nonlinearity catalog and its pointwise evaluation.
//!
//! Every kind evaluates in log space: `ln f`, the logarithmic derivative `f'/f`
//! and the increment `ln f(u+d) − ln f(u)`. Tail integrals are built from these
//! so rapidly growing kinds never overflow.

use serde::{Deserialize, Serialize};

use crate::classifier::kappa::kappa;
use crate::error::{Error, Result};
use crate::numerics::roots;

const E: f64 = std::f64::consts::E;

/// Source term `f` of `u_t = Δu + f(u)`.
///
/// Serializes as `{"kind": "...", "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum NonlinearitySpec {
    /// `u^p`.
    Power { p: f64 },
    /// `u^p [log(u+e)]^β`; with `p = 1+2/N` this is the log-perturbed critical power.
    LogPerturbedPower { p: f64, beta: f64 },
    /// `exp(u^p)`.
    ExpPower { p: f64 },
    /// `exp(|log u|^{p-1} log u)`.
    ExpLogPower { p: f64 },
    /// `(u+a)^p / ((p−1)log(u+a) − 1)` with `a = e^{2/(p−1)}`; `F = log(u+a)/(u+a)^{p−1}`.
    LogQuotient { p: f64 },
    /// `exp∘…∘exp(u)` with `n` exponentials.
    IteratedExp { n: u32 },
    /// `(N/2) g'(v) v^{1+2/N}` at `v = g⁻¹(u)` with `g(v) = v[log(v+e)]^α`; `F = v^{−2/N}`.
    LogWeightedInverse { alpha: f64, dim: u32 },
    /// Monotone samples `(u_i, f_i)`, interpolated log-linearly between samples.
    Tabulated { u: Vec<f64>, f: Vec<f64> },
    /// `f ≡ 0`; only meaningful for the linear heat flow.
    Zero,
}

impl NonlinearitySpec {
    /// The log-perturbed critical power `u^{1+2/N}[log(u+e)]^β`.
    pub fn f_beta(dim: u32, beta: f64) -> Self {
        NonlinearitySpec::LogPerturbedPower { p: 1.0 + 2.0 / dim as f64, beta }
    }

    /// Check parameters against the range where `f` is positive and nondecreasing.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            Self::Power { p } if !(*p > 0.0 && p.is_finite()) => bad(format!("Power needs p > 0, got {p}")),
            Self::LogPerturbedPower { p, beta } => {
                if !(*p > 0.0 && p.is_finite() && beta.is_finite()) {
                    return bad(format!("LogPerturbedPower needs p > 0, got p = {p}"));
                }
                // f' ≥ 0 everywhere iff β ≥ −pκ
                let floor = -p * kappa();
                if *beta < floor - 1e-12 {
                    return bad(format!("beta = {beta} below the monotonicity floor {floor:.6}"));
                }
                Ok(())
            }
            Self::ExpPower { p } if !(*p > 0.0 && p.is_finite()) => bad(format!("ExpPower needs p > 0, got {p}")),
            Self::ExpLogPower { p } if !(*p > 1.0 && p.is_finite()) => bad(format!("ExpLogPower needs p > 1, got {p}")),
            Self::LogQuotient { p } if !(*p > 1.0 && p.is_finite()) => bad(format!("LogQuotient needs p > 1, got {p}")),
            Self::IteratedExp { n } if *n == 0 => bad("IteratedExp needs n >= 1".into()),
            Self::LogWeightedInverse { alpha, dim } => {
                if !(*alpha >= 0.0 && alpha.is_finite()) || *dim == 0 {
                    return bad(format!("LogWeightedInverse needs alpha >= 0 and dim >= 1, got {alpha}, {dim}"));
                }
                Ok(())
            }
            Self::Tabulated { u, f } => {
                if u.len() < 2 || u.len() != f.len() {
                    return bad("Tabulated needs at least two (u, f) samples of equal length".into());
                }
                if u.windows(2).any(|w| w[1] <= w[0]) || u[0] < 0.0 {
                    return bad("Tabulated u samples must be nonnegative and strictly increasing".into());
                }
                if f.windows(2).any(|w| w[1] < w[0]) || f.iter().any(|v| !(*v > 0.0)) {
                    return bad("Tabulated f samples must be positive and nondecreasing".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Smallest admissible argument.
    pub fn domain_floor(&self) -> f64 {
        match self {
            Self::Tabulated { u, .. } => u[0],
            _ => 0.0,
        }
    }

    fn check_arg(&self, u: f64) -> Result<()> {
        if !(u >= 0.0) || u.is_infinite() {
            return Err(Error::InvalidParameter(format!("argument must be finite and >= 0, got {u}")));
        }
        if let Self::Tabulated { u: us, .. } = self {
            if u < us[0] || u > *us.last().unwrap() {
                return Err(Error::OutsideSampleRange { u });
            }
        }
        Ok(())
    }

    /// `ln f(u)`; `−∞` where `f` vanishes.
    pub fn ln_value(&self, u: f64) -> Result<f64> {
        self.check_arg(u)?;
        let v = match self {
            Self::Power { p } => p * u.ln(),
            Self::LogPerturbedPower { p, beta } => p * u.ln() + beta * (u + E).ln().ln(),
            Self::ExpPower { p } => u.powf(*p),
            Self::ExpLogPower { p } => {
                let l = u.ln();
                l.signum() * l.abs().powf(*p)
            }
            Self::LogQuotient { p } => {
                let w = u + log_quotient_shift(*p);
                p * w.ln() - ((p - 1.0) * w.ln() - 1.0).ln()
            }
            Self::IteratedExp { n } => iterate_exp(u, n - 1),
            Self::LogWeightedInverse { alpha, dim } => {
                let nn = *dim as f64;
                let v = g_inverse(*alpha, u)?;
                if v == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (0.5 * nn).ln() + g_prime(*alpha, v).ln() + (1.0 + 2.0 / nn) * v.ln()
                }
            }
            Self::Tabulated { u: us, f } => tabulated_ln(us, f, u),
            Self::Zero => f64::NEG_INFINITY,
        };
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFinite(format!("ln f({u:e}) overflows")));
        }
        Ok(v)
    }

    /// `f(u)`.
    pub fn value(&self, u: f64) -> Result<f64> {
        match self {
            Self::Power { p } => {
                self.check_arg(u)?;
                Ok(u.powf(*p))
            }
            _ => Ok(self.ln_value(u)?.exp()),
        }
    }

    /// Logarithmic derivative `f'(u)/f(u)`.
    pub fn log_derivative(&self, u: f64) -> Result<f64> {
        self.check_arg(u)?;
        let v = match self {
            Self::Power { p } => p / u,
            Self::LogPerturbedPower { p, beta } => p / u + beta / ((u + E) * (u + E).ln()),
            Self::ExpPower { p } => p * u.powf(p - 1.0),
            Self::ExpLogPower { p } => p * u.ln().abs().powf(p - 1.0) / u,
            Self::LogQuotient { p } => {
                let w = u + log_quotient_shift(*p);
                let d = (p - 1.0) * w.ln() - 1.0;
                p / w - (p - 1.0) / (w * d)
            }
            Self::IteratedExp { n } => {
                let mut prod = 1.0;
                let mut e = u;
                for _ in 1..*n {
                    e = e.exp();
                    prod *= e;
                }
                prod
            }
            Self::LogWeightedInverse { alpha, dim } => {
                let nn = *dim as f64;
                let v = g_inverse(*alpha, u)?;
                let g1 = g_prime(*alpha, v);
                (g_second(*alpha, v) / g1 + (1.0 + 2.0 / nn) / v) / g1
            }
            Self::Tabulated { u: us, f } => {
                let h = 1e-6 * u.max(1e-12);
                let lo = (u - h).max(us[0]);
                let hi = (u + h).min(*us.last().unwrap());
                (tabulated_ln(us, f, hi) - tabulated_ln(us, f, lo)) / (hi - lo)
            }
            Self::Zero => 0.0,
        };
        if v.is_nan() {
            return Err(Error::NonFinite(format!("f'/f at u = {u:e}")));
        }
        Ok(v)
    }

    /// `f'(u)`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        if matches!(self, Self::Zero) {
            return Ok(0.0);
        }
        let lv = self.ln_value(u)?;
        if lv == f64::NEG_INFINITY {
            // f vanishes at u: fall back to a one-sided difference
            let h = 1e-7 * u.max(1e-7);
            return Ok((self.value(u + h)? - self.value(u)?) / h);
        }
        Ok(self.log_derivative(u)? * lv.exp())
    }

    /// `ln f(u+d) − ln f(u)` for `d ≥ 0`, accurate for small `d/u`.
    pub fn ln_ratio(&self, u: f64, d: f64) -> Result<f64> {
        if d == 0.0 {
            return Ok(0.0);
        }
        let v = match self {
            Self::Power { p } if u > 0.0 => p * (d / u).ln_1p(),
            Self::LogPerturbedPower { p, beta } if u > 0.0 => {
                let l = (u + E).ln();
                p * (d / u).ln_1p() + beta * ((d / (u + E)).ln_1p() / l).ln_1p()
            }
            Self::ExpPower { p } if u > 0.0 => u.powf(*p) * (p * (d / u).ln_1p()).exp_m1(),
            Self::ExpLogPower { p } if u > 1.0 => {
                let l = u.ln();
                let dl = (d / u).ln_1p();
                l.powf(*p) * (p * (dl / l).ln_1p()).exp_m1()
            }
            Self::LogQuotient { p } => {
                let w = u + log_quotient_shift(*p);
                let dw = (d / w).ln_1p();
                let den = (p - 1.0) * w.ln() - 1.0;
                p * dw - ((p - 1.0) * dw / den).ln_1p()
            }
            Self::IteratedExp { n } => {
                let mut diff = d;
                let mut e = u;
                for _ in 1..*n {
                    e = e.exp();
                    diff = e * diff.exp_m1();
                }
                diff
            }
            _ => self.ln_value(u + d)? - self.ln_value(u)?,
        };
        if v.is_nan() {
            return Err(Error::NonFinite(format!("ln f ratio at u = {u:e}, d = {d:e}")));
        }
        Ok(v)
    }

    /// Closed-form `F(u) = ∫_u^∞ dτ/f(τ)` where the catalog provides one.
    pub fn closed_form_tail(&self, u: f64) -> Option<f64> {
        match self {
            Self::Power { p } if *p > 1.0 => Some(u.powf(1.0 - p) / (p - 1.0)),
            Self::LogPerturbedPower { p, beta } if *p > 1.0 && *beta == 0.0 => Some(u.powf(1.0 - p) / (p - 1.0)),
            Self::ExpPower { p } if *p == 1.0 => Some((-u).exp()),
            Self::LogQuotient { p } => {
                let w = u + log_quotient_shift(*p);
                Some(w.ln() / w.powf(p - 1.0))
            }
            Self::LogWeightedInverse { alpha, dim } => {
                let v = g_inverse(*alpha, u).ok()?;
                Some(v.powf(-2.0 / *dim as f64))
            }
            _ => None,
        }
    }

    /// Closed-form inverse of the tail where available.
    pub fn closed_form_tail_inverse(&self, v: f64) -> Option<f64> {
        match self {
            Self::Power { p } if *p > 1.0 => Some(((p - 1.0) * v).powf(-1.0 / (p - 1.0))),
            Self::LogPerturbedPower { p, beta } if *p > 1.0 && *beta == 0.0 => {
                Some(((p - 1.0) * v).powf(-1.0 / (p - 1.0)))
            }
            Self::ExpPower { p } if *p == 1.0 && v <= 1.0 => Some(-v.ln()),
            Self::LogWeightedInverse { alpha, dim } => Some(g(*alpha, v.powf(-(*dim as f64) / 2.0))),
            _ => None,
        }
    }

    /// Whether the kind can have `F(u) = ∞` (slowly growing `f`).
    pub fn tail_known_divergent(&self) -> bool {
        match self {
            Self::Power { p } => *p <= 1.0,
            Self::LogPerturbedPower { p, beta } => *p < 1.0 || (*p == 1.0 && *beta <= 1.0),
            Self::Zero => true,
            _ => false,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Self::Power { p } => format!("u^{p}"),
            Self::LogPerturbedPower { p, beta } => format!("u^{p}[log(u+e)]^{beta}"),
            Self::ExpPower { p } => format!("exp(u^{p})"),
            Self::ExpLogPower { p } => format!("exp(|log u|^{} log u)", p - 1.0),
            Self::LogQuotient { p } => format!("(u+a)^{p}/((p-1)log(u+a)-1), p={p}"),
            Self::IteratedExp { n } => format!("exp^{n}(u)"),
            Self::LogWeightedInverse { alpha, dim } => format!("log-weighted inverse (alpha={alpha}, N={dim})"),
            Self::Tabulated { u, .. } => format!("tabulated ({} samples)", u.len()),
            Self::Zero => "0".into(),
        }
    }
}

/// `a = e^{2/(p−1)}`, the shift that makes the log-quotient denominator ≥ 1.
pub fn log_quotient_shift(p: f64) -> f64 {
    (2.0 / (p - 1.0)).exp()
}

fn iterate_exp(u: f64, times: u32) -> f64 {
    let mut e = u;
    for _ in 0..times {
        e = e.exp();
    }
    e
}

fn tabulated_ln(us: &[f64], f: &[f64], u: f64) -> f64 {
    let k = match us.binary_search_by(|x| x.total_cmp(&u)) {
        Ok(k) => return f[k].ln(),
        Err(k) => k.clamp(1, us.len() - 1),
    };
    let (u0, u1) = (us[k - 1], us[k]);
    let (l0, l1) = (f[k - 1].ln(), f[k].ln());
    l0 + (l1 - l0) * (u - u0) / (u1 - u0)
}

/// `g(v) = v[log(v+e)]^α`.
pub fn g(alpha: f64, v: f64) -> f64 {
    v * (v + E).ln().powf(alpha)
}

/// `g'(v)`.
pub fn g_prime(alpha: f64, v: f64) -> f64 {
    let l = (v + E).ln();
    l.powf(alpha) + alpha * v * l.powf(alpha - 1.0) / (v + E)
}

/// `g''(v)`.
pub fn g_second(alpha: f64, v: f64) -> f64 {
    let w = v + E;
    let l = w.ln();
    alpha * l.powf(alpha - 1.0) / w * (2.0 - v / w + (alpha - 1.0) * v / (w * l))
}

/// Inverse of `g` by bracketed Brent iteration.
pub fn g_inverse(alpha: f64, u: f64) -> Result<f64> {
    if u <= 0.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(u);
    }
    // g(v) ≥ v so the root lies in (0, u]; g(v) ≈ v (log v)^α gives a start
    let guess = u / (u + E).ln().powf(alpha).max(1.0);
    let lo = (0.5 * guess).min(u);
    let phi = |x: f64| (g(alpha, x) / u).ln();
    let (a, b) = roots::expand_bracket(phi, lo.max(f64::MIN_POSITIVE), u.max(lo * 2.0), f64::MIN_POSITIVE, u * 2.0)?;
    roots::brent(phi, a, b, 1e-16 * u.max(1e-300), 300)
}
