//! The exponents `q = lim f'F` and `p = lim uf'/f`, the bound `f'F ≤ q`, and
//! the Karamata representation of `f`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::extrapolate::{self, LimitEstimate};
use crate::numerics::{quadrature, QuadratureConfig};

use super::spec::NonlinearitySpec;
use super::tail::{self, LN_U_MAX};

/// Default "large u" window for hypothesis checks.
pub const DEFAULT_WINDOW: (f64, f64) = (1e3, 1e9);

/// One row of the auditable diagnostic sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub u: f64,
    pub f: f64,
    pub f_prime: f64,
    #[serde(rename = "F")]
    pub tail: f64,
    #[serde(rename = "fprime_F")]
    pub f_prime_tail: f64,
}

/// Worst case of `f'F − q` over a geometric sample of a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `max (f'F − q)` over the samples; `≤ slack` when the bound holds.
    pub worst_excess: f64,
    pub worst_u: f64,
    pub window: (f64, f64),
}

/// Samples of the Karamata representation `f(u) = b(u) exp(∫_{u0}^u a(s)/s ds)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KaramataProfile {
    pub base: f64,
    pub u: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Extrapolated `lim a(u)`; infinite for rapidly varying `f`.
    #[serde(with = "crate::numerics::extended")]
    pub a_limit: f64,
    pub b_limit: f64,
    /// Index from the ratio tests `f(λu)/f(u) → λ^p`, `λ ∈ {2, 4}`.
    #[serde(with = "crate::numerics::extended")]
    pub rv_index: f64,
    /// `max |b(u)/b(u0) − 1|`: quadrature consistency of the representation.
    pub representation_residual: f64,
}

/// Computed exponents with their audit trail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub q_estimate: f64,
    pub q_uncertainty: f64,
    /// Acceleration of the plain sequence `u = 10²·2^k` (cross-check).
    pub q_geometric: Option<f64>,
    #[serde(with = "crate::numerics::extended")]
    pub p_estimate: f64,
    pub converged: bool,
    pub conjugacy_residual: f64,
    pub diagnostic: Vec<DiagnosticRow>,
    /// `(ln u, f'F)` on the log-scale sequence used for extrapolation.
    pub log_scale_sequence: Vec<(f64, f64)>,
    pub bound: BoundCheck,
    pub karamata: KaramataProfile,
}

fn log_scale_values<F: FnMut(f64) -> Result<f64>>(g: F) -> Vec<(f64, f64)> {
    log_scale_values_from(100f64.ln(), g)
}

/// `(x, g(x))` along `x = x0·2^{j/3}` up to 650, stopping at the first
/// failure or non-finite value.
pub(crate) fn log_scale_values_from<F: FnMut(f64) -> Result<f64>>(x0: f64, mut g: F) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for x in extrapolate::log_scale_points(x0, 3, 650.0) {
        match g(x) {
            Ok(v) if v.is_finite() => out.push((x, v)),
            _ => break,
        }
    }
    out
}

/// Limit of `y` as `x → ∞` by polynomial extrapolation in `1/x`.
pub(crate) fn limit_in_inverse_log(seq: &[(f64, f64)]) -> Option<LimitEstimate> {
    let x: Vec<f64> = seq.iter().map(|p| 1.0 / p.0).collect();
    let y: Vec<f64> = seq.iter().map(|p| p.1).collect();
    extrapolate::limit_at_zero(&x, &y)
}

/// `lim f'(u)F(u)` by polynomial extrapolation in `1/log u` along
/// `log u = log(100)·2^{j/3}`.
pub fn q_limit(spec: &NonlinearitySpec, cfg: &QuadratureConfig) -> Result<(LimitEstimate, Vec<(f64, f64)>)> {
    // surface a hard failure (divergent tail, tabulated) before sampling
    tail::f_prime_tail(spec, 100.0, cfg)?;
    let seq = log_scale_values(|x| tail::f_prime_tail(spec, x.exp(), cfg));
    let est = limit_in_inverse_log(&seq).unwrap_or(LimitEstimate { value: f64::NAN, uncertainty: f64::INFINITY });
    Ok((est, seq))
}

fn growth_limit(spec: &NonlinearitySpec, q: f64) -> f64 {
    let seq = log_scale_values(|x| Ok(x.exp() * spec.log_derivative(x.exp())?));
    if seq.is_empty() {
        return f64::NAN;
    }
    let last = seq.last().unwrap().1;
    let growing = seq.windows(2).rev().take(4).all(|w| w[1].1 > w[0].1 * 1.5);
    if (q - 1.0).abs() < 1e-6 || last > 1e6 || (growing && last > 50.0) {
        return f64::INFINITY;
    }
    limit_in_inverse_log(&seq).map(|l| l.value).unwrap_or(f64::NAN)
}

/// Exponents, diagnostics and hypothesis checks for one nonlinearity.
pub fn exponent_profile(spec: &NonlinearitySpec, cfg: &QuadratureConfig) -> Result<ExponentProfile> {
    spec.validate()?;
    let (q_est, seq) = q_limit(spec, cfg)?;
    let mut q = q_est.value;
    // q ≥ 1 always; absorb extrapolation noise just below 1
    if q < 1.0 && q > 1.0 - 1e-6 {
        q = 1.0;
    }
    let mut diagnostic = Vec::new();
    for k in 0..=20 {
        let u = 100.0 * 2f64.powi(k);
        let i = match tail::scaled_tail(spec, u, cfg) {
            Ok(i) => i.value,
            Err(_) => break,
        };
        let lf = spec.ln_value(u)?;
        let ld = spec.log_derivative(u)?;
        diagnostic.push(DiagnosticRow {
            u,
            f: lf.exp(),
            f_prime: ld * lf.exp(),
            tail: (i.ln() - lf).exp(),
            f_prime_tail: ld * i,
        });
    }
    let q_geometric = extrapolate::aitken(&diagnostic.iter().map(|r| r.f_prime_tail).collect::<Vec<_>>());
    let p = growth_limit(spec, q);
    let conjugacy_residual = (1.0 / p + 1.0 / q - 1.0).abs();
    let bound = check_fprime_tail_bound(spec, q, DEFAULT_WINDOW, cfg)?;
    let karamata = karamata_profile(spec, 10.0, cfg)?;
    let converged = q.is_finite() && q_est.uncertainty <= 1e-4 * q.max(1.0);
    Ok(ExponentProfile {
        q_estimate: q,
        q_uncertainty: q_est.uncertainty,
        q_geometric,
        p_estimate: p,
        converged,
        conjugacy_residual,
        diagnostic,
        log_scale_sequence: seq,
        bound,
        karamata,
    })
}

/// Check `f'(u)F(u) ≤ q` on 64 geometric samples of `window`.
pub fn check_fprime_tail_bound(
    spec: &NonlinearitySpec,
    q: f64,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<BoundCheck> {
    let (lo, hi) = window;
    let n = 64;
    let slack = 1e-9 * q.abs().max(1.0);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_u = lo;
    for k in 0..n {
        let u = lo * (hi / lo).powf(k as f64 / (n - 1) as f64);
        let v = match tail::f_prime_tail(spec, u, cfg) {
            Ok(v) => v,
            Err(crate::Error::NonFinite(_)) => continue,
            Err(e) => return Err(e),
        };
        if v - q > worst {
            worst = v - q;
            worst_u = u;
        }
    }
    Ok(BoundCheck { holds: worst <= slack, worst_excess: worst, worst_u, window })
}

/// Karamata representation with base point `u0` on `u = u0·2^k`.
pub fn karamata_profile(spec: &NonlinearitySpec, u0: f64, cfg: &QuadratureConfig) -> Result<KaramataProfile> {
    let a_of = |x: f64| -> f64 {
        let u = x.exp();
        spec.log_derivative(u).map(|l| u * l).unwrap_or(f64::NAN)
    };
    let ln_b0 = spec.ln_value(u0)?;
    let mut us = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut integral = 0.0;
    let mut residual: f64 = 0.0;
    let mut x_prev = u0.ln();
    for k in 0..=26 {
        let u = u0 * 2f64.powi(k);
        let x = u.ln();
        let lf = match spec.ln_value(u) {
            Ok(v) if v.is_finite() => v,
            _ => break,
        };
        if k > 0 {
            integral += quadrature::adaptive(a_of, x_prev, x, 1e-300, 1e-13, cfg.max_subdivisions)?.value;
        }
        x_prev = x;
        let ln_b = lf - integral;
        us.push(u);
        a.push(a_of(x));
        b.push(ln_b.exp());
        residual = residual.max(((ln_b - ln_b0).exp() - 1.0).abs());
    }
    let rv = rv_index(spec);
    let a_limit = if rv.is_infinite() {
        f64::INFINITY
    } else {
        let seq = log_scale_values(|x| Ok(a_of(x)));
        limit_in_inverse_log(&seq).map(|l| l.value).unwrap_or(f64::NAN)
    };
    Ok(KaramataProfile {
        base: u0,
        u: us,
        a,
        b,
        a_limit,
        b_limit: ln_b0.exp(),
        rv_index: rv,
        representation_residual: residual,
    })
}

/// Regular-variation index from `log(f(λu)/f(u))/log λ`, `λ ∈ {2, 4}`.
pub fn rv_index(spec: &NonlinearitySpec) -> f64 {
    let mut estimates = Vec::new();
    for lambda in [2.0f64, 4.0] {
        let seq = log_scale_values(|x| {
            let u = x.exp();
            if x + lambda.ln() > LN_U_MAX {
                return Ok(f64::NAN);
            }
            Ok(spec.ln_ratio(u, (lambda - 1.0) * u)? / lambda.ln())
        });
        if seq.is_empty() {
            return f64::NAN;
        }
        let last = seq.last().unwrap().1;
        let growing = seq.windows(2).rev().take(4).all(|w| w[1].1 > w[0].1 * 1.5);
        if last > 1e3 || (growing && last > 50.0) {
            return f64::INFINITY;
        }
        if let Some(l) = limit_in_inverse_log(&seq) {
            estimates.push(l.value);
        }
    }
    if estimates.is_empty() {
        return f64::NAN;
    }
    estimates.iter().sum::<f64>() / estimates.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_exponents() {
        let p = exponent_profile(&NonlinearitySpec::Power { p: 3.0 }, &QuadratureConfig::default()).unwrap();
        assert!((p.q_estimate - 1.5).abs() < 1e-8);
        assert!((p.p_estimate - 3.0).abs() < 1e-8);
        assert!(p.conjugacy_residual < 1e-8);
        assert!((p.karamata.rv_index - 3.0).abs() < 1e-8);
        assert!(p.karamata.a.iter().all(|a| (a - 3.0).abs() < 1e-12));
    }

    #[test]
    fn exponential_is_rapidly_varying() {
        let p = exponent_profile(&NonlinearitySpec::ExpPower { p: 1.0 }, &QuadratureConfig::default()).unwrap();
        assert!((p.q_estimate - 1.0).abs() < 1e-6);
        assert!(p.p_estimate.is_infinite());
        assert!(p.karamata.rv_index.is_infinite());
    }
}
