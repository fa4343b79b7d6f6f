//! The blow-up functional `H(t)` with
//! `H' = (C₃/t)(log(1/t) + C₂(ρ))^β H^{1+2/N}` on `ρ² < t < ρ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{dopri5, OdeOptions, OdeStop};

use super::grid::GridFunction;
use super::semigroup::{apply_semigroup, gaussian};

/// `C₃ = 2^{−N/2}(N/2)^β`.
pub fn c3(beta: f64, dim: u32) -> f64 {
    let h = dim as f64 / 2.0;
    2f64.powf(-h) * h.powf(beta)
}

/// `C₂(ρ) = (2/N) log C₁ + (2/N)(−N(β+1)/2 − 1 + ε) log log(2/(3δ²ρ²))`.
///
/// `C₁` and `δ` come from the lower bound on the heat-smoothed data and have
/// no computable value; they are inputs here.
pub fn c2(beta: f64, dim: u32, eps: f64, rho: f64, c1: f64, delta: f64) -> f64 {
    let n = dim as f64;
    let inner = (2.0 / (3.0 * delta * delta * rho * rho)).ln().ln();
    2.0 / n * c1.ln() + 2.0 / n * (-n * (beta + 1.0) / 2.0 - 1.0 + eps) * inner
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupFunctional {
    pub beta: f64,
    pub dim: u32,
    pub rho: f64,
    pub c2: f64,
    pub c3: f64,
    pub h0: f64,
    /// `H(ρ²)` above which `H` must blow up before `t = ρ`.
    pub critical_h0: f64,
    /// `(t, H(t))` at the accepted steps.
    pub trajectory: Vec<(f64, f64)>,
    pub blowup_time: Option<f64>,
    /// Largest `|H − H_exact|/H_exact` along the trajectory.
    pub max_rel_error: f64,
    /// Largest residual of `(N/2)(H(ρ²)^{−2/N} − H(t)^{−2/N}) = (C₃/(β+1))[…]`
    /// relative to `(N/2)H(ρ²)^{−2/N}`.
    pub identity_residual: f64,
    pub nondecreasing: bool,
}

/// `(C₃/(β+1))[(log(1/ρ²) + C₂)^{β+1} − (log(1/t) + C₂)^{β+1}]`.
fn antiderivative_gap(beta: f64, c2: f64, c3: f64, ln_t0: f64, ln_t: f64) -> f64 {
    let a = -ln_t0 + c2;
    let b = -ln_t + c2;
    c3 / (beta + 1.0) * (a.powf(beta + 1.0) - b.powf(beta + 1.0))
}

/// Integrate `H` from `t = ρ²` toward `t = ρ` in the variable `ln t`.
pub fn integrate_h(beta: f64, dim: u32, rho: f64, h0: f64, c2v: f64) -> Result<BlowupFunctional> {
    if !(beta > 0.0 && rho > 0.0 && rho < 1.0 && h0 > 0.0 && dim >= 1) {
        return Err(Error::InvalidParameter(format!("need β > 0, 0 < ρ < 1, H₀ > 0 (β={beta}, ρ={rho}, H₀={h0})")));
    }
    let l = -rho.ln();
    if !(l + c2v > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log(1/ρ) + C₂ = {} is not positive; ρ is not small enough for these constants",
            l + c2v
        )));
    }
    let n = dim as f64;
    let c3v = c3(beta, dim);
    let (x0, x1) = (2.0 * rho.ln(), rho.ln());
    let gap_full = antiderivative_gap(beta, c2v, c3v, x0, x1);
    let critical_h0 = (2.0 / n * gap_full).powf(-n / 2.0);
    let guard = h0 * 1e12;
    let opts = OdeOptions { h_init: 1e-3 * (x1 - x0), ..OdeOptions::default() };
    let (traj, stop) = dopri5(|x, h| c3v * (-x + c2v).powf(beta) * h.powf(1.0 + 2.0 / n), x0, h0, x1, guard, opts)?;
    let blowup_time = match stop {
        OdeStop::Reached => None,
        OdeStop::Guard(x) | OdeStop::StepUnderflow(x) => Some(x.exp()),
    };
    let scale = n / 2.0 * h0.powf(-2.0 / n);
    let mut max_rel_error: f64 = 0.0;
    let mut identity_residual: f64 = 0.0;
    for &(x, h) in &traj[1..] {
        let gap = antiderivative_gap(beta, c2v, c3v, x0, x);
        let lhs = n / 2.0 * (h0.powf(-2.0 / n) - h.powf(-2.0 / n));
        identity_residual = identity_residual.max((lhs - gap).abs() / scale);
        let base = h0.powf(-2.0 / n) - 2.0 / n * gap;
        if base > 0.0 {
            let exact = base.powf(-n / 2.0);
            max_rel_error = max_rel_error.max((h - exact).abs() / exact);
        }
    }
    let nondecreasing = traj.windows(2).all(|w| w[1].1 >= w[0].1);
    Ok(BlowupFunctional {
        beta,
        dim,
        rho,
        c2: c2v,
        c3: c3v,
        h0,
        critical_h0,
        trajectory: traj.into_iter().map(|(x, h)| (x.exp(), h)).collect(),
        blowup_time,
        max_rel_error,
        identity_residual,
        nondecreasing,
    })
}

/// `H(ρ²) = c_* M_τ 3^{−N/2} G(0,1)` with `M_τ = ∫_{B(0,ρ)} S(τ)u₀`.
pub fn default_h0(u0: &GridFunction, rho: f64, tau: f64, c_star: f64) -> Result<f64> {
    let dim = u0.grid().dim();
    let m = apply_semigroup(u0, tau)?.ball_integral(rho, 1.0);
    Ok(c_star * m * 3f64.powf(-(dim as f64) / 2.0) * gaussian(dim, 0.0, 1.0))
}

/// Both sides of the final contradiction at one `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContradictionSides {
    pub rho: f64,
    pub c2: f64,
    /// `{((2L + C₂)/L)^{β+1} − ((L + C₂)/L)^{β+1}}^{−N/2}`, `L = log(1/ρ)`;
    /// NaN when `L + C₂ ≤ 0`.
    pub ratio: f64,
    /// `(2^{β+1} − 1)^{−N/2}`.
    pub limit: f64,
    /// `(log(1/ρ))^ε`.
    pub log_side: f64,
    /// `log_side / ratio`.
    pub separation: f64,
}

pub fn contradiction_sides(beta: f64, dim: u32, eps: f64, rho: f64, c1: f64, delta: f64) -> ContradictionSides {
    let n = dim as f64;
    let l = -rho.ln();
    let c2v = c2(beta, dim, eps, rho, c1, delta);
    let ratio = if l + c2v > 0.0 {
        (((2.0 * l + c2v) / l).powf(beta + 1.0) - ((l + c2v) / l).powf(beta + 1.0)).powf(-n / 2.0)
    } else {
        f64::NAN
    };
    let log_side = l.powf(eps);
    ContradictionSides {
        rho,
        c2: c2v,
        ratio,
        limit: (2f64.powf(beta + 1.0) - 1.0).powf(-n / 2.0),
        log_side,
        separation: log_side / ratio,
    }
}
