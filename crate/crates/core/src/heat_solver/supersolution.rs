//! Supersolution `ū(t) = J⁻¹((1+σ) S(t) J(u₁))` and Jensen's inequality for
//! the semigroup.

use serde::{Deserialize, Serialize};

use crate::classifier::Monitor;
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;

use super::grid::GridFunction;
use super::picard::{duhamel_march, time_grid, PicardOptions, StepOperators};
use super::semigroup::SemigroupOperator;

/// `u₁ = max{u₀, C₁, 1, ξ}`.
pub fn lift_datum(u0: &GridFunction, c1: f64, xi: f64) -> Result<GridFunction> {
    let floor = c1.max(1.0).max(xi);
    u0.map(|u| u.max(floor))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionCheck {
    pub holds: bool,
    /// `min (ū − S(t)u₀ − ∫₀ᵗ S(t−s) f(ū(s)) ds)` over the space-time grid.
    pub min_margin: f64,
    /// The same margin divided by `max(1, ū)` at each point.
    pub min_relative_margin: f64,
    pub worst_t: f64,
    pub worst_r: f64,
    pub sigma: f64,
    pub time_levels: usize,
    /// `(t, min relative margin at t)` for every time after `0`.
    pub margins: Vec<(f64, f64)>,
}

/// Evaluate both sides of `ū(t) − S(t)u₀ ≥ ∫₀ᵗ S(t−s) f(ū(s)) ds` on the time
/// grid of `opts`; `holds` when the relative margin stays above `−tol`.
pub fn verify_supersolution(
    f: &NonlinearitySpec,
    j: &Monitor,
    sigma: f64,
    u0: &GridFunction,
    u1: &GridFunction,
    opts: &PicardOptions,
    tol: f64,
) -> Result<SupersolutionCheck> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    opts.validate()?;
    let grid = u0.grid().clone();
    let times = time_grid(opts, grid.time_floor());
    let ops = StepOperators::new(&grid, &times)?;
    let zeros = vec![vec![0.0; grid.len()]; times.len()];
    let ju1 = u1.try_map(|u| j.value(u))?;
    let (sj, _) = duhamel_march(&ops, &times, ju1.values(), &zeros, f64::INFINITY);
    let (su0, _) = duhamel_march(&ops, &times, u0.values(), &zeros, f64::INFINITY);
    let ln_lift = sigma.ln_1p();
    let mut bar = Vec::with_capacity(times.len());
    let mut source = Vec::with_capacity(times.len());
    for level in &sj {
        let mut b = Vec::with_capacity(level.len());
        let mut s = Vec::with_capacity(level.len());
        for &y in level {
            let u = j.inverse_ln(ln_lift + y.ln())?;
            b.push(u);
            s.push(f.value(u)?);
        }
        bar.push(b);
        source.push(s);
    }
    let zero = vec![0.0; grid.len()];
    let (duhamel, overflow) = duhamel_march(&ops, &times, &zero, &source, f64::INFINITY);
    if overflow.is_some() {
        return Err(Error::NonFinite("Duhamel term of the supersolution".into()));
    }
    let mut check = SupersolutionCheck {
        holds: true,
        min_margin: f64::INFINITY,
        min_relative_margin: f64::INFINITY,
        worst_t: 0.0,
        worst_r: 0.0,
        sigma,
        time_levels: times.len(),
        margins: Vec::with_capacity(times.len() - 1),
    };
    for k in 1..times.len() {
        let mut level_min = f64::INFINITY;
        for (i, &r) in grid.nodes().iter().enumerate() {
            let m = bar[k][i] - su0[k][i] - duhamel[k][i];
            let rel = m / bar[k][i].max(1.0);
            level_min = level_min.min(rel);
            check.min_margin = check.min_margin.min(m);
            if rel < check.min_relative_margin {
                check.min_relative_margin = rel;
                check.worst_t = times[k];
                check.worst_r = r;
            }
        }
        check.margins.push((times[k], level_min));
    }
    check.holds = check.min_relative_margin >= -tol;
    Ok(check)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenCheck {
    /// `max (J(S(t)φ) − S(t)J(φ))` for convex `J`, sign flipped for concave.
    pub max_violation: f64,
    pub worst_r: f64,
    pub t: f64,
}

/// Pointwise `J(S(t)φ) ≤ S(t)J(φ)` (or `≥` with `concave`) on the grid.
pub fn jensen_check(j: &Monitor, phi: &GridFunction, t: f64, concave: bool) -> Result<JensenCheck> {
    let op = SemigroupOperator::new(phi.grid(), t)?;
    let lhs = op.apply(phi)?.try_map(|u| j.value(u))?;
    let rhs = op.apply(&phi.try_map(|u| j.value(u))?)?;
    let sign = if concave { -1.0 } else { 1.0 };
    let mut out = JensenCheck { max_violation: f64::NEG_INFINITY, worst_r: 0.0, t };
    for ((&a, &b), &r) in lhs.values().iter().zip(rhs.values()).zip(phi.grid().nodes()) {
        let v = sign * (a - b);
        if v > out.max_violation {
            out.max_violation = v;
            out.worst_r = r;
        }
    }
    Ok(out)
}
