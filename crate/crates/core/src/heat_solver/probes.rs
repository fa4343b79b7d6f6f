//! Smoothing-rate fits and the scaling of the critical norm for `f = u^p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::extrapolate::slope;
use crate::numerics::quadrature::adaptive;
use crate::numerics::special::sphere_area;

use super::grid::GridFunction;
use super::semigroup::SemigroupOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingProbe {
    pub r_from: f64,
    #[serde(with = "crate::numerics::extended")]
    pub r_to: f64,
    /// Least-squares slope of `log ‖S(t)φ‖_{r_to,ul}` against `log t`.
    pub slope: f64,
    /// `−(N/2)(1/r_from − 1/r_to)`.
    pub predicted: f64,
    pub norms: Vec<(f64, f64)>,
    /// Norms flat to `10⁻⁶` relative: the datum is already smooth.
    pub degenerate: bool,
}

/// Fit the decay rate of `‖S(t)φ‖_{r_to,ul}` over the times `ts`.
pub fn smoothing_exponent_probe(phi: &GridFunction, r_from: f64, r_to: f64, ts: &[f64]) -> Result<SmoothingProbe> {
    if !(r_from >= 1.0 && r_to >= r_from) || ts.len() < 2 {
        return Err(Error::InvalidParameter(format!("need 1 ≤ r_from ≤ r_to and two times (r_from={r_from}, r_to={r_to})")));
    }
    let n = phi.grid().dim() as f64;
    let mut norms = Vec::with_capacity(ts.len());
    for &t in ts {
        let v = SemigroupOperator::new(phi.grid(), t)?.apply(phi)?;
        norms.push((t, v.ul_norm(r_to, 1.0)));
    }
    let x: Vec<f64> = norms.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|p| p.1.ln()).collect();
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let degenerate = hi - lo < 1e-6;
    let s = if degenerate { 0.0 } else { slope(&x, &y) };
    Ok(SmoothingProbe { r_from, r_to, slope: s, predicted: -n / 2.0 * (1.0 / r_from - 1.0 / r_to), norms, degenerate })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub p: f64,
    pub lambda: f64,
    /// `r_c = N(p−1)/2`.
    pub r_c: f64,
    pub norm: f64,
    pub scaled_norm: f64,
    pub rel_error: f64,
}

/// `‖λ^{2/(p−1)} u₀(λ·)‖_{L^{r_c}(ℝ^N)}` against `‖u₀‖_{L^{r_c}(ℝ^N)}` for a
/// radial `u₀` supported in `B(0, support)`.
pub fn scaling_check<F: Fn(f64) -> f64>(u0: F, support: f64, p: f64, dim: u32, lambda: f64) -> Result<ScalingCheck> {
    if !(p > 1.0 && lambda > 0.0 && support > 0.0) {
        return Err(Error::InvalidParameter(format!("need p > 1, λ > 0 and a positive support (p={p}, λ={lambda})")));
    }
    let n = dim as f64;
    let r_c = n * (p - 1.0) / 2.0;
    let area = sphere_area(dim);
    let norm_of = |g: &dyn Fn(f64) -> f64, rad: f64| -> Result<f64> {
        let est = adaptive(|s: f64| g(s).abs().powf(r_c) * s.powi(dim as i32 - 1), 0.0, rad, 1e-300, 1e-13, 2000)?;
        Ok((area * est.value).powf(1.0 / r_c))
    };
    let norm = norm_of(&u0, support)?;
    let k = lambda.powf(2.0 / (p - 1.0));
    let scaled = |s: f64| k * u0(lambda * s);
    let scaled_norm = norm_of(&scaled, support / lambda)?;
    Ok(ScalingCheck { p, lambda, r_c, norm, scaled_norm, rel_error: ((scaled_norm - norm) / norm).abs() })
}
