//! Ball integrals of radial profiles near their singularity.
//!
//! Radial integrals `∫_0^ρ w(s) ds` are taken in `t = log(1/s)`, where the
//! integrand becomes `s·w(s)` and the singular end is `t → ∞`: 60 annuli
//! `s ∈ [ρ2^{−k−1}, ρ2^{−k}]`, then `t = t_K e^z` in unit chunks of `z` as far
//! as the integrand evaluates, then a fitted `C t^{−λ}(log t)^μ e^{κ log t/t}` continuation.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::profile::{ProfileCore, ProfileEval};
use crate::classifier::monitor::Monitor;
use crate::error::{Error, Result};
use crate::numerics::quadrature::{adaptive, exponential_tail};
use crate::numerics::special::sphere_area;
use crate::numerics::QuadratureConfig;

/// Dyadic annuli summed before the tail substitution.
pub const ANNULI: usize = 60;

/// A radial integral with its convergence diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreIntegral {
    #[serde(with = "crate::numerics::extended")]
    pub value: f64,
    /// Contribution of `t` beyond the annuli.
    #[serde(with = "crate::numerics::extended")]
    pub tail: f64,
    /// Local exponent `λ` of `s·w(s) ~ (log 1/s)^{−λ}` at the innermost annulus.
    #[serde(with = "crate::numerics::extended")]
    pub log_exponent: f64,
    pub divergent: bool,
}

fn capture<'a>(f: &'a dyn Fn(f64) -> Result<f64>, err: &'a std::cell::RefCell<Option<Error>>) -> impl FnMut(f64) -> f64 + 'a {
    move |t| match f(t) {
        Ok(v) => v.exp(),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    }
}

/// `∫_{t_lo}^∞ exp(ln_phi(t)) dt`, split at `breaks`.
pub fn log_radial_integral(
    ln_phi: &dyn Fn(f64) -> Result<f64>,
    t_lo: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<CoreIntegral> {
    let ln2 = std::f64::consts::LN_2;
    let mut nodes: Vec<f64> = (0..=ANNULI).map(|k| t_lo + k as f64 * ln2).collect();
    let mut t_end = *nodes.last().unwrap();
    for &b in breaks {
        if b > t_lo {
            nodes.push(b);
            if b >= t_end {
                t_end = b + ln2;
                nodes.push(t_end);
            }
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let err = std::cell::RefCell::new(None);
    let mut sum = 0.0;
    for w in nodes.windows(2) {
        let g = capture(ln_phi, &err);
        sum += adaptive(g, w[0], w[1], cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)?.value;
    }
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    // how far out the integrand can still be evaluated; past t = 1e4 the
    // cancellation in N t − ln J(u) eats the relative accuracy
    // keep a margin below the edge of the evaluable range
    let ok = |t: f64| ln_phi(1.1 * t).map_or(false, |v| v.is_finite());
    let mut t_max = t_end;
    while 2.0 * t_max <= 1e4 && ok(2.0 * t_max) {
        t_max *= 2.0;
    }
    let mut hi = (2.0 * t_max).min(1e4);
    if hi > t_max && !ok(hi) {
        for _ in 0..30 {
            let mid = 0.5 * (t_max + hi);
            if ok(mid) {
                t_max = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut tail = 0.0;
    let z_cap = (t_max / t_end).ln();
    let chunks = z_cap.ceil() as usize;
    for k in 0..chunks {
        let (z0, z1) = (k as f64, ((k + 1) as f64).min(z_cap));
        let g = |z: f64| -> f64 {
            let t = t_end * z.exp();
            match ln_phi(t) {
                Ok(v) => (v + t.ln()).exp(),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        tail += adaptive(g, z0, z1, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)?.value;
    }
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    // beyond t_max: ln φ ≈ C − λ ln t + μ ln ln t + κ ln t/t through four points
    let t_a = (t_max / 8.0).max(0.5 * (t_lo + t_end));
    let ts: [f64; 4] = std::array::from_fn(|i| t_a * (t_max / t_a).powf(i as f64 / 3.0));
    let basis = |t: f64| [1.0, -t.ln(), t.ln().ln(), t.ln() / t];
    let mut vals = [0.0; 4];
    for (v, &t) in vals.iter_mut().zip(&ts) {
        *v = ln_phi(t)?;
    }
    if vals.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Ok(CoreIntegral { value: sum + tail, tail, log_exponent: f64::INFINITY, divergent: false });
    }
    let m = Matrix4::from_fn(|i, j| basis(ts[i])[j]);
    // plain power law through the last two points
    let lam_local = -(vals[3] - vals[2]) / (ts[3] / ts[2]).ln();
    let power_law = Vector4::new(vals[3] + lam_local * ts[3].ln(), lam_local, 0.0, 0.0);
    let coef = match m.lu().solve(&Vector4::from(vals)) {
        // short fit ranges make the correction terms ill-conditioned
        Some(c) if c.iter().all(|v| v.is_finite()) && (c[1] - lam_local).abs() <= 0.5 => c,
        _ => power_law,
    };
    let lambda = coef[1];
    let model = |z: f64| -> f64 {
        let t = t_max * z.exp();
        let b = basis(t);
        ((0..4).map(|j| coef[j] * b[j]).sum::<f64>() + t.ln()).exp()
    };
    let far = if lambda.is_finite() && lambda > 1.0 {
        exponential_tail(model, 0.0, 700.0, 1e-12, cfg.max_subdivisions)?
    } else {
        None
    };
    Ok(match far {
        Some(far) => {
            let tail = tail + far.value;
            CoreIntegral { value: sum + tail, tail, log_exponent: lambda, divergent: false }
        }
        None => CoreIntegral { value: f64::INFINITY, tail: f64::INFINITY, log_exponent: lambda, divergent: true },
    })
}

/// Radii where the profile switches branch, as `t = log(1/s)`.
fn profile_breaks(ev: &ProfileEval) -> Vec<f64> {
    let p = ev.profile();
    [p.cutoff, p.truncation].iter().flatten().map(|s| -s.ln()).collect()
}

/// `∫_0^ρ u₀(s)^r s^{N−1} ds`.
fn radial_power_integral(ev: &ProfileEval, r: f64, rho: f64, cfg: &QuadratureConfig) -> Result<CoreIntegral> {
    let n = ev.profile().dim as f64;
    let ln_phi = |t: f64| -> Result<f64> { Ok(r * ev.ln_value_t(t)? - n * t) };
    log_radial_integral(&ln_phi, -rho.ln(), &profile_breaks(ev), cfg)
}

/// `(N−1)`-measure of `{|x| = s} ∩ B(y, 1)` divided by `s^{N−1}`, `|y| = d`.
fn sphere_fraction(dim: u32, s: f64, d: f64) -> f64 {
    if dim == 1 {
        return (((s - d).abs() < 1.0) as u8 + ((s + d) < 1.0) as u8) as f64;
    }
    if s + d <= 1.0 {
        return sphere_area(dim);
    }
    if s >= 1.0 + d || s <= d - 1.0 {
        return 0.0;
    }
    let c = ((s * s + d * d - 1.0) / (2.0 * s * d)).clamp(-1.0, 1.0);
    let theta = c.acos();
    match dim {
        2 => 2.0 * theta,
        3 => 2.0 * std::f64::consts::PI * (1.0 - c),
        _ => {
            let k = dim as i32 - 2;
            let a = adaptive(|x: f64| x.sin().powi(k), 0.0, theta, 1e-300, 1e-13, 200).map(|e| e.value).unwrap_or(f64::NAN);
            sphere_area(dim - 1) * a
        }
    }
}

/// `∫_{B(y,1)} u₀^r` for a center at distance `d ≠ 1` from the origin.
pub fn off_center_ball_integral(ev: &ProfileEval, r: f64, d: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let dim = ev.profile().dim;
    let n = dim as f64;
    let mut total = 0.0;
    let lo = (d - 1.0).abs();
    if d < 1.0 {
        total += sphere_area(dim) * radial_power_integral(ev, r, 1.0 - d, cfg)?.value;
    }
    let mut pts = vec![lo, d + 1.0];
    let p = ev.profile();
    for b in [p.cutoff, p.truncation].iter().flatten() {
        if *b > lo && *b < d + 1.0 {
            pts.push(*b);
        }
    }
    pts.sort_by(f64::total_cmp);
    let err = std::cell::RefCell::new(None);
    for w in pts.windows(2) {
        let g = |s: f64| -> f64 {
            if s <= 0.0 {
                return 0.0;
            }
            match ev.ln_value_t(-s.ln()) {
                Ok(l) => (r * l).exp() * s.powf(n - 1.0) * sphere_fraction(dim, s, d),
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        total += adaptive(g, w[0], w[1], cfg.abs_tol, 1e-10, cfg.max_subdivisions.max(1000))?.value;
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UlMethod {
    RadialReduction,
    GridSup,
}

/// `‖u₀‖_{L^r_ul} = sup_y (∫_{B(y,1)} u₀^r)^{1/r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ULNormEstimate {
    pub r: f64,
    #[serde(with = "crate::numerics::extended")]
    pub value: f64,
    /// Distance of the maximizing center from the origin.
    pub center_argmax: f64,
    pub method: UlMethod,
    /// Local exponent of the core integrand when the origin integral diverges.
    pub divergence_exponent: Option<f64>,
    /// `(d, ball integral^{1/r})` at the off-origin centers sampled.
    pub off_center: Vec<(f64, f64)>,
}

/// Off-origin centers of the grid-sup cross-check.
pub const GRID_CENTERS: [f64; 8] = [0.1, 0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 5.0];

pub fn ul_norm(ev: &ProfileEval, r: f64, cfg: &QuadratureConfig) -> Result<ULNormEstimate> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("ul norm needs r >= 1, got {r}")));
    }
    let area = sphere_area(ev.profile().dim);
    let origin = radial_power_integral(ev, r, 1.0, cfg)?;
    if origin.divergent {
        return Ok(ULNormEstimate {
            r,
            value: f64::INFINITY,
            center_argmax: 0.0,
            method: UlMethod::RadialReduction,
            divergence_exponent: Some(origin.log_exponent),
            off_center: Vec::new(),
        });
    }
    let origin_value = (area * origin.value).powf(1.0 / r);
    let mut off_center = Vec::with_capacity(GRID_CENTERS.len());
    for d in GRID_CENTERS {
        off_center.push((d, off_center_ball_integral(ev, r, d, cfg)?.powf(1.0 / r)));
    }
    let nonincreasing = ev.monotonicity_defect(1e-6, 10.0)? <= 1e-12;
    let best = off_center.iter().cloned().fold((0.0, origin_value), |b, c| if c.1 > b.1 { c } else { b });
    let method = if nonincreasing { UlMethod::RadialReduction } else { UlMethod::GridSup };
    let (center_argmax, value) = if nonincreasing { (0.0, origin_value) } else { best };
    Ok(ULNormEstimate { r, value, center_argmax, method, divergence_exponent: None, off_center })
}

/// `∫_{B(0,ρ)} J(u₀)` with its closed form when the pair is the model integrand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularIntegral {
    pub rho: f64,
    /// Including the sphere area.
    #[serde(with = "crate::numerics::extended")]
    pub value: f64,
    /// `∫_0^ρ J(u₀(s)) s^{N−1} ds`.
    #[serde(with = "crate::numerics::extended")]
    pub radial_value: f64,
    /// `(log 1/ρ)^{1−λ}/(λ−1)` for `J = id` and the core `s^{−N}(log 1/s)^{−λ}`.
    pub closed_form: Option<f64>,
    pub rel_error: Option<f64>,
    pub divergent: bool,
    #[serde(with = "crate::numerics::extended")]
    pub log_exponent: f64,
}

pub fn singular_integrability(ev: &ProfileEval, monitor: &Monitor, rho: f64, cfg: &QuadratureConfig) -> Result<SingularIntegral> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("ball radius must lie in (0, 1), got {rho}")));
    }
    let p = ev.profile();
    let n = p.dim as f64;
    let ln_phi = |t: f64| -> Result<f64> { Ok(monitor.ln_value_of_ln(ev.ln_value_t(t)?)? - n * t) };
    let core = log_radial_integral(&ln_phi, -rho.ln(), &profile_breaks(ev), cfg)?;
    let model = matches!(monitor.spec(), crate::classifier::monitor::MonitorSpec::Identity)
        && p.truncation.is_none()
        && p.cutoff.map_or(false, |m| rho <= m);
    let closed_form = match p.core {
        ProfileCore::LogPowerCore { a, lambda } if model && a == n && lambda > 1.0 => {
            Some((-rho.ln()).ln().mul_add(1.0 - lambda, 0.0).exp() / (lambda - 1.0))
        }
        _ => None,
    };
    let rel_error = closed_form.map(|c| ((core.value - c) / c).abs());
    Ok(SingularIntegral {
        rho,
        value: sphere_area(p.dim) * core.value,
        radial_value: core.value,
        closed_form,
        rel_error,
        divergent: core.divergent,
        log_exponent: core.log_exponent,
    })
}

/// One level `φ_n` of the truncation sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    pub n: u32,
    pub radius: f64,
    /// `‖u₀ − φ_n‖_{L¹_ul}`.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureMembership {
    pub in_closure_likely: bool,
    pub inconclusive: bool,
    #[serde(with = "crate::numerics::extended")]
    pub l1_ul_norm: f64,
    /// Slope of `log error` against `log log(1/radius)` over the last ten levels.
    pub decay_exponent: f64,
    pub truncation_trace: Vec<TruncationStep>,
}

/// Truncation levels examined by the closure heuristic.
pub const TRUNCATION_LEVELS: u32 = 40;

/// Whether `‖u₀ − φ_n‖_{L¹_ul} → 0` for the truncations `φ_n`.
///
/// Likely when the error is monotone over the last ten levels and either drops
/// below `10⁻⁴` or decays like a negative power of `log(1/radius)`.
pub fn closure_membership_heuristic(ev: &ProfileEval, cfg: &QuadratureConfig) -> Result<ClosureMembership> {
    let p = ev.profile();
    let n = p.dim as f64;
    let norm = ul_norm(ev, 1.0, cfg)?;
    let mut trace = Vec::new();
    if norm.value.is_finite() {
        let area = sphere_area(p.dim);
        let m = p.cutoff.unwrap_or(1.0).min(1.0);
        for k in 0..=TRUNCATION_LEVELS {
            let radius = m * 0.5f64.powi(k as i32);
            let tr = -radius.ln();
            let lc = ev.ln_value_t(tr)?;
            let ln_phi = |t: f64| -> Result<f64> {
                let d = ev.ln_value_t(t)? - lc;
                Ok(if d > 0.0 { d.exp_m1().ln() + lc - n * t } else { f64::NEG_INFINITY })
            };
            let c = log_radial_integral(&ln_phi, tr, &profile_breaks(ev), cfg)?;
            trace.push(TruncationStep { n: k, radius, error: area * c.value });
        }
    }
    let last: Vec<&TruncationStep> = trace.iter().rev().take(10).collect();
    let monotone = last.len() == 10 && last.windows(2).all(|w| w[0].error <= w[1].error * (1.0 + 1e-9));
    let small = last.first().map_or(false, |s| s.error < 1e-4);
    let decay_exponent = if last.len() == 10 && last.iter().all(|s| s.error > 0.0) {
        let xs: Vec<f64> = last.iter().map(|s| (-s.radius.ln()).ln()).collect();
        let ys: Vec<f64> = last.iter().map(|s| s.error.ln()).collect();
        crate::numerics::extrapolate::slope(&xs, &ys)
    } else {
        f64::NEG_INFINITY
    };
    let likely = norm.value.is_finite() && monotone && (small || decay_exponent < -0.05);
    Ok(ClosureMembership {
        in_closure_likely: likely,
        inconclusive: norm.value.is_finite() && !likely,
        l1_ul_norm: norm.value,
        decay_exponent,
        truncation_trace: trace,
    })
}
