//! Sampling-based checks of the structural hypotheses on `f` and `J`.
//!
//! "For large u" always means a geometric window, default `[10³, 10⁹]`,
//! extended along `log u = x0·2^{j/3}` where a limit is needed.

use serde::{Deserialize, Serialize};

use super::monitor::Monitor;
use crate::error::{Error, Result};
use crate::nonlinearity::exponents::{limit_in_inverse_log, log_scale_values_from};
use crate::nonlinearity::spec::{g, g_inverse, g_prime, g_second};
use crate::nonlinearity::tail::{self, LN_U_MAX};
use crate::nonlinearity::NonlinearitySpec;
use crate::numerics::extrapolate::{self, LimitEstimate};
use crate::numerics::{quadrature, QuadratureConfig};

/// Running-sup grid density (points per decade of `u`).
pub const SUP_GRID_PER_DECADE: usize = 10_000;

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `∫_{w}^{∞} exp(S(ω) + W(ω)) dω` in `ω = ln τ`, where `S` is the running
/// maximum of `sup_arg` from `w_start`.
struct SupTail {
    w: Vec<f64>,
    /// Running maximum of the second tracked function (for `J̃`).
    running_aux: Vec<f64>,
    /// `ln ∫_{w_i}^{w_top}` of the integrand.
    ln_inner: Vec<f64>,
    /// `ln ∫_{w_top}^{∞}`, `None` when divergent.
    ln_beyond: Option<f64>,
}

impl SupTail {
    fn ln_tail_at(&self, i: usize) -> f64 {
        match self.ln_beyond {
            Some(b) => log_add(self.ln_inner[i], b),
            None => f64::INFINITY,
        }
    }
}

fn sup_tail(
    sup_arg: &dyn Fn(f64) -> Result<f64>,
    aux: &dyn Fn(f64) -> Result<f64>,
    weight: &dyn Fn(f64) -> Result<f64>,
    w_start: f64,
    w_top: f64,
) -> Result<SupTail> {
    let h = std::f64::consts::LN_10 / SUP_GRID_PER_DECADE as f64;
    let n = ((w_top - w_start) / h).ceil().max(1.0) as usize;
    let h = (w_top - w_start) / n as f64;
    let mut w = Vec::with_capacity(n + 1);
    let mut run = f64::NEG_INFINITY;
    let mut run_aux = f64::NEG_INFINITY;
    let mut running_aux = Vec::with_capacity(n + 1);
    let mut integrand = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = w_start + i as f64 * h;
        run = run.max(sup_arg(x)?);
        run_aux = run_aux.max(aux(x)?);
        w.push(x);
        running_aux.push(run_aux);
        integrand.push(run + weight(x)?);
    }
    let mut ln_inner = vec![f64::NEG_INFINITY; n + 1];
    for i in (0..n).rev() {
        let cell = (0.5 * h).ln() + log_add(integrand[i], integrand[i + 1]);
        ln_inner[i] = log_add(ln_inner[i + 1], cell);
    }
    // beyond the grid: ω = w_top·e^z, sup continues as max(S_top, current)
    let s_top = run;
    let mut failure = None;
    let scale = integrand[n];
    let gz = |z: f64| -> f64 {
        let om = w_top * z.exp();
        let v = sup_arg(om).and_then(|s| Ok(s.max(s_top) + weight(om)?));
        match v {
            Ok(v) => (v - scale).exp() * om,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let cap = (LN_U_MAX / w_top).ln();
    let beyond = quadrature::exponential_tail(gz, 0.0, cap, 1e-10, 400)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let ln_beyond = beyond.map(|t| t.value.ln() + scale);
    Ok(SupTail { w, running_aux, ln_inner, ln_beyond })
}

/// Result of the tail condition `J̃(η) ∫_η^∞ f̃ J' / J^{1+2/N} dτ → 0` (or bounded).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCondition {
    #[serde(with = "crate::numerics::extended")]
    pub limit_estimate: f64,
    pub is_zero_limit: bool,
    pub is_bounded: bool,
    /// Slope of `ln T` against `ln ln η` over the top two decades of the window.
    #[serde(with = "crate::numerics::extended")]
    pub log_log_slope: f64,
    /// `(η, T(η))`, four samples per decade.
    pub trace: Vec<(f64, f64)>,
}

/// Evaluate the tail functional with `f̃ = sup f/J^θ`, `J̃ = sup J'/J^{1−θ}`
/// (sups over `[ξ, u]`) on `η` in `window`.
pub fn tail_condition(
    f: &NonlinearitySpec,
    monitor: &Monitor,
    theta: f64,
    xi: f64,
    dim: u32,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<TailCondition> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(xi > 0.0) || !(window.0 >= xi) || !(window.1 > window.0) {
        return Err(Error::InvalidParameter("tail condition needs 0 < xi <= window.lo < window.hi".into()));
    }
    let _ = cfg;
    let n = dim as f64;
    let sup_arg = |w: f64| -> Result<f64> {
        let u = w.exp();
        Ok(f.ln_value(u)? - theta * monitor.ln_value(u)?)
    };
    let aux = |w: f64| -> Result<f64> {
        let u = w.exp();
        Ok(monitor.ln_derivative(u)? - (1.0 - theta) * monitor.ln_value(u)?)
    };
    let weight = |w: f64| -> Result<f64> {
        let u = w.exp();
        Ok(monitor.ln_derivative(u)? - (1.0 + 2.0 / n) * monitor.ln_value(u)? + w)
    };
    let st = sup_tail(&sup_arg, &aux, &weight, xi.ln(), window.1.ln())?;
    let per = SUP_GRID_PER_DECADE / 4;
    let i_lo = ((window.0.ln() - xi.ln()) / (st.w[1] - st.w[0])).round() as usize;
    let mut trace = Vec::new();
    let mut i = i_lo;
    while i < st.w.len() {
        trace.push((st.w[i].exp(), (st.running_aux[i] + st.ln_tail_at(i)).exp()));
        i += per;
    }
    if st.ln_beyond.is_none() {
        return Ok(TailCondition {
            limit_estimate: f64::INFINITY,
            is_zero_limit: false,
            is_bounded: false,
            log_log_slope: f64::NAN,
            trace,
        });
    }
    let top: Vec<&(f64, f64)> = trace.iter().filter(|p| p.0 >= window.1 / 100.0 * (1.0 - 1e-9)).collect();
    let xs: Vec<f64> = top.iter().map(|p| p.0.ln().ln()).collect();
    let ys: Vec<f64> = top.iter().map(|p| p.1.ln()).collect();
    let slope = extrapolate::slope(&xs, &ys);
    let is_zero = slope < -0.05 || trace.last().map_or(false, |p| p.1 == 0.0);
    let is_bounded = is_zero || slope <= 0.05;
    let limit = if is_zero {
        0.0
    } else if is_bounded {
        trace.last().unwrap().1
    } else {
        f64::INFINITY
    };
    Ok(TailCondition { limit_estimate: limit, is_zero_limit: is_zero, is_bounded, log_log_slope: slope, trace })
}

/// Result of the bound `f'F − q ≤ (Nα/2)·ρ / log(F^{−N/2} + e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCorrectionBound {
    pub holds: bool,
    /// `min (RHS − LHS)` over the window.
    pub window_margin: f64,
    /// `lim (f'F − q)·log(F^{−N/2}+e)/(Nα/2)`; the bound needs it below `ρ`.
    pub limit_ratio: LimitEstimate,
    pub rho: f64,
}

fn ln_h_plus_e(dim: u32, ln_tail: f64) -> f64 {
    log_add(-0.5 * dim as f64 * ln_tail, 1.0).ln()
}

/// Check the log-corrected bound on `f'F − q` for `q = 1 + N/2`.
pub fn check_log_correction_bound(
    f: &NonlinearitySpec,
    alpha: f64,
    rho: f64,
    dim: u32,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<LogCorrectionBound> {
    if !(alpha > 0.0) || !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("need alpha > 0 and 0 < rho < 1, got {alpha}, {rho}")));
    }
    let q = 1.0 + dim as f64 / 2.0;
    let c = dim as f64 * alpha / 2.0;
    let ratio = |u: f64| -> Result<(f64, f64)> {
        let i = tail::scaled_tail(f, u, cfg)?.value;
        let lf = f.ln_value(u)?;
        let fpf = f.log_derivative(u)? * i;
        let l = ln_h_plus_e(dim, i.ln() - lf);
        Ok((fpf - q, l))
    };
    let mut margin = f64::INFINITY;
    let samples = 64;
    for k in 0..samples {
        let u = window.0 * (window.1 / window.0).powf(k as f64 / (samples - 1) as f64);
        let (lhs, l) = ratio(u)?;
        margin = margin.min(c * rho / l - lhs);
    }
    let seq = log_scale_values_from(window.0.ln(), |x| ratio(x.exp()).map(|(d, l)| d * l / c));
    let limit = limit_in_inverse_log(&seq).ok_or_else(|| Error::NonFinite("log-correction ratio sequence".into()))?;
    let slack = 1e-9 * q;
    let holds = margin >= -slack && limit.value + limit.uncertainty < rho;
    Ok(LogCorrectionBound { holds, window_margin: margin, limit_ratio: limit, rho })
}

/// Convexity of `F⁻¹∘F_β` and the growth bound `F(u) ≤ C u^{−2/N}[log(u+e)]^δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexTransformCheck {
    pub convexity_ok: bool,
    /// `min ln f'(F⁻¹(v)) − ln f_β'(F_β⁻¹(v))` over the sampled `v`.
    pub convexity_margin: f64,
    /// Smallest sampled `u` from which the derivative condition holds throughout.
    pub convex_from: Option<f64>,
    pub growth_ok: bool,
    /// Extrapolated growth exponent of `F(u)u^{2/N}` against `log log u`.
    pub growth_exponent: f64,
    pub delta_found: Option<f64>,
}

pub fn check_convex_transform(
    f: &NonlinearitySpec,
    beta: f64,
    dim: u32,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<ConvexTransformCheck> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("reference f_beta needs beta > 0, got {beta}")));
    }
    let fb = NonlinearitySpec::f_beta(dim, beta);
    let samples = 48;
    let mut margins = Vec::with_capacity(samples);
    let mut us = Vec::with_capacity(samples);
    for k in 0..samples {
        let u = window.0 * (window.1 / window.0).powf(k as f64 / (samples - 1) as f64);
        let v = tail::eval_tail(&fb, u, cfg)?;
        let w = tail::eval_tail_inverse(f, v, cfg)?;
        let lhs = f.log_derivative(w)?.ln() + f.ln_value(w)?;
        let rhs = fb.log_derivative(u)?.ln() + fb.ln_value(u)?;
        margins.push(lhs - rhs);
        us.push(u);
    }
    let tol = 1e-9;
    let convexity_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut convex_from = None;
    for k in (0..samples).rev() {
        if margins[k] < -tol {
            break;
        }
        convex_from = Some(us[k]);
    }
    let n = dim as f64;
    let psi = |x: f64| -> Result<f64> { Ok(tail::ln_tail(f, x.exp(), cfg)? + 2.0 / n * x) };
    let pts = log_scale_values_from(window.0.ln(), |x| psi(x));
    let mut slopes = Vec::new();
    for p in pts.windows(2) {
        let ll = |x: f64| (x.exp() + std::f64::consts::E).ln().ln();
        slopes.push((p[1].0, (p[1].1 - p[0].1) / (ll(p[1].0) - ll(p[0].0))));
    }
    let growth_exponent = limit_in_inverse_log(&slopes).map(|l| l.value).unwrap_or(f64::NAN);
    let d_min = growth_exponent.max(0.0);
    let growth_ok = d_min < 1.0 - 1e-6;
    Ok(ConvexTransformCheck {
        convexity_ok: convexity_margin >= -tol,
        convexity_margin,
        convex_from,
        growth_ok,
        growth_exponent,
        delta_found: growth_ok.then(|| 0.5 * (d_min + 1.0)),
    })
}

/// Whether every datum of the given uniformly local class has a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcewiseCheck {
    pub r: f64,
    /// The integral (`r = 1`) or the limsup ratio (`r > 1`); `∞` when divergent.
    #[serde(with = "crate::numerics::extended")]
    pub criterion_value: f64,
    pub solvable_for_all_data: bool,
    pub inconclusive: bool,
    /// Partial integrals `∫_1^{10^k}` (`r = 1`) or decade maxima (`r > 1`).
    pub partial_trace: Vec<(f64, f64)>,
}

pub fn check_sourcewise_solvability(
    f: &NonlinearitySpec,
    r: f64,
    dim: u32,
    window: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<SourcewiseCheck> {
    let _ = cfg;
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("sourcewise criterion needs r >= 1, got {r}")));
    }
    let n = dim as f64;
    if r == 1.0 {
        // ∫_1^∞ f̃(u) u^{−1−2/N} du with f̃ = sup_{[1,u]} f(τ)/τ
        let sup_arg = |w: f64| -> Result<f64> { Ok(f.ln_value(w.exp())? - w) };
        let none = |_: f64| -> Result<f64> { Ok(0.0) };
        let weight = |w: f64| -> Result<f64> { Ok(-2.0 / n * w) };
        let st = sup_tail(&sup_arg, &none, &weight, 0.0, window.1.ln())?;
        let ln_total_inner = st.ln_inner[0];
        let mut trace = Vec::new();
        let per = SUP_GRID_PER_DECADE;
        let mut i = per;
        while i < st.w.len() {
            let part = (ln_total_inner.exp() - st.ln_inner[i].exp()).max(0.0);
            trace.push((st.w[i].exp(), part));
            i += per;
        }
        let value = st.ln_tail_at(0).exp();
        return Ok(SourcewiseCheck {
            r,
            criterion_value: value,
            solvable_for_all_data: value.is_finite(),
            inconclusive: false,
            partial_trace: trace,
        });
    }
    let e = extremum(&|u: f64| Ok(f.ln_value(u)? - (1.0 + 2.0 * r / n) * u.ln()), window, Side::Sup)?;
    Ok(SourcewiseCheck {
        r,
        criterion_value: e.value,
        solvable_for_all_data: e.value.is_finite() && e.trend != Trend::Inconclusive,
        inconclusive: e.trend == Trend::Inconclusive,
        partial_trace: e.decade_extrema,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Stable,
    Growing,
    Decaying,
    Inconclusive,
}

/// A limsup or liminf estimate with the trend that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    #[serde(with = "crate::numerics::extended")]
    pub value: f64,
    pub trend: Trend,
    /// `(decade top, extremum over that decade)`.
    pub decade_extrema: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Sup,
    Inf,
}

/// limsup/liminf of `exp(ln_ratio(u))` from the top two decades of `window`,
/// checked against the log-scale sequence continued past the window.
///
/// A continuation that leaves the 5% band monotonically is read as divergence
/// to `∞` or `0`; a window-stable value that the continuation keeps is `Stable`.
fn extremum(ln_ratio: &dyn Fn(f64) -> Result<f64>, window: (f64, f64), side: Side) -> Result<Extremum> {
    let per = 20;
    let decades = (window.1 / window.0).log10().round() as usize;
    let pick = |a: f64, b: f64| if side == Side::Sup { a.max(b) } else { a.min(b) };
    let init = if side == Side::Sup { f64::NEG_INFINITY } else { f64::INFINITY };
    let mut ext = Vec::with_capacity(decades);
    for d in 0..decades {
        let base = window.0 * 10f64.powi(d as i32);
        let mut m = init;
        for k in 0..=per {
            m = pick(m, ln_ratio(base * 10f64.powf(k as f64 / per as f64))?);
        }
        ext.push((base * 10.0, m));
    }
    if ext.len() < 2 {
        return Err(Error::InvalidParameter("extremum estimate needs a window of at least two decades".into()));
    }
    let decade_extrema: Vec<(f64, f64)> = ext.iter().map(|&(u, m)| (u, m.exp())).collect();
    let band = 1.05f64.ln();
    let m1 = ext[ext.len() - 1].1;
    let m2 = ext[ext.len() - 2].1;
    let far: Vec<f64> = log_scale_values_from(window.1.ln(), |x| ln_ratio(x.exp())).into_iter().map(|p| p.1).collect();
    let tail = &far[far.len().saturating_sub(4)..];
    let rising = tail.len() >= 3 && tail.windows(2).all(|w| w[1] > w[0]);
    let falling = tail.len() >= 3 && tail.windows(2).all(|w| w[1] < w[0]);
    let last = far.last().copied().unwrap_or(m1);
    let trend = if rising && last > m1 + band {
        Trend::Growing
    } else if falling && last < m1 - band {
        Trend::Decaying
    } else if (m1 - m2).abs() <= band && (last - m1).abs() <= band {
        Trend::Stable
    } else if rising || (m1 > m2 + band && last >= m1) {
        Trend::Growing
    } else if falling || (m1 < m2 - band && last <= m1) {
        Trend::Decaying
    } else {
        Trend::Inconclusive
    };
    let value = match (trend, side) {
        (Trend::Stable, _) => m1.exp(),
        (Trend::Growing, Side::Sup) => f64::INFINITY,
        (Trend::Decaying, Side::Inf) => 0.0,
        (Trend::Growing, Side::Inf) => m1.min(last).exp(),
        _ => m1.max(last).exp(),
    };
    Ok(Extremum { value, trend, decade_extrema })
}

/// One growth corollary: hypothesis on `J`, ratio condition, conclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub name: String,
    pub hypothesis_ok: bool,
    pub condition_holds: bool,
    pub extremum: Extremum,
    /// `"existence"` or `"nonexistence"` when both the hypothesis and the condition hold.
    pub conclusion: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCorollaries {
    /// `lim J J''/J'^2`.
    pub curvature_limit: f64,
    /// `lim J J'''/(J' J'')`, `0` when `J''` vanishes to sampling accuracy.
    pub third_ratio_limit: f64,
    /// `limsup f J' / J^{1+2/N−ε} < ∞`: existence.
    pub upper_power: CorollaryCheck,
    /// `limsup f J' [log(J+e)]^{2γ/N} / J^{1+2/N} < ∞` with `γ > N/2`: existence.
    pub upper_log: CorollaryCheck,
    /// `liminf f J' / J^{1+2/N+ε} > 0`: nonexistence.
    pub lower_power: CorollaryCheck,
    /// `liminf f J' [log(J+e)]^{2γ/N} / J^{1+2/N} > 0` with `γ < N/2` and
    /// `(g_γ⁻¹∘J)'' ≤ 0`: nonexistence.
    pub lower_log: CorollaryCheck,
}

fn sequence_limit(x0: f64, h: &dyn Fn(f64) -> Result<f64>) -> f64 {
    let seq = log_scale_values_from(x0, |x| h(x.exp()));
    limit_in_inverse_log(&seq).map(|l| l.value).unwrap_or(f64::NAN)
}

pub fn check_growth_corollaries(
    f: &NonlinearitySpec,
    monitor: &Monitor,
    dim: u32,
    eps: f64,
    gamma: f64,
    window: (f64, f64),
) -> Result<GrowthCorollaries> {
    if !(eps > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need eps > 0 and gamma > 0, got {eps}, {gamma}")));
    }
    let n = dim as f64;
    let x0 = window.0.ln();
    let curvature_limit = sequence_limit(x0, &|u| monitor.curvature(u));
    let flat = (0..8).all(|k| monitor.curvature(window.0 * 10f64.powi(k)).map_or(false, |c| c.abs() < 1e-9));
    let third_ratio_limit = if flat { 0.0 } else { sequence_limit(x0, &|u| monitor.third_ratio(u)) };
    let base = |u: f64| -> Result<f64> { Ok(f.ln_value(u)? + monitor.ln_derivative(u)?) };
    let ln_log_j = |u: f64| -> Result<f64> { Ok(log_add(monitor.ln_value(u)?, 1.0).ln()) };
    let lj = |u: f64| monitor.ln_value(u);

    let up = extremum(&|u| Ok(base(u)? - (1.0 + 2.0 / n - eps) * lj(u)?), window, Side::Sup)?;
    let up_hyp = curvature_limit.is_finite();
    let upper_power = corollary("upper-power", up_hyp, bounded(&up), up, "existence");

    let gamma_up = gamma.max(n / 2.0 + 1e-12);
    let ul = extremum(
        &|u| Ok(base(u)? + 2.0 * gamma_up / n * ln_log_j(u)? - (1.0 + 2.0 / n) * lj(u)?),
        window,
        Side::Sup,
    )?;
    let flat_hyp = curvature_limit.abs() < 1e-6;
    let upper_log = corollary("upper-log", flat_hyp && gamma > n / 2.0, bounded(&ul), ul, "existence");

    let lp = extremum(&|u| Ok(base(u)? - (1.0 + 2.0 / n + eps) * lj(u)?), window, Side::Inf)?;
    let lp_ok = lp.value > 0.0 && lp.trend != Trend::Inconclusive;
    let lower_power = corollary("lower-power", third_ratio_limit.is_finite(), lp_ok, lp, "nonexistence");

    let ll = extremum(
        &|u| Ok(base(u)? + 2.0 * gamma / n * ln_log_j(u)? - (1.0 + 2.0 / n) * lj(u)?),
        window,
        Side::Inf,
    )?;
    let ll_ok = ll.value > 0.0 && ll.trend != Trend::Inconclusive;
    let concave = inverse_weight_concave(monitor, gamma, window)?;
    let lower_log = corollary("lower-log", flat_hyp && gamma < n / 2.0 && concave, ll_ok, ll, "nonexistence");

    Ok(GrowthCorollaries {
        curvature_limit,
        third_ratio_limit,
        upper_power,
        upper_log,
        lower_power,
        lower_log,
    })
}

fn bounded(e: &Extremum) -> bool {
    e.value.is_finite() && e.trend != Trend::Inconclusive
}

fn corollary(name: &str, hyp: bool, cond: bool, extremum: Extremum, conclusion: &str) -> CorollaryCheck {
    CorollaryCheck {
        name: name.into(),
        hypothesis_ok: hyp,
        condition_holds: cond,
        extremum,
        conclusion: (hyp && cond).then(|| conclusion.to_string()),
    }
}

/// `(g_γ⁻¹∘J)'' ≤ 0` on the window, i.e. `J J''/J'^2 ≤ g g''/g'^2` at `g_γ⁻¹(J)`.
fn inverse_weight_concave(monitor: &Monitor, gamma: f64, window: (f64, f64)) -> Result<bool> {
    for k in 0..=48 {
        let u = window.0 * (window.1 / window.0).powf(k as f64 / 48.0);
        let lj = monitor.ln_value(u)?;
        if lj > 700.0 {
            break;
        }
        let kk = g_inverse(gamma, lj.exp())?;
        let gp = g_prime(gamma, kk);
        let cg = g(gamma, kk) * g_second(gamma, kk) / (gp * gp);
        if monitor.curvature(u)? > cg + 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::monitor::MonitorSpec;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn linear_source_integral_is_one_in_two_dimensions() {
        let f = NonlinearitySpec::Power { p: 1.0 };
        let s = check_sourcewise_solvability(&f, 1.0, 2, (1e3, 1e9), &cfg()).unwrap();
        assert!((s.criterion_value - 1.0).abs() < 1e-6, "{}", s.criterion_value);
        assert!(s.solvable_for_all_data);
    }

    #[test]
    fn power_tail_condition_matches_closed_form() {
        // f = u³, N = 1, J = F^{-2} = 4u⁴, θ = 1/2: T(η) = η^{-6}/7
        let f = NonlinearitySpec::Power { p: 3.0 };
        let m = Monitor::new(MonitorSpec::TailPower { r: 2.0, f: f.clone() }, &cfg()).unwrap();
        let t = tail_condition(&f, &m, 0.5, 1.0, 1, (10.0, 1e4), &cfg()).unwrap();
        for &(eta, v) in &t.trace {
            let exact = eta.powi(-6) / 7.0;
            assert!(((v - exact) / exact).abs() < 1e-5, "eta={eta}: {v} vs {exact}");
        }
        assert!(t.is_zero_limit);
    }
}
