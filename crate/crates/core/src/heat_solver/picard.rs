//! Monotone Picard iteration for the Duhamel map
//! `u ↦ S(t)u₀ + ∫₀ᵗ S(t−s) f(u(s)) ds` on a radial grid.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::classifier::Monitor;
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;

use super::grid::GridFunction;
use super::semigroup::SemigroupOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PicardOptions {
    pub t_final: f64,
    /// Uniform steps on `(0, T]`.
    pub steps: usize,
    /// The first uniform step is split geometrically this many times, down
    /// to `T/(steps·2^grading)` (never below the grid's time floor).
    pub grading: u32,
    pub max_iter: usize,
    /// Converged once `|u_n − u_{n−1}| ≤ tol·max(1, u_n)` at every node and time.
    pub tol: f64,
    /// Radius of the balls in the uniformly local norm.
    pub ul_radius: f64,
    pub overflow: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { t_final: 0.1, steps: 64, grading: 12, max_iter: 200, tol: 1e-10, ul_radius: 1.0, overflow: 1e300 }
    }
}

impl PicardOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_final > 0.0
            && self.t_final.is_finite()
            && self.steps >= 1
            && self.max_iter >= 1
            && self.tol > 0.0
            && self.ul_radius > 0.0
            && self.overflow > 1.0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid iteration options {self:?}")));
        }
        Ok(())
    }
}

/// `0`, the geometric nodes below the first uniform step, then `k·T/steps`.
pub fn time_grid(opts: &PicardOptions, floor: f64) -> Vec<f64> {
    let h = opts.t_final / opts.steps as f64;
    let mut t = vec![0.0];
    for j in (1..=opts.grading).rev() {
        let s = h * 0.5f64.powi(j as i32);
        if s >= floor {
            t.push(s);
        }
    }
    for k in 1..=opts.steps {
        t.push(if k == opts.steps { opts.t_final } else { h * k as f64 });
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IterationVerdict {
    Converged,
    DivergedInf,
    Inconclusive,
}

/// One Picard step `n`, with norms taken over all recorded times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub n: usize,
    pub sup_norm: f64,
    pub ul_norm: f64,
    pub monotone: bool,
    pub residual: f64,
    /// `max |u_n − u_{n−1}|/max(1, u_n)`.
    pub rel_residual: f64,
}

/// The last iterate at one recorded time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRecord {
    pub t: f64,
    pub sup_norm: f64,
    /// Value at the origin.
    pub center: f64,
    pub ul_norm: f64,
    /// `‖J(u(t))‖_{1,ul}` for the monitor passed in, if any.
    pub monitor_norm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub verdict: IterationVerdict,
    /// First time at which the overflow guard tripped.
    pub divergence_time: Option<f64>,
    pub times: Vec<f64>,
    pub time_trace: Vec<TimeRecord>,
    #[serde(skip)]
    pub final_state: Option<GridFunction>,
}

impl IterationTrace {
    pub fn is_monotone(&self) -> bool {
        self.records.iter().all(|r| r.monotone)
    }
}

/// Operators for each distinct step, keyed by the bit pattern of `Δ`.
pub(crate) struct StepOperators {
    ops: HashMap<u64, SemigroupOperator>,
}

impl StepOperators {
    pub(crate) fn new(grid: &std::sync::Arc<super::grid::RadialGrid>, times: &[f64]) -> Result<Self> {
        let mut ops = HashMap::new();
        for w in times.windows(2) {
            let d = w[1] - w[0];
            if let std::collections::hash_map::Entry::Vacant(e) = ops.entry(d.to_bits()) {
                e.insert(SemigroupOperator::new(grid, d)?);
            }
        }
        Ok(Self { ops })
    }

    pub(crate) fn get(&self, dt: f64) -> &SemigroupOperator {
        &self.ops[&dt.to_bits()]
    }
}

fn ul_of(values: &[f64], proto: &GridFunction, rho: f64) -> f64 {
    GridFunction::new(proto.grid().clone(), values.to_vec()).map(|g| g.ball_integral(rho, 1.0)).unwrap_or(f64::INFINITY)
}

/// Product trapezoid for `∫` along the time grid: with `g_k = f(w(t_k))`,
/// `D_{k+1} = S(Δ)[D_k + Δ/2 g_k] + Δ/2 g_{k+1}`, started from `D_0 = start`.
pub(crate) fn duhamel_march(
    ops: &StepOperators,
    times: &[f64],
    start: &[f64],
    source: &[Vec<f64>],
    overflow: f64,
) -> (Vec<Vec<f64>>, Option<usize>) {
    let mut out = Vec::with_capacity(times.len());
    out.push(start.to_vec());
    let mut tmp = vec![0.0; start.len()];
    for k in 0..times.len() - 1 {
        let dt = times[k + 1] - times[k];
        let half = 0.5 * dt;
        for ((x, &u), &g) in tmp.iter_mut().zip(&out[k]).zip(&source[k]) {
            *x = u + half * g;
        }
        let mut next = vec![0.0; start.len()];
        ops.get(dt).apply_values(&tmp, &mut next);
        let mut bad = false;
        for (x, &g) in next.iter_mut().zip(&source[k + 1]) {
            *x += half * g;
            bad |= !(x.abs() <= overflow);
        }
        out.push(next);
        if bad {
            return (out, Some(k + 1));
        }
    }
    (out, None)
}

fn eval_source(f: &NonlinearitySpec, level: &[f64], overflow: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(level.len());
    for &u in level {
        match f.value(u.max(0.0)) {
            Ok(v) if v <= overflow => out.push(v),
            _ => return None,
        }
    }
    Some(out)
}

/// Run the monotone iteration `u_n = 𝓕[u_{n−1}]` from `u_0 = S(t)u₀`.
///
/// `f` must be nonnegative and nondecreasing on the range of the iterates;
/// a drop `u_n < u_{n−1}` beyond rounding aborts with `NonMonotone`.
pub fn picard_iterate(
    f: &NonlinearitySpec,
    u0: &GridFunction,
    opts: &PicardOptions,
    monitor: Option<&Monitor>,
) -> Result<IterationTrace> {
    f.validate()?;
    opts.validate()?;
    if u0.min() < 0.0 {
        return Err(Error::InvalidParameter("initial datum must be nonnegative".into()));
    }
    let grid = u0.grid().clone();
    let times = time_grid(opts, grid.time_floor());
    let ops = StepOperators::new(&grid, &times)?;
    let n_t = times.len();
    let zeros = vec![vec![0.0; grid.len()]; n_t];
    let (mut prev, _) = duhamel_march(&ops, &times, u0.values(), &zeros, opts.overflow);
    let mut records = Vec::new();
    let mut verdict = IterationVerdict::Inconclusive;
    let mut divergence_time = None;
    for n in 1..=opts.max_iter {
        let mut source = Vec::with_capacity(n_t);
        let mut tripped = None;
        for (k, level) in prev.iter().enumerate() {
            match eval_source(f, level, opts.overflow) {
                Some(s) => source.push(s),
                None => {
                    tripped = Some(k);
                    break;
                }
            }
        }
        let (cur, overflow_at) = match tripped {
            Some(k) => (Vec::new(), Some(k)),
            None => duhamel_march(&ops, &times, u0.values(), &source, opts.overflow),
        };
        if let Some(k) = overflow_at {
            divergence_time = Some(times[k]);
            verdict = IterationVerdict::DivergedInf;
            records.push(IterationRecord {
                n,
                sup_norm: f64::INFINITY,
                ul_norm: f64::INFINITY,
                monotone: true,
                residual: f64::INFINITY,
                rel_residual: f64::INFINITY,
            });
            break;
        }
        let mut residual: f64 = 0.0;
        let mut rel_residual: f64 = 0.0;
        let mut sup: f64 = 0.0;
        let mut worst_drop: f64 = 0.0;
        for (a, b) in cur.iter().zip(&prev) {
            for (&x, &y) in a.iter().zip(b) {
                residual = residual.max((x - y).abs());
                rel_residual = rel_residual.max((x - y).abs() / x.abs().max(1.0));
                sup = sup.max(x);
                worst_drop = worst_drop.max((y - x) / y.abs().max(1.0));
            }
        }
        let monotone = worst_drop <= 1e-10;
        if !monotone {
            return Err(Error::NonMonotone { step: n, drop: worst_drop });
        }
        let ul = cur.iter().map(|l| ul_of(l, u0, opts.ul_radius)).fold(0.0, f64::max);
        records.push(IterationRecord { n, sup_norm: sup, ul_norm: ul, monotone, residual, rel_residual });
        prev = cur;
        if rel_residual <= opts.tol {
            verdict = IterationVerdict::Converged;
            break;
        }
    }
    let mut time_trace = Vec::new();
    let mut final_state = None;
    if verdict != IterationVerdict::DivergedInf {
        for (&t, level) in times.iter().zip(&prev) {
            let g = GridFunction::new(grid.clone(), level.clone())?;
            let monitor_norm = match monitor {
                Some(j) => Some(g.try_map(|u| j.value(u))?.ball_integral(opts.ul_radius, 1.0)),
                None => None,
            };
            time_trace.push(TimeRecord {
                t,
                sup_norm: g.sup(),
                center: g.values()[0],
                ul_norm: g.ball_integral(opts.ul_radius, 1.0),
                monitor_norm,
            });
        }
        final_state = Some(GridFunction::new(grid, prev.pop().unwrap())?);
    }
    Ok(IterationTrace { records, verdict, divergence_time, times, time_trace, final_state })
}
