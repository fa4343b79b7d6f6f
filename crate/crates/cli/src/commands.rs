use serde::Serialize;

use semilinear_core::classifier::kappa::solve_kappa;
use semilinear_core::classifier::{
    classify_f_beta, classify_qr_regime, region_map, ClassificationOutcome, Monitor, MonitorSpec, RegimeQuery,
    EQUALITY_BAND,
};
use semilinear_core::heat_solver::*;
use semilinear_core::initial_data::{
    closure_membership_heuristic, singular_integrability, ul_norm, ClosureMembership, RadialProfile, SingularIntegral,
    ULNormEstimate,
};
use semilinear_core::nonlinearity::{check_fprime_tail_bound, exponent_profile, BoundCheck, DEFAULT_WINDOW};
use semilinear_core::numerics::QuadratureConfig;

use crate::manifest::{csv_bytes, json_report, num, Experiment, Outcome, SpecError, Status};
use crate::specs::{self, BlowupSpec, ClassifySpec, DataSpec, DatumSpec, FigureMapSpec, ProfileSpec, SimulateSpec, VerifySpec};
use crate::Command;

const DIVERGENCE_NOTE: &str =
    "numerical divergence is evidence consistent with nonexistence for the exact problem, not a proof of it";

pub fn execute(command: Command, exp: &Experiment) -> anyhow::Result<Outcome> {
    match command {
        Command::Classify => classify(exp),
        Command::Profile => profile(exp),
        Command::Data => data(exp),
        Command::Simulate => simulate(exp),
        Command::Verify => verify(exp),
        Command::FigureMap => figure_map(exp),
        Command::Kappa => kappa(exp),
    }
}

fn quadrature(exp: &Experiment) -> anyhow::Result<QuadratureConfig> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = exp.tol {
        cfg.rel_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn single(exp: &Experiment, status: Status, report: &impl Serialize) -> anyhow::Result<Outcome> {
    Ok(Outcome { status, files: vec![(format!("{}.json", exp.command), json_report(exp, status, report)?)] })
}

#[derive(Serialize)]
struct ClassifyReport {
    input: serde_json::Value,
    q_estimate: Option<f64>,
    q_uncertainty: Option<f64>,
    bound: Option<BoundCheck>,
    outcome: Option<ClassificationOutcome>,
}

fn classify(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: ClassifySpec = specs::parse(&exp.command, &exp.spec)?;
    let mut report = ClassifyReport { input: exp.spec.clone(), q_estimate: None, q_uncertainty: None, bound: None, outcome: None };
    match spec {
        ClassifySpec::FBeta { dim, alpha, beta } => {
            report.outcome = Some(classify_f_beta(dim, alpha, beta, EQUALITY_BAND)?);
        }
        ClassifySpec::Qr { dim, q, r, bound_holds, data_class } => {
            let query = RegimeQuery { dim, r, q, bound_holds, data_class };
            report.outcome = Some(classify_qr_regime(&query, EQUALITY_BAND)?);
        }
        ClassifySpec::Nonlinearity { dim, r, f, data_class } => {
            let cfg = quadrature(exp)?;
            let prof = exponent_profile(&f, &cfg)?;
            report.q_estimate = Some(prof.q_estimate);
            report.q_uncertainty = Some(prof.q_uncertainty);
            if !prof.converged || !prof.q_estimate.is_finite() {
                return single(exp, Status::Inconclusive, &report);
            }
            // q = 1 is approached from below by rounding for superpower growth
            let q = if prof.q_estimate < 1.0 && prof.q_estimate > 1.0 - 1e-6 { 1.0 } else { prof.q_estimate };
            let bound = check_fprime_tail_bound(&f, q, exp.window.unwrap_or(DEFAULT_WINDOW), &cfg)?;
            let query = RegimeQuery { dim, r, q, bound_holds: Some(bound.holds), data_class };
            report.outcome = Some(classify_qr_regime(&query, EQUALITY_BAND)?);
            report.bound = Some(bound);
        }
    }
    single(exp, Status::Success, &report)
}

fn profile(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: ProfileSpec = specs::parse(&exp.command, &exp.spec)?;
    let cfg = quadrature(exp)?;
    let mut prof = exponent_profile(&spec.f, &cfg)?;
    if let (Some(w), true) = (exp.window, prof.q_estimate.is_finite()) {
        prof.bound = check_fprime_tail_bound(&spec.f, prof.q_estimate, w, &cfg)?;
    }
    let status = if prof.converged { Status::Success } else { Status::Inconclusive };
    let diag = csv_bytes(
        &["u", "f", "f_prime", "F", "fprime_F"],
        prof.diagnostic.iter().map(|r| vec![num(r.u), num(r.f), num(r.f_prime), num(r.tail), num(r.f_prime_tail)]),
    )?;
    let seq = csv_bytes(&["ln_u", "fprime_F"], prof.log_scale_sequence.iter().map(|p| vec![num(p.0), num(p.1)]))?;
    let k = &prof.karamata;
    let kar = csv_bytes(&["u", "a", "b"], (0..k.u.len()).map(|i| vec![num(k.u[i]), num(k.a[i]), num(k.b[i])]))?;
    Ok(Outcome {
        status,
        files: vec![
            ("profile.json".into(), json_report(exp, status, &prof)?),
            ("diagnostic.csv".into(), diag),
            ("sequence.csv".into(), seq),
            ("karamata.csv".into(), kar),
        ],
    })
}

#[derive(Serialize)]
struct DataReport {
    profile: RadialProfile,
    builder: serde_json::Value,
    monitor: String,
    ul_norm: ULNormEstimate,
    singular_ball: SingularIntegral,
    closure: Option<ClosureMembership>,
}

fn data(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: DataSpec = specs::parse(&exp.command, &exp.spec)?;
    let cfg = quadrature(exp)?;
    let (profile, builder) = spec.datum.build(&cfg)?;
    let ev = profile.evaluator(&cfg)?;
    let monitor = Monitor::new(spec.monitor.unwrap_or(MonitorSpec::Identity), &cfg)?;
    let report = DataReport {
        builder,
        monitor: monitor.spec().label(),
        ul_norm: ul_norm(&ev, spec.ul_radius, &cfg)?,
        singular_ball: singular_integrability(&ev, &monitor, spec.rho, &cfg)?,
        closure: if spec.closure { Some(closure_membership_heuristic(&ev, &cfg)?) } else { None },
        profile,
    };
    let samples = ev.sample_log_grid(1e-12, 10.0, 8)?;
    let status = match &report.closure {
        Some(c) if c.inconclusive => Status::Inconclusive,
        _ => Status::Success,
    };
    Ok(Outcome {
        status,
        files: vec![
            ("data.json".into(), json_report(exp, status, &report)?),
            ("profile.csv".into(), csv_bytes(&["s", "u0"], samples.iter().map(|p| vec![num(p.0), num(p.1)]))?),
        ],
    })
}

/// Datum on the grid from the input file, with `--grid` taking precedence.
fn datum_on_grid(
    exp: &Experiment,
    datum: &DatumSpec,
    grid: &Option<GridSpec>,
    cfg: &QuadratureConfig,
) -> anyhow::Result<(RadialProfile, serde_json::Value, GridSpec, GridFunction)> {
    let (profile, builder) = datum.build(cfg)?;
    let gs = exp.grid.clone().or_else(|| grid.clone()).unwrap_or_default();
    let g = RadialGrid::new(profile.dim, &gs)?;
    let u0 = GridFunction::from_profile(g, &profile.evaluator(cfg)?)?;
    Ok((profile, builder, gs, u0))
}

#[derive(Serialize)]
struct BlowupEvidence {
    h0: f64,
    tau: f64,
    functional: BlowupFunctional,
    sides: ContradictionSides,
}

fn blowup_evidence(b: &BlowupSpec, u0: &GridFunction) -> semilinear_core::Result<BlowupEvidence> {
    let dim = u0.grid().dim();
    let tau = b.tau.unwrap_or(b.rho * b.rho);
    let h0 = default_h0(u0, b.rho, tau, b.c_star)?;
    let c2v = b.c2.unwrap_or_else(|| c2(b.beta, dim, b.eps, b.rho, b.c1, b.delta));
    let functional = integrate_h(b.beta, dim, b.rho, h0, c2v)?;
    let sides = contradiction_sides(b.beta, dim, b.eps, b.rho, b.c1, b.delta);
    Ok(BlowupEvidence { h0, tau, functional, sides })
}

#[derive(Serialize)]
struct SimulateReport {
    f: String,
    datum: RadialProfile,
    builder: serde_json::Value,
    grid: GridSpec,
    nodes: usize,
    picard: PicardOptions,
    verdict: IterationVerdict,
    divergence_time: Option<f64>,
    iterations: usize,
    monotone: bool,
    final_sup_norm: Option<f64>,
    final_center: Option<f64>,
    smoothing: Option<SmoothingProbe>,
    jensen: Option<JensenCheck>,
    blowup: Option<serde_json::Value>,
    note: &'static str,
}

fn simulate(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: SimulateSpec = specs::parse(&exp.command, &exp.spec)?;
    let cfg = QuadratureConfig::default();
    let mut opts = spec.picard.clone();
    if let Some(t) = exp.tol {
        opts.tol = t;
    }
    let (profile, builder, gs, u0) = datum_on_grid(exp, &spec.datum, &spec.grid, &cfg)?;
    let monitor = spec.monitor.clone().map(|m| Monitor::new(m, &cfg)).transpose()?;
    let trace = picard_iterate(&spec.f, &u0, &opts, monitor.as_ref())?;

    let t = opts.t_final;
    let t_lo = (t / 1e3).max(4.0 * u0.grid().time_floor());
    let ts: Vec<f64> = (0..=8).map(|k| t_lo * (t / t_lo).powf(k as f64 / 8.0)).collect();
    let smoothing = if t_lo < t { Some(smoothing_exponent_probe(&u0, 1.0, f64::INFINITY, &ts)?) } else { None };
    let jensen = monitor.as_ref().map(|j| jensen_check(j, &u0, t, false)).transpose()?;
    let blowup = spec.blowup.as_ref().map(|b| match blowup_evidence(b, &u0) {
        Ok(e) => serde_json::to_value(e).unwrap_or_default(),
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    });
    let status = match trace.verdict {
        IterationVerdict::Converged => Status::Success,
        IterationVerdict::DivergedInf => Status::Diverged,
        IterationVerdict::Inconclusive => Status::Inconclusive,
    };
    let last = trace.time_trace.last();
    let report = SimulateReport {
        f: spec.f.label(),
        datum: profile,
        builder,
        nodes: u0.grid().len(),
        grid: gs,
        picard: opts,
        verdict: trace.verdict,
        divergence_time: trace.divergence_time,
        iterations: trace.records.len(),
        monotone: trace.is_monotone(),
        final_sup_norm: last.map(|r| r.sup_norm),
        final_center: last.map(|r| r.center),
        smoothing,
        jensen,
        blowup,
        note: DIVERGENCE_NOTE,
    };
    let iterations = csv_bytes(
        &["n", "sup_norm", "ul_norm", "residual", "rel_residual", "monotone"],
        trace.records.iter().map(|r| {
            vec![r.n.to_string(), num(r.sup_norm), num(r.ul_norm), num(r.residual), num(r.rel_residual), r.monotone.to_string()]
        }),
    )?;
    let times = csv_bytes(
        &["t", "sup_norm", "center", "ul_norm", "monitor_norm"],
        trace.time_trace.iter().map(|r| {
            vec![num(r.t), num(r.sup_norm), num(r.center), num(r.ul_norm), r.monitor_norm.map(num).unwrap_or_default()]
        }),
    )?;
    Ok(Outcome {
        status,
        files: vec![
            ("simulate.json".into(), json_report(exp, status, &report)?),
            ("iterations.csv".into(), iterations),
            ("times.csv".into(), times),
        ],
    })
}

#[derive(Serialize)]
struct VerifyReport {
    f: String,
    monitor: String,
    datum: RadialProfile,
    grid: GridSpec,
    supersolution: SupersolutionCheck,
    jensen: JensenCheck,
    jensen_holds: bool,
}

fn verify(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: VerifySpec = specs::parse(&exp.command, &exp.spec)?;
    let cfg = QuadratureConfig::default();
    let tol = exp.tol.unwrap_or(spec.tol);
    let (profile, _, gs, u0) = datum_on_grid(exp, &spec.datum, &spec.grid, &cfg)?;
    let j = Monitor::new(spec.monitor.clone(), &cfg)?;
    let u1 = lift_datum(&u0, spec.c1, spec.xi)?;
    let check = verify_supersolution(&spec.f, &j, spec.sigma, &u0, &u1, &spec.picard, tol)?;
    let jensen = jensen_check(&j, &u1, spec.picard.t_final, spec.concave)?;
    let jensen_holds = jensen.max_violation <= 1e-8;
    let status = if check.holds && jensen_holds { Status::Success } else { Status::Inconclusive };
    let margins = csv_bytes(&["t", "min_relative_margin"], check.margins.iter().map(|m| vec![num(m.0), num(m.1)]))?;
    let report = VerifyReport {
        f: spec.f.label(),
        monitor: spec.monitor.label(),
        datum: profile,
        grid: gs,
        supersolution: check,
        jensen,
        jensen_holds,
    };
    Ok(Outcome {
        status,
        files: vec![("verify.json".into(), json_report(exp, status, &report)?), ("margins.csv".into(), margins)],
    })
}

fn verdict_name(code: u8) -> &'static str {
    match code {
        1 => "existence-subcritical1",
        2 => "existence-subcritical2",
        3 => "existence-critical",
        4 => "nonexistence",
        5 => "doubly-critical",
        _ => "outside-theory",
    }
}

#[derive(Serialize)]
struct MapReport {
    dim: u32,
    q: (f64, f64),
    r: (f64, f64),
    nq: usize,
    nr: usize,
    /// `(code, name, cells)`.
    counts: Vec<(u8, &'static str, usize)>,
    assumptions: &'static str,
}

fn figure_map(exp: &Experiment) -> anyhow::Result<Outcome> {
    let spec: FigureMapSpec = specs::parse(&exp.command, &exp.spec)?;
    let n = spec.dim as f64;
    let (q, r) = (spec.q, spec.r);
    if spec.dim == 0 || !(q.0 >= 1.0 && q.1 <= 1.0 + n && q.0 <= q.1) || !(r.0 > 0.0 && r.1 <= n && r.0 <= r.1) {
        return Err(SpecError(format!("figure-map needs q within [1, 1+N] and r within (0, N], got q {q:?}, r {r:?}")).into());
    }
    let cells = region_map(spec.dim, q, r, spec.nq, spec.nr)?;
    let counts = (0..=5u8).map(|c| (c, verdict_name(c), cells.iter().filter(|x| x.code == c).count())).collect();
    let report = MapReport {
        dim: spec.dim,
        q,
        r,
        nq: spec.nq,
        nr: spec.nr,
        counts,
        assumptions: "closure-class data and f'F <= q assumed at every cell",
    };
    let csv = csv_bytes(
        &["q", "r", "code", "verdict"],
        cells.iter().map(|c| vec![num(c.q), num(c.r), c.code.to_string(), verdict_name(c.code).to_string()]),
    )?;
    Ok(Outcome {
        status: Status::Success,
        files: vec![("figure-map.json".into(), json_report(exp, Status::Success, &report)?), ("figure-map.csv".into(), csv)],
    })
}

fn kappa(exp: &Experiment) -> anyhow::Result<Outcome> {
    single(exp, Status::Success, &solve_kappa())
}
