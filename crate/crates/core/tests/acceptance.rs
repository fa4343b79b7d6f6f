//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria 5 and 10 cannot be met as stated (see the notes printed with
//! them); the run reports them and asserts on the rest.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semilinear_core::classifier::{classify_f_beta, kappa, tail_condition, FBetaClause, Monitor, MonitorSpec, EQUALITY_BAND};
use semilinear_core::heat_solver::*;
use semilinear_core::initial_data::{build_counterexample, singular_integrability, ProfileCore, RadialProfile};
use semilinear_core::nonlinearity::{eval_tail, exponent_profile, NonlinearitySpec};
use semilinear_core::numerics::QuadratureConfig;

const UNATTAINABLE: [usize; 2] = [5, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn exponent_calculus() -> Outcome {
    let cfg = cfg();
    let mut worst = [0.0f64; 3];
    for p in [1.5, 2.0, 3.0, 5.0] {
        let q = exponent_profile(&NonlinearitySpec::Power { p }, &cfg).unwrap().q_estimate;
        worst[0] = worst[0].max((q - p / (p - 1.0)).abs());
    }
    for p in [0.5, 1.0, 2.0] {
        let q = exponent_profile(&NonlinearitySpec::ExpPower { p }, &cfg).unwrap().q_estimate;
        worst[1] = worst[1].max((q - 1.0).abs());
    }
    for dim in [1, 2, 3] {
        for beta in [-1.0, 0.0, 1.0] {
            let q = exponent_profile(&NonlinearitySpec::f_beta(dim, beta), &cfg).unwrap().q_estimate;
            worst[2] = worst[2].max((q - 1.0 - dim as f64 / 2.0).abs());
        }
    }
    Outcome {
        pass: worst[0] <= 1e-4 && worst[1] <= 2e-2 && worst[2] <= 1e-3,
        detail: format!("max |q - q_exact|: powers {:.1e}, exp powers {:.1e}, f_beta {:.1e}", worst[0], worst[1], worst[2]),
    }
}

fn log_quotient_tail() -> Outcome {
    let cfg = cfg();
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let f = NonlinearitySpec::LogQuotient { p };
        let a = (2.0 / (p - 1.0)).exp();
        for k in 0..=120 {
            let u = 10f64.powf(k as f64 / 20.0);
            let exact = (u + a).ln() / (u + a).powf(p - 1.0);
            worst = worst.max(((eval_tail(&f, u, &cfg).unwrap() - exact) / exact).abs());
        }
    }
    Outcome { pass: worst <= 1e-8, detail: format!("max rel error {worst:.2e} on [1, 1e6]") }
}

fn kappa_constant() -> Outcome {
    let k = kappa();
    let res = (k.ln() + 2.0 - k).abs();
    Outcome { pass: res <= 1e-9 && (k - 3.146).abs() <= 1e-3, detail: format!("kappa = {k:.10}, residual {res:.1e}") }
}

/// The five clauses straight from their inequalities.
fn clause_oracle(dim: u32, alpha: f64, beta: f64) -> FBetaClause {
    let half = dim as f64 / 2.0;
    if beta < -1.0 {
        FBetaClause::LogDamped
    } else if alpha > half {
        FBetaClause::LargeWeight
    } else if beta == -1.0 {
        FBetaClause::BorderlineLog
    } else if alpha == half {
        FBetaClause::CriticalWeight
    } else {
        FBetaClause::SmallWeight
    }
}

fn f_beta_table() -> Outcome {
    let mut wrong = 0;
    let mut seen = std::collections::HashSet::new();
    for dim in [1u32, 2, 3] {
        for i in 0..20 {
            // α = i·N/18 hits N/2 at i = 9; β = −1 + (j−6)/2 hits −1 at j = 6
            let alpha = i as f64 * dim as f64 / 18.0;
            for j in 0..20 {
                let beta = -1.0 + (j as f64 - 6.0) * 0.5;
                let got = classify_f_beta(dim, alpha, beta, EQUALITY_BAND).unwrap();
                let want = clause_oracle(dim, alpha, beta);
                seen.insert(format!("{want:?}"));
                let verdict_ok = got.verdict.is_existence() == want.is_existence();
                if got.clause != Some(want) || !verdict_ok {
                    wrong += 1;
                }
            }
        }
    }
    Outcome {
        pass: wrong == 0 && seen.len() == 5,
        detail: format!("{wrong} misclassified of 1200 (N = 1, 2, 3), {} clauses exercised", seen.len()),
    }
}

fn tail_condition_examples() -> Outcome {
    let cfg = cfg();
    let id = Monitor::new(MonitorSpec::Identity, &cfg).unwrap();
    let beta = -2.0;
    let tc = tail_condition(&NonlinearitySpec::f_beta(1, beta), &id, 1.0, 1.0, 1, (1e3, 1e6), &cfg).unwrap();
    let stated = |eta: f64| 2.0 / (-beta - 1.0) * (eta + std::f64::consts::E).ln().powf(beta + 1.0);
    let ratios: Vec<f64> = tc.trace.iter().map(|&(eta, v)| v / stated(eta)).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let within = ratios.iter().all(|r| (r - 1.0).abs() <= 0.05);
    let flat = tail_condition(&NonlinearitySpec::f_beta(1, 0.0), &id, 1.0, 1.0, 1, (1e3, 1e6), &cfg).unwrap();
    Outcome {
        pass: within && !flat.is_bounded,
        detail: format!(
            "beta = -2: computed/stated in [{lo:.4}, {hi:.4}]; beta = 0 bounded = {}. \
             For J = id, theta = 1 the integrand is ~ 1/(tau log^2 tau), whose tail is 1/log(eta), \
             half the stated 2/(-beta-1)(log)^(beta+1)",
            flat.is_bounded
        ),
    }
}

fn model_singular_integrals() -> Outcome {
    let cfg = cfg();
    let id = Monitor::new(MonitorSpec::Identity, &cfg).unwrap();
    let mut worst: f64 = 0.0;
    for lambda in [1.2, 1.4, 1.8] {
        let ev = RadialProfile::model(1, lambda).evaluator(&cfg).unwrap();
        for rho in [1e-1, 1e-2, 1e-3] {
            let s = singular_integrability(&ev, &id, rho, &cfg).unwrap();
            let exact = (1.0f64 / rho).ln().powf(1.0 - lambda) / (lambda - 1.0);
            worst = worst.max(((s.radial_value - exact) / exact).abs());
        }
    }
    Outcome { pass: worst <= 1e-6, detail: format!("max rel error {worst:.2e}") }
}

fn semigroup_invariants() -> Outcome {
    let base = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let smooth = RadialGrid::new(1, &GridSpec { r_min: 1e-6, r_mid: 0.02, r_max: 6.0, per_decade: 16, uniform_step: 3e-3 }).unwrap();

    let c = GridFunction::constant(base.clone(), 2.5).unwrap();
    let constant_err = [1e-8, 1e-3, 0.5, 30.0]
        .iter()
        .map(|&t| apply_semigroup(&c, t).unwrap().sup_distance(&c) / 2.5)
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut order_violation: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, d) = (rng.gen_range(0.0..5.0), rng.gen_range(0.001..1.0), rng.gen_range(0.0..3.0));
        let t = 10f64.powf(rng.gen_range(-6.0..0.3));
        let lo = GridFunction::from_fn(base.clone(), |r| 1.0 + a * (-r * r / b).exp()).unwrap();
        let hi = GridFunction::from_fn(base.clone(), |r| 1.0 + a * (-r * r / b).exp() + d * (-r).exp()).unwrap();
        let (sl, sh) = (apply_semigroup(&lo, t).unwrap(), apply_semigroup(&hi, t).unwrap());
        for (x, y) in sl.values().iter().zip(sh.values()) {
            order_violation = order_violation.max(x - y);
        }
    }

    let g = GridFunction::from_fn(smooth.clone(), |r| gaussian(1, r, 0.2)).unwrap();
    let exact = GridFunction::from_fn(smooth.clone(), |r| gaussian(1, r, 0.5)).unwrap();
    let gauss_err = apply_semigroup(&g, 0.3).unwrap().sup_distance(&exact) / g.sup();
    let phi = GridFunction::from_fn(smooth, |r| gaussian(1, r, 0.2) + 0.3 * gaussian(1, (r - 1.0).abs(), 0.4)).unwrap();
    let once = apply_semigroup(&phi, 0.3).unwrap();
    let twice = apply_semigroup(&apply_semigroup(&phi, 0.1).unwrap(), 0.2).unwrap();
    let comp_err = once.sup_distance(&twice) / phi.sup();

    let ts: Vec<f64> = (0..=8).map(|k| 1e-4 * 10f64.powf(k as f64 / 8.0)).collect();
    let mut slopes = Vec::new();
    for dim in [1, 2] {
        let grid = RadialGrid::new(dim, &GridSpec::default()).unwrap();
        let spike = GridFunction::from_fn(grid, |r| gaussian(dim, r, 1e-8)).unwrap();
        slopes.push(smoothing_exponent_probe(&spike, 1.0, f64::INFINITY, &ts).unwrap().slope);
    }
    let slope_ok = (slopes[0] / -0.5 - 1.0).abs() <= 0.05 && (slopes[1] / -1.0 - 1.0).abs() <= 0.05;
    Outcome {
        pass: constant_err <= 1e-10 && order_violation <= 0.0 && gauss_err <= 1e-6 && comp_err <= 1e-6 && slope_ok,
        detail: format!(
            "constants {constant_err:.1e}, order violation {order_violation:.1e}, gaussian {gauss_err:.1e}, \
             composition {comp_err:.1e}, smoothing slopes N=1 {:.5} N=2 {:.5}",
            slopes[0], slopes[1]
        ),
    }
}

fn monotone_iteration() -> Outcome {
    let cfg = cfg();
    let grid = RadialGrid::new(1, &GridSpec { r_min: 1e-2, r_mid: 0.5, r_max: 4.0, per_decade: 4, uniform_step: 0.5 }).unwrap();
    let u0 = GridFunction::constant(grid, 1.0).unwrap();
    let opts = PicardOptions { t_final: 0.75, steps: 1536, grading: 4, max_iter: 400, tol: 1e-12, ..Default::default() };
    let tr = picard_iterate(&NonlinearitySpec::Power { p: 2.0 }, &u0, &opts, None).unwrap();
    let mut worst: f64 = 0.0;
    for target in [0.25, 0.5, 0.75] {
        let rec = tr.time_trace.iter().find(|r| (r.t - target).abs() < 1e-12).expect("time on grid");
        worst = worst.max((rec.center * (1.0 - target) - 1.0).abs());
    }
    // a nonconstant ladder for u³ from a singular-looking datum
    let ev = RadialProfile::new(ProfileCore::PowerCore { a: 0.2 }, 1, Some(0.5)).evaluator(&cfg).unwrap();
    let g = GridFunction::from_profile(RadialGrid::new(1, &GridSpec::default()).unwrap(), &ev).unwrap();
    let ladder = picard_iterate(&NonlinearitySpec::Power { p: 3.0 }, &g, &PicardOptions::default(), None).unwrap();
    let ladder_up = ladder.records.windows(2).all(|w| w[1].sup_norm >= w[0].sup_norm);
    Outcome {
        pass: tr.verdict == IterationVerdict::Converged && tr.is_monotone() && ladder.is_monotone() && ladder_up && worst <= 1e-4,
        detail: format!(
            "u^2 ODE max rel error {worst:.2e} ({} iterations); u^3 ladder monotone over {} steps",
            tr.records.len(),
            ladder.records.len()
        ),
    }
}

fn jensen_random() -> Outcome {
    let cfg = cfg();
    let cube = NonlinearitySpec::Power { p: 3.0 };
    let grid = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..1000 {
        let spec = match rng.gen_range(0..3) {
            0 => MonitorSpec::Power { r: rng.gen_range(1.0..3.0) },
            1 => MonitorSpec::LogWeighted { gamma: rng.gen_range(0.0..2.0) },
            _ => MonitorSpec::TailPower { r: rng.gen_range(0.5..1.5), f: cube.clone() },
        };
        let j = Monitor::new(spec, &cfg).unwrap();
        let (a, b, c) = (rng.gen_range(0.0..5.0), rng.gen_range(0.001..1.0), rng.gen_range(0.0..2.0));
        let phi = GridFunction::from_fn(grid.clone(), |r| 1.0 + a * (-r * r / b).exp() + c / (1.0 + r)).unwrap();
        let t = 10f64.powf(rng.gen_range(-6.0..0.0));
        let v = jensen_check(&j, &phi, t, false).unwrap().max_violation;
        worst = worst.max(v);
        if v > 1e-8 {
            violations += 1;
        }
    }
    Outcome { pass: violations == 0, detail: format!("{violations} violations of 1000, worst {worst:.1e}") }
}

fn blowup_functional() -> Outcome {
    let (beta, dim, eps) = (1.0, 1, 0.1);
    let b = integrate_h(beta, dim, 1e-2, 1e-2, 0.0).unwrap();
    let identity_ok = b.max_rel_error <= 1e-6 && b.identity_residual <= 1e-6;
    let rhos = [1e-1, 1e-2, 1e-3, 1e-4];
    let sides: Vec<ContradictionSides> = rhos.iter().map(|&r| contradiction_sides(beta, dim, eps, r, 1.0, 0.05)).collect();
    let last = sides.last().unwrap();
    let converges = (last.ratio - last.limit).abs() <= 1e-3;
    let grows = sides.windows(2).all(|w| w[1].log_side > w[0].log_side);
    let separated = last.separation >= 10.0;
    let ratios: Vec<String> = sides.iter().map(|s| format!("{:.3}", s.ratio)).collect();
    // C₂ = 0 drops the constant entirely; the best case for the separation
    let best = last.log_side / last.limit;
    Outcome {
        pass: identity_ok && converges && grows && separated,
        detail: format!(
            "identity rel error {:.1e} / residual {:.1e}; ratio with C2(c1=1, delta=0.05) at rho 1e-1..1e-4: [{}] \
             vs limit {:.4}; log side at 1e-4 {:.4}, separation {:.3} (even with C2 = 0 only {:.3}; \
             a factor 10 needs log(1/rho) ~ {:.1e})",
            b.max_rel_error,
            b.identity_residual,
            ratios.join(", "),
            last.limit,
            last.log_side,
            last.separation,
            best,
            (10.0 * last.limit).powf(1.0 / eps)
        ),
    }
}

fn contrast_experiment() -> Outcome {
    let cfg = cfg();
    let cube = NonlinearitySpec::Power { p: 3.0 };
    let f1 = NonlinearitySpec::f_beta(1, 1.0);
    let j = Monitor::new(MonitorSpec::TailPower { r: 2.0, f: cube.clone() }, &cfg).unwrap();
    let regular = RadialProfile::new(ProfileCore::PowerCore { a: 0.2 }, 1, Some(0.5)).evaluator(&cfg).unwrap();
    let (p, _) = build_counterexample(1.0, 0.1, 0.0, 1, None, &cfg).unwrap();
    let singular = p.evaluator(&cfg).unwrap();
    let opts = PicardOptions { t_final: 0.1, steps: 64, grading: 20, max_iter: 300, ..Default::default() };
    let mut reg_max = Vec::new();
    let mut reg_ok = true;
    let mut sing_ok = true;
    let mut notes = Vec::new();
    let mut far = 0.0;
    for (name, spec) in [("base", GridSpec::default()), ("refined", GridSpec::default().refined())] {
        let grid = RadialGrid::new(1, &spec).unwrap();
        let u0 = GridFunction::from_profile(grid.clone(), &regular).unwrap();
        let tr = picard_iterate(&cube, &u0, &opts, Some(&j)).unwrap();
        let norms: Vec<f64> = tr.time_trace.iter().filter_map(|r| r.monitor_norm).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        reg_ok &= tr.verdict == IterationVerdict::Converged && tr.is_monotone() && max.is_finite() && max <= 2.0 * norms[0];
        reg_max.push(max);

        let u0 = GridFunction::from_profile(grid, &singular).unwrap();
        far = u0.far();
        let tr = picard_iterate(&f1, &u0, &opts, None).unwrap();
        let ul: Vec<f64> = tr.records.iter().map(|r| r.ul_norm).filter(|v| v.is_finite()).collect();
        let growing = ul.windows(2).all(|w| w[1] >= w[0]) && ul.last() > ul.first();
        sing_ok &= tr.verdict != IterationVerdict::Converged && tr.is_monotone() && growing;
        notes.push(format!("{name}: singular {:?} at t = {:?} after {} steps", tr.verdict, tr.divergence_time, tr.records.len()));
    }
    let agree = (reg_max[0] - reg_max[1]).abs() <= 0.05 * reg_max[0];
    let ode_time = eval_tail(&f1, far, &cfg).unwrap();
    Outcome {
        pass: reg_ok && agree && sing_ok,
        detail: format!(
            "regular: max ||F(u)^-2||_1,ul {:.4} / {:.4} (base / refined); {}; far-field ODE blow-up time {:.3}",
            reg_max[0],
            reg_max[1],
            notes.join("; "),
            ode_time
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exponent calculus", exponent_calculus),
        ("closed-form log-quotient tail", log_quotient_tail),
        ("kappa", kappa_constant),
        ("f_beta table", f_beta_table),
        ("tail condition examples", tail_condition_examples),
        ("model singular integrals", model_singular_integrals),
        ("semigroup invariants", semigroup_invariants),
        ("monotone iteration", monotone_iteration),
        ("Jensen checks", jensen_random),
        ("blow-up functional", blowup_functional),
        ("contrast experiment", contrast_experiment),
    ];
    let mut unexpected = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name} ({:.1} s): {}", k + 1, start.elapsed().as_secs_f64(), out.detail);
        if !out.pass && !UNATTAINABLE.contains(&(k + 1)) {
            unexpected.push(k + 1);
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
