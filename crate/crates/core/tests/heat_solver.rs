use proptest::prelude::*;
use semilinear_core::classifier::{Monitor, MonitorSpec};
use semilinear_core::heat_solver::*;
use semilinear_core::initial_data::{ProfileCore, RadialProfile};
use semilinear_core::nonlinearity::NonlinearitySpec;
use semilinear_core::numerics::QuadratureConfig;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn smooth_grid() -> GridSpec {
    GridSpec { r_min: 1e-6, r_mid: 0.02, r_max: 6.0, per_decade: 16, uniform_step: 3e-3 }
}

#[test]
fn constants_are_preserved() {
    for dim in [1, 2, 3] {
        let g = RadialGrid::new(dim, &GridSpec::default()).unwrap();
        let c = GridFunction::constant(g, 2.5).unwrap();
        for t in [1e-8, 1e-3, 0.5, 30.0] {
            let out = apply_semigroup(&c, t).unwrap();
            assert!(out.sup_distance(&c) <= 1e-10 * 2.5, "N={dim} t={t}");
        }
    }
}

#[test]
fn gaussian_reproduces_itself() {
    // S(t)G(·, s) = G(·, t + s)
    let g = RadialGrid::new(1, &smooth_grid()).unwrap();
    let phi = GridFunction::from_fn(g.clone(), |r| gaussian(1, r, 0.2)).unwrap();
    let exact = GridFunction::from_fn(g, |r| gaussian(1, r, 0.5)).unwrap();
    let out = apply_semigroup(&phi, 0.3).unwrap();
    assert!(out.sup_distance(&exact) <= 1e-6 * phi.sup());
    for dim in [2, 3] {
        let g = RadialGrid::new(dim, &GridSpec { uniform_step: 0.02, r_mid: 0.05, ..smooth_grid() }).unwrap();
        let phi = GridFunction::from_fn(g.clone(), |r| gaussian(dim, r, 0.2)).unwrap();
        let exact = GridFunction::from_fn(g, |r| gaussian(dim, r, 0.3)).unwrap();
        let out = apply_semigroup(&phi, 0.1).unwrap();
        assert!(out.sup_distance(&exact) <= 1e-4 * phi.sup(), "N={dim}: {}", out.sup_distance(&exact));
    }
}

#[test]
fn semigroup_composes() {
    let g = RadialGrid::new(1, &smooth_grid()).unwrap();
    let phi = GridFunction::from_fn(g, |r| gaussian(1, r, 0.2) + 0.3 * gaussian(1, (r - 1.0).abs(), 0.4)).unwrap();
    let once = apply_semigroup(&phi, 0.3).unwrap();
    let twice = apply_semigroup(&apply_semigroup(&phi, 0.1).unwrap(), 0.2).unwrap();
    assert!(once.sup_distance(&twice) <= 1e-6 * phi.sup(), "{}", once.sup_distance(&twice));
}

#[test]
fn smoothing_rate_of_a_spike() {
    // unit-mass spike: ‖S(t)φ‖_∞ ~ (4πt)^{−N/2}
    let ts: Vec<f64> = (0..=8).map(|k| 1e-4 * 10f64.powf(k as f64 / 8.0)).collect();
    for dim in [1, 2] {
        let g = RadialGrid::new(dim, &GridSpec::default()).unwrap();
        let phi = GridFunction::from_fn(g, |r| gaussian(dim, r, 1e-8)).unwrap();
        let p = smoothing_exponent_probe(&phi, 1.0, f64::INFINITY, &ts).unwrap();
        let expected = -(dim as f64) / 2.0;
        assert!((p.slope / expected - 1.0).abs() < 0.05, "N={dim}: {}", p.slope);
        assert_eq!(p.predicted, expected);
    }
    let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let c = GridFunction::constant(g, 3.0).unwrap();
    let p = smoothing_exponent_probe(&c, 1.0, f64::INFINITY, &ts).unwrap();
    assert!(p.degenerate && p.slope == 0.0);
}

#[test]
fn square_integrable_datum_smooths_at_rate_one_half() {
    // |x|^{−a} with a just below 1 is in L²_ul for N = 2; S(t)φ(0) ~ t^{−a/2}
    let cfg = cfg();
    let a = 0.98;
    let ev = RadialProfile::new(ProfileCore::PowerCore { a }, 2, Some(1.0)).evaluator(&cfg).unwrap();
    let g = RadialGrid::new(2, &GridSpec { r_min: 1e-9, ..GridSpec::default() }).unwrap();
    let phi = GridFunction::from_profile(g, &ev).unwrap();
    let ts: Vec<f64> = (0..=8).map(|k| 1e-6 * 10f64.powf(k as f64 / 8.0)).collect();
    let p = smoothing_exponent_probe(&phi, 2.0, f64::INFINITY, &ts).unwrap();
    assert!((p.slope + a / 2.0).abs() < 0.02, "{}", p.slope);
    assert!((p.predicted + 0.5).abs() < 1e-15);
}

#[test]
fn zero_source_gives_linear_flow() {
    let g = RadialGrid::new(1, &smooth_grid()).unwrap();
    let u0 = GridFunction::from_fn(g, |r| 1.0 + gaussian(1, r, 0.01)).unwrap();
    let opts = PicardOptions { t_final: 0.05, steps: 8, grading: 4, ..Default::default() };
    let tr = picard_iterate(&NonlinearitySpec::Zero, &u0, &opts, None).unwrap();
    assert_eq!(tr.verdict, IterationVerdict::Converged);
    assert_eq!(tr.records.len(), 1);
    let direct = apply_semigroup(&u0, 0.05).unwrap();
    let d = tr.final_state.unwrap().sup_distance(&direct);
    // one interpolation error per step on a datum of width 0.2
    assert!(d < 1e-4 * u0.sup(), "{d}");
}

#[test]
fn homogeneous_quadratic_matches_ode() {
    let g = RadialGrid::new(1, &GridSpec { r_min: 1e-2, r_mid: 0.5, r_max: 4.0, per_decade: 4, uniform_step: 0.5 }).unwrap();
    let u0 = GridFunction::constant(g, 1.0).unwrap();
    let opts = PicardOptions { t_final: 0.5, steps: 512, grading: 4, max_iter: 400, tol: 1e-12, ..Default::default() };
    let tr = picard_iterate(&NonlinearitySpec::Power { p: 2.0 }, &u0, &opts, None).unwrap();
    assert_eq!(tr.verdict, IterationVerdict::Converged);
    assert!(tr.is_monotone());
    let last = tr.time_trace.last().unwrap();
    assert!((last.center - 2.0).abs() < 1e-4, "{}", last.center);
}

#[test]
fn bounded_data_converge_with_bounded_monitor_norm() {
    // f = u³, N = 1, r = 2 > q − 1: ‖F(u)^{−2}‖_{1,ul} stays comparable to its start
    let cfg = cfg();
    let cube = NonlinearitySpec::Power { p: 3.0 };
    let ev = RadialProfile::new(ProfileCore::PowerCore { a: 0.2 }, 1, Some(0.5)).evaluator(&cfg).unwrap();
    let j = Monitor::new(MonitorSpec::TailPower { r: 2.0, f: cube.clone() }, &cfg).unwrap();
    let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let u0 = GridFunction::from_profile(g, &ev).unwrap();
    let opts = PicardOptions { t_final: 0.05, steps: 32, grading: 16, ..Default::default() };
    let tr = picard_iterate(&cube, &u0, &opts, Some(&j)).unwrap();
    assert_eq!(tr.verdict, IterationVerdict::Converged);
    assert!(tr.is_monotone());
    for w in tr.records.windows(2) {
        assert!(w[1].sup_norm >= w[0].sup_norm && w[1].ul_norm >= w[0].ul_norm * (1.0 - 1e-12));
    }
    let norms: Vec<f64> = tr.time_trace.iter().map(|r| r.monitor_norm.unwrap()).collect();
    let max = norms.iter().cloned().fold(0.0, f64::max);
    assert!(max <= 2.0 * norms[0], "{norms:?}");
}

#[test]
fn overflow_is_reported_as_divergence() {
    // u' = u², u(0) = 1 blows up at t = 1
    let g = RadialGrid::new(1, &GridSpec { r_min: 1e-2, r_mid: 0.5, r_max: 4.0, per_decade: 4, uniform_step: 0.5 }).unwrap();
    let u0 = GridFunction::constant(g, 1.0).unwrap();
    let opts = PicardOptions { t_final: 1.5, steps: 64, grading: 2, max_iter: 400, ..Default::default() };
    let tr = picard_iterate(&NonlinearitySpec::Power { p: 2.0 }, &u0, &opts, None).unwrap();
    assert_eq!(tr.verdict, IterationVerdict::DivergedInf);
    assert!(tr.divergence_time.unwrap() > 0.9);
}

#[test]
fn supersolution_without_source_holds() {
    let cfg = cfg();
    let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let u0 = GridFunction::from_fn(g, |r| 1.0 + 5.0 * (-r * r / 0.01).exp()).unwrap();
    let u1 = lift_datum(&u0, 1.0, 0.0).unwrap();
    let opts = PicardOptions { t_final: 0.1, steps: 16, grading: 6, ..Default::default() };
    for spec in [MonitorSpec::Identity, MonitorSpec::Power { r: 2.0 }, MonitorSpec::LogWeighted { gamma: 1.0 }] {
        let j = Monitor::new(spec, &cfg).unwrap();
        let c = verify_supersolution(&NonlinearitySpec::Zero, &j, 0.5, &u0, &u1, &opts, 1e-10).unwrap();
        assert!(c.holds, "{c:?}");
    }
}

#[test]
fn supersolution_for_cube_with_tail_power_monitor() {
    // f = u³, N = 1, J = F^{−2}: bounded singular-looking data and small T
    let cfg = cfg();
    let cube = NonlinearitySpec::Power { p: 3.0 };
    let j = Monitor::new(MonitorSpec::TailPower { r: 2.0, f: cube.clone() }, &cfg).unwrap();
    let ev = RadialProfile::new(ProfileCore::PowerCore { a: 0.2 }, 1, Some(0.5)).evaluator(&cfg).unwrap();
    let mut margins = Vec::new();
    for spec in [GridSpec::default(), GridSpec::default().refined()] {
        let g = RadialGrid::new(1, &spec).unwrap();
        let u0 = GridFunction::from_profile(g, &ev).unwrap();
        let u1 = lift_datum(&u0, 1.0, 1.0).unwrap();
        let opts = PicardOptions { t_final: 1e-3, steps: 32, grading: 16, ..Default::default() };
        let c = verify_supersolution(&cube, &j, 0.5, &u0, &u1, &opts, 1e-8).unwrap();
        assert!(c.holds, "{c:?}");
        margins.push(c.min_relative_margin);
    }
    assert!((margins[0] - margins[1]).abs() < 0.05 * margins[0].abs().max(1e-3), "{margins:?}");
}

#[test]
fn blowup_functional_identity() {
    let b = integrate_h(1.0, 1, 1e-2, 1e-2, 0.0).unwrap();
    assert!(b.max_rel_error <= 1e-6 && b.identity_residual <= 1e-6, "{} {}", b.max_rel_error, b.identity_residual);
    assert!(b.nondecreasing);
    // H₀ → 0: no blow-up before t = ρ
    let b = integrate_h(1.0, 1, 1e-2, 1e-9, 0.0).unwrap();
    assert!(b.blowup_time.is_none());
    // above the critical value it blows up inside (ρ², ρ)
    let b = integrate_h(1.0, 1, 1e-2, 2.0 * b.critical_h0, 0.0).unwrap();
    let t = b.blowup_time.unwrap();
    assert!(t > 1e-4 && t < 1e-2);
}

#[test]
fn contradiction_limit_value() {
    let s = contradiction_sides(1.0, 1, 0.1, 1e-4, 1.0, 0.05);
    assert!((s.limit - 3f64.powf(-0.5)).abs() < 1e-15);
    assert!((c3(1.0, 1) - 0.5f64.sqrt() * 0.5).abs() < 1e-15);
}

#[test]
fn critical_norm_is_scale_invariant() {
    // compactly supported bump (1 − s²)²₊
    let bump = |s: f64| if s < 1.0 { (1.0 - s * s).powi(2) } else { 0.0 };
    for (p, dim) in [(3.0, 1), (2.0, 2), (3.0, 3)] {
        for lambda in [0.3, 2.0, 7.0] {
            let c = scaling_check(bump, 1.0, p, dim, lambda).unwrap();
            assert!(c.rel_error <= 1e-8, "p={p} N={dim} λ={lambda}: {c:?}");
        }
    }
}

#[test]
fn initial_ball_mass_sets_h0() {
    let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
    let u0 = GridFunction::constant(g, 2.0).unwrap();
    // M = 2·2ρ, prefactor 3^{−1/2}(4π)^{−1/2}
    let h0 = default_h0(&u0, 0.1, 1e-4, 1.0).unwrap();
    let exact = 0.4 / (3f64.sqrt() * (4.0 * std::f64::consts::PI).sqrt());
    assert!((h0 - exact).abs() < 1e-10 * exact);
}

fn random_profile(seed: [f64; 3]) -> impl Fn(f64) -> f64 {
    move |r: f64| 1.0 + seed[0] * (-r * r / (0.01 + seed[1])).exp() + seed[2] / (1.0 + r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_preserves_order(a in 0.0f64..5.0, b in 0.0f64..1.0, c in 0.0f64..2.0, d in 0.0f64..3.0, t in 1e-6f64..2.0, dim in 1u32..4) {
        let g = RadialGrid::new(dim, &GridSpec::default()).unwrap();
        let lo = GridFunction::from_fn(g.clone(), random_profile([a, b, c])).unwrap();
        let hi = GridFunction::from_fn(g, |r| random_profile([a, b, c])(r) + d * (-r).exp()).unwrap();
        let (sl, sh) = (apply_semigroup(&lo, t).unwrap(), apply_semigroup(&hi, t).unwrap());
        for (x, y) in sl.values().iter().zip(sh.values()) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn jensen_holds_for_convex_and_concave(a in 0.0f64..5.0, b in 0.0f64..1.0, c in 0.0f64..2.0, r in 1.0f64..3.0, k in 0.2f64..1.0, t in 1e-5f64..1.0) {
        let cfg = cfg();
        let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
        let phi = GridFunction::from_fn(g, random_profile([a, b, c])).unwrap();
        let convex = Monitor::new(MonitorSpec::Power { r }, &cfg).unwrap();
        prop_assert!(jensen_check(&convex, &phi, t, false).unwrap().max_violation <= 1e-8);
        let concave = Monitor::new(MonitorSpec::Power { r: k }, &cfg).unwrap();
        prop_assert!(jensen_check(&concave, &phi, t, true).unwrap().max_violation <= 1e-8);
    }
}
