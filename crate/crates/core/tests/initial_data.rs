use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semilinear_core::classifier::{Monitor, MonitorSpec};
use semilinear_core::initial_data::*;
use semilinear_core::nonlinearity::NonlinearitySpec;
use semilinear_core::numerics::QuadratureConfig;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn core_argument(dim: u32, eps: f64, s: f64) -> f64 {
    let n = dim as f64;
    s.powf(-n) * (1.0 / s).ln().powf(-n / 2.0 - 1.0 + eps)
}

#[test]
fn constant_profile_norms() {
    let ev = RadialProfile::new(ProfileCore::Constant { c: 2.0 }, 1, None).evaluator(&cfg()).unwrap();
    assert!((ul_norm(&ev, 1.0, &cfg()).unwrap().value - 4.0).abs() < 1e-10);
    let ev = RadialProfile::new(ProfileCore::Constant { c: 3.0 }, 2, None).evaluator(&cfg()).unwrap();
    let n = ul_norm(&ev, 2.0, &cfg()).unwrap();
    assert!((n.value - (9.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
}

#[test]
fn counterexample_is_continuous_and_nonincreasing() {
    for dim in [1, 2, 3] {
        let (p, rep) = build_counterexample(1.0, 0.1, 0.0, dim, None, &cfg()).unwrap();
        let ev = p.evaluator(&cfg()).unwrap();
        let (a, b) = (ev.value(rep.m * (1.0 - 1e-13)).unwrap(), ev.value(rep.m).unwrap());
        assert!(((a - b) / b).abs() < 1e-10, "N={dim}: {a} vs {b}");
        assert!(ev.monotonicity_defect(1e-10, 10.0).unwrap() <= 0.0);
    }
}

#[test]
fn counterexample_dominates_explicit_lower_bound() {
    // u₀ = h_β⁻¹(v) ≥ h̃_β(v) once v is large
    for dim in [1, 2] {
        let (p, rep) = build_counterexample(1.0, 0.1, 0.0, dim, None, &cfg()).unwrap();
        let ev = p.evaluator(&cfg()).unwrap();
        for k in 1..=40 {
            let s = rep.m * 0.5f64.powi(k);
            let lower = h_tilde(1.0, dim, core_argument(dim, 0.1, s));
            assert!(ev.value(s).unwrap() >= lower, "N={dim} s={s}");
        }
    }
}

#[test]
fn counterexample_in_uniformly_local_l1_and_closure() {
    for dim in [1, 2, 3] {
        let (p, _) = build_counterexample(1.0, 0.1, 0.0, dim, None, &cfg()).unwrap();
        let ev = p.evaluator(&cfg()).unwrap();
        let c = closure_membership_heuristic(&ev, &cfg()).unwrap();
        assert!(c.l1_ul_norm.is_finite());
        assert!(c.in_closure_likely && !c.inconclusive);
        // monotone truncation
        for w in c.truncation_trace.windows(2) {
            assert!(w[1].error <= w[0].error * (1.0 + 1e-9));
        }
        // u₀ s^N ~ (log 1/s)^{−(N/2+1−ε+Nβ/2)} makes the error decay with exponent N/2−ε+Nβ/2
        let n = dim as f64;
        let expected = -(n / 2.0 - 0.1 + n / 2.0);
        assert!((c.decay_exponent - expected).abs() < 0.15, "N={dim}: {} vs {expected}", c.decay_exponent);
    }
}

#[test]
fn log_corrected_integrability_threshold() {
    // finite for α < N/2 − ε, divergent from α = N/2 − ε on
    for dim in [1, 2] {
        let n = dim as f64;
        let (p, rep) = build_counterexample(1.0, 0.1, 0.0, dim, None, &cfg()).unwrap();
        let ev = p.evaluator(&cfg()).unwrap();
        let fb = NonlinearitySpec::f_beta(dim, 1.0);
        for (alpha, finite) in [(0.0, true), (n / 2.0 - 0.2, true), (n / 2.0 - 0.1, false), (n / 2.0, false)] {
            let j = Monitor::new(MonitorSpec::LogCorrected { alpha, dim, f: fb.clone() }, &cfg()).unwrap();
            let s = singular_integrability(&ev, &j, rep.m, &cfg()).unwrap();
            assert_eq!(s.value.is_finite(), finite, "N={dim} alpha={alpha}: {s:?}");
        }
    }
}

#[test]
fn model_integral_matches_closed_form() {
    let id = Monitor::new(MonitorSpec::Identity, &cfg()).unwrap();
    for dim in [1, 2, 3] {
        for lambda in [1.2, 1.4, 1.8] {
            let ev = RadialProfile::model(dim, lambda).evaluator(&cfg()).unwrap();
            for rho in [1e-1, 1e-2, 1e-3] {
                let s = singular_integrability(&ev, &id, rho, &cfg()).unwrap();
                let exact = (1.0f64 / rho).ln().powf(1.0 - lambda) / (lambda - 1.0);
                assert!(((s.radial_value - exact) / exact).abs() < 1e-6, "N={dim} λ={lambda} ρ={rho}");
            }
        }
    }
    // N = 2, ε = 0.1, α = 0.5 gives λ = 1.4
    let ev = RadialProfile::model(2, 1.4).evaluator(&cfg()).unwrap();
    let s = singular_integrability(&ev, &id, 0.1, &cfg()).unwrap();
    assert!((s.closed_form.unwrap() - 1.7908).abs() < 1e-4);
    for lambda in [1.0, 0.8] {
        let ev = RadialProfile::model(1, lambda).evaluator(&cfg()).unwrap();
        assert!(singular_integrability(&ev, &id, 0.1, &cfg()).unwrap().divergent);
    }
}

#[test]
fn f_inverse_power_ball_integral() {
    // F(u₀)^{−r} = s^{−αr}, so ∫_0^ρ F(u₀)^{−r} s^{N−1} ds = ρ^{N−αr}/(N−αr)
    let f = NonlinearitySpec::Power { p: 3.0 };
    let (p, _) = build_f_inverse_power(&f, 2.1, 0.45, 1, &cfg()).unwrap();
    let ev = p.evaluator(&cfg()).unwrap();
    let j = Monitor::new(MonitorSpec::TailPower { r: 0.45, f: f.clone() }, &cfg()).unwrap();
    let rho = 0.2;
    let s = singular_integrability(&ev, &j, rho, &cfg()).unwrap();
    let e = 1.0 - 2.1 * 0.45;
    let exact = rho.powf(e) / e;
    assert!(((s.radial_value - exact) / exact).abs() < 1e-6, "{} vs {exact}", s.radial_value);
}

#[test]
fn f_inverse_power_in_uniformly_local_l1() {
    // N = 3, r = 1, 2 < α < 3 and q = 3/2 ≤ 1 + r
    let f = NonlinearitySpec::Power { p: 3.0 };
    let (p, rep) = build_f_inverse_power(&f, 2.5, 1.0, 3, &cfg()).unwrap();
    assert!(rep.q_condition_holds);
    let ev = p.evaluator(&cfg()).unwrap();
    assert!(ul_norm(&ev, 1.0, &cfg()).unwrap().value.is_finite());
}

#[test]
fn origin_ball_dominates_random_centers() {
    // nonincreasing radial data: the sup over centers sits at the origin
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (p, _) = build_counterexample(1.0, 0.1, 0.0, 2, None, &cfg()).unwrap();
    let profiles = [
        p,
        RadialProfile::new(ProfileCore::Gaussian { tau: 0.05, mass: 1.0 }, 1, None),
        RadialProfile::new(ProfileCore::PowerCore { a: 1.5 }, 3, Some(0.5)),
    ];
    for p in profiles {
        let ev = p.evaluator(&cfg()).unwrap();
        let origin = ul_norm(&ev, 1.0, &cfg()).unwrap().value;
        for _ in 0..334 {
            let d: f64 = rng.gen_range(0.0..4.0);
            if (d - 1.0).abs() < 1e-6 {
                continue;
            }
            let v = off_center_ball_integral(&ev, 1.0, d, &cfg()).unwrap();
            assert!(v <= origin * (1.0 + 1e-5), "{:?} d={d}: {v} > {origin}", p.core);
        }
    }
}

#[test]
fn non_integrable_core_is_not_in_closure() {
    let ev = RadialProfile::new(ProfileCore::PowerCore { a: 1.0 }, 1, Some(0.5)).evaluator(&cfg()).unwrap();
    let c = closure_membership_heuristic(&ev, &cfg()).unwrap();
    assert!(!c.in_closure_likely);
    assert!(c.l1_ul_norm.is_infinite());
    let n = ul_norm(&ev, 1.0, &cfg()).unwrap();
    assert!((n.divergence_exponent.unwrap() - 0.0).abs() < 1e-6);
}

#[test]
fn constant_profile_is_in_closure() {
    let ev = RadialProfile::new(ProfileCore::Constant { c: 3.0 }, 2, None).evaluator(&cfg()).unwrap();
    let c = closure_membership_heuristic(&ev, &cfg()).unwrap();
    assert!(c.in_closure_likely);
    assert!(c.truncation_trace.iter().all(|s| s.error == 0.0));
}

#[test]
fn profile_json_roundtrip() {
    let (p, _) = build_counterexample(1.0, 0.1, 0.0, 1, None, &cfg()).unwrap();
    let s = serde_json::to_string(&p).unwrap();
    let back: RadialProfile = serde_json::from_str(&s).unwrap();
    assert_eq!(back, p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn explicit_lower_bound_lies_below_inverse(beta in 0.2f64..3.0, dim in 1u32..4, e in 2.0f64..8.0) {
        // h_β(h̃_β(u)) ≤ u
        let u = 10f64.powf(e);
        let l = ln_h_beta(beta, dim, h_tilde(beta, dim, u), &cfg()).unwrap();
        prop_assert!(l <= u.ln());
    }

    #[test]
    fn truncation_is_monotone_in_level(k in 0u32..30) {
        let (p, _) = build_counterexample(1.0, 0.1, 0.0, 1, None, &cfg()).unwrap();
        let a = p.truncated(k).evaluator(&cfg()).unwrap();
        let b = p.truncated(k + 1).evaluator(&cfg()).unwrap();
        for s in [1e-12, 1e-6, 1e-3, 0.05, 0.5] {
            prop_assert!(a.value(s).unwrap() <= b.value(s).unwrap() * (1.0 + 1e-12));
        }
    }
}
