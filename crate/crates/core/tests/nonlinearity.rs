use proptest::prelude::*;
use semilinear_core::nonlinearity::{
    check_fprime_tail_bound, eval_f, eval_tail, eval_tail_inverse, exponent_profile, karamata_profile,
    ln_tail,
    NonlinearitySpec, DEFAULT_WINDOW,
};
use semilinear_core::numerics::{quadrature, QuadratureConfig, TailTransform};
use semilinear_core::Error;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn catalog_point_values() {
    assert_eq!(eval_f(&NonlinearitySpec::Power { p: 2.0 }, 3.0).unwrap(), 9.0);
    let v = eval_f(&NonlinearitySpec::f_beta(1, 0.0), 2.0).unwrap();
    assert!((v - 8.0).abs() < 1e-12);
    // a = e² makes the denominator exactly 1, so f(0) = e⁴
    let v = eval_f(&NonlinearitySpec::LogQuotient { p: 2.0 }, 0.0).unwrap();
    assert!((v - 54.598_150_033_144_236).abs() < 1e-10);
}

#[test]
fn tail_point_values() {
    assert!((eval_tail(&NonlinearitySpec::Power { p: 2.0 }, 4.0, &cfg()).unwrap() - 0.25).abs() < 1e-13);
    assert!((eval_tail(&NonlinearitySpec::Power { p: 3.0 }, 2.0, &cfg()).unwrap() - 0.125).abs() < 1e-13);
    // log(10 + e²)/(10 + e²), checked against mpmath
    let v = eval_tail(&NonlinearitySpec::LogQuotient { p: 2.0 }, 10.0, &cfg()).unwrap();
    assert!((v - 0.164_232_091_279_89).abs() < 1e-10, "{v}");
}

#[test]
fn log_quotient_tail_matches_closed_form() {
    for p in [1.5, 2.0, 3.0] {
        let f = NonlinearitySpec::LogQuotient { p };
        for k in 0..=60 {
            let u = 10f64.powf(k as f64 / 10.0);
            let q = eval_tail(&f, u, &cfg()).unwrap();
            let c = f.closed_form_tail(u).unwrap();
            assert!(((q - c) / c).abs() <= 1e-8, "p={p} u={u}: {q} vs {c}");
        }
    }
}

#[test]
fn transforms_agree_on_slow_tails() {
    let f = NonlinearitySpec::f_beta(2, 1.0);
    let rec = QuadratureConfig { tail_transform: TailTransform::Reciprocal, ..cfg() };
    for u in [1.0, 50.0, 1e5] {
        let a = eval_tail(&f, u, &cfg()).unwrap();
        let b = eval_tail(&f, u, &rec).unwrap();
        assert!(((a - b) / a).abs() < 1e-9, "u={u}");
    }
}

#[test]
fn inverse_of_log_perturbed_power() {
    let f = NonlinearitySpec::f_beta(2, 1.0);
    let u = eval_tail_inverse(&f, 0.01, &cfg()).unwrap();
    assert!((eval_tail(&f, u, &cfg()).unwrap() - 0.01).abs() < 1e-13);
    // independent bisection on the quadrature F
    let (mut lo, mut hi) = (1.0, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval_tail(&f, mid, &cfg()).unwrap() > 0.01 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((u - lo).abs() < 1e-9 * u);
}

#[test]
fn inverse_rejects_unattainable_values() {
    let f = NonlinearitySpec::ExpPower { p: 1.0 };
    assert!(matches!(eval_tail_inverse(&f, 1.5, &cfg()), Err(Error::OutOfRange { .. })));
    assert!(eval_tail_inverse(&f, -1.0, &cfg()).is_err());
}

#[test]
fn exponents_of_catalog_kinds() {
    let p3 = exponent_profile(&NonlinearitySpec::Power { p: 3.0 }, &cfg()).unwrap();
    assert!((p3.q_estimate - 1.5).abs() < 1e-6 && (p3.p_estimate - 3.0).abs() < 1e-6);
    let e1 = exponent_profile(&NonlinearitySpec::ExpPower { p: 1.0 }, &cfg()).unwrap();
    assert!((e1.q_estimate - 1.0).abs() < 1e-6);
    let fb = exponent_profile(&NonlinearitySpec::f_beta(2, 5.0), &cfg()).unwrap();
    assert!((fb.q_estimate - 2.0).abs() < 1e-3, "{}", fb.q_estimate);
    assert!(fb.conjugacy_residual < 1e-3);
}

#[test]
fn bound_check_examples() {
    let w = DEFAULT_WINDOW;
    assert!(check_fprime_tail_bound(&NonlinearitySpec::ExpPower { p: 2.0 }, 1.0, w, &cfg()).unwrap().holds);
    assert!(!check_fprime_tail_bound(&NonlinearitySpec::ExpPower { p: 0.5 }, 1.0, w, &cfg()).unwrap().holds);
    let lq = NonlinearitySpec::LogQuotient { p: 3.0 };
    assert!(!check_fprime_tail_bound(&lq, 1.5, w, &cfg()).unwrap().holds);
}

#[test]
fn karamata_index_of_log_perturbed_power() {
    let k = karamata_profile(&NonlinearitySpec::f_beta(2, 1.0), 10.0, &cfg()).unwrap();
    assert!((k.rv_index - 2.0).abs() < 1e-3, "{}", k.rv_index);
    assert!(k.representation_residual < 1e-9);
    let e = karamata_profile(&NonlinearitySpec::ExpPower { p: 1.0 }, 10.0, &cfg()).unwrap();
    assert!(e.rv_index.is_infinite());
}

#[test]
fn spec_json_roundtrip() {
    let f = NonlinearitySpec::f_beta(2, -1.5);
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(s, r#"{"kind":"LogPerturbedPower","params":{"p":2.0,"beta":-1.5}}"#);
    let back: NonlinearitySpec = serde_json::from_str(&s).unwrap();
    assert_eq!(back, f);
}

fn catalog() -> Vec<NonlinearitySpec> {
    vec![
        NonlinearitySpec::Power { p: 2.5 },
        NonlinearitySpec::f_beta(1, -2.0),
        NonlinearitySpec::f_beta(3, 1.0),
        NonlinearitySpec::ExpPower { p: 0.5 },
        NonlinearitySpec::ExpLogPower { p: 2.0 },
        NonlinearitySpec::LogQuotient { p: 2.0 },
        NonlinearitySpec::IteratedExp { n: 2 },
        NonlinearitySpec::LogWeightedInverse { alpha: 1.0, dim: 2 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_nondecreasing_and_tail_decreasing(k in 0usize..8, a in -2.0f64..2.5, b in -2.0f64..2.5) {
        let f = &catalog()[k];
        let (u1, u2) = (10f64.powf(a.min(b)), 10f64.powf(a.max(b)) + 1e-9);
        prop_assert!(f.ln_value(u1).unwrap() <= f.ln_value(u2).unwrap());
        prop_assert!(ln_tail(f, u1, &cfg()).unwrap() >= ln_tail(f, u2, &cfg()).unwrap());
    }

    #[test]
    fn inverse_consistency(k in 0usize..8, e in -6.0f64..0.0) {
        let f = &catalog()[k];
        let v = 10f64.powf(e);
        match eval_tail_inverse(f, v, &cfg()) {
            Ok(u) => {
                let back = if u == 0.0 { semilinear_core::nonlinearity::tail_at_zero(f, &cfg()).unwrap() } else { eval_tail(f, u, &cfg()).unwrap() };
                prop_assert!((back - v).abs() <= 10.0 * 1e-12 * v.max(1.0) + 1e-12 * v);
            }
            Err(Error::OutOfRange { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn analytic_derivative_matches_central_difference(k in 0usize..8, a in -1.0f64..2.5) {
        // compared in log form so the iterated exponential stays finite
        let f = &catalog()[k];
        let u = 10f64.powf(a);
        let h = u.max(1.0) * 1e-6;
        let fd = (f.ln_value(u + h).unwrap() - f.ln_value(u - h).unwrap()) / (2.0 * h);
        let an = f.log_derivative(u).unwrap();
        prop_assert!(((fd - an) / an).abs() < 1e-6, "{fd} vs {an}");
    }
}

#[test]
fn power_tail_matches_closed_form_on_range() {
    for p in [1.5, 2.0, 3.0, 5.0] {
        let f = NonlinearitySpec::Power { p };
        for k in 0..=24 {
            let u = 10f64.powf(k as f64 / 4.0);
            let q = eval_tail(&f, u, &cfg()).unwrap();
            let c = f.closed_form_tail(u).unwrap();
            assert!(((q - c) / c).abs() <= 1e-8);
        }
    }
    // the tail integrand itself, summed directly, as a third opinion
    let direct = quadrature::adaptive(|s: f64| 1.0 / (1.0 / s).powi(3) / (s * s), 0.0, 0.5, 1e-300, 1e-13, 400)
        .unwrap()
        .value;
    assert!((direct - 0.125).abs() < 1e-12);
}
