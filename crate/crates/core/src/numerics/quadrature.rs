//! Adaptive Gauss–Kronrod quadrature and tail sums for decaying integrands.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 Kronrod nodes on `[-1, 1]` with their weights.
pub fn gk15_nodes() -> [(f64, f64); 15] {
    let mut out = [(0.0, 0.0); 15];
    for j in 0..7 {
        out[2 * j] = (-XGK[j], WGK[j]);
        out[2 * j + 1] = (XGK[j], WGK[j]);
    }
    out[14] = (0.0, WGK[7]);
    out
}

/// Integral estimate with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod pass on `[a, b]`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    let value = rk * h;
    let raw = ((rk - rg) * h).abs();
    // Gauss-vs-Kronrod difference overstates the error once converged
    let error = if value != 0.0 && raw > 0.0 {
        value.abs() * (200.0 * raw / value.abs()).powf(1.5).min(1.0)
    } else {
        raw
    };
    Estimate { value, error: error.max(50.0 * f64::EPSILON * value.abs()) }
}

/// Globally adaptive bisection until `error <= max(abs_tol, rel_tol·|I|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let first = gk15(&mut f, a, b);
    let mut segs: Vec<(f64, f64, Estimate)> = vec![(a, b, first)];
    let mut total = first.value;
    let mut err = first.error;
    let mut n = 1;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if !total.is_finite() {
            return Err(Error::NonFinite(format!("integrand on [{a:e}, {b:e}]")));
        }
        if n >= max_subdivisions {
            return Err(Error::QuadratureFailure { estimate: total, error: err });
        }
        let (k, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .unwrap();
        let (lo, hi, old) = segs.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further; accept what we have
            segs.push((lo, hi, old));
            break;
        }
        let l = gk15(&mut f, lo, mid);
        let r = gk15(&mut f, mid, hi);
        total += l.value + r.value - old.value;
        err += l.error + r.error - old.error;
        segs.push((lo, mid, l));
        segs.push((mid, hi, r));
        n += 1;
    }
    // recompute sums to remove drift from the incremental updates
    let value: f64 = segs.iter().map(|s| s.2.value).sum();
    let error: f64 = segs.iter().map(|s| s.2.error).sum();
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a:e}, {b:e}]")));
    }
    Ok(Estimate { value, error })
}

/// Result of summing an integral over `[x0, ∞)` chunk by chunk.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub error: f64,
    /// Extrapolated contribution beyond the last integrated chunk.
    pub remainder: f64,
    pub chunks: usize,
}

/// Integrate a nonnegative integrand that decays at least exponentially in `x`
/// over `[x0, x_cap]` in unit chunks, then add a geometric remainder.
///
/// Returns `Ok(None)` when the chunk sums stop decreasing, which is taken as
/// divergence.
pub fn exponential_tail<F: FnMut(f64) -> f64>(
    mut g: F,
    x0: f64,
    x_cap: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Option<TailSum>> {
    // whole chunks only, so the ratio of successive chunks stays meaningful
    let x_cap = x0 + (x_cap - x0).floor();
    if x_cap < x0 + 2.0 {
        return Err(Error::InvalidParameter(format!("tail range [{x0}, {x_cap}] shorter than two chunks")));
    }
    let mut sum: f64 = 0.0;
    let mut err = 0.0;
    let mut prev = f64::NAN;
    let mut ratio = f64::NAN;
    let mut x = x0;
    let mut k = 0;
    let width = 1.0;
    let mut stalled = 0;
    loop {
        let hi = (x + width).min(x_cap);
        let target = (rel_tol * 0.1 * sum.abs()).max(f64::MIN_POSITIVE);
        let est = adaptive(&mut g, x, hi, target, rel_tol * 0.1, max_subdivisions)?;
        let c = est.value;
        sum += c;
        err += est.error;
        k += 1;
        if prev.is_finite() && prev > 0.0 {
            ratio = c / prev;
        }
        prev = c;
        x = hi;
        if c == 0.0 && k > 1 {
            return Ok(Some(TailSum { value: sum, error: err, remainder: 0.0, chunks: k }));
        }
        if ratio.is_finite() && ratio < 1.0 && k >= 3 {
            let rem = c * ratio / (1.0 - ratio);
            if rem <= rel_tol * sum.abs() {
                return Ok(Some(TailSum { value: sum + rem, error: err + rem, remainder: rem, chunks: k }));
            }
        }
        if ratio.is_finite() && ratio >= 1.0 - 1e-9 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        if stalled >= 40 {
            return Ok(None);
        }
        if x >= x_cap {
            if ratio.is_finite() && ratio < 1.0 - 1e-6 {
                let rem = c * ratio / (1.0 - ratio);
                return Ok(Some(TailSum { value: sum + rem, error: err + rem, remainder: rem, chunks: k }));
            }
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        for deg in 0..=22 {
            let est = gk15(&mut |x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((est.value - exact).abs() < 1e-14, "degree {deg}: {}", est.value);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-13, 1e-12, 500).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_tail_sums_exp_decay() {
        let t = exponential_tail(|x: f64| (-0.3 * x).exp(), 0.0, 700.0, 1e-12, 200).unwrap().unwrap();
        assert!((t.value - 1.0 / 0.3).abs() < 1e-9, "{}", t.value);
    }

    #[test]
    fn exponential_tail_flags_flat_integrand() {
        let t = exponential_tail(|_| 1.0, 0.0, 700.0, 1e-12, 200).unwrap();
        assert!(t.is_none());
    }
}
