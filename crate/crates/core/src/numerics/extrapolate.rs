//! Limit extraction from sampled sequences.

use nalgebra::{DMatrix, DVector};

/// Extrapolated limit with a spread-based uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

/// Least-squares polynomial of the given degree through `(x, y)`, evaluated at 0.
pub fn poly_value_at_zero(x: &[f64], y: &[f64], degree: usize) -> Option<f64> {
    let n = x.len();
    if n <= degree || n != y.len() {
        return None;
    }
    // scale the abscissa so the Vandermonde matrix stays well conditioned
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(n, degree + 1, |i, j| (x[i] / scale).powi(j as i32));
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let c = svd.solve(&b, 1e-14).ok()?;
    Some(c[0])
}

/// Limit of `y` as `x → 0` from samples ordered toward small `x`.
///
/// Fits polynomials of degree 1..=3 to the last few samples and reports the
/// highest-degree value with the spread between neighbouring fits.
pub fn limit_at_zero(x: &[f64], y: &[f64]) -> Option<LimitEstimate> {
    let n = x.len().min(y.len());
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(LimitEstimate { value: y[0], uncertainty: f64::INFINITY });
    }
    if n == 2 {
        let v = poly_value_at_zero(x, y, 1)?;
        return Some(LimitEstimate { value: v, uncertainty: (v - y[1]).abs() });
    }
    let take = n.min(8);
    let xs = &x[n - take..];
    let ys = &y[n - take..];
    let deg = (take - 2).min(3);
    let best = poly_value_at_zero(xs, ys, deg)?;
    let lower = poly_value_at_zero(xs, ys, deg - 1).unwrap_or(best);
    let short = if take > deg + 2 {
        poly_value_at_zero(&xs[2..], &ys[2..], deg).unwrap_or(best)
    } else {
        best
    };
    let spread = (best - lower).abs().max((best - short).abs());
    Some(LimitEstimate { value: best, uncertainty: spread })
}

/// Iterated Aitken Δ² acceleration of a sequence (last accelerated entry).
pub fn aitken(seq: &[f64]) -> Option<f64> {
    let mut s: Vec<f64> = seq.to_vec();
    let mut last = *s.last()?;
    while s.len() >= 3 {
        let mut t = Vec::with_capacity(s.len() - 2);
        for w in s.windows(3) {
            let d = w[2] - 2.0 * w[1] + w[0];
            if d.abs() <= 1e-300 || !d.is_finite() {
                t.push(w[2]);
            } else {
                t.push(w[2] - (w[2] - w[1]).powi(2) / d);
            }
        }
        last = *t.last()?;
        s = t;
    }
    Some(last)
}

/// Log-scale sample points `ln u_j = x0·2^{j/per_doubling}` up to `x_max`.
pub fn log_scale_points(x0: f64, per_doubling: usize, x_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let x = x0 * 2f64.powf(j as f64 / per_doubling as f64);
        if x > x_max {
            break;
        }
        out.push(x);
        j += 1;
    }
    out
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_polynomial_limit() {
        let x: Vec<f64> = (1..10).map(|k| 1.0 / k as f64).collect();
        let y: Vec<f64> = x.iter().map(|s| 2.0 + 0.5 * s - 3.0 * s * s).collect();
        let l = limit_at_zero(&x, &y).unwrap();
        assert!((l.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn aitken_accelerates_geometric_error() {
        let seq: Vec<f64> = (0..8).map(|k| 1.0 + 0.5f64.powi(k)).collect();
        assert!((aitken(&seq).unwrap() - 1.0).abs() < 1e-12);
    }
}
