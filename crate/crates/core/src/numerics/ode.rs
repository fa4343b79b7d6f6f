//! Adaptive Dormand–Prince 5(4) stepping for scalar ODEs.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-300, h_init: 1e-3, h_min: 1e-14, max_steps: 200_000 }
    }
}

/// How an integration run ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeStop {
    Reached,
    /// The solution crossed `guard` at the recorded abscissa.
    Guard(f64),
    /// The step size collapsed, usually right before a singularity.
    StepUnderflow(f64),
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = rhs(x, y)` from `x0` to `x1 > x0`, recording accepted steps.
pub fn dopri5<F: FnMut(f64, f64) -> f64>(
    mut rhs: F,
    x0: f64,
    y0: f64,
    x1: f64,
    guard: f64,
    opts: OdeOptions,
) -> Result<(Vec<(f64, f64)>, OdeStop)> {
    let mut x = x0;
    let mut y = y0;
    let mut h = opts.h_init.min(x1 - x0);
    let mut out = vec![(x, y)];
    let mut k = [0.0; 7];
    k[0] = rhs(x, y);
    for _ in 0..opts.max_steps {
        if x >= x1 {
            return Ok((out, OdeStop::Reached));
        }
        if x + h > x1 {
            h = x1 - x;
        }
        for s in 1..7 {
            let mut yi = y;
            for j in 0..s {
                yi += h * A[s][j] * k[j];
            }
            k[s] = rhs(x + C[s] * h, yi);
        }
        let mut y5 = y;
        let mut y4 = y;
        for s in 0..7 {
            y5 += h * B5[s] * k[s];
            y4 += h * B4[s] * k[s];
        }
        let sc = opts.atol + opts.rtol * y.abs().max(y5.abs());
        let err = ((y5 - y4) / sc).abs();
        if err.is_finite() && err <= 1.0 && y5.is_finite() {
            x += h;
            y = y5;
            k[0] = k[6];
            out.push((x, y));
            if y >= guard {
                return Ok((out, OdeStop::Guard(x)));
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            h *= fac;
            if h < opts.h_min * x.abs().max(1.0) {
                return Ok((out, OdeStop::StepUnderflow(x)));
            }
        }
    }
    Err(Error::NonFinite("ODE step limit reached".into()))
}
