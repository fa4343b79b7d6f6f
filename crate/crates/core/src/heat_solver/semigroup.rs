//! The heat semigroup `S(t)` on radial grid functions.
//!
//! `S(t)` acts on the piecewise-linear interpolant with its constant far
//! field, so it is a positive linear map on nodal values: every row of
//! weights is nonnegative and the far field takes the remaining mass. That
//! keeps constants, ordering and Jensen's inequality intact up to rounding.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::quadrature::gk15_nodes;
use crate::numerics::special::{erf, erfc, scaled_bessel_i_ratio};

use super::grid::{GridFunction, RadialGrid};

/// The kernel is below `e^{−100}` of its peak beyond this many `√(4t)`.
const WINDOW: f64 = 10.0;

const GL5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_23),
    (0.5, 0.284_444_444_444_444_44),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_23),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

#[derive(Clone, Debug)]
struct Row {
    start: usize,
    w: Vec<f64>,
    far: f64,
}

/// `S(t)` on one grid, as banded nonnegative weights.
#[derive(Clone, Debug)]
pub struct SemigroupOperator {
    grid: Arc<RadialGrid>,
    t: f64,
    rows: Vec<Row>,
}

/// `½(erf(b) − erf(a))` without cancellation in the tails.
fn gauss_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        0.5 * (erfc(a) - erfc(b))
    } else if b <= 0.0 {
        0.5 * (erfc(-b) - erfc(-a))
    } else {
        0.5 * (erf(b) - erf(a))
    }
}

/// Weights of `∫_a^b g(y)·hat(y) dy` for `g = (4πt)^{−1/2} e^{−(y−c)²/4t}` and
/// the two linear hats of the element `[x0, x1] ⊇ [a, b]`.
fn gaussian_hat_weights(c: f64, sigma: f64, a: f64, b: f64, x0: f64, x1: f64) -> (f64, f64) {
    let h = x1 - x0;
    if b - a < 0.1 * sigma {
        let norm = 1.0 / (sigma * std::f64::consts::PI.sqrt());
        let (mut w0, mut w1) = (0.0, 0.0);
        for (z, w) in GL5 {
            let y = a + z * (b - a);
            let d = (y - c) / sigma;
            let g = w * (b - a) * norm * (-d * d).exp();
            w0 += g * (x1 - y) / h;
            w1 += g * (y - x0) / h;
        }
        return (w0, w1);
    }
    let (wa, wb) = ((a - c) / sigma, (b - c) / sigma);
    let m0 = gauss_mass(wa, wb);
    let m1 = sigma / (2.0 * std::f64::consts::PI.sqrt()) * ((-wa * wa).exp() - (-wb * wb).exp());
    let w0 = ((x1 - c) * m0 - m1) / h;
    let w1 = ((c - x0) * m0 + m1) / h;
    (w0.max(0.0), w1.max(0.0))
}

/// Radial density `k_N(r, ρ, t) ρ^{N−1}` of the heat kernel for `N ≥ 2`.
fn radial_density(dim: u32, r: f64, rho: f64, t: f64) -> f64 {
    let n = dim as f64;
    let nu = n / 2.0 - 1.0;
    let d = r - rho;
    let z = r * rho / (2.0 * t);
    (2.0 * std::f64::consts::PI).powf(n / 2.0) * (4.0 * std::f64::consts::PI * t).powf(-n / 2.0)
        * (-d * d / (4.0 * t)).exp()
        * scaled_bessel_i_ratio(nu, z)
        * rho.powi(dim as i32 - 1)
}

impl SemigroupOperator {
    pub fn new(grid: &Arc<RadialGrid>, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("semigroup time must be positive, got {t}; use the datum itself at t = 0")));
        }
        let floor = grid.time_floor();
        if t < floor * (1.0 - 1e-12) {
            return Err(Error::TimeBelowFloor { t, floor });
        }
        let x = grid.nodes();
        let dim = grid.dim();
        let sigma = (4.0 * t).sqrt();
        let half = WINDOW * sigma;
        let rows: Vec<Row> = x
            .par_iter()
            .map(|&r| {
                let lo = (r - half).max(0.0);
                let hi = r + half;
                let first = (x.partition_point(|&v| v <= lo).max(1) - 1).min(x.len() - 2);
                let last = x.partition_point(|&v| v < hi).min(x.len() - 1).max(first + 1);
                let mut w = vec![0.0; last - first + 1];
                for j in first..last {
                    let (x0, x1) = (x[j], x[j + 1]);
                    let (a, b) = (x0.max(lo), x1.min(hi));
                    if b <= a {
                        continue;
                    }
                    let (w0, w1) = if dim == 1 {
                        let (p0, p1) = gaussian_hat_weights(r, sigma, a, b, x0, x1);
                        let (m0, m1) = gaussian_hat_weights(-r, sigma, a, b, x0, x1);
                        (p0 + m0, p1 + m1)
                    } else {
                        let pieces = ((b - a) / sigma).ceil().max(1.0) as usize;
                        let (mut w0, mut w1) = (0.0, 0.0);
                        for p in 0..pieces {
                            let pa = a + (b - a) * p as f64 / pieces as f64;
                            let pb = a + (b - a) * (p + 1) as f64 / pieces as f64;
                            let (c, hw) = (0.5 * (pa + pb), 0.5 * (pb - pa));
                            for (z, wk) in gk15_nodes() {
                                let y = c + hw * z;
                                let k = wk * hw * radial_density(dim, r, y, t);
                                w0 += k * (x1 - y) / (x1 - x0);
                                w1 += k * (y - x0) / (x1 - x0);
                            }
                        }
                        (w0, w1)
                    };
                    w[j - first] += w0;
                    w[j + 1 - first] += w1;
                }
                let inner: f64 = w.iter().sum();
                Row { start: first, w, far: (1.0 - inner).max(0.0) }
            })
            .collect();
        Ok(Self { grid: grid.clone(), t, rows })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `S(t)` on raw nodal values; the last entry doubles as the far field.
    pub fn apply_values(&self, v: &[f64], out: &mut [f64]) {
        let far = *v.last().unwrap();
        for (o, row) in out.iter_mut().zip(&self.rows) {
            let mut s = row.far * far;
            for (k, w) in row.w.iter().enumerate() {
                s += w * v[row.start + k];
            }
            *o = s;
        }
    }

    pub fn apply(&self, phi: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(phi.grid(), &self.grid) && **phi.grid() != *self.grid {
            return Err(Error::InvalidParameter("grid function lives on a different grid".into()));
        }
        let mut out = vec![0.0; phi.values().len()];
        self.apply_values(phi.values(), &mut out);
        GridFunction::new(self.grid.clone(), out)
    }

    /// Largest `|Σ weights − 1|` over the rows.
    pub fn mass_defect(&self) -> f64 {
        self.rows.iter().map(|r| (r.w.iter().sum::<f64>() + r.far - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `S(t)φ` on the grid of `φ`.
pub fn apply_semigroup(phi: &GridFunction, t: f64) -> Result<GridFunction> {
    SemigroupOperator::new(phi.grid(), t)?.apply(phi)
}

/// `(4πt)^{−N/2} e^{−r²/4t}`.
pub fn gaussian(dim: u32, r: f64, t: f64) -> f64 {
    (4.0 * std::f64::consts::PI * t).powf(-(dim as f64) / 2.0) * (-r * r / (4.0 * t)).exp()
}

#[cfg(test)]
mod tests {
    use super::super::grid::GridSpec;
    use super::*;

    #[test]
    fn interior_rows_carry_unit_mass() {
        // away from r_max the far field must get nothing, so the quadrature
        // alone has to integrate the kernel to one
        for dim in [1, 2, 3] {
            let g = RadialGrid::new(dim, &GridSpec::default()).unwrap();
            for t in [1e-6, 1e-3, 0.1, 1.0] {
                let op = SemigroupOperator::new(&g, t).unwrap();
                let reach = WINDOW * (4.0 * t).sqrt();
                for (r, row) in g.nodes().iter().zip(&op.rows) {
                    assert!(row.w.iter().all(|&w| w >= 0.0));
                    if r + reach < g.r_max() {
                        assert!(row.far < 1e-12, "N={dim} t={t} r={r}: {}", row.far);
                    }
                }
            }
        }
    }

    #[test]
    fn floor_and_zero_time_rejected() {
        let g = RadialGrid::new(1, &GridSpec::default()).unwrap();
        assert!(matches!(SemigroupOperator::new(&g, 1e-14), Err(Error::TimeBelowFloor { .. })));
        assert!(SemigroupOperator::new(&g, 0.0).is_err());
    }
}
