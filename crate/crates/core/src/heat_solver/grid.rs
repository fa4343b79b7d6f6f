//! Radial grids graded toward the origin and piecewise-linear grid functions
//! with a constant far field.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::ProfileEval;
use crate::numerics::special::sphere_area;

/// Layout of a radial grid: `0`, then geometric nodes from `r_min` to
/// `r_mid`, then uniform steps up to the far-field radius `r_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_mid: f64,
    pub r_max: f64,
    pub per_decade: usize,
    pub uniform_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: 1e-6, r_mid: 0.05, r_max: 8.0, per_decade: 16, uniform_step: 0.01 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_min > 0.0
            && self.r_mid > self.r_min
            && self.r_max > self.r_mid
            && self.per_decade >= 1
            && self.uniform_step > 0.0
            && self.r_max.is_finite();
        if !ok {
            return Err(Error::InvalidParameter(format!("grid layout {self:?} must satisfy 0 < r_min < r_mid < r_max")));
        }
        Ok(())
    }

    /// Halve every spacing; `r_min` (and so the cap on singular data) stays.
    pub fn refined(&self) -> Self {
        Self { per_decade: 2 * self.per_decade, uniform_step: 0.5 * self.uniform_step, ..self.clone() }
    }

    /// Parse `r_min:r_mid:r_max:per_decade:uniform_step`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParameter(format!("grid `{s}` is not r_min:r_mid:r_max:per_decade:uniform_step"));
        if parts.len() != 5 {
            return Err(bad());
        }
        let num = |i: usize| parts[i].trim().parse::<f64>().map_err(|_| bad());
        let g = Self {
            r_min: num(0)?,
            r_mid: num(1)?,
            r_max: num(2)?,
            per_decade: parts[3].trim().parse().map_err(|_| bad())?,
            uniform_step: num(4)?,
        };
        g.validate()?;
        Ok(g)
    }
}

/// Strictly increasing radial nodes starting at `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    dim: u32,
    nodes: Vec<f64>,
    spec: GridSpec,
}

impl RadialGrid {
    pub fn new(dim: u32, spec: &GridSpec) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        spec.validate()?;
        let mut nodes = vec![0.0];
        let decades = (spec.r_mid / spec.r_min).log10();
        let k = (decades * spec.per_decade as f64).ceil().max(1.0) as usize;
        for j in 0..=k {
            nodes.push(spec.r_min * (spec.r_mid / spec.r_min).powf(j as f64 / k as f64));
        }
        let m = ((spec.r_max - spec.r_mid) / spec.uniform_step).ceil().max(1.0) as usize;
        for j in 1..=m {
            nodes.push(spec.r_mid + (spec.r_max - spec.r_mid) * j as f64 / m as f64);
        }
        Ok(Arc::new(Self { dim, nodes, spec: spec.clone() }))
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Smallest spacing; its square is the time floor of the semigroup.
    pub fn h_min(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    pub fn time_floor(&self) -> f64 {
        self.h_min().powi(2)
    }
}

/// Nodal values on a radial grid, linear in between and equal to `far`
/// beyond the last node.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<RadialGrid>, c: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![c; n])
    }

    pub fn from_fn<F: FnMut(f64) -> f64>(grid: Arc<RadialGrid>, mut f: F) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    /// Sample a radial profile; a singular core is capped at its value on the
    /// first positive node.
    pub fn from_profile(grid: Arc<RadialGrid>, ev: &ProfileEval) -> Result<Self> {
        let nodes = grid.nodes();
        let mut values = Vec::with_capacity(nodes.len());
        for &r in &nodes[1..] {
            values.push(ev.value(r)?);
        }
        let cap = if ev.profile().is_bounded() { ev.value(0.0)? } else { values[0] };
        values.insert(0, cap);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn far(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn try_map<F: FnMut(f64) -> Result<f64>>(&self, mut f: F) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Self::new(self.grid.clone(), values)
    }

    /// Linear interpolation at radius `r`.
    pub fn eval(&self, r: f64) -> f64 {
        let x = self.grid.nodes();
        if r >= *x.last().unwrap() {
            return self.far();
        }
        let i = x.partition_point(|&v| v <= r).max(1) - 1;
        let w = (r - x[i]) / (x[i + 1] - x[i]);
        self.values[i] + w * (self.values[i + 1] - self.values[i])
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// `∫_{B(0,ρ)} |φ|^r dx` of the interpolant, exact per element up to a
    /// Gauss–Legendre rule for the weight `s^{N−1}` and the power.
    pub fn ball_integral(&self, rho: f64, r: f64) -> f64 {
        let x = self.grid.nodes();
        let n = self.grid.dim() as i32;
        // 5-point Gauss–Legendre on [0, 1]
        const GL: [(f64, f64); 5] = [
            (0.046_910_077_030_668, 0.118_463_442_528_095),
            (0.230_765_344_947_158, 0.239_314_335_249_683),
            (0.5, 0.284_444_444_444_444),
            (0.769_234_655_052_842, 0.239_314_335_249_683),
            (0.953_089_922_969_332, 0.118_463_442_528_095),
        ];
        let mut sum = 0.0;
        let mut piece = |a: f64, b: f64, fa: f64, fb: f64| {
            for (z, w) in GL {
                let s = a + z * (b - a);
                let v = (fa + z * (fb - fa)).abs();
                sum += w * (b - a) * s.powi(n - 1) * if r == 1.0 { v } else { v.powf(r) };
            }
        };
        for i in 0..x.len() - 1 {
            if x[i] >= rho {
                break;
            }
            let b = x[i + 1].min(rho);
            let fb = self.eval(b);
            piece(x[i], b, self.values[i], fb);
        }
        let last = *x.last().unwrap();
        if rho > last {
            let c = self.far();
            piece(last, rho, c, c);
        }
        sum * sphere_area(self.grid.dim())
    }

    /// `‖φ‖_{L^r(B(0,ρ))}`; the uniformly local norm for radially
    /// nonincreasing data, where the sup over centers sits at the origin.
    /// `r = ∞` gives the sup norm.
    pub fn ul_norm(&self, r: f64, rho: f64) -> f64 {
        if r.is_infinite() {
            return self.values.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
        }
        self.ball_integral(rho, r).powf(1.0 / r)
    }

    /// `max |φ − ψ|` over the nodes.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_integral_of_constant() {
        for dim in [1, 2, 3] {
            let g = RadialGrid::new(dim, &GridSpec::default()).unwrap();
            let f = GridFunction::constant(g, 2.0).unwrap();
            let vol = sphere_area(dim) / dim as f64;
            for rho in [1e-3f64, 0.7, 1.0, 20.0] {
                let exact = 2.0 * vol * rho.powi(dim as i32);
                assert!((f.ball_integral(rho, 1.0) - exact).abs() < 1e-12 * exact);
            }
        }
    }

    #[test]
    fn grid_parse_roundtrip() {
        let g = GridSpec::parse("1e-6:0.05:8:16:0.01").unwrap();
        assert_eq!(g, GridSpec::default());
        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("1:0.5:12:16:0.1").is_err());
    }
}
