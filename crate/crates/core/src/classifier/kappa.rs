//! The constant `κ > 1` solving `log κ + 2 = κ`.
//!
//! `u^p [log(u+e)]^β` is nondecreasing on `u > 0` exactly when `β ≥ −pκ`:
//! with `w = u+e` the condition reads `β ≥ −p · w log w / (w − e)` and the
//! minimum of the right-hand factor over `w > e` is `κ`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::numerics::roots;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaConstant {
    pub value: f64,
    /// `|log κ + 2 − κ|`.
    pub residual: f64,
}

fn defect(k: f64) -> f64 {
    k.ln() + 2.0 - k
}

/// Largest root of `log κ + 2 = κ`, bracketed on `[3, 4]`.
pub fn solve_kappa() -> KappaConstant {
    let value = roots::brent(defect, 3.0, 4.0, 1e-15, 200).expect("sign change on [3, 4]");
    KappaConstant { value, residual: defect(value).abs() }
}

/// Cached `κ`.
pub fn kappa() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| solve_kappa().value)
}
