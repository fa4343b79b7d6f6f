//! Regime decisions on the `(q, r)` plane and the complete table for
//! `f_β = u^{1+2/N}[log(u+e)]^β`.

use serde::{Deserialize, Serialize};

use super::kappa::kappa;
use crate::error::{Error, Result};

/// Relative width of the band in which `q = 1 + r` and `r = N/2` count as equalities.
pub const EQUALITY_BAND: f64 = 1e-9;

/// Declared integrability class of the initial datum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum DataClass {
    /// `F(u₀)^{−r} ∈ L¹_ul`.
    L1ul,
    /// `F(u₀)^{−r}` in the closure of bounded uniformly continuous functions.
    ClosureL1ul,
    /// `J_α(u₀) = g_α(F(u₀)^{−N/2}) ∈ L¹_ul`.
    LogCorrected { alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeQuery {
    pub dim: u32,
    pub r: f64,
    pub q: f64,
    /// Whether `f'(u)F(u) ≤ q` holds for large `u`, when known.
    pub bound_holds: Option<bool>,
    pub data_class: DataClass,
}

impl RegimeQuery {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || !(self.r > 0.0) || !(self.q >= 1.0) || !self.q.is_finite() || !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "regime query needs N >= 1, r > 0, q >= 1 (got N = {}, r = {}, q = {})",
                self.dim, self.r, self.q
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoublyCriticalVerdict {
    /// General `f`: decided only by the log-corrected hypothesis checks.
    Conditional,
    Existence,
    Nonexistence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict", content = "sub")]
pub enum Verdict {
    ExistenceSubcritical1,
    ExistenceSubcritical2,
    ExistenceCritical,
    Nonexistence,
    DoublyCritical(DoublyCriticalVerdict),
    OutsideTheory,
}

impl Verdict {
    /// Integer code for region-map export.
    pub fn code(&self) -> u8 {
        match self {
            Verdict::OutsideTheory => 0,
            Verdict::ExistenceSubcritical1 => 1,
            Verdict::ExistenceSubcritical2 => 2,
            Verdict::ExistenceCritical => 3,
            Verdict::Nonexistence => 4,
            Verdict::DoublyCritical(_) => 5,
        }
    }

    pub fn is_existence(&self) -> bool {
        matches!(
            self,
            Verdict::ExistenceSubcritical1
                | Verdict::ExistenceSubcritical2
                | Verdict::ExistenceCritical
                | Verdict::DoublyCritical(DoublyCriticalVerdict::Existence)
        )
    }

    pub fn is_nonexistence(&self) -> bool {
        matches!(self, Verdict::Nonexistence | Verdict::DoublyCritical(DoublyCriticalVerdict::Nonexistence))
    }
}

/// The five clauses of the `f_β` table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FBetaClause {
    /// `α > N/2`, `β ≥ −1`: existence.
    LargeWeight,
    /// `α = N/2`, `β > −1`, datum in the closure class: existence.
    CriticalWeight,
    /// `−(1+2/N)κ ≤ β < −1`: existence for every `α ≥ 0`.
    LogDamped,
    /// `β > −1`, `0 ≤ α < N/2`: some datum has no solution.
    SmallWeight,
    /// `β = −1`, `0 ≤ α ≤ N/2`: some datum has no solution.
    BorderlineLog,
}

impl FBetaClause {
    pub fn citation(&self) -> &'static str {
        match self {
            FBetaClause::LargeWeight => "f_beta table: alpha > N/2, beta >= -1 gives existence",
            FBetaClause::CriticalWeight => "f_beta table: alpha = N/2, beta > -1, closure-class data gives existence",
            FBetaClause::LogDamped => "f_beta table: -(1+2/N)kappa <= beta < -1 gives existence",
            FBetaClause::SmallWeight => "f_beta table: beta > -1, alpha < N/2 admits a datum without solution",
            FBetaClause::BorderlineLog => "f_beta table: beta = -1, alpha <= N/2 admits a datum without solution",
        }
    }

    pub fn is_existence(&self) -> bool {
        matches!(self, FBetaClause::LargeWeight | FBetaClause::CriticalWeight | FBetaClause::LogDamped)
    }
}

/// A check that contributed to a verdict, with its signed margin (positive = satisfied).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiredCheck {
    pub name: String,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub fired: Vec<FiredCheck>,
    pub citations: Vec<String>,
    pub clause: Option<FBetaClause>,
}

impl ClassificationOutcome {
    fn new(verdict: Verdict, citation: &str) -> Self {
        Self { verdict, fired: Vec::new(), citations: vec![citation.to_string()], clause: None }
    }

    fn fire(mut self, name: &str, margin: f64) -> Self {
        self.fired.push(FiredCheck { name: name.into(), margin });
        self
    }
}

/// Three-way comparison with a relative equality band.
fn compare(a: f64, b: f64, band: f64) -> std::cmp::Ordering {
    let tol = band * a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() <= tol {
        std::cmp::Ordering::Equal
    } else if a < b {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// Place `(q, r)` in the existence/nonexistence partition.
pub fn classify_qr_regime(query: &RegimeQuery, band: f64) -> Result<ClassificationOutcome> {
    use std::cmp::Ordering::*;
    query.validate()?;
    let half = query.dim as f64 / 2.0;
    let r_vs = compare(query.r, half, band);
    let q_vs = compare(query.q, 1.0 + query.r, band);
    let q_margin = 1.0 + query.r - query.q;
    let r_margin = query.r - half;
    let out = match (r_vs, q_vs) {
        (Equal, Equal) => ClassificationOutcome::new(
            Verdict::DoublyCritical(DoublyCriticalVerdict::Conditional),
            "doubly critical corner (q, r) = (1+N/2, N/2): decided by log-corrected hypotheses",
        )
        .fire("r = N/2", r_margin)
        .fire("q = 1+N/2", q_margin),
        (Greater, Less) => ClassificationOutcome::new(
            Verdict::ExistenceSubcritical1,
            "existence for r > N/2, q < 1+r (subcritical case 1)",
        )
        .fire("r > N/2", r_margin)
        .fire("q < 1+r", q_margin),
        (Greater, Equal) => match query.bound_holds {
            Some(true) => ClassificationOutcome::new(
                Verdict::ExistenceSubcritical2,
                "existence for r > N/2, q = 1+r with f'F <= q (subcritical case 2)",
            )
            .fire("r > N/2", r_margin)
            .fire("q = 1+r", q_margin)
            .fire("f'F <= q", 0.0),
            _ => ClassificationOutcome::new(
                Verdict::OutsideTheory,
                "r > N/2, q = 1+r needs f'F <= q for large u, which is not established",
            )
            .fire("q = 1+r", q_margin),
        },
        (Equal, Less) => match query.data_class {
            DataClass::ClosureL1ul => ClassificationOutcome::new(
                Verdict::ExistenceCritical,
                "existence for r = N/2, q < 1+r with closure-class data (critical case)",
            )
            .fire("r = N/2", r_margin)
            .fire("q < 1+r", q_margin),
            _ => ClassificationOutcome::new(
                Verdict::OutsideTheory,
                "r = N/2, q < 1+r covers closure-class data only",
            )
            .fire("r = N/2", r_margin),
        },
        (Less, Less) | (Less, Equal) => ClassificationOutcome::new(
            Verdict::Nonexistence,
            "r < N/2, q <= 1+r: some datum with F(u0)^-r in L1_ul has no solution",
        )
        .fire("r < N/2", -r_margin)
        .fire("q <= 1+r", q_margin),
        (_, Greater) => ClassificationOutcome::new(Verdict::OutsideTheory, "q > 1+r lies outside the covered region")
            .fire("q > 1+r", q_margin),
    };
    Ok(out)
}

/// Which clause of the `f_β` table applies to `(α, β)`.
pub fn f_beta_clause(dim: u32, alpha: f64, beta: f64, band: f64) -> Result<FBetaClause> {
    use std::cmp::Ordering::*;
    if dim == 0 || !(alpha >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("f_beta table needs N >= 1, alpha >= 0 (got {dim}, {alpha})")));
    }
    let half = dim as f64 / 2.0;
    let floor = -(1.0 + 2.0 / dim as f64) * kappa();
    if beta < floor && compare(beta, floor, band) != Equal {
        return Err(Error::InvalidParameter(format!("beta = {beta} below the monotonicity floor {floor:.6}")));
    }
    Ok(match (compare(beta, -1.0, band), compare(alpha, half, band)) {
        (Less, _) => FBetaClause::LogDamped,
        (_, Greater) => FBetaClause::LargeWeight,
        (Equal, _) => FBetaClause::BorderlineLog,
        (Greater, Equal) => FBetaClause::CriticalWeight,
        (Greater, Less) => FBetaClause::SmallWeight,
    })
}

/// Verdict for `f_β` with data `J_α(u₀) ∈ L¹_ul` (closure class at `α = N/2`).
pub fn classify_f_beta(dim: u32, alpha: f64, beta: f64, band: f64) -> Result<ClassificationOutcome> {
    let clause = f_beta_clause(dim, alpha, beta, band)?;
    let sub = if clause.is_existence() {
        DoublyCriticalVerdict::Existence
    } else {
        DoublyCriticalVerdict::Nonexistence
    };
    let half = dim as f64 / 2.0;
    let mut out = ClassificationOutcome::new(Verdict::DoublyCritical(sub), clause.citation())
        .fire("alpha - N/2", alpha - half)
        .fire("beta + 1", beta + 1.0);
    out.clause = Some(clause);
    Ok(out)
}

/// One cell of the `(q, r)` region map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub q: f64,
    pub r: f64,
    pub code: u8,
}

/// Verdict codes on a `nq × nr` grid of `[q_lo, q_hi] × [r_lo, r_hi]`.
///
/// Data are declared closure-class and the bound `f'F ≤ q` assumed, so the
/// map shows the regions at their widest.
pub fn region_map(dim: u32, q_range: (f64, f64), r_range: (f64, f64), nq: usize, nr: usize) -> Result<Vec<RegionCell>> {
    if nq < 2 || nr < 2 {
        return Err(Error::InvalidParameter("region map needs at least 2 points per axis".into()));
    }
    let mut out = Vec::with_capacity(nq * nr);
    for i in 0..nq {
        let q = q_range.0 + (q_range.1 - q_range.0) * i as f64 / (nq - 1) as f64;
        for j in 0..nr {
            let r = r_range.0 + (r_range.1 - r_range.0) * j as f64 / (nr - 1) as f64;
            let query = RegimeQuery { dim, r, q, bound_holds: Some(true), data_class: DataClass::ClosureL1ul };
            let code = classify_qr_regime(&query, EQUALITY_BAND)?.verdict.code();
            out.push(RegionCell { q, r, code });
        }
    }
    Ok(out)
}
