//! Exact rational linear programming.
//!
//! Desk-scale dense simplex over [`Rational`]. Every result carries a
//! certificate (dual vector, Farkas ray, or primal ray) that
//! [`check_certificate`] verifies by arithmetic alone.

mod simplex;

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use simplex::Simplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveSense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn nonneg() -> Self {
        Bound {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        Bound {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: RowSense,
    pub rhs: Rational,
}

impl LpRow {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

/// `opt cᵀx  s.t.  rows, lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: ObjectiveSense,
    pub objective: Vec<Rational>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// All variables default to `x ≥ 0`.
    pub fn new(sense: ObjectiveSense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            rows: Vec::new(),
            bounds: vec![Bound::nonneg(); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: Rational, bound: Bound) -> usize {
        self.objective.push(cost);
        self.bounds.push(bound);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, sense: RowSense, rhs: Rational) -> usize {
        self.rows.push(LpRow { coeffs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn check_dims(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Malformed(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(Error::Malformed(format!("row {i} references variable {j} of {n}")));
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self.bounds.iter().zip(x).all(|(b, v)| {
            b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok
            && self.rows.iter().all(|r| {
                let a = r.activity(x);
                match r.sense {
                    RowSense::Le => a <= r.rhs,
                    RowSense::Eq => a == r.rhs,
                    RowSense::Ge => a >= r.rhs,
                }
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output.
///
/// * `Optimal`: `primal` is a basic optimal solution and `dual` holds one
///   shadow price per row (`∂ objective / ∂ rhs`).
/// * `Infeasible`: `farkas_ray` holds row multipliers, `≥ 0` on `≤` rows and
///   `≤ 0` on `≥` rows, whose combination cannot be met inside the bounds.
/// * `Unbounded`: `primal` is feasible and `primal_ray` an improving direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub objective: Rational,
    pub dual: Vec<Rational>,
    pub farkas_ray: Vec<Rational>,
    pub primal_ray: Vec<Rational>,
}

pub fn solve(lp: &LinearProgram) -> Result<LpResult> {
    let mut s = Simplex::new(lp.clone())?;
    s.solve()?;
    Ok(s.result())
}

/// Verifies the status claimed in `result` against `lp` using only arithmetic.
pub fn check_certificate(lp: &LinearProgram, result: &LpResult) -> bool {
    let n = lp.num_vars();
    let m = lp.rows.len();
    match result.status {
        LpStatus::Optimal => {
            if result.primal.len() != n || result.dual.len() != m {
                return false;
            }
            if !lp.is_feasible(&result.primal) || lp.objective_value(&result.primal) != result.objective {
                return false;
            }
            // Work in min form.
            let flip = lp.sense == ObjectiveSense::Max;
            let c: Vec<Rational> = lp.objective.iter().map(|c| if flip { -c } else { c.clone() }).collect();
            let y: Vec<Rational> = result.dual.iter().map(|y| if flip { -y } else { y.clone() }).collect();
            for (row, yi) in lp.rows.iter().zip(&y) {
                let ok = match row.sense {
                    RowSense::Le => !yi.is_positive(),
                    RowSense::Ge => !yi.is_negative(),
                    RowSense::Eq => true,
                };
                if !ok {
                    return false;
                }
            }
            let mut reduced = c.clone();
            for (row, yi) in lp.rows.iter().zip(&y) {
                if yi.is_zero() {
                    continue;
                }
                for (j, a) in &row.coeffs {
                    reduced[*j] -= a * yi;
                }
            }
            let mut dual_obj: Rational = lp.rows.iter().zip(&y).map(|(r, yi)| &r.rhs * yi).sum();
            for (r, b) in reduced.iter().zip(&lp.bounds) {
                if r.is_positive() {
                    match &b.lower {
                        Some(l) => dual_obj += r * l,
                        None => return false,
                    }
                } else if r.is_negative() {
                    match &b.upper {
                        Some(u) => dual_obj += r * u,
                        None => return false,
                    }
                }
            }
            let primal_obj = if flip { -&result.objective } else { result.objective.clone() };
            dual_obj == primal_obj
        }
        LpStatus::Infeasible => {
            let y = &result.farkas_ray;
            if y.len() != m {
                return false;
            }
            let mut g = vec![Rational::zero(); n];
            let mut yb = Rational::zero();
            for (row, yi) in lp.rows.iter().zip(y) {
                let ok = match row.sense {
                    RowSense::Le => !yi.is_negative(),
                    RowSense::Ge => !yi.is_positive(),
                    RowSense::Eq => true,
                };
                if !ok {
                    return false;
                }
                if yi.is_zero() {
                    continue;
                }
                yb += &row.rhs * yi;
                for (j, a) in &row.coeffs {
                    g[*j] += a * yi;
                }
            }
            // min over the box of gᵀx must exceed yᵀb.
            let mut low = Rational::zero();
            for (gj, b) in g.iter().zip(&lp.bounds) {
                if gj.is_positive() {
                    match &b.lower {
                        Some(l) => low += gj * l,
                        None => return false,
                    }
                } else if gj.is_negative() {
                    match &b.upper {
                        Some(u) => low += gj * u,
                        None => return false,
                    }
                }
            }
            // Empty boxes are infeasible on their own.
            let empty_box = lp
                .bounds
                .iter()
                .any(|b| matches!((&b.lower, &b.upper), (Some(l), Some(u)) if l > u));
            empty_box || low > yb
        }
        LpStatus::Unbounded => {
            let d = &result.primal_ray;
            if d.len() != n || !lp.is_feasible(&result.primal) {
                return false;
            }
            for (dj, b) in d.iter().zip(&lp.bounds) {
                if b.lower.is_some() && dj.is_negative() {
                    return false;
                }
                if b.upper.is_some() && dj.is_positive() {
                    return false;
                }
            }
            for row in &lp.rows {
                let a = row.activity(d);
                let ok = match row.sense {
                    RowSense::Le => !a.is_positive(),
                    RowSense::Ge => !a.is_negative(),
                    RowSense::Eq => a.is_zero(),
                };
                if !ok {
                    return false;
                }
            }
            let slope = lp.objective_value(d);
            match lp.sense {
                ObjectiveSense::Min => slope.is_negative(),
                ObjectiveSense::Max => slope.is_positive(),
            }
        }
    }
}

/// Process-wide certificate audit. When enabled, every result produced by
/// the engine is passed through [`check_certificate`] and tallied.
pub mod audit {
    use super::*;

    static ENABLED: AtomicBool = AtomicBool::new(false);
    static CHECKED: AtomicUsize = AtomicUsize::new(0);
    static FAILED: AtomicUsize = AtomicUsize::new(0);

    pub fn enable() {
        ENABLED.store(true, Ordering::SeqCst);
    }

    pub fn enabled() -> bool {
        ENABLED.load(Ordering::Relaxed)
    }

    /// `(checked, failed)` counts so far.
    pub fn counts() -> (usize, usize) {
        (CHECKED.load(Ordering::SeqCst), FAILED.load(Ordering::SeqCst))
    }

    pub(crate) fn record(lp: &LinearProgram, result: &LpResult) {
        CHECKED.fetch_add(1, Ordering::SeqCst);
        if !check_certificate(lp, result) {
            FAILED.fetch_add(1, Ordering::SeqCst);
        }
    }
}
