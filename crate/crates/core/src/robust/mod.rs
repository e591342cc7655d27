//! Robust problems over the whole uncertainty set.
//!
//! Every solver works on a dominating set of demand vertices (see
//! [`crate::polytope::dominating_vertices`]); all objectives here are
//! monotone in nonnegative demand, so dominated vertices never bind.

mod dynamic;
mod lagrange;
mod one_path;
mod static_routing;

pub use dynamic::{cong_dynamic, lin_dynamic, CongDynamic, LinDynamic, LinDynamicSolver};
pub use lagrange::{
    cong_lagrange, uniform_lambda, ExactOracle, LagrangeIteration, LagrangeTrace, ReservationOracle, ScaledOracle,
    DEFAULT_MAX_ITERS,
};
pub use one_path::cong_one_path;
pub use static_routing::{cong_static, extract_lambda_stat, lin_static, LinStatic, StaticSolution, Template};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::polytope::{dominating_vertices, DEFAULT_DIM_CAP};
use crate::rational::Rational;

pub(crate) fn vertices(inst: &Instance) -> Result<Vec<Vec<Rational>>> {
    dominating_vertices(&inst.polytope, DEFAULT_DIM_CAP)
}

pub(crate) fn check_lambda(inst: &Instance, lambda: &[Rational]) -> Result<()> {
    if lambda.len() != inst.graph.edge_count() {
        return Err(Error::Malformed(format!(
            "cost vector has length {}, expected {}",
            lambda.len(),
            inst.graph.edge_count()
        )));
    }
    if let Some(e) = lambda.iter().position(Rational::is_negative) {
        return Err(Error::Malformed(format!("negative cost on edge {e}")));
    }
    Ok(())
}

/// `Σ_e a_e b_e`.
pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}
