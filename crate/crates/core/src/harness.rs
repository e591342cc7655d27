//! Executable checks of the gadget mechanics.
//!
//! Every check recomputes the quantity it certifies from the instance
//! itself (cut edges, crossing demand, duality identities) instead of
//! reading it back from a solver.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::cnf::{compute_val, CnfFormula};
use crate::gadgets::gamma::{build_gamma, lifted_witness, GammaLayout, Slot};
use crate::model::Instance;
use crate::polytope::contains;
use crate::rational::Rational;
use crate::robust::{
    cong_dynamic, cong_lagrange, cong_static, lin_dynamic, lin_static, ExactOracle, LagrangeTrace, ReservationOracle,
    ScaledOracle, DEFAULT_MAX_ITERS,
};

/// `1 + γ(1-ρ)`.
pub fn gap_bound(rho: &Rational, gamma: u32) -> Rational {
    Rational::one() + Rational::from(gamma as usize) * (Rational::one() - rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `val = 1`: congestion must reach `1 + γ(1-ρ)`.
    Satisfiable,
    /// `val < ρ`: congestion must stay at most 1.
    Low,
    /// `ρ ≤ val < 1`: nothing is claimed.
    NoClaim,
}

impl Branch {
    pub fn classify(val: &Rational, rho: &Rational) -> Self {
        if *val == Rational::one() {
            Branch::Satisfiable
        } else if val < rho {
            Branch::Low
        } else {
            Branch::NoClaim
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub m: usize,
    pub r: usize,
    pub gamma: u32,
    pub rho: Rational,
    pub val: Rational,
    pub branch: Branch,
    pub beta: Rational,
    /// Lower bound for the satisfiable branch, upper bound 1 for the low one.
    pub bound: Rational,
    pub pass: bool,
}

pub fn check_dichotomy(phi: &CnfFormula, rho: &Rational, gamma: u32) -> Result<DichotomyReport> {
    let val = compute_val(phi)?;
    let inst = build_gamma(phi, rho, gamma)?.0;
    let beta = cong_dynamic(&inst)?.beta;
    Ok(dichotomy_report(phi, rho, gamma, val, beta))
}

/// Classifies an already computed congestion value.
pub fn dichotomy_report(phi: &CnfFormula, rho: &Rational, gamma: u32, val: Rational, beta: Rational) -> DichotomyReport {
    let branch = Branch::classify(&val, rho);
    let (bound, pass) = match branch {
        Branch::Satisfiable => {
            let b = gap_bound(rho, gamma);
            let ok = beta >= b;
            (b, ok)
        }
        Branch::Low => (Rational::one(), beta <= Rational::one()),
        Branch::NoClaim => (Rational::one(), true),
    };
    DichotomyReport {
        m: phi.clause_count(),
        r: phi.vars,
        gamma,
        rho: rho.clone(),
        val,
        branch,
        beta,
        bound,
        pass,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    /// Node ids on the source side, ascending.
    pub side: Vec<usize>,
    pub demand: Vec<Rational>,
    pub aux: Vec<Rational>,
}

/// Index of the first true literal of every clause.
fn chosen_slots(phi: &CnfFormula, assignment: &[bool]) -> Result<Vec<usize>> {
    phi.clauses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.iter()
                .position(|&l| CnfFormula::literal_true(l, assignment))
                .ok_or_else(|| Error::Precondition(format!("assignment leaves clause {i} unsatisfied")))
        })
        .collect()
}

fn all_nodes(layout: &GammaLayout, out: &mut BTreeSet<usize>) {
    out.extend(layout.internal_nodes.clone());
}

fn cut_side(layout: &GammaLayout, chosen: &[usize], out: &mut BTreeSet<usize>) {
    out.insert(layout.s);
    for (i, path) in layout.clause_paths.iter().enumerate() {
        let j = chosen[i];
        // Path nodes strictly before the chosen slot's head.
        out.extend(path[..=j].iter().copied());
        for (k, slot) in layout.slots[i].iter().enumerate() {
            if let Slot::Copy(child) = slot {
                if k < j {
                    all_nodes(child, out);
                } else if k == j {
                    cut_side(child, chosen, out);
                }
            }
        }
    }
}

/// The recursive cut around one true literal per clause, with the demand
/// point that saturates it.
pub fn build_cut_witness(
    phi: &CnfFormula,
    assignment: &[bool],
    rho: &Rational,
    gamma: u32,
) -> Result<(Instance, CutWitness)> {
    if assignment.len() != phi.vars {
        return Err(Error::Malformed(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            phi.vars
        )));
    }
    let chosen = chosen_slots(phi, assignment)?;
    let (inst, layout) = build_gamma(phi, rho, gamma)?;
    let mut side = BTreeSet::new();
    cut_side(&layout, &chosen, &mut side);
    let (demand, aux) = lifted_witness(phi, rho, gamma, assignment);
    Ok((
        inst,
        CutWitness {
            side: side.into_iter().collect(),
            demand,
            aux,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub cut_edges: usize,
    pub expected_edges: usize,
    pub all_unit: bool,
    pub separates: bool,
    pub in_polytope: bool,
    pub crossing: Rational,
    pub required: Rational,
    /// `crossing / cut capacity`, a lower bound on congestion.
    pub bound: Rational,
    pub beta: Option<Rational>,
    pub pass: bool,
}

/// Recomputes the cut from scratch and checks it against `m^γ` unit
/// edges and crossing demand `m^γ(1 + γ(1-ρ))`.
pub fn verify_cut_witness(
    inst: &Instance,
    w: &CutWitness,
    m: usize,
    rho: &Rational,
    gamma: u32,
    beta: Option<&Rational>,
) -> CutReport {
    let n = inst.graph.node_count;
    let mut inside = vec![false; n];
    for &v in &w.side {
        if v < n {
            inside[v] = true;
        }
    }
    let crosses = |a: usize, b: usize| inside[a] != inside[b];
    let cut: Vec<_> = inst.graph.edges.iter().filter(|e| crosses(e.s, e.t)).collect();
    let capacity: Option<Rational> = cut.iter().map(|e| e.capacity.finite().cloned()).sum();
    let all_unit = cut.iter().all(|e| e.capacity.finite().is_some_and(|c| *c == Rational::one()));
    let crossing: Rational = inst
        .commodities
        .iter()
        .zip(&w.demand)
        .filter(|(c, _)| crosses(c.source, c.sink))
        .map(|(_, d)| d.clone())
        .sum();
    let mg = m.pow(gamma);
    let required = Rational::from(mg) * gap_bound(rho, gamma);
    let lifted_ok = w.demand.len() == inst.polytope.demand_dim
        && w.aux.len() == inst.polytope.aux_dim
        && inst.polytope.rows.iter().all(|r| r.holds(&w.demand, &w.aux));
    let in_polytope = lifted_ok && contains(&inst.polytope, &w.demand);
    let separates = inside.first().copied().unwrap_or(false) && !inside.get(1).copied().unwrap_or(true);
    let bound = match &capacity {
        Some(c) if c.is_positive() => &crossing / c,
        _ => Rational::zero(),
    };
    let pass = cut.len() == mg
        && all_unit
        && separates
        && in_polytope
        && crossing >= required
        && beta.is_none_or(|b| bound <= *b);
    CutReport {
        cut_edges: cut.len(),
        expected_edges: mg,
        all_unit,
        separates,
        in_polytope,
        crossing,
        required,
        bound,
        beta: beta.cloned(),
        pass,
    }
}

/// Builds and verifies the cut for a satisfying assignment of `phi`.
pub fn check_cut(phi: &CnfFormula, rho: &Rational, gamma: u32, with_beta: bool) -> Result<CutReport> {
    let a = phi
        .satisfying_assignment()?
        .ok_or_else(|| Error::Precondition("formula is not satisfiable".into()))?;
    let (inst, w) = build_cut_witness(phi, &a, rho, gamma)?;
    let beta = if with_beta { Some(cong_dynamic(&inst)?.beta) } else { None };
    Ok(verify_cut_witness(&inst, &w, phi.clause_count(), rho, gamma, beta.as_ref()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeRun {
    pub alpha: Rational,
    pub beta_tilde: Rational,
    pub iterations: usize,
    /// Master values never increase and the last round met the stopping rule.
    pub trace_ok: bool,
    pub pass: bool,
}

/// Recomputes the trace invariants: normalized `λ ≥ 0`, nonincreasing
/// master values, and `β′ ≤ λᵀu` with the reported oracle value on the
/// last iteration.
pub fn check_trace(inst: &Instance, trace: &LagrangeTrace) -> bool {
    let normalized = |l: &[Rational]| {
        l.len() == inst.graph.edge_count()
            && l.iter().all(|x| !x.is_negative())
            && inst
                .graph
                .edges
                .iter()
                .zip(l)
                .map(|(e, x)| e.capacity.finite().map_or_else(Rational::zero, |c| c * x))
                .sum::<Rational>()
                == Rational::one()
    };
    let its = &trace.iterations;
    let Some(last) = its.last() else {
        return inst.finite_edges().is_empty() && trace.beta_tilde.is_zero();
    };
    its.iter().all(|it| {
        normalized(&it.lambda)
            && it.oracle_value == it.lambda.iter().zip(&it.reservation).map(|(a, b)| a * b).sum::<Rational>()
    }) && its.windows(2).all(|w| w[1].master_value <= w[0].master_value)
        && last.master_value <= last.oracle_value
        && last.master_value == trace.beta_tilde
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeReport {
    pub beta_star: Rational,
    pub runs: Vec<LagrangeRun>,
    pub pass: bool,
}

/// Ratios the wrapped oracles are run at; the first is exact.
pub fn default_alphas() -> Vec<Rational> {
    vec![Rational::one(), Rational::new(3, 2), Rational::from_integer(2)]
}

/// `β̃ = β*` for the exact oracle and `β* ≤ β̃ ≤ αβ*` for the wrapped ones.
pub fn check_lagrange_gap(inst: &Instance, alphas: &[Rational]) -> Result<LagrangeReport> {
    let beta_star = cong_dynamic(inst)?.beta;
    check_lagrange_against(inst, &beta_star, alphas)
}

pub fn check_lagrange_against(inst: &Instance, beta_star: &Rational, alphas: &[Rational]) -> Result<LagrangeReport> {
    let mut runs = Vec::new();
    // One exact solver for every run, so its metric-cut pool carries over.
    let mut exact = ExactOracle::new(inst)?;
    for alpha in alphas {
        let mut oracle: Box<dyn ReservationOracle + '_> = if *alpha == Rational::one() {
            Box::new(&mut exact)
        } else {
            Box::new(ScaledOracle::new(&mut exact, alpha.clone())?)
        };
        let (beta_tilde, trace) = cong_lagrange(inst, oracle.as_mut(), DEFAULT_MAX_ITERS)?;
        let trace_ok = check_trace(inst, &trace);
        let pass = trace_ok
            && if *alpha == Rational::one() {
            beta_tilde == *beta_star
        } else {
            *beta_star <= beta_tilde && beta_tilde <= alpha * beta_star
        };
        runs.push(LagrangeRun {
            alpha: alpha.clone(),
            beta_tilde,
            iterations: trace.iterations.len(),
            trace_ok,
            pass,
        });
    }
    let pass = runs.iter().all(|r| r.pass);
    Ok(LagrangeReport {
        beta_star: beta_star.clone(),
        runs,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticReport {
    pub cong_dynamic: Rational,
    pub cong_static: Rational,
    pub lambda: Vec<Rational>,
    /// `Σ λ_e c_e`, which must be 1.
    pub lambda_norm: Rational,
    pub lin_static: Rational,
    pub lin_dynamic: Rational,
    /// `lin_static / lin_dynamic`, when the denominator is positive.
    pub gap_ratio: Option<Rational>,
    pub normalized: bool,
    pub static_identity: bool,
    pub sandwich: bool,
    pub pass: bool,
}

pub fn check_static_machinery(inst: &Instance) -> Result<StaticReport> {
    let beta_dyn = cong_dynamic(inst)?.beta;
    check_static_against(inst, &beta_dyn)
}

pub fn check_static_against(inst: &Instance, beta_dyn: &Rational) -> Result<StaticReport> {
    let st = cong_static(inst)?;
    let lambda_norm: Rational = inst
        .graph
        .edges
        .iter()
        .zip(&st.lambda)
        .filter_map(|(e, l)| e.capacity.finite().map(|c| c * l))
        .sum();
    let ls = lin_static(inst, &st.lambda)?.value;
    let ld = lin_dynamic(inst, &st.lambda)?.value;
    let normalized = lambda_norm == Rational::one();
    let static_identity = ls == st.beta;
    let sandwich = ld <= *beta_dyn && *beta_dyn <= st.beta;
    let gap_ratio = ld.is_positive().then(|| &ls / &ld);
    Ok(StaticReport {
        cong_dynamic: beta_dyn.clone(),
        cong_static: st.beta,
        lambda: st.lambda,
        lambda_norm,
        lin_static: ls,
        lin_dynamic: ld,
        gap_ratio,
        normalized,
        static_identity,
        sandwich,
        pass: normalized && static_identity && sandwich,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub nodes: usize,
    pub edges: usize,
    pub commodities: usize,
    pub max_degree: usize,
    /// `ln(|V| / Δ)`.
    pub log_ratio: f64,
    /// `γ ln 3 + ln(2/3)` for gadget instances.
    pub predicted: Option<f64>,
}

pub fn size_report(inst: &Instance) -> SizeReport {
    let g = &inst.graph;
    let delta = g.max_degree();
    let gamma: Option<u32> = inst.meta.get("gamma").and_then(|s| s.parse().ok());
    SizeReport {
        nodes: g.node_count,
        edges: g.edge_count(),
        commodities: inst.commodities.len(),
        max_degree: delta,
        log_ratio: (g.node_count as f64 / delta.max(1) as f64).ln(),
        predicted: gamma.map(|k| f64::from(k) * 3f64.ln() + (2f64 / 3f64).ln()),
    }
}
