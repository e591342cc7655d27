//! The recursive gadget family `G_γ`.
//!
//! Level 1 is a bundle of `m` three-edge paths from `s` to `t`, one per
//! clause, with one commodity per edge and one commodity `h0` from `s` to
//! `t`. Level `γ` replaces every edge of level 1 by a fresh copy of level
//! `γ-1`, whose demands are scaled by the literal variable of that edge.
//!
//! Coordinates are laid out level by level: demands are `[h0, copy(1,1),
//! copy(1,2), …]` and aux variables are `[ξ (2r), copy(1,1), …]`, where at
//! level 1 each "copy" is the single edge commodity with no aux variables.

use std::collections::BTreeMap;

use super::cnf::{assignments, CnfFormula};
use super::HINT_BUDGET;
use crate::error::{Error, Result};
use crate::model::{Capacity, Commodity, DemandPolytope, Graph, Instance, PolySense, VertexHints};
use crate::polytope::pareto_maximal;
use crate::rational::Rational;

/// Where each piece of one level lives inside the generated instance.
#[derive(Debug, Clone)]
pub struct GammaLayout {
    pub gamma: u32,
    pub s: usize,
    pub t: usize,
    /// Commodity id of this level's `h0`.
    pub h0: usize,
    /// Aux index of this level's first ξ coordinate.
    pub xi_offset: usize,
    /// `[s, c.a, c.b, t]` per clause.
    pub clause_paths: Vec<[usize; 4]>,
    pub slots: Vec<[Slot; 3]>,
    /// Node ids created by this level, excluding `s` and `t`.
    pub internal_nodes: std::ops::Range<usize>,
}

#[derive(Debug, Clone)]
pub enum Slot {
    Edge { edge: usize, commodity: usize },
    Copy(Box<GammaLayout>),
}

fn check_params(rho: &Rational, gamma: u32) -> Result<()> {
    if !rho.is_positive() || *rho >= Rational::one() {
        return Err(Error::Malformed(format!("rho must lie in (0,1), got {rho}")));
    }
    if gamma == 0 {
        return Err(Error::Malformed("gamma must be at least 1".into()));
    }
    Ok(())
}

/// `m^γ (1-ρ)`, the bound on `h0` at level `γ`.
pub fn h0_bound(m: usize, rho: &Rational, gamma: u32) -> Rational {
    Rational::from(m).pow(gamma) * (Rational::one() - rho)
}

struct Builder<'a> {
    phi: &'a CnfFormula,
    g: Graph,
    comms: Vec<Commodity>,
    aux_names: Vec<String>,
}

impl Builder<'_> {
    fn node(&mut self, name: String) -> usize {
        self.g.node_names.push(name);
        self.g.node_count += 1;
        self.g.node_count - 1
    }

    fn level(&mut self, gamma: u32, s: usize, t: usize, prefix: &str) -> GammaLayout {
        let h0 = self.comms.len();
        self.comms.push(Commodity::new(s, t).named(format!("{prefix}h0")));
        let xi_offset = self.aux_names.len();
        for k in 1..=self.phi.vars {
            self.aux_names.push(format!("{prefix}xi[x{k}]"));
            self.aux_names.push(format!("{prefix}xi[~x{k}]"));
        }
        let first_node = self.g.node_count;
        let mut clause_paths = Vec::new();
        let mut slots = Vec::new();
        for i in 1..=self.phi.clause_count() {
            let a = self.node(format!("{prefix}c{i}.a"));
            let b = self.node(format!("{prefix}c{i}.b"));
            let path = [s, a, b, t];
            let mut row = Vec::with_capacity(3);
            for j in 1..=3 {
                let (u, v) = (path[j - 1], path[j]);
                if gamma == 1 {
                    let edge = self.g.add_edge(u, v, Rational::one());
                    self.g.edges[edge].name = Some(format!("{prefix}e{i}.{j}"));
                    let commodity = self.comms.len();
                    self.comms.push(Commodity::new(u, v).named(format!("{prefix}h{i}.{j}")));
                    row.push(Slot::Edge { edge, commodity });
                } else {
                    let child = format!("{prefix}L{gamma}.i{i}.j{j}/");
                    row.push(Slot::Copy(Box::new(self.level(gamma - 1, u, v, &child))));
                }
            }
            clause_paths.push(path);
            slots.push(row.try_into().expect("three slots"));
        }
        GammaLayout {
            gamma,
            s,
            t,
            h0,
            xi_offset,
            clause_paths,
            slots,
            internal_nodes: first_node..self.g.node_count,
        }
    }
}

/// Row system of one level in local coordinates.
pub fn level_system(phi: &CnfFormula, rho: &Rational, gamma: u32) -> DemandPolytope {
    let m = phi.clause_count();
    let r = phi.vars;
    let one = Rational::one;
    let xi = |l: i32| CnfFormula::literal_slot(l);
    if gamma == 1 {
        let mut p = DemandPolytope::new(1 + 3 * m, 2 * r);
        p.push(vec![(0, one())], vec![], PolySense::Le, h0_bound(m, rho, 1));
        p.push(vec![(0, -one())], vec![], PolySense::Le, Rational::zero());
        for l in 0..2 * r {
            p.push(vec![], vec![(l, -one())], PolySense::Le, Rational::zero());
        }
        for k in 0..r {
            p.push(vec![], vec![(2 * k, one()), (2 * k + 1, one())], PolySense::Eq, one());
        }
        for (i, c) in phi.clauses.iter().enumerate() {
            for (j, &l) in c.iter().enumerate() {
                p.push(vec![(1 + 3 * i + j, one())], vec![(xi(l), -one())], PolySense::Eq, Rational::zero());
            }
        }
        return p;
    }
    let child = level_system(phi, rho, gamma - 1);
    let (cd, ca) = (child.demand_dim, child.aux_dim);
    let mut p = DemandPolytope::new(1 + 3 * m * cd, 2 * r + 3 * m * ca);
    p.push(vec![(0, one())], vec![], PolySense::Le, h0_bound(m, rho, gamma));
    p.push(vec![(0, -one())], vec![], PolySense::Le, Rational::zero());
    for l in 0..2 * r {
        p.push(vec![], vec![(l, -one())], PolySense::Le, Rational::zero());
    }
    for k in 0..r {
        p.push(vec![], vec![(2 * k, one()), (2 * k + 1, one())], PolySense::Le, one());
        p.push(vec![], vec![(2 * k, -one()), (2 * k + 1, -one())], PolySense::Le, -one());
    }
    for (i, c) in phi.clauses.iter().enumerate() {
        for (j, &l) in c.iter().enumerate() {
            let k = 3 * i + j;
            let (d_off, a_off) = (1 + k * cd, 2 * r + k * ca);
            for row in &child.rows {
                let signs: &[i64] = match row.sense {
                    PolySense::Le => &[1],
                    PolySense::Eq => &[1, -1],
                };
                for &sg in signs {
                    let sg = Rational::from_integer(sg);
                    let demand = row.demand.iter().map(|(x, a)| (x + d_off, a * &sg)).collect();
                    let mut aux: Vec<(usize, Rational)> = row.aux.iter().map(|(x, a)| (x + a_off, a * &sg)).collect();
                    aux.push((xi(l), -(&row.rhs * &sg)));
                    p.push(demand, aux, PolySense::Le, Rational::zero());
                }
            }
        }
    }
    p
}

/// Full vertex list of one level (local demand coordinates), or `None` if
/// it would exceed `budget` vectors.
fn full_hints(phi: &CnfFormula, rho: &Rational, gamma: u32, budget: usize) -> Option<Vec<Vec<Rational>>> {
    let m = phi.clause_count();
    let bound = h0_bound(m, rho, gamma);
    let child = if gamma == 1 { None } else { Some(full_hints(phi, rho, gamma - 1, budget)?) };
    let width = child.as_ref().map_or(1, |c| c.first().map_or(0, Vec::len));
    let mut total: usize = 0;
    for a in assignments(phi.vars) {
        let active = active_slots(phi, &a).iter().filter(|&&x| x).count();
        let per = match &child {
            None => 2,
            Some(c) => c.len().checked_pow(active as u32)?.checked_mul(2)?,
        };
        total = total.checked_add(per)?;
        if total > budget {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    for a in assignments(phi.vars) {
        let act = active_slots(phi, &a);
        let blocks: Vec<Vec<Vec<Rational>>> = act
            .iter()
            .map(|&on| match (&child, on) {
                (None, on) => vec![vec![Rational::from(usize::from(on))]],
                (Some(_), false) => vec![vec![Rational::zero(); width]],
                (Some(c), true) => c.clone(),
            })
            .collect();
        for d0 in [Rational::zero(), bound.clone()] {
            product(&blocks, vec![d0], &mut out);
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

/// Componentwise-maximal vertices of one level, or `None` past `budget`.
fn pareto_hints(phi: &CnfFormula, rho: &Rational, gamma: u32, budget: usize) -> Option<Vec<Vec<Rational>>> {
    let m = phi.clause_count();
    let bound = h0_bound(m, rho, gamma);
    let child = if gamma == 1 { None } else { Some(pareto_hints(phi, rho, gamma - 1, budget)?) };
    let width = child.as_ref().map_or(1, |c| c.first().map_or(0, Vec::len));
    // Only maximal assignments can contribute: turning a slot on only adds demand.
    let masks: Vec<Vec<bool>> = {
        let mut ms: Vec<Vec<bool>> = assignments(phi.vars).map(|a| active_slots(phi, &a)).collect();
        ms.sort();
        ms.dedup();
        let keep: Vec<Vec<bool>> = ms
            .iter()
            .filter(|a| !ms.iter().any(|b| b != *a && a.iter().zip(b.iter()).all(|(x, y)| !x || *y)))
            .cloned()
            .collect();
        keep
    };
    let mut total: usize = 0;
    for act in &masks {
        let active = act.iter().filter(|&&x| x).count();
        let per = child.as_ref().map_or(Some(1), |c| c.len().checked_pow(active as u32))?;
        total = total.checked_add(per)?;
        if total > budget {
            return None;
        }
    }
    let mut out = Vec::with_capacity(total);
    for act in &masks {
        let blocks: Vec<Vec<Vec<Rational>>> = act
            .iter()
            .map(|&on| match (&child, on) {
                (None, on) => vec![vec![Rational::from(usize::from(on))]],
                (Some(_), false) => vec![vec![Rational::zero(); width]],
                (Some(c), true) => c.clone(),
            })
            .collect();
        product(&blocks, vec![bound.clone()], &mut out);
    }
    let mut out = pareto_maximal(out);
    out.reverse();
    Some(out)
}

/// Which of the `3m` slots carry a true literal.
pub fn active_slots(phi: &CnfFormula, assignment: &[bool]) -> Vec<bool> {
    phi.clauses
        .iter()
        .flat_map(|c| c.iter().map(|&l| CnfFormula::literal_true(l, assignment)))
        .collect()
}

/// Appends `prefix ++ b_1 ++ … ++ b_k` for every choice of `b_i ∈ blocks[i]`.
fn product(blocks: &[Vec<Vec<Rational>>], prefix: Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let mut v = prefix.clone();
        for (b, &i) in blocks.iter().zip(&idx) {
            v.extend(b[i].iter().cloned());
        }
        out.push(v);
        let mut k = blocks.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < blocks[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Vertex hints for level `γ`: the full list when it fits the budget,
/// otherwise the dominating maximal subset, otherwise nothing.
pub fn gamma_hints(phi: &CnfFormula, rho: &Rational, gamma: u32, budget: usize) -> Option<VertexHints> {
    if let Some(v) = full_hints(phi, rho, gamma, budget) {
        return Some(VertexHints { complete: true, vectors: v });
    }
    pareto_hints(phi, rho, gamma, budget).map(|v| VertexHints { complete: false, vectors: v })
}

/// Builds `f_γ(φ)` together with its layout.
pub fn build_gamma(phi: &CnfFormula, rho: &Rational, gamma: u32) -> Result<(Instance, GammaLayout)> {
    check_params(rho, gamma)?;
    let mut b = Builder {
        phi,
        g: Graph::new(0),
        comms: Vec::new(),
        aux_names: Vec::new(),
    };
    let s = b.node("s".into());
    let t = b.node("t".into());
    let layout = b.level(gamma, s, t, "");
    let mut polytope = level_system(phi, rho, gamma);
    debug_assert_eq!(polytope.demand_dim, b.comms.len());
    debug_assert_eq!(polytope.aux_dim, b.aux_names.len());
    polytope.aux_names = b.aux_names;
    polytope.vertex_hints = gamma_hints(phi, rho, gamma, HINT_BUDGET);
    let hints = match &polytope.vertex_hints {
        Some(h) if h.complete => "complete",
        Some(_) => "dominating",
        None => "none",
    };
    let meta = BTreeMap::from([
        ("gadget".to_string(), "gamma".to_string()),
        ("m".to_string(), phi.clause_count().to_string()),
        ("r".to_string(), phi.vars.to_string()),
        ("gamma".to_string(), gamma.to_string()),
        ("rho".to_string(), rho.to_string()),
        ("hints".to_string(), hints.to_string()),
    ]);
    debug_assert!(b.g.edges.iter().all(|e| e.capacity == Capacity::Finite(Rational::one())));
    Ok((
        Instance {
            graph: b.g,
            commodities: b.comms,
            polytope,
            meta,
        },
        layout,
    ))
}

pub fn gen_gamma(phi: &CnfFormula, rho: &Rational, gamma: u32) -> Result<Instance> {
    build_gamma(phi, rho, gamma).map(|(i, _)| i)
}

pub fn gen_gamma1(phi: &CnfFormula, rho: &Rational) -> Result<Instance> {
    gen_gamma(phi, rho, 1)
}

pub fn gen_recursive(phi: &CnfFormula, rho: &Rational, gamma: u32) -> Result<Instance> {
    if gamma < 2 {
        return Err(Error::Malformed("the recursive construction needs gamma >= 2".into()));
    }
    gen_gamma(phi, rho, gamma)
}

/// A point `(d, ψ)` of the lifted set in which every literal follows
/// `assignment` at every level and each `h0` sits at its bound.
pub fn lifted_witness(phi: &CnfFormula, rho: &Rational, gamma: u32, assignment: &[bool]) -> (Vec<Rational>, Vec<Rational>) {
    let m = phi.clause_count();
    let mut xi = Vec::with_capacity(2 * phi.vars);
    for &v in assignment {
        xi.push(Rational::from(usize::from(v)));
        xi.push(Rational::from(usize::from(!v)));
    }
    let mut d = vec![h0_bound(m, rho, gamma)];
    let mut psi = xi;
    if gamma == 1 {
        d.extend(active_slots(phi, assignment).into_iter().map(|on| Rational::from(usize::from(on))));
        return (d, psi);
    }
    let (cd, cpsi) = lifted_witness(phi, rho, gamma - 1, assignment);
    let mut psi_blocks = Vec::new();
    for on in active_slots(phi, assignment) {
        if on {
            d.extend(cd.iter().cloned());
            psi_blocks.extend(cpsi.iter().cloned());
        } else {
            d.extend(std::iter::repeat_n(Rational::zero(), cd.len()));
            psi_blocks.extend(std::iter::repeat_n(Rational::zero(), cpsi.len()));
        }
    }
    psi.extend(psi_blocks);
    (d, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::polytope::enumerate_vertices;
    use crate::rational::q;

    fn xyz() -> CnfFormula {
        CnfFormula::new(3, vec![[1, 2, 3]]).unwrap()
    }

    #[test]
    fn level_one_shape() {
        let inst = gen_gamma1(&xyz(), &q(1, 2)).unwrap();
        assert_eq!(inst.graph.node_count, 4);
        assert_eq!(inst.graph.edge_count(), 3);
        assert_eq!(inst.commodities.len(), 4);
        let h = inst.polytope.vertex_hints.as_ref().unwrap();
        assert!(h.complete);
        assert_eq!(h.vectors.len(), 16);
        assert!(validate(&inst).is_empty());
    }

    #[test]
    fn level_one_hints_match_enumeration() {
        let inst = gen_gamma1(&xyz(), &q(1, 2)).unwrap();
        let vs = enumerate_vertices(&inst.polytope, 12).unwrap();
        assert_eq!(vs, inst.polytope.vertex_hints.unwrap().vectors);
    }

    #[test]
    fn level_two_shape() {
        let inst = gen_gamma(&xyz(), &q(1, 2), 2).unwrap();
        assert_eq!(inst.graph.node_count, 10);
        assert_eq!(inst.graph.edge_count(), 9);
        assert_eq!(inst.commodities.len(), 13);
        let h = inst.polytope.vertex_hints.as_ref().unwrap();
        assert!(h.complete);
        // Each slot independently takes zero or one of the 16 child vertices.
        assert_eq!(h.vectors.len(), 2 * 16 * 16 * 16);
    }

    #[test]
    fn witness_is_in_lifted_set() {
        let phi = CnfFormula::new(2, vec![[1, 2, 2], [-1, 2, -2]]).unwrap();
        for gamma in 1..=2 {
            let p = level_system(&phi, &q(3, 5), gamma);
            for a in assignments(2) {
                let (d, psi) = lifted_witness(&phi, &q(3, 5), gamma, &a);
                assert!(p.rows.iter().all(|r| r.holds(&d, &psi)));
            }
        }
    }

    #[test]
    fn dominating_hints_cover_full_list() {
        let phi = CnfFormula::new(2, vec![[1, -2, 2]]).unwrap();
        let full = full_hints(&phi, &q(1, 2), 2, usize::MAX).unwrap();
        let top = pareto_hints(&phi, &q(1, 2), 2, usize::MAX).unwrap();
        for v in &full {
            assert!(top.iter().any(|w| w.iter().zip(v).all(|(a, b)| a >= b)));
        }
        for w in &top {
            assert!(full.contains(w));
        }
    }

    #[test]
    fn names_are_stable() {
        let inst = gen_gamma(&xyz(), &q(1, 2), 2).unwrap();
        assert_eq!(inst.graph.node_names[..4], ["s", "t", "c1.a", "c1.b"]);
        assert_eq!(inst.graph.node_names[4], "L2.i1.j1/c1.a");
        assert_eq!(inst.graph.edges[0].name.as_deref(), Some("L2.i1.j1/e1.1"));
        assert_eq!(inst.commodities[1].name.as_deref(), Some("L2.i1.j1/h0"));
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(gen_gamma1(&xyz(), &q(1, 1)).is_err());
        assert!(gen_gamma1(&xyz(), &q(0, 1)).is_err());
    }
}
