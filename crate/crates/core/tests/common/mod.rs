//! Shared formula and instance corpus for the integration tests.

#![allow(dead_code)]

use rnd_core::gadgets::{gen_gamma, gen_hose, gen_two_path, CnfFormula};
use rnd_core::model::{Graph, Instance};
use rnd_core::rational::q;
use rnd_core::Rational;

pub struct Case {
    pub name: &'static str,
    pub phi: CnfFormula,
    pub rho: Rational,
    pub gammas: &'static [u32],
}

fn f(vars: usize, clauses: &[[i32; 3]]) -> CnfFormula {
    CnfFormula::new(vars, clauses.to_vec()).unwrap()
}

/// Formulas with `m ≤ 3`, `r ≤ 4`. Low-value entries repeat a literal
/// inside a clause, since any three distinct literals give `val ≥ 7/8`.
pub fn formulas() -> Vec<Case> {
    let c = |name, phi, rho, gammas| Case { name, phi, rho, gammas };
    vec![
        c("xyz", f(3, &[[1, 2, 3]]), q(1, 2), &[1, 2]),
        c("neg-xyz", f(3, &[[-1, -2, -3]]), q(3, 4), &[1, 2]),
        c("unit", f(1, &[[1, 1, 1]]), q(1, 4), &[1, 2]),
        c("two-mixed", f(3, &[[1, 2, 3], [-1, 2, -3]]), q(3, 5), &[1, 2]),
        c("two-dup", f(2, &[[1, 1, 2], [-1, -2, -2]]), q(1, 2), &[1, 2]),
        c("two-split", f(3, &[[1, 2, 2], [-1, 3, 3]]), q(1, 2), &[1]),
        c("two-opposite", f(3, &[[1, 2, 3], [-1, -2, -3]]), q(1, 3), &[1]),
        c("three-a", f(4, &[[1, -2, 3], [-1, 2, 4], [2, -3, -4]]), q(2, 3), &[1]),
        c("three-b", f(4, &[[1, 2, 3], [1, -2, 4], [-1, 3, -4]]), q(4, 5), &[1]),
        c("three-c", f(4, &[[1, 2, 3], [2, 3, 4], [1, 3, 4]]), q(1, 2), &[1]),
        c("three-d", f(3, &[[-1, 2, 3], [1, -2, 3], [1, 2, -3]]), q(2, 3), &[1]),
        c("three-units", f(3, &[[1, 1, 1], [2, 2, 2], [3, 3, 3]]), q(1, 2), &[1]),
        c("contradiction", f(1, &[[1, 1, 1], [-1, -1, -1]]), q(3, 5), &[1, 2]),
        c("contradiction-hi", f(1, &[[1, 1, 1], [-1, -1, -1]]), q(9, 10), &[1]),
        c("contradiction-2v", f(2, &[[2, 2, 2], [-2, -2, -2]]), q(2, 3), &[1, 2]),
        c("contra-plus-y", f(2, &[[1, 1, 1], [-1, -1, -1], [2, 2, 2]]), q(3, 4), &[1]),
        c("contra-plus-noty", f(2, &[[1, 1, 1], [-1, -1, -1], [-2, -2, -2]]), q(4, 5), &[1]),
        c("chain-low", f(2, &[[1, 1, 2], [-1, -1, -1], [-2, -2, -2]]), q(3, 4), &[1]),
        c("contra-plus-clause", f(4, &[[2, 2, 2], [-2, -2, -2], [1, 3, 4]]), q(7, 10), &[1]),
        c("contra-plus-y-hi", f(2, &[[1, 1, 1], [-1, -1, -1], [2, 2, 2]]), q(5, 6), &[1]),
        c("no-claim", f(2, &[[1, 1, 1], [-1, -1, -1], [2, 2, 2]]), q(1, 2), &[1]),
    ]
}

pub fn triangle_hose() -> Instance {
    let mut g = Graph::new(3);
    g.add_edge(0, 1, q(1, 1));
    g.add_edge(1, 2, q(1, 1));
    g.add_edge(0, 2, q(1, 1));
    gen_hose(&[q(1, 1), q(1, 1), q(1, 1)], g).unwrap()
}

pub fn path_hose() -> Instance {
    let mut g = Graph::new(3);
    g.add_edge(0, 1, q(2, 1));
    g.add_edge(1, 2, q(1, 1));
    gen_hose(&[q(1, 1), q(2, 1), q(1, 1)], g).unwrap()
}

/// Named instances for the solver-identity criteria.
pub fn instances() -> Vec<(String, Instance)> {
    let mut out = Vec::new();
    for c in formulas() {
        for &g in c.gammas {
            out.push((format!("{}/g{g}", c.name), gen_gamma(&c.phi, &c.rho, g).unwrap()));
        }
    }
    for (name, vars, clauses, rho) in two_path_cases() {
        out.push((format!("twopath/{name}"), gen_two_path(&f(vars, &clauses), &rho).unwrap()));
    }
    out.push(("hose/triangle".into(), triangle_hose()));
    out.push(("hose/path".into(), path_hose()));
    out
}

/// Largest edge count for the LP-duality checks. The exact cutting-plane
/// loop needs dozens of rounds on the 36-edge two-clause `G_2` gadgets.
pub const SOLVER_EDGE_CAP: usize = 16;

pub fn solver_corpus() -> Vec<(String, Instance)> {
    instances().into_iter().filter(|(_, i)| i.graph.edge_count() <= SOLVER_EDGE_CAP).collect()
}

pub fn two_path_cases() -> Vec<(&'static str, usize, Vec<[i32; 3]>, Rational)> {
    vec![
        ("xyz", 3, vec![[1, 2, 3]], q(1, 2)),
        ("two-mixed", 3, vec![[1, 2, 3], [-1, 2, -3]], q(3, 5)),
        ("contradiction", 1, vec![[1, 1, 1], [-1, -1, -1]], q(3, 5)),
        ("contra-plus-y", 2, vec![[1, 1, 1], [-1, -1, -1], [2, 2, 2]], q(3, 4)),
    ]
}

pub fn formula(vars: usize, clauses: &[[i32; 3]]) -> CnfFormula {
    f(vars, clauses)
}
