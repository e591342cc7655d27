//! The two-path gadget `G′`: every commodity may use at most two fixed paths.

use std::collections::BTreeMap;

use super::cnf::{assignments, CnfFormula};
use crate::error::{Error, Result};
use crate::model::{Capacity, Commodity, DemandPolytope, Graph, Instance, PolySense, VertexHints};
use crate::rational::Rational;

/// Edge ids of clause `i` (0-based): `[e_i1, e_i2, e_i3, s-connector, t-connector]`.
pub fn clause_edges(i: usize) -> [usize; 5] {
    let b = 1 + 5 * i;
    [b, b + 1, b + 2, b + 3, b + 4]
}

/// Builds `G′`. Node 0 is `s1`, node 1 is `t1`, edge 0 is `e0` with
/// capacity `mρ`. Per clause `i` the commodities are `h{i}.0` (two paths)
/// then `h{i}.1..3` (one edge each).
pub fn gen_two_path(phi: &CnfFormula, rho: &Rational) -> Result<Instance> {
    if !rho.is_positive() || *rho >= Rational::one() {
        return Err(Error::Malformed(format!("rho must lie in (0,1), got {rho}")));
    }
    let m = phi.clause_count();
    let r = phi.vars;
    let mut g = Graph::new(2);
    g.node_names = vec!["s1".into(), "t1".into()];
    let e0 = g.add_edge(0, 1, Rational::from(m) * rho);
    g.edges[e0].name = Some("e0".into());
    let mut comms = Vec::new();
    for i in 1..=m {
        let p: Vec<usize> = (0..4)
            .map(|k| {
                g.node_names.push(format!("c{i}.{k}"));
                g.node_count += 1;
                g.node_count - 1
            })
            .collect();
        let chain: Vec<usize> = (1..=3)
            .map(|j| {
                let e = g.add_edge(p[j - 1], p[j], Rational::one());
                g.edges[e].name = Some(format!("e{i}.{j}"));
                e
            })
            .collect();
        let a = g.add_edge(p[0], 0, Capacity::Infinite);
        g.edges[a].name = Some(format!("a{i}"));
        let b = g.add_edge(1, p[3], Capacity::Infinite);
        g.edges[b].name = Some(format!("b{i}"));
        comms.push(
            Commodity::new(p[0], p[3])
                .named(format!("h{i}.0"))
                .with_paths(vec![chain.clone(), vec![a, e0, b]]),
        );
        for j in 1..=3 {
            comms.push(
                Commodity::new(p[j - 1], p[j])
                    .named(format!("h{i}.{j}"))
                    .with_paths(vec![vec![chain[j - 1]]]),
            );
        }
    }

    let one = Rational::one;
    let mut p = DemandPolytope::new(4 * m, 2 * r);
    for l in 0..2 * r {
        p.push(vec![], vec![(l, -one())], PolySense::Le, Rational::zero());
    }
    for k in 0..r {
        p.push(vec![], vec![(2 * k, one()), (2 * k + 1, one())], PolySense::Eq, one());
    }
    for (i, c) in phi.clauses.iter().enumerate() {
        p.push(vec![(4 * i, one())], vec![], PolySense::Eq, one());
        for (j, &l) in c.iter().enumerate() {
            let xi = CnfFormula::literal_slot(l);
            p.push(vec![(4 * i + 1 + j, one())], vec![(xi, -one())], PolySense::Eq, Rational::zero());
        }
    }
    for k in 1..=r {
        p.aux_names.push(format!("xi[x{k}]"));
        p.aux_names.push(format!("xi[~x{k}]"));
    }
    let mut hints: Vec<Vec<Rational>> = assignments(r)
        .map(|a| {
            let mut d = Vec::with_capacity(4 * m);
            for c in &phi.clauses {
                d.push(one());
                d.extend(c.iter().map(|&l| Rational::from(usize::from(CnfFormula::literal_true(l, &a)))));
            }
            d
        })
        .collect();
    hints.sort();
    hints.dedup();
    p.vertex_hints = Some(VertexHints { complete: true, vectors: hints });

    let meta = BTreeMap::from([
        ("gadget".to_string(), "twopath".to_string()),
        ("m".to_string(), m.to_string()),
        ("r".to_string(), r.to_string()),
        ("rho".to_string(), rho.to_string()),
        ("hints".to_string(), "complete".to_string()),
    ]);
    Ok(Instance {
        graph: g,
        commodities: comms,
        polytope: p,
        meta,
    })
}
