//! Symmetric hose-model uncertainty sets.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Commodity, DemandPolytope, Graph, Instance, PolySense};
use crate::rational::Rational;

/// Nodes `0..bounds.len()` are terminals; one commodity per terminal pair
/// `(u, v)` with `u < v`, and `Σ_{h ∋ v} d_h ≤ b_v` per terminal.
pub fn gen_hose(bounds: &[Rational], graph: Graph) -> Result<Instance> {
    if bounds.len() > graph.node_count {
        return Err(Error::Malformed(format!(
            "{} bounds for {} nodes",
            bounds.len(),
            graph.node_count
        )));
    }
    if let Some(v) = bounds.iter().position(Rational::is_negative) {
        return Err(Error::Malformed(format!("negative hose bound at node {v}")));
    }
    let k = bounds.len();
    let mut comms = Vec::new();
    let mut incident = vec![Vec::new(); k];
    for u in 0..k {
        for v in u + 1..k {
            incident[u].push(comms.len());
            incident[v].push(comms.len());
            comms.push(Commodity::new(u, v).named(format!("h{u}-{v}")));
        }
    }
    let mut p = DemandPolytope::new(comms.len(), 0);
    for h in 0..comms.len() {
        p.push(vec![(h, -Rational::one())], vec![], PolySense::Le, Rational::zero());
    }
    for (v, b) in bounds.iter().enumerate() {
        if !incident[v].is_empty() {
            let terms = incident[v].iter().map(|&h| (h, Rational::one())).collect();
            p.push(terms, vec![], PolySense::Le, b.clone());
        }
    }
    let meta = BTreeMap::from([
        ("gadget".to_string(), "hose".to_string()),
        ("terminals".to_string(), k.to_string()),
    ]);
    Ok(Instance {
        graph,
        commodities: comms,
        polytope: p,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::enumerate_vertices;
    use crate::rational::q;

    #[test]
    fn two_terminals_give_an_interval() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, q(1, 1));
        let inst = gen_hose(&[q(1, 1), q(1, 1)], g).unwrap();
        let vs = enumerate_vertices(&inst.polytope, 12).unwrap();
        assert_eq!(vs, vec![vec![q(0, 1)], vec![q(1, 1)]]);
    }

    #[test]
    fn triangle_has_half_integral_vertex() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, q(1, 1));
        g.add_edge(1, 2, q(1, 1));
        g.add_edge(0, 2, q(1, 1));
        let inst = gen_hose(&[q(1, 1), q(1, 1), q(1, 1)], g).unwrap();
        let vs = enumerate_vertices(&inst.polytope, 12).unwrap();
        let h = q(1, 2);
        assert!(vs.contains(&vec![h.clone(), h.clone(), h]));
        assert!(vs.contains(&vec![q(1, 1), q(0, 1), q(0, 1)]));
        assert_eq!(vs.len(), 5);
    }
}
