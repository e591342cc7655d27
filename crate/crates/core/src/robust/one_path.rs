use crate::error::{Error, Result};
use crate::model::Instance;
use crate::polytope::maximize_linear;
use crate::rational::Rational;

/// Congestion when every commodity has exactly one allowed path:
/// `max_e (1/c_e) max_{d∈D} Σ_{h routed through e} d_h`.
pub fn cong_one_path(inst: &Instance) -> Result<Rational> {
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); inst.graph.edge_count()];
    for (h, c) in inst.commodities.iter().enumerate() {
        match c.allowed_paths.as_deref() {
            Some([p]) => {
                for &e in p {
                    through[e].push(h);
                }
            }
            _ => {
                return Err(Error::Precondition(format!(
                    "commodity {h} does not have exactly one allowed path"
                )))
            }
        }
    }
    let mut best = Rational::zero();
    for e in inst.finite_edges() {
        if through[e].is_empty() {
            continue;
        }
        let mut w = vec![Rational::zero(); inst.commodities.len()];
        for &h in &through[e] {
            w[h] = Rational::one();
        }
        let (val, _) = maximize_linear(&inst.polytope, &w)?;
        let c = inst.graph.edges[e].capacity.finite().expect("finite edge");
        best = best.max(val / c);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Commodity, DemandPolytope, Graph};
    use crate::rational::q;

    #[test]
    fn two_edge_path() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, q(1, 1));
        g.add_edge(1, 2, q(1, 1));
        let inst = Instance {
            graph: g,
            commodities: vec![Commodity::new(0, 2).with_paths(vec![vec![0, 1]])],
            polytope: DemandPolytope::demand_box(1, &q(0, 1), &q(1, 1)),
            meta: Default::default(),
        };
        assert_eq!(cong_one_path(&inst).unwrap(), q(1, 1));
    }

    #[test]
    fn unrestricted_is_rejected() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, q(1, 1));
        let inst = Instance {
            graph: g,
            commodities: vec![Commodity::new(0, 1)],
            polytope: DemandPolytope::demand_box(1, &q(0, 1), &q(1, 1)),
            meta: Default::default(),
        };
        assert!(matches!(cong_one_path(&inst), Err(Error::Precondition(_))));
    }
}
