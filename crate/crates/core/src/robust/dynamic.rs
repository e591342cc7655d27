//! Dynamic routing: congestion and linear-cost reservation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{check_lambda, dot, vertices};
use crate::error::{Error, Result};
use crate::flow::{min_congestion, routable, FlowSolution, MetricCertificate, Routability};
use crate::lp::{LinearProgram, LpStatus, ObjectiveSense, RowSense, Simplex};
use crate::model::Instance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongDynamic {
    pub beta: Rational,
    pub worst: Vec<Rational>,
    /// The dominating vertices that were evaluated, with their optimal routings.
    pub vertices: Vec<Vec<Rational>>,
    pub flows: Vec<FlowSolution>,
}

/// Worst-case minimum congestion over the uncertainty set.
pub fn cong_dynamic(inst: &Instance) -> Result<CongDynamic> {
    let vs = vertices(inst)?;
    let mut flows: Vec<FlowSolution> = Vec::with_capacity(vs.len());
    let mut best = 0;
    for (k, v) in vs.iter().enumerate() {
        let (beta, sol) = min_congestion(&inst.graph, &inst.commodities, v)?;
        if k > 0 && beta > flows[best].beta {
            best = k;
        }
        flows.push(sol);
    }
    Ok(CongDynamic {
        beta: flows[best].beta.clone(),
        worst: vs[best].clone(),
        vertices: vs,
        flows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinDynamic {
    pub value: Rational,
    pub reservation: Vec<Rational>,
    /// Metric inequalities in the pool when the solve finished.
    pub cuts: usize,
}

const BENDERS_ROUNDS: usize = 100_000;
/// Most violated metric inequalities added per round.
const CUTS_PER_ROUND: usize = 64;
/// Feasible edge-load vectors remembered per demand vertex.
const LOADS_PER_VERTEX: usize = 4;

/// Linear-cost robust reservation by metric-inequality cutting planes.
///
/// The master `min λᵀu, u ≥ 0, Σ w_k u ≥ r_k` is kept in dual form so a
/// new cut is one appended column. Cuts are valid for every cost vector,
/// so the pool is reused across calls. Each call starts from the cuts that
/// were binding last time and pulls further pooled cuts in only when `u`
/// violates them; vertices are probed with flow LPs once the pool holds.
pub struct LinDynamicSolver<'a> {
    inst: &'a Instance,
    vertices: Vec<Vec<Rational>>,
    pool: Vec<(Vec<Rational>, Rational)>,
    seen: BTreeSet<(Vec<Rational>, Rational)>,
    /// Pool indices with positive weight in the last optimal master.
    binding: Vec<usize>,
    cursor: usize,
    /// Per vertex, recent edge loads of feasible routings, newest first.
    /// Any of them fitting under `u` proves the vertex routable.
    loads: Vec<Vec<Vec<Rational>>>,
}

impl<'a> LinDynamicSolver<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        let vertices = vertices(inst)?;
        Ok(LinDynamicSolver {
            inst,
            loads: vec![Vec::new(); vertices.len()],
            vertices,
            pool: Vec::new(),
            seen: BTreeSet::new(),
            binding: Vec::new(),
            cursor: 0,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    /// Violated metric inequalities at `u`, deepest first, at most
    /// `CUTS_PER_ROUND`. Scans round-robin from where the last scan stopped.
    fn separate(&mut self, u: &[Rational]) -> Result<Vec<MetricCertificate>> {
        let g = &self.inst.graph;
        let ne = g.edge_count();
        let nv = self.vertices.len();
        let mut violated: Vec<(Rational, MetricCertificate)> = Vec::new();
        for k in 0..nv {
            let i = (self.cursor + k) % nv;
            if self.loads[i].iter().any(|l| l.iter().zip(u).all(|(a, b)| a <= b)) {
                continue;
            }
            match routable(g, &self.inst.commodities, &self.vertices[i], u)? {
                Routability::Feasible(sol) => {
                    let cache = &mut self.loads[i];
                    cache.insert(0, (0..ne).map(|e| sol.load(e)).collect());
                    cache.truncate(LOADS_PER_VERTEX);
                }
                Routability::Infeasible(cert) => {
                    violated.push((&cert.required - &cert.reserved, cert));
                    if violated.len() == CUTS_PER_ROUND {
                        self.cursor = (i + 1) % nv;
                        break;
                    }
                }
            }
        }
        // Deepest cuts first; ties keep vertex order.
        violated.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(violated.into_iter().map(|(_, c)| c).collect())
    }

    pub fn solve(&mut self, lambda: &[Rational]) -> Result<LinDynamic> {
        check_lambda(self.inst, lambda)?;
        let ne = self.inst.graph.edge_count();
        let column = |w: &[Rational]| -> Vec<(usize, Rational)> {
            w.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(e, x)| (e, x.clone())).collect()
        };
        let mut lp = LinearProgram::new(ObjectiveSense::Max, Vec::new());
        for l in lambda {
            lp.add_row(vec![], RowSense::Le, l.clone());
        }
        // Master column j is pool cut cols[j].
        let mut cols: Vec<usize> = Vec::new();
        let mut in_master = vec![false; self.pool.len()];
        for &k in &self.binding {
            let (w, r) = &self.pool[k];
            let j = lp.add_var(r.clone(), crate::lp::Bound::nonneg());
            for (e, a) in column(w) {
                lp.rows[e].coeffs.push((j, a));
            }
            cols.push(k);
            in_master[k] = true;
        }
        let mut s = Simplex::new(lp)?;
        for _ in 0..BENDERS_ROUNDS {
            if s.solve()? != LpStatus::Optimal {
                return Err(Error::Unbounded("reservation master has no optimum".into()));
            }
            let u = s.duals();
            debug_assert_eq!(u.len(), ne);

            // Pooled cuts first: a dot product each.
            let mut stale: Vec<(Rational, usize)> = (0..self.pool.len())
                .filter(|&k| !in_master[k])
                .filter_map(|k| {
                    let (w, r) = &self.pool[k];
                    let gap = r - &dot(w, &u);
                    gap.is_positive().then_some((gap, k))
                })
                .collect();
            if !stale.is_empty() {
                stale.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                for &(_, k) in stale.iter().take(CUTS_PER_ROUND) {
                    let (w, r) = &self.pool[k];
                    s.add_column(r.clone(), column(w))?;
                    cols.push(k);
                    in_master[k] = true;
                }
                continue;
            }

            let fresh = self.separate(&u)?;
            if fresh.is_empty() {
                let res = s.result();
                // Recompute the value from u directly rather than trusting the master.
                let value = dot(lambda, &u);
                debug_assert_eq!(value, res.objective);
                self.binding = cols
                    .iter()
                    .zip(&res.primal)
                    .filter(|(_, y)| y.is_positive())
                    .map(|(&k, _)| k)
                    .collect();
                return Ok(LinDynamic {
                    value,
                    reservation: u,
                    cuts: self.pool.len(),
                });
            }
            let mut added = false;
            for cert in fresh {
                let key = (cert.weights, cert.required);
                if !self.seen.insert(key.clone()) {
                    continue;
                }
                s.add_column(key.1.clone(), column(&key.0))?;
                cols.push(self.pool.len());
                in_master.push(true);
                self.pool.push(key);
                added = true;
            }
            if !added {
                // Every pooled cut holds at u, so a repeated one means lost exactness.
                return Err(Error::Budget("metric cut repeated; cutting planes stalled".into()));
            }
        }
        Err(Error::Budget(format!("reservation cutting planes exceeded {BENDERS_ROUNDS} rounds")))
    }
}

/// `min λᵀu` over reservations that route every demand in the set.
pub fn lin_dynamic(inst: &Instance, lambda: &[Rational]) -> Result<LinDynamic> {
    LinDynamicSolver::new(inst)?.solve(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Commodity, DemandPolytope, Graph};
    use crate::rational::q;

    fn single_edge(c: Rational) -> Instance {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, c);
        Instance {
            graph: g,
            commodities: vec![Commodity::new(0, 1)],
            polytope: DemandPolytope::demand_box(1, &q(0, 1), &q(1, 1)),
            meta: Default::default(),
        }
    }

    #[test]
    fn single_edge_congestion() {
        let r = cong_dynamic(&single_edge(q(2, 1))).unwrap();
        assert_eq!(r.beta, q(1, 2));
        assert_eq!(r.worst, vec![q(1, 1)]);
    }

    #[test]
    fn single_edge_linear_cost() {
        let inst = single_edge(q(1, 1));
        let r = lin_dynamic(&inst, &[q(1, 1)]).unwrap();
        assert_eq!(r.value, q(1, 1));
        assert_eq!(r.reservation, vec![q(1, 1)]);
        assert_eq!(lin_dynamic(&inst, &[q(0, 1)]).unwrap().value, q(0, 1));
    }

    #[test]
    fn pool_is_reused() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, q(1, 1));
        g.add_edge(1, 2, q(1, 1));
        g.add_edge(0, 2, q(1, 1));
        let inst = Instance {
            graph: g,
            commodities: vec![Commodity::new(0, 2), Commodity::new(0, 1)],
            polytope: DemandPolytope::demand_box(2, &q(0, 1), &q(1, 1)),
            meta: Default::default(),
        };
        let mut s = LinDynamicSolver::new(&inst).unwrap();
        let a = s.solve(&[q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        let b = s.solve(&[q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.value, q(2, 1));
        let c = s.solve(&[q(1, 1), q(1, 1), q(3, 1)]).unwrap();
        assert_eq!(c.value, q(3, 1));
    }
}
