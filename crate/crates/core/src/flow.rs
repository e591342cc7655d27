//! Multicommodity flow for a single demand vector.
//!
//! Routing is a path-flow LP solved by column generation: each round
//! prices paths with an exact Dijkstra over the capacity-row duals and adds
//! every path with negative reduced cost. Commodities with `allowed_paths`
//! get exactly those columns and are never priced.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{Bound, LinearProgram, LpStatus, ObjectiveSense, RowSense, Simplex};
use crate::model::{Commodity, Graph};
use crate::rational::Rational;

/// Per commodity, the nonzero directional flows `edge -> (s→t, t→s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub beta: Rational,
    pub flows: Vec<BTreeMap<usize, (Rational, Rational)>>,
}

impl FlowSolution {
    pub fn zero(commodities: usize) -> Self {
        FlowSolution {
            beta: Rational::zero(),
            flows: vec![BTreeMap::new(); commodities],
        }
    }

    fn from_paths(g: &Graph, comms: &[Commodity], beta: Rational, paths: &[Vec<(Vec<usize>, Rational)>]) -> Self {
        let mut sol = FlowSolution::zero(comms.len());
        for (h, ps) in paths.iter().enumerate() {
            for (path, x) in ps {
                let nodes = g.walk(comms[h].source, path).expect("columns are valid walks");
                for (k, &e) in path.iter().enumerate() {
                    let entry = sol.flows[h].entry(e).or_default();
                    if nodes[k] == g.edges[e].s {
                        entry.0 += x;
                    } else {
                        entry.1 += x;
                    }
                }
            }
        }
        sol.beta = beta;
        sol
    }

    /// Total flow on `e` over both directions and all commodities.
    pub fn load(&self, e: usize) -> Rational {
        self.flows
            .iter()
            .filter_map(|f| f.get(&e))
            .map(|(a, b)| a + b)
            .sum()
    }

    /// Net outflow of commodity `h` at node `v`.
    pub fn net_outflow(&self, g: &Graph, h: usize, v: usize) -> Rational {
        let mut out = Rational::zero();
        for (&e, (fw, bw)) in &self.flows[h] {
            let edge = &g.edges[e];
            if edge.s == v {
                out += fw - bw;
            }
            if edge.t == v {
                out += bw - fw;
            }
        }
        out
    }
}

/// Shortest paths from `src` under nonnegative weights, over edges accepted
/// by `usable`. Returns distances and predecessor edges. Ties go to the
/// lower node id, then to the earlier edge.
pub(crate) fn dijkstra(
    g: &Graph,
    adj: &[Vec<usize>],
    src: usize,
    weight: &dyn Fn(usize) -> Rational,
    usable: &dyn Fn(usize) -> bool,
) -> (Vec<Option<Rational>>, Vec<Option<usize>>) {
    let n = g.node_count;
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(Rational::zero());
    heap.push(Reverse((Rational::zero(), src)));
    while let Some(Reverse((dv, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &e in &adj[v] {
            if !usable(e) {
                continue;
            }
            let u = g.edges[e].other(v);
            if done[u] {
                continue;
            }
            let nd = &dv + &weight(e);
            if dist[u].as_ref().is_none_or(|du| nd < *du) {
                dist[u] = Some(nd.clone());
                pred[u] = Some(e);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    (dist, pred)
}

pub(crate) fn trace_path(g: &Graph, pred: &[Option<usize>], src: usize, dst: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut at = dst;
    while at != src {
        let e = pred[at].expect("destination is reachable");
        path.push(e);
        at = g.edges[e].other(at);
    }
    path.reverse();
    path
}

/// `dist_w(s(h), t(h))`, taken over the allowed paths when the commodity is
/// restricted. `None` if the sink is unreachable.
pub fn commodity_distance(g: &Graph, c: &Commodity, w: &[Rational]) -> Option<Rational> {
    match &c.allowed_paths {
        Some(paths) => paths.iter().map(|p| p.iter().map(|&e| &w[e]).sum::<Rational>()).min(),
        None => {
            let adj = g.adjacency();
            dijkstra(g, &adj, c.source, &|e| w[e].clone(), &|_| true).0[c.sink].clone()
        }
    }
}

/// Edge capacities for the congestion LP: `None` means unconstrained.
pub(crate) type Caps = [Option<Rational>];

fn usable(caps: &Caps, e: usize) -> bool {
    caps[e].as_ref().is_none_or(|c| c.is_positive())
}

/// First commodity with positive demand that has no route over usable edges.
pub(crate) fn blocked_commodity(g: &Graph, comms: &[Commodity], d: &[Rational], caps: &Caps) -> Option<usize> {
    let adj = g.adjacency();
    (0..comms.len()).find(|&h| d[h].is_positive() && initial_path(g, &adj, &comms[h], caps).is_none())
}

fn initial_path(g: &Graph, adj: &[Vec<usize>], c: &Commodity, caps: &Caps) -> Option<Vec<usize>> {
    match &c.allowed_paths {
        Some(paths) => paths.iter().find(|p| p.iter().all(|&e| usable(caps, e))).cloned(),
        None => {
            let (dist, pred) = dijkstra(g, adj, c.source, &|_| Rational::one(), &|e| usable(caps, e));
            dist[c.sink].as_ref()?;
            Some(trace_path(g, &pred, c.source, c.sink))
        }
    }
}

pub(crate) struct CongestionOutcome {
    pub beta: Rational,
    pub paths: Vec<Vec<(Vec<usize>, Rational)>>,
    /// `w_e ≥ 0` from the capacity rows; zero on unconstrained edges.
    pub edge_prices: Vec<Rational>,
}

fn check_inputs(g: &Graph, comms: &[Commodity], d: &[Rational]) -> Result<()> {
    if d.len() != comms.len() {
        return Err(Error::Malformed(format!(
            "demand vector has length {}, expected {}",
            d.len(),
            comms.len()
        )));
    }
    if let Some(h) = d.iter().position(Rational::is_negative) {
        return Err(Error::Malformed(format!("negative demand for commodity {h}")));
    }
    for (h, c) in comms.iter().enumerate() {
        if c.source >= g.node_count || c.sink >= g.node_count {
            return Err(Error::Malformed(format!("commodity {h} endpoint out of range")));
        }
    }
    Ok(())
}

/// The two path-flow programs sharing one column generation loop.
enum Bounding<'a> {
    /// `min β` with load `≤ β·cap_e` on constrained edges.
    Congestion(&'a Caps),
    /// `min Σ s_e` with load `≤ u_e + s_e` on every edge. Its edge duals are
    /// the deepest metric inequality with weights in `[0, 1]`.
    Excess(&'a [Rational]),
}

fn path_lp(g: &Graph, comms: &[Commodity], d: &[Rational], mode: Bounding) -> Result<CongestionOutcome> {
    let m_edges = g.edge_count();
    let mut paths = vec![Vec::new(); comms.len()];
    let active: Vec<usize> = (0..comms.len()).filter(|&h| d[h].is_positive()).collect();
    if active.is_empty() {
        return Ok(CongestionOutcome {
            beta: Rational::zero(),
            paths,
            edge_prices: vec![Rational::zero(); m_edges],
        });
    }
    let adj = g.adjacency();
    let all_usable: Vec<Option<Rational>> = vec![None; m_edges];
    let caps: &Caps = match &mode {
        Bounding::Congestion(c) => c,
        Bounding::Excess(_) => &all_usable,
    };

    let mut lp = LinearProgram::new(ObjectiveSense::Min, Vec::new());
    let mut edge_row = vec![None; m_edges];
    let mut demand_row = vec![usize::MAX; comms.len()];
    match &mode {
        Bounding::Congestion(caps) => {
            let beta = lp.add_var(Rational::one(), Bound::nonneg());
            for (e, cap) in caps.iter().enumerate() {
                if let Some(c) = cap {
                    edge_row[e] = Some(lp.add_row(vec![(beta, -c)], RowSense::Le, Rational::zero()));
                }
            }
        }
        Bounding::Excess(u) => {
            for (e, ue) in u.iter().enumerate() {
                let s = lp.add_var(Rational::one(), Bound::nonneg());
                edge_row[e] = Some(lp.add_row(vec![(s, -Rational::one())], RowSense::Le, ue.clone()));
            }
        }
    }
    for &h in &active {
        demand_row[h] = lp.add_row(vec![], RowSense::Eq, d[h].clone());
    }
    let column = |h: usize, path: &[usize]| -> Vec<(usize, Rational)> {
        let mut coeffs = vec![(demand_row[h], Rational::one())];
        coeffs.extend(path.iter().filter_map(|&e| edge_row[e]).map(|r| (r, Rational::one())));
        coeffs
    };

    let mut cols: Vec<(usize, Vec<usize>)> = Vec::new();
    for &h in &active {
        let initial: Vec<Vec<usize>> = match &comms[h].allowed_paths {
            Some(ps) => ps.clone(),
            None => vec![initial_path(g, &adj, &comms[h], caps)
                .ok_or_else(|| Error::Infeasible(format!("commodity {h} cannot be routed")))?],
        };
        for p in initial {
            let j = lp.add_var(Rational::zero(), Bound::nonneg());
            for (r, a) in column(h, &p) {
                lp.rows[r].coeffs.push((j, a));
            }
            cols.push((h, p));
        }
    }
    let first_path = lp.num_vars() - cols.len();
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &h in &active {
        if comms[h].allowed_paths.is_none() {
            by_source.entry(comms[h].source).or_default().push(h);
        }
    }

    let mut s = Simplex::new(lp)?;
    loop {
        if s.solve()? != LpStatus::Optimal {
            return Err(Error::Infeasible("path-flow LP has no optimum".into()));
        }
        let y = s.duals();
        let w: Vec<Rational> = (0..m_edges)
            .map(|e| edge_row[e].map_or_else(Rational::zero, |r| -&y[r]))
            .collect();
        let mut added = false;
        for (&src, hs) in &by_source {
            let (dist, pred) = dijkstra(g, &adj, src, &|e| w[e].clone(), &|_| true);
            for &h in hs {
                let t = comms[h].sink;
                let Some(dt) = &dist[t] else { continue };
                if *dt < y[demand_row[h]] {
                    let p = trace_path(g, &pred, src, t);
                    s.add_column(Rational::zero(), column(h, &p))?;
                    cols.push((h, p));
                    added = true;
                }
            }
        }
        if !added {
            let res = s.result();
            for (k, (h, p)) in cols.into_iter().enumerate() {
                let x = &res.primal[first_path + k];
                if x.is_positive() {
                    paths[h].push((p, x.clone()));
                }
            }
            return Ok(CongestionOutcome {
                beta: res.objective,
                paths,
                edge_prices: w,
            });
        }
    }
}

/// Minimum `β` such that `d` routes with load `≤ β·cap_e` on constrained edges.
pub(crate) fn solve_congestion(g: &Graph, comms: &[Commodity], d: &[Rational], caps: &Caps) -> Result<CongestionOutcome> {
    check_inputs(g, comms, d)?;
    if let Some(h) = blocked_commodity(g, comms, d, caps) {
        return Err(Error::Infeasible(format!("commodity {h} cannot be routed")));
    }
    path_lp(g, comms, d, Bounding::Congestion(caps))
}

fn graph_caps(g: &Graph) -> Vec<Option<Rational>> {
    g.edges.iter().map(|e| e.capacity.finite().cloned()).collect()
}

/// Exact minimum congestion for routing `d`; infinite-capacity edges are unconstrained.
pub fn min_congestion(g: &Graph, commodities: &[Commodity], d: &[Rational]) -> Result<(Rational, FlowSolution)> {
    let out = solve_congestion(g, commodities, d, &graph_caps(g))?;
    let sol = FlowSolution::from_paths(g, commodities, out.beta.clone(), &out.paths);
    Ok((out.beta, sol))
}

/// A violated metric inequality: `Σ w_e u_e = reserved < required = Σ_h d_h dist_w(h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricCertificate {
    pub weights: Vec<Rational>,
    pub reserved: Rational,
    pub required: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Routability {
    Feasible(FlowSolution),
    Infeasible(MetricCertificate),
}

impl Routability {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Routability::Feasible(_))
    }
}

/// Whether `d` can be routed inside the reservation `u` (one entry per edge).
///
/// A refusal carries the most violated metric inequality with weights in
/// `[0, 1]`; on success `beta` is the largest load ratio over reserved edges.
pub fn routable(g: &Graph, commodities: &[Commodity], d: &[Rational], u: &[Rational]) -> Result<Routability> {
    if u.len() != g.edge_count() {
        return Err(Error::Malformed(format!(
            "reservation has length {}, expected {}",
            u.len(),
            g.edge_count()
        )));
    }
    if let Some(e) = u.iter().position(Rational::is_negative) {
        return Err(Error::Malformed(format!("negative reservation on edge {e}")));
    }
    check_inputs(g, commodities, d)?;
    let out = path_lp(g, commodities, d, Bounding::Excess(u))?;
    if out.beta.is_zero() {
        let mut sol = FlowSolution::from_paths(g, commodities, Rational::zero(), &out.paths);
        sol.beta = (0..g.edge_count())
            .filter(|&e| u[e].is_positive())
            .map(|e| sol.load(e) / &u[e])
            .max()
            .unwrap_or_else(Rational::zero);
        return Ok(Routability::Feasible(sol));
    }
    let weights = out.edge_prices;
    let reserved = weights.iter().zip(u).map(|(w, x)| w * x).sum();
    let required = required_capacity(g, commodities, d, &weights)
        .ok_or_else(|| Error::Infeasible("commodity endpoints disconnected".into()))?;
    Ok(Routability::Infeasible(MetricCertificate {
        weights,
        reserved,
        required,
    }))
}

/// `Σ_h d_h dist_w(h)`.
pub fn required_capacity(g: &Graph, commodities: &[Commodity], d: &[Rational], w: &[Rational]) -> Option<Rational> {
    let mut total = Rational::zero();
    for (c, dh) in commodities.iter().zip(d) {
        if dh.is_zero() {
            continue;
        }
        total += dh * &commodity_distance(g, c, w)?;
    }
    Some(total)
}

/// Recomputes both sides of a metric certificate from scratch.
pub fn check_metric_certificate(
    g: &Graph,
    commodities: &[Commodity],
    d: &[Rational],
    u: &[Rational],
    cert: &MetricCertificate,
) -> bool {
    if cert.weights.len() != g.edge_count() || cert.weights.iter().any(Rational::is_negative) {
        return false;
    }
    let lhs: Rational = cert.weights.iter().zip(u).map(|(w, x)| w * x).sum();
    match required_capacity(g, commodities, d, &cert.weights) {
        Some(rhs) => lhs == cert.reserved && rhs == cert.required && lhs < rhs,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn parallel(k: usize) -> Graph {
        let mut g = Graph::new(2);
        for _ in 0..k {
            g.add_edge(0, 1, q(1, 1));
        }
        g
    }

    #[test]
    fn single_edge_unit() {
        let g = parallel(1);
        let (b, sol) = min_congestion(&g, &[Commodity::new(0, 1)], &[q(1, 1)]).unwrap();
        assert_eq!(b, q(1, 1));
        assert_eq!(sol.load(0), q(1, 1));
    }

    #[test]
    fn parallel_split() {
        let g = parallel(2);
        let (b, sol) = min_congestion(&g, &[Commodity::new(0, 1)], &[q(1, 1)]).unwrap();
        assert_eq!(b, q(1, 2));
        assert_eq!(sol.net_outflow(&g, 0, 0), q(1, 1));
        assert_eq!(sol.net_outflow(&g, 0, 1), q(-1, 1));
    }

    #[test]
    fn zero_demand_is_zero() {
        let g = parallel(1);
        let (b, _) = min_congestion(&g, &[Commodity::new(0, 1)], &[q(0, 1)]).unwrap();
        assert!(b.is_zero());
        let r = routable(&g, &[Commodity::new(0, 1)], &[q(0, 1)], &[q(0, 1)]).unwrap();
        assert!(r.is_feasible());
    }

    #[test]
    fn disconnected_is_infeasible() {
        let g = Graph::new(2);
        let err = min_congestion(&g, &[Commodity::new(0, 1)], &[q(1, 1)]);
        assert!(matches!(err, Err(Error::Infeasible(_))));
    }

    #[test]
    fn overloaded_edge_certificate() {
        let g = parallel(1);
        let comms = [Commodity::new(0, 1)];
        let d = [q(2, 1)];
        let u = [q(1, 1)];
        match routable(&g, &comms, &d, &u).unwrap() {
            Routability::Infeasible(c) => {
                assert!(check_metric_certificate(&g, &comms, &d, &u, &c));
                assert_eq!(c.weights, vec![q(1, 1)]);
                assert_eq!(c.reserved, q(1, 1));
                assert_eq!(c.required, q(2, 1));
            }
            Routability::Feasible(_) => panic!("should not route"),
        }
    }

    #[test]
    fn zero_reservation_blocks() {
        let g = parallel(1);
        let comms = [Commodity::new(0, 1)];
        let r = routable(&g, &comms, &[q(1, 1)], &[q(0, 1)]).unwrap();
        let Routability::Infeasible(c) = r else { panic!() };
        assert!(check_metric_certificate(&g, &comms, &[q(1, 1)], &[q(0, 1)], &c));
    }

    #[test]
    fn restricted_paths_are_respected() {
        // Triangle 0-1-2 with the commodity pinned to the long way round.
        let mut g = Graph::new(3);
        g.add_edge(0, 1, q(1, 1));
        g.add_edge(1, 2, q(1, 1));
        g.add_edge(0, 2, q(1, 1));
        let c = Commodity::new(0, 2).with_paths(vec![vec![0, 1]]);
        let (b, sol) = min_congestion(&g, &[c], &[q(3, 1)]).unwrap();
        assert_eq!(b, q(3, 1));
        assert!(sol.load(2).is_zero());
    }

    #[test]
    fn infinite_edges_are_free() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, crate::model::Capacity::Infinite);
        g.add_edge(1, 2, q(2, 1));
        let (b, _) = min_congestion(&g, &[Commodity::new(0, 2)], &[q(1, 1)]).unwrap();
        assert_eq!(b, q(1, 2));
    }
}
