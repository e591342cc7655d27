//! Static (oblivious) routing: one unit-flow template per commodity,
//! scaled by the realized demand.
//!
//! Both programs are path LPs over template columns with load rows for
//! (vertex, edge) pairs, priced by Dijkstra under the commodity-specific
//! weights `W^h_e = Σ_v v_h w_{v,e}`. Load rows are generated lazily.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_lambda, dot, vertices};
use crate::error::{Error, Result};
use crate::flow::{dijkstra, trace_path};
use crate::lp::{Bound, LinearProgram, LpStatus, ObjectiveSense, RowSense, Simplex};
use crate::model::Instance;
use crate::rational::Rational;

/// Per commodity, path → fraction of a unit flow.
pub type Template = Vec<Vec<(Vec<usize>, Rational)>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticSolution {
    pub beta: Rational,
    pub template: Template,
    /// Optimal multipliers in normalized form: `λ ≥ 0`, `Σ λ_e c_e = 1`.
    pub lambda: Vec<Rational>,
    /// Worst-case load of the template on every edge.
    pub reservation: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinStatic {
    pub value: Rational,
    pub template: Template,
    pub reservation: Vec<Rational>,
}

enum Mode<'a> {
    /// Rows on finite edges, bounded by `c_e β`.
    Congestion,
    /// Rows on edges with positive cost, bounded by a priced `u_e`.
    Linear(&'a [Rational]),
}

struct Outcome {
    objective: Rational,
    template: Template,
    /// `w_{v,e}` summed over vertices.
    edge_weight: Vec<Rational>,
}

/// Solution of the path LP over a working set of load rows.
struct Restricted {
    outcome: Outcome,
    /// Right-hand side of every row edge's load rows: `β c_e` or `u_e`.
    limit: Vec<Rational>,
}

/// Fraction of each commodity's unit template crossing each edge.
fn unit_loads(template: &Template, ne: usize) -> Vec<Vec<Rational>> {
    let mut unit = vec![vec![Rational::zero(); ne]; template.len()];
    for (h, paths) in template.iter().enumerate() {
        for (p, x) in paths {
            for &e in p {
                unit[h][e] += x;
            }
        }
    }
    unit
}

fn vertex_load(v: &[Rational], unit: &[Vec<Rational>], e: usize) -> Rational {
    v.iter()
        .zip(unit)
        .filter(|(d, _)| !d.is_zero())
        .map(|(d, u)| d * &u[e])
        .sum()
}

/// Row generation over `(vertex, edge)` load rows. The full program has
/// one row per pair; only rows some template has violated are kept, and
/// a restricted optimum that violates no row is optimal for the full one,
/// with zero duals on the rows left out.
fn solve_template(inst: &Instance, vs: &[Vec<Rational>], mode: Mode) -> Result<Outcome> {
    let g = &inst.graph;
    let comms = &inst.commodities;
    let ne = g.edge_count();
    let adj = g.adjacency();
    let row_edges: Vec<usize> = match &mode {
        Mode::Congestion => inst.finite_edges(),
        Mode::Linear(l) => (0..ne).filter(|&e| l[e].is_positive()).collect(),
    };
    let live: Vec<usize> = (0..comms.len()).filter(|&h| vs.iter().any(|v| v[h].is_positive())).collect();

    let mut cols: Vec<(usize, Vec<usize>)> = Vec::new();
    for &h in &live {
        let c = &comms[h];
        match &c.allowed_paths {
            Some(ps) => cols.extend(ps.iter().map(|p| (h, p.clone()))),
            None => {
                let (dist, pred) = dijkstra(g, &adj, c.source, &|_| Rational::one(), &|_| true);
                if dist[c.sink].is_none() {
                    return Err(Error::Infeasible(format!("commodity {h} cannot be routed")));
                }
                cols.push((h, trace_path(g, &pred, c.source, c.sink)));
            }
        }
    }

    let mut active: BTreeSet<(usize, usize)> = BTreeSet::new();
    loop {
        let r = restricted(inst, vs, &mode, &row_edges, &live, &active, &mut cols)?;
        let unit = unit_loads(&r.outcome.template, ne);
        let mut added = false;
        for &e in &row_edges {
            // Heaviest vertex on e, lowest index on ties.
            let mut best: Option<(Rational, usize)> = None;
            for (k, v) in vs.iter().enumerate() {
                let load = vertex_load(v, &unit, e);
                if best.as_ref().is_none_or(|(b, _)| load > *b) {
                    best = Some((load, k));
                }
            }
            if let Some((load, k)) = best {
                if load > r.limit[e] {
                    if !active.insert((k, e)) {
                        return Err(Error::Budget("static load row repeated; row generation stalled".into()));
                    }
                    added = true;
                }
            }
        }
        if !added {
            return Ok(r.outcome);
        }
    }
}

/// The path LP over load rows `active`, priced by column generation.
/// Generated columns are appended to `cols` for later rounds.
fn restricted(
    inst: &Instance,
    vs: &[Vec<Rational>],
    mode: &Mode,
    row_edges: &[usize],
    live: &[usize],
    active: &BTreeSet<(usize, usize)>,
    cols: &mut Vec<(usize, Vec<usize>)>,
) -> Result<Restricted> {
    let g = &inst.graph;
    let comms = &inst.commodities;
    let ne = g.edge_count();
    let adj = g.adjacency();

    let mut lp = LinearProgram::new(ObjectiveSense::Min, Vec::new());
    // Bound variables: β, or one u_e per row edge.
    let mut bound_var = vec![usize::MAX; ne];
    match mode {
        Mode::Congestion => {
            lp.add_var(Rational::one(), Bound::nonneg());
        }
        Mode::Linear(l) => {
            for &e in row_edges {
                bound_var[e] = lp.add_var(l[e].clone(), Bound::nonneg());
            }
        }
    }
    let mut unit_row = vec![usize::MAX; comms.len()];
    for &h in live {
        unit_row[h] = lp.add_row(vec![], RowSense::Eq, Rational::one());
    }
    // load_row[(k, e)], and per edge its (vertex, row) pairs.
    let mut load_row: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut by_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ne];
    for &(k, e) in active {
        let bound = match mode {
            Mode::Congestion => (0, -g.edges[e].capacity.finite().expect("finite edge")),
            Mode::Linear(_) => (bound_var[e], -Rational::one()),
        };
        let r = lp.add_row(vec![bound], RowSense::Le, Rational::zero());
        load_row.insert((k, e), r);
        by_edge[e].push((k, r));
    }
    let column = |h: usize, path: &[usize]| -> Vec<(usize, Rational)> {
        let mut c = vec![(unit_row[h], Rational::one())];
        for &e in path {
            for &(k, r) in &by_edge[e] {
                if !vs[k][h].is_zero() {
                    c.push((r, vs[k][h].clone()));
                }
            }
        }
        c
    };
    let first_path_var = lp.num_vars();
    for (h, p) in cols.iter() {
        let j = lp.add_var(Rational::zero(), Bound::nonneg());
        for (r, a) in column(*h, p) {
            lp.rows[r].coeffs.push((j, a));
        }
    }

    let mut s = Simplex::new(lp)?;
    loop {
        if s.solve()? != LpStatus::Optimal {
            return Err(Error::Infeasible("static routing LP has no optimum".into()));
        }
        let y = s.duals();
        let mut added = false;
        for &h in live {
            if comms[h].allowed_paths.is_some() {
                continue;
            }
            let mut wh = vec![Rational::zero(); ne];
            for (&(k, e), &r) in &load_row {
                let v = &vs[k][h];
                if !v.is_zero() && !y[r].is_zero() {
                    wh[e] -= v * &y[r];
                }
            }
            let c = &comms[h];
            let (dist, pred) = dijkstra(g, &adj, c.source, &|e| wh[e].clone(), &|_| true);
            if dist[c.sink].as_ref().is_some_and(|d| *d < y[unit_row[h]]) {
                let p = trace_path(g, &pred, c.source, c.sink);
                s.add_column(Rational::zero(), column(h, &p))?;
                cols.push((h, p));
                added = true;
            }
        }
        if added {
            continue;
        }
        let res = s.result();
        let mut template: Template = vec![Vec::new(); comms.len()];
        for (k, (h, p)) in cols.iter().enumerate() {
            let x = &res.primal[first_path_var + k];
            if x.is_positive() {
                template[*h].push((p.clone(), x.clone()));
            }
        }
        for (h, c) in comms.iter().enumerate() {
            if template[h].is_empty() {
                // Never loaded; any path will do.
                let p = match &c.allowed_paths {
                    Some(ps) => ps[0].clone(),
                    None => {
                        let (dist, pred) = dijkstra(g, &adj, c.source, &|_| Rational::one(), &|_| true);
                        if dist[c.sink].is_none() {
                            continue;
                        }
                        trace_path(g, &pred, c.source, c.sink)
                    }
                };
                template[h].push((p, Rational::one()));
            }
        }
        let mut edge_weight = vec![Rational::zero(); ne];
        for (&(_, e), &r) in &load_row {
            edge_weight[e] -= &y[r];
        }
        let mut limit = vec![Rational::zero(); ne];
        for &e in row_edges {
            limit[e] = match mode {
                Mode::Congestion => &res.primal[0] * g.edges[e].capacity.finite().expect("finite edge"),
                Mode::Linear(_) => res.primal[bound_var[e]].clone(),
            };
        }
        return Ok(Restricted {
            outcome: Outcome {
                objective: res.objective,
                template,
                edge_weight,
            },
            limit,
        });
    }
}

/// Worst-case load per edge of a template over the vertices.
fn template_reservation(inst: &Instance, vs: &[Vec<Rational>], template: &Template) -> Vec<Rational> {
    let ne = inst.graph.edge_count();
    let unit = unit_loads(template, ne);
    (0..ne)
        .map(|e| vs.iter().map(|v| vertex_load(v, &unit, e)).max().unwrap_or_else(Rational::zero))
        .collect()
}

/// Best static congestion, with its normalized dual multipliers.
pub fn cong_static(inst: &Instance) -> Result<StaticSolution> {
    let vs = vertices(inst)?;
    let out = solve_template(inst, &vs, Mode::Congestion)?;
    let lambda = if out.objective.is_positive() {
        out.edge_weight
    } else {
        // Every multiplier vector is optimal when nothing is loaded.
        super::uniform_lambda(inst)
    };
    let reservation = template_reservation(inst, &vs, &out.template);
    Ok(StaticSolution {
        beta: out.objective,
        template: out.template,
        lambda,
        reservation,
    })
}

pub fn extract_lambda_stat(inst: &Instance) -> Result<Vec<Rational>> {
    cong_static(inst).map(|s| s.lambda)
}

/// `min λᵀu` over reservations supporting a single static template.
pub fn lin_static(inst: &Instance, lambda: &[Rational]) -> Result<LinStatic> {
    check_lambda(inst, lambda)?;
    let vs = vertices(inst)?;
    let out = solve_template(inst, &vs, Mode::Linear(lambda))?;
    let reservation = template_reservation(inst, &vs, &out.template);
    let value = dot(lambda, &reservation);
    debug_assert_eq!(value, out.objective);
    Ok(LinStatic {
        value,
        template: out.template,
        reservation,
    })
}
