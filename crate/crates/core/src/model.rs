//! Shared instance types: graph, commodities, demand polytope.
//!
//! Everything here is immutable once built. The JSON encoding is the
//! interchange format for the CLI; see `docs/instance-format.md`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::lp::{Bound, LinearProgram, LpStatus, ObjectiveSense, RowSense};
use crate::rational::Rational;

/// Edge capacity. `Infinite` is a distinct sentinel and never a large number.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(Rational),
    Infinite,
}

impl Capacity {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Capacity::Infinite)
    }
}

impl From<Rational> for Capacity {
    fn from(c: Rational) -> Self {
        Capacity::Finite(c)
    }
}

impl Serialize for Capacity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(c) => c.serialize(s),
            Capacity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.trim() == "inf" {
            Ok(Capacity::Infinite)
        } else {
            s.parse().map(Capacity::Finite).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub s: usize,
    pub t: usize,
    pub capacity: Capacity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Edge {
    pub fn new(s: usize, t: usize, capacity: impl Into<Capacity>) -> Self {
        Edge {
            s,
            t,
            capacity: capacity.into(),
            name: None,
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.s {
            self.t
        } else {
            self.s
        }
    }
}

/// Undirected capacitated multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub node_count: usize,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_names: Vec<String>,
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Graph {
            node_count,
            edges: Vec::new(),
            node_names: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, s: usize, t: usize, capacity: impl Into<Capacity>) -> usize {
        self.edges.push(Edge::new(s, t, capacity));
        self.edges.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Incident edge ids per node, in edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, e) in self.edges.iter().enumerate() {
            if e.s < self.node_count && e.t < self.node_count {
                adj[e.s].push(i);
                adj[e.t].push(i);
            }
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Node sequence of an edge path starting at `start`, or `None` if the
    /// edges do not chain.
    pub fn walk(&self, start: usize, path: &[usize]) -> Option<Vec<usize>> {
        let mut nodes = vec![start];
        let mut at = start;
        for &e in path {
            let edge = self.edges.get(e)?;
            if edge.s == at {
                at = edge.t;
            } else if edge.t == at {
                at = edge.s;
            } else {
                return None;
            }
            nodes.push(at);
        }
        Some(nodes)
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            for &e in &adj[v] {
                let w = self.edges[e].other(v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commodity {
    pub source: usize,
    pub sink: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Edge-id sequences from `source` to `sink`; absent means unrestricted routing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_paths: Option<Vec<Vec<usize>>>,
}

impl Commodity {
    pub fn new(source: usize, sink: usize) -> Self {
        Commodity {
            source,
            sink,
            name: None,
            allowed_paths: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_paths(mut self, paths: Vec<Vec<usize>>) -> Self {
        self.allowed_paths = Some(paths);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolySense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

/// One row `a·d + g·ψ (≤|=) rhs`, coefficients stored sparsely as
/// `(index, value)` pairs sorted by index with no zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyRow {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub demand: Vec<(usize, Rational)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<(usize, Rational)>,
    pub sense: PolySense,
    pub rhs: Rational,
}

impl PolyRow {
    pub fn new(
        demand: Vec<(usize, Rational)>,
        aux: Vec<(usize, Rational)>,
        sense: PolySense,
        rhs: Rational,
    ) -> Self {
        PolyRow {
            demand: normalize_terms(demand),
            aux: normalize_terms(aux),
            sense,
            rhs,
        }
    }

    /// Evaluates the left-hand side at `(d, ψ)`.
    pub fn lhs(&self, d: &[Rational], psi: &[Rational]) -> Rational {
        let a: Rational = self.demand.iter().map(|(i, c)| c * &d[*i]).sum();
        let g: Rational = self.aux.iter().map(|(i, c)| c * &psi[*i]).sum();
        a + g
    }

    pub fn holds(&self, d: &[Rational], psi: &[Rational]) -> bool {
        let lhs = self.lhs(d, psi);
        match self.sense {
            PolySense::Le => lhs <= self.rhs,
            PolySense::Eq => lhs == self.rhs,
        }
    }
}

/// Merges duplicate indices, drops zeros, sorts by index.
pub fn normalize_terms(terms: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
    for (i, c) in terms {
        *map.entry(i).or_default() += c;
    }
    map.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Exact list of demand vectors supplied alongside a polytope.
///
/// When `complete` is true the list is the full set of projected vertices.
/// Otherwise it is a dominating subset: every vertex of D is componentwise
/// below some listed vector. All solvers only need the latter because their
/// objectives are monotone in nonnegative demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexHints {
    pub complete: bool,
    pub vectors: Vec<Vec<Rational>>,
}

/// `D = {d : ∃ψ, A d + B ψ (≤|=) b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandPolytope {
    pub demand_dim: usize,
    pub aux_dim: usize,
    pub rows: Vec<PolyRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_hints: Option<VertexHints>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux_names: Vec<String>,
}

impl DemandPolytope {
    pub fn new(demand_dim: usize, aux_dim: usize) -> Self {
        DemandPolytope {
            demand_dim,
            aux_dim,
            rows: Vec::new(),
            vertex_hints: None,
            aux_names: Vec::new(),
        }
    }

    /// `lo ≤ d_i ≤ hi` on every demand coordinate.
    pub fn demand_box(dim: usize, lo: &Rational, hi: &Rational) -> Self {
        let mut p = Self::new(dim, 0);
        for i in 0..dim {
            p.push(vec![(i, Rational::one())], vec![], PolySense::Le, hi.clone());
            p.push(vec![(i, -Rational::one())], vec![], PolySense::Le, -lo);
        }
        p
    }

    pub fn push(
        &mut self,
        demand: Vec<(usize, Rational)>,
        aux: Vec<(usize, Rational)>,
        sense: PolySense,
        rhs: Rational,
    ) {
        self.rows.push(PolyRow::new(demand, aux, sense, rhs));
    }

    pub fn lifted_dim(&self) -> usize {
        self.demand_dim + self.aux_dim
    }

    /// Lifted system as LP rows over variables `(d, ψ)` with all bounds free.
    /// Rows with a single nonzero are turned into variable bounds.
    pub fn lifted_lp(&self, sense: ObjectiveSense, objective: Vec<Rational>) -> LinearProgram {
        let n = self.lifted_dim();
        let mut lp = LinearProgram::new(sense, objective);
        let mut bounds = vec![Bound::free(); n];
        for row in &self.rows {
            let terms: Vec<(usize, Rational)> = row
                .demand
                .iter()
                .cloned()
                .chain(row.aux.iter().map(|(i, c)| (self.demand_dim + i, c.clone())))
                .collect();
            if terms.len() == 1 {
                let (j, a) = &terms[0];
                let v = &row.rhs / a;
                let b = &mut bounds[*j];
                let tighten_upper = |b: &mut Bound, v: Rational| {
                    b.upper = Some(match b.upper.take() {
                        Some(u) => u.min(v),
                        None => v,
                    })
                };
                let tighten_lower = |b: &mut Bound, v: Rational| {
                    b.lower = Some(match b.lower.take() {
                        Some(l) => l.max(v),
                        None => v,
                    })
                };
                match row.sense {
                    PolySense::Eq => {
                        tighten_upper(b, v.clone());
                        tighten_lower(b, v);
                    }
                    PolySense::Le if a.is_positive() => tighten_upper(b, v),
                    PolySense::Le => tighten_lower(b, v),
                }
                continue;
            }
            let rs = match row.sense {
                PolySense::Le => RowSense::Le,
                PolySense::Eq => RowSense::Eq,
            };
            if terms.is_empty() {
                // 0 (≤|=) rhs: keep as an explicit row so infeasibility is detected.
                lp.add_row(vec![], rs, row.rhs.clone());
            } else {
                lp.add_row(terms, rs, row.rhs.clone());
            }
        }
        lp.bounds = bounds;
        lp
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub graph: Graph,
    pub commodities: Vec<Commodity>,
    pub polytope: DemandPolytope,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Instance {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Ids of finite-capacity edges, in order.
    pub fn finite_edges(&self) -> Vec<usize> {
        (0..self.graph.edge_count())
            .filter(|&e| !self.graph.edges[e].capacity.is_infinite())
            .collect()
    }
}

/// Checks every type invariant; an empty list means the instance is valid.
///
/// Boundedness of the lifted polytope is checked with two LPs per lifted
/// coordinate, so this is not cheap on large gadgets.
pub fn validate(instance: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    let g = &instance.graph;
    for (i, e) in g.edges.iter().enumerate() {
        if e.s >= g.node_count || e.t >= g.node_count {
            out.push(format!("edge {i} endpoint out of range"));
        } else if e.s == e.t {
            out.push(format!("edge {i} is a loop"));
        }
        if let Capacity::Finite(c) = &e.capacity {
            if !c.is_positive() {
                out.push(format!("edge {i} capacity not positive"));
            }
        }
    }
    if !g.node_names.is_empty() && g.node_names.len() != g.node_count {
        out.push("node_names length differs from node_count".to_string());
    }
    for (h, c) in instance.commodities.iter().enumerate() {
        if c.source >= g.node_count || c.sink >= g.node_count {
            out.push(format!("commodity {h} endpoint out of range"));
            continue;
        }
        if c.source == c.sink {
            out.push(format!("degenerate commodity {h}"));
        }
        if let Some(paths) = &c.allowed_paths {
            if paths.is_empty() {
                out.push(format!("commodity {h} has an empty allowed path list"));
            }
            for (k, p) in paths.iter().enumerate() {
                if !is_simple_path(g, c.source, c.sink, p) {
                    out.push(format!("commodity {h} path {k} is not a simple source-sink path"));
                }
            }
        }
    }
    let p = &instance.polytope;
    if p.demand_dim != instance.commodities.len() {
        out.push(format!(
            "polytope demand_dim {} differs from commodity count {}",
            p.demand_dim,
            instance.commodities.len()
        ));
    }
    out.extend(validate_polytope(p));
    out
}

fn is_simple_path(g: &Graph, s: usize, t: usize, path: &[usize]) -> bool {
    if path.is_empty() {
        return false;
    }
    match g.walk(s, path) {
        Some(nodes) => {
            let mut seen = nodes.clone();
            seen.sort_unstable();
            seen.dedup();
            *nodes.last().unwrap() == t && seen.len() == nodes.len()
        }
        None => false,
    }
}

pub fn validate_polytope(p: &DemandPolytope) -> Vec<String> {
    let mut out = Vec::new();
    for (r, row) in p.rows.iter().enumerate() {
        if row.demand.iter().any(|(i, _)| *i >= p.demand_dim)
            || row.aux.iter().any(|(i, _)| *i >= p.aux_dim)
        {
            out.push(format!("row {r} references a coordinate out of range"));
        }
    }
    if !p.aux_names.is_empty() && p.aux_names.len() != p.aux_dim {
        out.push("aux_names length differs from aux_dim".to_string());
    }
    if !out.is_empty() {
        return out;
    }
    let n = p.lifted_dim();
    let name = |j: usize| {
        if j < p.demand_dim {
            format!("d_{j}")
        } else {
            format!("psi_{}", j - p.demand_dim)
        }
    };
    let probe = p.lifted_lp(ObjectiveSense::Min, vec![Rational::zero(); n]);
    match crate::lp::solve(&probe) {
        Ok(r) if r.status == LpStatus::Infeasible => {
            out.push("polytope is empty".to_string());
            return out;
        }
        Err(e) => {
            out.push(format!("polytope LP failed: {e}"));
            return out;
        }
        _ => {}
    }
    for j in 0..n {
        let mut obj = vec![Rational::zero(); n];
        obj[j] = Rational::one();
        for (sense, what) in [(ObjectiveSense::Max, "above"), (ObjectiveSense::Min, "below")] {
            let lp = p.lifted_lp(sense, obj.clone());
            match crate::lp::solve(&lp) {
                Ok(r) if r.status == LpStatus::Unbounded => {
                    out.push(format!("coordinate {} unbounded {what}", name(j)));
                }
                Ok(r) if r.status == LpStatus::Optimal => {
                    if sense == ObjectiveSense::Min && r.objective.is_negative() {
                        out.push(format!("coordinate {} can be negative", name(j)));
                    }
                }
                Ok(_) => {}
                Err(e) => out.push(format!("polytope LP failed: {e}")),
            }
        }
    }
    if let Some(h) = &p.vertex_hints {
        for (k, v) in h.vectors.iter().enumerate() {
            if v.len() != p.demand_dim {
                out.push(format!("vertex hint {k} has wrong length"));
            } else if !crate::polytope::contains(p, v) {
                out.push(format!("vertex hint {k} lies outside the polytope"));
            }
        }
    }
    out
}
