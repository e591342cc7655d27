//! Vertex enumeration and linear optimization over a demand polytope.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lp::{self, LpStatus, ObjectiveSense};
use crate::model::{DemandPolytope, PolySense};
use crate::rational::Rational;

pub const DEFAULT_DIM_CAP: usize = 12;

/// Whether `d` lies in D, i.e. some `ψ` completes it to a point of the lifted set.
pub fn contains(p: &DemandPolytope, d: &[Rational]) -> bool {
    if d.len() != p.demand_dim {
        return false;
    }
    let mut lp = p.lifted_lp(ObjectiveSense::Min, vec![Rational::zero(); p.lifted_dim()]);
    for (j, v) in d.iter().enumerate() {
        let b = &mut lp.bounds[j];
        if b.lower.as_ref().is_some_and(|l| v < l) || b.upper.as_ref().is_some_and(|u| v > u) {
            return false;
        }
        b.lower = Some(v.clone());
        b.upper = Some(v.clone());
    }
    matches!(lp::solve(&lp), Ok(r) if r.status == LpStatus::Optimal)
}

/// Dense lifted rows `(coefficients over (d, ψ), rhs)`, split by sense.
type DenseRows = Vec<(Vec<Rational>, Rational)>;

fn dense_rows(p: &DemandPolytope) -> (DenseRows, DenseRows) {
    let n = p.lifted_dim();
    let mut eq = Vec::new();
    let mut le = Vec::new();
    for row in &p.rows {
        let mut a = vec![Rational::zero(); n];
        for (i, c) in &row.demand {
            a[*i] += c;
        }
        for (i, c) in &row.aux {
            a[p.demand_dim + i] += c;
        }
        match row.sense {
            PolySense::Eq => eq.push((a, row.rhs.clone())),
            PolySense::Le => le.push((a, row.rhs.clone())),
        }
    }
    (eq, le)
}

/// Row-reduces `[A | b]` in place. Returns pivot columns, or `None` if the
/// system is inconsistent.
fn row_reduce(m: &mut [Vec<Rational>], ncols: usize) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pr = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pr) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let consistent = m[r..].iter().all(|row| row[ncols].is_zero());
    consistent.then_some(pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(Rational::zero());
            v
        })
        .collect();
    row_reduce(&mut m, n).map_or(0, |p| p.len())
}

/// Vertices of the lifted set `{(d, ψ)}` in lexicographic order.
pub fn enumerate_lifted_vertices(p: &DemandPolytope, dim_cap: usize) -> Result<Vec<Vec<Rational>>> {
    let n = p.lifted_dim();
    if n > dim_cap {
        return Err(Error::DimensionCap { dim: n, cap: dim_cap });
    }
    let (eq, le) = dense_rows(p);
    let eq_rank = rank(&eq.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>());
    if eq_rank == n {
        // The equalities alone pin down at most one point.
        let mut out = BTreeSet::new();
        if let Some(x) = solve_tight(&eq, &[], n) {
            if le.iter().all(|(a, b)| dot(a, &x) <= *b) {
                out.insert(x);
            }
        }
        return Ok(out.into_iter().collect());
    }
    let k = n - eq_rank;
    let mut out = BTreeSet::new();
    if k > le.len() {
        return Ok(Vec::new());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let tight: Vec<&(Vec<Rational>, Rational)> = idx.iter().map(|&i| &le[i]).collect();
        if let Some(x) = solve_tight(&eq, &tight, n) {
            if le.iter().all(|(a, b)| dot(a, &x) <= *b) {
                out.insert(x);
            }
        }
        // Next k-subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out.into_iter().collect());
            }
            i -= 1;
            if idx[i] < le.len() - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
}

/// Unique solution of the equalities plus the chosen tight rows, if the
/// combined system has full column rank and is consistent.
fn solve_tight(
    eq: &[(Vec<Rational>, Rational)],
    tight: &[&(Vec<Rational>, Rational)],
    n: usize,
) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = eq
        .iter()
        .chain(tight.iter().copied())
        .map(|(a, b)| {
            let mut v = a.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = row_reduce(&mut m, n)?;
    if pivots.len() < n {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Projections onto the demand coordinates of the lifted vertices,
/// deduplicated, in lexicographic order.
pub fn enumerate_vertices(p: &DemandPolytope, dim_cap: usize) -> Result<Vec<Vec<Rational>>> {
    let lifted = enumerate_lifted_vertices(p, dim_cap)?;
    let set: BTreeSet<Vec<Rational>> = lifted.into_iter().map(|x| x[..p.demand_dim].to_vec()).collect();
    Ok(set.into_iter().collect())
}

/// Maximum of `wᵀd` over D with a maximizing demand vector.
pub fn maximize_linear(p: &DemandPolytope, w: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
    if w.len() != p.demand_dim {
        return Err(Error::Malformed(format!(
            "weight vector has length {}, expected {}",
            w.len(),
            p.demand_dim
        )));
    }
    let mut obj = w.to_vec();
    obj.resize(p.lifted_dim(), Rational::zero());
    let res = lp::solve(&p.lifted_lp(ObjectiveSense::Max, obj))?;
    match res.status {
        LpStatus::Optimal => Ok((res.objective, res.primal[..p.demand_dim].to_vec())),
        LpStatus::Infeasible => Err(Error::Infeasible("demand polytope is empty".into())),
        LpStatus::Unbounded => Err(Error::Unbounded("demand polytope is unbounded".into())),
    }
}

/// Componentwise-maximal members of `vs`, deduplicated, in descending
/// lexicographic order.
pub fn pareto_maximal(mut vs: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    vs.sort_unstable_by(|a, b| b.cmp(a));
    vs.dedup();
    let mut kept: Vec<Vec<Rational>> = Vec::new();
    for v in vs {
        // A dominating vector is lexicographically larger, so it is already kept.
        if !kept.iter().any(|w| w.iter().zip(&v).all(|(a, b)| a >= b)) {
            kept.push(v);
        }
    }
    kept
}

/// Vertex hints if present, otherwise generic enumeration.
pub fn demand_vertices(p: &DemandPolytope, dim_cap: usize) -> Result<Vec<Vec<Rational>>> {
    match &p.vertex_hints {
        Some(h) => Ok(h.vectors.clone()),
        None => enumerate_vertices(p, dim_cap),
    }
}

/// A set of demand vertices that dominates every point of D componentwise.
/// Enough for every objective that is monotone in nonnegative demand.
pub fn dominating_vertices(p: &DemandPolytope, dim_cap: usize) -> Result<Vec<Vec<Rational>>> {
    let vs = demand_vertices(p, dim_cap)?;
    if vs.is_empty() {
        return Err(Error::Infeasible("demand polytope has no vertices".into()));
    }
    let mut out = pareto_maximal(vs);
    out.reverse();
    Ok(out)
}
