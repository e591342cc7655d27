//! Dense two-phase tableau simplex.
//!
//! Variables are shifted/negated/split into `x' ≥ 0`, finite upper bounds
//! become rows, and every row is scaled to a nonnegative right-hand side.
//! Each row owns an identity column (slack or artificial); the current
//! tableau entries under those columns are `B⁻¹`, which is what dual
//! extraction and column addition read from.
//!
//! Pricing is Dantzig's rule, switching to Bland's lowest-index rule for as
//! long as pivots are degenerate. A cycle would have to consist of
//! degenerate pivots only, and from its second pass on those are all
//! chosen by Bland's rule, which cannot cycle.

use super::{audit, LinearProgram, LpResult, LpStatus, ObjectiveSense, RowSense};
use crate::error::{Error, Result};
use crate::rational::Rational;

type SparseRow = (Vec<(usize, Rational)>, RowSense, Rational);

const PIVOT_LIMIT: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    /// Structural column for original variable `var`; `neg` when `x = offset - x'`.
    Struct { var: usize, neg: bool },
    Slack,
    Artificial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum State {
    Fresh,
    Optimal,
    /// Needs another phase-2 pass after a column was added.
    Dirty,
    Infeasible(Vec<Rational>),
    Unbounded(usize),
}

/// A simplex run that keeps its tableau, so columns can be appended to an
/// optimal problem and re-optimized from the current basis.
pub struct Simplex {
    lp: LinearProgram,
    kinds: Vec<ColKind>,
    /// Standard columns per original variable.
    var_cols: Vec<Vec<usize>>,
    offset: Vec<Rational>,
    /// Tableau row `i < lp.rows.len()` is original row `i`; the rest are bound rows.
    row_flip: Vec<bool>,
    id_col: Vec<usize>,
    cost: Vec<Rational>,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    z: Vec<Rational>,
    zb: Rational,
    basis: Vec<usize>,
    state: State,
    bland: bool,
    pivots: usize,
}

impl Simplex {
    pub fn new(lp: LinearProgram) -> Result<Self> {
        lp.check_dims()?;
        let n = lp.num_vars();
        let min_sign = |c: &Rational| {
            if lp.sense == ObjectiveSense::Max {
                -c
            } else {
                c.clone()
            }
        };

        let mut kinds = Vec::new();
        let mut var_cols = vec![Vec::new(); n];
        let mut offset = vec![Rational::zero(); n];
        let mut cost = Vec::new();
        // (column, width) of finite upper-bound rows to add
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        for (j, bd) in lp.bounds.iter().enumerate() {
            let c = min_sign(&lp.objective[j]);
            match (&bd.lower, &bd.upper) {
                (Some(l), up) => {
                    offset[j] = l.clone();
                    let col = kinds.len();
                    kinds.push(ColKind::Struct { var: j, neg: false });
                    cost.push(c);
                    var_cols[j].push(col);
                    if let Some(u) = up {
                        bound_rows.push((col, u - l));
                    }
                }
                (None, Some(u)) => {
                    offset[j] = u.clone();
                    let col = kinds.len();
                    kinds.push(ColKind::Struct { var: j, neg: true });
                    cost.push(-c);
                    var_cols[j].push(col);
                }
                (None, None) => {
                    for neg in [false, true] {
                        let col = kinds.len();
                        kinds.push(ColKind::Struct { var: j, neg });
                        cost.push(if neg { -&c } else { c.clone() });
                        var_cols[j].push(col);
                    }
                }
            }
        }

        // Rows over structural columns.
        let mut rows: Vec<SparseRow> = Vec::new();
        for row in &lp.rows {
            let mut coeffs = Vec::with_capacity(row.coeffs.len());
            let mut rhs = row.rhs.clone();
            for (j, a) in &row.coeffs {
                if a.is_zero() {
                    continue;
                }
                rhs -= a * &offset[*j];
                for &col in &var_cols[*j] {
                    let neg = matches!(kinds[col], ColKind::Struct { neg: true, .. });
                    coeffs.push((col, if neg { -a } else { a.clone() }));
                }
            }
            rows.push((coeffs, row.sense, rhs));
        }
        for (col, width) in bound_rows {
            rows.push((vec![(col, Rational::one())], RowSense::Le, width));
        }

        let m = rows.len();
        let mut row_flip = vec![false; m];
        for (i, (coeffs, sense, rhs)) in rows.iter_mut().enumerate() {
            if rhs.is_negative() {
                row_flip[i] = true;
                *rhs = -&*rhs;
                for (_, a) in coeffs.iter_mut() {
                    *a = -&*a;
                }
                *sense = match sense {
                    RowSense::Le => RowSense::Ge,
                    RowSense::Ge => RowSense::Le,
                    RowSense::Eq => RowSense::Eq,
                };
            }
        }

        // Slack / surplus, then artificials.
        let mut slack_of = vec![None; m];
        for (i, (_, sense, _)) in rows.iter().enumerate() {
            if *sense != RowSense::Eq {
                slack_of[i] = Some(kinds.len());
                kinds.push(ColKind::Slack);
                cost.push(Rational::zero());
            }
        }
        let mut id_col = vec![0; m];
        for (i, (_, sense, _)) in rows.iter().enumerate() {
            if *sense == RowSense::Le {
                id_col[i] = slack_of[i].unwrap();
            } else {
                id_col[i] = kinds.len();
                kinds.push(ColKind::Artificial);
                cost.push(Rational::zero());
            }
        }

        let ncols = kinds.len();
        let mut a = vec![vec![Rational::zero(); ncols]; m];
        let mut b = Vec::with_capacity(m);
        for (i, (coeffs, sense, rhs)) in rows.into_iter().enumerate() {
            for (col, v) in coeffs {
                a[i][col] += v;
            }
            if let Some(s) = slack_of[i] {
                a[i][s] = if sense == RowSense::Ge {
                    -Rational::one()
                } else {
                    Rational::one()
                };
            }
            a[i][id_col[i]] = Rational::one();
            b.push(rhs);
        }

        Ok(Simplex {
            lp,
            kinds,
            var_cols,
            offset,
            row_flip,
            basis: id_col.clone(),
            id_col,
            cost,
            a,
            b,
            z: vec![Rational::zero(); ncols],
            zb: Rational::zero(),
            state: State::Fresh,
            bland: false,
            pivots: 0,
        })
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn is_art(&self, col: usize) -> bool {
        self.kinds[col] == ColKind::Artificial
    }

    /// Recomputes reduced costs for the cost vector `c` at the current basis.
    fn price(&mut self, c: &[Rational]) {
        let ncols = self.kinds.len();
        let mut z = c.to_vec();
        let mut zb = Rational::zero();
        for (r, &bv) in self.basis.iter().enumerate() {
            let cb = &c[bv];
            if cb.is_zero() {
                continue;
            }
            for (k, zk) in z.iter_mut().enumerate().take(ncols) {
                let v = &self.a[r][k];
                if !v.is_zero() {
                    *zk -= cb * v;
                }
            }
            zb -= cb * &self.b[r];
        }
        self.z = z;
        self.zb = zb;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.a[r][q].clone();
        debug_assert!(!piv.is_zero());
        let inv = piv.recip();
        let mut nz = Vec::new();
        for (k, v) in self.a[r].iter_mut().enumerate() {
            if !v.is_zero() {
                *v = &*v * &inv;
                nz.push(k);
            }
        }
        self.b[r] = &self.b[r] * &inv;
        let prow: Vec<(usize, Rational)> = nz.iter().map(|&k| (k, self.a[r][k].clone())).collect();
        let pb = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][q].is_zero() {
                continue;
            }
            let f = self.a[i][q].clone();
            let row = &mut self.a[i];
            for (k, v) in &prow {
                row[*k] -= &f * v;
            }
            self.b[i] -= &f * &pb;
        }
        if !self.z[q].is_zero() {
            let f = self.z[q].clone();
            for (k, v) in &prow {
                self.z[*k] -= &f * v;
            }
            self.zb -= &f * &pb;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    /// Primal simplex on the current reduced costs. Returns the entering
    /// column if an unbounded direction was found.
    fn run(&mut self) -> Result<Option<usize>> {
        loop {
            let mut q = None;
            for (j, zj) in self.z.iter().enumerate() {
                if !zj.is_negative() || self.is_art(j) {
                    continue;
                }
                if self.bland {
                    q = Some(j);
                    break;
                }
                match q {
                    Some(k) if self.z[k] <= *zj => {}
                    _ => q = Some(j),
                }
            }
            let Some(q) = q else { return Ok(None) };

            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.a.len() {
                let arq = &self.a[r][q];
                if !arq.is_positive() {
                    continue;
                }
                let ratio = &self.b[r] / arq;
                let better = match &leave {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return Ok(Some(q)) };
            self.bland = ratio.is_zero();
            self.pivot(r, q);
            if self.pivots > PIVOT_LIMIT {
                return Err(Error::Budget(format!("simplex exceeded {PIVOT_LIMIT} pivots")));
            }
        }
    }

    pub fn solve(&mut self) -> Result<LpStatus> {
        match self.state {
            State::Fresh => {}
            State::Dirty => return self.phase_two(),
            State::Optimal => return Ok(LpStatus::Optimal),
            State::Infeasible(_) => return Ok(LpStatus::Infeasible),
            State::Unbounded(_) => return Ok(LpStatus::Unbounded),
        }
        let ncols = self.kinds.len();
        if (0..ncols).any(|j| self.is_art(j)) {
            let c1: Vec<Rational> = (0..ncols)
                .map(|j| if self.is_art(j) { Rational::one() } else { Rational::zero() })
                .collect();
            self.price(&c1);
            self.bland = false;
            // Phase one is bounded below by zero.
            let _ = self.run()?;
            if self.zb.is_negative() {
                let y: Vec<Rational> = self
                    .id_col
                    .iter()
                    .map(|&col| &c1[col] - &self.z[col])
                    .collect();
                self.state = State::Infeasible(y);
                return Ok(LpStatus::Infeasible);
            }
            for r in 0..self.basis.len() {
                if !self.is_art(self.basis[r]) {
                    continue;
                }
                let q = (0..ncols).find(|&j| !self.is_art(j) && !self.a[r][j].is_zero());
                if let Some(q) = q {
                    self.pivot(r, q);
                }
            }
        }
        let c = self.cost.clone();
        self.price(&c);
        self.phase_two()
    }

    fn phase_two(&mut self) -> Result<LpStatus> {
        self.bland = false;
        match self.run()? {
            Some(q) => {
                self.state = State::Unbounded(q);
                Ok(LpStatus::Unbounded)
            }
            None => {
                self.state = State::Optimal;
                Ok(LpStatus::Optimal)
            }
        }
    }

    /// Appends a variable `x ≥ 0` with cost `obj` and the given row
    /// coefficients (original row indices). Only valid after an optimal solve.
    pub fn add_column(&mut self, obj: Rational, coeffs: Vec<(usize, Rational)>) -> Result<usize> {
        if !matches!(self.state, State::Optimal | State::Dirty) {
            return Err(Error::Precondition("columns can only be added to an optimal tableau".into()));
        }
        let m_orig = self.lp.rows.len();
        if let Some((i, _)) = coeffs.iter().find(|(i, _)| *i >= m_orig) {
            return Err(Error::Malformed(format!("row {i} out of range")));
        }
        let var = self.lp.num_vars();
        self.lp.add_var(obj.clone(), super::Bound::nonneg());
        for (i, a) in &coeffs {
            self.lp.rows[*i].coeffs.push((var, a.clone()));
        }
        let c = if self.lp.sense == ObjectiveSense::Max { -obj } else { obj };

        let col = self.kinds.len();
        self.kinds.push(ColKind::Struct { var, neg: false });
        self.var_cols.push(vec![col]);
        self.offset.push(Rational::zero());

        let mut zq = c.clone();
        let mut entries = vec![Rational::zero(); self.a.len()];
        for (i, a) in &coeffs {
            if a.is_zero() {
                continue;
            }
            let a = if self.row_flip[*i] { -a } else { a.clone() };
            let id = self.id_col[*i];
            for (k, e) in entries.iter_mut().enumerate() {
                let t = &self.a[k][id];
                if !t.is_zero() {
                    *e += t * &a;
                }
            }
            zq += &self.z[id] * &a;
        }
        for (row, e) in self.a.iter_mut().zip(entries) {
            row.push(e);
        }
        self.z.push(zq);
        self.cost.push(c);
        self.state = State::Dirty;
        Ok(var)
    }

    fn primal_from_basis(&self) -> Vec<Rational> {
        let mut xs = vec![Rational::zero(); self.kinds.len()];
        for (r, &bv) in self.basis.iter().enumerate() {
            xs[bv] = self.b[r].clone();
        }
        self.map_to_original(&xs, true)
    }

    fn map_to_original(&self, xs: &[Rational], with_offset: bool) -> Vec<Rational> {
        let n = self.lp.num_vars();
        let mut x: Vec<Rational> = if with_offset {
            self.offset.clone()
        } else {
            vec![Rational::zero(); n]
        };
        for (col, kind) in self.kinds.iter().enumerate() {
            if let ColKind::Struct { var, neg } = kind {
                if xs[col].is_zero() {
                    continue;
                }
                if *neg {
                    x[*var] -= &xs[col];
                } else {
                    x[*var] += &xs[col];
                }
            }
        }
        x
    }

    /// Row shadow prices at the current optimal basis, for original rows.
    pub fn duals(&self) -> Vec<Rational> {
        let flip_obj = self.lp.sense == ObjectiveSense::Max;
        (0..self.lp.rows.len())
            .map(|i| {
                let y = -&self.z[self.id_col[i]];
                let y = if self.row_flip[i] { -y } else { y };
                if flip_obj {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    pub fn result(&self) -> LpResult {
        let m = self.lp.rows.len();
        let n = self.lp.num_vars();
        let res = match &self.state {
            State::Optimal | State::Dirty | State::Fresh => {
                let primal = self.primal_from_basis();
                LpResult {
                    status: LpStatus::Optimal,
                    objective: self.lp.objective_value(&primal),
                    primal,
                    dual: self.duals(),
                    farkas_ray: Vec::new(),
                    primal_ray: Vec::new(),
                }
            }
            State::Infeasible(y) => {
                let ray = (0..m)
                    .map(|i| if self.row_flip[i] { y[i].clone() } else { -&y[i] })
                    .collect();
                LpResult {
                    status: LpStatus::Infeasible,
                    primal: Vec::new(),
                    objective: Rational::zero(),
                    dual: Vec::new(),
                    farkas_ray: ray,
                    primal_ray: Vec::new(),
                }
            }
            State::Unbounded(q) => {
                let mut ds = vec![Rational::zero(); self.kinds.len()];
                ds[*q] = Rational::one();
                for (r, &bv) in self.basis.iter().enumerate() {
                    ds[bv] = -&self.a[r][*q];
                }
                let primal = self.primal_from_basis();
                LpResult {
                    status: LpStatus::Unbounded,
                    objective: self.lp.objective_value(&primal),
                    primal,
                    dual: Vec::new(),
                    farkas_ray: Vec::new(),
                    primal_ray: self.map_to_original(&ds, false),
                }
            }
        };
        debug_assert!(res.primal.is_empty() || res.primal.len() == n);
        if audit::enabled() {
            audit::record(&self.lp, &res);
        }
        res
    }
}
