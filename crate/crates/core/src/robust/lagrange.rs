//! Congestion through linear-cost oracles: the Lagrange cutting-plane loop.
//!
//! The master is `max β  s.t.  β ≤ λᵀu_k for every cut,  Σ λ_e c_e = 1,
//! λ ≥ 0` over finite edges. Each round asks the oracle for a reservation
//! at the master's `λ′` and adds it as a cut while `β′ > λ′ᵀu^{ap}(λ′)`.

use serde::{Deserialize, Serialize};

use super::dot;
use super::dynamic::LinDynamicSolver;
use crate::error::{Error, Result};
use crate::lp::{Bound, LinearProgram, LpStatus, ObjectiveSense, RowSense, Simplex};
use crate::model::Instance;
use crate::rational::Rational;

pub const DEFAULT_MAX_ITERS: usize = 1000;

/// Maps a cost vector to a reservation routing every demand, within a
/// known factor `alpha` of the optimal linear cost.
pub trait ReservationOracle {
    fn alpha(&self) -> Rational;
    fn reserve(&mut self, lambda: &[Rational]) -> Result<Vec<Rational>>;
}

/// The exact linear-cost solver, `alpha = 1`.
pub struct ExactOracle<'a> {
    solver: LinDynamicSolver<'a>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        Ok(ExactOracle {
            solver: LinDynamicSolver::new(inst)?,
        })
    }
}

impl ReservationOracle for ExactOracle<'_> {
    fn alpha(&self) -> Rational {
        Rational::one()
    }

    fn reserve(&mut self, lambda: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self.solver.solve(lambda)?.reservation)
    }
}

impl<O: ReservationOracle + ?Sized> ReservationOracle for &mut O {
    fn alpha(&self) -> Rational {
        (**self).alpha()
    }

    fn reserve(&mut self, lambda: &[Rational]) -> Result<Vec<Rational>> {
        (**self).reserve(lambda)
    }
}

/// Wraps an oracle and multiplies its reservations by `factor ≥ 1`.
pub struct ScaledOracle<O> {
    inner: O,
    factor: Rational,
}

impl<O: ReservationOracle> ScaledOracle<O> {
    pub fn new(inner: O, factor: Rational) -> Result<Self> {
        if factor < Rational::one() {
            return Err(Error::Malformed(format!("scaling factor {factor} is below 1")));
        }
        Ok(ScaledOracle { inner, factor })
    }
}

impl<O: ReservationOracle> ReservationOracle for ScaledOracle<O> {
    fn alpha(&self) -> Rational {
        &self.factor * &self.inner.alpha()
    }

    fn reserve(&mut self, lambda: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self.inner.reserve(lambda)?.iter().map(|u| u * &self.factor).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeIteration {
    pub lambda: Vec<Rational>,
    pub reservation: Vec<Rational>,
    pub master_value: Rational,
    pub oracle_value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangeTrace {
    /// Cost vector and reservation of the initial cut.
    pub seed_lambda: Vec<Rational>,
    pub seed_reservation: Vec<Rational>,
    pub iterations: Vec<LagrangeIteration>,
    pub beta_tilde: Rational,
    pub alpha: Rational,
}

/// `λ_e = 1 / Σ_f c_f` on finite edges, zero elsewhere.
pub fn uniform_lambda(inst: &Instance) -> Vec<Rational> {
    let total: Rational = inst.graph.edges.iter().filter_map(|e| e.capacity.finite()).sum();
    inst.graph
        .edges
        .iter()
        .map(|e| match e.capacity.finite() {
            Some(_) if total.is_positive() => total.recip(),
            _ => Rational::zero(),
        })
        .collect()
}

/// The master in dual form: `max -t  s.t.  Σ_k μ_k u_k ≤ t c` on finite
/// edges, `Σ μ_k = 1`, `μ ≥ 0`. A cut is one new column, so the simplex
/// warm-starts; `λ′` is read off the edge-row duals and `β′ = t`.
struct Master<'a> {
    inst: &'a Instance,
    finite: &'a [usize],
    simplex: Simplex,
    cuts: Vec<Vec<Rational>>,
}

impl<'a> Master<'a> {
    fn new(inst: &'a Instance, finite: &'a [usize], seed: Vec<Rational>) -> Result<Self> {
        // Variable 0 is t, variable 1 the seed cut's weight.
        let mut lp = LinearProgram::new(ObjectiveSense::Max, vec![-Rational::one()]);
        lp.bounds[0] = Bound::free();
        lp.add_var(Rational::zero(), Bound::nonneg());
        for &e in finite {
            let c = inst.graph.edges[e].capacity.finite().expect("finite edge").clone();
            let mut row = vec![(0, -c)];
            if !seed[e].is_zero() {
                row.push((1, seed[e].clone()));
            }
            lp.add_row(row, RowSense::Le, Rational::zero());
        }
        lp.add_row(vec![(1, Rational::one())], RowSense::Eq, Rational::one());
        Ok(Master {
            inst,
            finite,
            simplex: Simplex::new(lp)?,
            cuts: vec![seed],
        })
    }

    /// Only valid after `solve` reached an optimum.
    fn add_cut(&mut self, u: Vec<Rational>) -> Result<()> {
        let mut col: Vec<(usize, Rational)> = self
            .finite
            .iter()
            .enumerate()
            .filter(|(_, &e)| !u[e].is_zero())
            .map(|(k, &e)| (k, u[e].clone()))
            .collect();
        col.push((self.finite.len(), Rational::one()));
        self.simplex.add_column(Rational::zero(), col)?;
        self.cuts.push(u);
        Ok(())
    }

    /// `(β′, λ′)`, both rechecked against the primal form.
    fn solve(&mut self) -> Result<(Rational, Vec<Rational>)> {
        if self.simplex.solve()? != LpStatus::Optimal {
            return Err(Error::Unbounded("Lagrange master has no optimum".into()));
        }
        let beta = self.simplex.result().primal[0].clone();
        let duals = self.simplex.duals();
        let mut lambda = vec![Rational::zero(); self.inst.graph.edge_count()];
        for (k, &e) in self.finite.iter().enumerate() {
            lambda[e] = duals[k].clone();
        }
        let norm: Rational = self
            .finite
            .iter()
            .map(|&e| self.inst.graph.edges[e].capacity.finite().expect("finite edge") * &lambda[e])
            .sum();
        let floor = self.cuts.iter().map(|u| dot(&lambda, u)).min();
        if lambda.iter().any(Rational::is_negative) || norm != Rational::one() || floor.as_ref() != Some(&beta) {
            return Err(Error::Infeasible("Lagrange master duals fail the primal check".into()));
        }
        Ok((beta, lambda))
    }
}

/// Runs the cutting-plane loop and returns `β̃` with the full trace.
pub fn cong_lagrange(
    inst: &Instance,
    oracle: &mut dyn ReservationOracle,
    max_iters: usize,
) -> Result<(Rational, LagrangeTrace)> {
    let finite = inst.finite_edges();
    let alpha = oracle.alpha();
    let seed_lambda = uniform_lambda(inst);
    let mut trace = LagrangeTrace {
        seed_lambda: seed_lambda.clone(),
        seed_reservation: Vec::new(),
        iterations: Vec::new(),
        beta_tilde: Rational::zero(),
        alpha,
    };
    if finite.is_empty() {
        // No edge can be congested.
        return Ok((Rational::zero(), trace));
    }
    let seed = oracle.reserve(&seed_lambda)?;
    trace.seed_reservation = seed.clone();
    let mut master = Master::new(inst, &finite, seed)?;
    for _ in 0..max_iters {
        let (beta, lambda) = master.solve()?;
        let reservation = oracle.reserve(&lambda)?;
        let oracle_value = dot(&lambda, &reservation);
        let add = beta > oracle_value;
        trace.iterations.push(LagrangeIteration {
            lambda,
            reservation: reservation.clone(),
            master_value: beta.clone(),
            oracle_value,
        });
        if !add {
            trace.beta_tilde = beta.clone();
            return Ok((beta, trace));
        }
        master.add_cut(reservation)?;
    }
    Err(Error::IterationLimit {
        limit: max_iters,
        trace: Box::new(trace),
    })
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
    fn single_edge_exact() {
        let inst = single_edge(q(2, 1));
        let mut o = ExactOracle::new(&inst).unwrap();
        let (b, t) = cong_lagrange(&inst, &mut o, DEFAULT_MAX_ITERS).unwrap();
        assert_eq!(b, q(1, 2));
        assert!(t.iterations.len() <= 2);
    }

    #[test]
    fn single_edge_doubled() {
        let inst = single_edge(q(1, 1));
        let mut o = ScaledOracle::new(ExactOracle::new(&inst).unwrap(), q(2, 1)).unwrap();
        let (b, t) = cong_lagrange(&inst, &mut o, DEFAULT_MAX_ITERS).unwrap();
        assert!(b >= q(1, 1) && b <= q(2, 1));
        assert_eq!(t.alpha, q(2, 1));
    }

    #[test]
    fn iteration_cap_carries_trace() {
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
        let mut o = ExactOracle::new(&inst).unwrap();
        match cong_lagrange(&inst, &mut o, 0) {
            Err(Error::IterationLimit { limit: 0, trace }) => assert!(trace.iterations.is_empty()),
            other => panic!("expected iteration limit, got {other:?}"),
        }
    }

    #[test]
    fn master_value_never_increases() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, q(1, 1));
        g.add_edge(1, 2, q(2, 1));
        g.add_edge(0, 2, q(1, 1));
        g.add_edge(2, 3, q(3, 2));
        g.add_edge(1, 3, q(1, 1));
        let inst = Instance {
            graph: g,
            commodities: vec![Commodity::new(0, 3), Commodity::new(1, 2), Commodity::new(0, 2)],
            polytope: DemandPolytope::demand_box(3, &q(0, 1), &q(1, 1)),
            meta: Default::default(),
        };
        let mut o = ExactOracle::new(&inst).unwrap();
        let (b, t) = cong_lagrange(&inst, &mut o, DEFAULT_MAX_ITERS).unwrap();
        assert!(t.iterations.windows(2).all(|w| w[1].master_value <= w[0].master_value));
        let last = t.iterations.last().unwrap();
        assert!(last.master_value <= last.oracle_value);
        assert_eq!(b, crate::robust::cong_dynamic(&inst).unwrap().beta);
    }
}
