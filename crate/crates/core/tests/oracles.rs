//! Independent reimplementations checked against the library.

mod common;

use std::collections::VecDeque;

use proptest::prelude::*;
use rnd_core::flow::{check_metric_certificate, min_congestion, routable, Routability};
use rnd_core::gadgets::{compute_val, parse_dimacs, CnfFormula};
use rnd_core::model::{Commodity, Graph, Instance};
use rnd_core::rational::q;
use rnd_core::Rational;

/// Edmonds-Karp on an undirected integer graph.
fn max_flow(n: usize, edges: &[(usize, usize, i64)], s: usize, t: usize) -> i64 {
    let mut cap = vec![vec![0i64; n]; n];
    for &(a, b, c) in edges {
        cap[a][b] += c;
        cap[b][a] += c;
    }
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for w in 0..n {
                if prev[w] == usize::MAX && cap[v][w] > 0 {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = i64::MAX;
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        total += push;
    }
}

/// Max-3SAT by bit counting, independent of the library's enumeration.
fn brute_val(vars: usize, clauses: &[[i32; 3]]) -> (usize, usize) {
    let best = (0u32..1 << vars)
        .map(|bits| {
            clauses
                .iter()
                .filter(|c| {
                    c.iter().any(|&l| {
                        let on = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                        if l > 0 {
                            on
                        } else {
                            !on
                        }
                    })
                })
                .count()
        })
        .max()
        .unwrap();
    (best, clauses.len())
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (3usize..6).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 1i64..5).prop_filter("no loops", |(a, b, _)| a != b);
        (Just(n), prop::collection::vec(edge, 2..9))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_commodity_congestion_is_demand_over_max_flow(
        (n, edges) in graph_strategy(),
        demand in 1i64..7,
    ) {
        let mut g = Graph::new(n);
        for &(a, b, c) in &edges {
            g.add_edge(a, b, q(c, 1));
        }
        let comm = [Commodity::new(0, n - 1)];
        let mf = max_flow(n, &edges, 0, n - 1);
        let res = min_congestion(&g, &comm, &[q(demand, 1)]);
        if mf == 0 {
            prop_assert!(res.is_err());
        } else {
            let (beta, sol) = res.unwrap();
            prop_assert_eq!(&beta, &q(demand, mf));
            for (e, edge) in g.edges.iter().enumerate() {
                prop_assert!(sol.load(e) <= &beta * edge.capacity.finite().unwrap());
            }
            prop_assert_eq!(sol.net_outflow(&g, 0, 0), q(demand, 1));
            prop_assert_eq!(sol.net_outflow(&g, 0, n - 1), q(-demand, 1));
        }
    }

    #[test]
    fn routable_agrees_with_congestion(
        (n, edges) in graph_strategy(),
        demand in 1i64..7,
        scale in 1i64..4,
    ) {
        let mut g = Graph::new(n);
        for &(a, b, c) in &edges {
            g.add_edge(a, b, q(c, 1));
        }
        let comm = [Commodity::new(0, n - 1), Commodity::new(1, n - 2)];
        let d = [q(demand, 1), q(1, 1)];
        let Ok((beta, _)) = min_congestion(&g, &comm, &d) else { return Ok(()); };
        let u_at = |f: &Rational| g.edges.iter().map(|e| f * e.capacity.finite().unwrap()).collect::<Vec<_>>();
        let enough = u_at(&beta);
        prop_assert!(routable(&g, &comm, &d, &enough).unwrap().is_feasible());
        let short = u_at(&(&beta * &q(scale, scale + 1)));
        match routable(&g, &comm, &d, &short).unwrap() {
            Routability::Feasible(_) => prop_assert!(false, "routed below the optimum"),
            Routability::Infeasible(cert) => {
                prop_assert!(check_metric_certificate(&g, &comm, &d, &short, &cert));
                prop_assert!(cert.weights.iter().all(|w| *w <= Rational::one()));
            }
        }
    }

    #[test]
    fn val_matches_bit_counting(
        vars in 1usize..6,
        raw in prop::collection::vec(prop::array::uniform3((1i32..6, any::<bool>())), 1..6),
    ) {
        let clauses: Vec<[i32; 3]> = raw
            .iter()
            .map(|c| c.map(|(v, neg)| {
                let v = (v - 1) % vars as i32 + 1;
                if neg { -v } else { v }
            }))
            .collect();
        let phi = CnfFormula::new(vars, clauses.clone()).unwrap();
        let (best, m) = brute_val(vars, &clauses);
        prop_assert_eq!(compute_val(&phi).unwrap(), Rational::new(best as i64, m as i64));
        let text = phi.to_string();
        prop_assert_eq!(parse_dimacs(&text).unwrap(), phi);
    }
}

#[test]
fn corpus_json_round_trip() {
    for (name, inst) in common::instances() {
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst, "{name}");
        assert_eq!(back.to_json(), text, "{name}");
        assert!(rnd_core::model::validate(&back).is_empty(), "{name}");
    }
}

#[test]
fn two_disjoint_paths() {
    let edges = [(0, 1, 2), (1, 3, 2), (0, 2, 1), (2, 3, 3)];
    assert_eq!(max_flow(4, &edges, 0, 3), 3);
}
