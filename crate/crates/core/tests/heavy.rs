//! Lagrange duality and static/dynamic checks on the instances too large
//! for the default gate. Run with
//! `cargo test --test heavy -- --ignored --nocapture`.

mod common;

use std::time::Instant;

use common::{instances, SOLVER_EDGE_CAP};
use rnd_core::harness::{check_lagrange_against, check_static_against, default_alphas};
use rnd_core::robust::cong_dynamic;

#[test]
#[ignore = "takes about an hour"]
fn heavy_corpus() {
    let mut failures = Vec::new();
    for (name, inst) in instances() {
        if inst.graph.edge_count() <= SOLVER_EDGE_CAP {
            continue;
        }
        let t = Instant::now();
        let beta = cong_dynamic(&inst).unwrap().beta;
        println!("{name}: cong_dynamic {beta} ({:.1}s)", t.elapsed().as_secs_f64());
        let t = Instant::now();
        match check_lagrange_against(&inst, &beta, &default_alphas()) {
            Ok(r) => {
                for run in &r.runs {
                    println!(
                        "{name}: alpha {} beta_tilde {} after {} iterations, pass {}",
                        run.alpha, run.beta_tilde, run.iterations, run.pass
                    );
                    if !run.pass {
                        failures.push(format!("{name} alpha {}", run.alpha));
                    }
                }
                println!("{name}: {:.1}s", t.elapsed().as_secs_f64());
            }
            Err(e) => {
                println!("{name}: error {e}");
                failures.push(format!("{name}: {e}"));
            }
        }
        let t = Instant::now();
        match check_static_against(&inst, &beta) {
            Ok(r) => {
                println!(
                    "{name}: cong_static {} lin_dynamic {} pass {} ({:.1}s)",
                    r.cong_static,
                    r.lin_dynamic,
                    r.pass,
                    t.elapsed().as_secs_f64()
                );
                if !r.pass {
                    failures.push(format!("{name} static"));
                }
            }
            Err(e) => {
                println!("{name}: static error {e}");
                failures.push(format!("{name} static: {e}"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}
