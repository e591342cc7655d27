//! Instance generators: the `G_γ` family, the two-path gadget and hose sets.

pub mod cnf;
pub mod gamma;
pub mod hose;
pub mod two_path;

pub use cnf::{compute_val, parse_dimacs, CnfFormula};
pub use gamma::{build_gamma, gen_gamma, gen_gamma1, gen_recursive, GammaLayout};
pub use hose::gen_hose;
pub use two_path::gen_two_path;

/// Largest vertex-hint list a generator will emit.
pub const HINT_BUDGET: usize = 20_000;

/// Closed-form sizes of `G_γ` for `m` clauses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaSizes {
    pub nodes: u128,
    pub edges: u128,
    pub commodities: u128,
    pub max_degree: u128,
}

pub fn gamma_sizes(m: u128, gamma: u32) -> GammaSizes {
    let k = 3 * m;
    let mut commodities = 1 + k;
    for _ in 1..gamma {
        commodities = 1 + k * commodities;
    }
    GammaSizes {
        nodes: 2 + 2 * m * (k.pow(gamma) - 1) / (k - 1),
        edges: k.pow(gamma),
        commodities,
        max_degree: m.pow(gamma),
    }
}
