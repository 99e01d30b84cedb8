#![allow(dead_code)]

use monobn::gadgetgen::{random_network, RandomParams};
use monobn::{Network, NetworkDraft, Role};

/// Binary networks with at most 10 variables and 4 observables.
pub fn binary_params(seed: u64) -> RandomParams {
    let nodes = 3 + (seed % 8) as usize;
    let observables = 1 + ((seed / 8) as usize) % (nodes - 1).min(4);
    RandomParams { polytree: seed % 4 == 0, ..RandomParams::binary(nodes, observables) }
}

pub fn binary_corpus(count: u64) -> impl Iterator<Item = (u64, Network)> {
    (0..count).map(|seed| (seed, random_network(&binary_params(seed), seed).expect("feasible parameters")))
}

/// Networks with up to four values per variable.
pub fn multi_corpus(count: u64) -> impl Iterator<Item = (u64, Network)> {
    (0..count).map(|seed| {
        let nodes = 3 + (seed % 5) as usize;
        let params = RandomParams {
            nodes,
            max_parents: 2,
            min_values: 2,
            max_values: 4,
            observables: 1 + (seed as usize / 5) % (nodes - 1).min(3),
            polytree: seed % 3 == 0,
            monotone_bias: 0.8,
        };
        (seed, random_network(&params, 10_000 + seed).expect("feasible parameters"))
    })
}

/// `X2 -> Y -> C <- X1`: the direct influence of `X1` on `C` is ambiguous
/// but `Pr(c | x1) = 0.87 > Pr(c | not x1) = 0.56`. With `x2_observable`,
/// `Pr(y | X2)` ranges over 0.3 and 0.5.
pub fn incompleteness_fixture(x2_observable: bool) -> Network {
    let x2_role = if x2_observable { Role::Observable } else { Role::Intermediate };
    NetworkDraft::new()
        .var("X1", &["x1_0", "x1_1"])
        .var("X2", &["x2_0", "x2_1"])
        .var("Y", &["y0", "y1"])
        .var("C", &["c0", "c1"])
        .arc("X2", "Y")
        .arc("Y", "C")
        .arc("X1", "C")
        .role("X1", Role::Observable)
        .role("X2", x2_role)
        .role("Y", Role::Intermediate)
        .role("C", Role::Output)
        .cpt("X1", vec![vec![0.5, 0.5]])
        .cpt("X2", vec![vec![0.9, 0.1]])
        .cpt("Y", vec![vec![0.7, 0.3], vec![0.5, 0.5]])
        // rows (X1, Y): (0 0), (0 1), (1 0), (1 1)
        .cpt("C", vec![vec![0.6, 0.4], vec![0.1, 0.9], vec![0.05, 0.95], vec![0.3, 0.7]])
        .build()
        .unwrap()
}

/// Single observable `X` with a binary or ternary output.
pub fn x_to_c(rows: Vec<Vec<f64>>, c_values: &[&str]) -> Network {
    NetworkDraft::new()
        .var("X", &["x0", "x1"])
        .var("C", c_values)
        .arc("X", "C")
        .role("X", Role::Observable)
        .role("C", Role::Output)
        .cpt("X", vec![vec![0.5, 0.5]])
        .cpt("C", rows)
        .build()
        .unwrap()
}
