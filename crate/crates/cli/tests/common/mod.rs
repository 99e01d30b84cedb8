#![allow(dead_code)]

use std::path::PathBuf;

use monobn::gadgetgen::{random_network, RandomParams};
use monobn::Network;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Binary networks with at most 10 variables and 4 observables.
pub fn binary_params(seed: u64) -> RandomParams {
    let nodes = 3 + (seed % 8) as usize;
    let observables = 1 + ((seed / 8) as usize) % (nodes - 1).min(4);
    RandomParams { polytree: seed % 4 == 0, ..RandomParams::binary(nodes, observables) }
}

pub fn binary_corpus(count: u64) -> impl Iterator<Item = (u64, Network)> {
    (0..count).map(|seed| (seed, random_network(&binary_params(seed), seed).expect("feasible parameters")))
}

/// Runs the command line and returns (exit code, stdout, stderr).
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("monobn").chain(args.iter().copied());
    let code = monobn_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}
