//! Monotonicity verification for discrete Bayesian networks.
//!
//! A network is isotone in distribution when raising the observed values
//! never makes higher output values less likely (first-order stochastic
//! dominance of the output posterior), and isotone in mode when it never
//! lowers the most probable output value. This crate decides both exactly on
//! small networks ([`oracle`]) and approximates the first one soundly through
//! qualitative sign propagation ([`qualitative`]).

pub mod checker;
pub mod gadgetgen;
pub mod inference;
pub mod mbn;
pub mod model;
pub mod oracle;
pub mod qualitative;
pub mod registry;

pub use checker::{default_checkers, CheckReport, Checker, CheckerRegistry};
pub use inference::{default_engines, Distribution, EngineRegistry, InferenceEngine, InferenceError};
pub use model::{Assignment, ModelError, Network, NetworkDraft, Role, VarId, Variable};
pub use oracle::{decide_mid, decide_mim, Direction, OracleVerdict, Property};
pub use qualitative::{approx_verdict, ApproxReport, Sign, Verdict};
