//! Monotonicity checkers selectable by name.

use std::sync::Arc;

use crate::inference::{InferenceEngine, InferenceError, VariableElimination};
use crate::model::Network;
use crate::oracle::{self, Direction, OracleOptions, OracleVerdict, PairMode, Property};
use crate::qualitative::{self, ApproxReport};
use crate::registry::{Registry, Strategy};

#[derive(Clone)]
pub struct CheckRequest {
    pub direction: Direction,
    /// Refinement budget for approximate checkers.
    pub refine: usize,
    pub pairs: PairMode,
    pub engine: Arc<dyn InferenceEngine>,
}

impl Default for CheckRequest {
    fn default() -> Self {
        CheckRequest {
            direction: Direction::Isotone,
            refine: 0,
            pairs: PairMode::Covering,
            engine: Arc::new(VariableElimination::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckReport {
    Oracle(OracleVerdict),
    Approx(ApproxReport),
}

impl CheckReport {
    /// `Some(true)` if the report establishes the requested direction,
    /// `Some(false)` if it refutes it, `None` if it cannot tell.
    pub fn establishes(&self, direction: Direction) -> Option<bool> {
        match self {
            CheckReport::Oracle(v) => (v.direction == direction).then_some(v.holds),
            CheckReport::Approx(r) => r.verdict.claims(direction).then_some(true),
        }
    }
}

pub trait Checker: Strategy {
    fn check(&self, net: &Network, request: &CheckRequest) -> Result<CheckReport, InferenceError>;
}

/// Exact enumeration for one property.
#[derive(Debug, Clone, Copy)]
pub struct OracleChecker(pub Property);

impl Strategy for OracleChecker {
    fn name(&self) -> &str {
        match self.0 {
            Property::Mid => "oracle-mid",
            Property::Mim => "oracle-mim",
        }
    }

    fn summary(&self) -> &str {
        match self.0 {
            Property::Mid => "exact check of monotonicity in distribution (exponential)",
            Property::Mim => "exact check of monotonicity in mode (exponential)",
        }
    }
}

impl Checker for OracleChecker {
    fn check(&self, net: &Network, request: &CheckRequest) -> Result<CheckReport, InferenceError> {
        let options = OracleOptions { pairs: request.pairs, engine: request.engine.as_ref(), vary: None };
        oracle::decide(net, self.0, request.direction, &options).map(CheckReport::Oracle)
    }
}

/// Sign propagation with optional bound refinement.
#[derive(Debug, Clone, Copy, Default)]
pub struct QualitativeChecker;

impl Strategy for QualitativeChecker {
    fn name(&self) -> &str {
        "qualitative"
    }

    fn summary(&self) -> &str {
        "sound approximate check of monotonicity in distribution (polynomial without refinement)"
    }
}

impl Checker for QualitativeChecker {
    fn check(&self, net: &Network, request: &CheckRequest) -> Result<CheckReport, InferenceError> {
        qualitative::approx_verdict(net, request.refine).map(CheckReport::Approx)
    }
}

pub type CheckerRegistry = Registry<dyn Checker>;

pub fn default_checkers() -> CheckerRegistry {
    let mut reg = CheckerRegistry::new();
    reg.register(Arc::new(OracleChecker(Property::Mid)));
    reg.register(Arc::new(OracleChecker(Property::Mim)));
    reg.register(Arc::new(QualitativeChecker));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NetworkDraft, Role};

    #[test]
    fn checkers_agree_on_simple_chain() {
        let net = NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("C", &["c0", "c1"])
            .arc("X", "C")
            .role("X", Role::Observable)
            .role("C", Role::Output)
            .cpt("X", vec![vec![0.5, 0.5]])
            .cpt("C", vec![vec![0.7, 0.3], vec![0.2, 0.8]])
            .build()
            .unwrap();
        let reg = default_checkers();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["oracle-mid", "oracle-mim", "qualitative"]);
        let req = CheckRequest::default();
        for checker in reg.iter() {
            let report = checker.check(&net, &req).unwrap();
            assert_eq!(report.establishes(Direction::Isotone), Some(true), "{}", checker.name());
        }
        let anti = CheckRequest { direction: Direction::Antitone, ..CheckRequest::default() };
        let r = reg.get("oracle-mid").unwrap().check(&net, &anti).unwrap();
        assert_eq!(r.establishes(Direction::Antitone), Some(false));
    }
}
