//! Exact monotonicity decisions by enumeration over observable assignments.
//!
//! Posteriors over the output are computed once per observable assignment;
//! the order relation is then checked on covering pairs (one variable raised
//! one step), or on every comparable pair when asked to.

use std::fmt;

use crate::inference::{Distribution, InferenceEngine, InferenceError, VariableElimination};
use crate::model::{compare_assignments, Assignment, Assignments, Network, OrderRelation, VarId, PROB_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// Monotone in distribution (stochastic dominance of posteriors).
    Mid,
    /// Monotone in mode (lowest-tie mode of posteriors).
    Mim,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Mid => "mid",
            Property::Mim => "mim",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Isotone,
    Antitone,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Isotone => "isotone",
            Direction::Antitone => "antitone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    #[default]
    Covering,
    AllPairs,
}

/// `q` dominates `p` when `q`'s CDF lies at or below `p`'s everywhere.
pub fn dominates(q: &Distribution, p: &Distribution) -> Result<bool, InferenceError> {
    if q.len() != p.len() || q.variable() != p.variable() {
        return Err(InferenceError::DistributionMismatch);
    }
    Ok(q.cdf().iter().zip(p.cdf()).all(|(fq, fp)| *fq <= fp + PROB_TOLERANCE))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// First output value where the CDF inequality fails.
    Cdf { index: usize, lower_cdf: f64, upper_cdf: f64 },
    /// The two modes, at the lower and the upper assignment.
    Mode { lower: usize, upper: usize },
}

/// A pair `lower ⪯ upper` that violates the property.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub lower: Assignment,
    pub upper: Assignment,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub property: Property,
    pub direction: Direction,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Observable assignments with probability zero; they take part in no pair.
    pub skipped: Vec<Assignment>,
    pub pairs_checked: usize,
    pub pair_mode: PairMode,
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: holds: {}", self.property.as_str(), self.direction.as_str(), self.holds)?;
        if !self.skipped.is_empty() {
            write!(f, " (with {} unobservable assignments skipped)", self.skipped.len())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
pub struct OracleOptions<'a> {
    pub pairs: PairMode,
    pub engine: &'a dyn InferenceEngine,
    /// Only consider pairs that differ in this variable alone.
    pub vary: Option<VarId>,
}

static DEFAULT_ENGINE: VariableElimination = VariableElimination::new(crate::inference::EliminationOrder::MinDegree);

impl Default for OracleOptions<'_> {
    fn default() -> Self {
        OracleOptions { pairs: PairMode::Covering, engine: &DEFAULT_ENGINE, vary: None }
    }
}

pub fn decide_mid(net: &Network, direction: Direction) -> Result<OracleVerdict, InferenceError> {
    decide(net, Property::Mid, direction, &OracleOptions::default())
}

pub fn decide_mim(net: &Network, direction: Direction) -> Result<OracleVerdict, InferenceError> {
    decide(net, Property::Mim, direction, &OracleOptions::default())
}

/// Posterior over the output for every observable assignment, in canonical
/// order; `None` marks zero-probability assignments.
pub fn output_table(
    net: &Network,
    engine: &dyn InferenceEngine,
) -> Result<Vec<(Assignment, Option<Distribution>)>, InferenceError> {
    let output = net.output();
    Assignments::new(net, &net.observables())
        .map(|x| match engine.posterior(net, &x, output) {
            Ok(d) => Ok((x, Some(d))),
            Err(InferenceError::ZeroEvidence) => Ok((x, None)),
            Err(e) => Err(e),
        })
        .collect()
}

fn check_pair(property: Property, direction: Direction, lower: &Distribution, upper: &Distribution) -> Option<Witness> {
    match property {
        Property::Mid => {
            let (fl, fu) = (lower.cdf(), upper.cdf());
            fl.iter().zip(&fu).enumerate().find_map(|(i, (&l, &u))| {
                let bad = match direction {
                    Direction::Isotone => u > l + PROB_TOLERANCE,
                    Direction::Antitone => l > u + PROB_TOLERANCE,
                };
                bad.then_some(Witness::Cdf { index: i, lower_cdf: l, upper_cdf: u })
            })
        }
        Property::Mim => {
            let (ml, mu) = (lower.mode(), upper.mode());
            let bad = match direction {
                Direction::Isotone => ml > mu,
                Direction::Antitone => ml < mu,
            };
            bad.then_some(Witness::Mode { lower: ml, upper: mu })
        }
    }
}

pub fn decide(
    net: &Network,
    property: Property,
    direction: Direction,
    options: &OracleOptions<'_>,
) -> Result<OracleVerdict, InferenceError> {
    let table = output_table(net, options.engine)?;
    let skipped: Vec<Assignment> =
        table.iter().filter(|(_, d)| d.is_none()).map(|(x, _)| x.clone()).collect();

    // Covering pairs generate the order only when every assignment takes
    // part; otherwise fall back to all comparable pairs among the rest.
    let pair_mode = if skipped.is_empty() { options.pairs } else { PairMode::AllPairs };

    let observables = net.observables();
    let mut strides = vec![1usize; observables.len()];
    for i in (0..observables.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * net.cardinality(observables[i + 1]);
    }

    let mut pairs_checked = 0;
    let mut counterexample = None;
    'outer: for (i, (x, dx)) in table.iter().enumerate() {
        let Some(dx) = dx else { continue };
        let candidates: Vec<usize> = match pair_mode {
            PairMode::Covering => x
                .iter()
                .enumerate()
                .filter(|&(_, (v, value))| {
                    value + 1 < net.cardinality(v) && options.vary.map_or(true, |w| w == v)
                })
                .map(|(slot, _)| i + strides[slot])
                .collect(),
            PairMode::AllPairs => (0..table.len())
                .filter(|&k| {
                    k != i
                        && compare_assignments(x, &table[k].0) == Ok(OrderRelation::LessEq)
                        && options.vary.map_or(true, |w| {
                            x.iter().zip(table[k].0.iter()).all(|((v, a), (_, b))| v == w || a == b)
                        })
                })
                .collect(),
        };
        for k in candidates {
            let (y, dy) = &table[k];
            let Some(dy) = dy else { continue };
            pairs_checked += 1;
            if let Some(witness) = check_pair(property, direction, dx, dy) {
                counterexample = Some(Counterexample { lower: x.clone(), upper: y.clone(), witness });
                break 'outer;
            }
        }
    }

    Ok(OracleVerdict {
        property,
        direction,
        holds: counterexample.is_none(),
        counterexample,
        skipped,
        pairs_checked,
        pair_mode,
    })
}
