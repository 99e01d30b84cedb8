//! Exact inference: chain-rule joint probabilities, posteriors over a single
//! target by variable elimination or exhaustive enumeration, and the
//! cumulative distribution and lowest-tie mode of a posterior.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{Assignment, Assignments, ModelError, Network, VarId, PROB_TOLERANCE};
use crate::registry::{Registry, Strategy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("evidence has probability zero; posterior undefined")]
    ZeroEvidence,
    #[error("assignment does not bind variable `{0}`")]
    PartialAssignment(String),
    #[error("target `{0}` is part of the evidence")]
    TargetInEvidence(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("distributions over different variables or lengths")]
    DistributionMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A probability vector over one variable's ordered values.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    variable: VarId,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(variable: VarId, probs: Vec<f64>) -> Result<Self, InferenceError> {
        if probs.is_empty() {
            return Err(InferenceError::InvalidDistribution("no entries".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(InferenceError::InvalidDistribution(format!("entry {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(InferenceError::InvalidDistribution(format!("sum {sum}")));
        }
        Ok(Distribution { variable, probs })
    }

    pub fn variable(&self) -> VarId {
        self.variable
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `F(v) = Pr(V <= v)` for every value, lowest first.
    pub fn cdf(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Index of the most probable value; ties (within tolerance) go to the
    /// lowest value.
    pub fn mode(&self) -> usize {
        let max = self.probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.probs
            .iter()
            .position(|&p| p >= max - PROB_TOLERANCE)
            .expect("distribution is nonempty")
    }
}

/// A nonnegative table over the joint assignments of a scope.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    /// `scope` must be sorted and `table` laid out in canonical order.
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, table: Vec<f64>) -> Self {
        assert!(scope.windows(2).all(|w| w[0] < w[1]), "factor scope must be sorted");
        assert_eq!(scope.len(), cards.len());
        assert_eq!(table.len(), cards.iter().product::<usize>());
        Factor { scope, cards, table }
    }

    pub fn scalar(value: f64) -> Self {
        Factor { scope: Vec::new(), cards: Vec::new(), table: vec![value] }
    }

    /// The conditional distribution of `var` given its parents.
    pub fn from_cpt(net: &Network, var: VarId) -> Self {
        let mut scope = net.parents(var).to_vec();
        scope.push(var);
        scope.sort();
        let cards: Vec<usize> = scope.iter().map(|&v| net.cardinality(v)).collect();
        let mut dense = vec![0; net.len()];
        let table = Assignments::new(net, &scope)
            .map(|a| {
                for (v, value) in a.iter() {
                    dense[v.0] = value;
                }
                net.cpt_row(var, &dense)[dense[var.0]]
            })
            .collect();
        Factor { scope, cards, table }
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.scope.len()];
        for i in (0..self.scope.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        strides
    }

    /// Stride of each variable of `scope` within this factor (0 if absent).
    fn strides_in(&self, scope: &[VarId]) -> Vec<usize> {
        let own = self.strides();
        scope
            .iter()
            .map(|v| self.scope.iter().position(|s| s == v).map_or(0, |i| own[i]))
            .collect()
    }

    /// Fixes the variables bound in `evidence` and drops them from the scope.
    pub fn reduce(&self, evidence: &Assignment) -> Factor {
        let keep: Vec<usize> = (0..self.scope.len()).filter(|&i| !evidence.contains(self.scope[i])).collect();
        if keep.len() == self.scope.len() {
            return self.clone();
        }
        let strides = self.strides();
        let base: usize = (0..self.scope.len())
            .filter_map(|i| evidence.get(self.scope[i]).map(|value| value * strides[i]))
            .sum();
        let scope: Vec<VarId> = keep.iter().map(|&i| self.scope[i]).collect();
        let cards: Vec<usize> = keep.iter().map(|&i| self.cards[i]).collect();
        let kept_strides: Vec<usize> = keep.iter().map(|&i| strides[i]).collect();
        let table = walk(&cards, &[&kept_strides])
            .map(|idx| self.table[base + idx[0]])
            .collect();
        Factor { scope, cards, table }
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let scope: Vec<VarId> = self
            .scope
            .iter()
            .chain(&other.scope)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cards: Vec<usize> = scope
            .iter()
            .map(|v| {
                self.scope
                    .iter()
                    .position(|s| s == v)
                    .map(|i| self.cards[i])
                    .unwrap_or_else(|| other.cards[other.scope.iter().position(|s| s == v).unwrap()])
            })
            .collect();
        let a = self.strides_in(&scope);
        let b = other.strides_in(&scope);
        let table = walk(&cards, &[&a, &b])
            .map(|idx| self.table[idx[0]] * other.table[idx[1]])
            .collect();
        Factor { scope, cards, table }
    }

    pub fn sum_out(&self, var: VarId) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        let card = cards.remove(pos);
        let own = self.strides();
        let step = own[pos];
        let mut rest = own.clone();
        rest.remove(pos);
        let table = walk(&cards, &[&rest])
            .map(|idx| (0..card).map(|k| self.table[idx[0] + k * step]).sum())
            .collect();
        Factor { scope, cards, table }
    }

    fn total(&self) -> f64 {
        self.table.iter().sum()
    }
}

/// Walks a mixed-radix counter over `cards` (last digit fastest) and yields,
/// for each step, the linear offset under each stride vector.
fn walk<'a>(cards: &'a [usize], strides: &'a [&'a [usize]]) -> impl Iterator<Item = Vec<usize>> + 'a {
    let total: usize = cards.iter().product();
    let mut digits = vec![0usize; cards.len()];
    let mut offsets = vec![0usize; strides.len()];
    (0..total).map(move |step| {
        if step > 0 {
            for i in (0..cards.len()).rev() {
                digits[i] += 1;
                for (o, s) in offsets.iter_mut().zip(strides) {
                    *o += s[i];
                }
                if digits[i] < cards[i] {
                    break;
                }
                for (o, s) in offsets.iter_mut().zip(strides) {
                    *o -= s[i] * cards[i];
                }
                digits[i] = 0;
            }
        }
        offsets.clone()
    })
}

/// Chain-rule probability of a full assignment.
pub fn joint_probability(net: &Network, x: &Assignment) -> Result<f64, InferenceError> {
    net.check_assignment(x)?;
    let mut dense = vec![0; net.len()];
    for v in net.ids() {
        dense[v.0] = x
            .get(v)
            .ok_or_else(|| InferenceError::PartialAssignment(net.name(v).to_string()))?;
    }
    Ok(dense_joint(net, &dense))
}

fn dense_joint(net: &Network, dense: &[usize]) -> f64 {
    let mut p = 1.0;
    for &v in net.topological_order() {
        p *= net.cpt_row(v, dense)[dense[v.0]];
        if p == 0.0 {
            break;
        }
    }
    p
}

fn check_query(net: &Network, evidence: &Assignment, target: VarId) -> Result<(), InferenceError> {
    net.check_assignment(evidence)?;
    if target.0 >= net.len() {
        return Err(ModelError::UnknownVariable(target.to_string()).into());
    }
    if evidence.contains(target) {
        return Err(InferenceError::TargetInEvidence(net.name(target).to_string()));
    }
    Ok(())
}

fn normalized(target: VarId, mut probs: Vec<f64>) -> Result<Distribution, InferenceError> {
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(InferenceError::ZeroEvidence);
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(Distribution { variable: target, probs })
}

/// Computes `Pr(target | evidence)`.
pub trait InferenceEngine: Strategy {
    fn posterior(&self, net: &Network, evidence: &Assignment, target: VarId) -> Result<Distribution, InferenceError>;
}

/// Elimination ordering used by [`VariableElimination`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationOrder {
    /// Greedy: the variable with the fewest neighbours in the current factor set.
    MinDegree,
    Declaration,
    ReverseDeclaration,
}

#[derive(Debug, Clone, Copy)]
pub struct VariableElimination {
    pub order: EliminationOrder,
}

impl VariableElimination {
    pub const fn new(order: EliminationOrder) -> Self {
        VariableElimination { order }
    }

    fn pick(&self, hidden: &BTreeSet<VarId>, factors: &[Factor]) -> VarId {
        match self.order {
            EliminationOrder::Declaration => *hidden.iter().next().unwrap(),
            EliminationOrder::ReverseDeclaration => *hidden.iter().next_back().unwrap(),
            EliminationOrder::MinDegree => *hidden
                .iter()
                .min_by_key(|&&v| {
                    factors
                        .iter()
                        .filter(|f| f.scope.contains(&v))
                        .flat_map(|f| f.scope.iter().copied())
                        .filter(|&u| u != v)
                        .collect::<BTreeSet<_>>()
                        .len()
                })
                .unwrap(),
        }
    }
}

impl Default for VariableElimination {
    fn default() -> Self {
        VariableElimination::new(EliminationOrder::MinDegree)
    }
}

impl Strategy for VariableElimination {
    fn name(&self) -> &str {
        match self.order {
            EliminationOrder::MinDegree => "ve",
            EliminationOrder::Declaration => "ve-declaration",
            EliminationOrder::ReverseDeclaration => "ve-reverse",
        }
    }

    fn summary(&self) -> &str {
        match self.order {
            EliminationOrder::MinDegree => "variable elimination, min-degree ordering",
            EliminationOrder::Declaration => "variable elimination in declaration order",
            EliminationOrder::ReverseDeclaration => "variable elimination in reverse declaration order",
        }
    }
}

impl InferenceEngine for VariableElimination {
    fn posterior(&self, net: &Network, evidence: &Assignment, target: VarId) -> Result<Distribution, InferenceError> {
        check_query(net, evidence, target)?;

        // Variables that are not ancestors of the query are barren and sum to one.
        let mut relevant: BTreeSet<VarId> = net.ancestors(target);
        relevant.insert(target);
        for &v in evidence.scope() {
            relevant.insert(v);
            relevant.extend(net.ancestors(v));
        }

        let mut factors: Vec<Factor> =
            relevant.iter().map(|&v| Factor::from_cpt(net, v).reduce(evidence)).collect();
        let mut hidden: BTreeSet<VarId> =
            relevant.iter().copied().filter(|&v| v != target && !evidence.contains(v)).collect();

        while !hidden.is_empty() {
            let v = self.pick(&hidden, &factors);
            hidden.remove(&v);
            let (with, without): (Vec<Factor>, Vec<Factor>) =
                factors.into_iter().partition(|f| f.scope.contains(&v));
            factors = without;
            let merged = with.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
            factors.push(merged.sum_out(v));
        }

        let result = factors.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        debug_assert_eq!(result.scope, vec![target]);
        if result.total() <= 0.0 {
            return Err(InferenceError::ZeroEvidence);
        }
        normalized(target, result.table)
    }
}

/// Sums the joint over every full assignment consistent with the evidence.
#[derive(Debug, Clone, Copy, Default)]
pub struct Enumeration;

impl Strategy for Enumeration {
    fn name(&self) -> &str {
        "enumeration"
    }

    fn summary(&self) -> &str {
        "exhaustive joint enumeration (exponential; reference oracle)"
    }
}

impl InferenceEngine for Enumeration {
    fn posterior(&self, net: &Network, evidence: &Assignment, target: VarId) -> Result<Distribution, InferenceError> {
        check_query(net, evidence, target)?;
        let free: Vec<VarId> = net.ids().filter(|&v| !evidence.contains(v)).collect();
        let mut dense = vec![0; net.len()];
        for (v, value) in evidence.iter() {
            dense[v.0] = value;
        }
        let mut probs = vec![0.0; net.cardinality(target)];
        for a in Assignments::new(net, &free) {
            for (v, value) in a.iter() {
                dense[v.0] = value;
            }
            probs[dense[target.0]] += dense_joint(net, &dense);
        }
        normalized(target, probs)
    }
}

/// Posterior by variable elimination with the min-degree heuristic.
pub fn posterior(net: &Network, evidence: &Assignment, target: VarId) -> Result<Distribution, InferenceError> {
    VariableElimination::default().posterior(net, evidence, target)
}

pub type EngineRegistry = Registry<dyn InferenceEngine>;

/// All built-in engines, keyed by name.
pub fn default_engines() -> EngineRegistry {
    let mut reg = EngineRegistry::new();
    reg.register(Arc::new(VariableElimination::new(EliminationOrder::MinDegree)));
    reg.register(Arc::new(VariableElimination::new(EliminationOrder::Declaration)));
    reg.register(Arc::new(VariableElimination::new(EliminationOrder::ReverseDeclaration)));
    reg.register(Arc::new(Enumeration));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NetworkDraft, Role};

    fn x_to_e() -> Network {
        NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("E", &["e0", "e1"])
            .arc("X", "E")
            .role("X", Role::Observable)
            .role("E", Role::Output)
            .cpt("X", vec![vec![0.5, 0.5]])
            .cpt("E", vec![vec![0.7, 0.3], vec![0.4, 0.6]])
            .build()
            .unwrap()
    }

    #[test]
    fn joint_single_node() {
        let net = NetworkDraft::new()
            .var("V", &["v0", "v1"])
            .role("V", Role::Observable)
            .var("C", &["c0", "c1"])
            .role("C", Role::Output)
            .cpt("V", vec![vec![0.3, 0.7]])
            .cpt("C", vec![vec![0.5, 0.5]])
            .build()
            .unwrap();
        let x = net.assignment(&[("V", "v1"), ("C", "c0")]).unwrap();
        assert!((joint_probability(&net, &x).unwrap() - 0.35).abs() < 1e-12);
        let single = net.assignment(&[("V", "v1")]).unwrap();
        assert_eq!(
            joint_probability(&net, &single),
            Err(InferenceError::PartialAssignment("C".into()))
        );
    }

    #[test]
    fn joint_chain() {
        let net = x_to_e();
        let x = net.assignment(&[("X", "x1"), ("E", "e1")]).unwrap();
        assert!((joint_probability(&net, &x).unwrap() - 0.30).abs() < 1e-12);
    }

    #[test]
    fn joint_zero_entry() {
        let net = NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("C", &["c0", "c1"])
            .arc("X", "C")
            .role("X", Role::Observable)
            .role("C", Role::Output)
            .cpt("X", vec![vec![0.5, 0.5]])
            .cpt("C", vec![vec![1.0, 0.0], vec![0.4, 0.6]])
            .build()
            .unwrap();
        let x = net.assignment(&[("X", "x0"), ("C", "c1")]).unwrap();
        assert_eq!(joint_probability(&net, &x).unwrap(), 0.0);
        let ev = net.assignment(&[("C", "c1")]).unwrap();
        let post = posterior(&net, &ev, net.require_id("X").unwrap()).unwrap();
        assert_eq!(post.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn prior_recovery() {
        let net = NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("C", &["c0", "c1"])
            .role("X", Role::Observable)
            .role("C", Role::Output)
            .cpt("X", vec![vec![0.5, 0.5]])
            .cpt("C", vec![vec![0.25, 0.75]])
            .build()
            .unwrap();
        let post = posterior(&net, &Assignment::empty(), net.output()).unwrap();
        assert_eq!(post.probs(), &[0.25, 0.75]);
    }

    #[test]
    fn zero_evidence_is_an_error() {
        let net = NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("C", &["c0", "c1"])
            .arc("X", "C")
            .role("X", Role::Observable)
            .role("C", Role::Output)
            .cpt("X", vec![vec![1.0, 0.0]])
            .cpt("C", vec![vec![0.5, 0.5], vec![0.4, 0.6]])
            .build()
            .unwrap();
        let ev = net.assignment(&[("X", "x1")]).unwrap();
        for engine in default_engines().iter() {
            assert_eq!(
                engine.posterior(&net, &ev, net.output()),
                Err(InferenceError::ZeroEvidence),
                "{}",
                engine.name()
            );
        }
    }

    #[test]
    fn target_in_evidence_is_an_error() {
        let net = x_to_e();
        let ev = net.assignment(&[("E", "e1")]).unwrap();
        assert!(matches!(
            posterior(&net, &ev, net.output()),
            Err(InferenceError::TargetInEvidence(_))
        ));
    }

    #[test]
    fn diagnostic_posterior_matches_bayes_rule() {
        let net = x_to_e();
        let ev = net.assignment(&[("E", "e1")]).unwrap();
        let post = posterior(&net, &ev, VarId(0)).unwrap();
        // 0.5*0.3 : 0.5*0.6
        assert!((post.probs()[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_examples() {
        let d = Distribution::new(VarId(0), vec![0.25, 0.35, 0.4]).unwrap();
        let f = d.cdf();
        assert!((f[0] - 0.25).abs() < 1e-9 && (f[1] - 0.60).abs() < 1e-9 && (f[2] - 1.0).abs() < 1e-9);
        let d = Distribution::new(VarId(0), vec![0.0, 0.55, 0.45]).unwrap();
        let f = d.cdf();
        assert!(f[0] == 0.0 && (f[1] - 0.55).abs() < 1e-9 && (f[2] - 1.0).abs() < 1e-9);
        let d = Distribution::new(VarId(0), vec![1.0, 0.0]).unwrap();
        assert_eq!(d.cdf(), vec![1.0, 1.0]);
    }

    #[test]
    fn mode_examples() {
        let mode = |p: Vec<f64>| Distribution::new(VarId(0), p).unwrap().mode();
        assert_eq!(mode(vec![0.25, 0.35, 0.4]), 2);
        assert_eq!(mode(vec![0.0, 0.55, 0.45]), 1);
        assert_eq!(mode(vec![0.5, 0.5]), 0);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(VarId(0), vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(VarId(0), vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(VarId(0), vec![]).is_err());
    }

    #[test]
    fn factor_ops() {
        // f(A,B) over binary A, B; table in canonical order (B fastest).
        let f = Factor::new(vec![VarId(0), VarId(1)], vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f.sum_out(VarId(0)).table(), &[4.0, 6.0]);
        assert_eq!(f.sum_out(VarId(1)).table(), &[3.0, 7.0]);
        let reduced = f.reduce(&Assignment::new([(VarId(1), 1)]));
        assert_eq!(reduced.scope(), &[VarId(0)]);
        assert_eq!(reduced.table(), &[2.0, 4.0]);
        let g = Factor::new(vec![VarId(1), VarId(2)], vec![2, 3], vec![1.0, 0.0, 2.0, 0.5, 1.0, 1.5]);
        let h = f.product(&g);
        assert_eq!(h.scope(), &[VarId(0), VarId(1), VarId(2)]);
        // h(a1, b1, c2) = f(a1,b1) * g(b1,c2) = 4 * 1.5
        assert_eq!(h.table()[3 * 2 + 1 * 3 + 2], 6.0);
        // h(a0, b0, c2) = 1 * 2
        assert_eq!(h.table()[2], 2.0);
    }

    #[test]
    fn registry_has_all_engines() {
        let reg = default_engines();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, vec!["enumeration", "ve", "ve-declaration", "ve-reverse"]);
    }
}
