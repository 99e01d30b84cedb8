//! The mode-monotonicity hardness gadget, the conditional threshold check it
//! reduces from, and seeded random networks for property tests.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::inference::{posterior, InferenceError};
use crate::model::{Assignment, Assignments, ModelError, Network, NetworkDraft, Role, Variable};

/// Suffix appended to the three gadget variables.
pub const GADGET_SUFFIX: &str = "_gadget";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GadgetError {
    #[error("threshold p = {0} outside [0, 1/2); the gadget requires p < 1/2 so that Pr(a | not e) is a probability")]
    Threshold(f64),
    #[error("evidence variable `{0}` must not be observable")]
    EvidenceObservable(String),
    #[error("evidence variable `{0}` must be binary")]
    EvidenceNotBinary(String),
    #[error("gadget variable name `{0}` already used in the base network")]
    NameCollision(String),
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

#[derive(Debug, Clone)]
pub struct GadgetSpec {
    pub base: Network,
    pub evidence: String,
    pub evidence_value: String,
    pub threshold: f64,
}

/// Names of the variables added by [`build_gadget`].
pub fn gadget_names() -> [String; 3] {
    ["A", "B", "C"].map(|n| format!("{n}{GADGET_SUFFIX}"))
}

/// `Pr(a | not e)` in the gadget for threshold `p`.
pub fn gadget_activation(p: f64) -> f64 {
    (0.5 - p) / (1.0 - p)
}

/// Extends the base network with `E -> A`, `A -> C`, `B -> C`: `A` is
/// certain under `e` and has probability `(1/2 - p)/(1 - p)` otherwise, `B`
/// is a uniform observable, and `C` (the new output) is on exactly when `A`
/// is on and `B` is off.
pub fn build_gadget(spec: &GadgetSpec) -> Result<Network, GadgetError> {
    let p = spec.threshold;
    if !(0.0..0.5).contains(&p) {
        return Err(GadgetError::Threshold(p));
    }
    let base = &spec.base;
    let e = base.require_id(&spec.evidence)?;
    if base.role(e) == Role::Observable {
        return Err(GadgetError::EvidenceObservable(spec.evidence.clone()));
    }
    if base.cardinality(e) != 2 {
        return Err(GadgetError::EvidenceNotBinary(spec.evidence.clone()));
    }
    let observed = base.value_index(e, &spec.evidence_value)?;
    let [a, b, c] = gadget_names();
    for name in [&a, &b, &c] {
        if base.id(name).is_some() {
            return Err(GadgetError::NameCollision(name.clone()));
        }
    }

    let mut draft = base.to_draft();
    for (_, role) in draft.roles.iter_mut() {
        if *role == Role::Output {
            *role = Role::Intermediate;
        }
    }
    let on = gadget_activation(p);
    let a_rows = (0..2)
        .map(|k| if k == observed { vec![0.0, 1.0] } else { vec![1.0 - on, on] })
        .collect();
    draft.variables.push(Variable::new(a.as_str(), ["a0", "a1"]));
    draft.variables.push(Variable::new(b.as_str(), ["b0", "b1"]));
    draft.variables.push(Variable::new(c.as_str(), ["c0", "c1"]));
    let draft = draft
        .arc(&spec.evidence, &a)
        .arc(&a, &c)
        .arc(&b, &c)
        .role(&a, Role::Intermediate)
        .role(&b, Role::Observable)
        .role(&c, Role::Output)
        .cpt(&a, a_rows)
        .cpt(&b, vec![vec![0.5, 0.5]])
        // rows (A, B): (a0 b0), (a0 b1), (a1 b0), (a1 b1)
        .cpt(&c, vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
    Ok(draft.build()?)
}

/// Searches the observable assignments for one with `Pr(e | x) > p`.
/// Zero-probability assignments are skipped.
pub fn condmap_exceeds(
    net: &Network,
    evidence: &str,
    value: &str,
    p: f64,
) -> Result<Option<Assignment>, GadgetError> {
    let e = net.require_id(evidence)?;
    if net.role(e) == Role::Observable {
        return Err(GadgetError::EvidenceObservable(evidence.to_string()));
    }
    let k = net.value_index(e, value)?;
    for x in Assignments::new(net, &net.observables()) {
        match posterior(net, &x, e) {
            Ok(d) if d.probs()[k] > p => return Ok(Some(x)),
            Ok(_) | Err(InferenceError::ZeroEvidence) => {}
            Err(err) => return Err(err.into()),
        }
    }
    Ok(None)
}

/// Parameters for [`random_network`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub nodes: usize,
    pub max_parents: usize,
    pub min_values: usize,
    pub max_values: usize,
    /// Exact number of observable variables.
    pub observables: usize,
    /// Underlying undirected graph is a tree.
    pub polytree: bool,
    /// Probability that a CPT is drawn from an ordered-logit model (every
    /// parent then has a definite sign) instead of uniformly at random.
    pub monotone_bias: f64,
}

impl RandomParams {
    pub fn binary(nodes: usize, observables: usize) -> Self {
        RandomParams {
            nodes,
            max_parents: 2,
            min_values: 2,
            max_values: 2,
            observables,
            polytree: false,
            monotone_bias: 0.7,
        }
    }
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams::binary(6, 2)
    }
}

pub const MAX_RANDOM_NODES: usize = 12;

/// Portable draws on top of ChaCha8 (`rand_chacha`, seeded by
/// `seed_from_u64`). Floats take the top 53 bits of a `u64`; bounded
/// integers use rejection sampling followed by `%`.
struct Draws(ChaCha8Rng);

impl Draws {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < limit {
                return (x % n) as usize;
            }
        }
    }

    fn coin(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// `k` distinct indices below `n`, sorted.
    fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort();
        out
    }
}

/// A deterministic random network; the same `params` and `seed` give the
/// same network on every platform.
pub fn random_network(params: &RandomParams, seed: u64) -> Result<Network, GadgetError> {
    let RandomParams { nodes: n, max_parents, min_values, max_values, observables, polytree, monotone_bias } =
        params.clone();
    let fail = |msg: &str| Err(GadgetError::Infeasible(msg.to_string()));
    if !(2..=MAX_RANDOM_NODES).contains(&n) {
        return fail("node count must be between 2 and 12");
    }
    if min_values < 2 || max_values < min_values {
        return fail("value counts must satisfy 2 <= min <= max");
    }
    if observables == 0 || observables >= n {
        return fail("need at least one observable and room for the output");
    }
    if polytree && max_parents == 0 {
        return fail("a connected polytree needs max_parents >= 1");
    }
    if !(0.0..=1.0).contains(&monotone_bias) {
        return fail("monotone_bias must lie in [0, 1]");
    }

    let mut rng = Draws(ChaCha8Rng::seed_from_u64(seed));
    let cards: Vec<usize> = (0..n).map(|_| min_values + rng.below(max_values - min_values + 1)).collect();

    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    if polytree {
        for i in 1..n {
            let j = rng.below(i);
            let downward = rng.coin(0.5);
            if (downward && parents[i].len() < max_parents) || parents[j].len() >= max_parents {
                parents[i].push(j);
            } else {
                parents[j].push(i);
            }
        }
    } else {
        for i in 1..n {
            let k = rng.below(max_parents.min(i) + 1);
            parents[i] = rng.subset(i, k);
        }
    }
    for ps in &mut parents {
        ps.sort();
    }

    let output = rng.below(n);
    let others: Vec<usize> = (0..n).filter(|&v| v != output).collect();
    let chosen: Vec<usize> = rng.subset(others.len(), observables).into_iter().map(|i| others[i]).collect();

    let name = |v: usize| format!("V{v}");
    let mut draft = NetworkDraft::new();
    for v in 0..n {
        let values: Vec<String> = (0..cards[v]).map(|k| format!("v{v}_{k}")).collect();
        draft.variables.push(Variable::new(name(v), values));
        let role = if v == output {
            Role::Output
        } else if chosen.contains(&v) {
            Role::Observable
        } else {
            Role::Intermediate
        };
        draft.roles.push((name(v), role));
        for &p in &parents[v] {
            draft.arcs.push((name(p), name(v)));
        }
    }
    for v in 0..n {
        let rows = random_cpt(&mut rng, cards[v], &parents[v].iter().map(|&p| cards[p]).collect::<Vec<_>>(), monotone_bias);
        draft.cpts.push((name(v), rows));
    }
    Ok(draft.build()?)
}

fn random_cpt(rng: &mut Draws, card: usize, parent_cards: &[usize], monotone_bias: f64) -> Vec<Vec<f64>> {
    let rows: usize = parent_cards.iter().product();
    if rng.coin(monotone_bias) {
        // Ordered logit: F(w | row) = sigmoid(threshold_w - score(row)).
        let mut thresholds: Vec<f64> = (0..card - 1).map(|_| rng.range(-2.0, 2.0)).collect();
        thresholds.sort_by(f64::total_cmp);
        for i in 1..thresholds.len() {
            if thresholds[i] - thresholds[i - 1] < 0.05 {
                thresholds[i] = thresholds[i - 1] + 0.05;
            }
        }
        let weights: Vec<f64> = parent_cards
            .iter()
            .map(|_| {
                let magnitude = rng.range(0.5, 3.0);
                if rng.coin(0.5) {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect();
        (0..rows)
            .map(|r| {
                let mut rest = r;
                let mut score = 0.0;
                for (slot, &pc) in parent_cards.iter().enumerate().rev() {
                    score += weights[slot] * (rest % pc) as f64;
                    rest /= pc;
                }
                let mut cdf: Vec<f64> =
                    thresholds.iter().map(|t| 1.0 / (1.0 + (score - t).exp())).collect();
                cdf.push(1.0);
                let mut prev = 0.0;
                cdf.iter()
                    .map(|&f| {
                        let p = f - prev;
                        prev = f;
                        p
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..rows)
            .map(|_| {
                let raw: Vec<f64> = (0..card).map(|_| rng.range(0.05, 1.0)).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / sum).collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_network, VarId};

    fn x_to_e() -> Network {
        NetworkDraft::new()
            .var("X", &["x0", "x1"])
            .var("E", &["e0", "e1"])
            .arc("X", "E")
            .role("X", Role::Observable)
            .role("E", Role::Output)
            .cpt("X", vec![vec![0.5, 0.5]])
            .cpt("E", vec![vec![0.8, 0.2], vec![0.4, 0.6]])
            .build()
            .unwrap()
    }

    #[test]
    fn condmap_examples() {
        let net = x_to_e();
        let w = condmap_exceeds(&net, "E", "e1", 0.5).unwrap();
        assert_eq!(w, Some(net.assignment(&[("X", "x1")]).unwrap()));
        assert_eq!(condmap_exceeds(&net, "E", "e1", 0.7).unwrap(), None);
        assert_eq!(condmap_exceeds(&net, "E", "e1", 1.0).unwrap(), None);
        assert!(matches!(condmap_exceeds(&net, "X", "x1", 0.5), Err(GadgetError::EvidenceObservable(_))));
    }

    fn spec(p: f64) -> GadgetSpec {
        GadgetSpec { base: x_to_e(), evidence: "E".into(), evidence_value: "e1".into(), threshold: p }
    }

    #[test]
    fn gadget_activation_values() {
        assert!((gadget_activation(0.3) - 2.0 / 7.0).abs() < 1e-15);
        assert_eq!(gadget_activation(0.0), 0.5);
        let net = build_gadget(&spec(0.3)).unwrap();
        let a = net.require_id("A_gadget").unwrap();
        assert!((net.cpt(a)[0][1] - 0.285714285714).abs() < 1e-12);
        assert_eq!(net.cpt(a)[1], vec![0.0, 1.0]);
    }

    #[test]
    fn gadget_structure() {
        let net = build_gadget(&spec(0.25)).unwrap();
        assert_eq!(net.len(), 5);
        assert_eq!(net.arcs().count(), 4);
        assert_eq!(net.name(net.output()), "C_gadget");
        let obs: Vec<&str> = net.observables().into_iter().map(|v| net.name(v)).collect();
        assert_eq!(obs, vec!["X", "B_gadget"]);
        assert_eq!(net.role(net.require_id("E").unwrap()), Role::Intermediate);
        assert_eq!(net.cpt(VarId(1)), x_to_e().cpt(VarId(1)));
        assert!(net.is_polytree());
    }

    #[test]
    fn gadget_rejects_bad_input() {
        assert!(matches!(build_gadget(&spec(0.6)), Err(GadgetError::Threshold(_))));
        assert!(matches!(build_gadget(&spec(0.5)), Err(GadgetError::Threshold(_))));
        assert!(matches!(build_gadget(&spec(-0.1)), Err(GadgetError::Threshold(_))));
        let mut s = spec(0.2);
        s.evidence = "X".into();
        assert!(matches!(build_gadget(&s), Err(GadgetError::EvidenceObservable(_))));
        let twice = GadgetSpec { base: build_gadget(&spec(0.2)).unwrap(), ..spec(0.2) };
        assert!(matches!(build_gadget(&twice), Err(GadgetError::NameCollision(_))));
    }

    #[test]
    fn random_is_deterministic() {
        let params = RandomParams { nodes: 4, max_parents: 2, ..RandomParams::binary(4, 2) };
        let a = random_network(&params, 7).unwrap();
        let b = random_network(&params, 7).unwrap();
        assert_eq!(a, b);
        let c = random_network(&params, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_polytree_is_tree() {
        for seed in 0..50 {
            let params = RandomParams { polytree: true, ..RandomParams::binary(9, 3) };
            let net = random_network(&params, seed).unwrap();
            assert!(net.is_polytree());
            assert_eq!(net.arcs().count(), net.len() - 1);
        }
    }

    #[test]
    fn random_rows_sum_to_one() {
        for seed in 0..50 {
            let params = RandomParams { min_values: 2, max_values: 4, ..RandomParams::binary(7, 3) };
            let net = random_network(&params, seed).unwrap();
            assert!(validate_network(&net.to_draft()).is_valid());
            for v in net.ids() {
                assert!(net.parents(v).len() <= 2);
                for row in net.cpt(v) {
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn infeasible_params() {
        let bad = [
            RandomParams::binary(13, 2),
            RandomParams::binary(4, 0),
            RandomParams::binary(4, 4),
            RandomParams { min_values: 1, ..RandomParams::binary(4, 2) },
            RandomParams { polytree: true, max_parents: 0, ..RandomParams::binary(4, 2) },
        ];
        for p in bad {
            assert!(matches!(random_network(&p, 1), Err(GadgetError::Infeasible(_))), "{p:?}");
        }
    }
}
