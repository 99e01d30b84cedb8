//! Qualitative influences and the sound approximate monotonicity check.
//!
//! Each arc gets a sign by comparing CPT rows directly. Signs are propagated
//! from one observable at a time to every other variable, treating the other
//! observables as instantiated, and the sign reaching the output decides
//! whether the network is isotone or antitone in that observable. A `?` at
//! the output may be resolved afterwards by bounding the context weights of
//! the output's CPT.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::inference::{InferenceEngine, InferenceError, VariableElimination};
use crate::model::{Assignment, Assignments, Network, Role, VarId, PROB_TOLERANCE};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
    #[default]
    Zero,
    Unknown,
}

impl Sign {
    pub const ALL: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Unknown];

    /// Serial composition (`⊗`).
    pub fn product(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Unknown, _) | (_, Unknown) => Unknown,
            (a, b) if a == b => Plus,
            _ => Minus,
        }
    }

    /// Parallel composition (`⊕`).
    pub fn sum(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, s) | (s, Zero) => s,
            (a, b) if a == b => a,
            _ => Unknown,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Unknown => "?",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        self.product(rhs)
    }
}

impl Add for Sign {
    type Output = Sign;
    fn add(self, rhs: Sign) -> Sign {
        self.sum(rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Sign, String> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" | "−" => Ok(Sign::Minus),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Unknown),
            _ => Err(format!("not a sign: `{s}`")),
        }
    }
}

pub fn sign_product(a: Sign, b: Sign) -> Sign {
    a.product(b)
}

pub fn sign_sum(a: Sign, b: Sign) -> Sign {
    a.sum(b)
}

/// Classifies a collection of CDF differences `F(w | v s) - F(w | v' s)`.
#[derive(Debug, Default, Clone, Copy)]
struct SignTally {
    positive: bool,
    negative: bool,
}

impl SignTally {
    fn record(&mut self, diff: f64) {
        if diff > PROB_TOLERANCE {
            self.positive = true;
        } else if diff < -PROB_TOLERANCE {
            self.negative = true;
        }
    }

    fn sign(self) -> Sign {
        match (self.positive, self.negative) {
            (false, false) => Sign::Zero,
            (true, false) => Sign::Plus,
            (false, true) => Sign::Minus,
            (true, true) => Sign::Unknown,
        }
    }
}

fn cdf(row: &[f64]) -> Vec<f64> {
    row.iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Sign of the direct influence of `parent` on `child`, uniformly over every
/// assignment to the child's other parents.
///
/// # Panics
/// If `parent -> child` is not an arc of `net`.
pub fn arc_sign(net: &Network, parent: VarId, child: VarId) -> Sign {
    let parents = net.parents(child);
    let slot = parents
        .iter()
        .position(|&p| p == parent)
        .unwrap_or_else(|| panic!("no arc {} -> {}", net.name(parent), net.name(child)));
    let card = net.cardinality(parent);
    let stride: usize = parents[slot + 1..].iter().map(|&p| net.cardinality(p)).product();
    let rows = net.cpt(child);
    let width = net.cardinality(child);

    let mut tally = SignTally::default();
    for (r, row) in rows.iter().enumerate() {
        // Visit each context once, at the row where `parent` takes its lowest value.
        if (r / stride) % card != 0 {
            continue;
        }
        let cdfs: Vec<Vec<f64>> = (0..card).map(|k| cdf(&rows[r + k * stride])).collect();
        debug_assert_eq!(cdfs[0], cdf(row));
        for lo in 0..card {
            for hi in lo + 1..card {
                for w in 0..width - 1 {
                    tally.record(cdfs[lo][w] - cdfs[hi][w]);
                }
            }
        }
    }
    tally.sign()
}

/// Signs of every arc, keyed by `(parent, child)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSigns {
    signs: BTreeMap<(VarId, VarId), Sign>,
}

impl ArcSigns {
    pub fn compute(net: &Network) -> ArcSigns {
        ArcSigns {
            signs: net.arcs().map(|(p, c)| ((p, c), arc_sign(net, p, c))).collect(),
        }
    }

    pub fn get(&self, parent: VarId, child: VarId) -> Sign {
        self.signs[&(parent, child)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((VarId, VarId), Sign)> + '_ {
        self.signs.iter().map(|(k, v)| (*k, *v))
    }
}

/// Result of propagating one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub source: VarId,
    /// Net sign of raising the source on each variable.
    pub signs: Vec<Sign>,
    /// Number of sign updates performed (at most two per variable).
    pub updates: usize,
}

/// Propagates the effect of raising `source` through the network, with every
/// other observable treated as instantiated.
///
/// Each variable keeps the sign received through each neighbour ("port"); a
/// message to a neighbour combines everything received through the other
/// ports, so no message bounces straight back. Messages never enter observed
/// variables or return to the source. What arrived from a parent passes on
/// to the parents only when the variable is observed or has an observed
/// descendant, and then with sign `?`; parents of an observed child reach
/// each other through it with sign `?` as well. A stochastic-dominance sign
/// reverses (child to parent) only when the child is binary; otherwise the
/// reversed link is `?` unless the arc sign is `0`.
pub fn propagate(net: &Network, arcs: &ArcSigns, source: VarId) -> Propagation {
    let blocked: Vec<bool> = net.ids().map(|v| v == source || net.role(v) == Role::Observable).collect();
    let mut activates = vec![false; net.len()];
    for v in net.ids().filter(|&v| net.role(v) == Role::Observable) {
        activates[v.0] = true;
        for a in net.ancestors(v) {
            activates[a.0] = true;
        }
    }

    // received[v][port]: sign delivered to v through neighbour `port`.
    let mut received: Vec<BTreeMap<VarId, Sign>> = vec![BTreeMap::new(); net.len()];
    let mut signs = vec![Sign::Zero; net.len()];
    signs[source.0] = Sign::Plus;
    let mut updates = 1;
    let mut queued = vec![false; net.len()];
    let mut queue = VecDeque::from([source]);
    queued[source.0] = true;

    while let Some(node) = queue.pop_front() {
        queued[node.0] = false;
        let is_parent_port = |port: VarId| net.parents(node).contains(&port);
        // Contributions through every port except `skip`, split by side.
        let gather = |skip: Option<VarId>| {
            let mut down = Sign::Zero;
            let mut up = if node == source { Sign::Plus } else { Sign::Zero };
            for (&port, &sign) in &received[node.0] {
                if Some(port) == skip {
                    continue;
                }
                if is_parent_port(port) {
                    down = down + sign;
                } else {
                    up = up + sign;
                }
            }
            (down, up)
        };

        // (receiver, receiving port, message)
        let mut outgoing: Vec<(VarId, VarId, Sign)> = Vec::new();
        for &child in net.children(node) {
            let (down, up) = gather(Some(child));
            let here = down + up;
            if child == source {
                continue;
            }
            if net.role(child) == Role::Observable {
                for &co in net.parents(child) {
                    if co != node && !blocked[co.0] {
                        outgoing.push((co, child, here * Sign::Unknown));
                    }
                }
            } else {
                outgoing.push((child, node, here * arcs.get(node, child)));
            }
        }
        for &parent in net.parents(node) {
            if blocked[parent.0] {
                continue;
            }
            let (down, up) = gather(Some(parent));
            let arc = arcs.get(parent, node);
            let reverse = if net.cardinality(node) > 2 && arc != Sign::Zero { Sign::Unknown } else { arc };
            let mut msg = up * reverse;
            if activates[node.0] {
                msg = msg + down * Sign::Unknown;
            }
            outgoing.push((parent, node, msg));
        }

        for (next, port, msg) in outgoing {
            if msg == Sign::Zero {
                continue;
            }
            let slot = received[next.0].entry(port).or_insert(Sign::Zero);
            let combined = *slot + msg;
            if combined == *slot {
                continue;
            }
            *slot = combined;
            let total = signs[next.0] + combined;
            if total != signs[next.0] {
                signs[next.0] = total;
                updates += 1;
            }
            if !queued[next.0] {
                queued[next.0] = true;
                queue.push_back(next);
            }
        }
    }

    Propagation { source, signs, updates }
}

/// Joint effect of raising several observables together: the `⊕`-sum of the
/// single-source effects.
pub fn combined_effect(net: &Network, arcs: &ArcSigns, sources: &[VarId]) -> Vec<Sign> {
    sources.iter().fold(vec![Sign::Zero; net.len()], |acc, &s| {
        let p = propagate(net, arcs, s);
        acc.iter().zip(&p.signs).map(|(a, b)| *a + *b).collect()
    })
}

/// Outcome of an attempt to resolve a `?` sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub sign: Sign,
    pub note: String,
}

impl Refinement {
    fn unresolved(note: impl Into<String>) -> Self {
        Refinement { sign: Sign::Unknown, note: note.into() }
    }
}

/// Joint posterior over `targets` (canonical order) by the chain rule.
fn joint_posterior(
    net: &Network,
    engine: &dyn InferenceEngine,
    evidence: &Assignment,
    targets: &[VarId],
) -> Result<Vec<f64>, InferenceError> {
    let mut out = Vec::new();
    for s in Assignments::new(net, targets) {
        let mut p = 1.0;
        let mut ev = evidence.clone();
        for (v, value) in s.iter() {
            if p == 0.0 {
                break;
            }
            match engine.posterior(net, &ev, v) {
                Ok(d) => p *= d.probs()[value],
                Err(InferenceError::ZeroEvidence) => p = 0.0,
                Err(e) => return Err(e),
            }
            ev.set(v, value);
        }
        out.push(p);
    }
    Ok(out)
}

/// Largest value of `Σ w·coef` over weight vectors in the box `[lo, hi]`
/// that sum to one (fractional knapsack).
fn max_weighted(coef: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..coef.len()).collect();
    order.sort_by(|&a, &b| coef[b].total_cmp(&coef[a]));
    let mut free = 1.0 - lo.iter().sum::<f64>();
    let mut total: f64 = coef.iter().zip(lo).map(|(c, l)| c * l).sum();
    for i in order {
        if free <= 0.0 {
            break;
        }
        let add = (hi[i] - lo[i]).min(free);
        total += add * coef[i];
        free -= add;
    }
    total
}

fn min_weighted(coef: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let neg: Vec<f64> = coef.iter().map(|c| -c).collect();
    -max_weighted(&neg, lo, hi)
}

/// Tries to resolve the sign of `x` on the output by bounding the
/// distribution of the output's unobservable context.
///
/// Applies when `x` is a parent of the output and no observable descends
/// from the output. For every assignment `s` to the other unobservable
/// parents of the output, `Pr(s | x, x⁻)` is bounded over all values of `x`
/// and all assignments `x⁻` to the other observables; if the latter are more
/// than `budget`, the bounds widen to `[0, 1]`. The sign is `+` when, for
/// every context of observable co-parents, every output value `w` and every
/// `v < v'`, the largest attainable `F(w | v')` stays at or below the
/// smallest attainable `F(w | v)` (and symmetrically for `-`).
pub fn refine_sign(net: &Network, x: VarId, budget: usize) -> Result<Refinement, InferenceError> {
    let engine = VariableElimination::default();
    let output = net.output();
    if budget == 0 {
        return Ok(Refinement::unresolved("no budget"));
    }
    if !net.has_arc(x, output) {
        return Ok(Refinement::unresolved(format!(
            "`{}` is not a parent of `{}`",
            net.name(x),
            net.name(output)
        )));
    }
    let below = net.descendants(output);
    if let Some(v) = net.observables().into_iter().find(|v| below.contains(v)) {
        return Ok(Refinement::unresolved(format!(
            "observable `{}` descends from the output",
            net.name(v)
        )));
    }

    let others: Vec<VarId> = net.observables().into_iter().filter(|&v| v != x).collect();
    let context: Vec<VarId> = net.parents(output).iter().copied().filter(|&v| v != x).collect();
    let ctx_obs: Vec<VarId> = context.iter().copied().filter(|&v| net.role(v) == Role::Observable).collect();
    let ctx_hidden: Vec<VarId> = context.iter().copied().filter(|&v| net.role(v) != Role::Observable).collect();
    let hidden_count = Assignments::new(net, &ctx_hidden).total();

    let enumerations = Assignments::new(net, &others).total();
    let exact = enumerations <= budget;

    // Bounds on Pr(s_hidden | x, x⁻), grouped by the observable context.
    let mut bounds: BTreeMap<Assignment, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    if exact {
        for rest in Assignments::new(net, &others) {
            let group = rest.restrict(&ctx_obs);
            for value in 0..net.cardinality(x) {
                let ev = rest.with(x, value);
                let weights = match engine.posterior(net, &ev, output) {
                    Err(InferenceError::ZeroEvidence) => continue,
                    Err(e) => return Err(e),
                    Ok(_) => joint_posterior(net, &engine, &ev, &ctx_hidden)?,
                };
                let entry = bounds
                    .entry(group.clone())
                    .or_insert_with(|| (vec![f64::INFINITY; hidden_count], vec![f64::NEG_INFINITY; hidden_count]));
                for (k, w) in weights.iter().enumerate() {
                    entry.0[k] = entry.0[k].min(*w);
                    entry.1[k] = entry.1[k].max(*w);
                }
            }
        }
    } else {
        for group in Assignments::new(net, &ctx_obs) {
            bounds.insert(group, (vec![0.0; hidden_count], vec![1.0; hidden_count]));
        }
    }

    let width = net.cardinality(output);
    let mut dense = vec![0; net.len()];
    let (mut plus, mut minus) = (true, true);
    for (group, (lo, hi)) in &bounds {
        for (v, value) in group.iter() {
            dense[v.0] = value;
        }
        // cdfs[x value][hidden assignment][w]
        let cdfs: Vec<Vec<Vec<f64>>> = (0..net.cardinality(x))
            .map(|xv| {
                dense[x.0] = xv;
                Assignments::new(net, &ctx_hidden)
                    .map(|s| {
                        for (v, value) in s.iter() {
                            dense[v.0] = value;
                        }
                        cdf(net.cpt_row(output, &dense))
                    })
                    .collect()
            })
            .collect();
        for v_lo in 0..cdfs.len() {
            for v_hi in v_lo + 1..cdfs.len() {
                for w in 0..width - 1 {
                    let low: Vec<f64> = cdfs[v_lo].iter().map(|c| c[w]).collect();
                    let high: Vec<f64> = cdfs[v_hi].iter().map(|c| c[w]).collect();
                    if max_weighted(&high, lo, hi) > min_weighted(&low, lo, hi) + PROB_TOLERANCE {
                        plus = false;
                    }
                    if min_weighted(&high, lo, hi) + PROB_TOLERANCE < max_weighted(&low, lo, hi) {
                        minus = false;
                    }
                }
            }
        }
    }

    let note = if exact {
        format!("context bounds from {enumerations} observable assignment(s)")
    } else {
        format!("budget {budget} below {enumerations} observable assignment(s); bounds widened to [0, 1]")
    };
    let sign = match (plus, minus) {
        (true, true) => Sign::Zero,
        (true, false) => Sign::Plus,
        (false, true) => Sign::Minus,
        (false, false) => Sign::Unknown,
    };
    Ok(Refinement { sign, note })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    IsotoneInDistribution,
    AntitoneInDistribution,
    /// Every observable has a zero influence on the output.
    Both,
    Mixed { isotone: Vec<VarId>, antitone: Vec<VarId>, both: Vec<VarId> },
    Inconclusive { unresolved: Vec<VarId> },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::IsotoneInDistribution => "IsotoneInDistribution",
            Verdict::AntitoneInDistribution => "AntitoneInDistribution",
            Verdict::Both => "Both",
            Verdict::Mixed { .. } => "Mixed",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn from_signs(signs: &[(VarId, Sign)]) -> Verdict {
        let with = |s: Sign| signs.iter().filter(|(_, x)| *x == s).map(|(v, _)| *v).collect::<Vec<_>>();
        let unresolved = with(Sign::Unknown);
        if !unresolved.is_empty() {
            return Verdict::Inconclusive { unresolved };
        }
        let (isotone, antitone, both) = (with(Sign::Plus), with(Sign::Minus), with(Sign::Zero));
        match (isotone.is_empty(), antitone.is_empty()) {
            (true, true) => Verdict::Both,
            (false, true) => Verdict::IsotoneInDistribution,
            (true, false) => Verdict::AntitoneInDistribution,
            (false, false) => Verdict::Mixed { isotone, antitone, both },
        }
    }

    /// Whether this verdict asserts the network is isotone (resp. antitone)
    /// in distribution for all observables.
    pub fn claims(&self, direction: crate::oracle::Direction) -> bool {
        use crate::oracle::Direction;
        match self {
            Verdict::Both => true,
            Verdict::IsotoneInDistribution => direction == Direction::Isotone,
            Verdict::AntitoneInDistribution => direction == Direction::Antitone,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSign {
    pub variable: VarId,
    /// Sign reached at the output by propagation.
    pub propagated: Sign,
    /// Sign after refinement (equal to `propagated` when none applied).
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEntry {
    pub variable: VarId,
    pub before: Sign,
    pub after: Sign,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxReport {
    pub arc_signs: Vec<((VarId, VarId), Sign)>,
    pub observables: Vec<ObservableSign>,
    pub verdict: Verdict,
    pub refinements: Vec<RefinementEntry>,
    pub node_updates: usize,
}

/// Arc signs, per-observable net signs on the output, optional refinement of
/// `?` signs with the given budget, and the aggregate verdict.
pub fn approx_verdict(net: &Network, refine: usize) -> Result<ApproxReport, InferenceError> {
    let arcs = ArcSigns::compute(net);
    let output = net.output();
    let mut observables = Vec::new();
    let mut refinements = Vec::new();
    let mut node_updates = 0;
    for x in net.observables() {
        let prop = propagate(net, &arcs, x);
        node_updates += prop.updates;
        let propagated = prop.signs[output.0];
        let mut sign = propagated;
        if sign == Sign::Unknown && refine > 0 {
            let r = refine_sign(net, x, refine)?;
            sign = r.sign;
            refinements.push(RefinementEntry { variable: x, before: propagated, after: r.sign, note: r.note });
        }
        observables.push(ObservableSign { variable: x, propagated, sign });
    }
    let pairs: Vec<(VarId, Sign)> = observables.iter().map(|o| (o.variable, o.sign)).collect();
    Ok(ApproxReport {
        arc_signs: arcs.iter().collect(),
        verdict: Verdict::from_signs(&pairs),
        observables,
        refinements,
        node_updates,
    })
}

/// Variables that a verdict leaves unresolved, by name.
pub fn unresolved_names(net: &Network, verdict: &Verdict) -> BTreeSet<String> {
    match verdict {
        Verdict::Inconclusive { unresolved } => unresolved.iter().map(|&v| net.name(v).to_string()).collect(),
        _ => BTreeSet::new(),
    }
}
