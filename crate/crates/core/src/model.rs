//! Discrete Bayesian networks over totally ordered value domains.
//!
//! A [`Network`] is built from an unvalidated [`NetworkDraft`]. The position of
//! a value label in [`Variable::values`] is its rank in the variable's total
//! order, so for a binary variable index 0 is the lower value.
//!
//! Every table and every enumeration in this crate follows one canonical
//! order: scope variables sorted by declaration order, enumerated as a
//! mixed-radix counter whose last variable is the least significant digit.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Absolute tolerance used for all probability comparisons.
/// Rows whose sum is this close to one are stored verbatim; others are
/// rescaled once.
pub const RENORMALIZE_ABOVE: f64 = 1e-10;

pub const PROB_TOLERANCE: f64 = 1e-9;

/// Index of a variable in its network's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// Value labels, lowest first.
    pub values: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Variable {
            name: name.into(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Observable,
    Intermediate,
    Output,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Observable => "observable",
            Role::Intermediate => "intermediate",
            Role::Output => "output",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A network description that has not been checked yet.
///
/// CPT rows are listed per joint parent assignment in canonical order, where
/// the parents are taken in declaration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkDraft {
    pub variables: Vec<Variable>,
    pub arcs: Vec<(String, String)>,
    pub roles: Vec<(String, Role)>,
    pub cpts: Vec<(String, Vec<Vec<f64>>)>,
}

impl NetworkDraft {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(mut self, name: &str, values: &[&str]) -> Self {
        self.variables.push(Variable::new(name, values.iter().copied()));
        self
    }

    pub fn arc(mut self, parent: &str, child: &str) -> Self {
        self.arcs.push((parent.to_string(), child.to_string()));
        self
    }

    pub fn role(mut self, name: &str, role: Role) -> Self {
        self.roles.push((name.to_string(), role));
        self
    }

    pub fn cpt(mut self, name: &str, rows: Vec<Vec<f64>>) -> Self {
        self.cpts.push((name.to_string(), rows));
        self
    }

    pub fn build(self) -> Result<Network, ModelError> {
        Network::from_draft(self)
    }
}

/// A single broken structural invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateVariable { name: String },
    TooFewValues { variable: String, count: usize },
    DuplicateValue { variable: String, value: String },
    UnknownVariable { name: String, context: &'static str },
    SelfLoop { variable: String },
    DuplicateArc { parent: String, child: String },
    Cycle { variables: Vec<String> },
    MissingRole { variable: String },
    ConflictingRole { variable: String },
    NoObservable,
    OutputCount { found: usize },
    MissingCpt { variable: String },
    DuplicateCpt { variable: String },
    RowCount { variable: String, expected: usize, found: usize },
    RowWidth { variable: String, row: usize, expected: usize, found: usize },
    InvalidEntry { variable: String, row: usize, column: usize, value: f64 },
    RowSum { variable: String, row: usize, sum: f64 },
}

impl Violation {
    /// The variable a violation is located at, when there is one.
    pub fn variable(&self) -> Option<&str> {
        use Violation::*;
        match self {
            DuplicateVariable { name } | UnknownVariable { name, .. } => Some(name),
            TooFewValues { variable, .. }
            | DuplicateValue { variable, .. }
            | SelfLoop { variable }
            | MissingRole { variable }
            | ConflictingRole { variable }
            | MissingCpt { variable }
            | DuplicateCpt { variable }
            | RowCount { variable, .. }
            | RowWidth { variable, .. }
            | InvalidEntry { variable, .. }
            | RowSum { variable, .. } => Some(variable),
            DuplicateArc { child, .. } => Some(child),
            Cycle { variables } => variables.first().map(String::as_str),
            NoObservable | OutputCount { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateVariable { name } => write!(f, "variable `{name}` declared twice"),
            TooFewValues { variable, count } => {
                write!(f, "variable `{variable}` has {count} value(s); at least 2 required")
            }
            DuplicateValue { variable, value } => {
                write!(f, "variable `{variable}` repeats value `{value}`")
            }
            UnknownVariable { name, context } => write!(f, "unknown variable `{name}` in {context}"),
            SelfLoop { variable } => write!(f, "arc `{variable}` -> `{variable}` is a self loop"),
            DuplicateArc { parent, child } => write!(f, "arc `{parent}` -> `{child}` listed twice"),
            Cycle { variables } => write!(f, "cycle detected among {}", variables.join(", ")),
            MissingRole { variable } => write!(f, "variable `{variable}` has no role"),
            ConflictingRole { variable } => write!(f, "variable `{variable}` has more than one role"),
            NoObservable => write!(f, "at least one observable variable required"),
            OutputCount { found } => {
                write!(f, "exactly one output variable required (found {found})")
            }
            MissingCpt { variable } => write!(f, "variable `{variable}` has no cpt"),
            DuplicateCpt { variable } => write!(f, "variable `{variable}` has more than one cpt"),
            RowCount { variable, expected, found } => write!(
                f,
                "cpt of `{variable}` has {found} row(s); expected {expected} (one per parent assignment)"
            ),
            RowWidth { variable, row, expected, found } => write!(
                f,
                "cpt of `{variable}` row {row} has {found} entries; expected {expected}"
            ),
            InvalidEntry { variable, row, column, value } => write!(
                f,
                "cpt of `{variable}` row {row} entry {column} is {value}; probabilities must be finite and nonnegative"
            ),
            RowSum { variable, row, sum } => {
                write!(f, "cpt of `{variable}` row {row}: row sum {sum} ≠ 1")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no value `{value}`")]
    UnknownValue { variable: String, value: String },
    #[error("value index {value} out of range for variable `{variable}`")]
    ValueOutOfRange { variable: String, value: usize },
    #[error("assignments have different scopes")]
    ScopeMismatch,
}

/// Checks every structural invariant of a draft and reports all violations.
pub fn validate_network(draft: &NetworkDraft) -> ValidationReport {
    let mut violations = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, var) in draft.variables.iter().enumerate() {
        if index.insert(var.name.as_str(), i).is_some() {
            violations.push(Violation::DuplicateVariable { name: var.name.clone() });
        }
        if var.values.len() < 2 {
            violations.push(Violation::TooFewValues {
                variable: var.name.clone(),
                count: var.values.len(),
            });
        }
        let mut seen = HashSet::new();
        for value in &var.values {
            if !seen.insert(value.as_str()) {
                violations.push(Violation::DuplicateValue {
                    variable: var.name.clone(),
                    value: value.clone(),
                });
            }
        }
    }

    let n = draft.variables.len();
    let mut parents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut arcs_ok = true;
    for (parent, child) in &draft.arcs {
        let (p, c) = match (index.get(parent.as_str()), index.get(child.as_str())) {
            (Some(&p), Some(&c)) => (p, c),
            (p, c) => {
                arcs_ok = false;
                if p.is_none() {
                    violations.push(Violation::UnknownVariable { name: parent.clone(), context: "arc" });
                }
                if c.is_none() {
                    violations.push(Violation::UnknownVariable { name: child.clone(), context: "arc" });
                }
                continue;
            }
        };
        if p == c {
            violations.push(Violation::SelfLoop { variable: parent.clone() });
            arcs_ok = false;
            continue;
        }
        if !parents[c].insert(p) {
            violations.push(Violation::DuplicateArc { parent: parent.clone(), child: child.clone() });
        }
    }
    if let Err(cyclic) = topological_sort(&parents) {
        violations.push(Violation::Cycle {
            variables: cyclic.iter().map(|&i| draft.variables[i].name.clone()).collect(),
        });
    }

    let mut roles: Vec<Option<Role>> = vec![None; n];
    for (name, role) in &draft.roles {
        match index.get(name.as_str()) {
            None => violations.push(Violation::UnknownVariable { name: name.clone(), context: "role" }),
            Some(&i) => {
                if roles[i].is_some() {
                    violations.push(Violation::ConflictingRole { variable: name.clone() });
                }
                roles[i] = Some(*role);
            }
        }
    }
    for (i, role) in roles.iter().enumerate() {
        if role.is_none() {
            violations.push(Violation::MissingRole { variable: draft.variables[i].name.clone() });
        }
    }
    if !roles.contains(&Some(Role::Observable)) {
        violations.push(Violation::NoObservable);
    }
    let outputs = roles.iter().filter(|r| **r == Some(Role::Output)).count();
    if outputs != 1 {
        violations.push(Violation::OutputCount { found: outputs });
    }

    let mut cpt_seen = vec![false; n];
    for (name, rows) in &draft.cpts {
        let Some(&i) = index.get(name.as_str()) else {
            violations.push(Violation::UnknownVariable { name: name.clone(), context: "cpt" });
            continue;
        };
        if cpt_seen[i] {
            violations.push(Violation::DuplicateCpt { variable: name.clone() });
            continue;
        }
        cpt_seen[i] = true;
        if arcs_ok {
            let expected: usize = parents[i].iter().map(|&p| draft.variables[p].values.len()).product();
            if rows.len() != expected {
                violations.push(Violation::RowCount {
                    variable: name.clone(),
                    expected,
                    found: rows.len(),
                });
            }
        }
        let width = draft.variables[i].values.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                violations.push(Violation::RowWidth {
                    variable: name.clone(),
                    row: r,
                    expected: width,
                    found: row.len(),
                });
                continue;
            }
            let mut bad = false;
            for (c, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    bad = true;
                    violations.push(Violation::InvalidEntry {
                        variable: name.clone(),
                        row: r,
                        column: c,
                        value,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if !bad && (sum - 1.0).abs() > PROB_TOLERANCE {
                violations.push(Violation::RowSum { variable: name.clone(), row: r, sum });
            }
        }
    }
    for (i, seen) in cpt_seen.iter().enumerate() {
        if !seen {
            violations.push(Violation::MissingCpt { variable: draft.variables[i].name.clone() });
        }
    }

    ValidationReport { violations }
}

/// Kahn's algorithm; lowest index first among ready nodes. On failure returns
/// the nodes left on or behind a cycle.
fn topological_sort(parents: &[BTreeSet<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (c, ps) in parents.iter().enumerate() {
        indegree[c] = ps.len();
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&next) = ready.iter().next() {
        ready.remove(&next);
        order.push(next);
        for &c in &children[next] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indegree[i] > 0).collect())
    }
}

/// A validated, immutable Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    variables: Vec<Variable>,
    index: HashMap<String, VarId>,
    parents: Vec<Vec<VarId>>,
    children: Vec<Vec<VarId>>,
    roles: Vec<Role>,
    cpts: Vec<Vec<Vec<f64>>>,
    topo: Vec<VarId>,
}

impl Network {
    /// Validates the draft, then rescales rows that do not sum to one.
    pub fn from_draft(draft: NetworkDraft) -> Result<Network, ModelError> {
        let report = validate_network(&draft);
        if !report.is_valid() {
            return Err(ModelError::Invalid(report));
        }
        let NetworkDraft { variables, arcs, roles: role_list, cpts: cpt_list } = draft;
        let n = variables.len();
        let index: HashMap<String, VarId> =
            variables.iter().enumerate().map(|(i, v)| (v.name.clone(), VarId(i))).collect();

        let mut parent_sets = vec![BTreeSet::new(); n];
        for (p, c) in &arcs {
            parent_sets[index[c].0].insert(index[p].0);
        }
        let order = topological_sort(&parent_sets).expect("validated network is acyclic");
        let parents: Vec<Vec<VarId>> =
            parent_sets.iter().map(|ps| ps.iter().map(|&p| VarId(p)).collect()).collect();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in parents.iter().enumerate() {
            for p in ps {
                children[p.0].push(VarId(c));
            }
        }

        let mut roles = vec![Role::Intermediate; n];
        for (name, role) in role_list {
            roles[index[&name].0] = role;
        }
        let mut cpts = vec![Vec::new(); n];
        for (name, rows) in cpt_list {
            cpts[index[&name].0] = rows
                .into_iter()
                .map(|row| {
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() <= RENORMALIZE_ABOVE {
                        row
                    } else {
                        row.into_iter().map(|p| p / sum).collect()
                    }
                })
                .collect();
        }

        Ok(Network {
            variables,
            index,
            parents,
            children,
            roles,
            cpts,
            topo: order.into_iter().map(VarId).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.variables[id.0].name
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variables[id.0].values.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    pub fn id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn require_id(&self, name: &str) -> Result<VarId, ModelError> {
        self.id(name).ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn value_index(&self, id: VarId, label: &str) -> Result<usize, ModelError> {
        self.variable(id).value_index(label).ok_or_else(|| ModelError::UnknownValue {
            variable: self.name(id).to_string(),
            value: label.to_string(),
        })
    }

    /// Parents in declaration order; this is also the CPT row order.
    pub fn parents(&self, id: VarId) -> &[VarId] {
        &self.parents[id.0]
    }

    pub fn children(&self, id: VarId) -> &[VarId] {
        &self.children[id.0]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, VarId(c))))
    }

    pub fn has_arc(&self, parent: VarId, child: VarId) -> bool {
        self.parents[child.0].binary_search(&parent).is_ok()
    }

    pub fn role(&self, id: VarId) -> Role {
        self.roles[id.0]
    }

    pub fn with_role(&self, role: Role) -> Vec<VarId> {
        self.ids().filter(|&v| self.roles[v.0] == role).collect()
    }

    pub fn observables(&self) -> Vec<VarId> {
        self.with_role(Role::Observable)
    }

    pub fn output(&self) -> VarId {
        self.ids()
            .find(|&v| self.roles[v.0] == Role::Output)
            .expect("validated network has an output")
    }

    pub fn topological_order(&self) -> &[VarId] {
        &self.topo
    }

    pub fn cpt(&self, id: VarId) -> &[Vec<f64>] {
        &self.cpts[id.0]
    }

    /// Row of `id`'s CPT selected by the parent values in a dense full
    /// assignment (`values[v]` is the value of variable `v`).
    pub fn cpt_row(&self, id: VarId, values: &[usize]) -> &[f64] {
        let mut row = 0;
        for &p in &self.parents[id.0] {
            row = row * self.cardinality(p) + values[p.0];
        }
        &self.cpts[id.0][row]
    }

    /// Decodes a CPT row index into parent values, in parent order.
    pub fn row_parent_values(&self, id: VarId, mut row: usize) -> Vec<usize> {
        let ps = &self.parents[id.0];
        let mut out = vec![0; ps.len()];
        for (slot, &p) in ps.iter().enumerate().rev() {
            let card = self.cardinality(p);
            out[slot] = row % card;
            row /= card;
        }
        out
    }

    pub fn descendants(&self, id: VarId) -> BTreeSet<VarId> {
        self.reach(id, |v| &self.children[v.0])
    }

    pub fn ancestors(&self, id: VarId) -> BTreeSet<VarId> {
        self.reach(id, |v| &self.parents[v.0])
    }

    fn reach<'a>(&'a self, start: VarId, next: impl Fn(VarId) -> &'a [VarId]) -> BTreeSet<VarId> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<VarId> = next(start).iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if seen.insert(v) {
                queue.extend(next(v).iter().copied());
            }
        }
        seen
    }

    /// True when the underlying undirected graph has no cycle.
    pub fn is_polytree(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (p, c) in self.arcs() {
            let (a, b) = (find(&mut parent, p.0), find(&mut parent, c.0));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Builds an assignment from `(variable, value)` labels.
    pub fn assignment(&self, pairs: &[(&str, &str)]) -> Result<Assignment, ModelError> {
        let mut out = Vec::with_capacity(pairs.len());
        for (name, value) in pairs {
            let id = self.require_id(name)?;
            out.push((id, self.value_index(id, value)?));
        }
        Ok(Assignment::new(out))
    }

    pub fn check_assignment(&self, a: &Assignment) -> Result<(), ModelError> {
        for (v, value) in a.iter() {
            if v.0 >= self.len() {
                return Err(ModelError::UnknownVariable(v.to_string()));
            }
            if value >= self.cardinality(v) {
                return Err(ModelError::ValueOutOfRange {
                    variable: self.name(v).to_string(),
                    value,
                });
            }
        }
        Ok(())
    }

    /// Renders an assignment as `X=x1, Y=y0`; the empty assignment is `true`.
    pub fn format_assignment(&self, a: &Assignment) -> String {
        if a.is_empty() {
            return "true".to_string();
        }
        a.iter()
            .map(|(v, value)| format!("{}={}", self.name(v), self.variable(v).values[value]))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Converts back into a draft, e.g. for extension or serialization.
    pub fn to_draft(&self) -> NetworkDraft {
        NetworkDraft {
            variables: self.variables.clone(),
            arcs: self
                .arcs()
                .map(|(p, c)| (self.name(p).to_string(), self.name(c).to_string()))
                .collect(),
            roles: self.ids().map(|v| (self.name(v).to_string(), self.role(v))).collect(),
            cpts: self.ids().map(|v| (self.name(v).to_string(), self.cpts[v.0].clone())).collect(),
        }
    }
}

/// A joint value assignment to a set of variables.
///
/// The scope is kept sorted so that two assignments over the same variables
/// compare coordinate by coordinate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    scope: Vec<VarId>,
    values: Vec<usize>,
}

impl Assignment {
    /// The unique assignment to the empty scope.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Later bindings of the same variable win.
    pub fn new(pairs: impl IntoIterator<Item = (VarId, usize)>) -> Self {
        let mut a = Assignment::empty();
        for (v, value) in pairs {
            a.set(v, value);
        }
        a
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.scope.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.scope.binary_search(&var).ok().map(|i| self.values[i])
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.scope.binary_search(&var).is_ok()
    }

    pub fn set(&mut self, var: VarId, value: usize) {
        match self.scope.binary_search(&var) {
            Ok(i) => self.values[i] = value,
            Err(i) => {
                self.scope.insert(i, var);
                self.values.insert(i, value);
            }
        }
    }

    pub fn with(&self, var: VarId, value: usize) -> Assignment {
        let mut a = self.clone();
        a.set(var, value);
        a
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.scope.iter().copied().zip(self.values.iter().copied())
    }

    /// Keeps only the bindings of variables in `scope`.
    pub fn restrict(&self, scope: &[VarId]) -> Assignment {
        Assignment::new(self.iter().filter(|(v, _)| scope.contains(v)))
    }

    /// Union of two assignments; `other` wins on shared variables.
    pub fn merge(&self, other: &Assignment) -> Assignment {
        let mut a = self.clone();
        for (v, value) in other.iter() {
            a.set(v, value);
        }
        a
    }
}

/// Outcome of comparing two assignments under the product order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRelation {
    Equal,
    LessEq,
    GreaterEq,
    Incomparable,
}

impl OrderRelation {
    /// `x ⪯ x'` holds (including equality).
    pub fn is_le(self) -> bool {
        matches!(self, OrderRelation::Equal | OrderRelation::LessEq)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, OrderRelation::Equal | OrderRelation::GreaterEq)
    }
}

/// Coordinatewise comparison of two assignments over the same scope.
pub fn compare_assignments(x: &Assignment, y: &Assignment) -> Result<OrderRelation, ModelError> {
    if x.scope != y.scope {
        return Err(ModelError::ScopeMismatch);
    }
    let (mut le, mut ge) = (true, true);
    for (a, b) in x.values.iter().zip(&y.values) {
        le &= a <= b;
        ge &= a >= b;
    }
    Ok(match (le, ge) {
        (true, true) => OrderRelation::Equal,
        (true, false) => OrderRelation::LessEq,
        (false, true) => OrderRelation::GreaterEq,
        (false, false) => OrderRelation::Incomparable,
    })
}

/// Iterator over every assignment to a scope in canonical order.
#[derive(Debug, Clone)]
pub struct Assignments {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(net: &Network, scope: &[VarId]) -> Self {
        let mut scope = scope.to_vec();
        scope.sort();
        scope.dedup();
        let cards: Vec<usize> = scope.iter().map(|&v| net.cardinality(v)).collect();
        let next = Some(vec![0; scope.len()]);
        Assignments { scope, cards, next }
    }

    /// Number of assignments in the full enumeration.
    pub fn total(&self) -> usize {
        self.cards.iter().product()
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.cards[i] {
                carried = false;
                break;
            }
            succ[i] = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Assignment { scope: self.scope.clone(), values: current })
    }
}

/// Every assignment to the named variables, last declared varying fastest.
pub fn enumerate_assignments(net: &Network, scope: &[&str]) -> Result<Vec<Assignment>, ModelError> {
    let ids = scope.iter().map(|n| net.require_id(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(Assignments::new(net, &ids).collect())
}

/// Assignments covering `x`: one variable raised by exactly one step.
pub fn covering_successors(net: &Network, x: &Assignment) -> Vec<Assignment> {
    x.iter()
        .filter(|&(v, value)| value + 1 < net.cardinality(v))
        .map(|(v, value)| x.with(v, value + 1))
        .collect()
}
