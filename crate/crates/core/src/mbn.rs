//! The MBN text format.
//!
//! ```text
//! # comment
//! var X : x0 x1
//! var C : c0 c1
//! role observable X
//! role output C
//! arc X -> C
//! cpt X
//! row 0.5 0.5
//! cpt C
//! row 0.7 0.3
//! row 0.2 0.8
//! ```
//!
//! Rows follow the canonical order: parents in declaration order, the last
//! parent varying fastest.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::model::{ModelError, Network, NetworkDraft, Role, ValidationReport, Variable, Violation};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocatedViolation {
    pub violation: Violation,
    pub location: Option<Location>,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some(loc) => write!(f, "{loc}: {}", self.violation),
            None => write!(f, "{}", self.violation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MbnError {
    #[error("{location}: syntax error: {message}")]
    Syntax { location: Location, message: String },
    #[error("invalid network: {}", join(.0))]
    Invalid(Vec<LocatedViolation>),
}

fn join(vs: &[LocatedViolation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

#[derive(Default)]
struct Locations {
    var: HashMap<String, Location>,
    mention: HashMap<String, Location>,
    arc: HashMap<(String, String), Location>,
    role: HashMap<String, Location>,
    cpt: HashMap<String, Location>,
    rows: HashMap<(String, usize), Location>,
}

impl Locations {
    fn name(&self, name: &str) -> Option<Location> {
        self.var.get(name).or_else(|| self.mention.get(name)).copied()
    }

    fn locate(&self, v: &Violation) -> Option<Location> {
        use Violation::*;
        match v {
            DuplicateArc { parent, child } => self.arc.get(&(parent.clone(), child.clone())).copied(),
            SelfLoop { variable } => self.arc.get(&(variable.clone(), variable.clone())).copied(),
            ConflictingRole { variable } => self.role.get(variable).copied(),
            DuplicateCpt { variable } | RowCount { variable, .. } => self.cpt.get(variable).copied(),
            RowWidth { variable, row, .. } | InvalidEntry { variable, row, .. } | RowSum { variable, row, .. } => {
                self.rows.get(&(variable.clone(), *row)).copied()
            }
            other => other.variable().and_then(|n| self.name(n)),
        }
    }
}

/// Parses and validates an MBN document.
pub fn parse_mbn(text: &str) -> Result<Network, MbnError> {
    let mut draft = NetworkDraft::new();
    let mut locs = Locations::default();
    let mut current_cpt: Option<usize> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        let at = |t: &Token| Location { line: line_no, column: t.column };
        let syntax = |t: &Token, message: String| MbnError::Syntax { location: at(t), message };
        let end = Location { line: line_no, column: content.trim_end().chars().count() + 1 };
        let missing = |what: &str| MbnError::Syntax { location: end, message: format!("expected {what}") };
        let mention = |locs: &mut Locations, t: &Token| {
            locs.mention.entry(t.text.to_string()).or_insert(at(t));
        };

        match head.text {
            "var" => {
                current_cpt = None;
                let name = toks.get(1).ok_or_else(|| missing("variable name"))?;
                let colon = toks.get(2).ok_or_else(|| missing("`:`"))?;
                if colon.text != ":" {
                    return Err(syntax(colon, format!("expected `:`, found `{}`", colon.text)));
                }
                locs.var.entry(name.text.to_string()).or_insert(at(name));
                let values: Vec<&str> = toks[3..].iter().map(|t| t.text).collect();
                draft.variables.push(Variable::new(name.text, values));
            }
            "role" => {
                current_cpt = None;
                let kind = toks.get(1).ok_or_else(|| missing("role kind"))?;
                let role = match kind.text {
                    "observable" => Role::Observable,
                    "intermediate" => Role::Intermediate,
                    "output" => Role::Output,
                    other => {
                        return Err(syntax(
                            kind,
                            format!("unknown role `{other}`; expected observable, intermediate or output"),
                        ))
                    }
                };
                let name = toks.get(2).ok_or_else(|| missing("variable name"))?;
                if let Some(extra) = toks.get(3) {
                    return Err(syntax(extra, format!("unexpected `{}`", extra.text)));
                }
                mention(&mut locs, name);
                locs.role.insert(name.text.to_string(), at(name));
                draft.roles.push((name.text.to_string(), role));
            }
            "arc" => {
                current_cpt = None;
                let parent = toks.get(1).ok_or_else(|| missing("parent name"))?;
                let arrow = toks.get(2).ok_or_else(|| missing("`->`"))?;
                if arrow.text != "->" {
                    return Err(syntax(arrow, format!("expected `->`, found `{}`", arrow.text)));
                }
                let child = toks.get(3).ok_or_else(|| missing("child name"))?;
                if let Some(extra) = toks.get(4) {
                    return Err(syntax(extra, format!("unexpected `{}`", extra.text)));
                }
                mention(&mut locs, parent);
                mention(&mut locs, child);
                locs.arc.insert((parent.text.to_string(), child.text.to_string()), at(head));
                draft.arcs.push((parent.text.to_string(), child.text.to_string()));
            }
            "cpt" => {
                let name = toks.get(1).ok_or_else(|| missing("variable name"))?;
                if let Some(extra) = toks.get(2) {
                    return Err(syntax(extra, format!("unexpected `{}`", extra.text)));
                }
                mention(&mut locs, name);
                locs.cpt.insert(name.text.to_string(), at(name));
                draft.cpts.push((name.text.to_string(), Vec::new()));
                current_cpt = Some(draft.cpts.len() - 1);
            }
            "row" => {
                let Some(idx) = current_cpt else {
                    return Err(syntax(head, "`row` outside a `cpt` block".to_string()));
                };
                let mut row = Vec::with_capacity(toks.len() - 1);
                for t in &toks[1..] {
                    let p: f64 = t
                        .text
                        .parse()
                        .map_err(|_| syntax(t, format!("`{}` is not a decimal number", t.text)))?;
                    row.push(p);
                }
                let (name, rows) = &mut draft.cpts[idx];
                locs.rows.insert((name.clone(), rows.len()), at(head));
                rows.push(row);
            }
            other => {
                return Err(syntax(head, format!("unknown keyword `{other}`")));
            }
        }
    }

    Network::from_draft(draft).map_err(|e| match e {
        ModelError::Invalid(ValidationReport { violations }) => MbnError::Invalid(
            violations
                .into_iter()
                .map(|v| LocatedViolation { location: locs.locate(&v), violation: v })
                .collect(),
        ),
        other => unreachable!("draft validation only reports violations: {other}"),
    })
}

/// Shortest decimal that round-trips the value rounded to 12 significant digits.
pub fn format_probability(p: f64) -> String {
    let rounded: f64 = format!("{p:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Canonical text: variables, roles, arcs (grouped by child, parents in
/// declaration order), then tables, all in declaration order.
pub fn serialize_mbn(net: &Network) -> String {
    let mut out = String::new();
    for v in net.variables() {
        out.push_str(&format!("var {} : {}\n", v.name, v.values.join(" ")));
    }
    for v in net.ids() {
        out.push_str(&format!("role {} {}\n", net.role(v).as_str(), net.name(v)));
    }
    for c in net.ids() {
        for &p in net.parents(c) {
            out.push_str(&format!("arc {} -> {}\n", net.name(p), net.name(c)));
        }
    }
    for v in net.ids() {
        out.push_str(&format!("cpt {}\n", net.name(v)));
        for row in net.cpt(v) {
            let cells: Vec<String> = row.iter().map(|&p| format_probability(p)).collect();
            out.push_str(&format!("row {}\n", cells.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# minimal
var X : x0 x1
var C : c0 c1
role observable X
role output C
arc X -> C
cpt X
row 0.5 0.5
cpt C
row 0.7 0.3   # X = x0
row 0.2 0.8
";

    #[test]
    fn parses_minimal_document() {
        let net = parse_mbn(MINIMAL).unwrap();
        let x = net.id("X").unwrap();
        let c = net.id("C").unwrap();
        assert_eq!(net.role(x), Role::Observable);
        assert_eq!(net.output(), c);
        assert_eq!(net.cpt_row(c, &[1, 0]), &[0.2, 0.8]);
    }

    #[test]
    fn canonical_roundtrip() {
        let net = parse_mbn(MINIMAL).unwrap();
        let text = serialize_mbn(&net);
        assert!(text.starts_with("var X : x0 x1\nvar C : c0 c1\nrole observable X\nrole output C\narc X -> C\n"));
        assert_eq!(parse_mbn(&text).unwrap(), net);
        assert_eq!(serialize_mbn(&parse_mbn(&text).unwrap()), text);
    }

    #[test]
    fn missing_output_is_reported() {
        let text = MINIMAL.replace("role output C", "role intermediate C");
        let err = parse_mbn(&text).unwrap_err().to_string();
        assert!(err.contains("exactly one output variable required"), "{err}");
    }

    #[test]
    fn row_count_mismatch_names_variable_and_line() {
        let text = MINIMAL.replace("row 0.2 0.8\n", "");
        match parse_mbn(&text).unwrap_err() {
            MbnError::Invalid(vs) => {
                let v = &vs[0];
                assert_eq!(v.violation.variable(), Some("C"));
                assert_eq!(v.location, Some(Location { line: 9, column: 5 }));
                assert!(v.to_string().contains("`C`"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_mbn("var X : a b\narc X => C\n").unwrap_err();
        assert_eq!(
            err,
            MbnError::Syntax { location: Location { line: 2, column: 7 }, message: "expected `->`, found `=>`".into() }
        );
        let err = parse_mbn("row 1\n").unwrap_err();
        assert!(matches!(err, MbnError::Syntax { location: Location { line: 1, column: 1 }, .. }));
        let err = parse_mbn("var X : a b\ncpt X\nrow 0.5 half\n").unwrap_err();
        assert!(matches!(err, MbnError::Syntax { location: Location { line: 3, column: 9 }, .. }));
    }

    #[test]
    fn row_order_last_parent_fastest() {
        let text = "\
var A : a0 a1
var B : b0 b1
var C : c0 c1
role observable A
role observable B
role output C
arc B -> C
arc A -> C
cpt A
row 0.5 0.5
cpt B
row 0.5 0.5
cpt C
row 0.9 0.1
row 0.8 0.2
row 0.7 0.3
row 0.6 0.4
";
        let net = parse_mbn(text).unwrap();
        let c = net.id("C").unwrap();
        assert_eq!(net.cpt_row(c, &[0, 1, 0]), &[0.8, 0.2]);
        assert_eq!(net.cpt_row(c, &[1, 0, 0]), &[0.7, 0.3]);
        assert!(serialize_mbn(&net).contains("arc A -> C\narc B -> C\n"));
    }

    #[test]
    fn probability_formatting() {
        assert_eq!(format_probability(0.5), "0.5");
        assert_eq!(format_probability(0.1 + 0.2), "0.3");
        assert_eq!(format_probability(2.0 / 7.0), "0.285714285714");
        assert_eq!(format_probability(1.0), "1");
        assert_eq!(format_probability(0.0), "0");
    }
}
