//! Command-line front end: `run` parses arguments, dispatches a subcommand
//! and returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use monobn::checker::{CheckRequest, CheckReport};
use monobn::gadgetgen::{build_gadget, random_network, GadgetError, GadgetSpec, RandomParams};
use monobn::mbn::{parse_mbn, serialize_mbn, MbnError};
use monobn::oracle::{self, Counterexample, OracleOptions, PairMode, Witness};
use monobn::qualitative::{propagate, ApproxReport, ArcSigns, Verdict};
use monobn::{
    approx_verdict, default_checkers, default_engines, Assignment, Direction, InferenceError, ModelError, Network,
    OracleVerdict, Property, VarId,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_ZERO_EVIDENCE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "monobn", version, about = "Monotonicity verification for discrete Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate check of monotonicity in distribution by sign propagation.
    Verify {
        file: PathBuf,
        /// Refinement budget for unresolved signs (0 disables refinement).
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long)]
        json: bool,
    },
    /// Exact check by enumeration over observable assignments.
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        /// Check every comparable pair instead of covering pairs only.
        #[arg(long)]
        all_pairs: bool,
        #[command(flatten)]
        engine: EngineArg,
        #[arg(long)]
        json: bool,
    },
    /// Arc signs and the net sign of every observable on every variable.
    Signs {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Extend a network with the mode-monotonicity gadget.
    Gadget {
        file: PathBuf,
        /// Evidence variable and value, `E=e`.
        #[arg(long)]
        evidence: String,
        /// Threshold in [0, 1/2), as a decimal or a fraction.
        #[arg(long = "p")]
        p: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Generate a seeded random network.
    Random {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        polytree: bool,
        /// Number of observable variables (default: about a third of the nodes).
        #[arg(long)]
        observables: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_parents: usize,
        #[arg(long, default_value_t = 2)]
        min_values: usize,
        #[arg(long, default_value_t = 2)]
        max_values: usize,
        /// Probability that a CPT is drawn from a monotone (ordered-logit) model.
        #[arg(long, default_value_t = 0.7)]
        monotone_bias: f64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Posterior distribution of a variable given evidence.
    Infer {
        file: PathBuf,
        /// Comma-separated `X=v` pairs; may be empty.
        #[arg(long, default_value = "")]
        evidence: String,
        #[arg(long)]
        target: String,
        #[command(flatten)]
        engine: EngineArg,
        #[arg(long)]
        json: bool,
    },
    /// Run a registered checker by name (see `methods`).
    Check {
        file: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long, value_enum, default_value_t = DirectionArg::Isotone)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(long)]
        all_pairs: bool,
        #[command(flatten)]
        engine: EngineArg,
        #[arg(long)]
        json: bool,
    },
    /// List registered inference engines and checkers.
    Methods {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct EngineArg {
    /// Inference engine (see `methods`).
    #[arg(long = "engine", default_value = "ve")]
    name: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropertyArg {
    Mid,
    Mim,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    Isotone,
    Antitone,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Property {
        match p {
            PropertyArg::Mid => Property::Mid,
            PropertyArg::Mim => Property::Mim,
        }
    }
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Isotone => Direction::Isotone,
            DirectionArg::Antitone => Direction::Antitone,
        }
    }
}

/// A failed command: exit code and message for the error stream.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<InferenceError> for Failure {
    fn from(e: InferenceError) -> Self {
        match e {
            InferenceError::ZeroEvidence => Failure { code: EXIT_ZERO_EVIDENCE, message: e.to_string() },
            InferenceError::Model(m) => m.into(),
            InferenceError::PartialAssignment(_) | InferenceError::TargetInEvidence(_) => Failure::usage(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(_) => Failure::invalid(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<GadgetError> for Failure {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::Model(m) => m.into(),
            GadgetError::Inference(i) => i.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::invalid(format!("write failed: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line `argv` (including the program name) and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Verify { file, refine, json } => {
            let net = load(&file)?;
            let report = approx_verdict(&net, refine)?;
            if json {
                emit_json(out, &approx_json(&net, &report))
            } else {
                write_approx(out, &net, &report)
            }
        }
        Command::Oracle { file, property, direction, all_pairs, engine, json } => {
            let net = load(&file)?;
            let engines = default_engines();
            let engine = engines.get(&engine.name).ok_or_else(|| unknown_engine(&engine.name))?;
            let options = OracleOptions {
                pairs: if all_pairs { PairMode::AllPairs } else { PairMode::Covering },
                engine: engine.as_ref(),
                vary: None,
            };
            let verdict = oracle::decide(&net, property.into(), direction.into(), &options)?;
            if json {
                emit_json(out, &oracle_json(&net, &verdict))
            } else {
                write_oracle(out, &net, &verdict)
            }
        }
        Command::Signs { file, json } => {
            let net = load(&file)?;
            signs(out, &net, json)
        }
        Command::Gadget { file, evidence, p, output } => {
            let threshold = parse_fraction(&p)?;
            let (var, value) = split_pair(&evidence)?;
            let base = load(&file)?;
            let spec = GadgetSpec { base, evidence: var, evidence_value: value, threshold };
            let net = build_gadget(&spec)?;
            write_network(out, &net, output.as_deref())
        }
        Command::Random {
            nodes,
            seed,
            polytree,
            observables,
            max_parents,
            min_values,
            max_values,
            monotone_bias,
            output,
        } => {
            let observables = observables.unwrap_or_else(|| (nodes / 3).max(1));
            let params =
                RandomParams { nodes, max_parents, min_values, max_values, observables, polytree, monotone_bias };
            let net = random_network(&params, seed)?;
            write_network(out, &net, output.as_deref())
        }
        Command::Infer { file, evidence, target, engine, json } => {
            let net = load(&file)?;
            let engines = default_engines();
            let engine_impl = engines.get(&engine.name).ok_or_else(|| unknown_engine(&engine.name))?;
            let ev = parse_evidence(&net, &evidence)?;
            let t = net.require_id(&target)?;
            let dist = engine_impl.posterior(&net, &ev, t)?;
            let values = &net.variable(t).values;
            if json {
                let probs: Map<String, Value> =
                    values.iter().zip(dist.probs()).map(|(v, p)| (v.clone(), json!(p))).collect();
                emit_json(
                    out,
                    &json!({
                        "target": target,
                        "evidence": assignment_json(&net, &ev),
                        "engine": engine.name,
                        "distribution": probs,
                        "mode": values[dist.mode()],
                    }),
                )
            } else {
                writeln!(out, "Pr({} | {})", target, net.format_assignment(&ev))?;
                for (v, p) in values.iter().zip(dist.probs()) {
                    writeln!(out, "  {v}: {p:.12}")?;
                }
                writeln!(out, "mode: {}", values[dist.mode()])?;
                Ok(())
            }
        }
        Command::Check { file, method, direction, refine, all_pairs, engine, json } => {
            let checkers = default_checkers();
            let checker = checkers.get(&method).ok_or_else(|| {
                Failure::usage(format!(
                    "unknown method `{method}`; available: {}",
                    checkers.names().collect::<Vec<_>>().join(", ")
                ))
            })?;
            let engines = default_engines();
            let engine = engines.get(&engine.name).ok_or_else(|| unknown_engine(&engine.name))?;
            let net = load(&file)?;
            let request = CheckRequest {
                direction: direction.into(),
                refine,
                pairs: if all_pairs { PairMode::AllPairs } else { PairMode::Covering },
                engine,
            };
            match checker.check(&net, &request)? {
                CheckReport::Oracle(v) if json => emit_json(out, &oracle_json(&net, &v)),
                CheckReport::Oracle(v) => write_oracle(out, &net, &v),
                CheckReport::Approx(r) if json => emit_json(out, &approx_json(&net, &r)),
                CheckReport::Approx(r) => write_approx(out, &net, &r),
            }
        }
        Command::Methods { json } => {
            let engines = default_engines();
            let checkers = default_checkers();
            if json {
                let list = |items: Vec<(&str, &str)>| {
                    items.into_iter().map(|(n, s)| json!({"name": n, "summary": s})).collect::<Vec<_>>()
                };
                emit_json(
                    out,
                    &json!({
                        "engines": list(engines.iter().map(|e| (e.name(), e.summary())).collect()),
                        "checkers": list(checkers.iter().map(|c| (c.name(), c.summary())).collect()),
                    }),
                )
            } else {
                writeln!(out, "engines:")?;
                for e in engines.iter() {
                    writeln!(out, "  {:<16} {}", e.name(), e.summary())?;
                }
                writeln!(out, "checkers:")?;
                for c in checkers.iter() {
                    writeln!(out, "  {:<16} {}", c.name(), c.summary())?;
                }
                Ok(())
            }
        }
    }
}

fn unknown_engine(name: &str) -> Failure {
    let names = default_engines().names().map(str::to_string).collect::<Vec<_>>().join(", ");
    Failure::usage(format!("unknown engine `{name}`; available: {names}"))
}

fn load(path: &Path) -> Result<Network, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_mbn(&text).map_err(|e| match e {
        MbnError::Syntax { .. } => Failure::invalid(format!("{}:{e}", path.display())),
        MbnError::Invalid(vs) => Failure::invalid(
            vs.iter().map(|v| format!("{}:{v}", path.display())).collect::<Vec<_>>().join("\n"),
        ),
    })
}

fn write_network(out: &mut dyn Write, net: &Network, path: Option<&Path>) -> Outcome {
    let text = serialize_mbn(net);
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::invalid(format!("cannot write {}: {e}", p.display())))?;
            writeln!(out, "wrote {} ({} variables)", p.display(), net.len())?;
        }
        None => write!(out, "{text}")?,
    }
    Ok(())
}

/// Accepts a decimal (`0.25`) or a fraction (`1/4`).
fn parse_fraction(s: &str) -> Result<f64, Failure> {
    let bad = || Failure::usage(format!("`{s}` is not a number or fraction"));
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn split_pair(s: &str) -> Result<(String, String), Failure> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Failure::usage(format!("expected `VARIABLE=value`, found `{s}`")))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(Failure::usage(format!("expected `VARIABLE=value`, found `{s}`")));
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse_evidence(net: &Network, s: &str) -> Result<Assignment, Failure> {
    let mut pairs = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        pairs.push(split_pair(part)?);
    }
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    for (i, (k, _)) in refs.iter().enumerate() {
        if refs[..i].iter().any(|(j, _)| j == k) {
            return Err(Failure::usage(format!("variable `{k}` appears twice in the evidence")));
        }
    }
    Ok(net.assignment(&refs)?)
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

fn assignment_json(net: &Network, a: &Assignment) -> Value {
    let map: Map<String, Value> = a
        .iter()
        .map(|(v, value)| (net.name(v).to_string(), json!(net.variable(v).values[value])))
        .collect();
    Value::Object(map)
}

fn names(net: &Network, vars: &[VarId]) -> Vec<String> {
    vars.iter().map(|&v| net.name(v).to_string()).collect()
}

fn counterexample_json(net: &Network, cx: &Counterexample) -> Value {
    let values = &net.variable(net.output()).values;
    let witness = match &cx.witness {
        Witness::Cdf { index, lower_cdf, upper_cdf } => json!({
            "kind": "cdf",
            "index": index,
            "value": values[*index],
            "lower_cdf": lower_cdf,
            "upper_cdf": upper_cdf,
        }),
        Witness::Mode { lower, upper } => json!({
            "kind": "mode",
            "lower": values[*lower],
            "upper": values[*upper],
        }),
    };
    json!({
        "lower": assignment_json(net, &cx.lower),
        "upper": assignment_json(net, &cx.upper),
        "witness": witness,
    })
}

fn oracle_json(net: &Network, v: &OracleVerdict) -> Value {
    json!({
        "property": v.property.as_str(),
        "direction": v.direction.as_str(),
        "holds": v.holds,
        "counterexample": v.counterexample.as_ref().map(|cx| counterexample_json(net, cx)),
        "skipped": v.skipped.iter().map(|a| assignment_json(net, a)).collect::<Vec<_>>(),
        "pairs_checked": v.pairs_checked,
        "pair_mode": match v.pair_mode {
            PairMode::Covering => "covering",
            PairMode::AllPairs => "all-pairs",
        },
    })
}

fn write_oracle(out: &mut dyn Write, net: &Network, v: &OracleVerdict) -> Outcome {
    writeln!(out, "{v}")?;
    if let Some(cx) = &v.counterexample {
        let values = &net.variable(net.output()).values;
        writeln!(out, "counterexample:")?;
        writeln!(out, "  lower: {}", net.format_assignment(&cx.lower))?;
        writeln!(out, "  upper: {}", net.format_assignment(&cx.upper))?;
        match &cx.witness {
            Witness::Cdf { index, lower_cdf, upper_cdf } => writeln!(
                out,
                "  F({} | upper) = {upper_cdf:.12} > F({} | lower) = {lower_cdf:.12}",
                values[*index], values[*index]
            )?,
            Witness::Mode { lower, upper } => {
                writeln!(out, "  mode at lower: {}, mode at upper: {}", values[*lower], values[*upper])?
            }
        }
    }
    let mode = match v.pair_mode {
        PairMode::Covering => "covering",
        PairMode::AllPairs => "all-pairs",
    };
    writeln!(out, "pairs checked: {} ({mode})", v.pairs_checked)?;
    for a in &v.skipped {
        writeln!(out, "skipped (probability zero): {}", net.format_assignment(a))?;
    }
    Ok(())
}

fn verdict_json(net: &Network, verdict: &Verdict) -> Value {
    let mut obj = Map::new();
    obj.insert("label".into(), json!(verdict.label()));
    match verdict {
        Verdict::Mixed { isotone, antitone, both } => {
            obj.insert("isotone".into(), json!(names(net, isotone)));
            obj.insert("antitone".into(), json!(names(net, antitone)));
            obj.insert("both".into(), json!(names(net, both)));
        }
        Verdict::Inconclusive { unresolved } => {
            obj.insert("unresolved".into(), json!(names(net, unresolved)));
        }
        _ => {}
    }
    Value::Object(obj)
}

fn arc_signs_json(net: &Network, arcs: &[((VarId, VarId), monobn::Sign)]) -> Value {
    json!(arcs
        .iter()
        .map(|((p, c), s)| json!({"parent": net.name(*p), "child": net.name(*c), "sign": s.symbol()}))
        .collect::<Vec<_>>())
}

fn approx_json(net: &Network, r: &ApproxReport) -> Value {
    json!({
        "arc_signs": arc_signs_json(net, &r.arc_signs),
        "observables": r.observables.iter().map(|o| json!({
            "variable": net.name(o.variable),
            "propagated": o.propagated.symbol(),
            "sign": o.sign.symbol(),
        })).collect::<Vec<_>>(),
        "verdict": verdict_json(net, &r.verdict),
        "refinements": r.refinements.iter().map(|e| json!({
            "variable": net.name(e.variable),
            "before": e.before.symbol(),
            "after": e.after.symbol(),
            "note": e.note,
        })).collect::<Vec<_>>(),
        "node_updates": r.node_updates,
    })
}

fn write_approx(out: &mut dyn Write, net: &Network, r: &ApproxReport) -> Outcome {
    writeln!(out, "verdict: {}", r.verdict.label())?;
    writeln!(out, "output: {}", net.name(net.output()))?;
    for o in &r.observables {
        if o.sign == o.propagated {
            writeln!(out, "  {}: {}", net.name(o.variable), o.sign)?;
        } else {
            writeln!(out, "  {}: {} (refined from {})", net.name(o.variable), o.sign, o.propagated)?;
        }
    }
    for e in &r.refinements {
        writeln!(out, "refine {}: {} -> {} ({})", net.name(e.variable), e.before, e.after, e.note)?;
    }
    if let Verdict::Inconclusive { unresolved } = &r.verdict {
        writeln!(out, "unresolved: {}", names(net, unresolved).join(", "))?;
    }
    Ok(())
}

fn signs(out: &mut dyn Write, net: &Network, json: bool) -> Outcome {
    let arcs = ArcSigns::compute(net);
    let arc_list: Vec<_> = arcs.iter().collect();
    let props: Vec<_> = net.observables().into_iter().map(|x| propagate(net, &arcs, x)).collect();
    if json {
        let observables: Vec<Value> = props
            .iter()
            .map(|p| {
                let signs: Map<String, Value> =
                    net.ids().map(|v| (net.name(v).to_string(), json!(p.signs[v.0].symbol()))).collect();
                json!({
                    "variable": net.name(p.source),
                    "on_output": p.signs[net.output().0].symbol(),
                    "signs": signs,
                    "updates": p.updates,
                })
            })
            .collect();
        return emit_json(out, &json!({"arc_signs": arc_signs_json(net, &arc_list), "observables": observables}));
    }
    writeln!(out, "arc signs:")?;
    for ((p, c), s) in &arc_list {
        writeln!(out, "  {} -> {}: {}", net.name(*p), net.name(*c), s)?;
    }
    writeln!(out, "net signs on {}:", net.name(net.output()))?;
    for p in &props {
        writeln!(out, "  {}: {}", net.name(p.source), p.signs[net.output().0])?;
    }
    Ok(())
}
