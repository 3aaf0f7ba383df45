// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. [`run`] parses arguments, loads the documents,
//! runs one verb and renders its report; `main` only prints it.

mod format;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::approach::{
    approaches, cauchy_structure, classify_base, is_cauchy, limits, replay_witness, run_axiom_suite, Budget, Engine,
};
use crate::complete::{cauchy_check, eq_at_level, uniform_extend, CompletionPoint, LevelVerdict, ModulusCheck, UniformMap};
use crate::doc::{parse_document, validate_document, FunctionNetEntry, Workspace};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::funcspace::tier2::{
    limit_regularity_suite, pointwise_cauchy_check, uniform_convergence_check, RealFunctionNet, Schedule, UcVerdict,
};
use crate::funcspace::{lsb_profile, pointwise_approach, product_base, product_checks};
use crate::integrate::{integrate, IntegrationOptions, IntegrationVerdict, ModuleSpec, TagRule};
use crate::net::{enumerate_lasso_nets, LassoNet};
use crate::rational::{format_rational, parse_rational, pow2_neg, Rational};
use crate::space::GradedBase;
use crate::uspace::{lsb_sufficient_check, standard_base};

use format::{fmt_net, fmt_set, labels, net_json, verdict_json, verdict_line};

/// Process exit status of a verb.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Holds = 0,
    Fails = 1,
    PreconditionUnmet = 2,
    Undecided = 3,
    InputError = 4,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn name(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::PreconditionUnmet => "precondition-unmet",
            Status::Undecided => "undecided",
            Status::InputError => "input-error",
        }
    }

    fn of(holds: bool) -> Status {
        if holds {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    fn of_error(e: &Error) -> Status {
        match e {
            Error::PreconditionUnmet(_) | Error::NotCsb | Error::HalvingUnmet { .. } | Error::ConvergenceNotEstablished(_) => {
                Status::PreconditionUnmet
            }
            Error::PrecisionExhausted(_) => Status::Undecided,
            Error::ModulusViolation(_) | Error::Measure(_) | Error::EntourageAxiom(_) => Status::Fails,
            _ => Status::InputError,
        }
    }
}

/// What a verb produced: its status, the machine report and the text lines.
pub struct Outcome {
    pub status: Status,
    pub text: String,
}

impl Outcome {
    pub fn code(&self) -> i32 {
        self.status.code()
    }
}

struct Report {
    status: Status,
    json: Value,
    lines: Vec<String>,
}

impl Report {
    fn new(status: Status, json: Value, lines: Vec<String>) -> Self {
        Report { status, json, lines }
    }
}

#[derive(Parser, Debug)]
#[command(name = "basespace", version, about = "Decision procedures for graded base spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Case or sample budget; suites stop early and report undecided.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Module tolerance for integration, as a rational.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Refinement depth for integration.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Use raw entourage balls as base members.
    #[arg(long, global = true)]
    raw_balls: bool,
    /// Value module: real:N, complex:N, modp:P or modp:P:M.
    #[arg(long, global = true)]
    module: Option<String>,
    /// Tag rule: left, right or midpoint.
    #[arg(long, global = true)]
    tags: Option<String>,
    /// Longest net cycle enumerated by suites
    #[arg(long, global = true)]
    max_cycle: Option<usize>,
    /// Longest net prefix enumerated by suites
    #[arg(long, global = true)]
    max_prefix: Option<usize>,
    /// Target level `k` (radius `2^-k`).
    #[arg(long, global = true)]
    level: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate documents and report every problem.
    Validate { files: Vec<PathBuf> },
    /// Classify bases as lsb, csb and sb.
    Classify {
        files: Vec<PathBuf>,
        #[arg(long)]
        base: Option<String>,
    },
    /// Decide whether one net approaches another.
    Approach {
        files: Vec<PathBuf>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        base: Option<String>,
    },
    /// Decide whether a net is cauchy, or check a sequence's modulus.
    Cauchy {
        files: Vec<PathBuf>,
        #[arg(long, conflicts_with = "sequence")]
        net: Option<String>,
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 2000)]
        horizon: u64,
    },
    /// Compute the limit set of a net.
    Limits {
        files: Vec<PathBuf>,
        #[arg(long)]
        net: String,
        #[arg(long)]
        base: Option<String>,
    },
    /// Run the axiom suite on every base (or one).
    Suite {
        files: Vec<PathBuf>,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, value_enum, default_value_t = EngineArg::Kernel)]
        engine: EngineArg,
    },
    /// Check u-structures and uniformities.
    Uspace {
        files: Vec<PathBuf>,
        #[arg(long, conflicts_with = "uniformity")]
        ustructure: Option<String>,
        #[arg(long)]
        uniformity: Option<String>,
    },
    /// Points of the completion of the rationals.
    #[command(subcommand)]
    Complete(CompleteCommand),
    /// Function spaces and function nets.
    #[command(subcommand)]
    Funcspace(FuncspaceCommand),
    /// Integrate against a vector measure.
    Integrate {
        files: Vec<PathBuf>,
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        integrand: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum EngineArg {
    Kernel,
    Oracle,
}

#[derive(Subcommand, Debug)]
enum CompleteCommand {
    /// A rational within `2^-level` of the point.
    Eval {
        files: Vec<PathBuf>,
        #[arg(long)]
        sequence: Option<String>,
    },
    /// Compare two points at a level.
    Eq {
        files: Vec<PathBuf>,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Evaluate the extension of a uniformly continuous map.
    Extend {
        files: Vec<PathBuf>,
        #[arg(long)]
        sequence: Option<String>,
        /// The map, an expression in `x`.
        #[arg(long)]
        map: String,
        /// Its level-transfer modulus, an expression in `k`.
        #[arg(long)]
        omega: String,
    },
}

#[derive(Subcommand, Debug)]
enum FuncspaceCommand {
    /// Exhaustive checks of a finite product against its factors.
    Product {
        files: Vec<PathBuf>,
        #[arg(long)]
        product: Option<String>,
    },
    /// Uniform convergence of a real function net.
    UcCheck {
        files: Vec<PathBuf>,
        #[arg(long)]
        net: Option<String>,
        #[arg(long)]
        max_index: Option<u64>,
        #[arg(long)]
        grid: Option<u64>,
    },
    /// Pointwise approach (table nets) or pointwise cauchy (real nets).
    Pointwise {
        files: Vec<PathBuf>,
        #[arg(long)]
        net: Option<String>,
        /// Target table net; defaults to the constant net at the last map.
        #[arg(long)]
        limit: Option<String>,
        #[arg(long, default_value_t = 9)]
        grid: u64,
        #[arg(long, default_value_t = 400)]
        horizon: u64,
    },
    /// Regularity of the limit of a uniformly convergent net.
    LimitSuite {
        files: Vec<PathBuf>,
        #[arg(long)]
        net: Option<String>,
        #[arg(long, default_value_t = 20)]
        max_index: u64,
        #[arg(long, default_value_t = 17)]
        grid: u64,
    },
}

/// Parses `args` (program name first), runs the verb and renders the
/// report as text or JSON.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Status::Holds,
                _ => Status::InputError,
            };
            return Outcome {
                status,
                text: e.render().to_string(),
            };
        }
    };
    let name = command_name(&cli.command);
    let dispatched = std::panic::catch_unwind(|| dispatch(&cli.command, &cli.flags)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "evaluation aborted".into());
        Err(Error::InvalidArgument(msg))
    });
    let report = dispatched.unwrap_or_else(|e| {
        let status = Status::of_error(&e);
        Report::new(status, json!({ "error": e.to_string() }), vec![format!("error: {e}")])
    });
    let text = if cli.flags.json {
        let mut body = match report.json {
            Value::Object(map) => map,
            other => {
                let mut m = serde_json::Map::new();
                m.insert("report".into(), other);
                m
            }
        };
        body.insert("command".into(), json!(name));
        body.insert("status".into(), json!(report.status.name()));
        body.insert("exit_code".into(), json!(report.status.code()));
        let mut s = serde_json::to_string_pretty(&Value::Object(body)).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        let mut s = report.lines.join("\n");
        s.push('\n');
        s
    };
    Outcome {
        status: report.status,
        text,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Classify { .. } => "classify",
        Command::Approach { .. } => "approach",
        Command::Cauchy { .. } => "cauchy",
        Command::Limits { .. } => "limits",
        Command::Suite { .. } => "suite",
        Command::Uspace { .. } => "uspace",
        Command::Complete(CompleteCommand::Eval { .. }) => "complete eval",
        Command::Complete(CompleteCommand::Eq { .. }) => "complete eq",
        Command::Complete(CompleteCommand::Extend { .. }) => "complete extend",
        Command::Funcspace(FuncspaceCommand::Product { .. }) => "funcspace product",
        Command::Funcspace(FuncspaceCommand::UcCheck { .. }) => "funcspace uc-check",
        Command::Funcspace(FuncspaceCommand::Pointwise { .. }) => "funcspace pointwise",
        Command::Funcspace(FuncspaceCommand::LimitSuite { .. }) => "funcspace limit-suite",
        Command::Integrate { .. } => "integrate",
    }
}

fn dispatch(c: &Command, flags: &Flags) -> Result<Report> {
    match c {
        Command::Validate { files } => validate(files),
        Command::Classify { files, base } => classify(&load(files)?, base.as_deref(), flags),
        Command::Approach { files, from, to, base } => approach(&load(files)?, from, to, base.as_deref()),
        Command::Cauchy {
            files,
            net,
            sequence,
            base,
            horizon,
        } => {
            let ws = load(files)?;
            match (net, sequence) {
                (Some(n), None) => cauchy_net(&ws, n, base.as_deref()),
                (None, s) => cauchy_sequence(&ws, s.as_deref(), *horizon, flags.level.unwrap_or(20)),
                _ => unreachable!("clap rejects both"),
            }
        }
        Command::Limits { files, net, base } => limits_of(&load(files)?, net, base.as_deref()),
        Command::Suite { files, base, engine } => suite(&load(files)?, base.as_deref(), *engine, flags),
        Command::Uspace {
            files,
            ustructure,
            uniformity,
        } => uspace(&load(files)?, ustructure.as_deref(), uniformity.as_deref(), flags),
        Command::Complete(cmd) => complete(cmd, flags),
        Command::Funcspace(cmd) => funcspace(cmd, flags),
        Command::Integrate {
            files,
            measure,
            integrand,
        } => integrate_verb(&load(files)?, measure.as_deref(), integrand.as_deref(), flags),
    }
}

fn load(files: &[PathBuf]) -> Result<Workspace> {
    if files.is_empty() {
        return Err(Error::InvalidArgument("no input documents".into()));
    }
    Workspace::load(files)
}

/// The named object, or the only one of its kind.
fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, kind: &str) -> Result<(&'a str, &'a T)> {
    match name {
        Some(n) => map
            .get_key_value(n)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown {kind} `{n}`"))),
        None if map.len() == 1 => Ok(map.iter().next().map(|(k, v)| (k.as_str(), v)).expect("one entry")),
        None if map.is_empty() => Err(Error::InvalidArgument(format!("no {kind} in the input"))),
        None => Err(Error::InvalidArgument(format!("several {kind}s in the input; name one"))),
    }
}

/// The base a net is judged in: the named one, else the one on its space.
fn base_for_net<'a>(ws: &'a Workspace, space: &str, base: Option<&str>) -> Result<(&'a str, &'a GradedBase)> {
    match base {
        Some(b) => {
            let (name, base) = pick(&ws.bases, Some(b), "base")?;
            if !Arc::ptr_eq(base.space(), ws.space(space)?) {
                return Err(Error::InvalidArgument(format!("base `{b}` is not on space `{space}`")));
            }
            Ok((name, base))
        }
        None => ws.base_for_space(space),
    }
}

fn validate(files: &[PathBuf]) -> Result<Report> {
    if files.is_empty() {
        return Err(Error::InvalidArgument("no input documents".into()));
    }
    let mut lines = Vec::new();
    let mut docs = BTreeMap::new();
    let mut ok = true;
    for f in files {
        let origin = f.display().to_string();
        let text = std::fs::read_to_string(f).map_err(|e| Error::InvalidArgument(format!("{origin}: {e}")))?;
        let doc = parse_document(&text, &origin)?;
        let mut objects = BTreeMap::new();
        for (object, report) in validate_document(&doc) {
            if report.is_valid() {
                lines.push(format!("{origin}: {object}: valid"));
            } else {
                ok = false;
                lines.push(format!("{origin}: {object}: {}", report.summary()));
            }
            objects.insert(object, json!({ "valid": report.is_valid(), "problems": report.problems }));
        }
        let mut ws = Workspace::default();
        let load_error = ws.add_document(&doc).err().map(|e| e.to_string());
        if let Some(e) = &load_error {
            ok = false;
            lines.push(format!("{origin}: {e}"));
        }
        docs.insert(origin, json!({ "objects": objects, "load_error": load_error }));
    }
    if ok {
        lines.push("all documents valid".into());
    }
    Ok(Report::new(Status::of(ok), json!({ "documents": docs }), lines))
}

fn classify(ws: &Workspace, only: Option<&str>, flags: &Flags) -> Result<Report> {
    let names: Vec<&str> = match only {
        Some(b) => vec![pick(&ws.bases, Some(b), "base")?.0],
        None => ws.bases.keys().map(String::as_str).collect(),
    };
    if names.is_empty() {
        return Err(Error::InvalidArgument("no base in the input".into()));
    }
    let mut all = true;
    let mut lines = Vec::new();
    let mut out = BTreeMap::new();
    for name in names {
        let base = &ws.bases[name];
        let space = base.space();
        let c = classify_base(base);
        lines.push(format!("base {name}:"));
        let mut entry = serde_json::Map::new();
        for (label, v) in [("lsb", &c.lsb), ("csb", &c.csb), ("sb", &c.sb)] {
            all &= v.holds;
            lines.push(format!("  {label}: {}", verdict_line(space, v)));
            entry.insert(label.into(), verdict_json(space, v));
        }
        if c.csb.holds {
            let cs = cauchy_structure(base, 8, flags.seed)?;
            lines.push(format!(
                "  cauchy filters: {} of {}, axioms {}",
                cs.cauchy_count(),
                cs.filters.len(),
                if cs.axioms_hold() { "hold" } else { "fail" }
            ));
            entry.insert(
                "cauchy_structure".into(),
                json!({ "cauchy": cs.cauchy_count(), "filters": cs.filters.len(), "axioms_hold": cs.axioms_hold() }),
            );
        }
        out.insert(name.to_string(), Value::Object(entry));
    }
    Ok(Report::new(Status::of(all), json!({ "bases": out }), lines))
}

fn approach(ws: &Workspace, from: &str, to: &str, base: Option<&str>) -> Result<Report> {
    let (u, us) = ws.net(from)?;
    let (v, vs) = ws.net(to)?;
    if us != vs {
        return Err(Error::InvalidArgument(format!(
            "nets `{from}` and `{to}` live on different spaces"
        )));
    }
    let (bname, base) = base_for_net(ws, us, base)?;
    let verdict = approaches(u, v, base)?;
    let replayed = verdict.witness.as_ref().map(|w| replay_witness(u, v, base, w));
    if replayed == Some(false) {
        return Err(Error::InvariantViolated("approach witness does not replay".into()));
    }
    let space = base.space();
    let lines = vec![format!("{from} ⤳ {to} in {bname}: {}", verdict_line(space, &verdict))];
    let mut json = verdict_json(space, &verdict);
    json["base"] = json!(bname);
    json["replayed"] = json!(replayed);
    Ok(Report::new(Status::of(verdict.holds), json, lines))
}

fn cauchy_net(ws: &Workspace, net: &str, base: Option<&str>) -> Result<Report> {
    let (u, space_name) = ws.net(net)?;
    let (bname, base) = base_for_net(ws, space_name, base)?;
    let verdict = is_cauchy(u, base)?;
    let lines = vec![format!("{net} cauchy in {bname}: {}", verdict_line(base.space(), &verdict))];
    let mut json = verdict_json(base.space(), &verdict);
    json["base"] = json!(bname);
    Ok(Report::new(Status::of(verdict.holds), json, lines))
}

fn cauchy_sequence(ws: &Workspace, name: Option<&str>, horizon: u64, max_level: u32) -> Result<Report> {
    let (name, desc) = pick(&ws.sequences, name, "sequence")?;
    let seq = desc.build()?;
    let check = cauchy_check(&seq, horizon, max_level);
    let (status, line) = match &check {
        ModulusCheck::Holds { levels } => (
            Status::Holds,
            format!("{name}: modulus holds on levels 0..{levels} up to index {horizon}"),
        ),
        ModulusCheck::Fails { level, i, j } => (
            Status::Fails,
            format!("{name}: modulus fails at level {level}, terms {i} and {j}"),
        ),
    };
    Ok(Report::new(
        status,
        json!({ "sequence": name, "horizon": horizon, "check": check }),
        vec![line],
    ))
}

fn limits_of(ws: &Workspace, net: &str, base: Option<&str>) -> Result<Report> {
    let (u, space_name) = ws.net(net)?;
    let (bname, base) = base_for_net(ws, space_name, base)?;
    let lim = limits(u, base)?;
    let space = base.space();
    let lines = vec![format!(
        "limits of {net} ({}) in {bname}: {}",
        fmt_net(space, u),
        fmt_set(space, lim)
    )];
    Ok(Report::new(
        Status::of(!lim.is_empty()),
        json!({ "net": net_json(space, u), "base": bname, "limits": labels(space, lim) }),
        lines,
    ))
}

fn suite(ws: &Workspace, only: Option<&str>, engine: EngineArg, flags: &Flags) -> Result<Report> {
    let defaults = Budget::default();
    let budget = Budget {
        max_prefix: flags.max_prefix.unwrap_or(defaults.max_prefix),
        max_cycle: flags.max_cycle.unwrap_or(defaults.max_cycle),
        max_cases: flags.budget,
        ..defaults
    };
    let engine = match engine {
        EngineArg::Kernel => Engine::Kernel,
        EngineArg::Oracle => Engine::Oracle,
    };
    let names: Vec<&str> = match only {
        Some(b) => vec![pick(&ws.bases, Some(b), "base")?.0],
        None => ws.bases.keys().map(String::as_str).collect(),
    };
    if names.is_empty() {
        return Err(Error::InvalidArgument("no base in the input".into()));
    }
    let mut totals: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    let mut partial = false;
    let mut lines = Vec::new();
    let mut reports = BTreeMap::new();
    for name in names {
        let report = run_axiom_suite(&ws.bases[name], &budget, engine)?;
        partial |= report.partial;
        let mut failing = Vec::new();
        for r in &report.results {
            let t = totals.entry(r.name.clone()).or_default();
            t.0 += r.cases;
            t.1 += r.violations;
            if !r.passed() {
                failing.push(format!("{} ({} of {})", r.name, r.violations, r.cases));
            }
        }
        lines.push(format!(
            "base {name}: {} nets, {}{}",
            report.nets,
            if failing.is_empty() {
                "all checks pass".to_string()
            } else {
                format!("failing: {}", failing.join(", "))
            },
            if report.partial { " [partial]" } else { "" }
        ));
        for r in report.results.iter().filter(|r| !r.passed()) {
            for c in &r.counterexamples {
                lines.push(format!("    {}: {c}", r.name));
            }
        }
        reports.insert(name.to_string(), report);
    }
    lines.push("totals:".into());
    for (name, (cases, violations)) in &totals {
        lines.push(format!("  {name}: {cases} cases, {violations} counterexamples"));
    }
    let violated = totals.values().any(|t| t.1 > 0);
    let status = if violated {
        Status::Fails
    } else if partial {
        Status::Undecided
    } else {
        Status::Holds
    };
    let totals_json: BTreeMap<&String, Value> = totals
        .iter()
        .map(|(k, (c, v))| (k, json!({ "cases": c, "counterexamples": v })))
        .collect();
    Ok(Report::new(
        status,
        json!({ "budget": budget, "partial": partial, "totals": totals_json, "bases": reports }),
        lines,
    ))
}

fn uspace(ws: &Workspace, ustructure: Option<&str>, uniformity: Option<&str>, flags: &Flags) -> Result<Report> {
    if uniformity.is_some() || (ustructure.is_none() && ws.ustructures.is_empty()) {
        let (name, uni) = pick(&ws.uniformities, uniformity, "uniformity")?;
        let base = match standard_base(uni, flags.raw_balls) {
            Ok(b) => b,
            Err(Error::InvalidArgument(msg)) if flags.raw_balls => {
                return Ok(Report::new(
                    Status::Fails,
                    json!({ "uniformity": name, "raw_balls": true, "failure": msg }),
                    vec![format!("{name}: raw balls do not form a base: {msg}")],
                ));
            }
            Err(e) => return Err(e),
        };
        let c = classify_base(&base);
        let space = base.space();
        let lines = vec![
            format!("{name}: standard base with {} levels", base.levels().len()),
            format!("  lsb: {}", verdict_line(space, &c.lsb)),
        ];
        return Ok(Report::new(
            Status::of(c.lsb.holds),
            json!({ "uniformity": name, "raw_balls": flags.raw_balls, "levels": base.levels().len(), "lsb": verdict_json(space, &c.lsb) }),
            lines,
        ));
    }
    let (name, s) = pick(&ws.ustructures, ustructure, "u-structure")?;
    let u_space = s.is_u_space()?;
    let report = lsb_sufficient_check(s);
    let status = match (u_space, report.lsb) {
        (false, _) | (_, Some(false)) => Status::Fails,
        (true, Some(true)) => Status::Holds,
        (true, None) => Status::PreconditionUnmet,
    };
    let lines = vec![
        format!("{name}: u-space: {}", if u_space { "holds" } else { "fails" }),
        format!(
            "  sufficient conditions: {} (intersection closed {}, halving failure {:?}, symmetry failures {:?})",
            if report.conditions_hold { "hold" } else { "fail" },
            report.intersection_closed,
            report.halving_failure,
            report.symmetry_failures
        ),
        format!(
            "  induced base lsb: {}",
            match (&report.lsb, &report.base_error) {
                (Some(b), _) => b.to_string(),
                (None, Some(e)) => format!("no base ({e})"),
                (None, None) => "no base".into(),
            }
        ),
    ];
    Ok(Report::new(
        status,
        json!({ "ustructure": name, "u_space": u_space, "lsb_report": report }),
        lines,
    ))
}

fn completion_point(ws: &Workspace, name: Option<&str>) -> Result<(String, CompletionPoint)> {
    let (name, desc) = pick(&ws.sequences, name, "sequence")?;
    Ok((name.to_string(), CompletionPoint::new(desc.build()?)))
}

/// A short decimal rendering of an exact rational string.
fn approx(q: &str) -> Result<String> {
    Ok(format!("{:.6}", crate::rational::to_f64(&parse_rational(q)?)))
}

fn decimal(q: &Rational, k: u32) -> String {
    crate::complete::decimal_string(q, (k as usize * 3).div_ceil(10) + 1)
}

fn complete(cmd: &CompleteCommand, flags: &Flags) -> Result<Report> {
    match cmd {
        CompleteCommand::Eval { files, sequence } => {
            let ws = load(files)?;
            let k = flags.level.unwrap_or(10);
            let (name, p) = completion_point(&ws, sequence.as_deref())?;
            let q = p.approx(k);
            Ok(Report::new(
                Status::Holds,
                json!({ "sequence": name, "level": k, "value": format_rational(&q), "decimal": decimal(&q, k) }),
                vec![format!("{name} ≈ {} (within 2^-{k})", decimal(&q, k))],
            ))
        }
        CompleteCommand::Eq { files, left, right } => {
            let ws = load(files)?;
            let k = flags.level.unwrap_or(12);
            let (_, p) = completion_point(&ws, Some(left))?;
            let (_, q) = completion_point(&ws, Some(right))?;
            let v = eq_at_level(&p, &q, k);
            let status = match &v {
                LevelVerdict::Equal => Status::Holds,
                LevelVerdict::Apart { .. } => Status::Fails,
                LevelVerdict::Unknown { .. } => Status::Undecided,
            };
            let line = match &v {
                LevelVerdict::Equal => format!("{left} = {right} at level {k}"),
                LevelVerdict::Apart { distance, .. } => {
                    format!("{left} and {right} apart at level {k} (sampled distance {distance})")
                }
                LevelVerdict::Unknown { distance } => {
                    format!("{left} vs {right} unknown at level {k} (sampled distance {distance})")
                }
            };
            Ok(Report::new(
                status,
                json!({ "left": left, "right": right, "level": k, "verdict": v }),
                vec![line],
            ))
        }
        CompleteCommand::Extend {
            files,
            sequence,
            map,
            omega,
        } => {
            let ws = load(files)?;
            let k = flags.level.unwrap_or(10);
            let (name, p) = completion_point(&ws, sequence.as_deref())?;
            let f = expression_map(map, omega)?;
            let samples = flags.budget.unwrap_or(16);
            let value = uniform_extend(&f.0, &p, k, samples);
            if let Some(e) = f.1.lock().expect("poisoned").take() {
                return Err(e);
            }
            let value = value?;
            Ok(Report::new(
                Status::Holds,
                json!({ "sequence": name, "map": map, "level": k, "value": format_rational(&value), "decimal": decimal(&value, k) }),
                vec![format!("{map} at {name} ≈ {} (within 2^-{k})", decimal(&value, k))],
            ))
        }
    }
}

/// A map from expressions; evaluation errors are parked in the slot.
fn expression_map(map: &str, omega: &str) -> Result<(UniformMap, Arc<Mutex<Option<Error>>>)> {
    let f = Expr::parse(map)?;
    let w = Expr::parse(omega)?;
    for (e, var) in [(&f, "x"), (&w, "k")] {
        if let Some(v) = e.variables().into_iter().find(|v| v != var) {
            return Err(Error::Parse(format!("unexpected variable `{v}` (expected `{var}`)")));
        }
    }
    w.eval_index("k", 0)?;
    let slot: Arc<Mutex<Option<Error>>> = Arc::default();
    let (s1, s2) = (Arc::clone(&slot), Arc::clone(&slot));
    let park = |slot: &Mutex<Option<Error>>, e: Error| {
        slot.lock().expect("poisoned").get_or_insert(e);
    };
    Ok((
        UniformMap {
            name: map.to_string(),
            map: Arc::new(move |x| {
                f.eval_at("x", x).unwrap_or_else(|e| {
                    park(&s1, e);
                    Rational::default()
                })
            }),
            omega: Arc::new(move |k| {
                w.eval_index("k", k as u64)
                    .map(|v| v.min(u32::MAX as u64) as u32)
                    .unwrap_or_else(|e| {
                        park(&s2, e);
                        k
                    })
            }),
        },
        slot,
    ))
}

fn real_net<'a>(ws: &'a Workspace, name: Option<&str>) -> Result<(&'a str, &'a RealFunctionNet)> {
    let (name, entry) = pick(&ws.function_nets, name, "function net")?;
    match entry {
        FunctionNetEntry::Real(n) => Ok((name, n)),
        FunctionNetEntry::Table(_) => Err(Error::InvalidArgument(format!(
            "`{name}` is a table net; this verb needs a real one"
        ))),
    }
}

fn funcspace(cmd: &FuncspaceCommand, flags: &Flags) -> Result<Report> {
    match cmd {
        FuncspaceCommand::Product { files, product } => {
            let ws = load(files)?;
            let (name, spec) = pick(&ws.products, product.as_deref(), "product")?;
            let nets = enumerate_lasso_nets(
                spec.point_count(),
                flags.max_prefix.unwrap_or(0),
                flags.max_cycle.unwrap_or(2),
            );
            let report = product_checks(spec, &nets)?;
            let (factor_lsb, product_lsb) = lsb_profile(spec)?;
            let lines = vec![
                format!(
                    "{name}: {} points, {} nets, {} net pairs",
                    spec.point_count(),
                    nets.len(),
                    report.net_pairs
                ),
                format!(
                    "  mismatches: approach {}, cauchy {}, completeness {}; uc-cauchy but not pointwise: {}",
                    report.approach_mismatches,
                    report.cauchy_mismatches,
                    report.completeness_mismatches,
                    report.uc_cauchy_not_pointwise
                ),
                format!("  lsb: factors {factor_lsb:?}, product {product_lsb}"),
            ];
            Ok(Report::new(
                Status::of(report.passed()),
                json!({ "product": name, "nets": nets.len(), "checks": report, "factor_lsb": factor_lsb, "product_lsb": product_lsb }),
                lines,
            ))
        }
        FuncspaceCommand::UcCheck {
            files,
            net,
            max_index,
            grid,
        } => {
            let ws = load(files)?;
            let (name, net) = real_net(&ws, net.as_deref())?;
            let d = Schedule::default();
            let schedule = Schedule {
                level: flags.level.unwrap_or(d.level),
                max_index: max_index.unwrap_or(d.max_index),
                grid: grid.unwrap_or(d.grid),
            };
            let v = uniform_convergence_check(net, &schedule)?;
            let (status, line) = match &v {
                UcVerdict::Holds { alpha, level, margin } => (
                    Status::Holds,
                    format!("{name}: uniformly within 2^-{level} from index {alpha} on (margin {margin})"),
                ),
                UcVerdict::Fails { index, t, value, level } => (
                    Status::Fails,
                    format!(
                        "{name}: |f_{index}(t) − f(t)| ≈ {} ≥ 2^-{} at t ≈ {}",
                        approx(value)?,
                        level.saturating_sub(1),
                        approx(t)?
                    ),
                ),
                UcVerdict::Unknown { level } => (Status::Undecided, format!("{name}: undecided at level {level}")),
            };
            Ok(Report::new(
                status,
                json!({ "net": name, "schedule": schedule, "verdict": v }),
                vec![line],
            ))
        }
        FuncspaceCommand::Pointwise {
            files,
            net,
            limit,
            grid,
            horizon,
        } => {
            let ws = load(files)?;
            let (name, entry) = pick(&ws.function_nets, net.as_deref(), "function net")?;
            match entry {
                FunctionNetEntry::Table(t) => pointwise_table(&ws, name, t, limit.as_deref()),
                FunctionNetEntry::Real(r) => pointwise_real(name, r, *grid, *horizon, flags.level.unwrap_or(8)),
            }
        }
        FuncspaceCommand::LimitSuite {
            files,
            net,
            max_index,
            grid,
        } => {
            let ws = load(files)?;
            let (name, net) = real_net(&ws, net.as_deref())?;
            let report = limit_regularity_suite(net, flags.level.unwrap_or(4), *grid, *max_index)?;
            let mut lines = vec![format!(
                "{name}: limit regularity {}",
                if report.verified() { "verified" } else { "refuted" }
            )];
            for l in &report.levels {
                lines.push(format!(
                    "  level {}: alpha {}, derived modulus {}, {} pairs, {} failures",
                    l.level, l.alpha, l.modulus, l.pairs, l.failures
                ));
            }
            Ok(Report::new(Status::of(report.verified()), json!({ "report": report }), lines))
        }
    }
}

fn pointwise_table(ws: &Workspace, name: &str, t: &crate::doc::TableFunctionNet, limit: Option<&str>) -> Result<Report> {
    let spec = &ws.products[&t.product];
    let (target_name, target) = match limit {
        Some(l) => match pick(&ws.function_nets, Some(l), "function net")? {
            (_, FunctionNetEntry::Table(g)) if g.product == t.product => (l.to_string(), g.net.clone()),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "`{l}` is not a table net on product `{}`",
                    t.product
                )))
            }
        },
        None => {
            let cycle = t.net.cycle();
            let last = *cycle.last().expect("cycles are nonempty");
            ("constant".to_string(), LassoNet::constant(last))
        }
    };
    let base = product_base(spec)?;
    let v = pointwise_approach(&t.net, &target, spec, &base)?;
    let space = base.space();
    let mut lines = vec![format!(
        "{name} ⤳ {target_name} pointwise: {}",
        verdict_line(space, &v.product)
    )];
    if let Some(c) = v.first_failing_coordinate {
        lines.push(format!("  first failing coordinate: {}", spec.index_labels()[c]));
    }
    let coords: Vec<Value> = v
        .coordinates
        .iter()
        .zip(spec.factors())
        .map(|(c, f)| verdict_json(f.space(), c))
        .collect();
    Ok(Report::new(
        Status::of(v.product.holds),
        json!({
            "net": name,
            "limit": target_name,
            "product": verdict_json(space, &v.product),
            "coordinates": coords,
            "first_failing_coordinate": v.first_failing_coordinate.map(|c| spec.index_labels()[c].clone()),
        }),
        lines,
    ))
}

/// Pointwise cauchy check with the modulus read off the tail bound: from
/// the first index whose tail is below `2^-(k+1)`, any two terms are within
/// `2^-k`.
fn pointwise_real(name: &str, net: &RealFunctionNet, grid: u64, horizon: u64, max_level: u32) -> Result<Report> {
    let tail = net
        .tail_bound
        .clone()
        .ok_or_else(|| Error::ConvergenceNotEstablished(format!("{name}: no tail bound to derive a pointwise modulus")))?;
    let modulus = Arc::new(move |_: &Rational, k: u32| {
        let r = pow2_neg(k + 1);
        (1..=horizon).find(|&n| tail(n) < r).unwrap_or(horizon + 1)
    });
    let points = net.domain.grid(grid)?;
    let report = pointwise_cauchy_check(net, modulus, &points, horizon, max_level)?;
    let line = match &report.witness {
        None => format!("{name}: pointwise cauchy on {} grid points", report.points.len()),
        Some(t) => format!("{name}: modulus broken at t = {t}"),
    };
    Ok(Report::new(
        Status::of(report.holds()),
        json!({ "net": name, "report": report }),
        vec![line],
    ))
}

fn integrate_verb(ws: &Workspace, measure: Option<&str>, integrand: Option<&str>, flags: &Flags) -> Result<Report> {
    let (mname, entry) = pick(&ws.measures, measure, "measure")?;
    let (fname, f) = pick(&ws.integrands, integrand, "integrand")?;
    let mut module = match &flags.module {
        Some(m) => m.parse::<ModuleSpec>()?,
        None => entry.module.clone(),
    };
    if module.dims() != entry.module.dims() {
        return Err(Error::InvalidArgument(format!(
            "module {module} has {} components; measure `{mname}` has {}",
            module.dims(),
            entry.module.dims()
        )));
    }
    if let Some(t) = &flags.tol {
        module = module.with_tolerance(parse_rational(t)?);
    }
    let tags: TagRule = match &flags.tags {
        Some(t) => t.parse()?,
        None => TagRule::Left,
    };
    let d = IntegrationOptions::default();
    let depth = flags.depth.unwrap_or(d.depth);
    let opts = IntegrationOptions {
        depth,
        tags,
        level: flags.level.unwrap_or(depth),
        ..d
    };
    let alg = entry.algebra(tags == TagRule::Right)?;
    let result = integrate(&alg, f, &entry.measure, &module, &opts)?;
    let (status, mut lines) = match &result.verdict {
        IntegrationVerdict::Value { value_exact, bound, .. } => (
            Status::Holds,
            vec![format!(
                "∫ {fname} d({mname}) = {}{}",
                value_exact.join(", "),
                bound.map(|b| format!(" (bound {b})")).unwrap_or_default()
            )],
        ),
        IntegrationVerdict::Diverged { oscillation, witness } => (
            Status::Fails,
            vec![format!(
                "∫ {fname} d({mname}) diverges: oscillation {oscillation} between {} tags ({}) and {} tags ({}) at depth {}",
                witness[0].tags,
                witness[0].value.join(", "),
                witness[1].tags,
                witness[1].value.join(", "),
                witness[0].depth
            )],
        ),
        IntegrationVerdict::Undecided => (
            Status::Undecided,
            vec![format!("∫ {fname} d({mname}): undecided at depth {depth}")],
        ),
    };
    for t in &result.trace {
        lines.push(format!(
            "  depth {:>2}: {:>6} blocks, value {}, delta {}, oscillation {}",
            t.depth,
            t.blocks,
            t.value.join(", "),
            t.delta.as_deref().unwrap_or("-"),
            t.oscillation
        ));
    }
    let mut json = serde_json::to_value(&result.verdict)?;
    json["trace"] = serde_json::to_value(&result.trace)?;
    json["measure"] = json!(mname);
    json["integrand"] = json!(fname);
    json["module"] = json!(module.to_string());
    json["options"] = serde_json::to_value(&opts)?;
    Ok(Report::new(status, json, lines))
}
