//! The `hyll` command line: certificate checking, proof search, and the
//! stochastic pi-calculus tools.
//!
//! Exit status: 0 on success, 1 when the answer is negative (no proof
//! within the budget, a certificate or trace that does not check), 2 on
//! usage, I/O and parse errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use hyll_core::corpus;
use hyll_core::focusing::{prove_unfocused, FRule, FocProof, Form, SearchBudget};
use hyll_core::kernel::{check_proof, CheckOptions};
use hyll_core::simulator::{frequencies, replicate, simulate, SimConfig, SimResult};
use hyll_core::spi::{
    canonical_context, certify, encode_env, encode_proc, interaction_theory, parse_spi, parse_trace_claims, phase_log, rate_entries,
    replay, write_trace, Config, Event, SpiError, SpiFile, Trace,
};
use hyll_core::text::{parse_certificate, parse_goal_file, parse_world, write_certificate, Certificate, ParseError};
use hyll_core::worlds::{DomainId, World};

/// Decision bound when neither `--fuel` nor `HYLL_FUEL_DEFAULT` is given.
pub const DEFAULT_FUEL: usize = 8;
pub const FUEL_VAR: &str = "HYLL_FUEL_DEFAULT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A located syntax error.
    #[error("{0}")]
    Parse(String),
    /// A well-formed question with a negative answer.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) => 2,
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Domain {
    Unit,
    Temporal,
    Rates,
}

impl From<Domain> for DomainId {
    fn from(d: Domain) -> DomainId {
        match d {
            Domain::Unit => DomainId::Unit,
            Domain::Temporal => DomainId::Temporal,
            Domain::Rates => DomainId::Rates,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyll", version, about = "Hybrid linear logic: proof checking, proof search, stochastic pi-calculus")]
pub struct Cli {
    /// Output style; `structured` prints one JSON document.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a proof certificate.
    Check { file: PathBuf },
    /// Search for proofs of the goals in a goal file.
    Prove(ProveArgs),
    /// Stochastic pi-calculus tools.
    #[command(subcommand)]
    Spi(SpiCommand),
    /// Run a built-in suite.
    Selftest {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    pub goal: PathBuf,
    /// World domain; defaults to the file's `domain` line, then `rates`.
    #[arg(long, value_enum)]
    pub domain: Option<Domain>,
    /// Decision bound.
    #[arg(long)]
    pub fuel: Option<usize>,
    /// World tried first when instantiating world quantifiers.
    #[arg(long = "witness")]
    pub witnesses: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum SpiCommand {
    /// Print the enabled interactions and follow the first one.
    Step {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Print the encoding of a process file.
    Encode { file: PathBuf },
    /// Build and check the derivation of a trace.
    Certify { file: PathBuf, trace: PathBuf },
    /// Run the stochastic semantics.
    Simulate(SimArgs),
}

#[derive(Debug, Args)]
pub struct SimArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long = "stop-time")]
    pub stop_time: Option<f64>,
    /// Certify every trace produced.
    #[arg(long)]
    pub certify: bool,
    /// Trace file, or with `--runs` a directory of `run-N.trace` files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Independent replications with derived seeds.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Adequacy,
}

/// What a command prints: human text and a JSON document.
struct Report {
    text: String,
    data: Value,
}

/// Parses `args`, whose first element is the program name, runs the
/// command writing to `out` and `err`, and returns the exit status.
pub fn main_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{}", e) } else { write!(err, "{}", e) };
            return code;
        }
    };
    let format = cli.format;
    let (code, report) = match run(cli.command) {
        Ok(r) => (0, Ok(r)),
        Err((e, partial)) => (e.code(), Err((e, partial))),
    };
    match (format, report) {
        (Format::Text, Ok(r)) => {
            let _ = write!(out, "{}", r.text);
        }
        (Format::Text, Err((e, partial))) => {
            if let Some(r) = partial {
                let _ = write!(out, "{}", r.text);
            }
            let _ = writeln!(err, "error: {}", e);
        }
        (Format::Structured, Ok(r)) => {
            let _ = writeln!(out, "{}", json!({ "status": "ok", "exit": 0, "result": r.data }));
        }
        (Format::Structured, Err((e, partial))) => {
            let status = if code == 1 { "failed" } else { "error" };
            let doc = json!({
                "status": status,
                "exit": code,
                "error": e.to_string(),
                "result": partial.map(|r| r.data).unwrap_or(Value::Null),
            });
            let _ = writeln!(out, "{}", doc);
        }
    }
    code
}

type Outcome = Result<Report, (CliError, Option<Report>)>;

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Check { file } => check(&file),
        Command::Prove(a) => prove(&a),
        Command::Spi(SpiCommand::Step { file, count }) => spi_step(&file, count).map_err(|e| (e, None)),
        Command::Spi(SpiCommand::Encode { file }) => spi_encode(&file).map_err(|e| (e, None)),
        Command::Spi(SpiCommand::Certify { file, trace }) => spi_certify(&file, &trace),
        Command::Spi(SpiCommand::Simulate(a)) => spi_simulate(&a),
        Command::Selftest { suite: Suite::Adequacy } => selftest_adequacy(),
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))
}

fn located(path: &Path, e: &ParseError) -> CliError {
    CliError::Parse(format!("{}:{}:{}: {}", path.display(), e.line, e.col, e.msg))
}

fn spi_error(path: &Path, e: SpiError) -> CliError {
    match e {
        SpiError::Parse(p) => located(path, &p),
        SpiError::Replay { .. } | SpiError::NotCanonical(_) | SpiError::Search(_) => CliError::Failed(e.to_string()),
        other => CliError::Parse(format!("{}: {}", path.display(), other)),
    }
}

/// The decision bound: the flag, then the environment, then the default.
pub fn fuel(flag: Option<usize>) -> Res<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(FUEL_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{} must be a natural number, got `{}`", FUEL_VAR, v))),
        Err(_) => Ok(DEFAULT_FUEL),
    }
}

// check

fn check(file: &Path) -> Outcome {
    let src = read(file).map_err(|e| (e, None))?;
    let cert = parse_certificate(&src).map_err(|e| (located(file, &e), None))?;
    let report = check_proof(&cert.proof, &CheckOptions::with_cut(cert.domain));
    let text = format!("{}: {} ({} nodes, domain {})\n", file.display(), report, cert.proof.size(), cert.domain);
    let data = json!({
        "ok": report.ok,
        "nodes": cert.proof.size(),
        "domain": cert.domain.name(),
        "failure": report.failure.as_ref().map(|f| json!({ "path": f.path, "rule": f.rule, "reason": f.reason })),
    });
    if report.ok {
        Ok(Report { text, data })
    } else {
        Err((CliError::Failed(format!("certificate does not check: {}", report)), Some(Report { text, data })))
    }
}

// prove

/// One line per focusing decision, indented by nesting, each followed by
/// the rules of the phase it opens.
pub fn outline(p: &FocProof) -> Vec<String> {
    let mut out = Vec::new();
    let (rules, first) = phase(std::slice::from_ref(p));
    if !rules.is_empty() {
        out.push(format!("invert  [{}]", rules.join(" ")));
    }
    let mut stack: Vec<(&FocProof, usize)> = first.into_iter().rev().map(|k| (k, 0)).collect();
    while let Some((n, depth)) = stack.pop() {
        let s = &n.conclusion;
        let what = match (n.rule, n.witness.principal) {
            (FRule::Lf, Some(i)) => format!("focus left on {}", s.delta[i]),
            (FRule::Cplf, Some(i)) => format!("copy and focus on {}", s.gamma[i]),
            _ => match &s.form {
                Form::Active { goal, .. } => format!("focus right on {}", goal.judgement()),
                _ => n.rule.to_string(),
            },
        };
        let (rules, below) = phase(&n.premises);
        let rules = if rules.is_empty() { String::new() } else { format!("  [{}]", rules.join(" ")) };
        out.push(format!("{}{}{}", "  ".repeat(depth), what, rules));
        stack.extend(below.into_iter().rev().map(|k| (k, depth + 1)));
    }
    out
}

/// The rules of `roots` up to the next decisions, and those decisions.
fn phase(roots: &[FocProof]) -> (Vec<&'static str>, Vec<&FocProof>) {
    let mut rules = Vec::new();
    let mut below = Vec::new();
    let mut todo: Vec<&FocProof> = roots.iter().rev().collect();
    while let Some(k) = todo.pop() {
        if k.rule.is_decision() {
            below.push(k);
        } else {
            rules.push(k.rule.name());
            todo.extend(k.premises.iter().rev());
        }
    }
    (rules, below)
}

fn prove(a: &ProveArgs) -> Outcome {
    let pre = || -> Res<_> {
        let src = read(&a.goal)?;
        let file = parse_goal_file(&src).map_err(|e| located(&a.goal, &e))?;
        let domain: DomainId = a.domain.map(Into::into).or(file.domain).unwrap_or(DomainId::Rates);
        let mut hints = Vec::new();
        for w in &a.witnesses {
            hints.push(parse_world(w).map_err(|e| CliError::Usage(format!("--witness `{}`: column {}: {}", w, e.col, e.msg)))?);
        }
        Ok((file, domain, hints, fuel(a.fuel)?))
    };
    let (file, domain, hints, fuel) = pre().map_err(|e| (e, None))?;
    if file.goals.is_empty() {
        return Err((CliError::Usage(format!("{}: no goals", a.goal.display())), None));
    }
    let budget = SearchBudget { world_witness_hints: hints, ..SearchBudget::with_decisions(fuel) };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut missing = Vec::new();
    for g in &file.goals {
        let (outcome, proof) = prove_unfocused(&g.sequent, domain, &budget);
        match (outcome.proof, proof) {
            (Some(fp), Some(p)) => {
                let cert = Certificate { domain, proof: p };
                let cert_text = write_certificate(&cert).map_err(|e| (CliError::Failed(e), None))?;
                let lines = outline(&fp);
                let _ = writeln!(text, "goal {}: found ({} decisions)", g.name, fp.decisions());
                for l in &lines {
                    let _ = writeln!(text, "  {}", l);
                }
                text.push_str(&cert_text);
                results.push(json!({ "goal": g.name, "found": true, "phases": lines, "certificate": cert_text }));
            }
            _ => {
                let why = if outcome.exhausted { " (search space exhausted)" } else { "" };
                let _ = writeln!(text, "goal {}: budget exhausted at fuel {}{}", g.name, fuel, why);
                results.push(json!({ "goal": g.name, "found": false, "exhausted": outcome.exhausted, "fuel": fuel }));
                missing.push(g.name.clone());
            }
        }
    }
    let report = Report { text, data: json!({ "domain": domain.name(), "fuel": fuel, "goals": results }) };
    if missing.is_empty() {
        Ok(report)
    } else {
        Err((CliError::Failed(format!("budget exhausted: no proof of {} at fuel {}", missing.join(", "), fuel)), Some(report)))
    }
}

// spi

fn load_spi(path: &Path) -> Res<SpiFile> {
    parse_spi(&read(path)?).map_err(|e| spi_error(path, e))
}

fn running(path: &Path, f: &SpiFile) -> Res<hyll_core::spi::Process> {
    f.run.clone().ok_or_else(|| CliError::Usage(format!("{}: no `run` line", path.display())))
}

fn spi_step(file: &Path, count: usize) -> Res<Report> {
    let f = load_spi(file)?;
    let p = running(file, &f)?;
    let mut cfg = Config::new(&f.env, &f.rates, &p).map_err(|e| spi_error(file, e))?;
    let mut text = format!("initial {}\n", p);
    let mut steps = Vec::new();
    for k in 1..=count {
        let rs = cfg.redexes().map_err(|e| spi_error(file, e))?;
        if rs.is_empty() {
            text.push_str("stuck\n");
            break;
        }
        for r in &rs {
            let _ = writeln!(text, "  enabled {}", r.event);
        }
        cfg = cfg.fire(&f.env, &rs[0]).map_err(|e| spi_error(file, e))?;
        let after = cfg.process();
        let _ = writeln!(text, "step {} {}\nafter {}", k, rs[0].event, after);
        steps.push(json!({
            "enabled": rs.iter().map(|r| r.event.to_string()).collect::<Vec<_>>(),
            "event": rs[0].event.to_string(),
            "after": after.to_string(),
        }));
    }
    Ok(Report { text, data: json!({ "initial": p.to_string(), "steps": steps }) })
}

fn spi_encode(file: &Path) -> Res<Report> {
    let f = load_spi(file)?;
    let mut text = String::new();
    let mut sections = serde_json::Map::new();
    let mut section = |title: &str, lines: Vec<String>| {
        let _ = writeln!(text, "# {}", title);
        for l in &lines {
            let _ = writeln!(text, "{}", l);
        }
        sections.insert(title.to_string(), json!(lines));
    };
    section("definitions", encode_env(&f.env).iter().map(ToString::to_string).collect());
    section("rates", rate_entries(&f.rates).iter().map(ToString::to_string).collect());
    section("interaction", vec![interaction_theory().to_string()]);
    if let Some(p) = &f.run {
        section("process", vec![format!("{} @ id", encode_proc(p))]);
        let mut rates = f.rates.clone();
        let ctx = canonical_context(&mut rates, p);
        section("canonical context", ctx.iter().map(ToString::to_string).collect());
    }
    Ok(Report { text, data: Value::Object(sections) })
}

fn world_of(rates: &[hyll_core::worlds::Q]) -> World {
    World::Rates(rates.to_vec())
}

/// Explains a replay failure at step `k` as a failed world equation.
fn replay_failure(f: &SpiFile, t: &Trace, k: usize, msg: &str) -> String {
    let claimed = &t.steps[k - 1].event;
    let before = world_of(&t.rates()[..k - 1]);
    let fired =
        replay(&f.env, &f.rates, &t.prefix(k - 1)).ok().and_then(|cfgs| cfgs.last().cloned()).and_then(|c| c.redexes().ok()).and_then(
            |rs| {
                rs.into_iter().find(|r| match (&r.event, claimed) {
                    (Event::Internal { .. }, Event::Internal { .. }) => true,
                    (Event::Sync { channel: a, .. }, Event::Sync { channel: b, .. }) => a == b,
                    _ => false,
                })
            },
        );
    match fired {
        Some(r) if r.event.rate() != claimed.rate() => {
            let mut want = t.rates()[..k - 1].to_vec();
            want.push(r.event.rate());
            let got = t.rates()[..k].to_vec();
            format!(
                "step {}: world equation {} = {} . [{}] fails: {} fires at rate {}, so the world is {}, not {}",
                k,
                world_of(&got),
                before,
                claimed.rate(),
                r.event,
                r.event.rate(),
                world_of(&want),
                world_of(&got),
            )
        }
        _ => format!("step {}: {} (world before the step: {})", k, msg, before),
    }
}

fn replay_outcome(f: &SpiFile, t: &Trace) -> Option<String> {
    match replay(&f.env, &f.rates, t) {
        Ok(_) => None,
        Err(SpiError::Replay { step, msg }) => Some(replay_failure(f, t, step, &msg)),
        Err(e) => Some(e.to_string()),
    }
}

fn spi_certify(file: &Path, trace: &Path) -> Outcome {
    let pre = || -> Res<_> {
        let f = load_spi(file)?;
        let (t, claims) = parse_trace_claims(&read(trace)?).map_err(|e| spi_error(trace, e))?;
        Ok((f, t, claims))
    };
    let (f, t, claims) = pre().map_err(|e| (e, None))?;
    let fail = |msg: String| Err((CliError::Failed(msg), None));
    for (k, (line, col, w)) in claims.iter().enumerate() {
        let actual = t.world_after(k + 1);
        if *w != actual {
            let prev = t.world_after(k);
            return fail(format!(
                "{}:{}:{}: world equation fails at step {}: {} . [{}] = {}, but the trace claims {}",
                trace.display(),
                line,
                col,
                k + 1,
                prev,
                t.steps[k].event.rate(),
                actual,
                w
            ));
        }
    }
    if let Some(run) = &f.run {
        if !hyll_core::spi::congruent(&f.env, run, &t.initial).map_err(|e| (spi_error(file, e), None))? {
            return fail(format!("{}: the trace does not start from the file's `run` process", trace.display()));
        }
    }
    if let Some(msg) = replay_outcome(&f, &t) {
        return fail(format!("{}: {}", trace.display(), msg));
    }
    let c = certify(&f.env, &f.rates, &t).map_err(|e| (spi_error(trace, e), None))?;
    let log: Vec<String> = phase_log(&c.proof).map(|l| l.iter().map(ToString::to_string).collect()).unwrap_or_default();
    let world = t.world_after(t.len());
    let mut text = String::new();
    for l in &log {
        let _ = writeln!(text, "  {}", l);
    }
    let _ = writeln!(text, "{} steps, final world {}, derivation: {}", t.len(), world, c.report);
    let data = json!({ "steps": t.len(), "world": world.to_string(), "phases": log, "ok": c.report.ok });
    if c.report.ok {
        Ok(Report { text, data })
    } else {
        Err((CliError::Failed(format!("derivation does not check: {}", c.report)), Some(Report { text, data })))
    }
}

fn describe(r: &SimResult) -> String {
    let mut s = write_trace(&r.trace);
    let delays: Vec<String> = r.delays.iter().map(|d| format!("{:.6}", d)).collect();
    let _ = writeln!(s, "# delays {}", delays.join(" "));
    let _ = writeln!(s, "# total time {:.6}", r.total_time);
    if let Some(c) = &r.certified {
        let _ = writeln!(s, "# certified {}", c);
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Res<()> {
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))
}

fn spi_simulate(a: &SimArgs) -> Outcome {
    let pre = || -> Res<_> {
        let f = load_spi(&a.file)?;
        let p = running(&a.file, &f)?;
        if a.runs == 0 {
            return Err(CliError::Usage("--runs must be positive".into()));
        }
        if a.stop_time.is_some_and(|t| t.is_nan() || t < 0.0) {
            return Err(CliError::Usage("--stop-time must be a nonnegative number".into()));
        }
        Ok((f, p))
    };
    let (f, p) = pre().map_err(|e| (e, None))?;
    let cfg = SimConfig { seed: a.seed, max_steps: a.steps, stop_time: a.stop_time, certify: a.certify };
    let results = if a.runs == 1 {
        vec![simulate(&f.env, &f.rates, &p, &cfg).map_err(|e| (spi_error(&a.file, e), None))?]
    } else {
        replicate(&f.env, &f.rates, &p, &cfg, a.runs).map_err(|e| (spi_error(&a.file, e), None))?
    };
    let uncertified = results.iter().filter(|r| r.certified.as_ref().is_some_and(|c| !c.ok)).count();
    let mut text = String::new();
    let data;
    if a.runs == 1 {
        let r = &results[0];
        let body = describe(r);
        match &a.out {
            Some(path) => {
                write_file(path, &body).map_err(|e| (e, None))?;
                let _ = writeln!(text, "{} steps, total time {:.6}, trace written to {}", r.trace.len(), r.total_time, path.display());
            }
            None => text.push_str(&body),
        }
        data = json!({
            "trace": write_trace(&r.trace),
            "delays": r.delays,
            "total_time": r.total_time,
            "certified": r.certified.as_ref().map(|c| c.ok),
        });
    } else {
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir).map_err(|e| (CliError::Usage(format!("{}: {}", dir.display(), e)), None))?;
            for (i, r) in results.iter().enumerate() {
                write_file(&dir.join(format!("run-{}.trace", i + 1)), &describe(r)).map_err(|e| (e, None))?;
            }
        }
        let table = frequencies(&results);
        let n = results.len() as f64;
        let mean_time = results.iter().map(|r| r.total_time).sum::<f64>() / n;
        let _ = writeln!(text, "{} runs, mean total time {:.6}", results.len(), mean_time);
        let mut rows = Vec::new();
        for (events, count) in &table {
            let evs: Vec<String> = events.iter().map(ToString::to_string).collect();
            let shown = if evs.is_empty() { "(no steps)".to_string() } else { evs.join(" ; ") };
            let _ = writeln!(text, "{:>8} {:.4}  {}", count, *count as f64 / n, shown);
            rows.push(json!({ "events": evs, "count": count, "frequency": *count as f64 / n }));
        }
        if a.certify {
            let _ = writeln!(text, "certified {} of {}", results.len() - uncertified, results.len());
        }
        data = json!({ "runs": results.len(), "mean_total_time": mean_time, "frequencies": rows });
    }
    let report = Report { text, data };
    if uncertified > 0 {
        Err((CliError::Failed(format!("{} trace(s) failed certification", uncertified)), Some(report)))
    } else {
        Ok(report)
    }
}

// selftest

fn selftest_adequacy() -> Outcome {
    let samples = corpus::sample_traces(4, 6).map_err(|e| (CliError::Failed(e.to_string()), None))?;
    let mut text = String::new();
    let mut failures = Vec::new();
    for s in &samples {
        match corpus::round_trip(&s.env, &s.rates, &s.trace) {
            Ok(fr) => {
                let _ = writeln!(text, "ok   {:<18} {} steps, {} frontiers", s.process, s.trace.len(), fr);
            }
            Err(e) => {
                let _ = writeln!(text, "FAIL {:<18} {}", s.process, e);
                failures.push(format!("{}: {}", s.process, e));
            }
        }
    }
    let log = corpus::two_party_phase_log().unwrap_or_default();
    let golden = log == corpus::TWO_PARTY_PHASES;
    let _ = writeln!(text, "{} two-party phase log", if golden { "ok  " } else { "FAIL" });
    if !golden {
        failures.push(format!("two-party phase log is {:?}", log));
    }
    let processes: std::collections::BTreeSet<&str> = samples.iter().map(|s| s.process).collect();
    let _ = writeln!(text, "{} traces over {} processes, {} failures", samples.len(), processes.len(), failures.len());
    let data = json!({ "traces": samples.len(), "processes": processes.len(), "failures": failures });
    let report = Report { text, data };
    if failures.is_empty() {
        Ok(report)
    } else {
        Err((CliError::Failed(format!("{} adequacy check(s) failed", failures.len())), Some(report)))
    }
}

/// Runs `main_with` on a thread with a large stack; derivations of long
/// traces are deep.
pub fn main_on_big_stack(args: Vec<String>) -> i32 {
    std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            main_with(args, &mut stdout.lock(), &mut stderr.lock())
        })
        .expect("spawn main thread")
        .join()
        .unwrap_or(2)
}
