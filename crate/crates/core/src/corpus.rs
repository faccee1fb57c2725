//! Curated inputs shared by the test suites, the benches and the CLI
//! self-test: focusing goals, pure sequents, processes, sampled traces
//! and negative controls.

use std::collections::{BTreeSet, HashSet};

use crate::focusing::{check_focused, prove_unfocused, search, FocSequent, SearchBudget};
use crate::kernel::{Proof, Sequent};
use crate::simulator::{simulate, SimConfig};
use crate::spi::{
    canonical_context, canonical_sequent, certify, congruent, derivation_prefix, derivation_to_trace, neutral_frontiers, parse_process,
    parse_spi, phase_log, rate_entries, trace_to_derivation_at, write_trace, Config, Env, Process, RateTable, SpiError, SpiFile, Trace,
    TraceStep,
};
use crate::syntax::{Judgement, LeafMap, Polarity, Prop, Term};
use crate::text::parse_sequent;
use crate::worlds::{sym, world_eq, DomainId, Sym, WorldExpr};

/// A sequent the focused engine should prove.
#[derive(Debug, Clone, Copy)]
pub struct FocusGoal {
    pub name: &'static str,
    pub domain: DomainId,
    pub pos: &'static [&'static str],
    pub sequent: &'static str,
}

impl FocusGoal {
    pub fn parse(&self) -> Sequent {
        let pos: BTreeSet<Sym> = self.pos.iter().map(|s| sym(s)).collect();
        parse_sequent(self.sequent, &pos).unwrap_or_else(|e| panic!("corpus goal {}: {}", self.name, e))
    }
}

const fn goal(name: &'static str, domain: DomainId, pos: &'static [&'static str], sequent: &'static str) -> FocusGoal {
    FocusGoal { name, domain, pos, sequent }
}

use DomainId::{Rates, Temporal, Unit};

/// Modal, hybrid and algebraic identities. `box A` is `faw u. (A at u)`,
/// `dia A` is `exw u. (A at u)`, `rho_v A` is `dn u. (A at u . v)`.
pub const FOCUS_GOALS: &[FocusGoal] = &[
    goal("s5", Unit, &[], ". ; exw u. (a at u) @ w |- faw v. ((exw u. (a at u)) at v) @ w"),
    goal("box-t", Rates, &[], ". ; faw u. (a at u) @ w |- a @ w"),
    goal("dia-intro", Rates, &[], ". ; a @ w |- exw u. (a at u) @ w"),
    goal("rho-right", Rates, &[], ". ; a @ w . [3] |- dn u. (a at u . [3]) @ w"),
    goal("rho-left", Rates, &[], ". ; dn u. (a at u . [3]) @ w |- a @ w . [3]"),
    goal("rho-compose", Rates, &[], ". ; dn u. (a at u . [2] . [5]) @ w |- dn u. ((dn v. (a at v . [5])) at u . [2]) @ w"),
    goal("dn-tensor", Rates, &["p", "q"], ". ; dn u. (p * q) @ w |- (dn u. p) * (dn u. q) @ w"),
    goal("dn-tensor-back", Rates, &["p", "q"], ". ; (dn u. p) * (dn u. q) @ w |- dn u. (p * q) @ w"),
    goal("dn-with", Temporal, &[], ". ; dn u. (a & b) @ w |- (dn u. a) & (dn u. b) @ w"),
    goal("at-tensor", Rates, &[], ". ; ((a * b) at [2]) @ w |- (a at [2]) * (b at [2]) @ w"),
    goal("tensor-comm", Rates, &["p", "q"], ". ; p * q @ w |- q * p @ w"),
    goal("tensor-assoc", Rates, &[], ". ; (a * b) * c @ w |- a * (b * c) @ w"),
    goal("tensor-unit", Temporal, &[], ". ; a * 1 @ w |- a @ w"),
    goal("with-comm", Unit, &[], ". ; a & b @ w |- b & a @ w"),
    goal("plus-comm", Unit, &[], ". ; a + b @ w |- b + a @ w"),
    goal("tensor-plus-dist", Unit, &[], ". ; a * (b + c) @ w |- a * b + a * c @ w"),
    goal("tensor-plus-undist", Unit, &[], ". ; a * b + a * c @ w |- a * (b + c) @ w"),
    goal("curry", Rates, &[], ". ; (a * b) -o c @ w |- a -o b -o c @ w"),
    goal("with-plus", Temporal, &[], ". ; a & b @ w |- a + b @ w"),
    goal("bang-dup", Unit, &[], ". ; !a @ w |- a * a @ w"),
];

/// Propositional sequents without hybrid connectives whose judgements sit
/// at assorted worlds; half are provable.
pub const PURE_SEQUENTS: [&str; 20] = [
    ". ; a @ u |- a @ v",
    ". ; a * b @ u |- b * a @ v",
    ". ; a @ u, b @ v |- a * b @ w",
    ". ; a -o b @ u, a @ v |- b @ w",
    ". ; a & b @ u |- a @ w",
    ". ; a @ u |- a + b @ w",
    ". ; !a @ u |- a * a @ w",
    "a @ u ; . |- !a @ w",
    ". ; (a * b) -o c @ u |- a -o b -o c @ w",
    ". ; 1 @ u, a @ v |- a @ w",
    ". ; a @ u |- a * a @ w",
    ". ; a @ u, b @ v |- a @ w",
    ". ; a + b @ u |- a @ w",
    ". ; . |- a -o b @ w",
    ". ; a -o b @ u |- b -o a @ w",
    ". ; a & b @ u |- a * b @ w",
    ". ; . |- 0 @ w",
    ". ; a -o a @ u |- a @ w",
    ". ; !(a -o b) @ u, a @ v |- b * b @ w",
    ". ; a + b @ u |- a & b @ w",
];

struct ForceRid;

impl LeafMap for ForceRid {
    fn world(&mut self, w: &WorldExpr, _depth: u32) -> Option<WorldExpr> {
        match w {
            WorldExpr::Param(_) | WorldExpr::Lit(_) => Some(WorldExpr::Id),
            _ => None,
        }
    }
    fn term(&mut self, _t: &Term, _depth: u32) -> Option<Term> {
        None
    }
}

/// Every world in `s` replaced by the identity world.
pub fn force_rid(s: &Sequent) -> Sequent {
    s.map_with(&mut ForceRid)
}

/// Provability as a plain intuitionistic linear logic sequent: all worlds
/// forced to the identity, searched in the rates domain, where nothing
/// but the identity world is then in play.
pub fn ill_provable(s: &Sequent, budget: &SearchBudget) -> Option<Proof> {
    prove_unfocused(&force_rid(s), DomainId::Rates, budget).1
}

pub fn pure_sequents() -> Vec<Sequent> {
    PURE_SEQUENTS.iter().map(|s| parse_sequent(s, &BTreeSet::new()).expect("pure corpus parses")).collect()
}

/// Process files. `two-party` is the two-component exchange
/// `x!(a).tau(1) | x?(y).y!(y)` whose derivation has a golden phase log.
pub const PROCESSES: &[(&str, &str)] = &[
    ("two-party", "channel x : 4\nchannel a : 1\nrun x!(a).tau(1) | x?(y).y!(y)"),
    ("race", "run tau(2) | tau(3)"),
    ("oscillator", "def X = tau(2).Y\ndef Y = tau(5).X\nrun X"),
    ("choice", "channel c : 3\nrun c!(c) + tau(1) | c?(y).tau(2)"),
    ("restriction", "run new(2) d in (d!(d).tau(1) | d?(y).y!(y))"),
    (
        "ping-pong",
        "channel p : 1\nchannel q : 2\ndef Ping(x, y) = x!(x).y?(z).Ping(x, y)\ndef Pong(x, y) = x?(z).y!(y).Pong(x, y)\nrun Ping(p, q) | Pong(p, q)",
    ),
    ("mobility", "channel c : 1\nrun new(3) k in (c!(k).k?(z).tau(1)) | c?(y).y!(y)"),
    (
        "cell",
        "channel c : 2\nchannel m : 1\ndef Cell(x, v) = x!(v).Cell(x, v) + x?(w).Cell(x, w)\nrun Cell(c, m) | c?(y).tau(1) | c!(c)",
    ),
    ("producer-consumer", "channel b : 2\ndef Prod(x) = tau(1).x!(x).Prod(x)\ndef Cons(x) = x?(y).tau(4).Cons(x)\nrun Prod(b) | Cons(b)"),
];

pub fn process(name: &str) -> SpiFile {
    let src = PROCESSES.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no process {}", name)).1;
    parse_spi(src).expect("corpus process parses")
}

/// The phase log of the derivation for the single `two-party` step.
pub const TWO_PARTY_PHASES: [&str; 6] =
    ["focus inter @ s", "select syn", "unlock output x(a)", "unlock input x witness a", "cleanup s -> s . [4]", "close"];

/// The phase log of the derivation for the one-step trace of
/// `two-party`, starting at the world parameter `s`.
pub fn two_party_phase_log() -> Result<Vec<String>, SpiError> {
    let f = process("two-party");
    let run = f.run.clone().expect("two-party runs");
    let cfg = Config::new(&f.env, &f.rates, &run)?;
    let r = cfg.redexes()?.into_iter().next().ok_or_else(|| SpiError::Malformed("two-party is stuck".into()))?;
    let next = cfg.fire(&f.env, &r)?;
    let mut t = Trace::new(run);
    t.steps.push(TraceStep { event: r.event, after: next.process() });
    let d = trace_to_derivation_at(&f.env, &f.rates, &t, WorldExpr::param("s"))?;
    let report = check_focused(&d, DomainId::Rates);
    if !report.ok {
        return Err(SpiError::NotCanonical(report.to_string()));
    }
    Ok(phase_log(&d)?.iter().map(ToString::to_string).collect())
}

/// A sampled trace with the process it came from.
#[derive(Debug, Clone)]
pub struct Sample {
    pub process: &'static str,
    pub env: Env,
    pub rates: RateTable,
    pub trace: Trace,
}

/// Distinct simulated traces of at most `max_len` steps, `seeds` runs per
/// corpus process.
pub fn sample_traces(seeds: u64, max_len: usize) -> Result<Vec<Sample>, SpiError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (name, _) in PROCESSES {
        let f = process(name);
        let run = f.run.clone().expect("corpus processes run");
        for seed in 0..seeds {
            let len = 1 + (seed as usize % max_len.max(1));
            let len = len.min(max_len);
            let res = simulate(&f.env, &f.rates, &run, &SimConfig { seed, max_steps: len, ..SimConfig::default() })?;
            if seen.insert((*name, write_trace(&res.trace))) {
                out.push(Sample { process: name, env: f.env.clone(), rates: f.rates.clone(), trace: res.trace });
            }
        }
    }
    Ok(out)
}

/// Checks the full round trip for one trace: the derivation checks, reads
/// back to the same events and congruent processes, ends at the world of
/// the trace's rates, and every neutral frontier reads back to the
/// matching trace prefix. Returns the number of frontiers.
pub fn round_trip(env: &Env, rates: &RateTable, t: &Trace) -> Result<usize, String> {
    let c = certify(env, rates, t).map_err(|e| e.to_string())?;
    if !c.report.ok {
        return Err(format!("derivation does not check: {}", c.report));
    }
    let back = derivation_to_trace(&c.proof).map_err(|e| e.to_string())?;
    if back.canonical_events() != t.canonical_events() {
        return Err("events differ after the round trip".into());
    }
    let same = |a: &Process, b: &Process| congruent(env, a, b).unwrap_or(false);
    if !same(&back.initial, &t.initial) {
        return Err("initial process differs after the round trip".into());
    }
    if let Some(k) = (0..t.len()).find(|&k| !same(&back.steps[k].after, &t.steps[k].after)) {
        return Err(format!("process after step {} differs after the round trip", k + 1));
    }
    let fr = neutral_frontiers(&c.proof).map_err(|e| e.to_string())?;
    let last = fr.last().ok_or("no neutral frontier")?;
    if last.events != t.len() || !world_eq(&last.world, &WorldExpr::lit(t.world_after(t.len())), DomainId::Rates) {
        return Err(format!("final world {} is not {}", last.world, t.world_after(t.len())));
    }
    for (k, f) in fr.iter().enumerate() {
        let pre = derivation_prefix(&c.proof, k).map_err(|e| e.to_string())?;
        if pre.canonical_events() != t.prefix(f.events).canonical_events() {
            return Err(format!("frontier {} does not read back to the trace prefix", k));
        }
        if !world_eq(&f.world, &WorldExpr::lit(t.world_after(f.events)), DomainId::Rates) {
            return Err(format!("frontier {} sits at {}, not {}", k, f.world, t.world_after(f.events)));
        }
    }
    Ok(fr.len())
}

/// A sequent the engine must not prove, with a twin that differs only
/// in the missing ingredient and is provable.
#[derive(Debug, Clone)]
pub struct Control {
    pub name: &'static str,
    pub refuted: FocSequent,
    pub twin: Option<FocSequent>,
}

fn p(src: &str) -> Process {
    parse_process(src).expect("control process parses")
}

fn pos_atom(name: &str, args: &[&str]) -> Prop {
    Prop::Atom(Polarity::Pos, sym(name), args.iter().map(|a| Term::cnst(a)).collect())
}

/// Reordering two outputs, and unlocking a sum without its `dt` token.
pub fn negative_controls() -> Vec<Control> {
    let mut rates = RateTable::new();
    for c in ["x", "y", "m", "n"] {
        rates.insert(c, 1.into());
    }
    let env = Env::new();
    let s = WorldExpr::param("s");
    let swap = canonical_sequent(&env, &rates, &p("x!(m).y!(n)"), &p("y!(n).x!(m)"), s.clone(), s.clone())
        .expect("controls are well formed")
        .sequent;
    let same = canonical_sequent(&env, &rates, &p("x!(m).y!(n)"), &p("x!(m).y!(n)"), s.clone(), s.clone())
        .expect("controls are well formed")
        .sequent;

    let mut r = rates.clone();
    let lockd = canonical_context(&mut r, &p("x!(m)"));
    let gamma = rate_entries(&r);
    let goal = Judgement::new(Prop::tensor(Prop::at(pos_atom("out", &["x", "m"]), WorldExpr::Id), Prop::down(Prop::Top)), WorldExpr::Id);
    let token = Judgement::new(Prop::up(pos_atom("dt", &[])), WorldExpr::Id);
    let mut with_token = lockd.clone();
    with_token.push(token);
    vec![
        Control { name: "output-swap", refuted: swap, twin: Some(same) },
        Control {
            name: "unlock-without-token",
            refuted: FocSequent::neutral(gamma.clone(), lockd, goal.clone()),
            twin: Some(FocSequent::neutral(gamma, with_token, goal)),
        },
    ]
}

/// Whether plain bounded search proves `s` in the rates domain.
pub fn found(s: &FocSequent, fuel: usize) -> bool {
    search(s, DomainId::Rates, &SearchBudget::with_decisions(fuel)).proof.is_some()
}
