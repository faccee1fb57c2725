//! Adequacy in both directions.
//!
//! A trace becomes a focused derivation of its canonical sequent by
//! running proof search under a strategy that replays the trace: at each
//! lock neutral it focuses on `inter`, picks `int` or `syn`, unlocks the
//! participating sums at the right summand, and fires the contract.
//! Reading a derivation back walks its main path (always the last
//! premise) and turns each `inter` block into one event.

use std::collections::BTreeMap;
use std::fmt;

use super::congr::Comp;
use super::encode::{
    canonical_sequent, decode_comp, decode_rates, interaction_theory, is_guard_token, is_lock, is_reserved_atom, is_rid, mentions_lock,
    single_rate, with_leaves, CanonicalSequent, RT,
};
use super::step::{events_match, replay, Config};
use super::{congruent, Env, Event, Process, RateTable, SpiError, Trace, TraceStep};
use crate::focusing::{check_focused, search_with, Decision, FRule, FocProof, FocSequent, Form, Goal, NeutralView, SearchBudget, Strategy};
use crate::kernel::CheckReport;
use crate::syntax::{Inst, Judgement, Polarity, Prop, Term};
use crate::worlds::{DomainId, NormWorld, RItem, Sym, World, WorldExpr, Q};

/// Number of rate constants in a lock world, ignoring symbolic parts.
fn steps_in(w: &WorldExpr) -> Option<usize> {
    match NormWorld::of(w, DomainId::Rates).ok()? {
        NormWorld::Rates(items) => Some(items.iter().filter(|i| matches!(i, RItem::Rate(_))).count()),
        _ => None,
    }
}

fn norm(w: &WorldExpr) -> Option<NormWorld> {
    NormWorld::of(w, DomainId::Rates).ok()
}

fn then_rate(w: &WorldExpr, r: Q) -> WorldExpr {
    WorldExpr::compose(w.clone(), WorldExpr::rate(r))
}

fn is_contract(p: &Prop) -> bool {
    matches!(p, Prop::Forall(..)) && mentions_lock(p)
}

/// Name of the definition a `⟦E⟧` clause unfolds.
fn clause_name(p: &Prop) -> Option<Sym> {
    match p {
        Prop::Forall(_, a) | Prop::At(a, _) => clause_name(a),
        Prop::With(a, _) => match &**a {
            Prop::Lolli(h, _) => match &**h {
                Prop::Atom(Polarity::Pos, x, _) => Some(x.clone()),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn call_name(p: &Prop) -> Option<&Sym> {
    match p {
        Prop::Up(a) => match &**a {
            Prop::Atom(Polarity::Pos, x, _) if !is_reserved_atom(x) => Some(x),
            _ => None,
        },
        _ => None,
    }
}

/// `rt x` hypotheses, either as entered or as left behind by `!L`.
fn rt_entry(j: &Judgement) -> Option<(&Term, Option<Q>)> {
    let (atom, w) = match &j.prop {
        Prop::At(a, w) if is_rid(&j.world) => (&**a, w),
        a => (a, &j.world),
    };
    match atom {
        Prop::Atom(Polarity::Neg, n, args) if &**n == RT && args.len() == 1 => Some((&args[0], single_rate(w))),
        _ => None,
    }
}

#[derive(Debug, Clone)]
struct Plan {
    syn: bool,
    /// Participating linear hypotheses: the τ sum, or the output then the
    /// input sum.
    items: Vec<Judgement>,
    /// The chosen summand of each.
    leaves: Vec<Prop>,
}

#[derive(Debug, Clone, PartialEq)]
enum Mode {
    Idle,
    Inter(bool),
    Clause,
    Sum(Prop),
}

struct Guide<'e> {
    env: &'e Env,
    events: Vec<Event>,
    /// The replayed configuration after each step.
    targets: Vec<Process>,
    goal: Judgement,
    inter: usize,
    clauses: BTreeMap<Sym, usize>,
    plans: BTreeMap<usize, Plan>,
    mode: Mode,
}

impl Guide<'_> {
    fn plan(&self, view: &NeutralView, k: usize) -> Option<Plan> {
        let rates = decode_rates(&view.gamma);
        let mut comps = Vec::new();
        let mut at = Vec::new();
        for (i, j) in view.delta.iter().enumerate() {
            if is_lock(&j.prop) {
                continue;
            }
            comps.push(decode_comp(j)?);
            at.push(i);
        }
        let cfg = Config::from_parts(rates, comps);
        let want = &self.events[k];
        let mut found = None;
        for r in cfg.redexes().ok()? {
            if !events_match(&r.event, want) {
                continue;
            }
            let next = cfg.fire(self.env, &r).ok()?;
            if congruent(self.env, &next.process(), &self.targets[k]).unwrap_or(false) {
                let exact = r.event == *want;
                found = Some(r);
                if exact {
                    break;
                }
            }
        }
        let r = found?;
        let items: Vec<Judgement> = r.parts.iter().map(|(c, _)| view.delta[at[*c]].clone()).collect();
        let leaves = r
            .parts
            .iter()
            .zip(&items)
            .map(|((_, s), j)| match &j.prop {
                Prop::Lolli(_, sum) => with_leaves(sum).get(*s).map(|p| (*p).clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Plan { syn: matches!(r.event, Event::Sync { .. }), items, leaves })
    }

    fn choose(&mut self, view: &NeutralView, options: &[Decision]) -> Vec<Decision> {
        self.mode = Mode::Idle;
        if view.goal == self.goal {
            if let Some(lock) = view.delta.iter().find(|j| is_lock(&j.prop)) {
                if let Some(x) = view.delta.iter().find_map(|j| call_name(&j.prop)) {
                    self.mode = Mode::Clause;
                    return self.clauses.get(x).map(|&i| vec![Decision::Cplf(i)]).unwrap_or_default();
                }
                let Some(k) = steps_in(&lock.world) else { return Vec::new() };
                if k >= self.events.len() {
                    return vec![Decision::Rf];
                }
                let Some(plan) = self.plan(view, k) else { return Vec::new() };
                self.mode = Mode::Inter(plan.syn);
                self.plans.insert(k, plan);
                return vec![Decision::Cplf(self.inter)];
            }
            if let Some(c) = view.delta.iter().position(|j| is_contract(&j.prop)) {
                let Some(plan) = steps_in(&view.delta[c].world).and_then(|k| self.plans.get(&k)) else {
                    return Vec::new();
                };
                let dts = view.delta.iter().filter(|j| is_guard_token(&j.prop)).count();
                if dts == 0 {
                    return vec![Decision::Lf(c)];
                }
                let Some(n) = plan.items.len().checked_sub(dts) else { return Vec::new() };
                let item = &plan.items[n];
                let leaf = plan.leaves[n].clone();
                let Some(i) = view.delta.iter().position(|j| j == item) else { return Vec::new() };
                self.mode = Mode::Sum(leaf);
                return vec![Decision::Lf(i)];
            }
            return Vec::new();
        }
        if let Prop::Down(a) = &view.goal.prop {
            if let Prop::Atom(Polarity::Neg, n, args) = &**a {
                if &**n == RT && args.len() == 1 {
                    let want = single_rate(&view.goal.world);
                    return options
                        .iter()
                        .copied()
                        .filter(|d| match d {
                            Decision::Cplf(i) => match rt_entry(&view.gamma[*i]) {
                                Some((x, r)) => {
                                    let chan_ok = matches!(args[0], Term::Meta(_)) || *x == args[0];
                                    let rate_ok = want.is_none() || r == want;
                                    chan_ok && rate_ok
                                }
                                None => false,
                            },
                            _ => false,
                        })
                        .collect();
                }
            }
        }
        // Closing: match the goal against what is left, without touching
        // the theory again.
        options.iter().copied().filter(|d| !matches!(d, Decision::Cplf(_))).collect()
    }
}

impl Strategy for Guide<'_> {
    fn order(&mut self, view: &NeutralView, options: &mut Vec<Decision>) {
        let keep = self.choose(view, options);
        options.retain(|d| keep.contains(d));
        options.sort_by_key(|d| keep.iter().position(|k| k == d));
    }

    fn with_branch(&mut self, focus: &Judgement) -> Option<u8> {
        match &self.mode {
            Mode::Inter(syn) if mentions_lock(&focus.prop) => Some(if *syn { 2 } else { 1 }),
            Mode::Clause => Some(1),
            Mode::Sum(leaf) => match &focus.prop {
                Prop::With(a, b) => {
                    if with_leaves(a).contains(&leaf) {
                        Some(1)
                    } else if with_leaves(b).contains(&leaf) {
                        Some(2)
                    } else {
                        None
                    }
                }
                _ => None,
            },
            _ => None,
        }
    }
}

fn guided_budget() -> SearchBudget {
    SearchBudget {
        max_decisions: 1_000_000,
        max_depth: 1_000_000,
        copy_limit: u32::MAX,
        max_steps: 50_000_000,
        world_witness_hints: Vec::new(),
        iterative: false,
        ..SearchBudget::default()
    }
}

/// A focused derivation of the canonical sequent from the trace's initial
/// process to its final one, with `s = rid` and `t` the accumulated rates.
pub fn trace_to_derivation(env: &Env, rates: &RateTable, trace: &Trace) -> Result<FocProof, SpiError> {
    trace_to_derivation_at(env, rates, trace, WorldExpr::Id)
}

/// As [`trace_to_derivation`], starting the lock at world `s`.
pub fn trace_to_derivation_at(env: &Env, rates: &RateTable, trace: &Trace, s: WorldExpr) -> Result<FocProof, SpiError> {
    let configs = replay(env, rates, trace)?;
    let last = configs.last().expect("replay yields the initial configuration").process();
    let t = WorldExpr::compose(s.clone(), WorldExpr::lit(World::Rates(trace.rates())));
    let CanonicalSequent { sequent, .. } = canonical_sequent(env, rates, &trace.initial, &last, s, t)?;
    let Form::Active { goal: Goal::Pos(goal), .. } = &sequent.form else { unreachable!("canonical sequents are neutral") };
    let mut guide = Guide {
        env,
        events: trace.events(),
        targets: configs[1..].iter().map(Config::process).collect(),
        goal: goal.clone(),
        inter: sequent.gamma.len() - 1,
        clauses: env.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect(),
        plans: BTreeMap::new(),
        mode: Mode::Idle,
    };
    let out = search_with(&sequent, DomainId::Rates, &guided_budget(), &mut guide);
    out.proof.ok_or_else(|| {
        SpiError::Search(if out.aborted {
            format!("guided search ran out of steps after {}", out.steps)
        } else {
            "guided search found no derivation".into()
        })
    })
}

/// A derivation together with the checker's verdict on it.
#[derive(Debug, Clone)]
pub struct Certified {
    pub proof: FocProof,
    pub report: CheckReport,
}

/// Builds the derivation of `trace` and checks it.
pub fn certify(env: &Env, rates: &RateTable, trace: &Trace) -> Result<Certified, SpiError> {
    let proof = trace_to_derivation(env, rates, trace)?;
    let report = check_deep(&proof);
    Ok(Certified { proof, report })
}

/// Derivations of long traces are tall; check them on a roomy stack.
fn check_deep(p: &FocProof) -> CheckReport {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 28)
            .spawn_scoped(s, || check_focused(p, DomainId::Rates))
            .expect("spawn checker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// The configuration and lock world of a lock neutral sequent.
pub fn decode_canonical(seq: &FocSequent) -> Result<(Config, WorldExpr), SpiError> {
    let bad = |m: &str| SpiError::NotCanonical(m.to_string());
    match &seq.form {
        Form::Active { omega, goal: Goal::Pos(_) } if omega.is_empty() => {}
        _ => return Err(bad("not a neutral sequent")),
    }
    let mut lock = None;
    let mut comps: Vec<Comp> = Vec::new();
    for j in &seq.delta {
        if is_lock(&j.prop) {
            if lock.replace(j.world.clone()).is_some() {
                return Err(bad("two locks"));
            }
        } else {
            comps.push(decode_comp(j).ok_or_else(|| SpiError::NotCanonical(format!("cannot read {} as a process", j)))?);
        }
    }
    let world = lock.ok_or_else(|| bad("no lock in the linear context"))?;
    Ok((Config::from_parts(decode_rates(&seq.gamma), comps), world))
}

fn is_lock_neutral(p: &FocProof) -> bool {
    matches!(&p.conclusion.form, Form::Active { omega, goal: Goal::Pos(_) } if omega.is_empty())
        && p.conclusion.delta.iter().any(|j| is_lock(&j.prop))
}

/// One stage in the life of an interaction, as a derivation shows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase {
    FocusInter { world: WorldExpr },
    Select { syn: bool },
    UnlockOutput { channel: Sym, message: Sym },
    UnlockInput { channel: Sym, witness: Sym },
    UnlockTau { rate: Q },
    Cleanup { from: WorldExpr, to: WorldExpr },
    Unfold { name: Sym },
    Close,
}

fn show_world(w: &WorldExpr) -> String {
    match norm(w) {
        Some(n) => n.to_expr().to_string(),
        None => w.to_string(),
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::FocusInter { world } => write!(f, "focus inter @ {}", show_world(world)),
            Phase::Select { syn } => write!(f, "select {}", if *syn { "syn" } else { "int" }),
            Phase::UnlockOutput { channel, message } => write!(f, "unlock output {}({})", channel, message),
            Phase::UnlockInput { channel, witness } => write!(f, "unlock input {} witness {}", channel, witness),
            Phase::UnlockTau { rate } => write!(f, "unlock tau({})", rate),
            Phase::Cleanup { from, to } => write!(f, "cleanup {} -> {}", show_world(from), show_world(to)),
            Phase::Unfold { name } => write!(f, "unfold {}", name),
            Phase::Close => f.write_str("close"),
        }
    }
}

/// A lock neutral sequent on the main path of a canonical derivation.
#[derive(Debug, Clone)]
pub struct Frontier<'p> {
    /// Events read off the derivation before this point.
    pub events: usize,
    pub world: WorldExpr,
    pub proof: &'p FocProof,
}

struct Walk<'p> {
    trace: Trace,
    frontiers: Vec<Frontier<'p>>,
    phases: Vec<Phase>,
}

fn main_path(p: &FocProof) -> Vec<&FocProof> {
    let mut out = vec![p];
    let mut cur = p;
    while let Some(next) = cur.premises.last() {
        out.push(next);
        cur = next;
    }
    out
}

fn inst_name(i: &Inst) -> Option<Sym> {
    match i {
        Inst::Term(Term::Fn(x, a)) if a.is_empty() => Some(x.clone()),
        _ => None,
    }
}

fn inst_rate(i: &Inst) -> Option<Q> {
    match i {
        Inst::World(w) => single_rate(w),
        _ => None,
    }
}

/// Reads the event of one `inter` block.
fn block_event(block: &[&FocProof]) -> Result<Event, SpiError> {
    let bad = |m: &str| SpiError::NotCanonical(m.to_string());
    let syn = block
        .iter()
        .find_map(|n| match (&n.rule, &n.conclusion.form) {
            (FRule::WithL(i), Form::LeftFocus { focus, .. }) if mentions_lock(&focus.prop) => Some(*i == 2),
            _ => None,
        })
        .ok_or_else(|| bad("no choice between int and syn"))?;
    let c = block
        .iter()
        .position(|n| {
            n.rule == FRule::Lf && n.witness.principal.and_then(|d| n.conclusion.delta.get(d)).is_some_and(|j| is_contract(&j.prop))
        })
        .ok_or_else(|| bad("the contract is never used"))?;
    let insts: Vec<&Inst> = block[c + 1..]
        .iter()
        .take_while(|n| matches!(n.rule, FRule::ForallL | FRule::AtLF))
        .filter(|n| n.rule == FRule::ForallL)
        .filter_map(|n| n.witness.inst.as_ref())
        .collect();
    let rate = |i: &Inst| inst_rate(i).ok_or_else(|| bad("contract rate is not a single rate"));
    let name = |i: &Inst| inst_name(i).ok_or_else(|| bad("contract channel is not a name"));
    if syn {
        let [x, r, m] = insts.as_slice() else { return Err(bad("syn contract needs three instances")) };
        Ok(Event::Sync { channel: name(x)?, rate: rate(r)?, message: name(m)? })
    } else {
        let [r] = insts.as_slice() else { return Err(bad("int contract needs one instance")) };
        Ok(Event::Internal { rate: rate(r)? })
    }
}

fn walk(p: &FocProof, stop: Option<usize>) -> Result<Walk<'_>, SpiError> {
    let bad = |m: String| SpiError::NotCanonical(m);
    let inter = interaction_theory();
    let path = main_path(p);
    if !is_lock_neutral(path[0]) {
        return Err(bad("the conclusion is not a lock neutral sequent".into()));
    }
    let (cfg, mut world) = decode_canonical(&path[0].conclusion)?;
    let mut w = Walk {
        trace: Trace::new(cfg.process()),
        frontiers: vec![Frontier { events: 0, world: world.clone(), proof: path[0] }],
        phases: Vec::new(),
    };
    let mut i = 0;
    loop {
        if stop.is_some_and(|s| w.frontiers.len() > s) {
            break;
        }
        let node = path[i];
        match node.rule {
            FRule::Rf => {
                w.phases.push(Phase::Close);
                break;
            }
            FRule::Cplf => {
                let g = node
                    .witness
                    .principal
                    .and_then(|c| node.conclusion.gamma.get(c))
                    .ok_or_else(|| bad("copy without a principal".into()))?;
                let j =
                    (i + 1..path.len()).find(|&j| is_lock_neutral(path[j])).ok_or_else(|| bad("a block never returns to a lock".into()))?;
                let (cfg, next) = decode_canonical(&path[j].conclusion)?;
                if *g == inter {
                    let event = block_event(&path[i + 1..j])?;
                    let r = event.rate();
                    if norm(&next) != norm(&then_rate(&world, r)) {
                        return Err(bad(format!(
                            "lock moved from {} to {}, expected a step of rate {}",
                            show_world(&world),
                            show_world(&next),
                            r
                        )));
                    }
                    w.phases.push(Phase::FocusInter { world: world.clone() });
                    match &event {
                        Event::Sync { channel, message, .. } => {
                            w.phases.push(Phase::Select { syn: true });
                            w.phases.push(Phase::UnlockOutput { channel: channel.clone(), message: message.clone() });
                            w.phases.push(Phase::UnlockInput { channel: channel.clone(), witness: message.clone() });
                        }
                        Event::Internal { rate } => {
                            w.phases.push(Phase::Select { syn: false });
                            w.phases.push(Phase::UnlockTau { rate: *rate });
                        }
                    }
                    w.phases.push(Phase::Cleanup { from: world.clone(), to: next.clone() });
                    w.trace.steps.push(TraceStep { event, after: cfg.process() });
                } else if let Some(x) = clause_name(&g.prop) {
                    if norm(&next) != norm(&world) {
                        return Err(bad(format!("unfolding {} moved the lock", x)));
                    }
                    w.phases.push(Phase::Unfold { name: x });
                } else {
                    return Err(bad(format!("focus on {} at a lock", g)));
                }
                world = next;
                w.frontiers.push(Frontier { events: w.trace.len(), world: world.clone(), proof: path[j] });
                i = j;
            }
            r => return Err(bad(format!("rule {} at a lock", r))),
        }
    }
    Ok(w)
}

/// Reads the trace a canonical derivation represents.
pub fn derivation_to_trace(p: &FocProof) -> Result<Trace, SpiError> {
    Ok(walk(p, None)?.trace)
}

/// The trace read off the derivation up to its `k`-th lock neutral
/// sequent (the conclusion being the 0th).
pub fn derivation_prefix(p: &FocProof, k: usize) -> Result<Trace, SpiError> {
    Ok(walk(p, Some(k))?.trace)
}

/// Every lock neutral sequent on the main path, in order.
pub fn neutral_frontiers(p: &FocProof) -> Result<Vec<Frontier<'_>>, SpiError> {
    Ok(walk(p, None)?.frontiers)
}

/// The derivation as a list of interaction phases.
pub fn phase_log(p: &FocProof) -> Result<Vec<Phase>, SpiError> {
    Ok(walk(p, None)?.phases)
}
