//! Synchronous stochastic pi-calculus: processes, structural congruence,
//! the one-step interaction relation, the encoding into HyLL over the
//! rates domain, and both directions of adequacy.
//!
//! Binders are nameless: `Chan::Bound(i)` refers to the `i`-th enclosing
//! channel binder (ν, input, or a definition parameter). Channels
//! introduced by opening a ν are named with a leading underscore; user
//! channel names never start with one, so the two never collide.

mod adequacy;
mod congr;
mod encode;
mod parse;
mod step;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::text::ParseError;
use crate::worlds::{sym, Sym, World, Q};

pub use adequacy::{
    certify, decode_canonical, derivation_prefix, derivation_to_trace, neutral_frontiers, phase_log, trace_to_derivation,
    trace_to_derivation_at, Certified, Frontier, Phase,
};
pub use congr::{congruent, normal_form};
pub use encode::{
    canonical_context, canonical_sequent, encode_env, encode_proc, encode_sum, interaction_theory, rate_entries, CanonicalSequent,
};
pub use parse::{parse_process, parse_spi, parse_trace, parse_trace_claims, write_process, write_spi, write_trace, SpiFile};
pub use step::{replay, step, Config, Redex};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chan {
    Bound(u32),
    Name(Sym),
}

impl Chan {
    pub fn name(s: &str) -> Chan {
        Chan::Name(sym(s))
    }

    fn shift_open(&self, depth: u32, with: &Sym) -> Chan {
        match self {
            Chan::Bound(i) if *i == depth => Chan::Name(with.clone()),
            Chan::Bound(i) if *i > depth => Chan::Bound(i - 1),
            c => c.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Par(Box<Process>, Box<Process>),
    /// `ν_r x. P`; `P` binds one channel.
    Nu(Q, Box<Process>),
    Call(Sym, Vec<Chan>),
    Sum(Sum),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sum {
    /// `x̄(m).P`
    Out(Chan, Chan, Box<Process>),
    /// `x(y).P`; `P` binds one channel.
    In(Chan, Box<Process>),
    /// `τ_r.P`
    Tau(Q, Box<Process>),
    Plus(Box<Sum>, Box<Sum>),
}

/// A one-prefix summand, the unit of choice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prefix {
    Out(Chan, Chan, Process),
    In(Chan, Process),
    Tau(Q, Process),
}

impl Process {
    pub fn par(a: Process, b: Process) -> Process {
        Process::Par(Box::new(a), Box::new(b))
    }

    pub fn nu(r: Q, body: Process) -> Process {
        Process::Nu(r, Box::new(body))
    }

    pub fn call(name: &str, args: Vec<Chan>) -> Process {
        Process::Call(sym(name), args)
    }

    pub fn out(x: Chan, m: Chan, p: Process) -> Process {
        Process::Sum(Sum::Out(x, m, Box::new(p)))
    }

    pub fn inp(x: Chan, body: Process) -> Process {
        Process::Sum(Sum::In(x, Box::new(body)))
    }

    pub fn tau(r: Q, p: Process) -> Process {
        Process::Sum(Sum::Tau(r, Box::new(p)))
    }

    /// `P1 | … | Pn`, or `0` when empty.
    pub fn par_all(ps: Vec<Process>) -> Process {
        let mut it = ps.into_iter().rev();
        match it.next() {
            None => Process::Nil,
            Some(last) => it.fold(last, |acc, p| Process::par(p, acc)),
        }
    }

    pub fn map_chans(&self, f: &mut dyn FnMut(&Chan, u32) -> Chan, depth: u32) -> Process {
        match self {
            Process::Nil => Process::Nil,
            Process::Par(a, b) => Process::par(a.map_chans(f, depth), b.map_chans(f, depth)),
            Process::Nu(r, p) => Process::nu(*r, p.map_chans(f, depth + 1)),
            Process::Call(x, args) => Process::Call(x.clone(), args.iter().map(|c| f(c, depth)).collect()),
            Process::Sum(s) => Process::Sum(s.map_chans(f, depth)),
        }
    }

    /// Instantiates the outermost loose binder (index 0) with `name`.
    pub fn open(&self, name: &Sym) -> Process {
        self.map_chans(&mut |c, d| c.shift_open(d, name), 0)
    }

    /// Abstracts `name` into a new binder; the inverse of [`Process::open`]
    /// on locally closed processes.
    pub fn close(&self, name: &Sym) -> Process {
        self.map_chans(
            &mut |c, d| match c {
                Chan::Name(n) if n == name => Chan::Bound(d),
                Chan::Bound(i) if *i >= d => Chan::Bound(i + 1),
                c => c.clone(),
            },
            0,
        )
    }

    /// Instantiates `args.len()` loose binders, the first argument for the
    /// outermost one.
    pub fn open_many(&self, args: &[Sym]) -> Process {
        args.iter().rev().fold(self.clone(), |p, a| p.open(a))
    }

    pub fn names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.map_chans(
            &mut |c, _| {
                if let Chan::Name(n) = c {
                    out.insert(n.clone());
                }
                c.clone()
            },
            0,
        );
        out
    }

    /// Largest number of loose binders referenced.
    pub fn loose(&self) -> u32 {
        let mut m = 0;
        self.map_chans(
            &mut |c, d| {
                if let Chan::Bound(i) = c {
                    if *i >= d {
                        m = m.max(i - d + 1);
                    }
                }
                c.clone()
            },
            0,
        );
        m
    }

    pub fn is_closed(&self) -> bool {
        self.loose() == 0
    }

    pub fn calls(&self, out: &mut Vec<(Sym, usize)>) {
        match self {
            Process::Nil => {}
            Process::Par(a, b) => {
                a.calls(out);
                b.calls(out);
            }
            Process::Nu(_, p) => p.calls(out),
            Process::Call(x, args) => out.push((x.clone(), args.len())),
            Process::Sum(s) => s.prefixes().iter().for_each(|p| p.cont().calls(out)),
        }
    }

    /// Calls not under any prefix.
    fn unguarded_calls(&self, out: &mut Vec<Sym>) {
        match self {
            Process::Par(a, b) => {
                a.unguarded_calls(out);
                b.unguarded_calls(out);
            }
            Process::Nu(_, p) => p.unguarded_calls(out),
            Process::Call(x, _) => out.push(x.clone()),
            Process::Nil | Process::Sum(_) => {}
        }
    }

    /// Rates of all ν binders and τ prefixes.
    pub fn rates_used(&self, out: &mut Vec<Q>) {
        match self {
            Process::Nil | Process::Call(..) => {}
            Process::Par(a, b) => {
                a.rates_used(out);
                b.rates_used(out);
            }
            Process::Nu(r, p) => {
                out.push(*r);
                p.rates_used(out);
            }
            Process::Sum(s) => {
                for p in s.prefixes() {
                    if let Prefix::Tau(r, _) = &p {
                        out.push(*r);
                    }
                    p.cont().rates_used(out);
                }
            }
        }
    }
}

impl Sum {
    pub fn map_chans(&self, f: &mut dyn FnMut(&Chan, u32) -> Chan, depth: u32) -> Sum {
        match self {
            Sum::Out(x, m, p) => Sum::Out(f(x, depth), f(m, depth), Box::new(p.map_chans(f, depth))),
            Sum::In(x, p) => Sum::In(f(x, depth), Box::new(p.map_chans(f, depth + 1))),
            Sum::Tau(r, p) => Sum::Tau(*r, Box::new(p.map_chans(f, depth))),
            Sum::Plus(a, b) => Sum::Plus(Box::new(a.map_chans(f, depth)), Box::new(b.map_chans(f, depth))),
        }
    }

    /// Summands from left to right.
    pub fn prefixes(&self) -> Vec<Prefix> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Prefix>) {
        match self {
            Sum::Out(x, m, p) => out.push(Prefix::Out(x.clone(), m.clone(), (**p).clone())),
            Sum::In(x, p) => out.push(Prefix::In(x.clone(), (**p).clone())),
            Sum::Tau(r, p) => out.push(Prefix::Tau(*r, (**p).clone())),
            Sum::Plus(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Right-nested choice over nonempty `ps`.
    pub fn of_prefixes(ps: Vec<Prefix>) -> Sum {
        let mut it = ps.into_iter().rev().map(Prefix::into_sum);
        let last = it.next().expect("a sum has at least one summand");
        it.fold(last, |acc, s| Sum::Plus(Box::new(s), Box::new(acc)))
    }
}

impl Prefix {
    pub fn cont(&self) -> &Process {
        match self {
            Prefix::Out(_, _, p) | Prefix::In(_, p) | Prefix::Tau(_, p) => p,
        }
    }

    pub fn into_sum(self) -> Sum {
        match self {
            Prefix::Out(x, m, p) => Sum::Out(x, m, Box::new(p)),
            Prefix::In(x, p) => Sum::In(x, Box::new(p)),
            Prefix::Tau(r, p) => Sum::Tau(r, Box::new(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Def {
    pub arity: usize,
    /// Parameters are the `arity` loose binders, first parameter outermost.
    pub body: Process,
}

/// Recursive definitions `X(x1, …, xn) ≜ P`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    defs: BTreeMap<Sym, Def>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn define(&mut self, name: &str, arity: usize, body: Process) -> Result<(), SpiError> {
        if encode::is_reserved_atom(name) || name == encode::RT {
            return Err(SpiError::Malformed(format!("{} is reserved by the encoding", name)));
        }
        if self.defs.contains_key(name) {
            return Err(SpiError::Duplicate(name.to_string()));
        }
        if body.loose() as usize > arity {
            return Err(SpiError::Malformed(format!("body of {} refers to an unbound channel", name)));
        }
        self.defs.insert(sym(name), Def { arity, body });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Def> {
        self.defs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Def)> {
        self.defs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// All calls resolve with the right arity and every body is guarded.
    pub fn validate(&self) -> Result<(), SpiError> {
        for (name, def) in &self.defs {
            let mut g = Vec::new();
            def.body.unguarded_calls(&mut g);
            if !g.is_empty() {
                return Err(SpiError::Unguarded(name.to_string()));
            }
            self.check_calls(&def.body)?;
        }
        Ok(())
    }

    pub fn check_calls(&self, p: &Process) -> Result<(), SpiError> {
        let mut cs = Vec::new();
        p.calls(&mut cs);
        for (x, n) in cs {
            let def = self.get(&x).ok_or_else(|| SpiError::UnknownDef(x.to_string()))?;
            if def.arity != n {
                return Err(SpiError::Arity { name: x.to_string(), expected: def.arity, got: n });
            }
        }
        Ok(())
    }

    /// The body of `name` with its parameters replaced by `args`.
    pub fn unfold(&self, name: &str, args: &[Chan]) -> Result<Process, SpiError> {
        let def = self.get(name).ok_or_else(|| SpiError::UnknownDef(name.to_string()))?;
        if def.arity != args.len() {
            return Err(SpiError::Arity { name: name.to_string(), expected: def.arity, got: args.len() });
        }
        let n = args.len() as u32;
        Ok(def.body.map_chans(
            &mut |c, d| match c {
                Chan::Bound(i) if *i >= d && *i < d + n => {
                    // Index d + n - 1 is the first parameter.
                    let k = (d + n - 1 - i) as usize;
                    match &args[k] {
                        Chan::Name(s) => Chan::Name(s.clone()),
                        Chan::Bound(j) => Chan::Bound(j + d),
                    }
                }
                Chan::Bound(i) if *i >= d + n => Chan::Bound(i - n),
                c => c.clone(),
            },
            0,
        ))
    }
}

/// Inherent channel rates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RateTable(BTreeMap<Sym, Q>);

impl RateTable {
    pub fn new() -> RateTable {
        RateTable::default()
    }

    pub fn insert(&mut self, x: &str, r: Q) {
        self.0.insert(sym(x), r);
    }

    pub fn get(&self, x: &str) -> Option<Q> {
        self.0.get(x).copied()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &Q)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every free channel of `p` has a rate.
    pub fn covers(&self, p: &Process) -> Result<(), SpiError> {
        match p.names().into_iter().find(|n| !self.contains(n)) {
            Some(n) => Err(SpiError::MissingRate(n.to_string())),
            None => Ok(()),
        }
    }
}

impl FromIterator<(Sym, Q)> for RateTable {
    fn from_iter<I: IntoIterator<Item = (Sym, Q)>>(it: I) -> Self {
        RateTable(it.into_iter().collect())
    }
}

/// Whether a channel name was introduced by opening a ν.
pub fn is_local(name: &str) -> bool {
    name.starts_with('_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Event {
    Internal { rate: Q },
    Sync { channel: Sym, rate: Q, message: Sym },
}

impl Event {
    pub fn rate(&self) -> Q {
        match self {
            Event::Internal { rate } | Event::Sync { rate, .. } => *rate,
        }
    }

    fn rename(&self, f: &mut impl FnMut(&Sym) -> Sym) -> Event {
        match self {
            Event::Internal { rate } => Event::Internal { rate: *rate },
            Event::Sync { channel, rate, message } => Event::Sync { channel: f(channel), rate: *rate, message: f(message) },
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Internal { rate } => write!(f, "internal({})", rate),
            Event::Sync { channel, rate, message } => write!(f, "synchronize({}, {}, {})", channel, rate, message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub event: Event,
    /// The successor, closed over the channels opened so far.
    pub after: Process,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Process,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn new(initial: Process) -> Trace {
        Trace { initial, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rates(&self) -> Vec<Q> {
        self.steps.iter().map(|s| s.event.rate()).collect()
    }

    /// The lock world after `k` steps: rid composed with the first `k` rates.
    pub fn world_after(&self, k: usize) -> World {
        World::Rates(self.steps[..k].iter().map(|s| s.event.rate()).collect())
    }

    pub fn final_process(&self) -> &Process {
        self.steps.last().map(|s| &s.after).unwrap_or(&self.initial)
    }

    pub fn events(&self) -> Vec<Event> {
        self.steps.iter().map(|s| s.event.clone()).collect()
    }

    pub fn prefix(&self, k: usize) -> Trace {
        Trace { initial: self.initial.clone(), steps: self.steps[..k].to_vec() }
    }

    /// Events with ν-introduced channel names replaced by `_1`, `_2`, …
    /// in order of first appearance, so traces produced with different
    /// fresh-name supplies compare equal.
    pub fn canonical_events(&self) -> Vec<Event> {
        let mut map: BTreeMap<Sym, Sym> = BTreeMap::new();
        let mut f = |n: &Sym| {
            if !is_local(n) {
                return n.clone();
            }
            let k = map.len() + 1;
            map.entry(n.clone()).or_insert_with(|| sym(&format!("_{}", k))).clone()
        };
        self.steps.iter().map(|s| s.event.rename(&mut f)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpiError {
    #[error("unknown definition {0}")]
    UnknownDef(String),
    #[error("{name} expects {expected} channels, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("definition {0} is defined twice")]
    Duplicate(String),
    #[error("definition {0} has a call that is not under a prefix")]
    Unguarded(String),
    #[error("channel {0} has no rate")]
    MissingRate(String),
    #[error("{0}")]
    Malformed(String),
    #[error("step {step}: {msg}")]
    Replay { step: usize, msg: String },
    #[error("not a canonical derivation: {0}")]
    NotCanonical(String),
    #[error("no derivation found: {0}")]
    Search(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[cfg(test)]
mod tests;
