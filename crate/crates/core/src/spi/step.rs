//! The interaction relation: INT (`τ_r.P →r P`) and SYN
//! (`x̄(m).P + M | x(y).Q + N →rate(x) P | Q[m/y]`), with PAR, RES and
//! CONG applied ambiently by working on opened configurations.

use std::collections::BTreeSet;

use super::congr::{close_over, congruent, flatten, Comp, Fresh};
use super::{is_local, Chan, Env, Event, Prefix, Process, RateTable, SpiError, Trace};
use crate::worlds::{Sym, Q};

/// A process with every top-level ν opened into the rate table and every
/// top-level call unfolded: a multiset of choices. Opened channels are
/// named `_c1`, `_c2`, … and never reused within a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub rates: RateTable,
    pub(crate) comps: Vec<Comp>,
}

/// One enabled interaction. `parts` lists (component, summand) pairs: the
/// τ summand, or the output then the input summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub event: Event,
    pub parts: Vec<(usize, usize)>,
}

impl Config {
    pub fn new(env: &Env, rates: &RateTable, p: &Process) -> Result<Config, SpiError> {
        env.check_calls(p)?;
        rates.covers(p)?;
        let mut cfg = Config { rates: rates.clone(), comps: Vec::new() };
        cfg.absorb(env, p)?;
        Ok(cfg)
    }

    pub(crate) fn from_parts(rates: RateTable, comps: Vec<Comp>) -> Config {
        Config { rates, comps }
    }

    fn fresh(&self) -> Fresh {
        let mut used: BTreeSet<Sym> = self.rates.iter().map(|(n, _)| n.clone()).collect();
        for c in &self.comps {
            used.extend(c.to_process().names());
        }
        Fresh::new("_c", used)
    }

    /// Adds the components of `p`, opening ν and unfolding calls.
    fn absorb(&mut self, env: &Env, p: &Process) -> Result<(), SpiError> {
        let mut fresh = self.fresh();
        fresh.reserve(p.names());
        self.absorb_with(env, p, &mut fresh, 0)
    }

    fn absorb_with(&mut self, env: &Env, p: &Process, fresh: &mut Fresh, depth: usize) -> Result<(), SpiError> {
        let flat = flatten(p, fresh, false);
        for (n, r) in flat.bound {
            self.rates.insert(&n, r);
        }
        for c in flat.comps {
            match c {
                Comp::Call(x, args) => {
                    // Guarded bodies never expose a call, so this only
                    // trips on environments that skipped validation.
                    if depth > 64 {
                        return Err(SpiError::Unguarded(x.to_string()));
                    }
                    let body = env.unfold(&x, &args)?;
                    self.absorb_with(env, &body, fresh, depth + 1)?;
                }
                c => self.comps.push(c),
            }
        }
        Ok(())
    }

    /// The configuration as a closed process: opened channels become ν
    /// binders again, in order of first use.
    pub fn process(&self) -> Process {
        let body = Process::par_all(self.comps.iter().map(Comp::to_process).collect());
        let mut bound: Vec<(Sym, Q)> = Vec::new();
        for c in &self.comps {
            for n in c.to_process().names() {
                if is_local(&n) && !bound.iter().any(|(b, _)| *b == n) {
                    if let Some(r) = self.rates.get(&n) {
                        bound.push((n, r));
                    }
                }
            }
        }
        close_over(body, &bound)
    }

    /// The configuration with opened channels left free.
    pub fn open_process(&self) -> Process {
        Process::par_all(self.comps.iter().map(Comp::to_process).collect())
    }

    pub fn summands(&self, i: usize) -> &[Prefix] {
        match &self.comps[i] {
            Comp::Sum(ps) => ps,
            Comp::Call(..) => &[],
        }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    fn rate_of(&self, c: &Chan) -> Result<(Sym, Q), SpiError> {
        match c {
            Chan::Name(n) => self.rates.get(n).map(|r| (n.clone(), r)).ok_or_else(|| SpiError::MissingRate(n.to_string())),
            Chan::Bound(_) => Err(SpiError::Malformed("loose channel binder in a configuration".into())),
        }
    }

    /// All redexes: internal actions in component order, then
    /// synchronizations ordered by channel name, then summand indices.
    pub fn redexes(&self) -> Result<Vec<Redex>, SpiError> {
        let mut ints = Vec::new();
        let mut syns = Vec::new();
        for (i, ci) in self.comps.iter().enumerate() {
            let Comp::Sum(ps) = ci else { continue };
            for (j, pj) in ps.iter().enumerate() {
                match pj {
                    Prefix::Tau(r, _) => ints.push(Redex { event: Event::Internal { rate: *r }, parts: vec![(i, j)] }),
                    Prefix::Out(x, m, _) => {
                        let (xn, r) = self.rate_of(x)?;
                        let Chan::Name(mn) = m else {
                            return Err(SpiError::Malformed("loose message binder".into()));
                        };
                        for (k, ck) in self.comps.iter().enumerate() {
                            let Comp::Sum(qs) = ck else { continue };
                            if k == i {
                                continue;
                            }
                            for (l, ql) in qs.iter().enumerate() {
                                if let Prefix::In(y, _) = ql {
                                    if y == x {
                                        let event = Event::Sync { channel: xn.clone(), rate: r, message: mn.clone() };
                                        syns.push((xn.clone(), Redex { event, parts: vec![(i, j), (k, l)] }));
                                    }
                                }
                            }
                        }
                    }
                    Prefix::In(x, _) => {
                        self.rate_of(x)?;
                    }
                }
            }
        }
        syns.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.parts.cmp(&b.1.parts)));
        ints.extend(syns.into_iter().map(|(_, r)| r));
        Ok(ints)
    }

    /// The configuration after `redex`.
    pub fn fire(&self, env: &Env, redex: &Redex) -> Result<Config, SpiError> {
        let conts: Vec<Process> = match (&redex.event, redex.parts.as_slice()) {
            (Event::Internal { .. }, [(i, j)]) => vec![self.summands(*i)[*j].cont().clone()],
            (Event::Sync { message, .. }, [(i, j), (k, l)]) => {
                let p = self.summands(*i)[*j].cont().clone();
                let q = self.summands(*k)[*l].cont().open(message);
                vec![p, q]
            }
            _ => return Err(SpiError::Malformed("redex does not match its event".into())),
        };
        let gone: Vec<usize> = redex.parts.iter().map(|p| p.0).collect();
        let comps = self.comps.iter().enumerate().filter(|(i, _)| !gone.contains(i)).map(|(_, c)| c.clone()).collect();
        let mut next = Config { rates: self.rates.clone(), comps };
        for c in conts {
            next.absorb(env, &c)?;
        }
        Ok(next)
    }
}

/// All one-step successors of a closed, rated process.
pub fn step(env: &Env, rates: &RateTable, p: &Process) -> Result<Vec<(Event, Process)>, SpiError> {
    let cfg = Config::new(env, rates, p)?;
    cfg.redexes()?.iter().map(|r| Ok((r.event.clone(), cfg.fire(env, r)?.process()))).collect()
}

/// Equal events, except that two ν-introduced channel names always match.
pub(crate) fn events_match(a: &Event, b: &Event) -> bool {
    let same = |x: &Sym, y: &Sym| x == y || (is_local(x) && is_local(y));
    match (a, b) {
        (Event::Internal { rate: r }, Event::Internal { rate: s }) => r == s,
        (Event::Sync { channel: x, rate: r, message: m }, Event::Sync { channel: y, rate: s, message: n }) => {
            r == s && same(x, y) && same(m, n)
        }
        _ => false,
    }
}

/// Replays `trace`, returning the configuration before each step and the
/// final one. A step replays when some redex carries its event and leads
/// to a process congruent to the recorded successor.
pub fn replay(env: &Env, rates: &RateTable, trace: &Trace) -> Result<Vec<Config>, SpiError> {
    let mut cfg = Config::new(env, rates, &trace.initial)?;
    let mut out = vec![cfg.clone()];
    for (k, st) in trace.steps.iter().enumerate() {
        let mut next = None;
        for r in cfg.redexes()? {
            if r.event != st.event && !events_match(&r.event, &st.event) {
                continue;
            }
            let c = cfg.fire(env, &r)?;
            if congruent(env, &c.process(), &st.after)? {
                next = Some(c);
                if r.event == st.event {
                    break;
                }
            }
        }
        cfg = next
            .ok_or_else(|| SpiError::Replay { step: k + 1, msg: format!("no interaction {} leads to the recorded successor", st.event) })?;
        out.push(cfg.clone());
    }
    Ok(out)
}
