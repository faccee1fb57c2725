//! Structural congruence.
//!
//! A process is flattened into its top-level ν binders (opened with fresh
//! names, unused ones dropped) and a multiset of components, each a choice
//! of prefixes or a definition call. Two processes are congruent when the
//! components can be matched one-to-one under a rate-preserving bijection
//! between their bound names, recursively under prefixes, unfolding a call
//! only when it has no syntactic partner on the other side.

use std::collections::{BTreeMap, BTreeSet};

use super::{Chan, Env, Prefix, Process, SpiError, Sum};
use crate::worlds::{sym, Sym, Q};

/// How many definition unfoldings a single comparison may perform.
const UNFOLD_FUEL: usize = 256;

/// Supply of names not occurring in `used`.
#[derive(Debug, Clone)]
pub(crate) struct Fresh {
    used: BTreeSet<Sym>,
    prefix: &'static str,
    next: usize,
}

impl Fresh {
    pub fn new(prefix: &'static str, used: BTreeSet<Sym>) -> Fresh {
        Fresh { used, prefix, next: 1 }
    }

    pub fn name(&mut self) -> Sym {
        loop {
            let n = sym(&format!("{}{}", self.prefix, self.next));
            self.next += 1;
            if self.used.insert(n.clone()) {
                return n;
            }
        }
    }

    pub fn reserve(&mut self, names: impl IntoIterator<Item = Sym>) {
        self.used.extend(names);
    }
}

/// A top-level parallel component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Comp {
    Sum(Vec<Prefix>),
    Call(Sym, Vec<Chan>),
}

impl Comp {
    pub fn to_process(&self) -> Process {
        match self {
            Comp::Sum(ps) => Process::Sum(Sum::of_prefixes(ps.clone())),
            Comp::Call(x, args) => Process::Call(x.clone(), args.clone()),
        }
    }

    fn names(&self) -> BTreeSet<Sym> {
        self.to_process().names()
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Flat {
    /// Opened ν binders with their rates, outermost first.
    pub bound: Vec<(Sym, Q)>,
    pub comps: Vec<Comp>,
}

/// Extrudes and opens every top-level ν, drops `0`, flattens `|`. With
/// `canonical`, summands are sorted and duplicates removed; otherwise
/// their order is kept.
pub(crate) fn flatten(p: &Process, fresh: &mut Fresh, canonical: bool) -> Flat {
    fn go(p: &Process, fresh: &mut Fresh, canonical: bool, out: &mut Flat) {
        match p {
            Process::Nil => {}
            Process::Par(a, b) => {
                go(a, fresh, canonical, out);
                go(b, fresh, canonical, out);
            }
            Process::Nu(r, body) => {
                let n = fresh.name();
                out.bound.push((n.clone(), *r));
                go(&body.open(&n), fresh, canonical, out);
            }
            Process::Call(x, args) => out.comps.push(Comp::Call(x.clone(), args.clone())),
            Process::Sum(s) => {
                let mut ps = s.prefixes();
                if canonical {
                    ps.sort();
                    ps.dedup();
                }
                out.comps.push(Comp::Sum(ps));
            }
        }
    }
    let mut out = Flat::default();
    go(p, fresh, canonical, &mut out);
    let used: BTreeSet<Sym> = out.comps.iter().flat_map(Comp::names).collect();
    out.bound.retain(|(n, _)| used.contains(n));
    out
}

/// Wraps `body` in ν binders for `bound`, outermost first.
pub(crate) fn close_over(body: Process, bound: &[(Sym, Q)]) -> Process {
    bound.iter().rev().fold(body, |p, (n, r)| Process::nu(*r, p.close(n)))
}

/// A canonical representative of the congruence class, up to the choice
/// of which of two congruent summands is kept and without unfolding
/// definitions: ν binders outermost in order of first use, components and
/// summands sorted, continuations normalized recursively.
pub fn normal_form(p: &Process) -> Process {
    let mut fresh = Fresh::new("%n", p.names());
    nf(p, &mut fresh)
}

fn nf(p: &Process, fresh: &mut Fresh) -> Process {
    let flat = flatten(p, fresh, false);
    let mut comps: Vec<Comp> = flat
        .comps
        .iter()
        .map(|c| match c {
            Comp::Sum(ps) => {
                let mut ps: Vec<Prefix> = ps.iter().map(|pr| nf_prefix(pr, fresh)).collect();
                ps.sort();
                ps.dedup();
                Comp::Sum(ps)
            }
            c => c.clone(),
        })
        .collect();
    // Bound names sort after every free name, so the order of components
    // does not depend on which fresh names were drawn.
    let rank: BTreeMap<Sym, usize> = flat.bound.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
    let key = |c: &Comp| {
        let mut q = c.to_process();
        for n in rank.keys() {
            q = q.map_chans(
                &mut |ch, _| match ch {
                    Chan::Name(x) if x == n => Chan::Name(sym("%")),
                    ch => ch.clone(),
                },
                0,
            );
        }
        q
    };
    comps.sort_by_key(|c| key(c));
    let mut order: Vec<(Sym, Q)> = Vec::new();
    for c in &comps {
        for n in first_use(&c.to_process()) {
            if let Some((_, r)) = flat.bound.iter().find(|(b, _)| *b == n) {
                if !order.iter().any(|(o, _)| *o == n) {
                    order.push((n, *r));
                }
            }
        }
    }
    let body = Process::par_all(comps.iter().map(Comp::to_process).collect());
    close_over(body, &order)
}

fn nf_prefix(p: &Prefix, fresh: &mut Fresh) -> Prefix {
    match p {
        Prefix::Out(x, m, q) => Prefix::Out(x.clone(), m.clone(), nf(q, fresh)),
        Prefix::Tau(r, q) => Prefix::Tau(*r, nf(q, fresh)),
        Prefix::In(x, q) => {
            let n = fresh.name();
            Prefix::In(x.clone(), nf(&q.open(&n), fresh).close(&n))
        }
    }
}

/// Free names in order of first occurrence.
fn first_use(p: &Process) -> Vec<Sym> {
    let mut out: Vec<Sym> = Vec::new();
    p.map_chans(
        &mut |c, _| {
            if let Chan::Name(n) = c {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
            c.clone()
        },
        0,
    );
    out
}

/// Decides structural congruence of two closed processes.
pub fn congruent(env: &Env, p: &Process, q: &Process) -> Result<bool, SpiError> {
    env.check_calls(p)?;
    env.check_calls(q)?;
    let mut used = p.names();
    used.extend(q.names());
    let mut c = Cmp { env, fresh: Fresh::new("%c", used), fuel: UNFOLD_FUEL, level: 0, err: None };
    let r = c.procs(p, q, &Bij::default()).is_some();
    match c.err {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Partial bijection between names bound on the left and on the right.
/// Each bound name carries its rate and the comparison level that opened
/// it; names only correspond within one level.
#[derive(Debug, Clone, Default)]
struct Bij {
    fwd: BTreeMap<Sym, Sym>,
    bwd: BTreeMap<Sym, Sym>,
    left: BTreeMap<Sym, (Q, usize)>,
    right: BTreeMap<Sym, (Q, usize)>,
}

impl Bij {
    fn name(&mut self, a: &Sym, b: &Sym) -> bool {
        if let Some(x) = self.fwd.get(a) {
            return x == b;
        }
        if self.bwd.contains_key(b) {
            return false;
        }
        match (self.left.get(a), self.right.get(b)) {
            (None, None) => a == b,
            (Some(x), Some(y)) if x == y => {
                self.fwd.insert(a.clone(), b.clone());
                self.bwd.insert(b.clone(), a.clone());
                true
            }
            _ => false,
        }
    }

    fn chan(&mut self, a: &Chan, b: &Chan) -> bool {
        match (a, b) {
            (Chan::Name(x), Chan::Name(y)) => self.name(x, y),
            (Chan::Bound(i), Chan::Bound(j)) => i == j,
            _ => false,
        }
    }
}

struct Cmp<'e> {
    env: &'e Env,
    fresh: Fresh,
    fuel: usize,
    level: usize,
    err: Option<SpiError>,
}

impl Cmp<'_> {
    fn procs(&mut self, p: &Process, q: &Process, bij: &Bij) -> Option<Bij> {
        self.level += 1;
        let level = self.level;
        let fp = flatten(p, &mut self.fresh, true);
        let fq = flatten(q, &mut self.fresh, true);
        let mut b = bij.clone();
        b.left.extend(fp.bound.into_iter().map(|(n, r)| (n, (r, level))));
        b.right.extend(fq.bound.into_iter().map(|(n, r)| (n, (r, level))));
        self.comps(fp.comps, fq.comps, b, level)
    }

    fn unfold(&mut self, c: &Comp, level: usize) -> Option<(Vec<Comp>, Vec<(Sym, (Q, usize))>)> {
        let Comp::Call(x, args) = c else { return None };
        if self.fuel == 0 {
            return None;
        }
        self.fuel -= 1;
        match self.env.unfold(x, args) {
            Ok(body) => {
                let f = flatten(&body, &mut self.fresh, true);
                Some((f.comps, f.bound.into_iter().map(|(n, r)| (n, (r, level))).collect()))
            }
            Err(e) => {
                self.err = Some(e);
                None
            }
        }
    }

    fn comps(&mut self, ps: Vec<Comp>, qs: Vec<Comp>, bij: Bij, level: usize) -> Option<Bij> {
        let Some(p) = ps.first() else {
            if qs.is_empty() {
                return Some(bij);
            }
            let j = qs.iter().position(|c| matches!(c, Comp::Call(..)))?;
            let (more, bound) = self.unfold(&qs[j], level)?;
            let mut qs2 = qs.clone();
            qs2.remove(j);
            qs2.extend(more);
            let mut b = bij;
            b.right.extend(bound);
            return self.comps(ps, qs2, b, level);
        };
        for j in 0..qs.len() {
            if let Some(b2) = self.comp(p, &qs[j], &bij) {
                let mut qs2 = qs.clone();
                qs2.remove(j);
                if let Some(r) = self.comps(ps[1..].to_vec(), qs2, b2, level) {
                    return Some(r);
                }
            }
        }
        if matches!(p, Comp::Call(..)) {
            let (more, bound) = self.unfold(p, level)?;
            let mut ps2 = more;
            ps2.extend(ps[1..].iter().cloned());
            let mut b = bij;
            b.left.extend(bound);
            return self.comps(ps2, qs, b, level);
        }
        let j = qs.iter().position(|c| matches!(c, Comp::Call(..)))?;
        let (more, bound) = self.unfold(&qs[j], level)?;
        let mut qs2 = qs.clone();
        qs2.remove(j);
        qs2.extend(more);
        let mut b = bij;
        b.right.extend(bound);
        self.comps(ps, qs2, b, level)
    }

    fn comp(&mut self, p: &Comp, q: &Comp, bij: &Bij) -> Option<Bij> {
        match (p, q) {
            (Comp::Call(x, a), Comp::Call(y, b)) if x == y && a.len() == b.len() => {
                let mut bij = bij.clone();
                a.iter().zip(b).all(|(u, v)| bij.chan(u, v)).then_some(bij)
            }
            (Comp::Sum(ps), Comp::Sum(qs)) => {
                // Choice is idempotent up to congruence: compare as sets.
                let mut b = bij.clone();
                for x in ps {
                    b = qs.iter().find_map(|y| self.prefix(x, y, &b))?;
                }
                for y in qs {
                    b = ps.iter().find_map(|x| self.prefix(x, y, &b))?;
                }
                Some(b)
            }
            _ => None,
        }
    }

    fn prefix(&mut self, p: &Prefix, q: &Prefix, bij: &Bij) -> Option<Bij> {
        let mut b = bij.clone();
        match (p, q) {
            (Prefix::Out(x, m, p1), Prefix::Out(y, n, q1)) => {
                if b.chan(x, y) && b.chan(m, n) {
                    self.procs(p1, q1, &b)
                } else {
                    None
                }
            }
            (Prefix::In(x, p1), Prefix::In(y, q1)) => {
                if !b.chan(x, y) {
                    return None;
                }
                let n = self.fresh.name();
                self.procs(&p1.open(&n), &q1.open(&n), &b)
            }
            (Prefix::Tau(r, p1), Prefix::Tau(s, q1)) if r == s => self.procs(p1, q1, &b),
            _ => None,
        }
    }
}
