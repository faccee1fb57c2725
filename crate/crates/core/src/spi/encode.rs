//! The encoding of processes, sums and definitions as polarized HyLL
//! propositions over the rates domain, the interaction theory, canonical
//! sequents, and the partial inverse used to read configurations back
//! off neutral sequents.

use super::congr::{flatten, Comp, Fresh};
use super::{Chan, Env, Prefix, Process, RateTable, SpiError, Sum};
use crate::focusing::FocSequent;
use crate::syntax::{bangbang, rho, Judgement, Polarity, Prop, Sort, Term};
use crate::worlds::{sym, DomainId, NormWorld, RItem, WorldExpr, Q};

pub(crate) const DT: &str = "dt";
pub(crate) const OUT: &str = "out";
pub(crate) const IN: &str = "in";
pub(crate) const TAU: &str = "tau";
pub(crate) const ACT: &str = "act";
pub(crate) const RT: &str = "rt";

fn pos(name: &str, args: Vec<Term>) -> Prop {
    Prop::Atom(Polarity::Pos, sym(name), args)
}

fn chan(c: &Chan, shift: u32) -> Term {
    match c {
        Chan::Bound(i) => Term::Var(i + shift),
        Chan::Name(n) => Term::Fn(n.clone(), Vec::new()),
    }
}

fn rate_term(r: Q) -> Term {
    Term::World(WorldExpr::rate(r))
}

pub(crate) fn lock() -> Prop {
    pos(ACT, Vec::new())
}

pub(crate) fn guard() -> Prop {
    pos(DT, Vec::new())
}

/// `⟦P⟧`, a positive proposition.
pub fn encode_proc(p: &Process) -> Prop {
    match p {
        Process::Nil => Prop::One,
        Process::Par(a, b) => Prop::tensor(encode_proc(a), encode_proc(b)),
        Process::Nu(r, body) => Prop::exists(
            Sort::Term,
            Prop::tensor(Prop::bang(Prop::at(Prop::atom(RT, vec![Term::Var(0)]), WorldExpr::rate(*r))), encode_proc(body)),
        ),
        Process::Call(x, args) => Prop::Atom(Polarity::Pos, x.clone(), args.iter().map(|c| chan(c, 0)).collect()),
        Process::Sum(s) => Prop::down(Prop::lolli(guard(), encode_sum(s))),
    }
}

/// `⌈M⌉`, a negative proposition.
pub fn encode_sum(s: &Sum) -> Prop {
    match s {
        Sum::Out(x, m, p) => Prop::up(Prop::tensor(pos(OUT, vec![chan(x, 0), chan(m, 0)]), encode_proc(p))),
        Sum::In(x, p) => Prop::forall(Sort::Term, Prop::up(Prop::tensor(pos(IN, vec![chan(x, 1), Term::Var(0)]), encode_proc(p)))),
        Sum::Tau(r, p) => Prop::up(Prop::tensor(pos(TAU, vec![rate_term(*r)]), encode_proc(p))),
        Sum::Plus(a, b) => Prop::with(encode_sum(a), encode_sum(b)),
    }
}

/// One unrestricted clause `!!∀x⃗. (X x⃗ ⊸ ↑⟦P⟧) & (⟦P⟧ ⊸ ↑X x⃗)` per
/// definition, at the identity world.
pub fn encode_env(env: &Env) -> Vec<Judgement> {
    env.iter()
        .map(|(x, def)| {
            let n = def.arity as u32;
            let head = Prop::Atom(Polarity::Pos, x.clone(), (0..n).rev().map(Term::Var).collect());
            let body = encode_proc(&def.body);
            let iff = Prop::with(Prop::lolli(head.clone(), Prop::up(body.clone())), Prop::lolli(body, Prop::up(head)));
            let quantified = (0..n).fold(iff, |p, _| Prop::forall(Sort::Term, p));
            Judgement::new(bangbang(&quantified), WorldExpr::Id)
        })
        .collect()
}

/// `inter @ rid` where `inter ≜ !!(act ⊸ ↑int & ↑syn)`.
pub fn interaction_theory() -> Judgement {
    let id = WorldExpr::Id;
    let act_after = |r: WorldExpr| rho(r, &Prop::up(lock()));
    // int ≜ (dt at ι) ⊗ ↓∀r. ((tau r at ι) ⊸ ρ_r ↑act)
    let int = Prop::tensor(
        Prop::at(guard(), id.clone()),
        Prop::down(Prop::forall(
            Sort::World,
            Prop::lolli(Prop::at(pos(TAU, vec![Term::World(WorldExpr::Var(0))]), id.clone()), act_after(WorldExpr::Var(0))),
        )),
    );
    // syn ≜ (dt ⊗ dt at ι) ⊗ ↓∀x,r,m. ((out x m ⊗ in x m at ι) ⊸ ↓(rt x at r) ⊸ ρ_r ↑act)
    let (x, r, m) = (Term::Var(2), WorldExpr::Var(1), Term::Var(0));
    let tokens = Prop::tensor(pos(OUT, vec![x.clone(), m.clone()]), pos(IN, vec![x.clone(), m]));
    let contract =
        Prop::lolli(Prop::at(tokens, id.clone()), Prop::lolli(Prop::down(Prop::at(Prop::atom(RT, vec![x]), r.clone())), act_after(r)));
    let syn = Prop::tensor(
        Prop::at(Prop::tensor(guard(), guard()), id.clone()),
        Prop::down(Prop::forall(Sort::Term, Prop::forall(Sort::World, Prop::forall(Sort::Term, contract)))),
    );
    let body = Prop::lolli(lock(), Prop::with(Prop::up(int), Prop::up(syn)));
    Judgement::new(bangbang(&body), id)
}

/// `rt x @ r` for every entry.
pub fn rate_entries(rates: &RateTable) -> Vec<Judgement> {
    rates.iter().map(|(x, r)| Judgement::new(Prop::atom(RT, vec![Term::Fn(x.clone(), Vec::new())]), WorldExpr::rate(*r))).collect()
}

fn comp_judgement(c: &Comp) -> Judgement {
    let prop = match c {
        Comp::Sum(ps) => Prop::lolli(guard(), encode_sum(&Sum::of_prefixes(ps.clone()))),
        Comp::Call(x, args) => Prop::up(Prop::Atom(Polarity::Pos, x.clone(), args.iter().map(|c| chan(c, 0)).collect())),
    };
    Judgement::new(prop, WorldExpr::Id)
}

/// `can P @ rid`. Each top-level ν is opened with a fresh channel whose
/// rate is added to `rates`.
pub fn canonical_context(rates: &mut RateTable, p: &Process) -> Vec<Judgement> {
    let mut used: std::collections::BTreeSet<_> = rates.iter().map(|(n, _)| n.clone()).collect();
    used.extend(p.names());
    let mut fresh = Fresh::new("_c", used);
    let flat = flatten(p, &mut fresh, false);
    for (n, r) in &flat.bound {
        rates.insert(n, *r);
    }
    flat.comps.iter().map(comp_judgement).collect()
}

#[derive(Debug, Clone)]
pub struct CanonicalSequent {
    pub sequent: FocSequent,
    /// The given rates plus those of the opened ν binders.
    pub rates: RateTable,
}

/// `⟦E⟧, rates, inter @ rid ; ↑act @ s, can P @ rid ; · ⟹ · ; (⟦Q⟧ at rid) ⊗ act @ t`.
pub fn canonical_sequent(
    env: &Env,
    rates: &RateTable,
    p: &Process,
    q: &Process,
    s: WorldExpr,
    t: WorldExpr,
) -> Result<CanonicalSequent, SpiError> {
    env.validate()?;
    env.check_calls(p)?;
    env.check_calls(q)?;
    if !p.is_closed() || !q.is_closed() {
        return Err(SpiError::Malformed("canonical sequents need closed processes".into()));
    }
    rates.covers(p)?;
    rates.covers(q)?;
    for (_, def) in env.iter() {
        rates.covers(&def.body)?;
    }
    let mut all = rates.clone();
    let can = canonical_context(&mut all, p);
    let mut gamma = encode_env(env);
    gamma.extend(rate_entries(&all));
    gamma.push(interaction_theory());
    let mut delta = vec![Judgement::new(Prop::up(lock()), s)];
    delta.extend(can);
    let goal = Judgement::new(Prop::tensor(Prop::at(encode_proc(q), WorldExpr::Id), lock()), t);
    Ok(CanonicalSequent { sequent: FocSequent::neutral(gamma, delta, goal), rates: all })
}

pub(crate) fn is_lock(p: &Prop) -> bool {
    matches!(p, Prop::Up(a) if **a == lock())
}

pub(crate) fn is_guard_token(p: &Prop) -> bool {
    matches!(p, Prop::Up(a) if **a == guard())
}

pub(crate) fn mentions_lock(p: &Prop) -> bool {
    match p {
        Prop::Atom(Polarity::Pos, n, _) => &**n == ACT,
        Prop::Atom(..) | Prop::One | Prop::Top | Prop::Zero => false,
        Prop::Tensor(a, b) | Prop::Lolli(a, b) | Prop::With(a, b) | Prop::Plus(a, b) => mentions_lock(a) || mentions_lock(b),
        Prop::Bang(a) | Prop::Forall(_, a) | Prop::Exists(_, a) | Prop::At(a, _) | Prop::Local(a) | Prop::Up(a) | Prop::Down(a) => {
            mentions_lock(a)
        }
    }
}

/// Leaves of a `&` tree, left to right.
pub(crate) fn with_leaves(p: &Prop) -> Vec<&Prop> {
    match p {
        Prop::With(a, b) => {
            let mut v = with_leaves(a);
            v.extend(with_leaves(b));
            v
        }
        p => vec![p],
    }
}

/// Whether `w` evaluates to the identity world, however it is written.
pub(crate) fn is_rid(w: &WorldExpr) -> bool {
    *w == WorldExpr::Id || NormWorld::of(w, DomainId::Rates).is_ok_and(|n| n == NormWorld::rid(DomainId::Rates))
}

pub(crate) fn single_rate(w: &WorldExpr) -> Option<Q> {
    match NormWorld::of(w, DomainId::Rates).ok()? {
        NormWorld::Rates(items) => match items.as_slice() {
            [RItem::Rate(r)] => Some(*r),
            _ => None,
        },
        _ => None,
    }
}

pub(crate) fn decode_chan(t: &Term) -> Option<Chan> {
    match t {
        Term::Var(i) => Some(Chan::Bound(*i)),
        Term::Fn(n, args) if args.is_empty() => Some(Chan::Name(n.clone())),
        _ => None,
    }
}

fn unshift(c: Chan) -> Option<Chan> {
    match c {
        Chan::Bound(0) => None,
        Chan::Bound(i) => Some(Chan::Bound(i - 1)),
        c => Some(c),
    }
}

fn decode_rate_term(t: &Term) -> Option<Q> {
    match t {
        Term::World(w) => single_rate(w),
        _ => None,
    }
}

/// Inverse of [`encode_proc`].
pub(crate) fn decode_proc(p: &Prop) -> Option<Process> {
    match p {
        Prop::One => Some(Process::Nil),
        Prop::Tensor(a, b) => Some(Process::par(decode_proc(a)?, decode_proc(b)?)),
        Prop::Exists(Sort::Term, body) => match &**body {
            Prop::Tensor(bang, rest) => {
                let Prop::Bang(inner) = &**bang else { return None };
                let Prop::At(rt, w) = &**inner else { return None };
                let Prop::Atom(Polarity::Neg, n, args) = &**rt else { return None };
                if &**n != RT || args.as_slice() != [Term::Var(0)] {
                    return None;
                }
                Some(Process::nu(single_rate(w)?, decode_proc(rest)?))
            }
            _ => None,
        },
        Prop::Atom(Polarity::Pos, x, args) => Some(Process::Call(x.clone(), args.iter().map(decode_chan).collect::<Option<Vec<_>>>()?)),
        Prop::Down(n) => match &**n {
            Prop::Lolli(g, s) if **g == guard() => Some(Process::Sum(decode_sum(s)?)),
            _ => None,
        },
        _ => None,
    }
}

/// Inverse of [`encode_sum`].
pub(crate) fn decode_sum(p: &Prop) -> Option<Sum> {
    let prefixes = with_leaves(p).into_iter().map(decode_prefix).collect::<Option<Vec<_>>>()?;
    Some(Sum::of_prefixes(prefixes))
}

fn decode_prefix(p: &Prop) -> Option<Prefix> {
    let token = |p: &Prop| -> Option<(String, Vec<Term>, Process)> {
        let Prop::Up(t) = p else { return None };
        let Prop::Tensor(a, k) = &**t else { return None };
        let Prop::Atom(Polarity::Pos, n, args) = &**a else { return None };
        Some((n.to_string(), args.clone(), decode_proc(k)?))
    };
    match p {
        Prop::Forall(Sort::Term, body) => {
            let (n, args, k) = token(body)?;
            match (n.as_str(), args.as_slice()) {
                (IN, [x, Term::Var(0)]) => Some(Prefix::In(unshift(decode_chan(x)?)?, k)),
                _ => None,
            }
        }
        p => {
            let (n, args, k) = token(p)?;
            match (n.as_str(), args.as_slice()) {
                (OUT, [x, m]) => Some(Prefix::Out(decode_chan(x)?, decode_chan(m)?, k)),
                (TAU, [r]) => Some(Prefix::Tau(decode_rate_term(r)?, k)),
                _ => None,
            }
        }
    }
}

/// A linear hypothesis of a canonical sequent, read back as a component.
pub(crate) fn decode_comp(j: &Judgement) -> Option<Comp> {
    if !is_rid(&j.world) {
        return None;
    }
    match &j.prop {
        Prop::Lolli(g, s) if **g == guard() => Some(Comp::Sum(with_leaves(s).into_iter().map(decode_prefix).collect::<Option<Vec<_>>>()?)),
        Prop::Up(a) => match &**a {
            Prop::Atom(Polarity::Pos, x, args) if !is_reserved_atom(x) => {
                Some(Comp::Call(x.clone(), args.iter().map(decode_chan).collect::<Option<Vec<_>>>()?))
            }
            _ => None,
        },
        _ => None,
    }
}

pub(crate) fn is_reserved_atom(x: &str) -> bool {
    [DT, OUT, IN, TAU, ACT].contains(&x)
}

/// Rates read off `rt x @ r` hypotheses.
pub(crate) fn decode_rates(gamma: &[Judgement]) -> RateTable {
    gamma
        .iter()
        .filter_map(|j| match &j.prop {
            Prop::Atom(Polarity::Neg, n, args) if &**n == RT => match args.as_slice() {
                [Term::Fn(x, a)] if a.is_empty() => Some((x.clone(), single_rate(&j.world)?)),
                _ => None,
            },
            _ => None,
        })
        .collect()
}
