//! Terms, HyLL propositions, nameless binders and substitution.
//!
//! Propositions use one de Bruijn index space for term and world binders;
//! the sort of each binder is recorded on the quantifier (`Local` always
//! binds a world). Polarized propositions are the same type extended with
//! the two shifts `Up` (↑P, negative) and `Down` (↓N, positive); the
//! unpolarized fragment is the shift-free part.

use std::collections::BTreeSet;
use std::fmt;

use crate::worlds::{DomainId, NormWorld, Sym, WorldExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Term,
    World,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

/// Untyped first-order terms. `World` embeds a world expression as a term
/// literal; rate constants reach atoms such as `tau r` this way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    Fn(Sym, Vec<Term>),
    World(WorldExpr),
    Meta(u32),
}

impl Term {
    pub fn cnst(name: &str) -> Term {
        Term::Fn(crate::worlds::sym(name), Vec::new())
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Fn(_, args) => args.iter().all(Term::is_closed),
            Term::World(w) => w.is_closed(),
            Term::Meta(_) => true,
        }
    }

    pub fn map_with(&self, m: &mut dyn LeafMap, depth: u32) -> Term {
        if let Some(t) = m.term(self, depth) {
            return t;
        }
        match self {
            Term::Fn(f, args) => Term::Fn(f.clone(), args.iter().map(|a| a.map_with(m, depth)).collect()),
            Term::World(w) => Term::World(map_world(w, m, depth)),
            other => other.clone(),
        }
    }

    fn names(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Fn(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.names(out));
            }
            Term::World(w) => {
                let mut ps = Vec::new();
                w.params(&mut ps);
                out.extend(ps);
            }
            _ => {}
        }
    }
}

/// Leaf rewriting used by substitution, shifting and metavariable
/// resolution. Returning `None` recurses structurally.
pub trait LeafMap {
    fn term(&mut self, _t: &Term, _depth: u32) -> Option<Term> {
        None
    }
    fn world(&mut self, _w: &WorldExpr, _depth: u32) -> Option<WorldExpr> {
        None
    }
}

pub fn map_world(w: &WorldExpr, m: &mut dyn LeafMap, depth: u32) -> WorldExpr {
    if let Some(r) = m.world(w, depth) {
        return r;
    }
    match w {
        WorldExpr::Compose(a, b) => WorldExpr::compose(map_world(a, m, depth), map_world(b, m, depth)),
        other => other.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    Atom(Polarity, Sym, Vec<Term>),
    Tensor(Box<Prop>, Box<Prop>),
    One,
    Lolli(Box<Prop>, Box<Prop>),
    With(Box<Prop>, Box<Prop>),
    Top,
    Plus(Box<Prop>, Box<Prop>),
    Zero,
    Bang(Box<Prop>),
    Forall(Sort, Box<Prop>),
    Exists(Sort, Box<Prop>),
    At(Box<Prop>, WorldExpr),
    /// Localization `dn u. A`, binding the current world.
    Local(Box<Prop>),
    /// ↑P: positive to negative shift.
    Up(Box<Prop>),
    /// ↓N: negative to positive shift.
    Down(Box<Prop>),
}

/// A value substituted for a bound variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Inst {
    Term(Term),
    World(WorldExpr),
}

impl Inst {
    pub fn sort(&self) -> Sort {
        match self {
            Inst::Term(_) => Sort::Term,
            Inst::World(_) => Sort::World,
        }
    }
}

struct Shift {
    by: u32,
    cutoff: u32,
}

impl LeafMap for Shift {
    fn term(&mut self, t: &Term, depth: u32) -> Option<Term> {
        match t {
            Term::Var(i) if *i >= self.cutoff + depth => Some(Term::Var(i + self.by)),
            _ => None,
        }
    }
    fn world(&mut self, w: &WorldExpr, depth: u32) -> Option<WorldExpr> {
        match w {
            WorldExpr::Var(i) if *i >= self.cutoff + depth => Some(WorldExpr::Var(i + self.by)),
            _ => None,
        }
    }
}

struct Open<'a> {
    value: &'a Inst,
}

impl LeafMap for Open<'_> {
    fn term(&mut self, t: &Term, depth: u32) -> Option<Term> {
        match t {
            Term::Var(i) if *i == depth => match self.value {
                Inst::Term(v) => Some(shift_term(v, depth)),
                // Sort errors are caught by well-formedness checks.
                Inst::World(w) => Some(Term::World(shift_world(w, depth))),
            },
            Term::Var(i) if *i > depth => Some(Term::Var(i - 1)),
            _ => None,
        }
    }
    fn world(&mut self, w: &WorldExpr, depth: u32) -> Option<WorldExpr> {
        match w {
            WorldExpr::Var(i) if *i == depth => match self.value {
                Inst::World(v) => Some(shift_world(v, depth)),
                Inst::Term(_) => Some(w.clone()),
            },
            WorldExpr::Var(i) if *i > depth => Some(WorldExpr::Var(i - 1)),
            _ => None,
        }
    }
}

pub fn shift_term(t: &Term, by: u32) -> Term {
    if by == 0 {
        return t.clone();
    }
    t.map_with(&mut Shift { by, cutoff: 0 }, 0)
}

pub fn shift_world(w: &WorldExpr, by: u32) -> WorldExpr {
    if by == 0 {
        return w.clone();
    }
    map_world(w, &mut Shift { by, cutoff: 0 }, 0)
}

impl Prop {
    pub fn atom(name: &str, args: Vec<Term>) -> Prop {
        Prop::Atom(Polarity::Neg, crate::worlds::sym(name), args)
    }

    pub fn pos_atom(name: &str, args: Vec<Term>) -> Prop {
        Prop::Atom(Polarity::Pos, crate::worlds::sym(name), args)
    }

    pub fn tensor(a: Prop, b: Prop) -> Prop {
        Prop::Tensor(Box::new(a), Box::new(b))
    }
    pub fn lolli(a: Prop, b: Prop) -> Prop {
        Prop::Lolli(Box::new(a), Box::new(b))
    }
    pub fn with(a: Prop, b: Prop) -> Prop {
        Prop::With(Box::new(a), Box::new(b))
    }
    pub fn plus(a: Prop, b: Prop) -> Prop {
        Prop::Plus(Box::new(a), Box::new(b))
    }
    pub fn bang(a: Prop) -> Prop {
        Prop::Bang(Box::new(a))
    }
    pub fn forall(s: Sort, a: Prop) -> Prop {
        Prop::Forall(s, Box::new(a))
    }
    pub fn exists(s: Sort, a: Prop) -> Prop {
        Prop::Exists(s, Box::new(a))
    }
    pub fn at(a: Prop, w: WorldExpr) -> Prop {
        Prop::At(Box::new(a), w)
    }
    pub fn local(a: Prop) -> Prop {
        Prop::Local(Box::new(a))
    }
    pub fn up(a: Prop) -> Prop {
        Prop::Up(Box::new(a))
    }
    pub fn down(a: Prop) -> Prop {
        Prop::Down(Box::new(a))
    }

    pub fn map_with(&self, m: &mut dyn LeafMap, depth: u32) -> Prop {
        use Prop::*;
        let b = |p: &Prop, m: &mut dyn LeafMap, d: u32| Box::new(p.map_with(m, d));
        match self {
            Atom(pol, f, args) => Atom(*pol, f.clone(), args.iter().map(|a| a.map_with(m, depth)).collect()),
            Tensor(x, y) => Tensor(b(x, m, depth), b(y, m, depth)),
            Lolli(x, y) => Lolli(b(x, m, depth), b(y, m, depth)),
            With(x, y) => With(b(x, m, depth), b(y, m, depth)),
            Plus(x, y) => Plus(b(x, m, depth), b(y, m, depth)),
            One => One,
            Top => Top,
            Zero => Zero,
            Bang(x) => Bang(b(x, m, depth)),
            Up(x) => Up(b(x, m, depth)),
            Down(x) => Down(b(x, m, depth)),
            Forall(s, x) => Forall(*s, b(x, m, depth + 1)),
            Exists(s, x) => Exists(*s, b(x, m, depth + 1)),
            Local(x) => Local(b(x, m, depth + 1)),
            At(x, w) => At(b(x, m, depth), map_world(w, m, depth)),
        }
    }

    /// Raise free variables by `by`, for moving under binders.
    pub fn shift(&self, by: u32) -> Prop {
        if by == 0 {
            return self.clone();
        }
        self.map_with(&mut Shift { by, cutoff: 0 }, 0)
    }

    /// Instantiate the outermost bound variable (index 0) of a binder body.
    pub fn instantiate(&self, value: &Inst) -> Prop {
        self.map_with(&mut Open { value }, 0)
    }

    /// Substitute a term for the variable bound by this quantifier and
    /// return the opened body. Non-binders are returned unchanged.
    pub fn subst_term(&self, t: &Term) -> Prop {
        match self {
            Prop::Forall(Sort::Term, body) | Prop::Exists(Sort::Term, body) => body.instantiate(&Inst::Term(t.clone())),
            other => other.clone(),
        }
    }

    /// World analogue of [`Prop::subst_term`] for `faw`, `exw` and `dn`.
    pub fn subst_world(&self, w: &WorldExpr) -> Prop {
        match self {
            Prop::Forall(Sort::World, body) | Prop::Exists(Sort::World, body) | Prop::Local(body) => {
                body.instantiate(&Inst::World(w.clone()))
            }
            other => other.clone(),
        }
    }

    /// Number of connectives, ignoring terms and worlds.
    pub fn size(&self) -> usize {
        use Prop::*;
        match self {
            Atom(..) | One | Top | Zero => 1,
            Tensor(a, b) | Lolli(a, b) | With(a, b) | Plus(a, b) => 1 + a.size() + b.size(),
            Bang(a) | Forall(_, a) | Exists(_, a) | At(a, _) | Local(a) | Up(a) | Down(a) => 1 + a.size(),
        }
    }

    pub fn has_shifts(&self) -> bool {
        use Prop::*;
        match self {
            Up(_) | Down(_) => true,
            Atom(..) | One | Top | Zero => false,
            Tensor(a, b) | Lolli(a, b) | With(a, b) | Plus(a, b) => a.has_shifts() || b.has_shifts(),
            Bang(a) | Forall(_, a) | Exists(_, a) | At(a, _) | Local(a) => a.has_shifts(),
        }
    }

    /// No hybrid connectives and no world quantifiers.
    pub fn is_pure(&self) -> bool {
        use Prop::*;
        match self {
            At(..) | Local(_) | Forall(Sort::World, _) | Exists(Sort::World, _) => false,
            Atom(..) | One | Top | Zero => true,
            Tensor(a, b) | Lolli(a, b) | With(a, b) | Plus(a, b) => a.is_pure() && b.is_pure(),
            Bang(a) | Forall(_, a) | Exists(_, a) | Up(a) | Down(a) => a.is_pure(),
        }
    }

    /// Constant, function and world-parameter names occurring anywhere.
    pub fn names(&self, out: &mut BTreeSet<Sym>) {
        struct Collect<'a>(&'a mut BTreeSet<Sym>);
        impl LeafMap for Collect<'_> {
            fn term(&mut self, t: &Term, _d: u32) -> Option<Term> {
                t.names(self.0);
                Some(t.clone())
            }
            fn world(&mut self, w: &WorldExpr, _d: u32) -> Option<WorldExpr> {
                let mut ps = Vec::new();
                w.params(&mut ps);
                self.0.extend(ps);
                Some(w.clone())
            }
        }
        self.map_with(&mut Collect(out), 0);
    }

    pub fn mentions_name(&self, name: &str) -> bool {
        let mut set = BTreeSet::new();
        self.names(&mut set);
        set.contains(name)
    }

    pub fn has_meta(&self) -> bool {
        struct Find(bool);
        impl LeafMap for Find {
            fn term(&mut self, t: &Term, _d: u32) -> Option<Term> {
                if let Term::Meta(_) = t {
                    self.0 = true;
                }
                None
            }
            fn world(&mut self, w: &WorldExpr, _d: u32) -> Option<WorldExpr> {
                if w.has_meta() {
                    self.0 = true;
                }
                Some(w.clone())
            }
        }
        let mut f = Find(false);
        self.map_with(&mut f, 0);
        f.0
    }

    /// Well-scoped with respect to `scope` (innermost binder last), with
    /// term variables only under term binders and world variables only
    /// under world binders.
    pub fn well_formed(&self, scope: &mut Vec<Sort>) -> bool {
        use Prop::*;
        match self {
            Atom(_, _, args) => args.iter().all(|t| term_wf(t, scope)),
            One | Top | Zero => true,
            Tensor(a, b) | Lolli(a, b) | With(a, b) | Plus(a, b) => a.well_formed(scope) && b.well_formed(scope),
            Bang(a) | Up(a) | Down(a) => a.well_formed(scope),
            Forall(s, a) | Exists(s, a) => {
                scope.push(*s);
                let ok = a.well_formed(scope);
                scope.pop();
                ok
            }
            Local(a) => {
                scope.push(Sort::World);
                let ok = a.well_formed(scope);
                scope.pop();
                ok
            }
            At(a, w) => world_wf(w, scope) && a.well_formed(scope),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.well_formed(&mut Vec::new())
    }

    /// Intrinsic polarity; hybrid connectives take their body's polarity.
    pub fn natural_polarity(&self) -> Polarity {
        use Prop::*;
        match self {
            Atom(p, _, _) => *p,
            Tensor(..) | One | Plus(..) | Zero | Bang(_) | Exists(..) | Down(_) => Polarity::Pos,
            With(..) | Top | Lolli(..) | Forall(..) | Up(_) => Polarity::Neg,
            At(a, _) | Local(a) => a.natural_polarity(),
        }
    }
}

fn term_wf(t: &Term, scope: &[Sort]) -> bool {
    match t {
        Term::Var(i) => lookup(scope, *i) == Some(Sort::Term),
        Term::Fn(_, args) => args.iter().all(|a| term_wf(a, scope)),
        Term::World(w) => world_wf(w, scope),
        Term::Meta(_) => true,
    }
}

fn world_wf(w: &WorldExpr, scope: &[Sort]) -> bool {
    match w {
        WorldExpr::Var(i) => lookup(scope, *i) == Some(Sort::World),
        WorldExpr::Compose(a, b) => world_wf(a, scope) && world_wf(b, scope),
        _ => true,
    }
}

fn lookup(scope: &[Sort], i: u32) -> Option<Sort> {
    let i = i as usize;
    (i < scope.len()).then(|| scope[scope.len() - 1 - i])
}

/// Equality of terms with embedded worlds compared by monoid value.
pub fn term_eq(a: &Term, b: &Term, d: DomainId) -> bool {
    match (a, b) {
        (Term::Fn(f, xs), Term::Fn(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, d)),
        (Term::World(x), Term::World(y)) => wexpr_eq(x, y, d),
        _ => a == b,
    }
}

/// World expressions equal by normal form; open expressions syntactically.
pub fn wexpr_eq(a: &WorldExpr, b: &WorldExpr, d: DomainId) -> bool {
    if a.is_closed() && b.is_closed() {
        match (NormWorld::of(a, d), NormWorld::of(b, d)) {
            (Ok(x), Ok(y)) => x == y,
            _ => false,
        }
    } else {
        open_world_eq(a, b, d)
    }
}

fn open_world_eq(a: &WorldExpr, b: &WorldExpr, d: DomainId) -> bool {
    // Flatten to factor lists, dropping identities and coalescing literals.
    fn flat(e: &WorldExpr, out: &mut Vec<WorldExpr>) {
        match e {
            WorldExpr::Compose(x, y) => {
                flat(x, out);
                flat(y, out);
            }
            WorldExpr::Id => {}
            other => out.push(other.clone()),
        }
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    flat(a, &mut xs);
    flat(b, &mut ys);
    let norm = |v: Vec<WorldExpr>| -> Vec<Result<NormWorld, WorldExpr>> {
        let mut out: Vec<Result<NormWorld, WorldExpr>> = Vec::new();
        for e in v {
            if e.is_closed() {
                let n = NormWorld::of(&e, d).map_err(|_| e.clone());
                match (out.last_mut(), n) {
                    (Some(Ok(prev)), Ok(n)) => *prev = prev.compose(&n),
                    (_, n) => out.push(n),
                }
            } else {
                out.push(Err(e));
            }
        }
        out.retain(|x| !matches!(x, Ok(n) if *n == NormWorld::rid(d)));
        if d == DomainId::Unit {
            out.retain(|x| x.is_err());
        }
        out
    };
    let (mut nx, mut ny) = (norm(xs), norm(ys));
    if d == DomainId::Temporal {
        nx.sort();
        ny.sort();
    }
    nx == ny
}

/// Alpha-equality (automatic with de Bruijn indices) plus world equality by
/// evaluated value.
pub fn prop_eq(a: &Prop, b: &Prop, d: DomainId) -> bool {
    use Prop::*;
    match (a, b) {
        (Atom(p, f, xs), Atom(q, g, ys)) => p == q && f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, d)),
        (Tensor(a1, a2), Tensor(b1, b2)) | (Lolli(a1, a2), Lolli(b1, b2)) | (With(a1, a2), With(b1, b2)) | (Plus(a1, a2), Plus(b1, b2)) => {
            prop_eq(a1, b1, d) && prop_eq(a2, b2, d)
        }
        (One, One) | (Top, Top) | (Zero, Zero) => true,
        (Bang(x), Bang(y)) | (Up(x), Up(y)) | (Down(x), Down(y)) | (Local(x), Local(y)) => prop_eq(x, y, d),
        (Forall(s, x), Forall(t, y)) | (Exists(s, x), Exists(t, y)) => s == t && prop_eq(x, y, d),
        (At(x, u), At(y, v)) => wexpr_eq(u, v, d) && prop_eq(x, y, d),
        _ => false,
    }
}

/// Derived connectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derived {
    /// □A ≜ dn u. faw w. (A at u.w)
    Box,
    /// ◇A ≜ dn u. exw w. (A at u.w)
    Dia,
    /// ρ_v A ≜ dn u. (A at u.v)
    Rho(WorldExpr),
    /// !!A ≜ faw u. (A at u)
    BangBang,
}

pub fn derived(kind: &Derived, a: &Prop) -> Prop {
    match kind {
        Derived::Box => {
            Prop::local(Prop::forall(Sort::World, Prop::at(a.shift(2), WorldExpr::compose(WorldExpr::Var(1), WorldExpr::Var(0)))))
        }
        Derived::Dia => {
            Prop::local(Prop::exists(Sort::World, Prop::at(a.shift(2), WorldExpr::compose(WorldExpr::Var(1), WorldExpr::Var(0)))))
        }
        Derived::Rho(v) => Prop::local(Prop::at(a.shift(1), WorldExpr::compose(WorldExpr::Var(0), shift_world(v, 1)))),
        Derived::BangBang => Prop::forall(Sort::World, Prop::at(a.shift(1), WorldExpr::Var(0))),
    }
}

pub fn boxed(a: &Prop) -> Prop {
    derived(&Derived::Box, a)
}
pub fn dia(a: &Prop) -> Prop {
    derived(&Derived::Dia, a)
}
pub fn rho(v: WorldExpr, a: &Prop) -> Prop {
    derived(&Derived::Rho(v), a)
}
pub fn bangbang(a: &Prop) -> Prop {
    derived(&Derived::BangBang, a)
}

/// A ⊸⊸ B ≜ (A ⊸ B) & (B ⊸ A); polarizing negatively yields the shifted
/// form (P ⊸ ↑Q) & (Q ⊸ ↑P).
pub fn iff_limp(a: &Prop, b: &Prop) -> Prop {
    Prop::with(Prop::lolli(a.clone(), b.clone()), Prop::lolli(b.clone(), a.clone()))
}

/// Girard's embedding: A ⊃ B ≜ !A ⊸ B.
pub fn imp(a: &Prop, b: &Prop) -> Prop {
    Prop::lolli(Prop::bang(a.clone()), b.clone())
}

/// Girard's embedding: A ∧ B ≜ A & B.
pub fn and(a: &Prop, b: &Prop) -> Prop {
    Prop::with(a.clone(), b.clone())
}

/// Girard's embedding: A ∨ B ≜ !A ⊕ !B.
pub fn or(a: &Prop, b: &Prop) -> Prop {
    Prop::plus(Prop::bang(a.clone()), Prop::bang(b.clone()))
}

/// Insert the minimal shifts making `a` of polarity `bias`.
pub fn polarize(a: &Prop, bias: Polarity) -> Prop {
    match bias {
        Polarity::Pos => pol_pos(a),
        Polarity::Neg => pol_neg(a),
    }
}

fn pol_pos(a: &Prop) -> Prop {
    use Prop::*;
    if a.natural_polarity() == Polarity::Neg {
        return Prop::down(pol_neg(a));
    }
    match a {
        Atom(..) | One | Zero => a.clone(),
        Tensor(x, y) => Prop::tensor(pol_pos(x), pol_pos(y)),
        Plus(x, y) => Prop::plus(pol_pos(x), pol_pos(y)),
        Bang(x) => Prop::bang(pol_neg(x)),
        Exists(s, x) => Prop::exists(*s, pol_pos(x)),
        Local(x) => Prop::local(pol_pos(x)),
        At(x, w) => Prop::at(pol_pos(x), w.clone()),
        Down(x) => Prop::down(pol_neg(x)),
        _ => unreachable!("negative connective with positive polarity"),
    }
}

fn pol_neg(a: &Prop) -> Prop {
    use Prop::*;
    if a.natural_polarity() == Polarity::Pos {
        return Prop::up(pol_pos(a));
    }
    match a {
        Atom(..) | Top => a.clone(),
        With(x, y) => Prop::with(pol_neg(x), pol_neg(y)),
        Lolli(x, y) => Prop::lolli(pol_pos(x), pol_neg(y)),
        Forall(s, x) => Prop::forall(*s, pol_neg(x)),
        Local(x) => Prop::local(pol_neg(x)),
        At(x, w) => Prop::at(pol_neg(x), w.clone()),
        Up(x) => Prop::up(pol_pos(x)),
        _ => unreachable!("positive connective with negative polarity"),
    }
}

/// Drop all shifts.
pub fn erase_polarity(a: &Prop) -> Prop {
    use Prop::*;
    match a {
        Up(x) | Down(x) => erase_polarity(x),
        Atom(..) | One | Top | Zero => a.clone(),
        Tensor(x, y) => Prop::tensor(erase_polarity(x), erase_polarity(y)),
        Lolli(x, y) => Prop::lolli(erase_polarity(x), erase_polarity(y)),
        With(x, y) => Prop::with(erase_polarity(x), erase_polarity(y)),
        Plus(x, y) => Prop::plus(erase_polarity(x), erase_polarity(y)),
        Bang(x) => Prop::bang(erase_polarity(x)),
        Forall(s, x) => Prop::forall(*s, erase_polarity(x)),
        Exists(s, x) => Prop::exists(*s, erase_polarity(x)),
        At(x, w) => Prop::at(erase_polarity(x), w.clone()),
        Local(x) => Prop::local(erase_polarity(x)),
    }
}

/// Checks that `a` is a polarized proposition of polarity `want`: every
/// subformula sits under a connective expecting its polarity, with shifts
/// exactly at the changes.
pub fn is_polarized(a: &Prop, want: Polarity) -> bool {
    use Polarity::*;
    use Prop::*;
    match (a, want) {
        (Atom(p, _, _), w) => *p == w,
        (One | Zero, Pos) | (Top, Neg) => true,
        (Tensor(x, y) | Plus(x, y), Pos) => is_polarized(x, Pos) && is_polarized(y, Pos),
        (Bang(x), Pos) => is_polarized(x, Neg),
        (Exists(_, x), Pos) => is_polarized(x, Pos),
        (Down(x), Pos) => is_polarized(x, Neg),
        (With(x, y), Neg) => is_polarized(x, Neg) && is_polarized(y, Neg),
        (Lolli(x, y), Neg) => is_polarized(x, Pos) && is_polarized(y, Neg),
        (Forall(_, x), Neg) => is_polarized(x, Neg),
        (Up(x), Neg) => is_polarized(x, Pos),
        (Local(x) | At(x, _), w) => is_polarized(x, w),
        _ => false,
    }
}

/// The polarity of a polarized proposition.
pub fn polarity_of(a: &Prop) -> Polarity {
    a.natural_polarity()
}

/// A judgement `A @ w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Judgement {
    pub prop: Prop,
    pub world: WorldExpr,
}

impl Judgement {
    pub fn new(prop: Prop, world: WorldExpr) -> Judgement {
        Judgement { prop, world }
    }

    pub fn eq_in(&self, other: &Judgement, d: DomainId) -> bool {
        wexpr_eq(&self.world, &other.world, d) && prop_eq(&self.prop, &other.prop, d)
    }

    pub fn names(&self, out: &mut BTreeSet<Sym>) {
        self.prop.names(out);
        let mut ps = Vec::new();
        self.world.params(&mut ps);
        out.extend(ps);
    }

    pub fn map_with(&self, m: &mut dyn LeafMap) -> Judgement {
        Judgement { prop: self.prop.map_with(m, 0), world: map_world(&self.world, m, 0) }
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.prop, crate::text::WorldDisplay::new(&self.world))
    }
}

/// Replace a named constant (nullary function symbol) or world parameter
/// throughout; used to instantiate eigen-parameters inside proofs.
pub struct ReplaceName<'a> {
    pub name: &'a str,
    pub with: &'a Inst,
}

impl LeafMap for ReplaceName<'_> {
    fn term(&mut self, t: &Term, depth: u32) -> Option<Term> {
        match (t, self.with) {
            (Term::Fn(f, args), Inst::Term(v)) if args.is_empty() && &**f == self.name => Some(shift_term(v, depth)),
            _ => None,
        }
    }
    fn world(&mut self, w: &WorldExpr, depth: u32) -> Option<WorldExpr> {
        match (w, self.with) {
            (WorldExpr::Param(p), Inst::World(v)) if &**p == self.name => Some(shift_world(v, depth)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worlds::{World, Q};

    fn p(args: Vec<Term>) -> Prop {
        Prop::atom("p", args)
    }

    #[test]
    fn subst_term_in_atom() {
        let a = Prop::exists(Sort::Term, p(vec![Term::Var(0)]));
        assert_eq!(a.subst_term(&Term::cnst("c")), p(vec![Term::cnst("c")]));
    }

    #[test]
    fn subst_without_occurrence_is_identity() {
        let a = Prop::forall(Sort::Term, p(vec![Term::cnst("d")]));
        assert_eq!(a.subst_term(&Term::cnst("c")), p(vec![Term::cnst("d")]));
        let b = Prop::local(p(vec![]));
        assert_eq!(b.subst_world(&WorldExpr::param("w")), p(vec![]));
    }

    #[test]
    fn subst_world_at() {
        let a = Prop::local(Prop::at(p(vec![]), WorldExpr::Var(0)));
        assert_eq!(a.subst_world(&WorldExpr::param("v")), Prop::at(p(vec![]), WorldExpr::param("v")));
    }

    #[test]
    fn rho_expansion() {
        let v = WorldExpr::param("v");
        let got = rho(v.clone(), &p(vec![]));
        let want = Prop::local(Prop::at(p(vec![]), WorldExpr::compose(WorldExpr::Var(0), v)));
        assert_eq!(got, want);
    }

    #[test]
    fn imp_expansion() {
        let a = p(vec![]);
        let b = Prop::atom("q", vec![]);
        assert_eq!(imp(&a, &b), Prop::lolli(Prop::bang(a), b));
    }

    #[test]
    fn polarize_examples() {
        let pa = Prop::pos_atom("p", vec![]);
        assert_eq!(polarize(&pa, Polarity::Neg), Prop::up(pa.clone()));
        let t = Prop::tensor(pa.clone(), Prop::pos_atom("q", vec![]));
        assert_eq!(polarize(&t, Polarity::Neg), Prop::up(t.clone()));
        let n = Prop::atom("n", vec![]);
        assert_eq!(polarize(&n, Polarity::Pos), Prop::down(n.clone()));
    }

    #[test]
    fn erase_round_trips() {
        let pa = Prop::pos_atom("p", vec![]);
        let cases = vec![pa.clone(), Prop::tensor(pa.clone(), Prop::atom("n", vec![])), Prop::lolli(Prop::atom("n", vec![]), pa.clone())];
        for a in cases {
            for bias in [Polarity::Pos, Polarity::Neg] {
                let pz = polarize(&a, bias);
                assert!(is_polarized(&pz, bias), "{:?}", pz);
                assert_eq!(erase_polarity(&pz), a);
            }
        }
    }

    #[test]
    fn hybrid_connectives_are_parasitic() {
        let pa = Prop::pos_atom("p", vec![]);
        let a = Prop::local(Prop::at(pa.clone(), WorldExpr::Var(0)));
        assert_eq!(a.natural_polarity(), Polarity::Pos);
        assert_eq!(polarize(&a, Polarity::Pos), a);
    }

    #[test]
    fn world_equality_by_value() {
        let two = Q::from_integer(2);
        let a = WorldExpr::compose(WorldExpr::Id, WorldExpr::rate(two));
        let b = WorldExpr::Lit(World::Rates(vec![two]));
        assert!(wexpr_eq(&a, &b, DomainId::Rates));
        let x = Prop::at(p(vec![]), a);
        let y = Prop::at(p(vec![]), b);
        assert!(prop_eq(&x, &y, DomainId::Rates));
        assert_ne!(x, y);
    }

    #[test]
    fn well_formedness_separates_sorts() {
        let bad = Prop::forall(Sort::World, p(vec![Term::Var(0)]));
        assert!(!bad.is_closed());
        let good = Prop::forall(Sort::World, Prop::at(p(vec![]), WorldExpr::Var(0)));
        assert!(good.is_closed());
    }
}
