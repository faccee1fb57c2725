//! Metavariables for ∀L/∃R instances, with first-order unification of
//! terms and unification of worlds modulo the domain's monoid laws.

use std::collections::HashMap;

use crate::syntax::{map_world, Inst, Judgement, LeafMap, Prop, Term};
use crate::worlds::{DomainId, NormWorld, RItem, Sym, WAtom, WorldExpr};

#[derive(Debug, Clone)]
enum Val {
    Term(Term),
    World(WorldExpr),
}

enum Trail {
    Bind(u32),
    Stamp(u32, usize),
}

/// Metavariable store with an undo trail. A metavariable created when `n`
/// eigen-parameters existed may only be bound to values over the first `n`.
#[derive(Default)]
pub(crate) struct Metas {
    vals: Vec<Option<Val>>,
    stamps: Vec<usize>,
    trail: Vec<Trail>,
    /// Creation index of every eigen-parameter.
    eigens: HashMap<Sym, usize>,
}

impl Metas {
    pub fn fresh(&mut self) -> u32 {
        self.vals.push(None);
        self.stamps.push(self.eigens.len());
        (self.vals.len() - 1) as u32
    }

    pub fn add_eigen(&mut self, name: Sym) {
        let n = self.eigens.len();
        self.eigens.insert(name, n);
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Trail::Bind(m) => self.vals[m as usize] = None,
                Trail::Stamp(m, s) => self.stamps[m as usize] = s,
            }
        }
    }

    fn bind(&mut self, m: u32, v: Val) -> bool {
        // Occurs and scope checks.
        let mut metas = Vec::new();
        let mut params = Vec::new();
        match &v {
            Val::Term(t) => collect_term(t, &mut metas, &mut params),
            Val::World(w) => collect_world(w, &mut metas, &mut params),
        }
        if metas.contains(&m) {
            return false;
        }
        let stamp = self.stamps[m as usize];
        if params.iter().any(|p| self.eigens.get(p).is_some_and(|&i| i >= stamp)) {
            return false;
        }
        for x in metas {
            let s = self.stamps[x as usize];
            if s > stamp {
                self.trail.push(Trail::Stamp(x, s));
                self.stamps[x as usize] = stamp;
            }
        }
        self.vals[m as usize] = Some(v);
        self.trail.push(Trail::Bind(m));
        true
    }

    pub fn zonk_term(&self, t: &Term) -> Term {
        t.map_with(&mut Zonk(self), 0)
    }

    pub fn zonk_world(&self, w: &WorldExpr) -> WorldExpr {
        map_world(w, &mut Zonk(self), 0)
    }

    pub fn zonk(&self, j: &Judgement) -> Judgement {
        j.map_with(&mut Zonk(self))
    }

    pub fn zonk_inst(&self, i: &Inst) -> Inst {
        match i {
            Inst::Term(t) => Inst::Term(self.zonk_term(t)),
            Inst::World(w) => Inst::World(self.zonk_world(w)),
        }
    }

    pub fn unify_judgement(&mut self, a: &Judgement, b: &Judgement, d: DomainId) -> bool {
        let m = self.mark();
        let ok = self.unify_prop(&a.prop, &b.prop, d) && self.unify_world(&a.world, &b.world, d);
        if !ok {
            self.undo(m);
        }
        ok
    }

    /// Atomic propositions only (the search unifies at identity leaves).
    fn unify_prop(&mut self, a: &Prop, b: &Prop, d: DomainId) -> bool {
        match (a, b) {
            (Prop::Atom(p, f, xs), Prop::Atom(q, g, ys)) => {
                p == q && f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify_term(x, y, d))
            }
            (Prop::Up(x), Prop::Up(y)) | (Prop::Down(x), Prop::Down(y)) => self.unify_prop(x, y, d),
            _ => false,
        }
    }

    fn head(&self, t: &Term) -> Term {
        let mut t = t.clone();
        while let Term::Meta(m) = t {
            match &self.vals[m as usize] {
                Some(Val::Term(v)) => t = v.clone(),
                Some(Val::World(w)) => t = Term::World(w.clone()),
                None => break,
            }
        }
        t
    }

    pub fn unify_term(&mut self, a: &Term, b: &Term, d: DomainId) -> bool {
        let (a, b) = (self.head(a), self.head(b));
        match (&a, &b) {
            (Term::Meta(x), Term::Meta(y)) if x == y => true,
            (Term::Meta(x), _) => {
                let v = self.zonk_term(&b);
                self.bind(*x, Val::Term(v))
            }
            (_, Term::Meta(y)) => {
                let v = self.zonk_term(&a);
                self.bind(*y, Val::Term(v))
            }
            (Term::Fn(f, xs), Term::Fn(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify_term(x, y, d))
            }
            (Term::World(x), Term::World(y)) => self.unify_world(x, y, d),
            _ => a == b,
        }
    }

    pub fn unify_world(&mut self, a: &WorldExpr, b: &WorldExpr, d: DomainId) -> bool {
        let (a, b) = (self.zonk_world(a), self.zonk_world(b));
        let (Ok(x), Ok(y)) = (NormWorld::of(&a, d), NormWorld::of(&b, d)) else {
            return false;
        };
        if x == y {
            return true;
        }
        match (x, y) {
            (NormWorld::Unit, _) | (_, NormWorld::Unit) => true,
            (NormWorld::Temporal { offset: o1, atoms: xs }, NormWorld::Temporal { offset: o2, atoms: ys }) => {
                let (mut xs, mut ys) = (xs, ys);
                cancel(&mut xs, &mut ys);
                self.solve_temporal(o1, &xs, o2, &ys) || self.solve_temporal(o2, &ys, o1, &xs)
            }
            (NormWorld::Rates(xs), NormWorld::Rates(ys)) => {
                let pre = xs.iter().zip(&ys).take_while(|(a, b)| a == b).count();
                let (xs, ys) = (&xs[pre..], &ys[pre..]);
                let suf = xs.iter().rev().zip(ys.iter().rev()).take_while(|(a, b)| a == b).count();
                let (xs, ys) = (&xs[..xs.len() - suf], &ys[..ys.len() - suf]);
                self.solve_rates(xs, ys) || self.solve_rates(ys, xs)
            }
            _ => false,
        }
    }

    /// `o1 + xs = o2 + ys` where `xs` is a single metavariable.
    fn solve_temporal(&mut self, o1: crate::worlds::Q, xs: &[WAtom], o2: crate::worlds::Q, ys: &[WAtom]) -> bool {
        match xs {
            [WAtom::Meta(m)] if o2 >= o1 => {
                let v = NormWorld::Temporal { offset: o2 - o1, atoms: ys.to_vec() };
                self.bind(*m, Val::World(v.to_expr()))
            }
            _ => false,
        }
    }

    fn solve_rates(&mut self, xs: &[RItem], ys: &[RItem]) -> bool {
        match xs {
            [RItem::Atom(WAtom::Meta(m))] => self.bind(*m, Val::World(NormWorld::Rates(ys.to_vec()).to_expr())),
            _ if ys.is_empty() && xs.iter().all(|i| matches!(i, RItem::Atom(WAtom::Meta(_)))) => {
                let m = self.mark();
                for i in xs {
                    if let RItem::Atom(WAtom::Meta(x)) = i {
                        if !self.bind(*x, Val::World(WorldExpr::Id)) {
                            self.undo(m);
                            return false;
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }

    /// Binds every remaining metavariable to a default value: terms to the
    /// constant `_u`, worlds to the identity.
    pub fn ground(&mut self) {
        for m in 0..self.vals.len() {
            if self.vals[m].is_none() {
                self.vals[m] = Some(Val::Term(Term::cnst("_u")));
                self.trail.push(Trail::Bind(m as u32));
            }
        }
    }
}

fn cancel(xs: &mut Vec<WAtom>, ys: &mut Vec<WAtom>) {
    let mut i = 0;
    while i < xs.len() {
        if let Some(j) = ys.iter().position(|y| *y == xs[i]) {
            ys.remove(j);
            xs.remove(i);
        } else {
            i += 1;
        }
    }
}

fn collect_term(t: &Term, metas: &mut Vec<u32>, params: &mut Vec<Sym>) {
    match t {
        Term::Meta(m) => metas.push(*m),
        Term::Fn(f, args) => {
            if args.is_empty() {
                params.push(f.clone());
            }
            args.iter().for_each(|a| collect_term(a, metas, params));
        }
        Term::World(w) => collect_world(w, metas, params),
        Term::Var(_) => {}
    }
}

fn collect_world(w: &WorldExpr, metas: &mut Vec<u32>, params: &mut Vec<Sym>) {
    match w {
        WorldExpr::Meta(m) => metas.push(*m),
        WorldExpr::Param(p) => params.push(p.clone()),
        WorldExpr::Compose(a, b) => {
            collect_world(a, metas, params);
            collect_world(b, metas, params);
        }
        _ => {}
    }
}

struct Zonk<'a>(&'a Metas);

impl LeafMap for Zonk<'_> {
    fn term(&mut self, t: &Term, depth: u32) -> Option<Term> {
        match t {
            Term::Meta(m) => match &self.0.vals[*m as usize] {
                Some(Val::Term(v)) => Some(v.map_with(self, depth)),
                Some(Val::World(w)) => Some(Term::World(map_world(w, self, depth))),
                None => None,
            },
            _ => None,
        }
    }
    fn world(&mut self, w: &WorldExpr, depth: u32) -> Option<WorldExpr> {
        match w {
            WorldExpr::Meta(m) => match &self.0.vals[*m as usize] {
                Some(Val::World(v)) => Some(map_world(v, self, depth)),
                // A world metavariable grounded as a term default.
                Some(Val::Term(_)) => Some(WorldExpr::Id),
                None => None,
            },
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worlds::{sym, World};
    use num_rational::Ratio;

    #[test]
    fn term_unification_and_undo() {
        let mut ms = Metas::default();
        let m = ms.fresh();
        let a = Term::Fn(sym("f"), vec![Term::Meta(m)]);
        let b = Term::Fn(sym("f"), vec![Term::cnst("c")]);
        let mark = ms.mark();
        assert!(ms.unify_term(&a, &b, DomainId::Unit));
        assert_eq!(ms.zonk_term(&a), b);
        ms.undo(mark);
        assert_eq!(ms.zonk_term(&a), a);
    }

    #[test]
    fn occurs_and_scope() {
        let mut ms = Metas::default();
        let m = ms.fresh();
        assert!(!ms.unify_term(&Term::Meta(m), &Term::Fn(sym("f"), vec![Term::Meta(m)]), DomainId::Unit));
        ms.add_eigen(sym("_a0"));
        assert!(!ms.unify_term(&Term::Meta(m), &Term::cnst("_a0"), DomainId::Unit));
        let n = ms.fresh();
        assert!(ms.unify_term(&Term::Meta(n), &Term::cnst("_a0"), DomainId::Unit));
    }

    #[test]
    fn temporal_residual() {
        let mut ms = Metas::default();
        let m = ms.fresh();
        let t = |n: i64| WorldExpr::lit(World::Temporal(Ratio::from_integer(n)));
        assert!(ms.unify_world(&WorldExpr::compose(t(2), WorldExpr::Meta(m)), &t(5), DomainId::Temporal));
        assert!(crate::worlds::world_eq(&ms.zonk_world(&WorldExpr::Meta(m)), &t(3), DomainId::Temporal));
        let k = ms.fresh();
        assert!(!ms.unify_world(&WorldExpr::compose(t(5), WorldExpr::Meta(k)), &t(2), DomainId::Temporal));
    }

    #[test]
    fn rates_suffix() {
        let mut ms = Metas::default();
        let m = ms.fresh();
        let r = |n: i64| WorldExpr::rate(Ratio::from_integer(n));
        let lhs = WorldExpr::compose(WorldExpr::compose(r(2), WorldExpr::Meta(m)), r(7));
        let rhs = WorldExpr::compose(WorldExpr::compose(r(2), WorldExpr::compose(r(3), r(4))), r(7));
        assert!(ms.unify_world(&lhs, &rhs, DomainId::Rates));
        assert!(crate::worlds::world_eq(&ms.zonk_world(&lhs), &rhs, DomainId::Rates));
    }
}
