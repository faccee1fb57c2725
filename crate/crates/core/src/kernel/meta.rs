use super::{contains, fresh_name, position, Builder, Proof, Rule, Sequent};
use crate::syntax::{Inst, Judgement, LeafMap, Prop, Sort, Term};
use crate::worlds::{DomainId, Sym, WorldExpr};

/// A cut-free proof of `·; A @ w ⟹ A @ w`.
pub fn identity_expand(a: &Prop, w: &WorldExpr, d: DomainId) -> Proof {
    identity_expand_in(&[], a, w, d)
}

/// A cut-free proof of `Γ; A @ w ⟹ A @ w`.
pub fn identity_expand_in(gamma: &[Judgement], a: &Prop, w: &WorldExpr, d: DomainId) -> Proof {
    let b = Builder::new(d);
    let j = Judgement::new(a.clone(), w.clone());
    let g = gamma.to_vec();
    let s = |delta: Vec<Judgement>, goal: Judgement| Sequent::new(g.clone(), delta, goal);
    let at = |p: &Prop| Judgement::new(p.clone(), w.clone());
    match a {
        Prop::Atom(..) => b.init(s(vec![j.clone()], j)),
        Prop::Tensor(x, y) => {
            let r = b.right(
                Rule::TensorR,
                s(vec![at(x), at(y)], j.clone()),
                vec![identity_expand_in(gamma, x, w, d), identity_expand_in(gamma, y, w, d)],
            );
            b.left(Rule::TensorL, s(vec![j.clone()], j.clone()), &j, vec![r])
        }
        Prop::One => {
            let r = b.leaf(Rule::OneR, s(vec![], j.clone()));
            b.left(Rule::OneL, s(vec![j.clone()], j.clone()), &j, vec![r])
        }
        Prop::Lolli(x, y) => {
            let l = b.left(
                Rule::LolliL,
                s(vec![j.clone(), at(x)], at(y)),
                &j,
                vec![identity_expand_in(gamma, x, w, d), identity_expand_in(gamma, y, w, d)],
            );
            b.right(Rule::LolliR, s(vec![j.clone()], j), vec![l])
        }
        Prop::With(x, y) => {
            let l1 = b.left(Rule::WithL(1), s(vec![j.clone()], at(x)), &j, vec![identity_expand_in(gamma, x, w, d)]);
            let l2 = b.left(Rule::WithL(2), s(vec![j.clone()], at(y)), &j, vec![identity_expand_in(gamma, y, w, d)]);
            b.right(Rule::WithR, s(vec![j.clone()], j), vec![l1, l2])
        }
        Prop::Top => b.leaf(Rule::TopR, s(vec![j.clone()], j)),
        Prop::Zero => b.left(Rule::ZeroL, s(vec![j.clone()], j.clone()), &j, vec![]),
        Prop::Plus(x, y) => {
            let r1 = b.right(Rule::PlusR(1), s(vec![at(x)], j.clone()), vec![identity_expand_in(gamma, x, w, d)]);
            let r2 = b.right(Rule::PlusR(2), s(vec![at(y)], j.clone()), vec![identity_expand_in(gamma, y, w, d)]);
            b.left(Rule::PlusL, s(vec![j.clone()], j.clone()), &j, vec![r1, r2])
        }
        Prop::Bang(x) => {
            let mut g2 = g.clone();
            let xw = at(x);
            if !contains(&g2, &xw, d) {
                g2.push(xw.clone());
            }
            let inner = identity_expand_in(&g2, x, w, d);
            let cp = b.copy(Sequent::new(g2.clone(), vec![], xw.clone()), &xw, inner);
            let br = b.right(Rule::BangR, Sequent::new(g2, vec![], j.clone()), vec![cp]);
            b.left(Rule::BangL, s(vec![j.clone()], j.clone()), &j, vec![br])
        }
        Prop::Forall(sort, body) => {
            let (e, inst) = eigen(*sort);
            let opened = at(&body.instantiate(&inst));
            let inner = identity_expand_in(gamma, &opened.prop, w, d);
            let l = Builder::with_inst(b.left(Rule::ForallL, s(vec![j.clone()], opened), &j, vec![inner]), inst);
            Builder::with_eigen(b.right(Rule::ForallR, s(vec![j.clone()], j), vec![l]), e)
        }
        Prop::Exists(sort, body) => {
            let (e, inst) = eigen(*sort);
            let opened = at(&body.instantiate(&inst));
            let inner = identity_expand_in(gamma, &opened.prop, w, d);
            let r = Builder::with_inst(b.right(Rule::ExistsR, s(vec![opened.clone()], j.clone()), vec![inner]), inst);
            Builder::with_eigen(b.left(Rule::ExistsL, s(vec![j.clone()], j.clone()), &j, vec![r]), e)
        }
        Prop::At(x, u) => {
            let xu = Judgement::new((**x).clone(), u.clone());
            let r = b.right(Rule::AtR, s(vec![xu.clone()], j.clone()), vec![identity_expand_in(gamma, x, u, d)]);
            b.left(Rule::AtL, s(vec![j.clone()], j.clone()), &j, vec![r])
        }
        Prop::Local(body) => {
            let opened = at(&body.instantiate(&Inst::World(w.clone())));
            let r = b.right(Rule::DnR, s(vec![opened.clone()], j.clone()), vec![identity_expand_in(gamma, &opened.prop, w, d)]);
            b.left(Rule::DnL, s(vec![j.clone()], j.clone()), &j, vec![r])
        }
        Prop::Up(_) | Prop::Down(_) => panic!("identity expansion is defined on unpolarized propositions"),
    }
}

fn eigen(sort: Sort) -> (Sym, Inst) {
    match sort {
        Sort::Term => {
            let e = fresh_name("a");
            (e.clone(), Inst::Term(Term::Fn(e, vec![])))
        }
        Sort::World => {
            let e = fresh_name("w");
            (e.clone(), Inst::World(WorldExpr::Param(e)))
        }
    }
}

/// Renames a constant or world parameter everywhere, eigen witnesses
/// included.
pub(crate) struct Rename<'a> {
    pub from: &'a str,
    pub to: &'a Sym,
}

impl LeafMap for Rename<'_> {
    fn term(&mut self, t: &Term, _d: u32) -> Option<Term> {
        match t {
            Term::Fn(f, args) if args.is_empty() && &**f == self.from => Some(Term::Fn(self.to.clone(), vec![])),
            _ => None,
        }
    }
    fn world(&mut self, w: &WorldExpr, _d: u32) -> Option<WorldExpr> {
        match w {
            WorldExpr::Param(p) if &**p == self.from => Some(WorldExpr::Param(self.to.clone())),
            _ => None,
        }
    }
}

pub(crate) fn rename(p: &Proof, from: &str, to: &Sym) -> Proof {
    let mut q = p.map_with(&mut Rename { from, to });
    rename_eigen_fields(&mut q, from, to);
    q
}

fn rename_eigen_fields(p: &mut Proof, from: &str, to: &Sym) {
    if p.witness.eigen.as_deref() == Some(from) {
        p.witness.eigen = Some(to.clone());
    }
    p.premises.iter_mut().for_each(|q| rename_eigen_fields(q, from, to));
}

/// Give every eigen-parameter of the proof a globally fresh name.
pub(crate) fn freshen_eigens(p: &Proof) -> Proof {
    let mut q = p.clone();
    if let Some(e) = q.witness.eigen.clone() {
        let e2 = fresh_name("a");
        q.premises = q.premises.iter().map(|x| rename(x, &e, &e2)).collect();
        q.witness.eigen = Some(e2);
    }
    q.premises = q.premises.iter().map(freshen_eigens).collect();
    q
}

/// Rename eigen-parameters of this node and below that clash with `avoid`.
pub(crate) fn avoid_eigens(p: &Proof, avoid: &std::collections::BTreeSet<Sym>) -> Proof {
    let mut q = p.clone();
    if let Some(e) = q.witness.eigen.clone() {
        if avoid.contains(&e) {
            let e2 = fresh_name("a");
            q.premises = q.premises.iter().map(|x| rename(x, &e, &e2)).collect();
            q.witness.eigen = Some(e2);
        }
    }
    q.premises = q.premises.iter().map(|x| avoid_eigens(x, avoid)).collect();
    q
}

/// Add `extra` to the unrestricted context of every sequent in the proof.
pub fn weaken(p: &Proof, extra: &[Judgement], d: DomainId) -> Proof {
    if extra.is_empty() {
        return p.clone();
    }
    let mut avoid = std::collections::BTreeSet::new();
    for j in extra {
        j.names(&mut avoid);
    }
    weaken_rec(&avoid_eigens(p, &avoid), extra, d)
}

fn weaken_rec(p: &Proof, extra: &[Judgement], d: DomainId) -> Proof {
    let mut q = p.clone();
    for j in extra {
        if !contains(&q.conclusion.gamma, j, d) {
            q.conclusion.gamma.push(j.clone());
        }
    }
    q.premises = p.premises.iter().map(|x| weaken_rec(x, extra, d)).collect();
    q
}

/// Merge duplicate unrestricted hypotheses equal to `j`.
pub fn contract(p: &Proof, j: &Judgement, d: DomainId) -> Proof {
    let mut q = p.clone();
    let gamma = &p.conclusion.gamma;
    let mut keep: Vec<Judgement> = Vec::new();
    let mut map = Vec::with_capacity(gamma.len());
    for g in gamma {
        let dup = g.eq_in(j, d) && position(&keep, g, d).is_some();
        if dup {
            map.push(position(&keep, g, d).unwrap());
        } else {
            map.push(keep.len());
            keep.push(g.clone());
        }
    }
    if q.rule == Rule::Copy {
        q.witness.principal = q.witness.principal.map(|k| map[k]);
    }
    q.conclusion.gamma = keep;
    q.premises = p.premises.iter().map(|x| contract(x, j, d)).collect();
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_proof, CheckOptions};
    use crate::syntax::{rho, Prop};

    fn ok(p: &Proof, d: DomainId) -> bool {
        let r = check_proof(p, &CheckOptions::new(d));
        if !r.ok {
            eprintln!("{}", r);
        }
        r.ok
    }

    #[test]
    fn identity_on_atom_is_init() {
        let p = identity_expand(&Prop::atom("p", vec![]), &WorldExpr::Id, DomainId::Unit);
        assert_eq!(p.rule, Rule::Init);
        assert!(ok(&p, DomainId::Unit));
    }

    #[test]
    fn identity_on_tensor() {
        let a = Prop::tensor(Prop::atom("p", vec![]), Prop::atom("q", vec![]));
        let p = identity_expand(&a, &WorldExpr::param("w"), DomainId::Rates);
        assert!(ok(&p, DomainId::Rates));
    }

    #[test]
    fn identity_on_localized_at() {
        let a = Prop::local(Prop::at(Prop::atom("p", vec![]), WorldExpr::Var(0)));
        let p = identity_expand(&a, &WorldExpr::param("w"), DomainId::Rates);
        assert_eq!(p.rule, Rule::DnL);
        assert_eq!(p.premises[0].rule, Rule::DnR);
        assert_eq!(p.premises[0].premises[0].rule, Rule::AtL);
        assert!(ok(&p, DomainId::Rates));
    }

    #[test]
    fn identity_on_quantifiers_and_bang() {
        let a = Prop::forall(
            Sort::Term,
            Prop::exists(Sort::World, Prop::bang(Prop::at(Prop::atom("p", vec![Term::Var(1)]), WorldExpr::Var(0)))),
        );
        let p = identity_expand(&a, &WorldExpr::Id, DomainId::Temporal);
        assert!(ok(&p, DomainId::Temporal));
        let r = rho(WorldExpr::param("v"), &Prop::atom("p", vec![]));
        assert!(ok(&identity_expand(&r, &WorldExpr::Id, DomainId::Rates), DomainId::Rates));
    }

    #[test]
    fn weaken_and_contract() {
        let d = DomainId::Unit;
        let a = Prop::lolli(Prop::atom("p", vec![]), Prop::atom("q", vec![]));
        let p = identity_expand(&a, &WorldExpr::Id, d);
        let extra = Judgement::new(Prop::atom("r", vec![]), WorldExpr::Id);
        let w = weaken(&p, std::slice::from_ref(&extra), d);
        assert!(ok(&w, d));
        assert!(contains(&w.conclusion.gamma, &extra, d));
        assert_eq!(weaken(&p, &[], d), p);
        let mut dup = w.clone();
        fn push(p: &mut Proof, j: &Judgement) {
            p.conclusion.gamma.push(j.clone());
            p.premises.iter_mut().for_each(|q| push(q, j));
        }
        push(&mut dup, &extra);
        let c = contract(&dup, &extra, d);
        assert!(ok(&c, d));
        assert_eq!(c.conclusion.gamma.len(), 1);
    }
}
