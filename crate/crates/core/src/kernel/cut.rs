use super::meta::{avoid_eigens, freshen_eigens, weaken};
use super::{contains, position, remove_one, Builder, Proof, Rule, Sequent};
use crate::syntax::{Judgement, ReplaceName};
use crate::worlds::DomainId;

/// Remove every cut. The result proves the same end-sequent, with the
/// same ordering of Γ and Δ.
pub fn cut_eliminate(p: &Proof, d: DomainId) -> Proof {
    let q = elim(p, d);
    retarget(q, &p.conclusion, d)
}

fn elim(p: &Proof, d: DomainId) -> Proof {
    let prems: Vec<Proof> = p.premises.iter().map(|q| elim(q, d)).collect();
    match p.rule {
        Rule::Cut => {
            let j = p.witness.cut.as_ref().expect("cut formula");
            admissible_cut(&prems[0], &prems[1], j, d)
        }
        Rule::CutBang => {
            let j = p.witness.cut.as_ref().expect("cut formula");
            cut_bang(&prems[0], &prems[1], j, d)
        }
        _ => Proof { premises: prems, ..p.clone() },
    }
}

/// Reorder the root conclusion to `target` (equal as a sequent),
/// remapping witness indices.
pub(crate) fn retarget(mut p: Proof, target: &Sequent, d: DomainId) -> Proof {
    debug_assert!(p.conclusion.same_as(target, d), "{} vs {}", p.conclusion, target);
    let old = &p.conclusion.delta;
    let mut taken = vec![false; target.delta.len()];
    let mut perm = Vec::with_capacity(old.len());
    for j in old {
        let i = (0..target.delta.len())
            .find(|&i| !taken[i] && &target.delta[i] == j)
            .or_else(|| (0..target.delta.len()).find(|&i| !taken[i] && target.delta[i].eq_in(j, d)))
            .expect("retarget: Δ mismatch");
        taken[i] = true;
        perm.push(i);
    }
    if p.rule == Rule::Copy {
        let k = p.witness.principal.expect("copy index");
        p.witness.principal = position(&target.gamma, &p.conclusion.gamma[k], d);
    } else if p.rule != Rule::Init {
        p.witness.principal = p.witness.principal.map(|k| perm[k]);
    }
    let mut split: Vec<usize> = p.witness.split.iter().map(|&i| perm[i]).collect();
    split.sort_unstable();
    p.witness.split = split;
    p.conclusion = target.clone();
    p
}

fn concat(a: &[Judgement], b: &[Judgement]) -> Vec<Judgement> {
    a.iter().chain(b).cloned().collect()
}

fn gamma_extra(inner: &[Judgement], outer: &[Judgement], d: DomainId) -> Vec<Judgement> {
    inner.iter().filter(|j| !contains(outer, j, d)).cloned().collect()
}

/// Does premise `i` of `p` inherit the goal of `p`?
fn inherits_goal(p: &Proof, i: usize) -> bool {
    match p.rule {
        Rule::LolliL => i == 1,
        Rule::Cut => i == 1,
        Rule::CutBang => i == 1,
        r => r.is_left() || r == Rule::Copy,
    }
}

/// Rebuild `orig` with a new conclusion and premises, recomputing indices
/// from the principal judgement.
fn rebuild(orig: &Proof, conclusion: Sequent, premises: Vec<Proof>, d: DomainId) -> Proof {
    let b = Builder::new(d);
    let mut out = if orig.rule == Rule::Copy {
        let j = &orig.conclusion.gamma[orig.witness.principal.unwrap()];
        b.copy(conclusion, j, premises.into_iter().next().unwrap())
    } else if orig.rule.is_left() {
        let j = &orig.conclusion.delta[orig.witness.principal.unwrap()];
        b.left(orig.rule, conclusion, j, premises)
    } else if orig.rule == Rule::Init {
        b.init(conclusion)
    } else {
        b.right(orig.rule, conclusion, premises)
    };
    out.witness.inst = orig.witness.inst.clone();
    out.witness.eigen = orig.witness.eigen.clone();
    out
}

fn principal_of(p: &Proof) -> Option<&Judgement> {
    if p.rule.is_left() || p.rule == Rule::Init {
        p.witness.principal.map(|k| &p.conclusion.delta[k])
    } else {
        None
    }
}

/// From `D: Γ; Δ1 ⟹ J` and `E: Γ; Δ2, J ⟹ C`, both cut-free, build a
/// cut-free proof of `Γ; Δ1, Δ2 ⟹ C`.
pub fn admissible_cut(dp: &Proof, ep: &Proof, j: &Judgement, d: DomainId) -> Proof {
    let gamma = dp.conclusion.gamma.clone();
    let delta1 = dp.conclusion.delta.clone();
    let delta2 = remove_one(&ep.conclusion.delta, j, d).expect("cut hypothesis missing from right premise");
    let goal = ep.conclusion.goal.clone();
    let target = Sequent::new(gamma.clone(), concat(&delta1, &delta2), goal.clone());

    // Identity cases.
    if dp.rule == Rule::Init {
        return retarget(ep.clone(), &target, d);
    }
    if ep.rule == Rule::Init {
        return retarget(dp.clone(), &target, d);
    }

    // D does not end with a right rule on J: permute the cut into D.
    if dp.rule.is_left() || dp.rule == Rule::Copy {
        if dp.rule == Rule::ZeroL {
            return rebuild(dp, target, vec![], d);
        }
        let dp = avoid_eigens_root(dp, &ep.conclusion.names());
        let mut prems = Vec::new();
        for (i, di) in dp.premises.iter().enumerate() {
            if inherits_goal(&dp, i) {
                let extra = gamma_extra(&di.conclusion.gamma, &gamma, d);
                let ei = weaken(ep, &extra, d);
                prems.push(admissible_cut(di, &ei, j, d));
            } else {
                prems.push(di.clone());
            }
        }
        return rebuild(&dp, target, prems, d);
    }

    let e_principal = principal_of(ep).is_some_and(|h| h.eq_in(j, d));
    if !e_principal {
        return right_commute(dp, ep, j, target, d);
    }

    // Principal cases: D ends with the right rule and E with the left rule
    // for the connective of J.
    let dprem = |i: usize| &dp.premises[i];
    let eprem = |i: usize| &ep.premises[i];
    let goal_of = |p: &Proof| p.conclusion.goal.clone();
    let out = match (&dp.rule, &ep.rule) {
        (Rule::TensorR, Rule::TensorL) => {
            let (a1, a2) = (goal_of(dprem(0)), goal_of(dprem(1)));
            let inner = admissible_cut(dprem(1), eprem(0), &a2, d);
            admissible_cut(dprem(0), &inner, &a1, d)
        }
        (Rule::OneR, Rule::OneL) => eprem(0).clone(),
        (Rule::LolliR, Rule::LolliL) => {
            let a1 = goal_of(eprem(0));
            let a2 = goal_of(dprem(0));
            let e0 = weaken(eprem(0), &gamma_extra(&gamma, &eprem(0).conclusion.gamma, d), d);
            let inner = admissible_cut(&e0, dprem(0), &a1, d);
            admissible_cut(&inner, eprem(1), &a2, d)
        }
        (Rule::WithR, Rule::WithL(i)) => {
            let di = dprem(*i as usize - 1);
            admissible_cut(di, eprem(0), &goal_of(di), d)
        }
        (Rule::PlusR(i), Rule::PlusL) => admissible_cut(dprem(0), eprem(*i as usize - 1), &goal_of(dprem(0)), d),
        (Rule::ForallR, Rule::ForallL) => {
            let a = dp.witness.eigen.clone().expect("eigen");
            let tau = ep.witness.inst.clone().expect("inst");
            let d1 = freshen_eigens(dprem(0)).map_with(&mut ReplaceName { name: &a, with: &tau });
            admissible_cut(&d1, eprem(0), &goal_of(&d1), d)
        }
        (Rule::ExistsR, Rule::ExistsL) => {
            let a = ep.witness.eigen.clone().expect("eigen");
            let tau = dp.witness.inst.clone().expect("inst");
            let e1 = freshen_eigens(eprem(0)).map_with(&mut ReplaceName { name: &a, with: &tau });
            admissible_cut(dprem(0), &e1, &goal_of(dprem(0)), d)
        }
        (Rule::BangR, Rule::BangL) => {
            let a = goal_of(dprem(0));
            cut_bang(dprem(0), eprem(0), &a, d)
        }
        (Rule::AtR, Rule::AtL) | (Rule::DnR, Rule::DnL) => admissible_cut(dprem(0), eprem(0), &goal_of(dprem(0)), d),
        (r1, r2) => panic!("no principal reduction for {} against {}", r1, r2),
    };
    retarget(out, &target, d)
}

fn avoid_eigens_root(p: &Proof, avoid: &std::collections::BTreeSet<crate::worlds::Sym>) -> Proof {
    match &p.witness.eigen {
        Some(e) if avoid.contains(e) => avoid_eigens(p, avoid),
        _ => p.clone(),
    }
}

/// E does not decompose the cut hypothesis: permute the cut into the
/// premises of E that receive it.
fn right_commute(dp: &Proof, ep: &Proof, j: &Judgement, target: Sequent, d: DomainId) -> Proof {
    if matches!(ep.rule, Rule::TopR | Rule::ZeroL) {
        return rebuild(ep, target, vec![], d);
    }
    let ep = avoid_eigens_root(ep, &dp.conclusion.names());
    // Which premises hold the hypothesis.
    let hyp = position(&ep.conclusion.delta, j, d).expect("hypothesis");
    let receives = |i: usize| -> bool {
        match ep.rule {
            Rule::TensorR => (i == 0) == ep.witness.split.contains(&hyp),
            Rule::LolliL => (i == 0) == ep.witness.split.contains(&hyp),
            _ => true,
        }
    };
    let mut prems = Vec::new();
    for (i, ei) in ep.premises.iter().enumerate() {
        if receives(i) && contains(&ei.conclusion.delta, j, d) {
            let extra = gamma_extra(&ei.conclusion.gamma, &dp.conclusion.gamma, d);
            let di = weaken(dp, &extra, d);
            prems.push(admissible_cut(&di, ei, j, d));
        } else {
            prems.push(ei.clone());
        }
    }
    rebuild(&ep, target, prems, d)
}

/// From `D: Γ; · ⟹ J` and `E: Γ, J; Δ ⟹ C`, both cut-free, build a
/// cut-free proof of `Γ; Δ ⟹ C`.
pub(crate) fn cut_bang(dp: &Proof, ep: &Proof, j: &Judgement, d: DomainId) -> Proof {
    let gamma = &dp.conclusion.gamma;
    if contains(gamma, j, d) {
        return ep.clone();
    }
    let new_gamma: Vec<Judgement> = ep.conclusion.gamma.iter().filter(|g| !g.eq_in(j, d)).cloned().collect();
    let target = Sequent::new(new_gamma, ep.conclusion.delta.clone(), ep.conclusion.goal.clone());
    let ep = avoid_eigens_root(ep, &dp.conclusion.names());
    let copies_j = ep.rule == Rule::Copy && ep.conclusion.gamma[ep.witness.principal.unwrap()].eq_in(j, d);
    if copies_j {
        let inner = cut_bang(dp, &ep.premises[0], j, d);
        let dw = weaken(dp, &gamma_extra(&inner.conclusion.gamma, gamma, d), d);
        let out = admissible_cut(&dw, &inner, j, d);
        return retarget(out, &target, d);
    }
    let prems = ep
        .premises
        .iter()
        .map(|ei| {
            let extra = gamma_extra(&ei.conclusion.gamma, &ep.conclusion.gamma, d);
            cut_bang(&weaken(dp, &extra, d), ei, j, d)
        })
        .collect();
    rebuild(&ep, target, prems, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_proof, identity_expand, CheckOptions};
    use crate::syntax::{Prop, Sort, Term};
    use crate::worlds::WorldExpr;

    fn cut_ids(a: &Prop, d: DomainId) {
        let w = WorldExpr::param("w");
        let j = Judgement::new(a.clone(), w.clone());
        let left = identity_expand(a, &w, d);
        let right = identity_expand(a, &w, d);
        let s = Sequent::new(vec![], vec![j.clone()], j.clone());
        let p = Builder::new(d).cut(s.clone(), j, left, right);
        assert!(check_proof(&p, &CheckOptions::with_cut(d)).ok);
        let q = cut_eliminate(&p, d);
        let r = check_proof(&q, &CheckOptions::new(d));
        assert!(r.ok, "{}: {}", a, r);
        assert_eq!(q.count_cuts(), 0);
        assert_eq!(q.conclusion, s);
    }

    #[test]
    fn identity_cuts_collapse() {
        let p = Prop::atom("p", vec![]);
        let q = Prop::atom("q", vec![Term::Var(0)]);
        let cases = vec![
            p.clone(),
            Prop::tensor(p.clone(), Prop::One),
            Prop::lolli(p.clone(), Prop::with(p.clone(), Prop::Top)),
            Prop::plus(Prop::Zero, Prop::bang(p.clone())),
            Prop::forall(Sort::Term, Prop::exists(Sort::Term, q.clone())),
            Prop::local(Prop::at(Prop::bang(p.clone()), WorldExpr::Var(0))),
            Prop::forall(Sort::World, Prop::at(p.clone(), WorldExpr::Var(0))),
        ];
        for a in &cases {
            cut_ids(a, DomainId::Rates);
        }
    }
}
