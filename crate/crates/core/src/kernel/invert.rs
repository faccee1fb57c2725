use thiserror::Error;

use super::{fresh_name, Rule, Sequent};
use crate::syntax::{Inst, Judgement, Prop, Sort, Term};
use crate::worlds::WorldExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("rule {0} is not invertible")]
    NotInvertible(Rule),
    #[error("no principal formula for {0}")]
    NoPrincipal(Rule),
}

fn eigen_inst(sort: Sort) -> Inst {
    match sort {
        Sort::Term => Inst::Term(Term::Fn(fresh_name("a"), vec![])),
        Sort::World => Inst::World(WorldExpr::Param(fresh_name("w"))),
    }
}

/// Premises of an invertible rule applied to its first eligible principal
/// formula. Provability of the premises is equivalent to provability of
/// the sequent.
pub fn invert(rule: Rule, s: &Sequent) -> Result<Vec<Sequent>, InvertError> {
    let goal = &s.goal;
    let w = &goal.world;
    let with_goal = |p: Prop, world: WorldExpr| Sequent::new(s.gamma.clone(), s.delta.clone(), Judgement::new(p, world));
    let right = match (rule, &goal.prop) {
        (Rule::WithR, Prop::With(a, b)) => Some(vec![with_goal((**a).clone(), w.clone()), with_goal((**b).clone(), w.clone())]),
        (Rule::TopR, Prop::Top) => Some(vec![]),
        (Rule::LolliR, Prop::Lolli(a, b)) => {
            let mut delta = s.delta.clone();
            delta.push(Judgement::new((**a).clone(), w.clone()));
            Some(vec![Sequent::new(s.gamma.clone(), delta, Judgement::new((**b).clone(), w.clone()))])
        }
        (Rule::ForallR, Prop::Forall(sort, body)) => Some(vec![with_goal(body.instantiate(&eigen_inst(*sort)), w.clone())]),
        (Rule::DnR, Prop::Local(body)) => Some(vec![with_goal(body.instantiate(&Inst::World(w.clone())), w.clone())]),
        (Rule::AtR, Prop::At(a, u)) => Some(vec![with_goal((**a).clone(), u.clone())]),
        (Rule::WithR | Rule::TopR | Rule::LolliR | Rule::ForallR | Rule::DnR | Rule::AtR, _) => return Err(InvertError::NoPrincipal(rule)),
        _ => None,
    };
    if let Some(r) = right {
        return Ok(r);
    }
    if !matches!(rule, Rule::TensorL | Rule::OneL | Rule::PlusL | Rule::ZeroL | Rule::ExistsL | Rule::BangL | Rule::DnL | Rule::AtL) {
        return Err(InvertError::NotInvertible(rule));
    }
    for (k, h) in s.delta.iter().enumerate() {
        let u = &h.world;
        let mut rest = s.delta.clone();
        rest.remove(k);
        let with = |extra: Vec<Judgement>| {
            let mut delta = rest.clone();
            delta.extend(extra);
            Sequent::new(s.gamma.clone(), delta, goal.clone())
        };
        let at_u = |p: &Prop| Judgement::new(p.clone(), u.clone());
        let out = match (rule, &h.prop) {
            (Rule::TensorL, Prop::Tensor(a, b)) => vec![with(vec![at_u(a), at_u(b)])],
            (Rule::OneL, Prop::One) => vec![with(vec![])],
            (Rule::PlusL, Prop::Plus(a, b)) => vec![with(vec![at_u(a)]), with(vec![at_u(b)])],
            (Rule::ZeroL, Prop::Zero) => vec![],
            (Rule::ExistsL, Prop::Exists(sort, body)) => vec![with(vec![at_u(&body.instantiate(&eigen_inst(*sort)))])],
            (Rule::BangL, Prop::Bang(a)) => {
                let mut gamma = s.gamma.clone();
                gamma.push(at_u(a));
                vec![Sequent::new(gamma, rest.clone(), goal.clone())]
            }
            (Rule::DnL, Prop::Local(body)) => vec![with(vec![at_u(&body.instantiate(&Inst::World(u.clone())))])],
            (Rule::AtL, Prop::At(a, v)) => vec![with(vec![Judgement::new((**a).clone(), v.clone())])],
            _ => continue,
        };
        return Ok(out);
    }
    Err(InvertError::NoPrincipal(rule))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(p: Prop) -> Judgement {
        Judgement::new(p, WorldExpr::param("w"))
    }

    #[test]
    fn lolli_right() {
        let a = Prop::atom("a", vec![]);
        let b = Prop::atom("b", vec![]);
        let s = Sequent::new(vec![], vec![], j(Prop::lolli(a.clone(), b.clone())));
        assert_eq!(invert(Rule::LolliR, &s).unwrap(), vec![Sequent::new(vec![], vec![j(a)], j(b))]);
    }

    #[test]
    fn tensor_left_splits() {
        let a = Prop::atom("a", vec![]);
        let b = Prop::atom("b", vec![]);
        let s = Sequent::new(vec![], vec![j(Prop::tensor(a.clone(), b.clone()))], j(Prop::One));
        assert_eq!(invert(Rule::TensorL, &s).unwrap(), vec![Sequent::new(vec![], vec![j(a), j(b)], j(Prop::One))]);
    }

    #[test]
    fn zero_left_closes() {
        let s = Sequent::new(vec![], vec![j(Prop::Zero)], j(Prop::atom("c", vec![])));
        assert_eq!(invert(Rule::ZeroL, &s).unwrap(), vec![]);
    }

    #[test]
    fn errors() {
        let s = Sequent::new(vec![], vec![], j(Prop::One));
        assert_eq!(invert(Rule::TensorR, &s), Err(InvertError::NotInvertible(Rule::TensorR)));
        assert_eq!(invert(Rule::LolliR, &s), Err(InvertError::NoPrincipal(Rule::LolliR)));
    }
}
