use std::fmt;

use super::{remove_indices, select_indices, Proof, Rule, Sequent};
use crate::syntax::{Inst, Judgement, Prop, Sort, Term};
use crate::worlds::{DomainId, WorldExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub domain: DomainId,
    pub allow_cut: bool,
}

impl CheckOptions {
    pub fn new(domain: DomainId) -> CheckOptions {
        CheckOptions { domain, allow_cut: false }
    }

    pub fn with_cut(domain: DomainId) -> CheckOptions {
        CheckOptions { domain, allow_cut: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(f, "at node [{}] ({}): {}", path.join("."), self.rule, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub failure: Option<CheckFailure>,
}

impl CheckReport {
    pub fn success() -> CheckReport {
        CheckReport { ok: true, failure: None }
    }

    pub fn fail(path: Vec<usize>, rule: impl Into<String>, reason: impl Into<String>) -> CheckReport {
        CheckReport { ok: false, failure: Some(CheckFailure { path, rule: rule.into(), reason: reason.into() }) }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => f.write_str("ok"),
            Some(e) => write!(f, "failed {}", e),
        }
    }
}

pub fn check_proof(p: &Proof, opts: &CheckOptions) -> CheckReport {
    if let Err(reason) = check_sequent(&p.conclusion, opts.domain) {
        return CheckReport::fail(Vec::new(), p.rule.name(), reason);
    }
    let mut path = Vec::new();
    match check_node(p, opts, &mut path) {
        Ok(()) => CheckReport::success(),
        Err(reason) => {
            let rule = p_at(p, &path).rule.name();
            CheckReport::fail(path, rule, reason)
        }
    }
}

fn p_at<'a>(p: &'a Proof, path: &[usize]) -> &'a Proof {
    path.iter().fold(p, |q, &i| &q.premises[i])
}

/// Closed, metavariable-free, shift-free judgements whose world literals
/// belong to `d`.
pub fn check_sequent(s: &Sequent, d: DomainId) -> Result<(), String> {
    for j in s.gamma.iter().chain(&s.delta).chain(std::iter::once(&s.goal)) {
        check_judgement(j, d)?;
    }
    Ok(())
}

fn check_judgement(j: &Judgement, d: DomainId) -> Result<(), String> {
    if !j.prop.is_closed() || !j.world.is_closed() {
        return Err(format!("judgement {} is not closed", j));
    }
    if j.prop.has_meta() || j.world.has_meta() {
        return Err(format!("judgement {} contains metavariables", j));
    }
    if j.prop.has_shifts() {
        return Err(format!("judgement {} contains polarity shifts", j));
    }
    let mut bad = None;
    struct Dom<'a>(DomainId, &'a mut Option<DomainId>);
    impl crate::syntax::LeafMap for Dom<'_> {
        fn world(&mut self, w: &WorldExpr, _d: u32) -> Option<WorldExpr> {
            if let Some(x) = w.literal_domain() {
                if x != self.0 {
                    *self.1 = Some(x);
                }
            }
            Some(w.clone())
        }
    }
    j.map_with(&mut Dom(d, &mut bad));
    match bad {
        Some(x) => Err(format!("judgement {} has a {} world in a {} proof", j, x, d)),
        None => Ok(()),
    }
}

fn check_node(p: &Proof, opts: &CheckOptions, path: &mut Vec<usize>) -> Result<(), String> {
    let expected = local(p, opts)?;
    if expected.len() != p.premises.len() {
        return Err(format!("expected {} premises, found {}", expected.len(), p.premises.len()));
    }
    for (i, (want, prem)) in expected.iter().zip(&p.premises).enumerate() {
        if !prem.conclusion.same_as(want, opts.domain) {
            return Err(format!("premise {} proves {} but the rule requires {}", i, prem.conclusion, want));
        }
    }
    for (i, prem) in p.premises.iter().enumerate() {
        path.push(i);
        check_node(prem, opts, path)?;
        path.pop();
    }
    Ok(())
}

fn principal(p: &Proof) -> Result<(usize, &Judgement), String> {
    let k = p.witness.principal.ok_or("missing principal index")?;
    let j = p.conclusion.delta.get(k).ok_or_else(|| format!("principal index {} out of range", k))?;
    Ok((k, j))
}

fn split(p: &Proof, exclude: Option<usize>) -> Result<(Vec<usize>, Vec<usize>), String> {
    let n = p.conclusion.delta.len();
    let mut seen = vec![false; n];
    if let Some(k) = exclude {
        seen[k] = true;
    }
    for &i in &p.witness.split {
        if i >= n {
            return Err(format!("split index {} out of range", i));
        }
        if seen[i] {
            return Err(format!("split index {} overlaps", i));
        }
        seen[i] = true;
    }
    let rest = (0..n).filter(|i| !seen[*i]).collect();
    Ok((p.witness.split.clone(), rest))
}

fn seq(p: &Proof, delta: Vec<Judgement>, goal: Judgement) -> Sequent {
    Sequent { gamma: p.conclusion.gamma.clone(), delta, goal }
}

fn eigen_inst(p: &Proof, sort: Sort) -> Result<Inst, String> {
    let e = p.witness.eigen.as_ref().ok_or("missing eigen-parameter")?;
    if p.conclusion.names().contains(e) {
        return Err(format!("eigen-parameter {} is not fresh", e));
    }
    Ok(match sort {
        Sort::Term => Inst::Term(Term::Fn(e.clone(), Vec::new())),
        Sort::World => Inst::World(WorldExpr::Param(e.clone())),
    })
}

fn given_inst(p: &Proof, sort: Sort, d: DomainId) -> Result<Inst, String> {
    let i = p.witness.inst.as_ref().ok_or("missing instantiation")?;
    if i.sort() != sort {
        return Err("instantiation has the wrong sort".into());
    }
    let ok = match i {
        Inst::Term(t) => t.is_closed() && !matches!(t, Term::Meta(_)) && !term_has_meta(t),
        Inst::World(w) => w.is_closed() && !w.has_meta() && w.literal_domain().is_none_or(|x| x == d),
    };
    if !ok {
        return Err("instantiation is not closed".into());
    }
    Ok(i.clone())
}

fn term_has_meta(t: &Term) -> bool {
    match t {
        Term::Meta(_) => true,
        Term::Fn(_, args) => args.iter().any(term_has_meta),
        Term::World(w) => w.has_meta(),
        Term::Var(_) => false,
    }
}

fn swap_principal(p: &Proof, k: usize, with: Vec<Judgement>) -> Vec<Judgement> {
    let mut delta = remove_indices(&p.conclusion.delta, &[k]);
    delta.extend(with);
    delta
}

/// Premises demanded by the node's rule, witnesses and conclusion.
fn local(p: &Proof, opts: &CheckOptions) -> Result<Vec<Sequent>, String> {
    let d = opts.domain;
    let c = &p.conclusion;
    let goal = &c.goal;
    let w = &goal.world;
    let wrong = |what: &str| Err(format!("{} does not have the required shape", what));
    match p.rule {
        Rule::Init => {
            if c.delta.len() != 1 {
                return Err(format!("init needs exactly one linear hypothesis, found {}", c.delta.len()));
            }
            let h = &c.delta[0];
            if !matches!(h.prop, Prop::Atom(..)) || !matches!(goal.prop, Prop::Atom(..)) {
                return Err("init needs atomic hypothesis and goal".into());
            }
            if !crate::syntax::wexpr_eq(&h.world, w, d) {
                return Err(format!("worlds differ: hypothesis at {} but goal at {}", h.world, w));
            }
            if !h.eq_in(goal, d) {
                return Err(format!("hypothesis {} does not match goal {}", h, goal));
            }
            Ok(vec![])
        }
        Rule::Copy => {
            let k = p.witness.principal.ok_or("missing principal index")?;
            let j = c.gamma.get(k).ok_or("copy index out of range")?;
            let mut delta = c.delta.clone();
            delta.push(j.clone());
            Ok(vec![seq(p, delta, goal.clone())])
        }
        Rule::TensorR => match &goal.prop {
            Prop::Tensor(a, b) => {
                let (l, r) = split(p, None)?;
                Ok(vec![
                    seq(p, select_indices(&c.delta, &l), Judgement::new((**a).clone(), w.clone())),
                    seq(p, select_indices(&c.delta, &r), Judgement::new((**b).clone(), w.clone())),
                ])
            }
            _ => wrong("goal"),
        },
        Rule::OneR => match goal.prop {
            Prop::One if c.delta.is_empty() => Ok(vec![]),
            Prop::One => Err("1R needs an empty linear context".into()),
            _ => wrong("goal"),
        },
        Rule::LolliR => match &goal.prop {
            Prop::Lolli(a, b) => {
                let mut delta = c.delta.clone();
                delta.push(Judgement::new((**a).clone(), w.clone()));
                Ok(vec![seq(p, delta, Judgement::new((**b).clone(), w.clone()))])
            }
            _ => wrong("goal"),
        },
        Rule::TopR => match goal.prop {
            Prop::Top => Ok(vec![]),
            _ => wrong("goal"),
        },
        Rule::WithR => match &goal.prop {
            Prop::With(a, b) => Ok(vec![
                seq(p, c.delta.clone(), Judgement::new((**a).clone(), w.clone())),
                seq(p, c.delta.clone(), Judgement::new((**b).clone(), w.clone())),
            ]),
            _ => wrong("goal"),
        },
        Rule::PlusR(i) => match &goal.prop {
            Prop::Plus(a, b) => {
                let x = if i == 1 { a } else { b };
                Ok(vec![seq(p, c.delta.clone(), Judgement::new((**x).clone(), w.clone()))])
            }
            _ => wrong("goal"),
        },
        Rule::ForallR => match &goal.prop {
            Prop::Forall(s, body) => {
                let e = eigen_inst(p, *s)?;
                Ok(vec![seq(p, c.delta.clone(), Judgement::new(body.instantiate(&e), w.clone()))])
            }
            _ => wrong("goal"),
        },
        Rule::ExistsR => match &goal.prop {
            Prop::Exists(s, body) => {
                let t = given_inst(p, *s, d)?;
                Ok(vec![seq(p, c.delta.clone(), Judgement::new(body.instantiate(&t), w.clone()))])
            }
            _ => wrong("goal"),
        },
        Rule::BangR => match &goal.prop {
            Prop::Bang(a) if c.delta.is_empty() => Ok(vec![seq(p, vec![], Judgement::new((**a).clone(), w.clone()))]),
            Prop::Bang(_) => Err("!R needs an empty linear context".into()),
            _ => wrong("goal"),
        },
        Rule::AtR => match &goal.prop {
            Prop::At(a, u) => Ok(vec![seq(p, c.delta.clone(), Judgement::new((**a).clone(), u.clone()))]),
            _ => wrong("goal"),
        },
        Rule::DnR => match &goal.prop {
            Prop::Local(body) => Ok(vec![seq(p, c.delta.clone(), Judgement::new(body.instantiate(&Inst::World(w.clone())), w.clone()))]),
            _ => wrong("goal"),
        },
        Rule::Cut | Rule::CutBang => {
            if !opts.allow_cut {
                return Err("cut is not allowed in this proof".into());
            }
            let j = p.witness.cut.as_ref().ok_or("missing cut formula")?;
            check_judgement(j, d)?;
            if p.rule == Rule::Cut {
                let (l, r) = split(p, None)?;
                let mut right = select_indices(&c.delta, &r);
                right.push(j.clone());
                Ok(vec![seq(p, select_indices(&c.delta, &l), j.clone()), seq(p, right, goal.clone())])
            } else {
                let mut gamma = c.gamma.clone();
                gamma.push(j.clone());
                Ok(vec![
                    Sequent { gamma: c.gamma.clone(), delta: vec![], goal: j.clone() },
                    Sequent { gamma, delta: c.delta.clone(), goal: goal.clone() },
                ])
            }
        }
        rule => {
            let (k, h) = principal(p)?;
            let u = &h.world;
            let at_u = |a: &Prop| Judgement::new(a.clone(), u.clone());
            match (rule, &h.prop) {
                (Rule::TensorL, Prop::Tensor(a, b)) => Ok(vec![seq(p, swap_principal(p, k, vec![at_u(a), at_u(b)]), goal.clone())]),
                (Rule::OneL, Prop::One) => Ok(vec![seq(p, swap_principal(p, k, vec![]), goal.clone())]),
                (Rule::LolliL, Prop::Lolli(a, b)) => {
                    let (l, r) = split(p, Some(k))?;
                    let mut right = select_indices(&c.delta, &r);
                    right.push(at_u(b));
                    Ok(vec![seq(p, select_indices(&c.delta, &l), at_u(a)), seq(p, right, goal.clone())])
                }
                (Rule::ZeroL, Prop::Zero) => Ok(vec![]),
                (Rule::WithL(i), Prop::With(a, b)) => {
                    let x = if i == 1 { a } else { b };
                    Ok(vec![seq(p, swap_principal(p, k, vec![at_u(x)]), goal.clone())])
                }
                (Rule::PlusL, Prop::Plus(a, b)) => Ok(vec![
                    seq(p, swap_principal(p, k, vec![at_u(a)]), goal.clone()),
                    seq(p, swap_principal(p, k, vec![at_u(b)]), goal.clone()),
                ]),
                (Rule::ForallL, Prop::Forall(s, body)) => {
                    let t = given_inst(p, *s, d)?;
                    Ok(vec![seq(p, swap_principal(p, k, vec![at_u(&body.instantiate(&t))]), goal.clone())])
                }
                (Rule::ExistsL, Prop::Exists(s, body)) => {
                    let e = eigen_inst(p, *s)?;
                    Ok(vec![seq(p, swap_principal(p, k, vec![at_u(&body.instantiate(&e))]), goal.clone())])
                }
                (Rule::BangL, Prop::Bang(a)) => {
                    let mut gamma = c.gamma.clone();
                    gamma.push(at_u(a));
                    Ok(vec![Sequent { gamma, delta: swap_principal(p, k, vec![]), goal: goal.clone() }])
                }
                (Rule::AtL, Prop::At(a, v)) => {
                    Ok(vec![seq(p, swap_principal(p, k, vec![Judgement::new((**a).clone(), v.clone())]), goal.clone())])
                }
                (Rule::DnL, Prop::Local(body)) => {
                    let opened = body.instantiate(&Inst::World(u.clone()));
                    Ok(vec![seq(p, swap_principal(p, k, vec![at_u(&opened)]), goal.clone())])
                }
                _ => Err(format!("principal hypothesis {} does not match rule", h)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Builder;
    use crate::worlds::WorldExpr;

    fn pj(w: &str) -> Judgement {
        Judgement::new(Prop::atom("p", vec![]), WorldExpr::param(w))
    }

    #[test]
    fn init_checks() {
        let b = Builder::new(DomainId::Rates);
        let p = b.init(Sequent::new(vec![], vec![pj("u")], pj("u")));
        assert!(check_proof(&p, &CheckOptions::new(DomainId::Rates)).ok);
    }

    #[test]
    fn init_world_mismatch_fails_at_root() {
        let b = Builder::new(DomainId::Rates);
        let p = b.init(Sequent::new(vec![], vec![pj("v")], pj("u")));
        let r = check_proof(&p, &CheckOptions::new(DomainId::Rates));
        assert!(!r.ok);
        assert!(r.failure.unwrap().path.is_empty());
    }

    #[test]
    fn top_with_nonempty_delta() {
        let b = Builder::new(DomainId::Unit);
        let goal = Judgement::new(Prop::Top, WorldExpr::Id);
        let p = b.leaf(Rule::TopR, Sequent::new(vec![], vec![pj("u"), pj("v")], goal));
        assert!(check_proof(&p, &CheckOptions::new(DomainId::Unit)).ok);
    }

    #[test]
    fn cut_rejected_without_permission() {
        let b = Builder::new(DomainId::Unit);
        let j = pj("u");
        let s = Sequent::new(vec![], vec![j.clone()], j.clone());
        let left = b.init(s.clone());
        let right = b.init(s.clone());
        let p = b.cut(s, j, left, right);
        assert!(!check_proof(&p, &CheckOptions::new(DomainId::Unit)).ok);
        assert!(check_proof(&p, &CheckOptions::with_cut(DomainId::Unit)).ok);
    }

    #[test]
    fn overlapping_split_rejected() {
        let b = Builder::new(DomainId::Unit);
        let goal = Judgement::new(Prop::tensor(Prop::atom("p", vec![]), Prop::atom("p", vec![])), WorldExpr::param("u"));
        let s = Sequent::new(vec![], vec![pj("u"), pj("u")], goal);
        let mut p = b.right(
            Rule::TensorR,
            s,
            vec![b.init(Sequent::new(vec![], vec![pj("u")], pj("u"))), b.init(Sequent::new(vec![], vec![pj("u")], pj("u")))],
        );
        assert!(check_proof(&p, &CheckOptions::new(DomainId::Unit)).ok);
        p.witness.split = vec![0, 0];
        assert!(!check_proof(&p, &CheckOptions::new(DomainId::Unit)).ok);
    }
}
