use super::{is_shifted_neg_atom, is_shifted_pos_atom, FRule, FocProof, FocSequent, Form, Goal};
use crate::kernel::{multiset_eq, remove_indices, select_indices, set_eq, CheckReport};
use crate::syntax::{Inst, Judgement, Polarity, Prop, Sort, Term};
use crate::worlds::{DomainId, WorldExpr};

/// Checks a focused derivation rule by rule, including the polarity
/// discipline of every sequent.
pub fn check_focused(p: &FocProof, d: DomainId) -> CheckReport {
    if let Err(reason) = root_ok(&p.conclusion, d) {
        return CheckReport::fail(Vec::new(), p.rule.name(), reason);
    }
    let mut path = Vec::new();
    match node(p, d, &mut path) {
        Ok(()) => CheckReport::success(),
        Err(reason) => {
            let rule = path.iter().fold(p, |q, &i| &q.premises[i]).rule.name();
            CheckReport::fail(path, rule, reason)
        }
    }
}

fn root_ok(s: &FocSequent, d: DomainId) -> Result<(), String> {
    s.polarities_ok()?;
    let mut all: Vec<&Judgement> = s.gamma.iter().chain(&s.delta).collect();
    match &s.form {
        Form::Active { omega, goal } => {
            all.extend(omega);
            all.push(goal.judgement());
        }
        Form::LeftFocus { focus, goal } => {
            all.push(focus);
            all.push(goal);
        }
        Form::RightFocus { focus } => all.push(focus),
    }
    for j in all {
        if !j.prop.is_closed() || !j.world.is_closed() || j.prop.has_meta() || j.world.has_meta() {
            return Err(format!("judgement {} is not closed", j));
        }
        if let Some(x) = j.world.literal_domain() {
            if x != d {
                return Err(format!("judgement {} has a {} world", j, x));
            }
        }
    }
    Ok(())
}

/// Equality of focused sequents: Γ as a set, Δ and Ω as multisets.
pub(crate) fn same(a: &FocSequent, b: &FocSequent, d: DomainId) -> bool {
    if !set_eq(&a.gamma, &b.gamma, d) || !multiset_eq(&a.delta, &b.delta, d) {
        return false;
    }
    match (&a.form, &b.form) {
        (Form::Active { omega: o1, goal: g1 }, Form::Active { omega: o2, goal: g2 }) => {
            multiset_eq(o1, o2, d)
                && match (g1, g2) {
                    (Goal::Neg(x), Goal::Neg(y)) | (Goal::Pos(x), Goal::Pos(y)) => x.eq_in(y, d),
                    _ => false,
                }
        }
        (Form::LeftFocus { focus: f1, goal: g1 }, Form::LeftFocus { focus: f2, goal: g2 }) => f1.eq_in(f2, d) && g1.eq_in(g2, d),
        (Form::RightFocus { focus: f1 }, Form::RightFocus { focus: f2 }) => f1.eq_in(f2, d),
        _ => false,
    }
}

fn node(p: &FocProof, d: DomainId, path: &mut Vec<usize>) -> Result<(), String> {
    let expected = local(p, d)?;
    if expected.len() != p.premises.len() {
        return Err(format!("expected {} premises, found {}", expected.len(), p.premises.len()));
    }
    for (i, (want, prem)) in expected.iter().zip(&p.premises).enumerate() {
        if !same(&prem.conclusion, want, d) {
            return Err(format!("premise {} proves {} but the rule requires {}", i, prem.conclusion, want));
        }
    }
    for (i, prem) in p.premises.iter().enumerate() {
        path.push(i);
        node(prem, d, path)?;
        path.pop();
    }
    Ok(())
}

fn eigen(p: &FocProof, sort: Sort) -> Result<Inst, String> {
    let e = p.witness.eigen.as_ref().ok_or("missing eigen-parameter")?;
    if p.conclusion.names().contains(e) {
        return Err(format!("eigen-parameter {} is not fresh", e));
    }
    Ok(match sort {
        Sort::Term => Inst::Term(Term::Fn(e.clone(), Vec::new())),
        Sort::World => Inst::World(WorldExpr::Param(e.clone())),
    })
}

fn inst(p: &FocProof, sort: Sort, d: DomainId) -> Result<Inst, String> {
    let i = p.witness.inst.as_ref().ok_or("missing instantiation")?;
    if i.sort() != sort {
        return Err("instantiation has the wrong sort".into());
    }
    let ok = match i {
        Inst::Term(t) => {
            let j = Judgement::new(Prop::Atom(Polarity::Neg, crate::worlds::sym("_"), vec![t.clone()]), WorldExpr::Id);
            j.prop.is_closed() && !j.prop.has_meta()
        }
        Inst::World(w) => w.is_closed() && !w.has_meta() && w.literal_domain().is_none_or(|x| x == d),
    };
    if !ok {
        return Err("instantiation is not closed".into());
    }
    Ok(i.clone())
}

fn split(p: &FocProof) -> Result<(Vec<usize>, Vec<usize>), String> {
    let n = p.conclusion.delta.len();
    let mut seen = vec![false; n];
    for &i in &p.witness.split {
        if i >= n {
            return Err(format!("split index {} out of range", i));
        }
        if seen[i] {
            return Err(format!("split index {} overlaps", i));
        }
        seen[i] = true;
    }
    Ok((p.witness.split.clone(), (0..n).filter(|i| !seen[*i]).collect()))
}

fn at(p: &Prop, w: &WorldExpr) -> Judgement {
    Judgement::new(p.clone(), w.clone())
}

/// Premises demanded by the node's rule, witnesses and conclusion.
fn local(p: &FocProof, d: DomainId) -> Result<Vec<FocSequent>, String> {
    let c = &p.conclusion;
    let gamma = &c.gamma;
    let delta = &c.delta;
    let wrong = || Err(format!("{} does not apply to {}", p.rule, c));
    let mk = |delta: Vec<Judgement>, form: Form| FocSequent { gamma: gamma.clone(), delta, form };
    match (&c.form, p.rule) {
        // Decisions.
        (Form::Active { omega, goal: Goal::Pos(q) }, FRule::Rf | FRule::Lf | FRule::Cplf) if omega.is_empty() => match p.rule {
            FRule::Rf => {
                if is_shifted_neg_atom(&q.prop) {
                    return Err("right focus on a shifted negative atom".into());
                }
                Ok(vec![mk(delta.clone(), Form::RightFocus { focus: q.clone() })])
            }
            FRule::Lf => {
                let k = p.witness.principal.ok_or("missing principal index")?;
                let n = delta.get(k).ok_or("principal index out of range")?;
                if is_shifted_pos_atom(&n.prop) {
                    return Err("left focus on a shifted positive atom".into());
                }
                Ok(vec![mk(remove_indices(delta, &[k]), Form::LeftFocus { focus: n.clone(), goal: q.clone() })])
            }
            _ => {
                let k = p.witness.principal.ok_or("missing principal index")?;
                let n = gamma.get(k).ok_or("copy index out of range")?;
                Ok(vec![mk(delta.clone(), Form::LeftFocus { focus: n.clone(), goal: q.clone() })])
            }
        },
        (Form::LeftFocus { focus, goal }, rule) => {
            let u = &focus.world;
            let lf = |f: Judgement, delta: Vec<Judgement>| mk(delta, Form::LeftFocus { focus: f, goal: goal.clone() });
            match (rule, &focus.prop) {
                (FRule::Li, Prop::Atom(Polarity::Neg, ..)) => {
                    if !delta.is_empty() {
                        return Err("li needs an empty linear context".into());
                    }
                    match &goal.prop {
                        Prop::Down(n) if crate::syntax::wexpr_eq(u, &goal.world, d) && at(n, u).eq_in(focus, d) => Ok(vec![]),
                        _ => Err(format!("focus {} does not match goal {}", focus, goal)),
                    }
                }
                (FRule::UpL, Prop::Up(a)) => {
                    Ok(vec![mk(delta.clone(), Form::Active { omega: vec![at(a, u)], goal: Goal::Pos(goal.clone()) })])
                }
                (FRule::WithL(i), Prop::With(a, b)) => Ok(vec![lf(at(if i == 1 { a } else { b }, u), delta.clone())]),
                (FRule::LolliL, Prop::Lolli(a, b)) => {
                    let (l, r) = split(p)?;
                    Ok(vec![mk(select_indices(delta, &l), Form::RightFocus { focus: at(a, u) }), lf(at(b, u), select_indices(delta, &r))])
                }
                (FRule::ForallL, Prop::Forall(s, body)) => {
                    let t = inst(p, *s, d)?;
                    Ok(vec![lf(at(&body.instantiate(&t), u), delta.clone())])
                }
                (FRule::DnLF, Prop::Local(body)) => Ok(vec![lf(at(&body.instantiate(&Inst::World(u.clone())), u), delta.clone())]),
                (FRule::AtLF, Prop::At(a, v)) => Ok(vec![lf(at(a, v), delta.clone())]),
                _ => wrong(),
            }
        }
        (Form::RightFocus { focus }, rule) => {
            let w = &focus.world;
            let rf = |f: Judgement, delta: Vec<Judgement>| mk(delta, Form::RightFocus { focus: f });
            match (rule, &focus.prop) {
                (FRule::Ri, Prop::Atom(Polarity::Pos, ..)) => match delta.as_slice() {
                    [h] => match &h.prop {
                        Prop::Up(a) if crate::syntax::wexpr_eq(&h.world, w, d) && at(a, w).eq_in(focus, d) => Ok(vec![]),
                        _ => Err(format!("hypothesis {} does not match {}", h, focus)),
                    },
                    _ => Err("ri needs exactly one linear hypothesis".into()),
                },
                (FRule::DownR, Prop::Down(n)) => Ok(vec![mk(delta.clone(), Form::Active { omega: vec![], goal: Goal::Neg(at(n, w)) })]),
                (FRule::TensorR, Prop::Tensor(a, b)) => {
                    let (l, r) = split(p)?;
                    Ok(vec![rf(at(a, w), select_indices(delta, &l)), rf(at(b, w), select_indices(delta, &r))])
                }
                (FRule::PlusR(i), Prop::Plus(a, b)) => Ok(vec![rf(at(if i == 1 { a } else { b }, w), delta.clone())]),
                (FRule::ExistsR, Prop::Exists(s, body)) => {
                    let t = inst(p, *s, d)?;
                    Ok(vec![rf(at(&body.instantiate(&t), w), delta.clone())])
                }
                (FRule::BangR, Prop::Bang(n)) => {
                    if !delta.is_empty() {
                        return Err("!R needs an empty linear context".into());
                    }
                    Ok(vec![mk(vec![], Form::Active { omega: vec![], goal: Goal::Neg(at(n, w)) })])
                }
                (FRule::DnRF, Prop::Local(body)) => Ok(vec![rf(at(&body.instantiate(&Inst::World(w.clone())), w), delta.clone())]),
                (FRule::AtRF, Prop::At(a, v)) => Ok(vec![rf(at(a, v), delta.clone())]),
                (FRule::OneR, Prop::One) => {
                    if !delta.is_empty() {
                        return Err("1R needs an empty linear context".into());
                    }
                    Ok(vec![])
                }
                _ => wrong(),
            }
        }
        (Form::Active { omega, goal }, rule) if is_active_left(rule) => {
            let k = p.witness.principal.ok_or("missing principal index")?;
            let h = omega.get(k).ok_or("principal index out of range")?;
            let u = &h.world;
            let rest = remove_indices(omega, &[k]);
            let act = |extra: Vec<Judgement>| {
                let mut o = rest.clone();
                o.extend(extra);
                mk(delta.clone(), Form::Active { omega: o, goal: goal.clone() })
            };
            match (rule, &h.prop) {
                (FRule::TensorL, Prop::Tensor(a, b)) => Ok(vec![act(vec![at(a, u), at(b, u)])]),
                (FRule::OneL, Prop::One) => Ok(vec![act(vec![])]),
                (FRule::PlusL, Prop::Plus(a, b)) => Ok(vec![act(vec![at(a, u)]), act(vec![at(b, u)])]),
                (FRule::ZeroL, Prop::Zero) => Ok(vec![]),
                (FRule::DnLA, Prop::Local(body)) => Ok(vec![act(vec![at(&body.instantiate(&Inst::World(u.clone())), u)])]),
                (FRule::AtLA, Prop::At(a, v)) => Ok(vec![act(vec![at(a, v)])]),
                (FRule::ExistsL, Prop::Exists(s, body)) => {
                    let e = eigen(p, *s)?;
                    Ok(vec![act(vec![at(&body.instantiate(&e), u)])])
                }
                (FRule::BangL, Prop::Bang(n)) => {
                    let mut g = gamma.clone();
                    g.push(at(n, u));
                    Ok(vec![FocSequent { gamma: g, delta: delta.clone(), form: Form::Active { omega: rest, goal: goal.clone() } }])
                }
                (FRule::DownL, Prop::Down(n)) => {
                    let mut dl = delta.clone();
                    dl.push(at(n, u));
                    Ok(vec![mk(dl, Form::Active { omega: rest, goal: goal.clone() })])
                }
                (FRule::Lp, Prop::Atom(Polarity::Pos, ..)) => {
                    let mut dl = delta.clone();
                    dl.push(at(&Prop::up(h.prop.clone()), u));
                    Ok(vec![mk(dl, Form::Active { omega: rest, goal: goal.clone() })])
                }
                _ => wrong(),
            }
        }
        (Form::Active { omega, goal: Goal::Neg(g) }, rule) => {
            let w = &g.world;
            let act = |extra: Vec<Judgement>, goal: Goal| {
                let mut o = omega.clone();
                o.extend(extra);
                mk(delta.clone(), Form::Active { omega: o, goal })
            };
            match (rule, &g.prop) {
                (FRule::WithR, Prop::With(a, b)) => Ok(vec![act(vec![], Goal::Neg(at(a, w))), act(vec![], Goal::Neg(at(b, w)))]),
                (FRule::TopR, Prop::Top) => Ok(vec![]),
                (FRule::LolliR, Prop::Lolli(a, b)) => Ok(vec![act(vec![at(a, w)], Goal::Neg(at(b, w)))]),
                (FRule::DnRA, Prop::Local(body)) => Ok(vec![act(vec![], Goal::Neg(at(&body.instantiate(&Inst::World(w.clone())), w)))]),
                (FRule::AtRA, Prop::At(a, v)) => Ok(vec![act(vec![], Goal::Neg(at(a, v)))]),
                (FRule::ForallR, Prop::Forall(s, body)) => {
                    let e = eigen(p, *s)?;
                    Ok(vec![act(vec![], Goal::Neg(at(&body.instantiate(&e), w)))])
                }
                (FRule::UpR, Prop::Up(a)) => Ok(vec![act(vec![], Goal::Pos(at(a, w)))]),
                (FRule::Rp, Prop::Atom(Polarity::Neg, ..)) => Ok(vec![act(vec![], Goal::Pos(at(&Prop::down(g.prop.clone()), w)))]),
                _ => wrong(),
            }
        }
        _ => wrong(),
    }
}

fn is_active_left(r: FRule) -> bool {
    matches!(
        r,
        FRule::TensorL
            | FRule::OneL
            | FRule::PlusL
            | FRule::ZeroL
            | FRule::DnLA
            | FRule::AtLA
            | FRule::ExistsL
            | FRule::BangL
            | FRule::DownL
            | FRule::Lp
    )
}
