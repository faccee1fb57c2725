use super::{FRule, FocProof, FocSequent, Form};
use crate::kernel::{retarget, Builder, Proof, Rule, Sequent};
use crate::syntax::{erase_polarity, Judgement};
use crate::worlds::DomainId;

fn ej(j: &Judgement) -> Judgement {
    Judgement::new(erase_polarity(&j.prop), j.world.clone())
}

/// The unfocused sequent underlying a focused one: shifts dropped, Ω or the
/// left focus appended to Δ.
pub fn erase_sequent(s: &FocSequent) -> Sequent {
    let gamma = s.gamma.iter().map(ej).collect();
    let mut delta: Vec<Judgement> = s.delta.iter().map(ej).collect();
    let goal = match &s.form {
        Form::Active { omega, goal } => {
            delta.extend(omega.iter().map(ej));
            ej(goal.judgement())
        }
        Form::LeftFocus { focus, goal } => {
            delta.push(ej(focus));
            ej(goal)
        }
        Form::RightFocus { focus } => ej(focus),
    };
    Sequent::new(gamma, delta, goal)
}

/// Translates a focused derivation into a kernel derivation of the erased
/// end-sequent. Shift, atom-moving and decision rules other than `cplf`
/// disappear.
pub fn erase(p: &FocProof, d: DomainId) -> Proof {
    let b = Builder::new(d);
    let concl = erase_sequent(&p.conclusion);
    let prems: Vec<Proof> = p.premises.iter().map(|q| erase(q, d)).collect();
    let c = &p.conclusion;
    let omega_principal = || match &c.form {
        Form::Active { omega, .. } => ej(&omega[p.witness.principal.expect("principal index")]),
        _ => unreachable!("active rule on a focused sequent"),
    };
    let focus = || match &c.form {
        Form::LeftFocus { focus, .. } => ej(focus),
        _ => unreachable!("left-focus rule on an unfocused sequent"),
    };
    let node = match p.rule {
        FRule::Li | FRule::Ri => b.init(concl),
        FRule::UpL | FRule::DownR | FRule::DownL | FRule::UpR | FRule::Lp | FRule::Rp | FRule::Lf | FRule::Rf => {
            let q = prems.into_iter().next().expect("one premise");
            return retarget(q, &concl, d);
        }
        FRule::Cplf => {
            let j = ej(&c.gamma[p.witness.principal.expect("copy index")]);
            b.copy(concl, &j, prems.into_iter().next().expect("one premise"))
        }
        FRule::WithL(i) => b.left(Rule::WithL(i), concl, &focus(), prems),
        FRule::LolliL => b.left(Rule::LolliL, concl, &focus(), prems),
        FRule::ForallL => b.left(Rule::ForallL, concl, &focus(), prems),
        FRule::DnLF => b.left(Rule::DnL, concl, &focus(), prems),
        FRule::AtLF => b.left(Rule::AtL, concl, &focus(), prems),
        FRule::TensorR => b.right(Rule::TensorR, concl, prems),
        FRule::PlusR(i) => b.right(Rule::PlusR(i), concl, prems),
        FRule::ExistsR => b.right(Rule::ExistsR, concl, prems),
        FRule::BangR => b.right(Rule::BangR, concl, prems),
        FRule::DnRF | FRule::DnRA => b.right(Rule::DnR, concl, prems),
        FRule::AtRF | FRule::AtRA => b.right(Rule::AtR, concl, prems),
        FRule::OneR => b.right(Rule::OneR, concl, prems),
        FRule::WithR => b.right(Rule::WithR, concl, prems),
        FRule::TopR => b.right(Rule::TopR, concl, prems),
        FRule::LolliR => b.right(Rule::LolliR, concl, prems),
        FRule::ForallR => b.right(Rule::ForallR, concl, prems),
        FRule::TensorL => b.left(Rule::TensorL, concl, &omega_principal(), prems),
        FRule::OneL => b.left(Rule::OneL, concl, &omega_principal(), prems),
        FRule::PlusL => b.left(Rule::PlusL, concl, &omega_principal(), prems),
        FRule::ZeroL => b.left(Rule::ZeroL, concl, &omega_principal(), prems),
        FRule::DnLA => b.left(Rule::DnL, concl, &omega_principal(), prems),
        FRule::AtLA => b.left(Rule::AtL, concl, &omega_principal(), prems),
        FRule::ExistsL => b.left(Rule::ExistsL, concl, &omega_principal(), prems),
        FRule::BangL => b.left(Rule::BangL, concl, &omega_principal(), prems),
    };
    let node = match &p.witness.inst {
        Some(i) => Builder::with_inst(node, i.clone()),
        None => node,
    };
    match &p.witness.eigen {
        Some(e) => Builder::with_eigen(node, e.clone()),
        None => node,
    }
}
