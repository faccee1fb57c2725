//! Focused sequent calculus: proof objects, checker, erasure to the
//! unfocused kernel, and proof search.

mod check;
mod erase;
mod search;
mod unify;

use std::fmt;

use crate::syntax::{Inst, Judgement, LeafMap, Polarity, Prop};
use crate::worlds::Sym;

pub use check::check_focused;
pub use erase::{erase, erase_sequent};
pub use search::{
    active_frontier, prove_unfocused, search, search_with, ActiveOrder, Decision, DefaultStrategy, NeutralView, SearchBudget,
    SearchOutcome, Strategy,
};

/// Right-hand side of an active sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Goal {
    /// `N @ w ; ·`
    Neg(Judgement),
    /// `· ; P @ w`
    Pos(Judgement),
}

impl Goal {
    pub fn judgement(&self) -> &Judgement {
        match self {
            Goal::Neg(j) | Goal::Pos(j) => j,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Form {
    /// `Γ; Δ; Ω ⟹ R`
    Active { omega: Vec<Judgement>, goal: Goal },
    /// `Γ; Δ; [N @ u] ⟹ Q @ w`
    LeftFocus { focus: Judgement, goal: Judgement },
    /// `Γ; Δ ⟹ [P @ w]`
    RightFocus { focus: Judgement },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FocSequent {
    pub gamma: Vec<Judgement>,
    pub delta: Vec<Judgement>,
    pub form: Form,
}

impl FocSequent {
    pub fn neutral(gamma: Vec<Judgement>, delta: Vec<Judgement>, goal: Judgement) -> FocSequent {
        FocSequent { gamma, delta, form: Form::Active { omega: Vec::new(), goal: Goal::Pos(goal) } }
    }

    pub fn active(gamma: Vec<Judgement>, delta: Vec<Judgement>, omega: Vec<Judgement>, goal: Goal) -> FocSequent {
        FocSequent { gamma, delta, form: Form::Active { omega, goal } }
    }

    pub fn is_neutral(&self) -> bool {
        matches!(&self.form, Form::Active { omega, goal: Goal::Pos(_) } if omega.is_empty())
    }

    /// Every judgement has the polarity its position demands.
    pub fn polarities_ok(&self) -> Result<(), String> {
        let neg = |j: &Judgement| crate::syntax::is_polarized(&j.prop, Polarity::Neg);
        let pos = |j: &Judgement| crate::syntax::is_polarized(&j.prop, Polarity::Pos);
        for j in self.gamma.iter().chain(&self.delta) {
            if !neg(j) {
                return Err(format!("{} in Γ or Δ is not a negative proposition", j));
            }
        }
        let ok = match &self.form {
            Form::Active { omega, goal } => {
                omega.iter().all(pos)
                    && match goal {
                        Goal::Neg(j) => neg(j),
                        Goal::Pos(j) => pos(j),
                    }
            }
            Form::LeftFocus { focus, goal } => neg(focus) && pos(goal),
            Form::RightFocus { focus } => pos(focus),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("ill-polarized sequent {}", self))
        }
    }

    pub fn map_with(&self, m: &mut dyn LeafMap) -> FocSequent {
        let mj = |j: &Judgement, m: &mut dyn LeafMap| j.map_with(m);
        let gamma = self.gamma.iter().map(|j| mj(j, m)).collect();
        let delta = self.delta.iter().map(|j| mj(j, m)).collect();
        let form = match &self.form {
            Form::Active { omega, goal } => Form::Active {
                omega: omega.iter().map(|j| mj(j, m)).collect(),
                goal: match goal {
                    Goal::Neg(j) => Goal::Neg(mj(j, m)),
                    Goal::Pos(j) => Goal::Pos(mj(j, m)),
                },
            },
            Form::LeftFocus { focus, goal } => Form::LeftFocus { focus: mj(focus, m), goal: mj(goal, m) },
            Form::RightFocus { focus } => Form::RightFocus { focus: mj(focus, m) },
        };
        FocSequent { gamma, delta, form }
    }

    pub fn names(&self) -> std::collections::BTreeSet<Sym> {
        let mut out = std::collections::BTreeSet::new();
        let mut add = |j: &Judgement| j.names(&mut out);
        self.gamma.iter().for_each(&mut add);
        self.delta.iter().for_each(&mut add);
        match &self.form {
            Form::Active { omega, goal } => {
                omega.iter().for_each(&mut add);
                add(goal.judgement());
            }
            Form::LeftFocus { focus, goal } => {
                add(focus);
                add(goal);
            }
            Form::RightFocus { focus } => add(focus),
        }
        out
    }
}

impl fmt::Display for FocSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::kernel::write_list(f, &self.gamma)?;
        f.write_str(" ; ")?;
        crate::kernel::write_list(f, &self.delta)?;
        match &self.form {
            Form::Active { omega, goal } => {
                f.write_str(" ; ")?;
                crate::kernel::write_list(f, omega)?;
                match goal {
                    Goal::Neg(j) => write!(f, " |- {} ; .", j),
                    Goal::Pos(j) => write!(f, " |- . ; {}", j),
                }
            }
            Form::LeftFocus { focus, goal } => write!(f, " ; [{}] |- {}", focus, goal),
            Form::RightFocus { focus } => write!(f, " |- [{}]", focus),
        }
    }
}

/// Rule tags of the focused calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FRule {
    // Left focus.
    Li,
    UpL,
    WithL(u8),
    LolliL,
    ForallL,
    DnLF,
    AtLF,
    // Right focus.
    Ri,
    DownR,
    TensorR,
    PlusR(u8),
    ExistsR,
    BangR,
    DnRF,
    AtRF,
    OneR,
    // Active, left.
    TensorL,
    OneL,
    PlusL,
    DnLA,
    AtLA,
    ExistsL,
    BangL,
    DownL,
    Lp,
    ZeroL,
    // Active, right.
    WithR,
    TopR,
    LolliR,
    DnRA,
    AtRA,
    ForallR,
    UpR,
    Rp,
    // Decisions.
    Lf,
    Cplf,
    Rf,
}

impl FRule {
    pub const ALL: [FRule; 39] = [
        FRule::Li,
        FRule::UpL,
        FRule::WithL(1),
        FRule::WithL(2),
        FRule::LolliL,
        FRule::ForallL,
        FRule::DnLF,
        FRule::AtLF,
        FRule::Ri,
        FRule::DownR,
        FRule::TensorR,
        FRule::PlusR(1),
        FRule::PlusR(2),
        FRule::ExistsR,
        FRule::BangR,
        FRule::DnRF,
        FRule::AtRF,
        FRule::OneR,
        FRule::TensorL,
        FRule::OneL,
        FRule::PlusL,
        FRule::DnLA,
        FRule::AtLA,
        FRule::ExistsL,
        FRule::BangL,
        FRule::DownL,
        FRule::Lp,
        FRule::ZeroL,
        FRule::WithR,
        FRule::TopR,
        FRule::LolliR,
        FRule::DnRA,
        FRule::AtRA,
        FRule::ForallR,
        FRule::UpR,
        FRule::Rp,
        FRule::Lf,
        FRule::Cplf,
        FRule::Rf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FRule::Li => "li",
            FRule::UpL => "upL",
            FRule::WithL(1) => "withL1",
            FRule::WithL(_) => "withL2",
            FRule::LolliL => "lolliL",
            FRule::ForallL => "forallL",
            FRule::DnLF => "dnLF",
            FRule::AtLF => "atLF",
            FRule::Ri => "ri",
            FRule::DownR => "downR",
            FRule::TensorR => "tensorR",
            FRule::PlusR(1) => "plusR1",
            FRule::PlusR(_) => "plusR2",
            FRule::ExistsR => "existsR",
            FRule::BangR => "bangR",
            FRule::DnRF => "dnRF",
            FRule::AtRF => "atRF",
            FRule::OneR => "oneR",
            FRule::TensorL => "tensorL",
            FRule::OneL => "oneL",
            FRule::PlusL => "plusL",
            FRule::DnLA => "dnLA",
            FRule::AtLA => "atLA",
            FRule::ExistsL => "existsL",
            FRule::BangL => "bangL",
            FRule::DownL => "downL",
            FRule::Lp => "lp",
            FRule::ZeroL => "zeroL",
            FRule::WithR => "withR",
            FRule::TopR => "topR",
            FRule::LolliR => "lolliR",
            FRule::DnRA => "dnRA",
            FRule::AtRA => "atRA",
            FRule::ForallR => "forallR",
            FRule::UpR => "upR",
            FRule::Rp => "rp",
            FRule::Lf => "lf",
            FRule::Cplf => "cplf",
            FRule::Rf => "rf",
        }
    }

    pub fn parse(s: &str) -> Option<FRule> {
        FRule::ALL.iter().copied().find(|r| r.name() == s)
    }

    pub fn is_decision(self) -> bool {
        matches!(self, FRule::Lf | FRule::Cplf | FRule::Rf)
    }
}

impl fmt::Display for FRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FWitness {
    /// Ω index for active left rules, Δ index for `lf`, Γ index for `cplf`.
    pub principal: Option<usize>,
    /// Δ indices sent to the first premise of ⊗R and ⊸L.
    pub split: Vec<usize>,
    pub inst: Option<Inst>,
    pub eigen: Option<Sym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FocProof {
    pub rule: FRule,
    pub conclusion: FocSequent,
    pub premises: Vec<FocProof>,
    pub witness: FWitness,
}

impl FocProof {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(FocProof::size).sum::<usize>()
    }

    pub fn decisions(&self) -> usize {
        usize::from(self.rule.is_decision()) + self.premises.iter().map(FocProof::decisions).sum::<usize>()
    }

    /// Maximum number of decisions on a root-to-leaf path.
    pub fn decision_depth(&self) -> usize {
        usize::from(self.rule.is_decision()) + self.premises.iter().map(FocProof::decision_depth).max().unwrap_or(0)
    }
}

/// `P` is a bare positive atom under ↑.
pub fn is_shifted_pos_atom(p: &Prop) -> bool {
    matches!(p, Prop::Up(a) if matches!(**a, Prop::Atom(Polarity::Pos, _, _)))
}

/// `P` is a bare negative atom under ↓.
pub fn is_shifted_neg_atom(p: &Prop) -> bool {
    matches!(p, Prop::Down(a) if matches!(**a, Prop::Atom(Polarity::Neg, _, _)))
}

#[cfg(test)]
mod tests;
