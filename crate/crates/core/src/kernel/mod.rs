//! Unfocused HyLL sequent calculus: proof objects, checker and metatheory.

mod check;
mod cut;
mod invert;
mod meta;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::syntax::{prop_eq, Inst, Judgement, LeafMap};
use crate::worlds::{sym, DomainId, Sym};

pub use check::{check_proof, check_sequent, CheckFailure, CheckOptions, CheckReport};
pub(crate) use cut::retarget;
pub use cut::{admissible_cut, cut_eliminate};
pub use invert::{invert, InvertError};
pub use meta::{contract, identity_expand, identity_expand_in, weaken};

/// `Γ; Δ ⟹ C @ w`. Γ is read as a set, Δ as a multiset, both modulo
/// judgement equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub gamma: Vec<Judgement>,
    pub delta: Vec<Judgement>,
    pub goal: Judgement,
}

impl Sequent {
    pub fn new(gamma: Vec<Judgement>, delta: Vec<Judgement>, goal: Judgement) -> Sequent {
        Sequent { gamma, delta, goal }
    }

    pub fn names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        for j in self.gamma.iter().chain(&self.delta).chain(std::iter::once(&self.goal)) {
            j.names(&mut out);
        }
        out
    }

    pub fn map_with(&self, m: &mut dyn LeafMap) -> Sequent {
        Sequent {
            gamma: self.gamma.iter().map(|j| j.map_with(m)).collect(),
            delta: self.delta.iter().map(|j| j.map_with(m)).collect(),
            goal: self.goal.map_with(m),
        }
    }

    /// Same end-sequent: Γ as sets, Δ as multisets, goals equal.
    pub fn same_as(&self, other: &Sequent, d: DomainId) -> bool {
        set_eq(&self.gamma, &other.gamma, d) && multiset_eq(&self.delta, &other.delta, d) && self.goal.eq_in(&other.goal, d)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.gamma)?;
        f.write_str(" ; ")?;
        write_list(f, &self.delta)?;
        write!(f, " |- {}", self.goal)
    }
}

pub(crate) fn write_list(f: &mut fmt::Formatter<'_>, js: &[Judgement]) -> fmt::Result {
    if js.is_empty() {
        return f.write_str(".");
    }
    for (i, j) in js.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}", j)?;
    }
    Ok(())
}

pub fn contains(js: &[Judgement], j: &Judgement, d: DomainId) -> bool {
    position(js, j, d).is_some()
}

pub fn position(js: &[Judgement], j: &Judgement, d: DomainId) -> Option<usize> {
    js.iter().position(|x| x == j).or_else(|| js.iter().position(|x| x.eq_in(j, d)))
}

pub fn set_eq(a: &[Judgement], b: &[Judgement], d: DomainId) -> bool {
    a.iter().all(|x| contains(b, x, d)) && b.iter().all(|x| contains(a, x, d))
}

pub fn multiset_eq(a: &[Judgement], b: &[Judgement], d: DomainId) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut left: Vec<&Judgement> = b.iter().collect();
    for x in a {
        match left.iter().position(|y| *y == x).or_else(|| left.iter().position(|y| y.eq_in(x, d))) {
            Some(i) => {
                left.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

/// Rule tags of the sequent calculus, plus the two admissible cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Init,
    Copy,
    TensorR,
    TensorL,
    OneR,
    OneL,
    LolliR,
    LolliL,
    TopR,
    ZeroL,
    WithR,
    WithL(u8),
    PlusR(u8),
    PlusL,
    ForallR,
    ForallL,
    ExistsR,
    ExistsL,
    BangR,
    BangL,
    AtR,
    AtL,
    DnR,
    DnL,
    /// Linear cut.
    Cut,
    /// Cut of an unrestricted hypothesis.
    CutBang,
}

impl Rule {
    pub const ALL: [Rule; 28] = [
        Rule::Init,
        Rule::Copy,
        Rule::TensorR,
        Rule::TensorL,
        Rule::OneR,
        Rule::OneL,
        Rule::LolliR,
        Rule::LolliL,
        Rule::TopR,
        Rule::ZeroL,
        Rule::WithR,
        Rule::WithL(1),
        Rule::WithL(2),
        Rule::PlusR(1),
        Rule::PlusR(2),
        Rule::PlusL,
        Rule::ForallR,
        Rule::ForallL,
        Rule::ExistsR,
        Rule::ExistsL,
        Rule::BangR,
        Rule::BangL,
        Rule::AtR,
        Rule::AtL,
        Rule::DnR,
        Rule::DnL,
        Rule::Cut,
        Rule::CutBang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Init => "init",
            Rule::Copy => "copy",
            Rule::TensorR => "tensorR",
            Rule::TensorL => "tensorL",
            Rule::OneR => "oneR",
            Rule::OneL => "oneL",
            Rule::LolliR => "lolliR",
            Rule::LolliL => "lolliL",
            Rule::TopR => "topR",
            Rule::ZeroL => "zeroL",
            Rule::WithR => "withR",
            Rule::WithL(1) => "withL1",
            Rule::WithL(_) => "withL2",
            Rule::PlusR(1) => "plusR1",
            Rule::PlusR(_) => "plusR2",
            Rule::PlusL => "plusL",
            Rule::ForallR => "forallR",
            Rule::ForallL => "forallL",
            Rule::ExistsR => "existsR",
            Rule::ExistsL => "existsL",
            Rule::BangR => "bangR",
            Rule::BangL => "bangL",
            Rule::AtR => "atR",
            Rule::AtL => "atL",
            Rule::DnR => "dnR",
            Rule::DnL => "dnL",
            Rule::Cut => "cut",
            Rule::CutBang => "cut!",
        }
    }

    pub fn parse(s: &str) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.name() == s)
    }

    /// Rules whose principal formula sits in Δ.
    pub fn is_left(self) -> bool {
        matches!(
            self,
            Rule::TensorL
                | Rule::OneL
                | Rule::LolliL
                | Rule::ZeroL
                | Rule::WithL(_)
                | Rule::PlusL
                | Rule::ForallL
                | Rule::ExistsL
                | Rule::BangL
                | Rule::AtL
                | Rule::DnL
        )
    }

    pub fn is_cut(self) -> bool {
        matches!(self, Rule::Cut | Rule::CutBang)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rule-specific data that makes checking deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Witness {
    /// Index of the principal hypothesis in Δ (in Γ for `copy`).
    pub principal: Option<usize>,
    /// Indices of Δ (principal excluded, for ⊸L) sent to the first premise
    /// of ⊗R, ⊸L and cut.
    pub split: Vec<usize>,
    /// Instantiation for ∀L and ∃R.
    pub inst: Option<Inst>,
    /// Fresh parameter for ∀R and ∃L.
    pub eigen: Option<Sym>,
    /// Cut formula.
    pub cut: Option<Judgement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Proof>,
    pub witness: Witness,
}

impl Proof {
    pub fn count_cuts(&self) -> usize {
        usize::from(self.rule.is_cut()) + self.premises.iter().map(Proof::count_cuts).sum::<usize>()
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Proof::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Proof::height).max().unwrap_or(0)
    }

    /// Apply a leaf rewrite to every sequent and instantiation.
    pub fn map_with(&self, m: &mut dyn LeafMap) -> Proof {
        let inst = self.witness.inst.as_ref().map(|i| match i {
            Inst::Term(t) => Inst::Term(t.map_with(m, 0)),
            Inst::World(w) => Inst::World(crate::syntax::map_world(w, m, 0)),
        });
        Proof {
            rule: self.rule,
            conclusion: self.conclusion.map_with(m),
            premises: self.premises.iter().map(|p| p.map_with(m)).collect(),
            witness: Witness { inst, cut: self.witness.cut.as_ref().map(|j| j.map_with(m)), ..self.witness.clone() },
        }
    }

    /// Every eigen-parameter name used in the proof.
    pub fn eigens(&self, out: &mut BTreeSet<Sym>) {
        if let Some(e) = &self.witness.eigen {
            out.insert(e.clone());
        }
        self.premises.iter().for_each(|p| p.eigens(out));
    }
}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A globally fresh name `_<prefix><n>`; user syntax cannot produce a
/// leading underscore followed by a counter clash because the counter is
/// process-wide.
pub fn fresh_name(prefix: &str) -> Sym {
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    sym(&format!("_{}{}", prefix, n))
}

/// Builds nodes from a conclusion, the principal judgement and premises,
/// computing principal and split indices.
#[derive(Debug, Clone, Copy)]
pub struct Builder {
    pub domain: DomainId,
}

impl Builder {
    pub fn new(domain: DomainId) -> Builder {
        Builder { domain }
    }

    pub fn leaf(&self, rule: Rule, conclusion: Sequent) -> Proof {
        Proof { rule, conclusion, premises: Vec::new(), witness: Witness::default() }
    }

    /// Right rule or one without principal hypothesis.
    pub fn right(&self, rule: Rule, conclusion: Sequent, premises: Vec<Proof>) -> Proof {
        let mut w = Witness::default();
        if rule == Rule::TensorR {
            w.split = self.split_indices(&conclusion.delta, None, &premises[0].conclusion.delta);
        }
        Proof { rule, conclusion, premises, witness: w }
    }

    pub fn left(&self, rule: Rule, conclusion: Sequent, principal: &Judgement, premises: Vec<Proof>) -> Proof {
        let k = position(&conclusion.delta, principal, self.domain)
            .unwrap_or_else(|| panic!("principal {} not in Δ of {}", principal, conclusion));
        let mut w = Witness { principal: Some(k), ..Witness::default() };
        if rule == Rule::LolliL {
            w.split = self.split_indices(&conclusion.delta, Some(k), &premises[0].conclusion.delta);
        }
        Proof { rule, conclusion, premises, witness: w }
    }

    pub fn init(&self, conclusion: Sequent) -> Proof {
        Proof { rule: Rule::Init, conclusion, premises: Vec::new(), witness: Witness { principal: Some(0), ..Default::default() } }
    }

    pub fn copy(&self, conclusion: Sequent, j: &Judgement, premise: Proof) -> Proof {
        let k = position(&conclusion.gamma, j, self.domain).expect("copied judgement not in Γ");
        Proof { rule: Rule::Copy, conclusion, premises: vec![premise], witness: Witness { principal: Some(k), ..Default::default() } }
    }

    pub fn with_inst(mut p: Proof, inst: Inst) -> Proof {
        p.witness.inst = Some(inst);
        p
    }

    pub fn with_eigen(mut p: Proof, eigen: Sym) -> Proof {
        p.witness.eigen = Some(eigen);
        p
    }

    pub fn cut(&self, conclusion: Sequent, j: Judgement, left: Proof, right: Proof) -> Proof {
        let split = self.split_indices(&conclusion.delta, None, &left.conclusion.delta);
        Proof { rule: Rule::Cut, conclusion, premises: vec![left, right], witness: Witness { split, cut: Some(j), ..Default::default() } }
    }

    pub fn cut_bang(&self, conclusion: Sequent, j: Judgement, left: Proof, right: Proof) -> Proof {
        Proof { rule: Rule::CutBang, conclusion, premises: vec![left, right], witness: Witness { cut: Some(j), ..Default::default() } }
    }

    /// Indices of `delta` (skipping `exclude`) matching the multiset `part`.
    pub fn split_indices(&self, delta: &[Judgement], exclude: Option<usize>, part: &[Judgement]) -> Vec<usize> {
        let mut used = vec![false; delta.len()];
        if let Some(k) = exclude {
            used[k] = true;
        }
        let mut out = Vec::new();
        for j in part {
            let i = (0..delta.len())
                .find(|&i| !used[i] && &delta[i] == j)
                .or_else(|| (0..delta.len()).find(|&i| !used[i] && delta[i].eq_in(j, self.domain)))
                .unwrap_or_else(|| panic!("split: {} not available", j));
            used[i] = true;
            out.push(i);
        }
        out.sort_unstable();
        out
    }
}

/// Δ without the entries at `idx`.
pub fn remove_indices(delta: &[Judgement], idx: &[usize]) -> Vec<Judgement> {
    delta.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, j)| j.clone()).collect()
}

pub fn select_indices(delta: &[Judgement], idx: &[usize]) -> Vec<Judgement> {
    idx.iter().map(|&i| delta[i].clone()).collect()
}

/// Remove one occurrence of `j` from `delta`.
pub fn remove_one(delta: &[Judgement], j: &Judgement, d: DomainId) -> Option<Vec<Judgement>> {
    let k = position(delta, j, d)?;
    let mut out = delta.to_vec();
    out.remove(k);
    Some(out)
}

pub fn props_equal(a: &Judgement, b: &Judgement, d: DomainId) -> bool {
    prop_eq(&a.prop, &b.prop, d)
}
