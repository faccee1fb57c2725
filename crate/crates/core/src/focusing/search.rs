//! Focused proof search.
//!
//! The engine is written in continuation-passing style so that
//! backtracking reaches into already-finished subproofs (metavariable
//! bindings, resource splits). Linear contexts are handled lazily: each
//! subgoal receives the resources it may use and returns the ones it left,
//! plus a slack flag set when a ⊤R or 0L leaf could have absorbed more.
//! The actual contexts are materialized top-down once a proof is found.

use std::rc::Rc;

use super::erase::erase;
use super::unify::Metas;
use super::{is_shifted_neg_atom, is_shifted_pos_atom, FRule, FWitness, FocProof, FocSequent, Form, Goal};
use crate::kernel::{fresh_name, retarget, Proof, Sequent};
use crate::syntax::{polarize, Inst, Judgement, LeafMap, Polarity, Prop, Sort, Term};
use crate::worlds::{DomainId, WorldExpr};

const STACK_BYTES: usize = 1 << 29;

/// Order in which the invertible (active) phase picks its next formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActiveOrder {
    /// Leftmost Ω formula first, then the goal.
    #[default]
    Canonical,
    /// Goal first, then Ω from the right.
    Reversed,
}

#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Upper bound on decisions along any branch.
    pub max_decisions: usize,
    /// Upper bound on proof height.
    pub max_depth: usize,
    /// How often a single Γ entry may be copied along one branch.
    pub copy_limit: u32,
    /// Hard cap on search steps; exceeding it aborts.
    pub max_steps: u64,
    /// World instances tried before a fresh metavariable at ∀L / ∃R.
    pub world_witness_hints: Vec<WorldExpr>,
    /// Iterative deepening on the decision bound.
    pub iterative: bool,
    pub order: ActiveOrder,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_decisions: 12,
            max_depth: 2000,
            copy_limit: 3,
            max_steps: 2_000_000,
            world_witness_hints: Vec::new(),
            iterative: true,
            order: ActiveOrder::Canonical,
        }
    }
}

impl SearchBudget {
    pub fn with_decisions(n: usize) -> SearchBudget {
        SearchBudget { max_decisions: n, ..SearchBudget::default() }
    }
}

/// A choice at a neutral sequent. `Lf` indexes [`NeutralView::delta`],
/// `Cplf` indexes [`NeutralView::gamma`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Rf,
    Lf(usize),
    Cplf(usize),
}

/// A neutral sequent as seen by a strategy, with metavariables resolved as
/// far as currently known.
#[derive(Debug, Clone)]
pub struct NeutralView {
    pub gamma: Vec<Judgement>,
    pub delta: Vec<Judgement>,
    pub goal: Judgement,
    pub decisions: usize,
}

/// Filters and reorders the decisions at neutral sequents.
pub trait Strategy {
    fn order(&mut self, view: &NeutralView, options: &mut Vec<Decision>);

    /// Called when a left focus reaches `A & B`; `Some(1)` or `Some(2)`
    /// restricts the search to that branch.
    fn with_branch(&mut self, _focus: &Judgement) -> Option<u8> {
        None
    }

    /// Whether the strategy looks at the search state at all.
    fn inspects(&self) -> bool {
        true
    }
}

/// Right focus first, then linear hypotheses, then copies, in context
/// order.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultStrategy;

impl Strategy for DefaultStrategy {
    fn order(&mut self, _view: &NeutralView, _options: &mut Vec<Decision>) {}

    fn inspects(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub proof: Option<FocProof>,
    /// No branch was cut by the decision or depth bound, so failure is
    /// definite (relative to the copy limit).
    pub exhausted: bool,
    pub aborted: bool,
    pub steps: u64,
    /// Decision bound of the last iteration.
    pub bound: usize,
}

#[derive(Clone)]
struct Ctx {
    gamma: Rc<Vec<Judgement>>,
    copies: Rc<Vec<u32>>,
    decisions: usize,
    depth: usize,
}

#[derive(Debug, Clone)]
struct Out {
    rest: Vec<u32>,
    slack: bool,
}

#[derive(Clone)]
struct Skel {
    rule: FRule,
    gamma: Rc<Vec<Judgement>>,
    form: Form,
    input: Vec<u32>,
    out: Option<Out>,
    added: Option<u32>,
    removed: Option<u32>,
    principal: Option<usize>,
    inst: Option<Inst>,
    eigen: Option<crate::worlds::Sym>,
    premises: Vec<Rc<Skel>>,
}

impl Skel {
    fn new(rule: FRule, ctx: &Ctx, form: &Form, input: &[u32]) -> Skel {
        Skel {
            rule,
            gamma: ctx.gamma.clone(),
            form: form.clone(),
            input: input.to_vec(),
            out: None,
            added: None,
            removed: None,
            principal: None,
            inst: None,
            eigen: None,
            premises: Vec::new(),
        }
    }

    fn out(&self) -> &Out {
        self.out.as_ref().expect("finished node")
    }
}

type K<'k, 's> = &'k mut dyn FnMut(&mut Engine<'s>, Skel, Out) -> bool;

struct Engine<'s> {
    d: DomainId,
    b: SearchBudget,
    fuel: usize,
    cut_off: bool,
    aborted: bool,
    steps: u64,
    metas: Metas,
    arena: Vec<Judgement>,
    strategy: &'s mut dyn Strategy,
    frontier: Option<Vec<FocSequent>>,
}

fn minus(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

fn without(a: &[u32], x: u32) -> Vec<u32> {
    a.iter().copied().filter(|y| *y != x).collect()
}

fn at(p: &Prop, w: &WorldExpr) -> Judgement {
    Judgement::new(p.clone(), w.clone())
}

impl<'s> Engine<'s> {
    fn eigen(&mut self, sort: Sort) -> (Inst, crate::worlds::Sym) {
        let (name, inst) = match sort {
            Sort::Term => {
                let n = fresh_name("a");
                (n.clone(), Inst::Term(Term::Fn(n, Vec::new())))
            }
            Sort::World => {
                let n = fresh_name("w");
                (n.clone(), Inst::World(WorldExpr::Param(n)))
            }
        };
        self.metas.add_eigen(name.clone());
        (inst, name)
    }

    fn instances(&mut self, sort: Sort) -> Vec<Inst> {
        let mut out = Vec::new();
        if sort == Sort::World {
            out.extend(self.b.world_witness_hints.iter().cloned().map(Inst::World));
        }
        let m = self.metas.fresh();
        out.push(match sort {
            Sort::Term => Inst::Term(Term::Meta(m)),
            Sort::World => Inst::World(WorldExpr::Meta(m)),
        });
        out
    }

    fn prove(&mut self, ctx: &Ctx, form: Form, input: Vec<u32>, k: K<'_, 's>) -> bool {
        if self.aborted {
            return false;
        }
        self.steps += 1;
        if self.steps > self.b.max_steps {
            self.aborted = true;
            return false;
        }
        if ctx.depth >= self.b.max_depth {
            self.cut_off = true;
            return false;
        }
        let ctx = Ctx { depth: ctx.depth + 1, ..ctx.clone() };
        match &form {
            Form::Active { omega, goal } => {
                let (omega, goal) = (omega.clone(), goal.clone());
                self.active(&ctx, form, omega, goal, input, k)
            }
            Form::LeftFocus { focus, goal } => {
                let (focus, goal) = (focus.clone(), goal.clone());
                self.left(&ctx, form, focus, goal, input, k)
            }
            Form::RightFocus { focus } => {
                let focus = focus.clone();
                self.right(&ctx, form, focus, input, k)
            }
        }
    }

    /// One premise, same resources.
    fn step(&mut self, ctx: &Ctx, base: Skel, prem: Form, input: Vec<u32>, k: K<'_, 's>) -> bool {
        self.prove(ctx, prem, input, &mut |e, sk, out| {
            let mut node = base.clone();
            node.out = Some(out.clone());
            node.premises = vec![Rc::new(sk)];
            k(e, node, out)
        })
    }

    /// One premise with a new resource `r` that must be consumed.
    fn step_add(&mut self, ctx: &Ctx, mut base: Skel, prem: Form, input: Vec<u32>, r: u32, k: K<'_, 's>) -> bool {
        let mut inner = input;
        inner.push(r);
        base.added = Some(r);
        self.prove(ctx, prem, inner, &mut |e, sk, out| {
            if out.rest.contains(&r) && !out.slack {
                return false;
            }
            let out = Out { rest: without(&out.rest, r), slack: out.slack };
            let mut node = base.clone();
            node.out = Some(out.clone());
            node.premises = vec![Rc::new(sk)];
            k(e, node, out)
        })
    }

    fn leaf(&mut self, base: Skel, out: Out, k: K<'_, 's>) -> bool {
        let mut node = base;
        node.out = Some(out.clone());
        k(self, node, out)
    }

    fn multiplicative(&mut self, ctx: &Ctx, base: Skel, f1: Form, f2: Form, input: Vec<u32>, k: K<'_, 's>) -> bool {
        self.prove(ctx, f1, input, &mut |e, sk1, o1| {
            let sk1 = Rc::new(sk1);
            e.prove(ctx, f2.clone(), o1.rest.clone(), &mut |e, sk2, o2| {
                let out = Out { rest: o2.rest.clone(), slack: o1.slack || o2.slack };
                let mut node = base.clone();
                node.out = Some(out.clone());
                node.premises = vec![sk1.clone(), Rc::new(sk2)];
                k(e, node, out)
            })
        })
    }

    fn additive(&mut self, ctx: &Ctx, base: Skel, f1: Form, f2: Form, input: Vec<u32>, k: K<'_, 's>) -> bool {
        self.prove(ctx, f1, input.clone(), &mut |e, sk1, o1| {
            let sk1 = Rc::new(sk1);
            let in2 = if o1.slack { input.clone() } else { minus(&input, &o1.rest) };
            e.prove(ctx, f2.clone(), in2, &mut |e, sk2, o2| {
                let out = if !o1.slack {
                    if !(o2.rest.is_empty() || o2.slack) {
                        return false;
                    }
                    Out { rest: o1.rest.clone(), slack: false }
                } else if !o2.slack {
                    if o2.rest.iter().any(|r| !o1.rest.contains(r)) {
                        return false;
                    }
                    Out { rest: o2.rest.clone(), slack: false }
                } else {
                    Out { rest: o1.rest.iter().copied().filter(|r| o2.rest.contains(r)).collect(), slack: true }
                };
                let mut node = base.clone();
                node.out = Some(out.clone());
                node.premises = vec![sk1.clone(), Rc::new(sk2)];
                k(e, node, out)
            })
        })
    }

    fn active(&mut self, ctx: &Ctx, form: Form, omega: Vec<Judgement>, goal: Goal, input: Vec<u32>, k: K<'_, 's>) -> bool {
        let goal_first = self.b.order == ActiveOrder::Reversed && matches!(goal, Goal::Neg(_));
        if omega.is_empty() || goal_first {
            return match goal {
                Goal::Neg(g) => self.active_right(ctx, form, omega, g, input, k),
                Goal::Pos(q) => self.neutral(ctx, form, q, input, k),
            };
        }
        let i = match self.b.order {
            ActiveOrder::Canonical => 0,
            ActiveOrder::Reversed => omega.len() - 1,
        };
        let h = omega[i].clone();
        let u = &h.world;
        let ins = |extra: Vec<Judgement>| {
            let mut o = omega.clone();
            o.remove(i);
            for (n, j) in extra.into_iter().enumerate() {
                o.insert(i + n, j);
            }
            Form::Active { omega: o, goal: goal.clone() }
        };
        let mk = |rule: FRule| {
            let mut s = Skel::new(rule, ctx, &form, &input);
            s.principal = Some(i);
            s
        };
        match &h.prop {
            Prop::Tensor(a, b) => self.step(ctx, mk(FRule::TensorL), ins(vec![at(a, u), at(b, u)]), input.clone(), k),
            Prop::One => self.step(ctx, mk(FRule::OneL), ins(vec![]), input.clone(), k),
            Prop::Plus(a, b) => self.additive(ctx, mk(FRule::PlusL), ins(vec![at(a, u)]), ins(vec![at(b, u)]), input.clone(), k),
            Prop::Zero => {
                let out = Out { rest: input.clone(), slack: true };
                self.leaf(mk(FRule::ZeroL), out, k)
            }
            Prop::Local(body) => {
                let p = body.instantiate(&Inst::World(u.clone()));
                self.step(ctx, mk(FRule::DnLA), ins(vec![at(&p, u)]), input.clone(), k)
            }
            Prop::At(a, v) => self.step(ctx, mk(FRule::AtLA), ins(vec![at(a, v)]), input.clone(), k),
            Prop::Exists(s, body) => {
                let (inst, name) = self.eigen(*s);
                let mut base = mk(FRule::ExistsL);
                base.eigen = Some(name);
                self.step(ctx, base, ins(vec![at(&body.instantiate(&inst), u)]), input.clone(), k)
            }
            Prop::Bang(n) => {
                let mut gamma = (*ctx.gamma).clone();
                gamma.push(at(n, u));
                let mut copies = (*ctx.copies).clone();
                copies.push(0);
                let inner = Ctx { gamma: Rc::new(gamma), copies: Rc::new(copies), ..ctx.clone() };
                self.step(&inner, mk(FRule::BangL), ins(vec![]), input.clone(), k)
            }
            Prop::Down(n) => {
                let r = self.arena.len() as u32;
                self.arena.push(at(n, u));
                self.step_add(ctx, mk(FRule::DownL), ins(vec![]), input.clone(), r, k)
            }
            Prop::Atom(Polarity::Pos, ..) => {
                let r = self.arena.len() as u32;
                self.arena.push(at(&Prop::up(h.prop.clone()), u));
                self.step_add(ctx, mk(FRule::Lp), ins(vec![]), input.clone(), r, k)
            }
            _ => false,
        }
    }

    fn active_right(&mut self, ctx: &Ctx, form: Form, omega: Vec<Judgement>, g: Judgement, input: Vec<u32>, k: K<'_, 's>) -> bool {
        let w = &g.world;
        let act = |extra: Vec<Judgement>, goal: Goal| {
            let mut o = omega.clone();
            o.extend(extra);
            Form::Active { omega: o, goal }
        };
        let mk = |rule: FRule| Skel::new(rule, ctx, &form, &input);
        match &g.prop {
            Prop::With(a, b) => {
                self.additive(ctx, mk(FRule::WithR), act(vec![], Goal::Neg(at(a, w))), act(vec![], Goal::Neg(at(b, w))), input.clone(), k)
            }
            Prop::Top => {
                let out = Out { rest: input.clone(), slack: true };
                self.leaf(mk(FRule::TopR), out, k)
            }
            Prop::Lolli(a, b) => self.step(ctx, mk(FRule::LolliR), act(vec![at(a, w)], Goal::Neg(at(b, w))), input.clone(), k),
            Prop::Local(body) => {
                let p = body.instantiate(&Inst::World(w.clone()));
                self.step(ctx, mk(FRule::DnRA), act(vec![], Goal::Neg(at(&p, w))), input.clone(), k)
            }
            Prop::At(a, v) => self.step(ctx, mk(FRule::AtRA), act(vec![], Goal::Neg(at(a, v))), input.clone(), k),
            Prop::Forall(s, body) => {
                let (inst, name) = self.eigen(*s);
                let mut base = mk(FRule::ForallR);
                base.eigen = Some(name);
                self.step(ctx, base, act(vec![], Goal::Neg(at(&body.instantiate(&inst), w))), input.clone(), k)
            }
            Prop::Up(p) => self.step(ctx, mk(FRule::UpR), act(vec![], Goal::Pos(at(p, w))), input.clone(), k),
            Prop::Atom(Polarity::Neg, ..) => {
                let q = at(&Prop::down(g.prop.clone()), w);
                self.step(ctx, mk(FRule::Rp), act(vec![], Goal::Pos(q)), input.clone(), k)
            }
            _ => false,
        }
    }

    fn neutral(&mut self, ctx: &Ctx, form: Form, q: Judgement, input: Vec<u32>, k: K<'_, 's>) -> bool {
        if let Some(fr) = self.frontier.as_mut() {
            let delta = input.iter().map(|&r| self.arena[r as usize].clone()).collect();
            fr.push(FocSequent::neutral((*ctx.gamma).clone(), delta, q));
            let base = Skel::new(FRule::Rf, ctx, &form, &input);
            return self.leaf(base, Out { rest: Vec::new(), slack: true }, k);
        }
        if ctx.decisions >= self.fuel {
            self.cut_off = true;
            return false;
        }
        let mut options = Vec::new();
        if !is_shifted_neg_atom(&q.prop) {
            options.push(Decision::Rf);
        }
        for (i, &r) in input.iter().enumerate() {
            if !is_shifted_pos_atom(&self.arena[r as usize].prop) {
                options.push(Decision::Lf(i));
            }
        }
        for (i, &c) in ctx.copies.iter().enumerate() {
            if c < self.b.copy_limit {
                options.push(Decision::Cplf(i));
            }
        }
        if self.strategy.inspects() {
            let view = NeutralView {
                gamma: ctx.gamma.iter().map(|j| self.metas.zonk(j)).collect(),
                delta: input.iter().map(|&r| self.metas.zonk(&self.arena[r as usize])).collect(),
                goal: self.metas.zonk(&q),
                decisions: ctx.decisions,
            };
            self.strategy.order(&view, &mut options);
        }
        let next = Ctx { decisions: ctx.decisions + 1, ..ctx.clone() };
        for opt in options {
            let found = match opt {
                Decision::Rf => {
                    let base = Skel::new(FRule::Rf, ctx, &form, &input);
                    self.step(&next, base, Form::RightFocus { focus: q.clone() }, input.clone(), k)
                }
                Decision::Lf(i) => {
                    let r = input[i];
                    let mut base = Skel::new(FRule::Lf, ctx, &form, &input);
                    base.removed = Some(r);
                    let focus = self.arena[r as usize].clone();
                    self.step(&next, base, Form::LeftFocus { focus, goal: q.clone() }, without(&input, r), k)
                }
                Decision::Cplf(i) => {
                    let mut copies = (*ctx.copies).clone();
                    copies[i] += 1;
                    let inner = Ctx { copies: Rc::new(copies), ..next.clone() };
                    let mut base = Skel::new(FRule::Cplf, ctx, &form, &input);
                    base.principal = Some(i);
                    let focus = ctx.gamma[i].clone();
                    self.step(&inner, base, Form::LeftFocus { focus, goal: q.clone() }, input.clone(), k)
                }
            };
            if found {
                return true;
            }
            if self.aborted {
                return false;
            }
        }
        false
    }

    fn left(&mut self, ctx: &Ctx, form: Form, focus: Judgement, goal: Judgement, input: Vec<u32>, k: K<'_, 's>) -> bool {
        let u = &focus.world;
        let lf = |f: Judgement| Form::LeftFocus { focus: f, goal: goal.clone() };
        let mk = |rule: FRule| Skel::new(rule, ctx, &form, &input);
        match &focus.prop {
            Prop::Atom(Polarity::Neg, ..) => {
                let Prop::Down(n) = &goal.prop else { return false };
                let mark = self.metas.mark();
                if self.metas.unify_judgement(&focus, &at(n, &goal.world), self.d) {
                    let out = Out { rest: input.clone(), slack: false };
                    if self.leaf(mk(FRule::Li), out, k) {
                        return true;
                    }
                }
                self.metas.undo(mark);
                false
            }
            Prop::Up(p) => {
                let f = Form::Active { omega: vec![at(p, u)], goal: Goal::Pos(goal.clone()) };
                self.step(ctx, mk(FRule::UpL), f, input.clone(), k)
            }
            Prop::With(a, b) => {
                let pick = if self.strategy.inspects() {
                    let z = self.metas.zonk(&focus);
                    self.strategy.with_branch(&z)
                } else {
                    None
                };
                (pick != Some(2) && self.step(ctx, mk(FRule::WithL(1)), lf(at(a, u)), input.clone(), k))
                    || (pick != Some(1) && !self.aborted && self.step(ctx, mk(FRule::WithL(2)), lf(at(b, u)), input.clone(), k))
            }
            Prop::Lolli(a, b) => {
                self.multiplicative(ctx, mk(FRule::LolliL), Form::RightFocus { focus: at(a, u) }, lf(at(b, u)), input.clone(), k)
            }
            Prop::Forall(s, body) => {
                for inst in self.instances(*s) {
                    let mut base = mk(FRule::ForallL);
                    base.inst = Some(inst.clone());
                    if self.step(ctx, base, lf(at(&body.instantiate(&inst), u)), input.clone(), k) {
                        return true;
                    }
                    if self.aborted {
                        return false;
                    }
                }
                false
            }
            Prop::Local(body) => {
                let p = body.instantiate(&Inst::World(u.clone()));
                self.step(ctx, mk(FRule::DnLF), lf(at(&p, u)), input.clone(), k)
            }
            Prop::At(a, v) => self.step(ctx, mk(FRule::AtLF), lf(at(a, v)), input.clone(), k),
            _ => false,
        }
    }

    fn right(&mut self, ctx: &Ctx, form: Form, focus: Judgement, input: Vec<u32>, k: K<'_, 's>) -> bool {
        let w = &focus.world;
        let rf = |f: Judgement| Form::RightFocus { focus: f };
        let mk = |rule: FRule| Skel::new(rule, ctx, &form, &input);
        match &focus.prop {
            Prop::Atom(Polarity::Pos, ..) => {
                let want = at(&Prop::up(focus.prop.clone()), w);
                for &r in &input {
                    if !is_shifted_pos_atom(&self.arena[r as usize].prop) {
                        continue;
                    }
                    let mark = self.metas.mark();
                    let h = self.arena[r as usize].clone();
                    if self.metas.unify_judgement(&h, &want, self.d) {
                        let mut base = mk(FRule::Ri);
                        base.removed = Some(r);
                        let out = Out { rest: without(&input, r), slack: false };
                        if self.leaf(base, out, k) {
                            return true;
                        }
                    }
                    self.metas.undo(mark);
                    if self.aborted {
                        return false;
                    }
                }
                false
            }
            Prop::Down(n) => {
                let f = Form::Active { omega: vec![], goal: Goal::Neg(at(n, w)) };
                self.step(ctx, mk(FRule::DownR), f, input.clone(), k)
            }
            Prop::Tensor(a, b) => self.multiplicative(ctx, mk(FRule::TensorR), rf(at(a, w)), rf(at(b, w)), input.clone(), k),
            Prop::Plus(a, b) => {
                self.step(ctx, mk(FRule::PlusR(1)), rf(at(a, w)), input.clone(), k)
                    || (!self.aborted && self.step(ctx, mk(FRule::PlusR(2)), rf(at(b, w)), input.clone(), k))
            }
            Prop::Exists(s, body) => {
                for inst in self.instances(*s) {
                    let mut base = mk(FRule::ExistsR);
                    base.inst = Some(inst.clone());
                    if self.step(ctx, base, rf(at(&body.instantiate(&inst), w)), input.clone(), k) {
                        return true;
                    }
                    if self.aborted {
                        return false;
                    }
                }
                false
            }
            Prop::Bang(n) => {
                let base = mk(FRule::BangR);
                let f = Form::Active { omega: vec![], goal: Goal::Neg(at(n, w)) };
                let rest = input.clone();
                self.prove(ctx, f, Vec::new(), &mut |e, sk, _o| {
                    let out = Out { rest: rest.clone(), slack: false };
                    let mut node = base.clone();
                    node.out = Some(out.clone());
                    node.premises = vec![Rc::new(sk)];
                    k(e, node, out)
                })
            }
            Prop::Local(body) => {
                let p = body.instantiate(&Inst::World(w.clone()));
                self.step(ctx, mk(FRule::DnRF), rf(at(&p, w)), input.clone(), k)
            }
            Prop::At(a, v) => self.step(ctx, mk(FRule::AtRF), rf(at(a, v)), input.clone(), k),
            Prop::One => self.leaf(mk(FRule::OneR), Out { rest: input.clone(), slack: false }, k),
            _ => false,
        }
    }

    /// Builds the focused derivation for a skeleton whose linear context is
    /// exactly `dl`.
    fn materialize(&self, sk: &Skel, dl: Vec<u32>) -> FocProof {
        let z = |j: &Judgement| self.metas.zonk(j);
        let form = match &sk.form {
            Form::Active { omega, goal } => Form::Active {
                omega: omega.iter().map(z).collect(),
                goal: match goal {
                    Goal::Neg(j) => Goal::Neg(z(j)),
                    Goal::Pos(j) => Goal::Pos(z(j)),
                },
            },
            Form::LeftFocus { focus, goal } => Form::LeftFocus { focus: z(focus), goal: z(goal) },
            Form::RightFocus { focus } => Form::RightFocus { focus: z(focus) },
        };
        let conclusion =
            FocSequent { gamma: sk.gamma.iter().map(z).collect(), delta: dl.iter().map(|&r| z(&self.arena[r as usize])).collect(), form };
        let mut witness = FWitness {
            principal: sk.principal,
            split: Vec::new(),
            inst: sk.inst.as_ref().map(|i| self.metas.zonk_inst(i)),
            eigen: sk.eigen.clone(),
        };
        let parts: Vec<Vec<u32>> = match sk.rule {
            FRule::TensorR | FRule::LolliL => {
                let (p1, p2) = (&sk.premises[0], &sk.premises[1]);
                let (o1, o2) = (p1.out(), p2.out());
                let (d1, d2) = if o1.slack && !o2.slack {
                    let d2 = minus(&o1.rest, &o2.rest);
                    (minus(&dl, &d2), d2)
                } else {
                    let d1 = minus(&p1.input, &o1.rest);
                    let d2 = minus(&dl, &d1);
                    (d1, d2)
                };
                witness.split = d1.iter().map(|r| dl.iter().position(|x| x == r).expect("split member")).collect();
                vec![d1, d2]
            }
            FRule::BangR => vec![Vec::new()],
            FRule::Lf => {
                let r = sk.removed.expect("lf resource");
                witness.principal = dl.iter().position(|x| *x == r);
                vec![without(&dl, r)]
            }
            _ => {
                let mut d = dl.clone();
                if let Some(r) = sk.added {
                    d.push(r);
                }
                vec![d; sk.premises.len()]
            }
        };
        let premises = sk.premises.iter().zip(parts).map(|(p, d)| self.materialize(p, d)).collect();
        FocProof { rule: sk.rule, conclusion, premises, witness }
    }
}

fn run(seq: &FocSequent, d: DomainId, budget: &SearchBudget, strategy: &mut dyn Strategy) -> SearchOutcome {
    let lo = if budget.iterative { 0 } else { budget.max_decisions };
    let mut steps = 0;
    let mut last = SearchOutcome { proof: None, exhausted: false, aborted: false, steps: 0, bound: lo };
    for fuel in lo..=budget.max_decisions {
        let mut e = Engine {
            d,
            b: budget.clone(),
            fuel,
            cut_off: false,
            aborted: false,
            steps,
            metas: Metas::default(),
            arena: seq.delta.clone(),
            strategy: &mut *strategy,
            frontier: None,
        };
        for name in seq.names() {
            if name.starts_with('_') {
                e.metas.add_eigen(name);
            }
        }
        let ctx = Ctx { gamma: Rc::new(seq.gamma.clone()), copies: Rc::new(vec![0; seq.gamma.len()]), decisions: 0, depth: 0 };
        let input: Vec<u32> = (0..seq.delta.len() as u32).collect();
        let mut proof = None;
        e.prove(&ctx, seq.form.clone(), input.clone(), &mut |e, sk, out| {
            if !(out.rest.is_empty() || out.slack) {
                return false;
            }
            e.metas.ground();
            proof = Some(e.materialize(&sk, input.clone()));
            true
        });
        steps = e.steps;
        last = SearchOutcome { proof, exhausted: !e.cut_off && !e.aborted, aborted: e.aborted, steps, bound: fuel };
        if last.proof.is_some() || last.exhausted || last.aborted {
            break;
        }
    }
    last
}

fn on_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        let h = std::thread::Builder::new().stack_size(STACK_BYTES).spawn_scoped(s, f).expect("spawn search thread");
        match h.join() {
            Ok(v) => v,
            Err(e) => std::panic::resume_unwind(e),
        }
    })
}

/// Searches for a focused derivation of `seq` with the default strategy.
pub fn search(seq: &FocSequent, d: DomainId, budget: &SearchBudget) -> SearchOutcome {
    search_with(seq, d, budget, &mut DefaultStrategy)
}

pub fn search_with(seq: &FocSequent, d: DomainId, budget: &SearchBudget, strategy: &mut (dyn Strategy + Send)) -> SearchOutcome {
    on_big_stack(|| run(seq, d, budget, strategy))
}

/// Runs only the invertible phase and returns the neutral sequents it
/// reaches. Eigen-parameters are renamed to `_e` so that frontiers from
/// different orders compare equal.
pub fn active_frontier(seq: &FocSequent, d: DomainId, order: ActiveOrder) -> Vec<FocSequent> {
    let budget = SearchBudget { order, ..SearchBudget::default() };
    let mut e = Engine {
        d,
        b: budget,
        fuel: 0,
        cut_off: false,
        aborted: false,
        steps: 0,
        metas: Metas::default(),
        arena: seq.delta.clone(),
        strategy: &mut DefaultStrategy,
        frontier: Some(Vec::new()),
    };
    let ctx = Ctx { gamma: Rc::new(seq.gamma.clone()), copies: Rc::new(vec![0; seq.gamma.len()]), decisions: 0, depth: 0 };
    let input: Vec<u32> = (0..seq.delta.len() as u32).collect();
    e.prove(&ctx, seq.form.clone(), input, &mut |_, _, _| true);
    struct Anon;
    impl LeafMap for Anon {
        fn term(&mut self, t: &Term, _d: u32) -> Option<Term> {
            match t {
                Term::Fn(f, args) if args.is_empty() && f.starts_with("_a") => Some(Term::cnst("_e")),
                _ => None,
            }
        }
        fn world(&mut self, w: &WorldExpr, _d: u32) -> Option<WorldExpr> {
            match w {
                WorldExpr::Param(p) if p.starts_with("_w") => Some(WorldExpr::param("_e")),
                _ => None,
            }
        }
    }
    e.frontier.take().unwrap_or_default().iter().map(|s| s.map_with(&mut Anon)).collect()
}

/// Proves an unpolarized sequent by polarizing it (Γ negatively, Δ
/// positively into Ω, the goal negatively), searching, and erasing the
/// focused derivation back to the kernel.
pub fn prove_unfocused(s: &Sequent, d: DomainId, budget: &SearchBudget) -> (SearchOutcome, Option<Proof>) {
    let pol = |j: &Judgement, p: Polarity| Judgement::new(polarize(&j.prop, p), j.world.clone());
    let seq = FocSequent::active(
        s.gamma.iter().map(|j| pol(j, Polarity::Neg)).collect(),
        Vec::new(),
        s.delta.iter().map(|j| pol(j, Polarity::Pos)).collect(),
        Goal::Neg(pol(&s.goal, Polarity::Neg)),
    );
    let out = search(&seq, d, budget);
    let proof = out.proof.as_ref().map(|p| retarget(erase(p, d), s, d));
    (out, proof)
}
