use std::collections::BTreeSet;

use super::*;
use crate::kernel::{check_proof, CheckOptions, Sequent};
use crate::syntax::{boxed, dia, rho, Judgement, Prop};
use crate::text::parse_sequent;
use crate::worlds::{sym, DomainId, WorldExpr};

fn seq(src: &str, pos: &[&str]) -> Sequent {
    let pos: BTreeSet<_> = pos.iter().map(|s| sym(s)).collect();
    parse_sequent(src, &pos).unwrap_or_else(|e| panic!("{}: {}", src, e))
}

/// Proves `s` and checks both the focused derivation and its erasure.
fn provable(s: &Sequent, d: DomainId, fuel: usize) -> bool {
    let (out, proof) = prove_unfocused(s, d, &SearchBudget::with_decisions(fuel));
    match (out.proof, proof) {
        (Some(fp), Some(p)) => {
            let r = check_focused(&fp, d);
            assert!(r.ok, "focused check of {}: {}", s, r);
            let r = check_proof(&p, &CheckOptions::new(d));
            assert!(r.ok, "kernel check of {}: {}", s, r);
            assert_eq!(&p.conclusion, s);
            true
        }
        _ => false,
    }
}

#[test]
fn tensor_commutes_everywhere() {
    for d in DomainId::ALL {
        assert!(provable(&seq(". ; a * b @ w |- b * a @ w", &[]), d, 4));
        assert!(provable(&seq(". ; p * q @ w |- q * p @ w", &["p", "q"]), d, 4));
    }
}

#[test]
fn linearity_is_respected() {
    let d = DomainId::Unit;
    assert!(!provable(&seq(". ; a @ w |- a * a @ w", &[]), d, 6));
    assert!(!provable(&seq(". ; a @ w, b @ w |- a @ w", &[]), d, 6));
    assert!(provable(&seq(". ; !a @ w |- a * a @ w", &[]), d, 6));
    assert!(provable(&seq("a @ w ; . |- a * a @ w", &[]), d, 6));
    assert!(provable(&seq(". ; a @ w, b @ w |- top * a @ w", &[]), d, 4));
    assert!(!provable(&seq(". ; a @ w, b @ w |- a & top @ w", &[]), d, 6));
    assert!(provable(&seq(". ; a @ w, b @ w |- (a * top) & top @ w", &[]), d, 6));
    assert!(provable(&seq(". ; 0 @ w, b @ w |- a @ w", &[]), d, 2));
}

#[test]
fn additives() {
    let d = DomainId::Unit;
    assert!(provable(&seq(". ; a & b @ w |- b @ w", &[]), d, 4));
    assert!(provable(&seq(". ; a * (b + c) @ w |- a * b + a * c @ w", &[]), d, 6));
    assert!(provable(&seq(". ; a * b + a * c @ w |- a * (b + c) @ w", &[]), d, 6));
    assert!(provable(&seq(". ; a @ w |- a & a @ w", &[]), d, 4));
}

#[test]
fn quantifiers_find_witnesses() {
    assert!(provable(&seq(". ; fa x. a(x) @ w |- a(k) @ w", &[]), DomainId::Unit, 4));
    assert!(provable(&seq(". ; b(k) @ w |- ex x. b(x) @ w", &["b"]), DomainId::Unit, 4));
    assert!(provable(&seq(". ; ex x. b(f(x)) @ w |- ex y. b(y) @ w", &["b"]), DomainId::Unit, 4));
    // The eigen-parameter may not escape into an earlier witness.
    assert!(!provable(&seq(". ; a(k) @ w |- fa y. a(y) @ w", &[]), DomainId::Unit, 6));
}

#[test]
fn worlds_are_unified() {
    assert!(provable(&seq(". ; faw u. (a at u) @ w |- a @ [2]", &[]), DomainId::Rates, 4));
    assert!(provable(&seq(". ; (a at 2) @ w |- (a at 1 . 1) @ id", &[]), DomainId::Temporal, 4));
    assert!(!provable(&seq(". ; a @ [2] |- a @ [3]", &[]), DomainId::Rates, 4));
    assert!(provable(&seq(". ; a @ v |- a @ u", &[]), DomainId::Unit, 4));
    assert!(!provable(&seq(". ; a @ v |- a @ u", &[]), DomainId::Rates, 4));
}

#[test]
fn s5_axiom_in_the_unit_domain() {
    let a = Prop::atom("a", vec![]);
    let w = WorldExpr::param("w");
    let s = Sequent::new(vec![], vec![Judgement::new(dia(&a), w.clone())], Judgement::new(boxed(&dia(&a)), w));
    assert!(provable(&s, DomainId::Unit, 6));
    assert!(!provable(&s, DomainId::Rates, 6));
}

#[test]
fn rho_delays() {
    let a = Prop::atom("a", vec![]);
    let v = WorldExpr::rate(3.into());
    let w = WorldExpr::param("w");
    let wv = WorldExpr::compose(w.clone(), v.clone());
    let fwd = Sequent::new(vec![], vec![Judgement::new(a.clone(), wv.clone())], Judgement::new(rho(v.clone(), &a), w.clone()));
    let back = Sequent::new(vec![], vec![Judgement::new(rho(v, &a), w)], Judgement::new(a, wv));
    assert!(provable(&fwd, DomainId::Rates, 4));
    assert!(provable(&back, DomainId::Rates, 4));
}

#[test]
fn consistency() {
    for d in DomainId::ALL {
        let s = seq(". ; . |- 0 @ w", &[]);
        let (out, p) = prove_unfocused(&s, d, &SearchBudget::with_decisions(6));
        assert!(p.is_none());
        assert!(out.exhausted);
    }
}

fn sorted(fr: Vec<FocSequent>) -> Vec<String> {
    let mut v: Vec<String> = fr
        .into_iter()
        .map(|mut s| {
            s.gamma.sort();
            s.delta.sort();
            s.to_string()
        })
        .collect();
    v.sort();
    v
}

#[test]
fn active_phase_is_order_independent() {
    let cases = [
        ". ; (a * !b) + (c & top) @ w, ex x. p(x) @ w |- (p(k) -o a) & fa y. c -o ↑p(y) @ w",
        ". ; dn u. (p at u . v) @ w, 1 @ w |- (a at v) & (b -o c) @ w",
    ];
    for src in cases {
        let s = seq(src, &["p"]);
        let pol = |j: &Judgement, p| Judgement::new(crate::syntax::polarize(&j.prop, p), j.world.clone());
        let fs = FocSequent::active(
            vec![],
            vec![],
            s.delta.iter().map(|j| pol(j, crate::syntax::Polarity::Pos)).collect(),
            Goal::Neg(pol(&s.goal, crate::syntax::Polarity::Neg)),
        );
        let a = sorted(active_frontier(&fs, DomainId::Rates, ActiveOrder::Canonical));
        let b = sorted(active_frontier(&fs, DomainId::Rates, ActiveOrder::Reversed));
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }
}

#[test]
fn budget_is_monotone() {
    let s = seq(". ; a * (b + c) @ w |- a * b + a * c @ w", &[]);
    let first = (0..10)
        .find(|&n| prove_unfocused(&s, DomainId::Unit, &SearchBudget { iterative: false, ..SearchBudget::with_decisions(n) }).1.is_some())
        .expect("provable");
    for n in first..first + 4 {
        let b = SearchBudget { iterative: false, ..SearchBudget::with_decisions(n) };
        assert!(prove_unfocused(&s, DomainId::Unit, &b).1.is_some(), "bound {}", n);
    }
}

#[test]
fn checker_rejects_tampering() {
    let s = seq(". ; a * b @ w |- b * a @ w", &[]);
    let (out, _) = prove_unfocused(&s, DomainId::Unit, &SearchBudget::default());
    let mut p = out.proof.unwrap();
    assert!(check_focused(&p, DomainId::Unit).ok);
    fn find_split(p: &mut FocProof) -> Option<&mut FocProof> {
        if p.rule == FRule::TensorR {
            return Some(p);
        }
        p.premises.iter_mut().find_map(find_split)
    }
    let t = find_split(&mut p).unwrap();
    t.witness.split = (0..t.conclusion.delta.len()).collect();
    assert!(!check_focused(&p, DomainId::Unit).ok);
}

#[test]
fn decisions_respect_side_conditions() {
    let j = |p: Prop| Judgement::new(p, WorldExpr::param("w"));
    let p = Prop::pos_atom("p", vec![]);
    let s = FocSequent::neutral(vec![], vec![j(Prop::up(p.clone()))], j(p.clone()));
    let bad = FocProof {
        rule: FRule::Lf,
        conclusion: s.clone(),
        premises: vec![],
        witness: FWitness { principal: Some(0), ..Default::default() },
    };
    assert!(!check_focused(&bad, DomainId::Unit).ok);
    let good = FocProof {
        rule: FRule::Rf,
        conclusion: s,
        premises: vec![FocProof {
            rule: FRule::Ri,
            conclusion: FocSequent { gamma: vec![], delta: vec![j(Prop::up(p.clone()))], form: Form::RightFocus { focus: j(p) } },
            premises: vec![],
            witness: FWitness::default(),
        }],
        witness: FWitness::default(),
    };
    let r = check_focused(&good, DomainId::Unit);
    assert!(r.ok, "{}", r);
    let k = erase(&good, DomainId::Unit);
    assert!(check_proof(&k, &CheckOptions::new(DomainId::Unit)).ok);
}
