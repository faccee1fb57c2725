use std::collections::BTreeSet;

use super::*;
use crate::focusing::{check_focused, Form, Goal};
use crate::syntax::{is_polarized, Judgement, Polarity, Prop, Sort, Term};
use crate::text::parse_prop;
use crate::worlds::{sym, DomainId, WorldExpr};

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn file(src: &str) -> SpiFile {
    parse_spi(src).unwrap()
}

fn p(src: &str) -> Process {
    parse_process(src).unwrap()
}

fn pos_atoms() -> BTreeSet<Sym> {
    ["dt", "out", "in", "tau", "act"].iter().map(|s| sym(s)).collect()
}

fn hyll(src: &str) -> Prop {
    parse_prop(src, &pos_atoms()).unwrap()
}

const TWO_PARTY: &str = "channel x : 4\nchannel a : 1\nrun x!(a).tau(1) | x?(y).y!(y)";

// Congruence.

#[test]
fn par_nil_is_unit() {
    let env = Env::new();
    let a = p("x!(a).0");
    assert!(congruent(&env, &Process::par(a.clone(), Process::Nil), &a).unwrap());
    assert!(congruent(&env, &Process::par(Process::Nil, a.clone()), &a).unwrap());
}

#[test]
fn scope_extrusion() {
    let env = Env::new();
    let lhs = p("new(2) z in (a!(b) | z!(z))");
    let rhs = p("a!(b) | new(2) z in z!(z)");
    assert!(congruent(&env, &lhs, &rhs).unwrap());
    // Rates of bound channels matter.
    let other = p("a!(b) | new(3) z in z!(z)");
    assert!(!congruent(&env, &lhs, &other).unwrap());
}

#[test]
fn duplicate_summand_absorbed() {
    let env = Env::new();
    assert!(congruent(&env, &p("tau(2) + tau(2)"), &p("tau(2)")).unwrap());
    assert!(congruent(&env, &p("tau(1).a!(b) + x?(y) + tau(1).a!(b)"), &p("x?(w) + tau(1).a!(b)")).unwrap());
    assert!(!congruent(&env, &p("tau(2) + tau(3)"), &p("tau(2)")).unwrap());
}

#[test]
fn nu_swap_and_garbage() {
    let env = Env::new();
    let a = p("new(1) u in new(2) v in u!(v)");
    let b = p("new(2) v in new(1) u in u!(v)");
    assert!(congruent(&env, &a, &b).unwrap());
    assert!(congruent(&env, &p("new(5) u in 0"), &Process::Nil).unwrap());
    // Bound names never match free ones.
    assert!(!congruent(&env, &p("new(1) u in u!(u)"), &p("u!(u)")).unwrap());
}

#[test]
fn input_binders_alpha() {
    let env = Env::new();
    assert!(congruent(&env, &p("x?(y).y!(y)"), &p("x?(w).w!(w)")).unwrap());
    assert!(!congruent(&env, &p("x?(y).y!(y)"), &p("x?(w).w!(x)")).unwrap());
}

#[test]
fn unfolding_on_demand() {
    let f = file("def A(x) = x!(x).A(x)\nchannel c : 1\nrun A(c)");
    let unfolded = p("c!(c).A(c)");
    assert!(congruent(&f.env, &p("A(c)"), &unfolded).unwrap());
    assert!(!congruent(&f.env, &p("A(c)"), &p("c!(c)")).unwrap());
    assert!(matches!(congruent(&f.env, &p("B(c)"), &unfolded), Err(SpiError::UnknownDef(_))));
}

#[test]
fn normal_form_is_order_blind() {
    let a = normal_form(&p("b!(b) | new(1) z in (z!(a) | a?(y))"));
    let b = normal_form(&p("new(1) z in (a?(w) | z!(a)) | b!(b)"));
    assert_eq!(a, b);
}

// Stepping.

#[test]
fn tau_steps_to_nil() {
    let succ = step(&Env::new(), &RateTable::new(), &p("tau(2).0")).unwrap();
    assert_eq!(succ, vec![(Event::Internal { rate: q(2) }, Process::Nil)]);
}

#[test]
fn nil_is_stuck() {
    assert!(step(&Env::new(), &RateTable::new(), &Process::Nil).unwrap().is_empty());
}

#[test]
fn two_party_synchronizes_at_channel_rate() {
    let f = file(TWO_PARTY);
    let succ = step(&f.env, &f.rates, f.run.as_ref().unwrap()).unwrap();
    assert_eq!(succ.len(), 1);
    assert_eq!(succ[0].0, Event::Sync { channel: sym("x"), rate: q(4), message: sym("a") });
    assert!(congruent(&f.env, &succ[0].1, &p("tau(1) | a!(a)")).unwrap());
}

#[test]
fn missing_rate_is_an_error() {
    let r = step(&Env::new(), &RateTable::new(), &p("x!(a) | x?(y)"));
    assert!(matches!(r, Err(SpiError::MissingRate(_))));
}

#[test]
fn choice_discards_other_summands() {
    let f = file("channel x : 3\nchannel m : 1\nrun (x!(m).tau(1) + tau(2)) | x?(y)");
    let succ = step(&f.env, &f.rates, f.run.as_ref().unwrap()).unwrap();
    assert_eq!(succ.len(), 2);
    assert!(succ.iter().any(|(e, s)| *e == Event::Internal { rate: q(2) } && congruent(&f.env, s, &p("x?(y)")).unwrap()));
    assert!(succ.iter().any(|(e, s)| e.rate() == q(3) && congruent(&f.env, s, &p("tau(1)")).unwrap()));
}

#[test]
fn private_channel_uses_declared_rate() {
    let f = file("run new(7) z in (z!(z) | z?(y).tau(1))");
    let succ = step(&f.env, &f.rates, f.run.as_ref().unwrap()).unwrap();
    assert_eq!(succ.len(), 1);
    assert_eq!(succ[0].0.rate(), q(7));
    assert!(congruent(&f.env, &succ[0].1, &p("tau(1)")).unwrap());
}

#[test]
fn recursion_unfolds_while_stepping() {
    let f = file("def Ping(x) = x!(x).Ping(x)\ndef Sink(x) = x?(y).Sink(x)\nchannel c : 2\nrun Ping(c) | Sink(c)");
    let run = f.run.clone().unwrap();
    let succ = step(&f.env, &f.rates, &run).unwrap();
    assert_eq!(succ.len(), 1);
    assert!(congruent(&f.env, &succ[0].1, &run).unwrap());
}

#[test]
fn replay_rejects_wrong_successor() {
    let f = file(TWO_PARTY);
    let mut t = Trace::new(f.run.clone().unwrap());
    t.steps.push(TraceStep { event: Event::Sync { channel: sym("x"), rate: q(4), message: sym("a") }, after: p("tau(1)") });
    assert!(matches!(replay(&f.env, &f.rates, &t), Err(SpiError::Replay { step: 1, .. })));
}

// Encoding.

#[test]
fn encode_process_clauses() {
    assert_eq!(encode_proc(&Process::Nil), Prop::One);
    let a = p("x!(a)");
    let b = p("tau(2)");
    assert_eq!(encode_proc(&Process::par(a.clone(), b.clone())), Prop::tensor(encode_proc(&a), encode_proc(&b)));
    match encode_proc(&p("new(3) z in z!(z)")) {
        Prop::Exists(Sort::Term, body) => match *body {
            Prop::Tensor(l, _) => assert_eq!(*l, hyll("!(rt(z) at [3])").map_free_to_var0()),
            other => panic!("unexpected body {}", other),
        },
        other => panic!("unexpected {}", other),
    }
    assert_eq!(encode_proc(&p("X(a, b)")), Prop::Atom(Polarity::Pos, sym("X"), vec![Term::cnst("a"), Term::cnst("b")]));
}

trait VarZero {
    fn map_free_to_var0(self) -> Prop;
}

impl VarZero for Prop {
    /// Replaces the constant `z` by the innermost term variable.
    fn map_free_to_var0(self) -> Prop {
        fn go(p: &Prop) -> Prop {
            match p {
                Prop::Atom(pol, n, args) => {
                    Prop::Atom(*pol, n.clone(), args.iter().map(|t| if *t == Term::cnst("z") { Term::Var(0) } else { t.clone() }).collect())
                }
                Prop::Bang(a) => Prop::bang(go(a)),
                Prop::At(a, w) => Prop::at(go(a), w.clone()),
                other => other.clone(),
            }
        }
        go(&self)
    }
}

#[test]
fn encode_sum_clauses() {
    assert_eq!(encode_sum(&Sum::Out(Chan::name("x"), Chan::name("m"), Box::new(Process::Nil))), hyll("↑(out(x, m) * 1)"));
    assert_eq!(encode_sum(&Sum::In(Chan::name("x"), Box::new(Process::Nil))), hyll("fa n. ↑(in(x, n) * 1)"));
    assert_eq!(encode_sum(&Sum::Tau(q(2), Box::new(Process::Nil))), hyll("↑(tau({[2]}) * 1)"));
    let Process::Sum(s) = p("tau(2) + x!(m)") else { panic!() };
    assert_eq!(encode_sum(&s), Prop::with(hyll("↑(tau({[2]}) * 1)"), hyll("↑(out(x, m) * 1)")));
}

#[test]
fn input_binds_the_message() {
    let Process::Sum(s) = p("x?(y).y!(x)") else { panic!() };
    assert_eq!(encode_sum(&s), hyll("fa n. ↑(in(x, n) * ↓(dt -o ↑(out(n, x) * 1)))"));
}

#[test]
fn nested_outputs_stay_sequential() {
    let e = encode_proc(&p("x!(m).y!(n)"));
    assert_eq!(e, hyll("↓(dt -o ↑(out(x, m) * ↓(dt -o ↑(out(y, n) * 1))))"));
}

#[test]
fn encode_env_clauses() {
    assert!(encode_env(&Env::new()).is_empty());
    let f = file("def Z = tau(1)\ndef Two(u, v) = u!(v)\nrun 0");
    let js = encode_env(&f.env);
    assert_eq!(js.len(), 2);
    let two = hyll("faw w. ((fa u. fa v. ((Two(u, v) -o ↑↓(dt -o ↑(out(u, v) * 1))) & (↓(dt -o ↑(out(u, v) * 1)) -o ↑Two(u, v)))) at w)");
    let z = hyll("faw w. (((Z -o ↑↓(dt -o ↑(tau({[1]}) * 1))) & (↓(dt -o ↑(tau({[1]}) * 1)) -o ↑Z)) at w)");
    let pos_two = |p: Prop| flip_def_atoms(&p);
    assert_eq!(js[0], Judgement::new(pos_two(two), WorldExpr::Id));
    assert_eq!(js[1], Judgement::new(pos_two(z), WorldExpr::Id));
}

/// Definition atoms are positive; the text parser reads them as negative.
fn flip_def_atoms(p: &Prop) -> Prop {
    use Prop::*;
    match p {
        Atom(Polarity::Neg, n, a) if n.chars().next().is_some_and(char::is_uppercase) => Atom(Polarity::Pos, n.clone(), a.clone()),
        Atom(..) | One | Top | Zero => p.clone(),
        Tensor(a, b) => Prop::tensor(flip_def_atoms(a), flip_def_atoms(b)),
        Lolli(a, b) => Prop::lolli(flip_def_atoms(a), flip_def_atoms(b)),
        With(a, b) => Prop::with(flip_def_atoms(a), flip_def_atoms(b)),
        Plus(a, b) => Prop::plus(flip_def_atoms(a), flip_def_atoms(b)),
        Bang(a) => Prop::bang(flip_def_atoms(a)),
        Forall(s, a) => Prop::forall(*s, flip_def_atoms(a)),
        Exists(s, a) => Prop::exists(*s, flip_def_atoms(a)),
        At(a, w) => Prop::at(flip_def_atoms(a), w.clone()),
        Local(a) => Prop::local(flip_def_atoms(a)),
        Up(a) => Prop::up(flip_def_atoms(a)),
        Down(a) => Prop::down(flip_def_atoms(a)),
    }
}

const INTER: &str = "faw u. ((act -o (↑((dt at id) * ↓(faw r. ((tau({r}) at id) -o dn v. (↑act at v . r)))) \
    & ↑(((dt * dt) at id) * ↓(fa x. faw r. fa m. (((out(x, m) * in(x, m)) at id) -o (↓(rt(x) at r) -o dn v. (↑act at v . r))))))) at u)";

#[test]
fn interaction_theory_matches_hand_tree() {
    let j = interaction_theory();
    assert_eq!(j.world, WorldExpr::Id);
    assert_eq!(j.prop, hyll(INTER));
    assert!(is_polarized(&j.prop, Polarity::Neg));
    let round = crate::syntax::polarize(&crate::syntax::erase_polarity(&j.prop), Polarity::Neg);
    assert!(is_polarized(&round, Polarity::Neg));
}

#[test]
fn canonical_context_examples() {
    let mut rates = RateTable::new();
    rates.insert("x", q(4));
    let can = canonical_context(&mut rates, &p("x!(a).tau(1) | x?(y).y!(y)"));
    assert_eq!(
        can.iter().map(|j| j.prop.clone()).collect::<Vec<_>>(),
        vec![hyll("dt -o ↑(out(x, a) * ↓(dt -o ↑(tau({[1]}) * 1)))"), hyll("dt -o fa n. ↑(in(x, n) * ↓(dt -o ↑(out(n, n) * 1)))"),]
    );
    assert!(canonical_context(&mut rates, &Process::Nil).is_empty());
    let before = rates.len();
    let can = canonical_context(&mut rates, &p("new(5) z in z!(z)"));
    assert_eq!(rates.len(), before + 1);
    let (fresh, r) = rates.iter().find(|(n, _)| is_local(n)).map(|(n, r)| (n.clone(), *r)).unwrap();
    assert_eq!(r, q(5));
    assert_eq!(
        can[0].prop,
        Prop::lolli(encode::guard(), encode_sum(&Sum::Out(Chan::Name(fresh.clone()), Chan::Name(fresh), Box::new(Process::Nil))))
    );
}

#[test]
fn two_party_end_sequent_shape() {
    let f = file(TWO_PARTY);
    let run = f.run.clone().unwrap();
    let s = WorldExpr::param("s");
    let t = WorldExpr::compose(s.clone(), WorldExpr::rate(q(4)));
    let cs = canonical_sequent(&f.env, &f.rates, &run, &p("tau(1) | a!(a)"), s.clone(), t.clone()).unwrap();
    let seq = &cs.sequent;
    assert_eq!(seq.gamma.last().unwrap(), &interaction_theory());
    assert!(seq.gamma.contains(&Judgement::new(hyll("rt(x)"), WorldExpr::rate(q(4)))));
    assert_eq!(seq.delta[0], Judgement::new(hyll("↑act"), s));
    assert_eq!(seq.delta.len(), 3);
    let Form::Active { goal: Goal::Pos(g), omega } = &seq.form else { panic!() };
    assert!(omega.is_empty());
    assert_eq!(g.world, t);
    assert!(seq.polarities_ok().is_ok());
}

#[test]
fn canonical_sequent_requires_rates() {
    let r = canonical_sequent(&Env::new(), &RateTable::new(), &p("x!(a)"), &Process::Nil, WorldExpr::Id, WorldExpr::Id);
    assert!(matches!(r, Err(SpiError::MissingRate(_))));
}

#[test]
fn decode_inverts_encode() {
    for src in ["x!(a).tau(1)", "x?(y).(y!(y) | new(2) z in z!(y))", "tau(1) + x?(y).X(y, x)", "0 | X(a, a)"] {
        let proc = p(src);
        assert_eq!(encode::decode_proc(&encode_proc(&proc)), Some(proc));
    }
}

// Adequacy.

fn two_party_trace() -> (SpiFile, Trace) {
    let f = file(TWO_PARTY);
    let mut t = Trace::new(f.run.clone().unwrap());
    t.steps.push(TraceStep { event: Event::Sync { channel: sym("x"), rate: q(4), message: sym("a") }, after: p("tau(1) | a!(a)") });
    (f, t)
}

#[test]
fn empty_trace_closes_at_once() {
    let f = file(TWO_PARTY);
    let t = Trace::new(f.run.clone().unwrap());
    let d = trace_to_derivation(&f.env, &f.rates, &t).unwrap();
    assert_eq!(d.rule, crate::focusing::FRule::Rf);
    assert!(check_focused(&d, DomainId::Rates).ok);
    assert_eq!(phase_log(&d).unwrap(), vec![Phase::Close]);
    assert!(derivation_to_trace(&d).unwrap().is_empty());
}

#[test]
fn two_party_derivation_phases() {
    let (f, t) = two_party_trace();
    let d = trace_to_derivation_at(&f.env, &f.rates, &t, WorldExpr::param("s")).unwrap();
    let report = check_focused(&d, DomainId::Rates);
    assert!(report.ok, "{:?}", report);
    let log: Vec<String> = phase_log(&d).unwrap().iter().map(ToString::to_string).collect();
    assert_eq!(
        log,
        vec!["focus inter @ s", "select syn", "unlock output x(a)", "unlock input x witness a", "cleanup s -> s . [4]", "close",]
    );
}

#[test]
fn two_party_round_trip() {
    let (f, t) = two_party_trace();
    let d = trace_to_derivation(&f.env, &f.rates, &t).unwrap();
    let back = derivation_to_trace(&d).unwrap();
    assert_eq!(back.canonical_events(), t.canonical_events());
    assert!(congruent(&f.env, &back.initial, &t.initial).unwrap());
    assert!(congruent(&f.env, back.final_process(), t.final_process()).unwrap());
}

#[test]
fn tau_then_sync() {
    let f = file("channel x : 3\nchannel m : 1\nrun tau(2).x!(m) | x?(y).tau(1)");
    let run = f.run.clone().unwrap();
    let mut t = Trace::new(run.clone());
    t.steps.push(TraceStep { event: Event::Internal { rate: q(2) }, after: p("x!(m) | x?(y).tau(1)") });
    t.steps.push(TraceStep { event: Event::Sync { channel: sym("x"), rate: q(3), message: sym("m") }, after: p("tau(1)") });
    let c = certify(&f.env, &f.rates, &t).unwrap();
    assert!(c.report.ok, "{:?}", c.report);
    let back = derivation_to_trace(&c.proof).unwrap();
    assert_eq!(back.events(), t.events());
    let fr = neutral_frontiers(&c.proof).unwrap();
    let worlds: Vec<_> = fr.iter().map(|f| f.world.clone()).collect();
    assert_eq!(worlds.len(), 3);
    for (k, fr) in fr.iter().enumerate() {
        let want = WorldExpr::lit(t.world_after(fr.events));
        assert!(crate::worlds::world_eq(&fr.world, &want, DomainId::Rates), "frontier {}", k);
        assert_eq!(derivation_prefix(&c.proof, k).unwrap().events(), t.prefix(fr.events).events());
    }
}

#[test]
fn recursion_and_restriction_certify() {
    let f = file(
        "def Ping(x) = x!(x).Ping(x)\n\
         def Sink(x) = x?(y).tau(1).Sink(x)\n\
         run new(2) c in (Ping(c) | Sink(c))",
    );
    let run = f.run.clone().unwrap();
    let mut cfg = Config::new(&f.env, &f.rates, &run).unwrap();
    let mut t = Trace::new(run);
    for _ in 0..4 {
        let r = cfg.redexes().unwrap().remove(0);
        cfg = cfg.fire(&f.env, &r).unwrap();
        t.steps.push(TraceStep { event: r.event, after: cfg.process() });
    }
    assert_eq!(t.rates(), vec![q(2), q(1), q(2), q(1)]);
    let c = certify(&f.env, &f.rates, &t).unwrap();
    assert!(c.report.ok, "{:?}", c.report);
    let back = derivation_to_trace(&c.proof).unwrap();
    assert_eq!(back.canonical_events(), t.canonical_events());
    let log = phase_log(&c.proof).unwrap();
    assert!(log.iter().any(|ph| matches!(ph, Phase::Unfold { .. })));
}

#[test]
fn non_canonical_proof_is_rejected() {
    let (f, t) = two_party_trace();
    let mut d = trace_to_derivation(&f.env, &f.rates, &t).unwrap();
    d.conclusion.delta.retain(|j| !encode::is_lock(&j.prop));
    assert!(matches!(derivation_to_trace(&d), Err(SpiError::NotCanonical(_))));
}

// Concrete syntax.

#[test]
fn spi_file_round_trip() {
    let src = "def Cell(x, v) = x!(v).Cell(x, v) + x?(w).Cell(x, w)\n\
               channel c : 2\n\
               channel d : 0.25\n\
               run new(1/2) v in Cell(c, v) | c?(y).tau(0.5).0";
    let f = file(src);
    assert_eq!(f.rates.get("d"), Some(Q::new(1, 4)));
    let again = file(&write_spi(&f));
    assert_eq!(again.run, f.run);
    assert_eq!(again.rates, f.rates);
    assert_eq!(again.env.get("Cell").unwrap().body, f.env.get("Cell").unwrap().body);
}

#[test]
fn spi_errors_carry_locations() {
    let e = parse_spi("channel x : 1\nrun x!(x).Nope(x)").unwrap_err();
    let SpiError::Parse(pe) = e else { panic!("{:?}", e) };
    assert_eq!((pe.line, pe.col), (2, 11));
    let e = parse_spi("def A(x) = A(x)\nrun 0").unwrap_err();
    assert!(matches!(e, SpiError::Parse(ref pe) if pe.line == 1), "{:?}", e);
    assert!(parse_spi("run _z!(_z)").is_err());
    assert!(parse_spi("channel x : 0\nrun 0").is_err());
    assert!(parse_spi("def act = 0\nrun 0").is_err());
}

#[test]
fn trace_round_trip() {
    let (f, t) = two_party_trace();
    let text = write_trace(&t);
    assert!(text.contains("step synchronize(x, 4, a) world [4]"));
    let back = parse_trace(&text).unwrap();
    assert_eq!(back.events(), t.events());
    assert!(congruent(&f.env, &back.steps[0].after, &t.steps[0].after).unwrap());
    let bad = text.replace("world [4]", "world [5]");
    assert!(parse_trace(&bad).is_err());
}
