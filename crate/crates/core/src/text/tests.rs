use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::gen::PropGen;
use crate::rng::Rng;
use crate::syntax::{Polarity, Prop};
use crate::worlds::{sym, DomainId, World, WorldExpr};

fn no_pos() -> BTreeSet<crate::worlds::Sym> {
    BTreeSet::new()
}

#[test]
fn precedence() {
    let p = parse_prop("a * b + c & d -o e -o f", &no_pos()).unwrap();
    let a = |s: &str| Prop::atom(s, vec![]);
    let want = Prop::lolli(Prop::with(Prop::plus(Prop::tensor(a("a"), a("b")), a("c")), a("d")), Prop::lolli(a("e"), a("f")));
    assert_eq!(p, want);
    assert_eq!(p.to_string(), "a * b + c & d -o e -o f");
}

#[test]
fn binders_and_worlds() {
    let p = parse_prop("dn u. faw v. (p(x) at u . v)", &no_pos()).unwrap();
    assert!(p.is_closed());
    let q = parse_prop("fa x. ex y. r(x, f(y), {id})", &no_pos()).unwrap();
    assert!(q.is_closed());
    assert_eq!(
        parse_world("[2, 3/4] . w").unwrap(),
        WorldExpr::compose(WorldExpr::lit(World::rates(vec![2.into(), num_rational::Ratio::new(3, 4)]).unwrap()), WorldExpr::param("w"),)
    );
}

#[test]
fn positive_atoms() {
    let pos: BTreeSet<_> = [sym("p")].into_iter().collect();
    match parse_prop("p", &pos).unwrap() {
        Prop::Atom(Polarity::Pos, ..) => {}
        other => panic!("{:?}", other),
    }
}

#[test]
fn errors_have_positions() {
    let e = parse_prop("a * ", &no_pos()).unwrap_err();
    assert_eq!((e.line, e.col), (1, 5));
    assert!(parse_prop("fa x. x", &no_pos()).is_err());
    assert!(parse_world("[0]").is_err());
}

#[test]
fn goal_file_round_trip() {
    let src = "# demo\ndomain rates\npos p, q\ngoal swap :: . ; p * q @ w |- q * p @ w\ngoal . ; a @ [2] |- (a at [2]) @ id\n";
    let f = parse_goal_file(src).unwrap();
    assert_eq!(f.domain, Some(DomainId::Rates));
    assert_eq!(f.goals.len(), 2);
    assert_eq!(f.goals[1].name, "goal2");
    let again = parse_goal_file(&write_goal_file(&f)).unwrap();
    assert_eq!(again, f);
}

#[test]
fn reserved_names_rejected_in_goal_files() {
    assert!(parse_goal_file("goal . ; a @ _w1 |- a @ _w1").is_err());
}

#[test]
fn random_props_round_trip() {
    let mut rng = Rng::new(2024);
    for d in DomainId::ALL {
        let g = PropGen::new(d, 5);
        for _ in 0..300 {
            let p = g.prop(&mut rng);
            let s = p.to_string();
            let q = parse_prop(&s, &no_pos()).unwrap_or_else(|e| panic!("{}: {}", s, e));
            assert_eq!(p, q, "{}", s);
        }
    }
}

proptest! {
    #[test]
    fn print_parse_print(seed in any::<u64>(), depth in 0usize..6) {
        let mut rng = Rng::new(seed);
        let p = PropGen::new(DomainId::Temporal, depth).prop(&mut rng);
        let s = p.to_string();
        let q = parse_prop(&s, &no_pos()).unwrap();
        prop_assert_eq!(q.to_string(), s);
    }
}

mod certificates {
    use super::*;
    use crate::focusing::{prove_unfocused, SearchBudget};
    use crate::kernel::{check_proof, cut_eliminate, identity_expand, CheckOptions, Rule};
    use crate::worlds::WorldExpr;

    fn round_trip(c: &Certificate) {
        let s = write_certificate(c).unwrap();
        let back = parse_certificate(&s).unwrap_or_else(|e| panic!("{}\n{}", e, s));
        assert_eq!(&back, c);
        assert_eq!(write_certificate(&back).unwrap(), s);
    }

    #[test]
    fn init_certificate() {
        let src = "hyll-certificate 1\ndomain unit\nnode 0 init\n  sequent . ; p @ w |- p @ w\n";
        let c = parse_certificate(src).unwrap();
        assert_eq!(c.proof.rule, Rule::Init);
        assert!(check_proof(&c.proof, &CheckOptions::new(c.domain)).ok);
        assert_eq!(write_certificate(&c).unwrap(), src);
    }

    #[test]
    fn identity_expansions_round_trip() {
        let mut rng = Rng::new(77);
        for d in DomainId::ALL {
            let g = PropGen::new(d, 4);
            for _ in 0..40 {
                let a = g.prop(&mut rng);
                let p = identity_expand(&a, &WorldExpr::param("w"), d);
                round_trip(&Certificate { domain: d, proof: p });
            }
        }
    }

    #[test]
    fn found_proofs_round_trip() {
        let pos: BTreeSet<_> = [sym("p"), sym("q")].into_iter().collect();
        let s = parse_sequent(". ; p * q @ w |- q * p @ w", &pos).unwrap();
        let (_, p) = prove_unfocused(&s, DomainId::Rates, &SearchBudget::with_decisions(8));
        let p = cut_eliminate(&p.unwrap(), DomainId::Rates);
        round_trip(&Certificate { domain: DomainId::Rates, proof: p });
    }

    #[test]
    fn malformed_certificates() {
        let bad = [
            "hyll-certificate 2\n",
            "hyll-certificate 1\nnode 0 init\n  sequent . ; p @ w |- p @ w\n",
            "hyll-certificate 1\ndomain unit\nnode 0 frobR\n",
            "hyll-certificate 1\ndomain unit\nnode 0 init\n",
            "hyll-certificate 1\ndomain unit\nnode 0 oneR\n  sequent . ; . |- 1 @ w\n  premises 0\n",
            "hyll-certificate 1\ndomain unit\nnode 0 init\n  sequent . ; p @ w |- p @ w\nnode 1 init\n  sequent . ; p @ w |- p @ w\n",
        ];
        for src in bad {
            assert!(parse_certificate(src).is_err(), "{}", src);
        }
        let e = parse_certificate("hyll-certificate 1\ndomain unit\nnode 0 init\n  sequent . ; p @ w . |- p @ w\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.col > 1);
    }
}
