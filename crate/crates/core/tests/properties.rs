use proptest::prelude::*;

use hyll_core::corpus::{process, PROCESSES};
use hyll_core::gen::{self, PropGen};
use hyll_core::kernel::{check_proof, cut_eliminate, identity_expand, Builder, CheckOptions, Sequent};
use hyll_core::rng::Rng;
use hyll_core::simulator::{simulate, SimConfig};
use hyll_core::spi::{parse_trace, write_trace};
use hyll_core::syntax::Judgement;
use hyll_core::text::{parse_certificate, write_certificate, Certificate};
use hyll_core::worlds::{compose, reaches, DomainId, World, WorldExpr};

fn domain() -> impl Strategy<Value = DomainId> {
    prop_oneof![Just(DomainId::Unit), Just(DomainId::Temporal), Just(DomainId::Rates)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn composition_is_a_monoid(seed in any::<u64>(), d in domain()) {
        let mut rng = Rng::new(seed);
        let (u, v, w) = (gen::world(&mut rng, d), gen::world(&mut rng, d), gen::world(&mut rng, d));
        let c = |a: &World, b: &World| compose(a, b).unwrap();
        prop_assert_eq!(c(&c(&u, &v), &w), c(&u, &c(&v, &w)));
        prop_assert_eq!(c(&World::rid(d), &u), u.clone());
        prop_assert_eq!(reaches(&u, &c(&u, &v)).unwrap(), Some(v));
    }

    #[test]
    fn identities_check_and_certificates_round_trip(seed in any::<u64>(), d in domain(), depth in 0usize..5) {
        let mut rng = Rng::new(seed);
        let a = PropGen::new(d, depth).prop(&mut rng);
        let p = identity_expand(&a, &WorldExpr::param("w"), d);
        prop_assert!(check_proof(&p, &CheckOptions::new(d)).ok);
        let c = Certificate { domain: d, proof: p };
        let text = write_certificate(&c).unwrap();
        prop_assert_eq!(parse_certificate(&text).unwrap(), c);
    }

    #[test]
    fn identity_cuts_eliminate(seed in any::<u64>(), d in domain(), depth in 0usize..4) {
        let mut rng = Rng::new(seed);
        let a = PropGen::new(d, depth).prop(&mut rng);
        let w = WorldExpr::param("w");
        let j = Judgement::new(a.clone(), w.clone());
        let s = Sequent::new(vec![], vec![j.clone()], j.clone());
        let p = Builder::new(d).cut(s.clone(), j, identity_expand(&a, &w, d), identity_expand(&a, &w, d));
        let q = cut_eliminate(&p, d);
        prop_assert!(check_proof(&q, &CheckOptions::new(d)).ok);
        prop_assert_eq!(q.count_cuts(), 0);
        prop_assert_eq!(q.conclusion, s);
    }

    #[test]
    fn simulated_traces_print_and_parse(seed in any::<u64>(), which in 0usize..PROCESSES.len(), steps in 0usize..8) {
        let f = process(PROCESSES[which].0);
        let run = f.run.clone().unwrap();
        let cfg = SimConfig { seed, max_steps: steps, ..SimConfig::default() };
        let a = simulate(&f.env, &f.rates, &run, &cfg).unwrap();
        prop_assert_eq!(&a, &simulate(&f.env, &f.rates, &run, &cfg).unwrap());
        let text = write_trace(&a.trace);
        let back = parse_trace(&text).unwrap();
        prop_assert_eq!(write_trace(&back), text);
        prop_assert_eq!(back.len(), a.trace.len());
    }
}
