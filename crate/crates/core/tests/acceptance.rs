//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process exits nonzero if any fails.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use hyll_core::corpus::{
    found, ill_provable, negative_controls, pure_sequents, round_trip, sample_traces, two_party_phase_log, FOCUS_GOALS, TWO_PARTY_PHASES,
};
use hyll_core::focusing::{check_focused, erase, prove_unfocused, SearchBudget};
use hyll_core::gen::{self, PropGen};
use hyll_core::kernel::{
    check_proof, contract, cut_eliminate, identity_expand, identity_expand_in, weaken, Builder, CheckOptions, Proof, Sequent,
};
use hyll_core::rng::Rng;
use hyll_core::simulator::{frequencies, replicate, SimConfig};
use hyll_core::spi::{parse_spi, Event};
use hyll_core::syntax::Judgement;
use hyll_core::text::parse_sequent;
use hyll_core::worlds::{compose, reaches, DomainId, NormWorld, World, WorldExpr, Q};

const DOMAINS: [DomainId; 3] = [DomainId::Unit, DomainId::Temporal, DomainId::Rates];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{} took {:.1?}, limit {:?}", what, t, limit))
}

fn checks(p: &Proof, d: DomainId, what: &str) -> Result<(), String> {
    let r = check_proof(p, &CheckOptions::new(d));
    ensure(r.ok, || format!("{}: {}", what, r))
}

/// Kernel soundness of the metatheory constructions.
fn kernel_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng::new(0x5eed_0001);
    let w = WorldExpr::param("w");
    let mut cuts = 0;
    for i in 0..500 {
        let d = DOMAINS[i % 3];
        let a = PropGen::new(d, 1 + i % 5).prop(&mut rng);
        let j = Judgement::new(a.clone(), w.clone());
        let id = identity_expand(&a, &w, d);
        checks(&id, d, &format!("identity_expand {}", a))?;

        let extra = Judgement::new(PropGen::new(d, 2).prop(&mut rng), WorldExpr::param("v"));
        let wk = weaken(&id, std::slice::from_ref(&extra), d);
        checks(&wk, d, &format!("weaken {}", a))?;

        // Two copies of `extra` in every sequent, merged back into one.
        let mut dup = wk.clone();
        fn push(p: &mut Proof, j: &Judgement) {
            p.conclusion.gamma.push(j.clone());
            p.premises.iter_mut().for_each(|q| push(q, j));
        }
        push(&mut dup, &extra);
        let ct = contract(&dup, &extra, d);
        checks(&ct, d, &format!("contract {}", a))?;
        ensure(ct.conclusion == wk.conclusion, || format!("contract changed the end-sequent of {}", a))?;

        let b = Builder::new(d);
        let s = Sequent::new(vec![], vec![j.clone()], j.clone());
        let linear = b.cut(s.clone(), j.clone(), id.clone(), identity_expand(&a, &w, d));
        let g = Sequent::new(vec![j.clone()], vec![], j.clone());
        let left = b.copy(g.clone(), &j, identity_expand_in(std::slice::from_ref(&j), &a, &w, d));
        let right = b.copy(g.clone(), &j, identity_expand_in(std::slice::from_ref(&j), &a, &w, d));
        let bang = b.cut_bang(g, j.clone(), left, right);
        for p in [linear, bang] {
            let r = check_proof(&p, &CheckOptions::with_cut(d));
            ensure(r.ok, || format!("cut input for {}: {}", a, r))?;
            let q = cut_eliminate(&p, d);
            checks(&q, d, &format!("cut_eliminate {}", a))?;
            ensure(q.count_cuts() == 0, || format!("cut_eliminate left cuts in {}", a))?;
            ensure(q.conclusion == p.conclusion, || format!("cut_eliminate changed the end-sequent of {}", a))?;
            cuts += 1;
        }
    }
    within(start, Duration::from_secs(60), "kernel suite")?;
    Ok(format!("500 identities, 500 weakenings, 500 contractions, {} cut eliminations in {:.1?}", cuts, start.elapsed()))
}

/// Monoid laws and residuals, on literal worlds and on symbolic ones.
fn world_properties() -> Outcome {
    let mut rng = Rng::new(0x5eed_0002);
    for d in DOMAINS {
        let rid = World::rid(d);
        let gen = PropGen::new(d, 1);
        for i in 0..1000 {
            let (u, v, x) = (gen::world(&mut rng, d), gen::world(&mut rng, d), gen::world(&mut rng, d));
            let c = |a: &World, b: &World| compose(a, b).expect("same domain");
            ensure(c(&c(&u, &v), &x) == c(&u, &c(&v, &x)), || format!("{} case {}: associativity fails on {}, {}, {}", d, i, u, v, x))?;
            ensure(c(&rid, &u) == u && c(&u, &rid) == u, || format!("{} case {}: rid is not an identity for {}", d, i, u))?;
            if let Some(r) = reaches(&u, &x).unwrap() {
                ensure(c(&u, &r) == x, || format!("{} case {}: residual {} of {} to {} is unsound", d, i, r, u, x))?;
            }
            ensure(reaches(&u, &c(&u, &v)).unwrap() == Some(v.clone()), || {
                format!("{} case {}: {} does not reach {} . {} by {}", d, i, u, u, v, v)
            })?;
            ensure(reaches(&rid, &u).unwrap() == Some(u.clone()), || format!("{} case {}: rid does not reach {}", d, i, u))?;

            let (a, b, e) = (gen.world_expr(&mut rng, &[]), gen.world_expr(&mut rng, &[]), gen.world_expr(&mut rng, &[]));
            let n = |x: &WorldExpr| NormWorld::of(x, d).expect("closed");
            let (na, nb, ne) = (n(&a), n(&b), n(&e));
            ensure(na.compose(&nb).compose(&ne) == na.compose(&nb.compose(&ne)), || {
                format!("{} case {}: symbolic associativity on {}, {}, {}", d, i, a, b, e)
            })?;
            let nrid = NormWorld::rid(d);
            ensure(nrid.compose(&na) == na && na.compose(&nrid) == na, || format!("{} case {}: symbolic identity on {}", d, i, a))?;
            let target = na.compose(&nb);
            let r = na.residual(&target);
            ensure(r.as_ref().is_some_and(|r| na.compose(r) == target), || {
                format!("{} case {}: symbolic residual of {} to {} . {}", d, i, a, a, b)
            })?;
            if let Some(r) = na.residual(&ne) {
                ensure(na.compose(&r) == ne, || format!("{} case {}: symbolic residual {} to {} is unsound", d, i, a, e))?;
            }
            ensure(nrid.residual(&na) == Some(na.clone()), || format!("{} case {}: rid does not reach {}", d, i, a))?;
        }
    }
    Ok("1000 literal and 1000 symbolic cases per domain".into())
}

/// No proof of `0` from nothing, and the unit domain is conservative over
/// ILL on pure sequents.
fn consistency() -> Outcome {
    let zero = parse_sequent(". ; . |- 0 @ w", &BTreeSet::new()).unwrap();
    for d in DOMAINS {
        let (out, p) = prove_unfocused(&zero, d, &SearchBudget::with_decisions(6));
        ensure(p.is_none() && out.proof.is_none(), || format!("found a proof of 0 in {}", d))?;
    }
    let b = SearchBudget::with_decisions(8);
    let corpus = pure_sequents();
    ensure(corpus.len() == 20, || format!("pure corpus has {} sequents", corpus.len()))?;
    let mut provable = 0;
    for s in &corpus {
        ensure(s.gamma.iter().chain(&s.delta).chain([&s.goal]).all(|j| j.prop.is_pure()), || format!("{} is not pure", s))?;
        let hyll = prove_unfocused(s, DomainId::Unit, &b).1;
        if let Some(p) = &hyll {
            checks(p, DomainId::Unit, &format!("{}", s))?;
        }
        let ill = ill_provable(s, &b).is_some();
        ensure(hyll.is_some() == ill, || format!("{}: unit HyLL says {}, ILL says {}", s, hyll.is_some(), ill))?;
        provable += usize::from(ill);
    }
    Ok(format!("0 unprovable at fuel 6 in 3 domains; pure corpus agrees on 20 sequents ({} provable)", provable))
}

/// Every curated goal is found within fuel 8 and erases to a checked proof.
fn focusing_soundness() -> Outcome {
    ensure(FOCUS_GOALS.len() >= 15, || format!("only {} goals", FOCUS_GOALS.len()))?;
    let mut slowest = Duration::ZERO;
    for g in FOCUS_GOALS {
        let start = Instant::now();
        let s = g.parse();
        let (out, p) = prove_unfocused(&s, g.domain, &SearchBudget::with_decisions(8));
        let fp = out.proof.ok_or_else(|| format!("{} not found at fuel 8", g.name))?;
        let r = check_focused(&fp, g.domain);
        ensure(r.ok, || format!("{}: focused proof does not check: {}", g.name, r))?;
        let p = p.ok_or_else(|| format!("{}: no erased proof", g.name))?;
        checks(&p, g.domain, g.name)?;
        let direct = erase(&fp, g.domain);
        checks(&direct, g.domain, g.name)?;
        within(start, Duration::from_secs(5), g.name)?;
        slowest = slowest.max(start.elapsed());
    }
    Ok(format!("{} goals found and checked, slowest {:.1?}", FOCUS_GOALS.len(), slowest))
}

/// Trace to derivation and back, with every neutral frontier.
fn adequacy() -> Outcome {
    let samples = sample_traces(4, 6).map_err(|e| e.to_string())?;
    let procs: HashSet<&str> = samples.iter().map(|s| s.process).collect();
    ensure(samples.len() >= 25, || format!("only {} traces", samples.len()))?;
    ensure(procs.len() >= 8, || format!("only {} processes", procs.len()))?;
    for need in ["two-party", "oscillator", "restriction", "choice"] {
        ensure(procs.contains(need), || format!("no trace of {}", need))?;
    }
    let mut frontiers = 0;
    for s in &samples {
        ensure(s.trace.len() <= 6, || format!("{} trace too long", s.process))?;
        frontiers += round_trip(&s.env, &s.rates, &s.trace).map_err(|e| format!("{}: {}", s.process, e))?;
    }
    Ok(format!("{} traces over {} processes, {} frontiers", samples.len(), procs.len(), frontiers))
}

fn two_party_log() -> Outcome {
    let log = two_party_phase_log().map_err(|e| e.to_string())?;
    ensure(log == TWO_PARTY_PHASES, || format!("phase log {:?}", log))?;
    Ok(log.join(" | "))
}

fn negative() -> Outcome {
    let mut names = Vec::new();
    for c in negative_controls() {
        ensure(!found(&c.refuted, 8), || format!("{} was proved", c.name))?;
        if let Some(t) = &c.twin {
            ensure(found(t, 8), || format!("the provable twin of {} was not found", c.name))?;
        }
        names.push(c.name);
    }
    Ok(format!("refuted at fuel 8: {}", names.join(", ")))
}

/// The race `tau(2) | tau(3)`.
fn race_statistics() -> Outcome {
    let start = Instant::now();
    let f = parse_spi("run tau(2) | tau(3)").map_err(|e| e.to_string())?;
    let p = f.run.unwrap();
    let n = 100_000;
    let runs = replicate(&f.env, &f.rates, &p, &SimConfig { seed: 2024, max_steps: 1, certify: true, ..SimConfig::default() }, n)
        .map_err(|e| e.to_string())?;
    ensure(runs.iter().all(|r| r.certified.as_ref().is_some_and(|c| c.ok)), || "a trace failed to certify".into())?;
    let count = |r: i64| {
        frequencies(&runs)
            .into_iter()
            .find(|(evs, _)| evs.as_slice() == [Event::Internal { rate: Q::from_integer(r) }])
            .map_or(0, |(_, k)| k)
    };
    let (k2, k3) = (count(2), count(3));
    ensure(k2 + k3 == n, || format!("{} runs did not take exactly one step", n - k2 - k3))?;
    let (f2, f3) = (k2 as f64 / n as f64, k3 as f64 / n as f64);
    ensure((f2 - 0.4).abs() <= 0.01 && (f3 - 0.6).abs() <= 0.01, || format!("frequencies {:.4} / {:.4}", f2, f3))?;
    let mean = runs.iter().map(|r| r.delays[0]).sum::<f64>() / n as f64;
    ensure((mean - 0.2).abs() <= 0.2 * 0.05, || format!("mean delay {:.5}", mean))?;
    let (e2, e3) = (0.4 * n as f64, 0.6 * n as f64);
    let chi = (k2 as f64 - e2).powi(2) / e2 + (k3 as f64 - e3).powi(2) / e3;
    let pval = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi);
    ensure(pval > 0.001, || format!("chi-square {:.3}, p = {:.5}", chi, pval))?;
    within(start, Duration::from_secs(120), "race")?;
    Ok(format!(
        "freq {:.4}/{:.4}, mean delay {:.5}, chi-square {:.3} (p = {:.3}), {} certified, {:.1?}",
        f2,
        f3,
        mean,
        chi,
        pval,
        n,
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("kernel soundness", kernel_soundness),
        ("world properties", world_properties),
        ("consistency and conservativity", consistency),
        ("focusing soundness", focusing_soundness),
        ("spi adequacy round trip", adequacy),
        ("two-party phase log", two_party_log),
        ("negative controls", negative),
        ("race statistics", race_statistics),
    ];
    // Deep derivations recurse; give them room.
    let failed = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let mut failed = 0;
            for (i, (name, run)) in criteria.iter().enumerate() {
                let start = Instant::now();
                let res = std::panic::catch_unwind(run).unwrap_or_else(|e| {
                    Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
                });
                match res {
                    Ok(msg) => println!("criterion {} {}: PASS ({:.1?}) {}", i + 1, name, start.elapsed(), msg),
                    Err(msg) => {
                        failed += 1;
                        println!("criterion {} {}: FAIL {}", i + 1, name, msg);
                    }
                }
            }
            failed
        })
        .unwrap()
        .join()
        .unwrap();
    if failed > 0 {
        eprintln!("{} criteria failed", failed);
        std::process::exit(1);
    }
}
