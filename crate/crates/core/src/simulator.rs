//! Stochastic execution of processes.
//!
//! Every enabled action carries an exponential clock whose rate is its
//! propensity: an internal action's own rate, or for a synchronization
//! the inherent rate of its channel, once per (output, input) summand
//! pair. The race is resolved the usual way: the total propensity `R`
//! gives the delay `-ln(u) / R`, and action `i` wins with probability
//! `a_i / R`.
//!
//! Replications: run `i` (from 0) is seeded with the `i + 1`-th output of
//! [`Rng::new`] on the base seed, so runs are independent of one another
//! and of how many are requested.

use std::collections::BTreeMap;

use crate::kernel::CheckReport;
use crate::rng::Rng;
use crate::spi::{certify, write_trace, Config, Env, Event, Process, RateTable, Redex, SpiError, Trace, TraceStep};
use crate::worlds::{Sym, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionKind {
    Internal {
        rate: Q,
    },
    /// Indices are (component, summand) pairs of the configuration.
    Sync {
        channel: Sym,
        rate: Q,
        output: (usize, usize),
        input: (usize, usize),
        message: Sym,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnabledAction {
    pub kind: ActionKind,
    pub propensity: Q,
    pub redex: Redex,
}

fn action(r: Redex) -> EnabledAction {
    let kind = match (&r.event, r.parts.as_slice()) {
        (Event::Sync { channel, rate, message }, [o, i]) => {
            ActionKind::Sync { channel: channel.clone(), rate: *rate, output: *o, input: *i, message: message.clone() }
        }
        (e, _) => ActionKind::Internal { rate: e.rate() },
    };
    EnabledAction { kind, propensity: r.event.rate(), redex: r }
}

/// The enabled actions of a configuration, internal ones first, then
/// synchronizations by channel name and summand indices.
pub fn enabled_in(cfg: &Config) -> Result<Vec<EnabledAction>, SpiError> {
    Ok(cfg.redexes()?.into_iter().map(action).collect())
}

pub fn enabled(env: &Env, rates: &RateTable, p: &Process) -> Result<Vec<EnabledAction>, SpiError> {
    enabled_in(&Config::new(env, rates, p)?)
}

fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Picks the winner of the race and its delay. `None` when nothing is
/// enabled.
pub fn race(actions: &[EnabledAction], rng: &mut Rng) -> Option<(usize, f64)> {
    if actions.is_empty() {
        return None;
    }
    let weights: Vec<f64> = actions.iter().map(|a| to_f64(a.propensity)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.next_f64() * total;
    let mut pick = actions.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            pick = i;
            break;
        }
        u -= w;
    }
    let delay = -rng.next_open().ln() / total;
    Some((pick, delay))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub max_steps: usize,
    /// Stop before the first step that would complete after this time.
    pub stop_time: Option<f64>,
    pub certify: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { seed: 0, max_steps: 100, stop_time: None, certify: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub trace: Trace,
    pub delays: Vec<f64>,
    pub total_time: f64,
    pub certified: Option<CheckReport>,
}

/// One run, without certification.
fn run(env: &Env, rates: &RateTable, p: &Process, cfg: &SimConfig) -> Result<SimResult, SpiError> {
    let mut rng = Rng::new(cfg.seed);
    let mut conf = Config::new(env, rates, p)?;
    let mut trace = Trace::new(p.clone());
    let mut delays = Vec::new();
    let mut total = 0.0;
    while trace.len() < cfg.max_steps {
        let actions = enabled_in(&conf)?;
        let Some((i, delay)) = race(&actions, &mut rng) else { break };
        if cfg.stop_time.is_some_and(|t| total + delay > t) {
            break;
        }
        conf = conf.fire(env, &actions[i].redex)?;
        total += delay;
        delays.push(delay);
        trace.steps.push(TraceStep { event: actions[i].redex.event.clone(), after: conf.process() });
    }
    Ok(SimResult { trace, delays, total_time: total, certified: None })
}

/// Runs `p` until deadlock, `max_steps` or `stop_time`, and certifies the
/// trace if asked.
pub fn simulate(env: &Env, rates: &RateTable, p: &Process, cfg: &SimConfig) -> Result<SimResult, SpiError> {
    let mut res = run(env, rates, p, cfg)?;
    if cfg.certify {
        res.certified = Some(certify(env, rates, &res.trace)?.report);
    }
    Ok(res)
}

/// The seed of each replication.
pub fn run_seeds(seed: u64, runs: usize) -> Vec<u64> {
    let mut rng = Rng::new(seed);
    (0..runs).map(|_| rng.next_u64()).collect()
}

/// `runs` independent replications. Certification is done once per
/// distinct trace.
pub fn replicate(env: &Env, rates: &RateTable, p: &Process, cfg: &SimConfig, runs: usize) -> Result<Vec<SimResult>, SpiError> {
    let mut seen: BTreeMap<String, CheckReport> = BTreeMap::new();
    run_seeds(cfg.seed, runs)
        .into_iter()
        .map(|seed| {
            let mut res = run(env, rates, p, &SimConfig { seed, ..cfg.clone() })?;
            if cfg.certify {
                let key = write_trace(&res.trace);
                let report = match seen.get(&key) {
                    Some(r) => r.clone(),
                    None => {
                        let r = certify(env, rates, &res.trace)?.report;
                        seen.insert(key, r.clone());
                        r
                    }
                };
                res.certified = Some(report);
            }
            Ok(res)
        })
        .collect()
}

/// How often each event sequence occurred, most frequent first.
pub fn frequencies(results: &[SimResult]) -> Vec<(Vec<Event>, usize)> {
    let mut counts: BTreeMap<Vec<String>, (Vec<Event>, usize)> = BTreeMap::new();
    for r in results {
        let evs = r.trace.canonical_events();
        let key = evs.iter().map(ToString::to_string).collect();
        counts.entry(key).or_insert((evs, 0)).1 += 1;
    }
    let mut out: Vec<_> = counts.into_values().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.len().cmp(&b.0.len())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spi::{parse_spi, replay};

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn load(src: &str) -> (Env, RateTable, Process) {
        let f = parse_spi(src).unwrap();
        (f.env, f.rates, f.run.unwrap())
    }

    #[test]
    fn two_internal_actions() {
        let (e, r, p) = load("run tau(2) | tau(3)");
        let acts = enabled(&e, &r, &p).unwrap();
        assert_eq!(acts.iter().map(|a| a.propensity).collect::<Vec<_>>(), vec![q(2), q(3)]);
    }

    #[test]
    fn two_party_has_one_sync() {
        let (e, r, p) = load("channel x : 4\nchannel a : 1\nrun x!(a).tau(1) | x?(y).y!(y)");
        let acts = enabled(&e, &r, &p).unwrap();
        assert_eq!(acts.len(), 1);
        assert_eq!(acts[0].propensity, q(4));
        assert!(matches!(acts[0].kind, ActionKind::Sync { output: (0, 0), input: (1, 0), .. }));
    }

    #[test]
    fn lonely_output_is_stuck() {
        let (e, r, p) = load("channel x : 4\nchannel a : 1\nrun x!(a)");
        assert!(enabled(&e, &r, &p).unwrap().is_empty());
    }

    #[test]
    fn pairs_count_separately() {
        let (e, r, p) = load("channel x : 1\nrun x!(x) | x!(x) | x?(y) | x?(y) | x?(y)");
        assert_eq!(enabled(&e, &r, &p).unwrap().len(), 6);
    }

    #[test]
    fn deadlock_is_empty() {
        let (e, r, p) = load("run 0");
        let res = simulate(&e, &r, &p, &SimConfig { certify: true, ..SimConfig::default() }).unwrap();
        assert!(res.trace.is_empty());
        assert_eq!(res.total_time, 0.0);
        assert!(res.certified.unwrap().ok);
    }

    #[test]
    fn two_party_run_certifies() {
        let (e, r, p) = load("channel x : 4\nchannel a : 1\nrun x!(a).tau(1) | x?(y).y!(y)");
        let res = simulate(&e, &r, &p, &SimConfig { seed: 7, max_steps: 1, certify: true, ..SimConfig::default() }).unwrap();
        assert_eq!(
            res.trace.events(),
            vec![Event::Sync { channel: crate::worlds::sym("x"), rate: q(4), message: crate::worlds::sym("a") }]
        );
        assert!(res.certified.unwrap().ok);
    }

    #[test]
    fn oscillator_alternates() {
        let (e, r, p) = load("def X = tau(2).Y\ndef Y = tau(5).X\nrun X");
        let res = simulate(&e, &r, &p, &SimConfig { seed: 1, max_steps: 10, certify: true, ..SimConfig::default() }).unwrap();
        let want: Vec<Q> = (0..10).map(|i| if i % 2 == 0 { q(2) } else { q(5) }).collect();
        assert_eq!(res.trace.rates(), want);
        replay(&e, &r, &res.trace).unwrap();
        assert!(res.certified.unwrap().ok);
    }

    #[test]
    fn seeds_reproduce() {
        let (e, r, p) = load("channel c : 3\nrun new(1) d in (c!(d) | c?(y).tau(2) | tau(1).c?(z))");
        let cfg = SimConfig { seed: 99, max_steps: 5, ..SimConfig::default() };
        assert_eq!(simulate(&e, &r, &p, &cfg).unwrap(), simulate(&e, &r, &p, &cfg).unwrap());
    }

    #[test]
    fn stop_time_cuts_the_run() {
        let (e, r, p) = load("def X = tau(1).X\nrun X");
        let res = simulate(&e, &r, &p, &SimConfig { seed: 3, max_steps: 1000, stop_time: Some(5.0), certify: false }).unwrap();
        assert!(res.total_time <= 5.0);
        assert!(res.trace.len() < 1000);
        let sum: f64 = res.delays.iter().sum();
        assert!((sum - res.total_time).abs() < 1e-9);
    }

    #[test]
    fn worlds_follow_delays() {
        let (e, r, p) = load("def X = tau(1).X + tau(3).X\nrun X");
        let res = simulate(&e, &r, &p, &SimConfig { seed: 11, max_steps: 8, ..SimConfig::default() }).unwrap();
        assert_eq!(res.delays.len(), res.trace.len());
        for k in 0..=res.trace.len() {
            assert_eq!(res.trace.world_after(k), crate::worlds::World::Rates(res.trace.rates()[..k].to_vec()));
        }
    }

    #[test]
    fn replications_use_distinct_streams() {
        let (e, r, p) = load("run tau(2) | tau(3)");
        let cfg = SimConfig { seed: 5, max_steps: 1, certify: true, ..SimConfig::default() };
        let runs = replicate(&e, &r, &p, &cfg, 200).unwrap();
        let freq = frequencies(&runs);
        assert_eq!(freq.len(), 2);
        assert!(runs.iter().all(|r| r.certified.as_ref().unwrap().ok));
    }
}
