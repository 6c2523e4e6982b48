//! Execution strategies over the single-colony engine.
//!
//! Time is counted in objective evaluations: a serial evaluation costs one
//! unit, a wave of `w` concurrent evaluations on `p` workers costs
//! `ceil(w / p)` units. Communication and thread overhead are free.
//!
//! * Multi-Start: `p` independent colonies seeded `seed + 0 .. seed + p - 1`
//!   advancing in lockstep.
//! * Multi-Swarm: the same colonies, synchronized every `k` cycles; each
//!   colony restarts from the best source of every colony.
//! * Bee-by-Bee: one colony whose employee and onlooker passes are evaluated
//!   as concurrent waves. Candidates are generated against the pre-wave
//!   state, then greedy updates are applied in bee index order, so results do
//!   not depend on how many threads actually run the wave. Scout and prophet
//!   positions are evaluated by their source's employee in the next wave.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colony::{Colony, ColonyConfig, Proposal};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::trace::{pointwise_min_merge, TimedTrace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExecMode {
    #[default]
    #[serde(rename = "serial")]
    Serial,
    #[serde(rename = "multi-start")]
    MultiStart,
    #[serde(rename = "multi-swarm")]
    MultiSwarm,
    #[serde(rename = "bbb")]
    BeeByBee,
}

impl ExecMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExecMode::Serial => "serial",
            ExecMode::MultiStart => "multi-start",
            ExecMode::MultiSwarm => "multi-swarm",
            ExecMode::BeeByBee => "bbb",
        }
    }
}

impl fmt::Display for ExecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExecMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serial" => Ok(ExecMode::Serial),
            "multi-start" => Ok(ExecMode::MultiStart),
            "multi-swarm" => Ok(ExecMode::MultiSwarm),
            "bbb" => Ok(ExecMode::BeeByBee),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected serial, multi-start, multi-swarm or bbb)"
            ))),
        }
    }
}

/// How a configuration is executed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParallelPlan {
    pub mode: ExecMode,
    /// Virtual workers: colonies for Multi-Start/Multi-Swarm, concurrent
    /// evaluations per wave for Bee-by-Bee.
    pub workers: usize,
    /// Multi-Swarm exchange period in cycles.
    pub exchange_every: u64,
    /// Actual threads; `0` uses the ambient rayon pool. Never affects results.
    pub threads: usize,
}

impl Default for ParallelPlan {
    fn default() -> Self {
        Self {
            mode: ExecMode::Serial,
            workers: 8,
            exchange_every: 20,
            threads: 0,
        }
    }
}

impl ParallelPlan {
    pub fn serial() -> Self {
        Self::default()
    }

    pub fn with_mode(mode: ExecMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self, cfg: &ColonyConfig) -> Result<()> {
        match self.mode {
            ExecMode::Serial => Ok(()),
            ExecMode::MultiStart if self.workers == 0 => {
                Err(Error::Config("multi-start needs at least one colony".into()))
            }
            ExecMode::MultiStart => Ok(()),
            ExecMode::MultiSwarm if self.workers != cfg.sn => Err(Error::Config(format!(
                "multi-swarm needs as many colonies as food sources ({} != {})",
                self.workers, cfg.sn
            ))),
            ExecMode::MultiSwarm if self.exchange_every == 0 => {
                Err(Error::Config("exchange period must be at least one cycle".into()))
            }
            ExecMode::MultiSwarm => Ok(()),
            ExecMode::BeeByBee if self.workers == 0 || self.workers > cfg.sn.min(cfg.on) => {
                Err(Error::Config(format!(
                    "bee-by-bee supports 1..={} workers, got {}",
                    cfg.sn.min(cfg.on),
                    self.workers
                )))
            }
            ExecMode::BeeByBee => Ok(()),
        }
    }
}

/// Result of one run under any execution mode.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// Best-so-far over all colonies on the common clock.
    pub combined: TimedTrace,
    /// One trace per colony (a single entry for serial and Bee-by-Bee).
    pub per_colony: Vec<TimedTrace>,
    pub best_position: Vec<f64>,
    pub best_f: f64,
}

impl RunOutcome {
    fn from_colonies(colonies: Vec<Colony>) -> Self {
        let (best_position, best_f) =
            colonies
                .iter()
                .map(|c| c.best_seen())
                .fold((Vec::new(), f64::INFINITY), |acc, (x, f)| {
                    if f < acc.1 || acc.0.is_empty() {
                        (x.to_vec(), f)
                    } else {
                        acc
                    }
                });
        let per_colony: Vec<TimedTrace> = colonies.into_iter().map(Colony::into_trace).collect();
        let combined = if per_colony.len() == 1 {
            per_colony[0].clone()
        } else {
            pointwise_min_merge(&per_colony)
        };
        Self {
            combined,
            per_colony,
            best_position,
            best_f,
        }
    }
}

/// Runs `cfg` on `obj` under `plan`. For Multi-Start and Multi-Swarm the
/// budget applies to each colony.
pub fn run<O: Objective + ?Sized>(cfg: &ColonyConfig, plan: &ParallelPlan, obj: &O) -> Result<RunOutcome> {
    cfg.validate()?;
    plan.validate(cfg)?;
    let exec = Executor::new(plan.threads)?;
    match plan.mode {
        ExecMode::Serial => {
            let mut c = Colony::new(cfg.clone(), obj)?;
            c.run(obj)?;
            Ok(RunOutcome::from_colonies(vec![c]))
        }
        ExecMode::MultiStart => run_multi_start(cfg, plan.workers, obj, &exec),
        ExecMode::MultiSwarm => run_multi_swarm(cfg, plan.workers, plan.exchange_every, obj, &exec),
        ExecMode::BeeByBee => run_bee_by_bee(cfg, plan.workers, obj, &exec),
    }
}

fn colony_configs(cfg: &ColonyConfig, p: usize) -> Vec<ColonyConfig> {
    (0..p as u64)
        .map(|c| ColonyConfig {
            seed: cfg.seed.wrapping_add(c),
            ..cfg.clone()
        })
        .collect()
}

fn run_multi_start<O: Objective + ?Sized>(
    cfg: &ColonyConfig,
    p: usize,
    obj: &O,
    exec: &Executor,
) -> Result<RunOutcome> {
    let colonies = exec.map(colony_configs(cfg, p), |c| {
        let mut colony = Colony::new(c, obj)?;
        colony.run(obj)?;
        Ok(colony)
    })?;
    Ok(RunOutcome::from_colonies(colonies))
}

fn run_multi_swarm<O: Objective + ?Sized>(
    cfg: &ColonyConfig,
    p: usize,
    k: u64,
    obj: &O,
    exec: &Executor,
) -> Result<RunOutcome> {
    let mut colonies = exec.map(colony_configs(cfg, p), |c| Colony::new(c, obj))?;
    loop {
        colonies = exec.map(colonies, |mut c| {
            c.run_cycles(obj, k)?;
            Ok(c)
        })?;
        if colonies.iter().all(Colony::is_exhausted) {
            break;
        }
        exchange(&mut colonies)?;
    }
    Ok(RunOutcome::from_colonies(colonies))
}

/// Every colony restarts from the best source found by each colony, its own
/// included, in colony order.
pub fn exchange(colonies: &mut [Colony]) -> Result<()> {
    let bests: Vec<(Vec<f64>, f64)> = colonies
        .iter()
        .map(|c| {
            let (x, f) = c.best_seen();
            (x.to_vec(), f)
        })
        .collect();
    for c in colonies.iter_mut() {
        c.replace_sources(bests.clone())?;
    }
    Ok(())
}

fn run_bee_by_bee<O: Objective + ?Sized>(cfg: &ColonyConfig, p: usize, obj: &O, exec: &Executor) -> Result<RunOutcome> {
    let mut colony = Colony::unevaluated(cfg.clone(), obj)?;
    let init: Vec<Proposal> = (0..cfg.sn).map(|j| colony.propose(j)).collect();
    wave(&mut colony, obj, init, p, exec)?;
    colony.memorize();

    'run: while !colony.is_exhausted() {
        colony.begin_cycle();
        let check = cfg.tech.check;

        colony.hive_dance();
        for _ in 0..check {
            let props: Vec<Proposal> = (0..cfg.sn).map(|j| colony.propose(j)).collect();
            if !wave(&mut colony, obj, props, p, exec)? {
                break 'run;
            }
        }

        let assignment = colony.assign_onlookers();
        colony.hive_dance();
        for _ in 0..check {
            let props: Vec<Proposal> = assignment.iter().map(|&j| colony.propose(j)).collect();
            if !wave(&mut colony, obj, props, p, exec)? {
                break 'run;
            }
        }

        if let Some(idx) = colony.memorize() {
            if let Some(guess) = colony.prophet_candidate() {
                colony.defer_prophet(idx, guess);
            }
        }
        colony.update_trials();
        if let Some(j) = colony.scout_target() {
            let x = colony.scout_position();
            colony.defer_scout(j, x);
        }
        colony.finish_cycle();
    }
    Ok(RunOutcome::from_colonies(vec![colony]))
}

/// Evaluates one wave and commits it in proposal order. Noise draws are
/// taken from the colony stream in proposal order before dispatch. Returns
/// `false` when the budget truncated the wave.
fn wave<O: Objective + ?Sized>(
    colony: &mut Colony,
    obj: &O,
    mut proposals: Vec<Proposal>,
    workers: usize,
    exec: &Executor,
) -> Result<bool> {
    let full = proposals.len();
    let n = full.min(colony.remaining() as usize);
    proposals.truncate(n);
    let noisy = obj.noise_fraction() > 0.0;
    let jobs: Vec<(&[f64], f64)> = proposals
        .iter()
        .map(|p| {
            let u = if noisy { colony.rng_mut().symmetric() } else { 0.0 };
            (p.position.as_slice(), u)
        })
        .collect();
    if let Some((x, _)) = jobs.iter().find(|(x, _)| x.len() != obj.dim()) {
        return Err(Error::InvalidArgument(format!(
            "position has {} coordinates, objective expects {}",
            x.len(),
            obj.dim()
        )));
    }
    let values = exec.map(jobs, |(x, u)| Ok(obj.value_with_noise(x, u)))?;
    let t0 = colony.time();
    for (q, (p, f)) in proposals.into_iter().zip(values).enumerate() {
        colony.record(&p.position, f, t0 + (q / workers) as u64 + 1);
        colony.commit(p, f);
    }
    Ok(n == full)
}

/// Runs independent jobs either sequentially, on the ambient rayon pool, or
/// on a dedicated pool. Output order always follows input order.
enum Executor {
    Sequential,
    Ambient,
    Pool(rayon::ThreadPool),
}

impl Executor {
    fn new(threads: usize) -> Result<Self> {
        match threads {
            0 => Ok(Executor::Ambient),
            1 => Ok(Executor::Sequential),
            n => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Executor::Pool)
                .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}"))),
        }
    }

    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Result<Vec<R>>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> Result<R> + Sync + Send,
    {
        match self {
            Executor::Sequential => items.into_iter().map(f).collect(),
            Executor::Ambient => items.into_par_iter().map(f).collect(),
            Executor::Pool(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{BenchmarkSpec, FunctionId};
    use crate::tech::TechnologySet;

    fn cfg(budget: u64, tech: TechnologySet) -> ColonyConfig {
        ColonyConfig {
            budget,
            seed: 42,
            tech,
            ..ColonyConfig::default()
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [
            ExecMode::Serial,
            ExecMode::MultiStart,
            ExecMode::MultiSwarm,
            ExecMode::BeeByBee,
        ] {
            assert_eq!(m.as_str().parse::<ExecMode>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
        assert!("island".parse::<ExecMode>().is_err());
    }

    #[test]
    fn plan_validation() {
        let c = ColonyConfig::default();
        let swarm = ParallelPlan {
            workers: 4,
            ..ParallelPlan::with_mode(ExecMode::MultiSwarm)
        };
        assert!(swarm.validate(&c).is_err());
        let bbb = ParallelPlan {
            workers: 9,
            ..ParallelPlan::with_mode(ExecMode::BeeByBee)
        };
        assert!(bbb.validate(&c).is_err());
        ParallelPlan::with_mode(ExecMode::BeeByBee).validate(&c).unwrap();
        ParallelPlan::with_mode(ExecMode::MultiSwarm).validate(&c).unwrap();
    }

    #[test]
    fn multi_start_single_colony_is_serial() {
        let obj = BenchmarkSpec::new(FunctionId::Levy);
        let c = cfg(400, TechnologySet::asbec());
        let serial = run(&c, &ParallelPlan::serial(), &obj).unwrap();
        let ms = run(
            &c,
            &ParallelPlan {
                workers: 1,
                ..ParallelPlan::with_mode(ExecMode::MultiStart)
            },
            &obj,
        )
        .unwrap();
        assert_eq!(serial.combined, ms.combined);
    }

    #[test]
    fn multi_start_accounting() {
        let obj = BenchmarkSpec::new(FunctionId::Sphere);
        let out = run(
            &cfg(1600, TechnologySet::abc()),
            &ParallelPlan::with_mode(ExecMode::MultiStart),
            &obj,
        )
        .unwrap();
        assert_eq!(out.per_colony.len(), 8);
        let last = out.combined.last().unwrap();
        assert_eq!(last.evals, 12_800);
        assert_eq!(last.time, 1600);
        for (k, p) in out.combined.points().iter().enumerate() {
            for t in &out.per_colony {
                assert!(p.best_f <= t.points()[k].best_f);
            }
        }
        // each colony is the serial run with its own seed
        for (c, t) in out.per_colony.iter().enumerate() {
            let single = run(
                &ColonyConfig {
                    seed: 42 + c as u64,
                    ..cfg(1600, TechnologySet::abc())
                },
                &ParallelPlan::serial(),
                &obj,
            )
            .unwrap();
            assert_eq!(&single.combined, t);
        }
    }

    #[test]
    fn swarm_without_exchange_is_multi_start() {
        let obj = BenchmarkSpec::new(FunctionId::Rastrigin);
        let c = cfg(300, TechnologySet::asbec());
        let ms = run(&c, &ParallelPlan::with_mode(ExecMode::MultiStart), &obj).unwrap();
        let sw = run(&c, &ParallelPlan::with_mode(ExecMode::MultiSwarm), &obj).unwrap();
        assert_eq!(ms.combined, sw.combined);
        assert_eq!(ms.per_colony, sw.per_colony);
    }

    #[test]
    fn exchange_shares_global_best() {
        let obj = BenchmarkSpec::new(FunctionId::Griewank);
        let mut colonies: Vec<Colony> = colony_configs(&cfg(1600, TechnologySet::asbec()), 8)
            .into_iter()
            .map(|c| {
                let mut col = Colony::new(c, &obj).unwrap();
                col.run_cycles(&obj, 3).unwrap();
                col
            })
            .collect();
        let evals: u64 = colonies.iter().map(Colony::evals_used).sum();
        let global = colonies.iter().map(|c| c.best_seen().1).fold(f64::INFINITY, f64::min);
        exchange(&mut colonies).unwrap();
        assert_eq!(evals, colonies.iter().map(Colony::evals_used).sum::<u64>());
        for c in &colonies {
            assert!(c.sources().iter().any(|s| s.f == global));
            assert!(c.sources().iter().all(|s| s.trials == 0 && s.state.is_fresh()));
        }
    }

    #[test]
    fn swarm_exchanges_change_the_run() {
        let obj = BenchmarkSpec::new(FunctionId::Sphere);
        let c = cfg(1600, TechnologySet::abc());
        let ms = run(&c, &ParallelPlan::with_mode(ExecMode::MultiStart), &obj).unwrap();
        let sw = run(&c, &ParallelPlan::with_mode(ExecMode::MultiSwarm), &obj).unwrap();
        let k = 20 * 16 + 8;
        assert_eq!(ms.combined.points()[..k], sw.combined.points()[..k]);
        assert_ne!(ms.combined, sw.combined);
        assert_eq!(sw.combined.total_evals(), 12_800);
    }

    #[test]
    fn bbb_waves_cost_one_unit() {
        let obj = BenchmarkSpec::new(FunctionId::Rosenbrock);
        let out = run(
            &cfg(800, TechnologySet::abc()),
            &ParallelPlan::with_mode(ExecMode::BeeByBee),
            &obj,
        )
        .unwrap();
        let t = &out.combined;
        assert_eq!(t.len(), 800);
        for (k, p) in t.points().iter().enumerate() {
            assert_eq!(p.evals, k as u64 + 1);
            assert_eq!(p.time, k as u64 / 8 + 1);
        }
    }

    #[test]
    fn bbb_single_worker_time_equals_evals() {
        let obj = BenchmarkSpec::new(FunctionId::Perm);
        let plan = ParallelPlan {
            workers: 1,
            ..ParallelPlan::with_mode(ExecMode::BeeByBee)
        };
        let out = run(&cfg(500, TechnologySet::asbec()), &plan, &obj).unwrap();
        assert!(out.combined.points().iter().all(|p| p.time == p.evals));
    }

    #[test]
    fn bbb_independent_of_thread_count() {
        let obj = BenchmarkSpec::new(FunctionId::StyblinskiTangNoise);
        let c = cfg(2000, TechnologySet::asbec());
        let reference = run(
            &c,
            &ParallelPlan {
                threads: 1,
                ..ParallelPlan::with_mode(ExecMode::BeeByBee)
            },
            &obj,
        )
        .unwrap();
        for threads in [0, 2, 3, 8] {
            let plan = ParallelPlan {
                threads,
                ..ParallelPlan::with_mode(ExecMode::BeeByBee)
            };
            assert_eq!(run(&c, &plan, &obj).unwrap(), reference);
        }
    }

    #[test]
    fn bbb_candidates_use_pre_wave_state() {
        // two onlookers on the same source in one wave both move from the
        // pre-wave position
        let obj = BenchmarkSpec::with_dim(FunctionId::Sphere, 2).unwrap();
        let c = ColonyConfig {
            tech: TechnologySet {
                biased: true,
                ..TechnologySet::abc()
            },
            ..cfg(100, TechnologySet::abc())
        };
        let mut colony = Colony::new(c, &obj).unwrap();
        let assignment = colony.assign_onlookers();
        let props: Vec<Proposal> = assignment.iter().map(|&j| colony.propose(j)).collect();
        let (a, b) = (&props[props.len() - 2], &props[props.len() - 1]);
        assert_eq!(a.source, b.source);
        let base = &colony.sources()[a.source].position;
        for p in [a, b] {
            match &p.step {
                crate::colony::Step::Bee(crate::tech::Emitted::Random { base: b0, .. }) => {
                    assert_eq!(b0, base)
                }
                other => panic!("unexpected step {other:?}"),
            }
        }
    }

    #[test]
    fn bbb_accounting_without_scout_or_prophet() {
        let obj = BenchmarkSpec::new(FunctionId::Ackley);
        let tech = TechnologySet {
            prophet_catalyst: None,
            ..TechnologySet::asbec()
        };
        // 8 init + 10 cycles of 2 * check * SN; no scout before cycle 11
        let budget = 8 + 10 * 48;
        let out = run(&cfg(budget, tech), &ParallelPlan::with_mode(ExecMode::BeeByBee), &obj).unwrap();
        assert_eq!(out.combined.total_evals(), budget);
        assert_eq!(out.combined.total_time(), 1 + 10 * 6);
    }
}
