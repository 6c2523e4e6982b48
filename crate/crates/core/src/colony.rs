//! The single-colony engine: seeded, deterministic, one evaluation at a time.
//!
//! A cycle runs `check` passes of the employee group, assigns onlookers,
//! runs `check` passes of the onlooker group, memorizes the best source
//! (firing the prophet when it improved) and finally admits at most one
//! scout. With every technology off this is the standard ABC.
//!
//! Random draws happen in this order:
//!
//! 1. initialization: `unit()` per coordinate, source by source;
//! 2. each bee move: partner `index(SN - 1)` (shifted past the bee's own
//!    source), then the dimensions (see [`select_dims`]), then one
//!    `symmetric()` per moved dimension;
//! 3. stochastic onlooker assignment: one `unit()` per onlooker;
//! 4. scouts: `unit()` per coordinate, or the smart-scout draws;
//! 5. the objective's own noise draw, taken when a point is evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{fitness, Bounds, Objective};
use crate::rng::RandomStream;
use crate::tech::{
    biased_allocation, prophet_guess, rescale_fitness, select_dims, smart_scout_position, Emitted, ProphetHistory,
    SuperBeeState, TechnologySet,
};
use crate::trace::TimedTrace;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// Every generated coordinate is clipped into the search bounds.
    #[default]
    Clamp,
    /// Bees may leave the initial bounds.
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColonyConfig {
    /// Food sources, one employee each.
    pub sn: usize,
    /// Onlookers.
    pub on: usize,
    /// Cycles without improvement after which a source may be scouted.
    pub limit: u32,
    /// Maximum number of objective evaluations.
    pub budget: u64,
    pub seed: u64,
    pub bounds_mode: BoundsMode,
    #[serde(flatten)]
    pub tech: TechnologySet,
}

impl Default for ColonyConfig {
    fn default() -> Self {
        Self {
            sn: 8,
            on: 8,
            limit: 10,
            budget: 1600,
            seed: 0,
            bounds_mode: BoundsMode::Clamp,
            tech: TechnologySet::abc(),
        }
    }
}

impl ColonyConfig {
    pub fn with_tech(tech: TechnologySet) -> Self {
        Self {
            tech,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sn < 2 {
            return Err(Error::Config(format!(
                "at least 2 food sources are needed, got {}",
                self.sn
            )));
        }
        if self.on == 0 {
            return Err(Error::Config("at least one onlooker is needed".into()));
        }
        if self.limit == 0 {
            return Err(Error::Config("limit must be positive".into()));
        }
        if self.budget < self.sn as u64 {
            return Err(Error::Config(format!(
                "budget {} cannot cover the {} initial evaluations",
                self.budget, self.sn
            )));
        }
        self.tech.validate()
    }

    fn clamp_bounds<'a>(&self, bounds: &'a Bounds) -> Option<&'a Bounds> {
        match self.bounds_mode {
            BoundsMode::Clamp => Some(bounds),
            BoundsMode::Free => None,
        }
    }
}

/// Work deferred to the source's next employee visit: evaluating a fresh
/// position (initial sampling or a scout), or trying a prophet guess.
#[derive(Clone, Debug, PartialEq)]
pub enum Pending {
    Init,
    Scout,
    /// The source keeps its position until the guess proves better.
    Prophet(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoodSource {
    pub position: Vec<f64>,
    pub f: f64,
    pub fitness: f64,
    /// Cycles without improvement.
    pub trials: u32,
    pub state: SuperBeeState,
    pub(crate) improved: bool,
    pub(crate) pending: Option<Pending>,
}

impl FoodSource {
    pub fn new(position: Vec<f64>, f: f64) -> Self {
        Self {
            position,
            f,
            fitness: fitness(f),
            trials: 0,
            state: SuperBeeState::Fresh,
            improved: false,
            pending: None,
        }
    }

    fn reset_to(&mut self, position: Vec<f64>, f: f64) {
        self.position = position;
        self.f = f;
        self.fitness = fitness(f);
        self.trials = 0;
        self.state = SuperBeeState::Fresh;
    }

    /// Whether the source has no valid objective value yet.
    pub fn is_pending(&self) -> bool {
        matches!(self.pending, Some(Pending::Init | Pending::Scout))
    }
}

/// Greedy selection: the candidate replaces the source only if strictly
/// better. Returns whether it did.
pub fn greedy_update(source: &mut FoodSource, position: &[f64], f: f64) -> bool {
    if f < source.f {
        source.reset_to(position.to_vec(), f);
        source.improved = true;
        true
    } else {
        false
    }
}

/// A candidate position and how it was produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub source: usize,
    pub position: Vec<f64>,
    pub step: Step,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Bee(Emitted),
    Pending(Pending),
}

/// One colony with its food sources, best memory, optimal path and trace.
#[derive(Clone, Debug)]
pub struct Colony {
    cfg: ColonyConfig,
    bounds: Bounds,
    sources: Vec<FoodSource>,
    best: (Vec<f64>, f64),
    best_seen: (Vec<f64>, f64),
    history: ProphetHistory,
    rng: RandomStream,
    evals: u64,
    time: u64,
    cycles: u64,
    trace: TimedTrace,
}

impl Colony {
    /// Samples and evaluates the initial food sources.
    pub fn new<O: Objective + ?Sized>(cfg: ColonyConfig, obj: &O) -> Result<Self> {
        let mut colony = Self::unevaluated(cfg, obj)?;
        for j in 0..colony.cfg.sn {
            let p = colony.propose(j);
            let f = obj.evaluate(&p.position, &mut colony.rng)?;
            let t = colony.time + 1;
            colony.record(&p.position, f, t);
            colony.commit(p, f);
        }
        colony.memorize();
        Ok(colony)
    }

    /// Colony whose initial positions are sampled but not yet evaluated.
    pub(crate) fn unevaluated<O: Objective + ?Sized>(cfg: ColonyConfig, obj: &O) -> Result<Self> {
        cfg.validate()?;
        let bounds = obj.bounds().clone();
        let mut rng = RandomStream::new(cfg.seed);
        let sources = (0..cfg.sn)
            .map(|_| {
                let mut s = FoodSource::new(bounds.sample(&mut rng), f64::INFINITY);
                s.pending = Some(Pending::Init);
                s
            })
            .collect();
        Ok(Self {
            history: ProphetHistory::new(cfg.tech.prophet_memory),
            trace: TimedTrace::with_capacity(cfg.budget.min(1 << 20) as usize),
            bounds,
            sources,
            best: (Vec::new(), f64::INFINITY),
            best_seen: (Vec::new(), f64::INFINITY),
            rng,
            evals: 0,
            time: 0,
            cycles: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &ColonyConfig {
        &self.cfg
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn sources(&self) -> &[FoodSource] {
        &self.sources
    }

    /// Memorized best food source.
    pub fn best(&self) -> (&[f64], f64) {
        (&self.best.0, self.best.1)
    }

    /// Best point this colony has evaluated.
    pub fn best_seen(&self) -> (&[f64], f64) {
        (&self.best_seen.0, self.best_seen.1)
    }

    pub fn history(&self) -> &ProphetHistory {
        &self.history
    }

    pub fn evals_used(&self) -> u64 {
        self.evals
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn trace(&self) -> &TimedTrace {
        &self.trace
    }

    pub fn into_trace(self) -> TimedTrace {
        self.trace
    }

    pub fn remaining(&self) -> u64 {
        self.cfg.budget - self.evals
    }

    pub fn is_exhausted(&self) -> bool {
        self.evals >= self.cfg.budget
    }

    pub(crate) fn rng_mut(&mut self) -> &mut RandomStream {
        &mut self.rng
    }

    /// Runs cycles until the budget is spent.
    pub fn run<O: Objective + ?Sized>(&mut self, obj: &O) -> Result<()> {
        while self.run_cycle(obj)? {}
        Ok(())
    }

    /// Runs up to `n` cycles; returns how many completed.
    pub fn run_cycles<O: Objective + ?Sized>(&mut self, obj: &O, n: u64) -> Result<u64> {
        for done in 0..n {
            if !self.run_cycle(obj)? {
                return Ok(done);
            }
        }
        Ok(n)
    }

    /// One optimization cycle. Returns `false` if the budget ran out before
    /// the cycle completed (or before it started).
    pub fn run_cycle<O: Objective + ?Sized>(&mut self, obj: &O) -> Result<bool> {
        if self.is_exhausted() {
            return Ok(false);
        }
        self.begin_cycle();
        let check = self.cfg.tech.check;

        self.hive_dance();
        for _ in 0..check {
            for j in 0..self.cfg.sn {
                if !self.bee_step(obj, j)? {
                    return Ok(false);
                }
            }
        }

        let assignment = self.assign_onlookers();
        self.hive_dance();
        for _ in 0..check {
            for &j in &assignment {
                if !self.bee_step(obj, j)? {
                    return Ok(false);
                }
            }
        }

        if let Some(idx) = self.memorize() {
            if let Some(guess) = self.prophet_candidate() {
                match self.evaluate(obj, &guess)? {
                    Some(f) => self.apply_prophet(idx, guess, f),
                    None => return Ok(false),
                }
            }
        }

        self.update_trials();
        if let Some(j) = self.scout_target() {
            let x = self.scout_position();
            match self.evaluate(obj, &x)? {
                Some(f) => self.sources[j].reset_to(x, f),
                None => return Ok(false),
            }
        }
        self.cycles += 1;
        Ok(true)
    }

    pub(crate) fn begin_cycle(&mut self) {
        for s in &mut self.sources {
            s.improved = false;
        }
    }

    /// Bees forget their staged moves when they return to the hive.
    pub(crate) fn hive_dance(&mut self) {
        for s in &mut self.sources {
            s.state = SuperBeeState::Fresh;
        }
    }

    pub(crate) fn finish_cycle(&mut self) {
        self.cycles += 1;
    }

    fn bee_step<O: Objective + ?Sized>(&mut self, obj: &O, j: usize) -> Result<bool> {
        let p = self.propose(j);
        match self.evaluate(obj, &p.position)? {
            Some(f) => {
                self.commit(p, f);
                Ok(true)
            }
            None => Ok(false),
        }
    }

    /// Evaluates `x` as the next sequential evaluation, or `None` if the
    /// budget is spent.
    fn evaluate<O: Objective + ?Sized>(&mut self, obj: &O, x: &[f64]) -> Result<Option<f64>> {
        if self.is_exhausted() {
            return Ok(None);
        }
        let f = obj.evaluate(x, &mut self.rng)?;
        let t = self.time + 1;
        self.record(x, f, t);
        Ok(Some(f))
    }

    /// Accounts one evaluation finishing at time `time`.
    pub(crate) fn record(&mut self, x: &[f64], f: f64, time: u64) {
        self.evals += 1;
        self.time = self.time.max(time);
        if f < self.best_seen.1 || self.best_seen.0.is_empty() {
            self.best_seen = (x.to_vec(), f);
        }
        self.trace.push(self.evals, time, f);
    }

    /// Candidate for the bee visiting source `j`.
    pub(crate) fn propose(&mut self, j: usize) -> Proposal {
        if let Some(kind) = self.sources[j].pending.take() {
            let position = match &kind {
                Pending::Prophet(guess) => guess.clone(),
                Pending::Init | Pending::Scout => self.sources[j].position.clone(),
            };
            return Proposal {
                source: j,
                position,
                step: Step::Pending(kind),
            };
        }
        if self.cfg.tech.super_bee() {
            let clamp = self.cfg.clamp_bounds(&self.bounds);
            if let Some((position, emitted)) = self.sources[j].state.staged_candidate(clamp) {
                return Proposal {
                    source: j,
                    position,
                    step: Step::Bee(emitted),
                };
            }
        }
        let (position, dims) = self.standard_move(j);
        let src = &self.sources[j];
        Proposal {
            source: j,
            position,
            step: Step::Bee(Emitted::Random {
                base: src.position.clone(),
                f_base: src.f,
                dims,
            }),
        }
    }

    /// Moves source `j` towards or away from a random partner on the
    /// selected dimensions.
    pub fn standard_move(&mut self, j: usize) -> (Vec<f64>, Vec<usize>) {
        let sn = self.sources.len();
        let mut k = self.rng.index(sn - 1);
        if k >= j {
            k += 1;
        }
        let dims = select_dims(self.bounds.dim(), self.cfg.tech.multi_param, &mut self.rng);
        let mut x = self.sources[j].position.clone();
        let partner = &self.sources[k].position;
        let clamp = self.cfg.bounds_mode == BoundsMode::Clamp;
        for &i in &dims {
            let u = self.rng.symmetric();
            let v = x[i] + u * (x[i] - partner[i]);
            x[i] = if clamp { self.bounds.clamp(i, v) } else { v };
        }
        (x, dims)
    }

    /// Applies the outcome of an evaluated proposal.
    pub(crate) fn commit(&mut self, p: Proposal, f: f64) {
        match p.step {
            Step::Pending(Pending::Prophet(_)) => self.apply_prophet(p.source, p.position, f),
            Step::Pending(Pending::Init | Pending::Scout) => {
                let src = &mut self.sources[p.source];
                src.f = f;
                src.fitness = fitness(f);
            }
            Step::Bee(emitted) => {
                let src = &mut self.sources[p.source];
                let improved = greedy_update(src, &p.position, f);
                src.state = SuperBeeState::after_evaluation(emitted, &p.position, f, improved, &self.cfg.tech);
            }
        }
    }

    /// Onlooker-to-source assignment, strictly biased or by roulette wheel.
    pub(crate) fn assign_onlookers(&mut self) -> Vec<usize> {
        let fits: Vec<f64> = self.sources.iter().map(|s| s.fitness).collect();
        if self.cfg.tech.biased {
            biased_allocation(&rescale_fitness(&fits), self.cfg.on).assignment()
        } else {
            roulette_assignment(&fits, self.cfg.on, &mut self.rng)
        }
    }

    /// Memorizes the best food source if it beats the memory. Returns its
    /// index when it did.
    pub(crate) fn memorize(&mut self) -> Option<usize> {
        let mut idx = None;
        for (j, s) in self.sources.iter().enumerate() {
            if !s.is_pending() && idx.is_none_or(|b: usize| s.f < self.sources[b].f) {
                idx = Some(j);
            }
        }
        let idx = idx?;
        let s = &self.sources[idx];
        if s.f < self.best.1 || self.best.0.is_empty() {
            self.best = (s.position.clone(), s.f);
            self.history.push(s.position.clone(), s.f);
            Some(idx)
        } else {
            None
        }
    }

    pub(crate) fn prophet_candidate(&self) -> Option<Vec<f64>> {
        let catalyst = self.cfg.tech.prophet_catalyst?;
        let mut guess = prophet_guess(&self.history, catalyst)?;
        if self.cfg.bounds_mode == BoundsMode::Clamp {
            for (i, v) in guess.iter_mut().enumerate() {
                *v = self.bounds.clamp(i, *v);
            }
        }
        Some(guess)
    }

    /// Greedy update of source `idx` with an evaluated guess; an improving
    /// guess also extends the best memory and the optimal path.
    fn apply_prophet(&mut self, idx: usize, guess: Vec<f64>, f: f64) {
        if f < self.best.1 {
            self.best = (guess.clone(), f);
            self.history.push(guess.clone(), f);
        }
        greedy_update(&mut self.sources[idx], &guess, f);
    }

    /// Schedules a prophet guess for source `idx`'s next employee visit.
    pub(crate) fn defer_prophet(&mut self, idx: usize, guess: Vec<f64>) {
        self.sources[idx].pending = Some(Pending::Prophet(guess));
    }

    pub(crate) fn update_trials(&mut self) {
        for s in &mut self.sources {
            if !s.improved {
                s.trials += 1;
            }
        }
    }

    /// The source to abandon this cycle: most trials above `limit`, lowest
    /// index on ties.
    pub fn scout_target(&self) -> Option<usize> {
        scout_target(&self.sources, self.cfg.limit)
    }

    pub(crate) fn scout_position(&mut self) -> Vec<f64> {
        if self.cfg.tech.smart_scout {
            let refs: Vec<&[f64]> = self.sources.iter().map(|s| s.position.as_slice()).collect();
            smart_scout_position(
                &refs,
                &self.bounds,
                self.cfg.bounds_mode == BoundsMode::Clamp,
                &mut self.rng,
            )
        } else {
            self.bounds.sample(&mut self.rng)
        }
    }

    pub(crate) fn defer_scout(&mut self, j: usize, x: Vec<f64>) {
        let src = &mut self.sources[j];
        src.reset_to(x, f64::INFINITY);
        src.pending = Some(Pending::Scout);
    }

    /// Replaces every food source (used by swarm exchanges). Trials and
    /// super-bee stages are reset; no evaluation is consumed.
    pub fn replace_sources(&mut self, sources: Vec<(Vec<f64>, f64)>) -> Result<()> {
        if sources.len() != self.cfg.sn {
            return Err(Error::InvalidArgument(format!(
                "expected {} sources, got {}",
                self.cfg.sn,
                sources.len()
            )));
        }
        self.sources = sources.into_iter().map(|(x, f)| FoodSource::new(x, f)).collect();
        Ok(())
    }
}

/// Roulette-wheel assignment: onlooker `o` draws `r = unit() * total` and
/// takes the first source whose cumulative fitness exceeds `r`.
pub fn roulette_assignment(fits: &[f64], on: usize, rng: &mut RandomStream) -> Vec<usize> {
    let total: f64 = fits.iter().sum();
    (0..on)
        .map(|_| {
            let r = rng.unit() * total;
            let mut acc = 0.0;
            for (j, f) in fits.iter().enumerate() {
                acc += f;
                if r < acc {
                    return j;
                }
            }
            fits.len() - 1
        })
        .collect()
}

/// Most-stagnant source past `limit`, lowest index on ties.
pub fn scout_target(sources: &[FoodSource], limit: u32) -> Option<usize> {
    let mut target: Option<usize> = None;
    for (j, s) in sources.iter().enumerate() {
        if s.trials > limit && target.is_none_or(|t| s.trials > sources[t].trials) {
            target = Some(j);
        }
    }
    target
}
