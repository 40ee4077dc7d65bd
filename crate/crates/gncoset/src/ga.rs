//! Genetic search over damping schedules.
//!
//! A candidate is a schedule of damping factors; its fitness is the Es/N0
//! needed to reach a target BLER, so lower is better. The population is kept
//! sorted by fitness and evolves steady-state: each generation selects two
//! parents by exponential rank, crosses them uniformly, mutates with
//! Gaussian noise, evaluates the child once and inserts it elitistically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{snr_at_target_bler, StopRule};
use crate::code::CodeSpec;
use crate::damping::DampingSchedule;
use crate::decoder::{DecoderConfig, Graph};
use crate::error::{Error, Result};

/// Search hyperparameters. The defaults are the tuned operating point:
/// population 32, initialization support 2.0, rank decay 0.01, per-factor
/// mutation probability 0.07, mutation deviation 0.3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    /// Free factors initialize uniformly on [0, v_sup).
    pub v_sup: f64,
    /// Rank-selection decay: parent at rank i has weight exp(-lambda * i).
    pub lambda: f64,
    pub p_mutate: f64,
    pub sigma_mutate: f64,
    /// Iterations covered by every schedule in the run.
    pub t_max: usize,
    pub max_generations: usize,
    /// Clamp mutated factors at zero (on by default; turning it off lets
    /// mutation explore negative factors, which cannot be written to disk).
    pub clip_negative: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 32,
            v_sup: 2.0,
            lambda: 0.01,
            p_mutate: 0.07,
            sigma_mutate: 0.3,
            t_max: 8,
            max_generations: 100,
            clip_negative: true,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidArgument("population must be >= 2".into()));
        }
        if !(self.v_sup > 0.0) {
            return Err(Error::InvalidArgument("v_sup must be > 0".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidArgument("lambda must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.p_mutate) {
            return Err(Error::InvalidArgument("p_mutate must be in [0, 1]".into()));
        }
        if !(self.sigma_mutate >= 0.0) {
            return Err(Error::InvalidArgument("sigma_mutate must be >= 0".into()));
        }
        if self.t_max == 0 {
            return Err(Error::InvalidArgument("t_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// Positions in a schedule the search may vary: everything except the
/// iteration-1 factors and beta at iteration 2 (those stay zero because the
/// corresponding feedback terms do not exist yet).
fn is_free(factor: usize, t: usize) -> bool {
    match factor {
        0 | 2 => t >= 2,     // alpha, gamma
        1 => t >= 3,         // beta
        _ => unreachable!(),
    }
}

fn map_free(
    t_max: usize,
    mut f: impl FnMut(usize, usize) -> f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut out = [vec![0.0; t_max], vec![0.0; t_max], vec![0.0; t_max]];
    for (factor, vals) in out.iter_mut().enumerate() {
        for (idx, v) in vals.iter_mut().enumerate() {
            if is_free(factor, idx + 1) {
                *v = f(factor, idx + 1);
            }
        }
    }
    let [a, b, g] = out;
    (a, b, g)
}

fn build_schedule(cfg: &GaConfig, a: Vec<f64>, b: Vec<f64>, g: Vec<f64>) -> Result<DampingSchedule> {
    if cfg.clip_negative {
        DampingSchedule::new(a, b, g)
    } else {
        Ok(DampingSchedule::new_unclipped(a, b, g))
    }
}

/// Anything that can score a schedule; lower scores are better.
pub trait FitnessOracle {
    fn evaluate(&self, sched: &DampingSchedule) -> Result<f64>;
}

/// The real objective: the Es/N0 (dB) at which the decoder reaches
/// `target_bler`, measured by bisection with common random numbers. A
/// schedule that cannot reach the target inside the interval scores the far
/// endpoint, which ranks it behind every bracketed one.
#[derive(Debug, Clone)]
pub struct SnrFitness {
    pub spec: CodeSpec,
    pub target_bler: f64,
    pub lo_db: f64,
    pub hi_db: f64,
    pub tol_db: f64,
    pub stop: StopRule,
    pub seed: u64,
    pub workers: usize,
}

impl FitnessOracle for SnrFitness {
    fn evaluate(&self, sched: &DampingSchedule) -> Result<f64> {
        let cfg = DecoderConfig {
            t_max: sched.t_max(),
            start_graph: Graph::Rows,
            // lossless: a stable frame never reactivates, so truncating
            // idle iterations cannot change the decision
            early_exit: true,
        };
        let r = snr_at_target_bler(
            &self.spec,
            sched,
            cfg,
            self.target_bler,
            self.lo_db,
            self.hi_db,
            self.tol_db,
            &self.stop,
            self.seed,
            self.workers,
        )?;
        Ok(r.snr_db)
    }
}

/// An evaluated or not-yet-evaluated schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub schedule: DampingSchedule,
    pub fitness: Option<f64>,
}

/// Fixed-capacity pool of evaluated candidates, sorted best (lowest
/// fitness) first.
#[derive(Debug, Clone)]
pub struct Population {
    members: Vec<Candidate>,
    capacity: usize,
}

impl Population {
    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn best(&self) -> &Candidate {
        &self.members[0]
    }

    pub fn best_fitness(&self) -> f64 {
        self.members[0].fitness.unwrap()
    }

    pub fn median_fitness(&self) -> f64 {
        let n = self.members.len();
        let f = |i: usize| self.members[i].fitness.unwrap();
        if n % 2 == 1 {
            f(n / 2)
        } else {
            0.5 * (f(n / 2 - 1) + f(n / 2))
        }
    }

    /// Inserts an evaluated candidate at its rank; when the pool is over
    /// capacity the worst member is dropped, so the best survives always.
    pub fn insert(&mut self, candidate: Candidate) -> Result<()> {
        let fit = candidate
            .fitness
            .ok_or_else(|| Error::InvalidArgument("candidate not evaluated".into()))?;
        if !fit.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fitness must be finite, got {fit}"
            )));
        }
        let pos = self
            .members
            .partition_point(|c| c.fitness.unwrap().total_cmp(&fit).is_le());
        self.members.insert(pos, candidate);
        while self.members.len() > self.capacity {
            self.members.pop();
        }
        Ok(())
    }
}

/// Draws a fresh schedule: free factors uniform on [0, v_sup).
pub fn random_schedule(cfg: &GaConfig, rng: &mut impl Rng) -> DampingSchedule {
    let (a, b, g) = map_free(cfg.t_max, |_, _| rng.random_range(0.0..cfg.v_sup));
    DampingSchedule::new(a, b, g).expect("uniform draws satisfy schedule constraints")
}

/// Builds and evaluates the initial pool.
pub fn init_population(
    cfg: &GaConfig,
    oracle: &dyn FitnessOracle,
    rng: &mut impl Rng,
) -> Result<Population> {
    cfg.validate()?;
    let mut pop = Population {
        members: Vec::with_capacity(cfg.population),
        capacity: cfg.population,
    };
    for _ in 0..cfg.population {
        let schedule = random_schedule(cfg, rng);
        let fitness = Some(oracle.evaluate(&schedule)?);
        pop.insert(Candidate { schedule, fitness })?;
    }
    Ok(pop)
}

/// Exponential rank selection: rank i is chosen with probability
/// proportional to exp(-lambda * i).
pub fn select_parent_index(pop: &Population, lambda: f64, rng: &mut impl Rng) -> usize {
    let n = pop.members.len();
    let weights: Vec<f64> = (0..n).map(|i| (-lambda * i as f64).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u < 0.0 {
            return i;
        }
    }
    n - 1
}

pub fn select_parent<'a>(pop: &'a Population, lambda: f64, rng: &mut impl Rng) -> &'a Candidate {
    &pop.members[select_parent_index(pop, lambda, rng)]
}

fn select_distinct_parents(pop: &Population, lambda: f64, rng: &mut impl Rng) -> (usize, usize) {
    let a = select_parent_index(pop, lambda, rng);
    for _ in 0..100 {
        let b = select_parent_index(pop, lambda, rng);
        if b != a {
            return (a, b);
        }
    }
    (a, (a + 1) % pop.members.len())
}

/// Uniform crossover: each free factor comes from either parent with equal
/// probability.
pub fn crossover(
    a: &DampingSchedule,
    b: &DampingSchedule,
    cfg: &GaConfig,
    rng: &mut impl Rng,
) -> Result<DampingSchedule> {
    if a.t_max() != cfg.t_max || b.t_max() != cfg.t_max {
        return Err(Error::InvalidArgument(
            "parent schedule length differs from t_max".into(),
        ));
    }
    let (av, bv, gv) = map_free(cfg.t_max, |factor, t| {
        let src = if rng.random::<bool>() { a } else { b };
        match factor {
            0 => src.alpha(t),
            1 => src.beta(t),
            _ => src.gamma(t),
        }
    });
    build_schedule(cfg, av, bv, gv)
}

/// Gaussian mutation: each free factor is perturbed with probability
/// p_mutate by N(0, sigma_mutate^2), clamped at zero unless disabled.
pub fn mutate(
    sched: &DampingSchedule,
    cfg: &GaConfig,
    rng: &mut impl Rng,
) -> Result<DampingSchedule> {
    if sched.t_max() != cfg.t_max {
        return Err(Error::InvalidArgument(
            "schedule length differs from t_max".into(),
        ));
    }
    let noise = Normal::new(0.0, cfg.sigma_mutate)
        .map_err(|e| Error::InvalidArgument(format!("sigma_mutate: {e}")))?;
    let (av, bv, gv) = map_free(cfg.t_max, |factor, t| {
        let v = match factor {
            0 => sched.alpha(t),
            1 => sched.beta(t),
            _ => sched.gamma(t),
        };
        if rng.random_bool(cfg.p_mutate) {
            let m = v + noise.sample(rng);
            if cfg.clip_negative {
                m.max(0.0)
            } else {
                m
            }
        } else {
            v
        }
    });
    build_schedule(cfg, av, bv, gv)
}

/// Snapshot of the pool after a generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStat {
    pub generation: usize,
    pub best_fitness: f64,
    pub median_fitness: f64,
    /// Oracle evaluations spent so far, including initialization.
    pub evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub best_schedule: DampingSchedule,
    pub best_fitness: f64,
    /// One entry per generation, starting at generation 0 (the evaluated
    /// initial pool).
    pub trajectory: Vec<GenerationStat>,
}

/// Runs the full search. Deterministic for a fixed seed and oracle.
pub fn train(cfg: &GaConfig, oracle: &dyn FitnessOracle, seed: u64) -> Result<TrainResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pop = init_population(cfg, oracle, &mut rng)?;
    let mut evaluations = cfg.population as u64;
    let mut trajectory = vec![GenerationStat {
        generation: 0,
        best_fitness: pop.best_fitness(),
        median_fitness: pop.median_fitness(),
        evaluations,
    }];
    for generation in 1..=cfg.max_generations {
        let (ia, ib) = select_distinct_parents(&pop, cfg.lambda, &mut rng);
        let child = crossover(
            &pop.members[ia].schedule,
            &pop.members[ib].schedule,
            cfg,
            &mut rng,
        )?;
        let child = mutate(&child, cfg, &mut rng)?;
        let fitness = Some(oracle.evaluate(&child)?);
        evaluations += 1;
        pop.insert(Candidate {
            schedule: child,
            fitness,
        })?;
        trajectory.push(GenerationStat {
            generation,
            best_fitness: pop.best_fitness(),
            median_fitness: pop.median_fitness(),
            evaluations,
        });
    }
    Ok(TrainResult {
        best_schedule: pop.best().schedule.clone(),
        best_fitness: pop.best_fitness(),
        trajectory,
    })
}
