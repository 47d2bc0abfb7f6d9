//! Discrete multi-objective particle swarm producing one test row per round.
//!
//! A particle's position is a candidate row. Two objectives are tracked for
//! every position: open tuples covered (maximised) and forbidden tuples
//! matched (minimised). Positions move by the usual inertia + cognitive +
//! social velocity rule and are snapped back onto the discrete value grid
//! by rounding and clamping.
//!
//! Fitness evaluation is split into `workers` equal contiguous blocks that run
//! on a dedicated thread pool. Every particle draws from its own random
//! stream and block results are merged in block order, so the worker count
//! never changes the outcome of a seeded round.

use std::cmp::Ordering;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{ConstraintSet, Value};
use crate::tuplestore::TupleStore;

/// Objective values of one candidate row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fitness {
    /// Open tuples the row would cover.
    pub coverage: usize,
    /// Forbidden tuples the row matches.
    pub violations: usize,
}

impl Fitness {
    pub const fn new(coverage: usize, violations: usize) -> Self {
        Self {
            coverage,
            violations,
        }
    }

    /// Pareto dominance with coverage maximised and violations minimised.
    pub fn dominates(&self, other: &Fitness) -> bool {
        self.coverage >= other.coverage
            && self.violations <= other.violations
            && (self.coverage > other.coverage || self.violations < other.violations)
    }

    /// Violations first (fewer is better), then coverage (more is better).
    /// `Greater` means `self` is the better row.
    pub fn priority_cmp(&self, other: &Fitness) -> Ordering {
        other
            .violations
            .cmp(&self.violations)
            .then(self.coverage.cmp(&other.coverage))
    }

    pub fn is_better_than(&self, other: &Fitness) -> bool {
        self.priority_cmp(other) == Ordering::Greater
    }
}

/// Free-function form of [`Fitness::dominates`].
pub fn dominates(a: &Fitness, b: &Fitness) -> bool {
    a.dominates(b)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("swarm needs at least one particle")]
    NoParticles,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("{particles} particles cannot be split evenly over {workers} workers")]
    UnevenSplit { particles: usize, workers: usize },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("max_iterations and stagnation_window must be at least 1")]
    ZeroBudget,
}

/// Swarm parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmConfig {
    pub particles: usize,
    pub workers: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub max_iterations: usize,
    /// Iterations without improvement before a round stops.
    pub stagnation_window: usize,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            particles: 80,
            workers: 8,
            inertia: 0.7,
            cognitive: 1.5,
            social: 1.5,
            max_iterations: 500,
            stagnation_window: 30,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.particles == 0 {
            return Err(ConfigError::NoParticles);
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        if !self.particles.is_multiple_of(self.workers) {
            return Err(ConfigError::UnevenSplit {
                particles: self.particles,
                workers: self.workers,
            });
        }
        for (name, value) in [
            ("inertia", self.inertia),
            ("c1", self.cognitive),
            ("c2", self.social),
        ] {
            // negated test also rejects NaN
            if value.is_nan() || value <= 0.0 {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        if self.max_iterations == 0 || self.stagnation_window == 0 {
            return Err(ConfigError::ZeroBudget);
        }
        Ok(())
    }
}

/// Source of uniform draws in `[0, 1)` for the velocity update.
pub trait UnitSource {
    fn unit(&mut self) -> f64;
}

impl<R: RngCore> UnitSource for R {
    fn unit(&mut self) -> f64 {
        self.gen::<f64>()
    }
}

/// Always yields the same draw. For reproducing hand calculations.
#[derive(Debug, Clone, Copy)]
pub struct FixedUnit(pub f64);

impl UnitSource for FixedUnit {
    fn unit(&mut self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<Value>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<Value>,
    pub best_fitness: Fitness,
}

impl Particle {
    /// Particle at rest whose personal best is its starting point.
    pub fn at_rest(position: Vec<Value>, fitness: Fitness) -> Self {
        Self {
            velocity: vec![0.0; position.len()],
            best_position: position.clone(),
            position,
            best_fitness: fitness,
        }
    }

    /// Records `fitness` of the current position, replacing the personal best
    /// if it is strictly better.
    pub fn observe(&mut self, fitness: Fitness) {
        if fitness.is_better_than(&self.best_fitness) {
            self.best_fitness = fitness;
            self.best_position.clone_from(&self.position);
        }
    }
}

/// New velocity, drawing `r1` then `r2` for every dimension and clamping each
/// component to `±(v_i - 1)`.
pub fn update_velocity<U: UnitSource + ?Sized>(
    particle: &Particle,
    attractor: &[Value],
    domains: &[usize],
    cfg: &SwarmConfig,
    units: &mut U,
) -> Vec<f64> {
    (0..domains.len())
        .map(|d| {
            let x = particle.position[d] as f64;
            let r1 = units.unit();
            let r2 = units.unit();
            let raw = cfg.inertia * particle.velocity[d]
                + cfg.cognitive * r1 * (particle.best_position[d] as f64 - x)
                + cfg.social * r2 * (attractor[d] as f64 - x);
            let vmax = (domains[d] - 1) as f64;
            raw.clamp(-vmax, vmax)
        })
        .collect()
}

/// New position: `round(x + v)` clamped into `[0, v_i - 1]`.
pub fn update_position(position: &[Value], velocity: &[f64], domains: &[usize]) -> Vec<Value> {
    position
        .iter()
        .zip(velocity)
        .zip(domains)
        .map(|((&x, &v), &count)| {
            let moved = (x as f64 + v).round();
            moved.clamp(0.0, (count - 1) as f64) as Value
        })
        .collect()
}

/// Both objectives for `position`. Leaves the store untouched.
#[inline]
pub fn evaluate(position: &[Value], store: &TupleStore, cs: &ConstraintSet) -> Fitness {
    Fitness {
        coverage: store.covered_count(position),
        violations: cs.violations(position),
    }
}

/// Single pass over the dimensions. For each one, every alternative value is
/// tried and the best strictly improving one (by [`Fitness::priority_cmp`])
/// is kept before moving on.
pub fn neighbour_refine(
    position: &[Value],
    store: &TupleStore,
    cs: &ConstraintSet,
) -> (Vec<Value>, Fitness) {
    let domains = store.domains();
    let mut current = position.to_vec();
    let mut fitness = evaluate(&current, store, cs);
    let mut trial = current.clone();
    for d in 0..domains.len() {
        let original = current[d];
        let mut best_value = original;
        for value in 0..domains[d] as Value {
            if value == original {
                continue;
            }
            trial[d] = value;
            let candidate = evaluate(&trial, store, cs);
            if candidate.is_better_than(&fitness) {
                fitness = candidate;
                best_value = value;
            }
        }
        current[d] = best_value;
        trial[d] = best_value;
    }
    (current, fitness)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoEntry {
    pub position: Vec<Value>,
    pub fitness: Fitness,
    /// Admission sequence number; lower is older.
    pub seq: u64,
}

/// Bounded archive filtering candidates to zero or round-minimal violations.
#[derive(Debug, Clone)]
pub struct ParetoSet {
    entries: Vec<ParetoEntry>,
    capacity: usize,
    next_seq: u64,
}

impl ParetoSet {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "pareto set capacity must be positive");
        Self {
            entries: Vec::with_capacity(capacity + 1),
            capacity,
            next_seq: 0,
        }
    }

    pub fn entries(&self) -> &[ParetoEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best entry by violations then coverage, oldest first on ties.
    pub fn best(&self) -> Option<&ParetoEntry> {
        self.entries
            .iter()
            .max_by(|a, b| a.fitness.priority_cmp(&b.fitness).then(b.seq.cmp(&a.seq)))
    }

    /// Highest-coverage entry with no violations, oldest first on ties.
    pub fn best_feasible(&self) -> Option<&ParetoEntry> {
        self.entries
            .iter()
            .filter(|e| e.fitness.violations == 0)
            .max_by(|a, b| {
                a.fitness
                    .coverage
                    .cmp(&b.fitness.coverage)
                    .then(b.seq.cmp(&a.seq))
            })
    }

    /// Admits one round of candidates in order. Candidates with violations
    /// above the round minimum (and above zero) are dropped. Returns whether
    /// [`ParetoSet::best`] improved.
    pub fn admit_round<'a, I>(&mut self, candidates: I) -> bool
    where
        I: IntoIterator<Item = (&'a [Value], Fitness)>,
    {
        let candidates: Vec<_> = candidates.into_iter().collect();
        let Some(min_violations) = candidates.iter().map(|(_, f)| f.violations).min() else {
            return false;
        };
        let before = self.best().map(|e| e.fitness);
        for (position, fitness) in candidates {
            if fitness.violations != 0 && fitness.violations != min_violations {
                continue;
            }
            self.entries.push(ParetoEntry {
                position: position.to_vec(),
                fitness,
                seq: self.next_seq,
            });
            self.next_seq += 1;
            if self.entries.len() > self.capacity {
                self.evict();
            }
        }
        match (before, self.best().map(|e| e.fitness)) {
            (None, Some(_)) => true,
            (Some(b), Some(a)) => a.is_better_than(&b),
            _ => false,
        }
    }

    fn evict(&mut self) {
        let dominated = (0..self.entries.len()).find(|&i| {
            self.entries
                .iter()
                .any(|other| other.fitness.dominates(&self.entries[i].fitness))
        });
        let victim = dominated.unwrap_or_else(|| {
            let keep = [
                self.best().map(|e| e.seq),
                self.best_feasible().map(|e| e.seq),
            ];
            self.entries
                .iter()
                .position(|e| !keep.contains(&Some(e.seq)))
                .expect("capacity exceeds the protected entries")
        });
        // entries stay in admission order
        self.entries.remove(victim);
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwarmError {
    #[error("no violation-free row covering an open tuple was found (best seen: {best:?})")]
    NoFeasibleRow { best: Option<Fitness> },
    #[error("swarm round started on a store with nothing left to cover")]
    NothingToCover,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Result of one swarm round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub position: Vec<Value>,
    pub fitness: Fitness,
    pub iterations: usize,
}

/// Mixes `master` with `parts` into an independent 64-bit seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Runs swarm rounds on a fixed-size worker pool.
pub struct SwarmRunner {
    cfg: SwarmConfig,
    pool: rayon::ThreadPool,
}

impl SwarmRunner {
    pub fn new(cfg: SwarmConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .thread_name(|i| format!("swarm-worker-{i}"))
            .build()
            .expect("failed to start swarm worker threads");
        Ok(Self { cfg, pool })
    }

    pub fn config(&self) -> &SwarmConfig {
        &self.cfg
    }

    /// Evaluates all positions; returns per-particle fitness and the index of
    /// each block's best particle, blocks in ascending order.
    fn evaluate_blocks(
        &self,
        positions: &[Vec<Value>],
        store: &TupleStore,
        cs: &ConstraintSet,
    ) -> (Vec<Fitness>, Vec<usize>) {
        let block = positions.len() / self.cfg.workers;
        let per_block: Vec<(Vec<Fitness>, usize)> = self.pool.install(|| {
            positions
                .par_chunks(block)
                .map(|chunk| {
                    let fitness: Vec<Fitness> =
                        chunk.iter().map(|p| evaluate(p, store, cs)).collect();
                    let mut best = 0;
                    for (i, f) in fitness.iter().enumerate().skip(1) {
                        if f.is_better_than(&fitness[best]) {
                            best = i;
                        }
                    }
                    (fitness, best)
                })
                .collect()
        });
        let mut all = Vec::with_capacity(positions.len());
        let mut bests = Vec::with_capacity(per_block.len());
        for (b, (fitness, best)) in per_block.into_iter().enumerate() {
            bests.push(b * block + best);
            all.extend(fitness);
        }
        (all, bests)
    }

    /// One full swarm round on the current store state, seeded by `seed`.
    ///
    /// The returned row never matches a forbidden tuple and covers at least
    /// one open tuple.
    pub fn run_round(
        &self,
        store: &TupleStore,
        cs: &ConstraintSet,
        seed: u64,
    ) -> Result<RoundOutcome, SwarmError> {
        if store.is_empty() {
            return Err(SwarmError::NothingToCover);
        }
        let cfg = &self.cfg;
        let domains = store.domains();
        // no row can cover more than one tuple per bucket
        let ceiling = store.covered_count_ceiling();

        let mut rngs: Vec<ChaCha8Rng> = (0..cfg.particles)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                rng
            })
            .collect();
        let mut positions: Vec<Vec<Value>> = rngs
            .iter_mut()
            .map(|rng| {
                domains
                    .iter()
                    .map(|&count| rng.gen_range(0..count as Value))
                    .collect()
            })
            .collect();

        let (fitness, block_bests) = self.evaluate_blocks(&positions, store, cs);
        let mut particles: Vec<Particle> = positions
            .iter()
            .zip(&fitness)
            .map(|(p, &f)| Particle::at_rest(p.clone(), f))
            .collect();
        let mut pareto = ParetoSet::new(cfg.particles);
        pareto.admit_round(
            block_bests
                .iter()
                .map(|&i| (positions[i].as_slice(), fitness[i])),
        );

        let mut iterations = 0;
        let mut stagnant = 0;
        while iterations < cfg.max_iterations && stagnant < cfg.stagnation_window {
            let leader = pareto.best().expect("non-empty after first admission");
            if leader.fitness.violations == 0 && leader.fitness.coverage == ceiling {
                break;
            }
            let attractor = leader.position.clone();
            for (particle, rng) in particles.iter_mut().zip(rngs.iter_mut()) {
                particle.velocity = update_velocity(particle, &attractor, domains, cfg, rng);
                particle.position =
                    update_position(&particle.position, &particle.velocity, domains);
            }
            for (slot, particle) in positions.iter_mut().zip(&particles) {
                slot.clone_from(&particle.position);
            }
            let (fitness, block_bests) = self.evaluate_blocks(&positions, store, cs);
            for (particle, &f) in particles.iter_mut().zip(&fitness) {
                particle.observe(f);
            }
            let improved = pareto.admit_round(
                block_bests
                    .iter()
                    .map(|&i| (positions[i].as_slice(), fitness[i])),
            );
            stagnant = if improved { 0 } else { stagnant + 1 };
            iterations += 1;
        }

        let winner = match pareto.best_feasible() {
            Some(e) => e,
            None => {
                return Err(SwarmError::NoFeasibleRow {
                    best: pareto.best().map(|e| e.fitness),
                })
            }
        };
        let (position, fitness) = neighbour_refine(&winner.position, store, cs);
        assert_eq!(
            fitness.violations, 0,
            "refinement made the winner infeasible"
        );
        if fitness.coverage == 0 {
            return Err(SwarmError::NoFeasibleRow {
                best: Some(fitness),
            });
        }
        Ok(RoundOutcome {
            position,
            fitness,
            iterations,
        })
    }
}

/// One swarm round with a pool built for this call.
pub fn run_swarm_round(
    store: &TupleStore,
    cs: &ConstraintSet,
    cfg: &SwarmConfig,
) -> Result<RoundOutcome, SwarmError> {
    SwarmRunner::new(cfg.clone())?.run_round(store, cs, cfg.seed)
}
