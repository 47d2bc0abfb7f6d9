//! One-row-at-a-time suite construction and repeated benchmark runs.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{self, CorpusError};
use crate::model::{SystemModel, TestCase, TestSuite};
use crate::mopso::{derive_seed, ConfigError, SwarmConfig, SwarmError, SwarmRunner};
use crate::tuplestore::{StoreError, TupleStore, ValueTuple};
use crate::verify;

/// Knobs of the outer loop that are not swarm parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    /// Consecutive rounds without an acceptable row before giving up.
    pub max_failed_rounds: usize,
    pub timeout: Option<Duration>,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            max_failed_rounds: 3,
            timeout: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationReport {
    pub suite: TestSuite,
    pub rows: usize,
    /// Swarm rounds run, including rejected ones.
    pub rounds: usize,
    pub wall_time: Duration,
    pub initial_tuples: usize,
    pub pruned_tuples: usize,
    pub covered_tuples: usize,
    pub seed: u64,
}

/// Tuples left open when generation stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenTuples(pub Vec<ValueTuple>);

impl fmt::Display for OpenTuples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 8;
        for (i, t) in self.0.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({t})")?;
        }
        if self.0.len() > SHOWN {
            write!(f, ", ... {} more", self.0.len() - SHOWN)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid swarm configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{} tuples look uncoverable under the constraints: {open}", .open.0.len())]
    StuckTuples {
        open: OpenTuples,
        partial: Box<GenerationReport>,
    },
    #[error("time budget exhausted with {} tuples open", .open.0.len())]
    Timeout {
        open: OpenTuples,
        partial: Box<GenerationReport>,
    },
}

impl GenerateError {
    /// The suite built before the error, if any.
    pub fn partial(&self) -> Option<&GenerationReport> {
        match self {
            GenerateError::StuckTuples { partial, .. } | GenerateError::Timeout { partial, .. } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

/// Builds a suite for `model` with default options.
pub fn generate(model: &SystemModel, cfg: &SwarmConfig) -> Result<GenerationReport, GenerateError> {
    generate_with(model, cfg, &GenerateOptions::default())
}

/// Builds a suite covering every tuple of `model` that does not contain a
/// forbidden tuple, one swarm-selected row at a time.
pub fn generate_with(
    model: &SystemModel,
    cfg: &SwarmConfig,
    options: &GenerateOptions,
) -> Result<GenerationReport, GenerateError> {
    let started = Instant::now();
    let runner = SwarmRunner::new(cfg.clone())?;
    let constraints = model.constraints();
    let mut store = TupleStore::build(model)?;
    store.prune_constrained(constraints);
    let valid = store.uncovered();

    let mut suite = TestSuite::new(model);
    let mut rounds = 0usize;
    let mut failures = 0usize;

    let report = |suite: TestSuite, rounds: usize, store: &TupleStore| GenerationReport {
        rows: suite.len(),
        suite,
        rounds,
        wall_time: started.elapsed(),
        initial_tuples: store.initial_tuples(),
        pruned_tuples: store.pruned_tuples(),
        covered_tuples: valid - store.uncovered(),
        seed: cfg.seed,
    };

    while !store.is_empty() {
        if options
            .timeout
            .is_some_and(|limit| started.elapsed() >= limit)
        {
            return Err(GenerateError::Timeout {
                open: OpenTuples(store.open_tuples()),
                partial: Box::new(report(suite, rounds, &store)),
            });
        }
        let seed = derive_seed(cfg.seed, &[suite.len() as u64, failures as u64]);
        rounds += 1;
        match runner.run_round(&store, constraints, seed) {
            Ok(outcome) => {
                let before = store.uncovered();
                let newly = store.mark_covered(&outcome.position);
                assert_eq!(newly, outcome.fitness.coverage);
                assert!(store.uncovered() < before, "accepted row made no progress");
                let row = TestCase::new(model, outcome.position).expect("swarm rows stay in range");
                suite.push(row);
                failures = 0;
            }
            Err(SwarmError::NoFeasibleRow { .. }) => {
                failures += 1;
                if failures >= options.max_failed_rounds {
                    return Err(GenerateError::StuckTuples {
                        open: OpenTuples(store.open_tuples()),
                        partial: Box::new(report(suite, rounds, &store)),
                    });
                }
            }
            Err(SwarmError::Config(e)) => return Err(e.into()),
            Err(SwarmError::NothingToCover) => unreachable!("loop checks emptiness"),
        }
    }
    Ok(report(suite, rounds, &store))
}

/// One verified benchmark repetition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRun {
    pub name: String,
    pub rep: usize,
    pub seed: u64,
    pub size: usize,
    pub millis: u128,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkStats {
    pub name: String,
    pub runs: Vec<BenchRun>,
    pub best_size: usize,
    pub mean_size: f64,
    pub mean_millis: f64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("repetition {rep}: {source}")]
    Generate {
        rep: usize,
        #[source]
        source: GenerateError,
    },
    #[error("at least one repetition is required")]
    NoRepetitions,
}

/// Runs `generate` `repetitions` times on a corpus model, seeding repetition
/// `i` with `derive_seed(cfg.seed, [i])`, and checks every suite.
pub fn run_benchmark(
    name: &str,
    cfg: &SwarmConfig,
    repetitions: usize,
) -> Result<BenchmarkStats, BenchError> {
    let model = corpus::load(name)?;
    run_benchmark_on(name, &model, cfg, repetitions, |_| {})
}

/// [`run_benchmark`] on an explicit model, reporting each run as it finishes.
pub fn run_benchmark_on(
    name: &str,
    model: &SystemModel,
    cfg: &SwarmConfig,
    repetitions: usize,
    mut on_run: impl FnMut(&BenchRun),
) -> Result<BenchmarkStats, BenchError> {
    if repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let mut runs = Vec::with_capacity(repetitions);
    for rep in 0..repetitions {
        let seed = derive_seed(cfg.seed, &[rep as u64]);
        let run_cfg = cfg.clone().with_seed(seed);
        let report =
            generate(model, &run_cfg).map_err(|source| BenchError::Generate { rep, source })?;
        let verified = verify::check(&report.suite, model).passed;
        let run = BenchRun {
            name: name.to_string(),
            rep,
            seed,
            size: report.rows,
            millis: report.wall_time.as_millis(),
            verified,
        };
        on_run(&run);
        runs.push(run);
    }
    let counted: Vec<&BenchRun> = runs.iter().filter(|r| r.verified).collect();
    let n = counted.len().max(1) as f64;
    Ok(BenchmarkStats {
        name: name.to_string(),
        best_size: counted.iter().map(|r| r.size).min().unwrap_or(0),
        mean_size: counted.iter().map(|r| r.size as f64).sum::<f64>() / n,
        mean_millis: counted.iter().map(|r| r.millis as f64).sum::<f64>() / n,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstraintSet, ForbiddenTuple};

    fn quick() -> SwarmConfig {
        SwarmConfig {
            particles: 40,
            workers: 4,
            ..SwarmConfig::default()
        }
    }

    #[test]
    fn orthogonal_shape_is_fully_covered() {
        let model = SystemModel::unconstrained(2, vec![3; 4]).unwrap();
        let report = generate(&model, &SwarmConfig::default().with_seed(1)).unwrap();
        assert!(verify::check(&report.suite, &model).passed);
        assert!(report.rows <= 11, "{}", report.rows);
        assert_eq!(report.rows, report.suite.len());
        assert_eq!(report.covered_tuples, 54);
        assert_eq!(
            report.initial_tuples - report.pruned_tuples,
            report.covered_tuples
        );
    }

    #[test]
    fn running_example_reports_the_unreachable_pair() {
        let cs: ConstraintSet = [
            ForbiddenTuple::from_pairs(&[(0, 0), (2, 0)]).unwrap(),
            ForbiddenTuple::from_pairs(&[(1, 0), (2, 1)]).unwrap(),
        ]
        .into_iter()
        .collect();
        let model = SystemModel::new(2, vec![2, 2, 2], cs).unwrap();
        let err = generate(&model, &quick()).unwrap_err();
        let GenerateError::StuckTuples { open, partial } = err else {
            panic!("expected stuck tuples");
        };
        assert_eq!(open.0.len(), 1);
        assert_eq!(open.0[0].to_string(), "0:0 1:0");
        assert_eq!(open.to_string(), "(0:0 1:0)");
        assert_eq!(partial.covered_tuples, 9);
        assert!(partial.rows >= 4);
        let result = verify::check(&partial.suite, &model);
        assert!(result.violating_rows.is_empty());
        assert_eq!(result.missing.len(), 1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let model = SystemModel::unconstrained(2, vec![2, 2]).unwrap();
        let cfg = SwarmConfig {
            workers: 3,
            ..SwarmConfig::default()
        };
        assert!(matches!(
            generate(&model, &cfg),
            Err(GenerateError::Config(_))
        ));
    }

    #[test]
    fn zero_timeout_returns_partial() {
        let model = SystemModel::unconstrained(2, vec![3; 6]).unwrap();
        let options = GenerateOptions {
            timeout: Some(Duration::ZERO),
            ..GenerateOptions::default()
        };
        let err = generate_with(&model, &quick(), &options).unwrap_err();
        assert!(matches!(err, GenerateError::Timeout { .. }));
        assert_eq!(err.partial().unwrap().rows, 0);
    }

    #[test]
    fn nothing_to_cover_gives_an_empty_suite() {
        let cs: ConstraintSet = (0..4)
            .map(|i| ForbiddenTuple::from_pairs(&[(0, i / 2), (1, i % 2)]).unwrap())
            .collect();
        let model = SystemModel::new(2, vec![2, 2], cs).unwrap();
        let report = generate(&model, &quick()).unwrap();
        assert_eq!(report.rows, 0);
        assert_eq!(report.pruned_tuples, 4);
    }

    #[test]
    fn unknown_benchmark() {
        let err = run_benchmark("nope", &quick(), 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spin-s") && msg.contains("bugzilla"), "{msg}");
    }

    #[test]
    fn benchmark_runs_are_verified() {
        let stats = run_benchmark("gpl", &quick(), 2).unwrap();
        assert_eq!(stats.runs.len(), 2);
        assert!(stats.runs.iter().all(|r| r.verified));
        assert!(stats.best_size >= 14);
    }
}
