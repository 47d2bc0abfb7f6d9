//! Constrained combinatorial interaction test generation.
//!
//! A suite is built one row at a time. All t-tuples of the model are placed
//! in a combination-keyed [`TupleStore`], tuples containing a forbidden tuple
//! are pruned, and each round a discrete multi-objective particle swarm
//! searches for the violation-free row covering the most open tuples. The
//! [`verify`] module re-checks finished suites without touching the store and
//! provides a greedy baseline for size comparisons.
//!
//! ```
//! use ctswarm_core::{generate, verify, SwarmConfig, SystemModel};
//!
//! let model = SystemModel::parse("2\n3\n2 2 3\n1\n2 0:1 2:2\n").unwrap();
//! let report = generate(&model, &SwarmConfig::default().with_seed(7)).unwrap();
//! assert!(verify::check(&report.suite, &model).passed);
//! ```

pub mod combgen;
pub mod corpus;
pub mod generator;
pub mod model;
pub mod mopso;
pub mod suite_io;
pub mod tuplestore;
pub mod verify;

pub use combgen::{combination_count, generate_combinations, CombinationError, ParamCombination};
pub use generator::{
    generate, generate_with, run_benchmark, BenchmarkStats, GenerateError, GenerateOptions,
    GenerationReport,
};
pub use model::{
    parse_model, violates, Assignment, ConstraintSet, ForbiddenTuple, ModelError, SystemModel,
    TestCase, TestSuite, Value,
};
pub use mopso::{dominates, Fitness, ParetoSet, Particle, SwarmConfig, SwarmError, SwarmRunner};
pub use suite_io::SuiteFormat;
pub use tuplestore::{TupleState, TupleStore, ValueTuple};
pub use verify::VerificationResult;
