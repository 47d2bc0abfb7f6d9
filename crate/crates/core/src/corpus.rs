//! Benchmark models shipped with the crate.
//!
//! Five configurable-system models, the graph product line (with and without
//! its feature constraints), the three-parameter running example, and thirty
//! configurations derived from the five systems. The derived set is rebuilt
//! on demand from a fixed seed: configuration `derived-NN` takes system
//! `(NN - 1) mod 5`, keeps a random 20-60 % of its parameters (at least four),
//! keeps the forbidden tuples whose parameters all survived, and renumbers.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{Assignment, ConstraintSet, ForbiddenTuple, ModelError, SystemModel};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown benchmark {name:?}; available: {}", .available.join(", "))]
    Unknown {
        name: String,
        available: Vec<String>,
    },
    #[error("corpus model {name:?} is invalid: {source}")]
    Invalid {
        name: String,
        #[source]
        source: ModelError,
    },
}

/// An embedded model file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
    /// Which system the file encodes.
    pub provenance: &'static str,
    pub notation: &'static str,
    pub constraint_notation: &'static str,
}

impl CorpusEntry {
    pub fn model(&self) -> Result<SystemModel, CorpusError> {
        SystemModel::parse(self.text).map_err(|source| CorpusError::Invalid {
            name: self.name.to_string(),
            source,
        })
    }
}

pub const EMBEDDED: &[CorpusEntry] = &[
    CorpusEntry {
        name: "bugzilla",
        text: include_str!("../../../corpus/bugzilla.model"),
        provenance: "Bugzilla defect tracker",
        notation: "MCA(N; 2, 2^49 3^1 4^2)",
        constraint_notation: "2^4 3^1",
    },
    CorpusEntry {
        name: "apache",
        text: include_str!("../../../corpus/apache.model"),
        provenance: "Apache HTTP Server 2.2",
        notation: "MCA(N; 2, 2^158 3^8 4^4 5^1 6^1)",
        constraint_notation: "2^3 3^1 4^2 5^1",
    },
    CorpusEntry {
        name: "gcc",
        text: include_str!("../../../corpus/gcc.model"),
        provenance: "GCC 4.1 optimiser options",
        notation: "MCA(N; 2, 2^189 3^10)",
        constraint_notation: "2^37 3^3",
    },
    CorpusEntry {
        name: "spin-s",
        text: include_str!("../../../corpus/spin-s.model"),
        provenance: "SPIN model checker, simulator mode",
        notation: "MCA(N; 2, 2^13 4^5)",
        constraint_notation: "2^13",
    },
    CorpusEntry {
        name: "spin-v",
        text: include_str!("../../../corpus/spin-v.model"),
        provenance: "SPIN model checker, verifier mode",
        notation: "MCA(N; 2, 2^42 3^2 4^11)",
        constraint_notation: "2^47 3^2",
    },
    CorpusEntry {
        name: "gpl",
        text: include_str!("../../../corpus/gpl.model"),
        provenance: "Graph product line, unconstrained",
        notation: "MCA(N; 2, 2^3 7^1)",
        constraint_notation: "",
    },
    CorpusEntry {
        name: "gpl-constrained",
        text: include_str!("../../../corpus/gpl-constrained.model"),
        provenance: "Graph product line with feature-model constraints",
        notation: "MCA(N; 2, 2^3 7^1)",
        constraint_notation: "2^10",
    },
    CorpusEntry {
        name: "running-example",
        text: include_str!("../../../corpus/running-example.model"),
        provenance: "Three binary parameters, two forbidden pairs",
        notation: "CA(N; 2, 2^3)",
        constraint_notation: "2^2",
    },
];

/// The five real systems, in the order derived configurations cycle through.
pub const SYSTEMS: [&str; 5] = ["bugzilla", "apache", "gcc", "spin-s", "spin-v"];

pub const DERIVED_COUNT: usize = 30;

const DERIVED_SEED: u64 = 0x5EED_C0DE;

pub fn embedded(name: &str) -> Option<&'static CorpusEntry> {
    EMBEDDED.iter().find(|e| e.name == name)
}

/// Every benchmark name, embedded first.
pub fn names() -> Vec<String> {
    EMBEDDED
        .iter()
        .map(|e| e.name.to_string())
        .chain((1..=DERIVED_COUNT).map(derived_name))
        .collect()
}

fn derived_name(i: usize) -> String {
    format!("derived-{i:02}")
}

/// Loads any benchmark by name.
pub fn load(name: &str) -> Result<SystemModel, CorpusError> {
    if let Some(entry) = embedded(name) {
        return entry.model();
    }
    if let Some(i) = name
        .strip_prefix("derived-")
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|i| (1..=DERIVED_COUNT).contains(i) && name == derived_name(*i))
    {
        return derived(i);
    }
    Err(CorpusError::Unknown {
        name: name.to_string(),
        available: names(),
    })
}

/// Derived configuration `i` (1-based).
pub fn derived(i: usize) -> Result<SystemModel, CorpusError> {
    assert!(
        (1..=DERIVED_COUNT).contains(&i),
        "derived index out of range"
    );
    let base_name = SYSTEMS[(i - 1) % SYSTEMS.len()];
    let base = embedded(base_name).expect("system is embedded").model()?;
    let mut rng = ChaCha8Rng::seed_from_u64(DERIVED_SEED ^ i as u64);
    let k = base.parameters();
    let fraction = rng.gen_range(0.2..0.6);
    let keep = ((k as f64 * fraction).round() as usize).clamp(4, k);
    let mut kept = sample(&mut rng, k, keep).into_vec();
    kept.sort_unstable();

    let mut renumber = vec![None; k];
    for (new, &old) in kept.iter().enumerate() {
        renumber[old] = Some(new);
    }
    let values = kept.iter().map(|&p| base.values()[p]).collect();
    let constraints: ConstraintSet = base
        .constraints()
        .iter()
        .filter_map(|f| {
            let assignments: Option<Vec<Assignment>> = f
                .assignments()
                .iter()
                .map(|a| renumber[a.param].map(|p| Assignment::new(p, a.value)))
                .collect();
            assignments.map(|a| ForbiddenTuple::new(a).expect("renumbering keeps tuples valid"))
        })
        .collect();
    SystemModel::new(base.strength(), values, constraints).map_err(|source| CorpusError::Invalid {
        name: derived_name(i),
        source,
    })
}

/// Short digest of the embedded model files.
pub fn corpus_hash() -> String {
    let mut hasher = Sha256::new();
    for entry in EMBEDDED {
        hasher.update(entry.name.as_bytes());
        hasher.update([0]);
        hasher.update(entry.text.as_bytes());
    }
    hex::encode(&hasher.finalize()[..8])
}
