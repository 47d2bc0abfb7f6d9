//! Fixtures shared by the criterion benchmarks in `benches/`.

use ctswarm_core::verify::FullSearch;
use ctswarm_core::{corpus, SystemModel, TupleStore, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Store for a corpus model with forbidden tuples already pruned.
pub fn pruned_store(name: &str) -> (SystemModel, TupleStore) {
    let model = corpus::load(name).expect("corpus model");
    let mut store = TupleStore::build(&model).expect("store fits");
    store.prune_constrained(model.constraints());
    (model, store)
}

/// Indexed store and flat-scan oracle for `k` parameters of `v` values.
pub fn uniform_pair(k: usize, v: usize) -> (TupleStore, FullSearch) {
    let model = SystemModel::unconstrained(2, vec![v; k]).expect("valid shape");
    (
        TupleStore::build(&model).expect("store fits"),
        FullSearch::new(&model),
    )
}

pub fn random_rows(domains: &[usize], n: usize, seed: u64) -> Vec<Vec<Value>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            domains
                .iter()
                .map(|&v| rng.gen_range(0..v as Value))
                .collect()
        })
        .collect()
}
