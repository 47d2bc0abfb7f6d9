#![allow(dead_code)]

use ctswarm_core::{ConstraintSet, ForbiddenTuple, SystemModel, Value};
use rand::seq::index::sample;
use rand::Rng;

/// Random model with `2..=max_k` parameters of `2..=max_v` values, strength 2
/// or 3, and up to `max_constraints` forbidden tuples of size 2 or 3.
pub fn random_model(
    rng: &mut impl Rng,
    max_k: usize,
    max_v: usize,
    max_constraints: usize,
) -> SystemModel {
    let k = rng.gen_range(2..=max_k);
    let values: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=max_v)).collect();
    let t = if k >= 3 && rng.gen_bool(0.3) { 3 } else { 2 };
    let count = rng.gen_range(0..=max_constraints);
    let constraints: ConstraintSet = (0..count)
        .map(|_| {
            let size = if k >= 3 && rng.gen_bool(0.3) { 3 } else { 2 };
            let pairs: Vec<(usize, Value)> = sample(rng, k, size)
                .into_iter()
                .map(|p| (p, rng.gen_range(0..values[p]) as Value))
                .collect();
            ForbiddenTuple::from_pairs(&pairs).unwrap()
        })
        .collect();
    SystemModel::new(t, values, constraints).unwrap()
}

pub fn random_row(rng: &mut impl Rng, domains: &[usize]) -> Vec<Value> {
    domains
        .iter()
        .map(|&v| rng.gen_range(0..v) as Value)
        .collect()
}

/// Lexicographic t-subsets of `0..k`, by plain recursion.
pub fn recursive_combinations(k: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, t: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == t {
            out.push(prefix.clone());
            return;
        }
        for i in start..k {
            prefix.push(i);
            go(i + 1, k, t, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, t, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient by Pascal's rule.
pub fn pascal(k: usize, t: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..k {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(t).copied().unwrap_or(0)
}
