//! Combination-keyed store of every t-tuple that still has to be covered.
//!
//! Each parameter combination owns one bucket holding the full Cartesian
//! product of its parameters' values, sorted lexicographically, with one state
//! flag per tuple. A row touches exactly one tuple per bucket, so a coverage
//! query walks the buckets and binary-searches inside each of them; no query
//! ever looks into a bucket other than the one addressed by the combination.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::combgen::{self, CombinationError, ParamCombination};
use crate::model::{ConstraintSet, SystemModel, Value};

/// Upper bound on stored tuples.
pub const MAX_TUPLES: u128 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error(transparent)]
    Combination(#[from] CombinationError),
    #[error(
        "tuple store needs {tuples} tuples over {combinations} combinations, limit is {limit}"
    )]
    Capacity {
        combinations: u128,
        tuples: u128,
        limit: u128,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleState {
    Open,
    Covered,
    Removed,
}

impl fmt::Display for TupleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TupleState::Open => "open",
            TupleState::Covered => "covered",
            TupleState::Removed => "removed",
        })
    }
}

/// One concrete assignment of values to a parameter combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ValueTuple {
    pub combination: ParamCombination,
    pub values: Vec<Value>,
}

impl ValueTuple {
    /// True when `row` agrees with every value of the tuple.
    pub fn is_covered_by(&self, row: &[Value]) -> bool {
        self.combination
            .iter()
            .zip(&self.values)
            .all(|(&p, &v)| row[p] == v)
    }
}

impl fmt::Display for ValueTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, v)) in self.combination.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}:{v}")?;
        }
        Ok(())
    }
}

/// Per-query search statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryTrace {
    pub covered: usize,
    pub buckets_probed: usize,
    pub comparisons: u64,
    /// Largest number of comparisons spent inside a single bucket.
    pub max_bucket_comparisons: u64,
}

#[derive(Debug, Clone)]
struct Bucket {
    combination: ParamCombination,
    /// `len * t` values, row-major, ascending.
    values: Vec<Value>,
    states: Vec<TupleState>,
    open: usize,
}

impl Bucket {
    fn len(&self) -> usize {
        self.states.len()
    }

    fn entry(&self, idx: usize) -> &[Value] {
        let t = self.combination.len();
        &self.values[idx * t..(idx + 1) * t]
    }

    /// Binary search for the tuple `row` projects onto this bucket.
    #[inline]
    fn locate(&self, row: &[Value], comparisons: &mut u64) -> Option<usize> {
        let t = self.combination.len();
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            *comparisons += 1;
            let entry = &self.values[mid * t..(mid + 1) * t];
            let mut ord = Ordering::Equal;
            for (j, &p) in self.combination.iter().enumerate() {
                ord = entry[j].cmp(&row[p]);
                if ord != Ordering::Equal {
                    break;
                }
            }
            match ord {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    fn locate_values(&self, values: &[Value]) -> Option<usize> {
        let t = self.combination.len();
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.values[mid * t..(mid + 1) * t].cmp(values) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// All t-tuples of a model, bucketed by parameter combination.
#[derive(Debug, Clone)]
pub struct TupleStore {
    strength: usize,
    domains: Vec<usize>,
    buckets: Vec<Bucket>,
    index: HashMap<ParamCombination, usize>,
    initial: usize,
    pruned: usize,
    uncovered: usize,
}

impl TupleStore {
    /// Every t-tuple of `model`, all open. Constraints are not applied; see
    /// [`TupleStore::prune_constrained`].
    pub fn build(model: &SystemModel) -> Result<Self, StoreError> {
        Self::for_domains(model.values(), model.strength())
    }

    /// Store over raw value counts. Accepts `t = 1`, which models reject.
    pub fn for_domains(domains: &[usize], t: usize) -> Result<Self, StoreError> {
        let combinations = combgen::combination_count(domains.len(), t)?;
        let mut total: u128 = 0;
        let mut overflow = false;
        combgen::for_each_combination(domains.len(), t, |c| {
            let size = c.iter().map(|&p| domains[p] as u128).product::<u128>();
            total = total.saturating_add(size);
            overflow |= total > MAX_TUPLES;
        })?;
        if overflow {
            return Err(StoreError::Capacity {
                combinations,
                tuples: total,
                limit: MAX_TUPLES,
            });
        }

        let mut buckets = Vec::with_capacity(combinations as usize);
        for combination in combgen::generate_combinations(domains.len(), t)? {
            let radices: Vec<usize> = combination.iter().map(|&p| domains[p]).collect();
            let len: usize = radices.iter().product();
            let mut values = Vec::with_capacity(len * t);
            let mut digits = vec![0 as Value; t];
            for _ in 0..len {
                values.extend_from_slice(&digits);
                // odometer, last position fastest: ascending lexicographic order
                for j in (0..t).rev() {
                    digits[j] += 1;
                    if (digits[j] as usize) < radices[j] {
                        break;
                    }
                    digits[j] = 0;
                }
            }
            buckets.push(Bucket {
                combination,
                values,
                states: vec![TupleState::Open; len],
                open: len,
            });
        }
        let index = buckets
            .iter()
            .enumerate()
            .map(|(i, b)| (b.combination.clone(), i))
            .collect();
        let total = total as usize;
        Ok(Self {
            strength: t,
            domains: domains.to_vec(),
            buckets,
            index,
            initial: total,
            pruned: 0,
            uncovered: total,
        })
    }

    /// Flags every tuple that contains a forbidden tuple of size `<= t` as
    /// removed. Returns how many tuples were removed by this call.
    pub fn prune_constrained(&mut self, cs: &ConstraintSet) -> usize {
        let mut removed = 0;
        for forbidden in cs.iter().filter(|f| f.len() <= self.strength) {
            for bucket in &mut self.buckets {
                // positions of the forbidden parameters inside the combination
                let mut positions = Vec::with_capacity(forbidden.len());
                for a in forbidden.assignments() {
                    match bucket.combination.binary_search(&a.param) {
                        Ok(pos) => positions.push((pos, a.value)),
                        Err(_) => break,
                    }
                }
                if positions.len() != forbidden.len() {
                    continue;
                }
                let t = bucket.combination.len();
                for idx in 0..bucket.len() {
                    let entry = &bucket.values[idx * t..(idx + 1) * t];
                    if positions.iter().all(|&(pos, v)| entry[pos] == v) {
                        match bucket.states[idx] {
                            TupleState::Removed => {}
                            TupleState::Open => {
                                bucket.states[idx] = TupleState::Removed;
                                bucket.open -= 1;
                                self.uncovered -= 1;
                                removed += 1;
                            }
                            TupleState::Covered => {
                                bucket.states[idx] = TupleState::Removed;
                                removed += 1;
                            }
                        }
                    }
                }
            }
        }
        self.pruned += removed;
        removed
    }

    /// Number of open tuples `row` would cover. Read-only.
    #[inline]
    pub fn covered_count(&self, row: &[Value]) -> usize {
        let mut comparisons = 0;
        let mut covered = 0;
        for bucket in &self.buckets {
            if bucket.open == 0 {
                continue;
            }
            if let Some(idx) = bucket.locate(row, &mut comparisons) {
                covered += (bucket.states[idx] == TupleState::Open) as usize;
            }
        }
        covered
    }

    /// [`TupleStore::covered_count`] with search statistics. Probes every
    /// bucket, including exhausted ones.
    pub fn covered_count_traced(&self, row: &[Value]) -> QueryTrace {
        let mut trace = QueryTrace::default();
        for bucket in &self.buckets {
            let mut comparisons = 0;
            if let Some(idx) = bucket.locate(row, &mut comparisons) {
                trace.covered += (bucket.states[idx] == TupleState::Open) as usize;
            }
            trace.buckets_probed += 1;
            trace.comparisons += comparisons;
            trace.max_bucket_comparisons = trace.max_bucket_comparisons.max(comparisons);
        }
        trace
    }

    /// Flags every open tuple covered by `row`. Returns how many changed.
    pub fn mark_covered(&mut self, row: &[Value]) -> usize {
        let mut comparisons = 0;
        let mut newly = 0;
        for bucket in &mut self.buckets {
            if bucket.open == 0 {
                continue;
            }
            if let Some(idx) = bucket.locate(row, &mut comparisons) {
                if bucket.states[idx] == TupleState::Open {
                    bucket.states[idx] = TupleState::Covered;
                    bucket.open -= 1;
                    newly += 1;
                }
            }
        }
        self.uncovered -= newly;
        newly
    }

    /// Most open tuples a single row can still cover: one per bucket that has
    /// any left.
    pub fn covered_count_ceiling(&self) -> usize {
        self.buckets.iter().filter(|b| b.open > 0).count()
    }

    /// State of one tuple, located through the combination index.
    pub fn state(&self, combination: &[usize], values: &[Value]) -> Option<TupleState> {
        let bucket = &self.buckets[*self.index.get(combination)?];
        bucket.locate_values(values).map(|idx| bucket.states[idx])
    }

    /// No open tuple left.
    pub fn is_empty(&self) -> bool {
        self.uncovered == 0
    }

    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    /// Tuple count before pruning.
    pub fn initial_tuples(&self) -> usize {
        self.initial
    }

    pub fn pruned_tuples(&self) -> usize {
        self.pruned
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Largest bucket size.
    pub fn max_bucket_len(&self) -> usize {
        self.buckets.iter().map(Bucket::len).max().unwrap_or(0)
    }

    /// Every tuple with its state, in bucket order then in-bucket order.
    pub fn iter(&self) -> impl Iterator<Item = (&ParamCombination, &[Value], TupleState)> + '_ {
        self.buckets.iter().flat_map(|b| {
            (0..b.len()).map(move |idx| (&b.combination, b.entry(idx), b.states[idx]))
        })
    }

    /// Open tuples, in store order.
    pub fn open_tuples(&self) -> Vec<ValueTuple> {
        self.iter()
            .filter(|(_, _, s)| *s == TupleState::Open)
            .map(|(c, v, _)| ValueTuple {
                combination: c.clone(),
                values: v.to_vec(),
            })
            .collect()
    }

    /// One line per tuple: `p:v p:v ... state`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (combination, values, state) in self.iter() {
            for (p, v) in combination.iter().zip(values) {
                out.push_str(&format!("{p}:{v} "));
            }
            out.push_str(&format!("{state}\n"));
        }
        out
    }
}
