//! Independent checks for finished suites and a greedy baseline generator.
//!
//! Nothing here goes through the tuple store or the combination generator:
//! tuples are enumerated with plain recursion and looked up by linear scans
//! or dense mixed-radix tables, so agreement with the store is meaningful.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::combgen::ParamCombination;
use crate::model::{ForbiddenTuple, SystemModel, TestCase, TestSuite, Value};
use crate::tuplestore::ValueTuple;

/// Outcome of [`check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    /// Tuples that must be covered: all t-tuples minus those containing a
    /// forbidden tuple of size `<= t`.
    pub valid_tuples: usize,
    pub covered: usize,
    pub missing: Vec<ValueTuple>,
    pub violating_rows: Vec<(usize, ForbiddenTuple)>,
    pub passed: bool,
}

/// Calls `visit` with every increasing `t`-subset of `0..k`.
fn each_subset(k: usize, t: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        k: usize,
        t: usize,
        start: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == t {
            visit(cur);
            return;
        }
        for p in start..k {
            cur.push(p);
            rec(k, t, p + 1, cur, visit);
            cur.pop();
        }
    }
    rec(k, t, 0, &mut Vec::with_capacity(t), visit);
}

/// Calls `visit` with every value vector over `params`, last position fastest.
fn each_value_vector(params: &[usize], domains: &[usize], visit: &mut dyn FnMut(&[Value])) {
    let mut values = vec![0 as Value; params.len()];
    loop {
        visit(&values);
        let mut j = params.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            values[j] += 1;
            if (values[j] as usize) < domains[params[j]] {
                break;
            }
            values[j] = 0;
        }
    }
}

/// True when the tuple contains some forbidden tuple of size `<= t`.
fn is_excluded(model: &SystemModel, params: &[usize], values: &[Value]) -> bool {
    model
        .constraints()
        .iter()
        .filter(|f| f.len() <= model.strength())
        .any(|f| {
            f.assignments().iter().all(|a| {
                params
                    .iter()
                    .position(|&p| p == a.param)
                    .is_some_and(|i| values[i] == a.value)
            })
        })
}

/// Brute-force coverage and constraint check of `suite` against `model`.
pub fn check(suite: &TestSuite, model: &SystemModel) -> VerificationResult {
    let rows: Vec<&[Value]> = suite.rows().iter().map(|r| r.values()).collect();
    check_rows(&rows, model)
}

/// [`check`] over raw rows.
pub fn check_rows(rows: &[&[Value]], model: &SystemModel) -> VerificationResult {
    let domains = model.values();
    let mut valid_tuples = 0;
    let mut covered = 0;
    let mut missing = Vec::new();
    each_subset(model.parameters(), model.strength(), &mut |params| {
        each_value_vector(params, domains, &mut |values| {
            if is_excluded(model, params, values) {
                return;
            }
            valid_tuples += 1;
            let hit = rows
                .iter()
                .any(|row| params.iter().zip(values).all(|(&p, &v)| row[p] == v));
            if hit {
                covered += 1;
            } else {
                missing.push(ValueTuple {
                    combination: ParamCombination::new(params.to_vec()),
                    values: values.to_vec(),
                });
            }
        });
    });
    let mut violating_rows = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for f in model.constraints() {
            if f.assignments().iter().all(|a| row[a.param] == a.value) {
                violating_rows.push((i, f.clone()));
            }
        }
    }
    let passed = missing.is_empty() && violating_rows.is_empty();
    VerificationResult {
        valid_tuples,
        covered,
        missing,
        violating_rows,
        passed,
    }
}

/// Number of tuples a complete suite for `model` has to cover.
pub fn valid_tuple_count(model: &SystemModel) -> usize {
    let mut count = 0;
    each_subset(model.parameters(), model.strength(), &mut |params| {
        each_value_vector(params, model.values(), &mut |values| {
            count += !is_excluded(model, params, values) as usize;
        });
    });
    count
}

/// Whether the partial assignment `fixed` extends to a full row matching no
/// forbidden tuple. Exhaustive backtracking; meant for small models.
pub fn extends_to_valid_row(model: &SystemModel, fixed: &[(usize, Value)]) -> bool {
    complete_row(model, fixed).is_some()
}

/// First violation-free row, in lexicographic order of the free parameters,
/// that agrees with `fixed`.
pub fn complete_row(model: &SystemModel, fixed: &[(usize, Value)]) -> Option<Vec<Value>> {
    let k = model.parameters();
    let mut row: Vec<Option<Value>> = vec![None; k];
    for &(p, v) in fixed {
        row[p] = Some(v);
    }
    let order: Vec<usize> = (0..k).filter(|p| row[*p].is_none()).collect();

    fn violated(model: &SystemModel, row: &[Option<Value>]) -> bool {
        model.constraints().iter().any(|f| {
            f.assignments()
                .iter()
                .all(|a| row[a.param] == Some(a.value))
        })
    }
    fn rec(model: &SystemModel, row: &mut [Option<Value>], order: &[usize]) -> bool {
        if violated(model, row) {
            return false;
        }
        let Some((&p, rest)) = order.split_first() else {
            return true;
        };
        for v in 0..model.values()[p] as Value {
            row[p] = Some(v);
            if rec(model, row, rest) {
                return true;
            }
        }
        row[p] = None;
        false
    }
    rec(model, &mut row, &order).then(|| row.into_iter().map(|v| v.expect("complete")).collect())
}

/// Flat, unindexed tuple list searched exhaustively on every query.
#[derive(Debug, Clone)]
pub struct FullSearch {
    strength: usize,
    params: Vec<usize>,
    values: Vec<Value>,
    open: Vec<bool>,
}

impl FullSearch {
    /// All valid tuples of `model`, open.
    pub fn new(model: &SystemModel) -> Self {
        let t = model.strength();
        let mut params = Vec::new();
        let mut values = Vec::new();
        each_subset(model.parameters(), t, &mut |ps| {
            each_value_vector(ps, model.values(), &mut |vs| {
                if !is_excluded(model, ps, vs) {
                    params.extend_from_slice(ps);
                    values.extend_from_slice(vs);
                }
            });
        });
        let n = values.len() / t;
        Self {
            strength: t,
            params,
            values,
            open: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn uncovered(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    fn matches(&self, idx: usize, row: &[Value]) -> bool {
        let t = self.strength;
        (idx * t..(idx + 1) * t).all(|j| row[self.params[j]] == self.values[j])
    }

    /// Open tuples `row` covers, found by scanning every stored tuple.
    pub fn covered_count(&self, row: &[Value]) -> usize {
        (0..self.open.len())
            .filter(|&i| self.open[i] && self.matches(i, row))
            .count()
    }

    pub fn mark_covered(&mut self, row: &[Value]) -> usize {
        let mut newly = 0;
        for i in 0..self.open.len() {
            if self.open[i] && self.matches(i, row) {
                self.open[i] = false;
                newly += 1;
            }
        }
        newly
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("{} tuples cannot be placed in any violation-free row", .0.len())]
    Stuck(Vec<ValueTuple>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Open,
    Covered,
    Excluded,
}

/// Dense coverage table: one mixed-radix block per parameter combination.
struct Universe {
    t: usize,
    domains: Vec<usize>,
    combos: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    offsets: Vec<usize>,
    slots: Vec<Slot>,
    open: usize,
}

impl Universe {
    fn new(model: &SystemModel) -> Self {
        let t = model.strength();
        let domains = model.values().to_vec();
        let mut combos = Vec::new();
        each_subset(domains.len(), t, &mut |ps| combos.push(ps.to_vec()));
        let mut offsets = Vec::with_capacity(combos.len() + 1);
        let mut slots = Vec::new();
        let mut open = 0;
        for ps in &combos {
            offsets.push(slots.len());
            each_value_vector(ps, &domains, &mut |vs| {
                if is_excluded(model, ps, vs) {
                    slots.push(Slot::Excluded);
                } else {
                    slots.push(Slot::Open);
                    open += 1;
                }
            });
        }
        offsets.push(slots.len());
        let index = combos
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        Self {
            t,
            domains,
            combos,
            index,
            offsets,
            slots,
            open,
        }
    }

    fn slot_of(&self, combo: usize, row: &[Option<Value>]) -> usize {
        let mut idx = 0;
        for &p in &self.combos[combo] {
            idx = idx * self.domains[p] + row[p].expect("assigned") as usize;
        }
        self.offsets[combo] + idx
    }

    fn tuple_at(&self, slot: usize) -> ValueTuple {
        let combo = self.offsets.partition_point(|&o| o <= slot) - 1;
        let params = &self.combos[combo];
        let mut rest = slot - self.offsets[combo];
        let mut values = vec![0; params.len()];
        for (j, &p) in params.iter().enumerate().rev() {
            values[j] = (rest % self.domains[p]) as Value;
            rest /= self.domains[p];
        }
        ValueTuple {
            combination: ParamCombination::new(params.clone()),
            values,
        }
    }

    /// Open tuples completed by assigning `param`, given the assigned set.
    fn gain(&self, row: &[Option<Value>], assigned: &[usize], param: usize) -> usize {
        let mut gain = 0;
        let mut members = Vec::with_capacity(self.t);
        let mut visit = |others: &[usize]| {
            members.clear();
            members.extend(others.iter().map(|&i| assigned[i]));
            members.push(param);
            members.sort_unstable();
            let combo = self.index[&members];
            if self.slots[self.slot_of(combo, row)] == Slot::Open {
                gain += 1;
            }
        };
        if assigned.len() + 1 >= self.t {
            each_subset(assigned.len(), self.t - 1, &mut visit);
        }
        gain
    }

    fn mark_row(&mut self, row: &[Value]) -> usize {
        let full: Vec<Option<Value>> = row.iter().map(|&v| Some(v)).collect();
        let mut newly = 0;
        for c in 0..self.combos.len() {
            let s = self.slot_of(c, &full);
            if self.slots[s] == Slot::Open {
                self.slots[s] = Slot::Covered;
                newly += 1;
            }
        }
        self.open -= newly;
        newly
    }
}

/// Greedy one-row-at-a-time generator used as a size reference.
///
/// Each row starts from one open tuple, then assigns the remaining parameters
/// in random order, each to the violation-free value completing the most open
/// tuples. A parameter with no violation-free value sends the builder back
/// to change the previous parameter; if that still fails, the row is
/// completed by exhaustive search, so a `Stuck` error lists only tuples that
/// fit in no valid row.
pub fn greedy_baseline(model: &SystemModel, seed: u64) -> Result<TestSuite, BaselineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut universe = Universe::new(model);
    let k = model.parameters();
    let mut touching: Vec<Vec<&ForbiddenTuple>> = vec![Vec::new(); k];
    for f in model.constraints() {
        for a in f.assignments() {
            touching[a.param].push(f);
        }
    }
    let violates_at = |row: &[Option<Value>], p: usize| {
        touching[p].iter().any(|f| {
            f.assignments()
                .iter()
                .all(|a| row[a.param] == Some(a.value))
        })
    };

    let mut suite = TestSuite::new(model);
    while universe.open > 0 {
        let total = universe.slots.len();
        let start = rng.gen_range(0..total);
        let mut built = None;
        for step in 0..total {
            let slot = (start + step) % total;
            if universe.slots[slot] != Slot::Open {
                continue;
            }
            let tuple = universe.tuple_at(slot);
            let row = build_row(&universe, &tuple, &violates_at, &mut rng).or_else(|| {
                let fixed: Vec<_> = tuple
                    .combination
                    .iter()
                    .copied()
                    .zip(tuple.values.iter().copied())
                    .collect();
                complete_row(model, &fixed)
            });
            if let Some(row) = row {
                built = Some(row);
                break;
            }
        }
        let Some(row) = built else {
            let open = (0..universe.slots.len())
                .filter(|&s| universe.slots[s] == Slot::Open)
                .map(|s| universe.tuple_at(s))
                .collect();
            return Err(BaselineError::Stuck(open));
        };
        let newly = universe.mark_row(&row);
        debug_assert!(newly > 0);
        suite.push(TestCase::new(model, row).expect("greedy rows stay in range"));
    }
    Ok(suite)
}

fn build_row(
    universe: &Universe,
    seed_tuple: &ValueTuple,
    violates_at: &dyn Fn(&[Option<Value>], usize) -> bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Value>> {
    let k = universe.domains.len();
    let mut row: Vec<Option<Value>> = vec![None; k];
    let mut assigned: Vec<usize> = Vec::with_capacity(k);
    for (&p, &v) in seed_tuple.combination.iter().zip(&seed_tuple.values) {
        row[p] = Some(v);
        assigned.push(p);
    }
    if seed_tuple.combination.iter().any(|&p| violates_at(&row, p)) {
        return None;
    }
    let mut order: Vec<usize> = (0..k).filter(|&p| row[p].is_none()).collect();
    order.shuffle(rng);

    // values already tried at each position of `order`
    let mut tried: Vec<Vec<Value>> = vec![Vec::new(); order.len()];
    let mut idx = 0;
    let mut backtracks = 0;
    while idx < order.len() {
        let p = order[idx];
        let mut candidates: Vec<Value> = (0..universe.domains[p] as Value)
            .filter(|v| !tried[idx].contains(v))
            .collect();
        candidates.shuffle(rng);
        let mut best: Option<(usize, Value)> = None;
        for v in candidates {
            row[p] = Some(v);
            if violates_at(&row, p) {
                continue;
            }
            let gain = universe.gain(&row, &assigned, p);
            if best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, v));
            }
        }
        match best {
            Some((_, v)) => {
                row[p] = Some(v);
                tried[idx].push(v);
                assigned.push(p);
                idx += 1;
            }
            None => {
                row[p] = None;
                tried[idx].clear();
                if idx == 0 || backtracks >= k {
                    return None;
                }
                backtracks += 1;
                idx -= 1;
                row[order[idx]] = None;
                assigned.pop();
            }
        }
    }
    Some(row.into_iter().map(|v| v.expect("all assigned")).collect())
}
