//! Stack-driven enumeration of all `t`-combinations of `k` parameter indices.
//!
//! The enumerator keeps the next candidate index for every open position on
//! an explicit stack. Each pass pops the top entry, extends the partial
//! combination from that point while pushing the successor of every placed
//! index, and emits once `t` positions are filled. Emission order is
//! lexicographic and is relied upon by the tuple store.

use std::fmt;
use std::ops::Deref;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinationError {
    #[error("combination size must be at least 1")]
    EmptyCombination,
    #[error("combination size {t} exceeds parameter count {k}")]
    SizeExceedsParameters { k: usize, t: usize },
    #[error("C({k}, {t}) overflows a 128-bit integer")]
    Overflow { k: usize, t: usize },
}

/// Strictly increasing parameter indices in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ParamCombination(Box<[usize]>);

impl ParamCombination {
    /// Panics unless `indices` is strictly increasing.
    pub fn new(indices: impl Into<Box<[usize]>>) -> Self {
        let indices = indices.into();
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "combination indices must be strictly increasing: {indices:?}"
        );
        Self(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl Deref for ParamCombination {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl std::borrow::Borrow<[usize]> for ParamCombination {
    fn borrow(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for ParamCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

fn check_bounds(k: usize, t: usize) -> Result<(), CombinationError> {
    if t < 1 {
        return Err(CombinationError::EmptyCombination);
    }
    if t > k {
        return Err(CombinationError::SizeExceedsParameters { k, t });
    }
    Ok(())
}

/// Calls `visit` with every `t`-combination of `0..k`, in lexicographic order.
///
/// The slice handed to `visit` is reused between calls.
pub fn for_each_combination<F>(k: usize, t: usize, mut visit: F) -> Result<(), CombinationError>
where
    F: FnMut(&[usize]),
{
    check_bounds(k, t)?;
    let mut comb = vec![0usize; t];
    let mut stack: Vec<usize> = Vec::with_capacity(t + 1);
    stack.push(0);
    while let Some(mut v) = stack.pop() {
        // position of the popped entry
        let mut i = stack.len();
        while v < k {
            comb[i] = v;
            i += 1;
            v += 1;
            stack.push(v);
            if i == t {
                visit(&comb);
                break;
            }
        }
    }
    Ok(())
}

/// All `t`-combinations of `0..k` in lexicographic order.
pub fn generate_combinations(
    k: usize,
    t: usize,
) -> Result<Vec<ParamCombination>, CombinationError> {
    let capacity = usize::try_from(combination_count(k, t)?).unwrap_or(0);
    let mut out = Vec::with_capacity(capacity);
    for_each_combination(k, t, |c| out.push(ParamCombination(c.into())))?;
    Ok(out)
}

/// Binomial coefficient `C(k, t)`.
pub fn combination_count(k: usize, t: usize) -> Result<u128, CombinationError> {
    check_bounds(k, t)?;
    let t = t.min(k - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        // acc * (k - i) is divisible by (i + 1) since acc = C(k, i)
        acc = acc
            .checked_mul((k - i) as u128)
            .ok_or(CombinationError::Overflow { k, t })?
            / (i as u128 + 1);
    }
    Ok(acc)
}
