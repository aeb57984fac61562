//! Rank accuracy metrics for a single recommendation list.
//!
//! All metrics compare a ranked, duplicate-free tag list against the held-out
//! post's true tag set. Reciprocal rank and average precision use the
//! per-relevant-tag averaged form: every true tag found within the cutoff
//! contributes, and the sum is divided by the number of true tags, so both
//! stay in [0, 1] and coincide with the classic first-hit definitions when a
//! single true tag exists.
//!
//! The `*_exact` variants return exact rationals; they are what the batch
//! evaluator accumulates so that aggregate results do not depend on the order
//! in which test posts are reduced.

use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Largest supported cutoff; MRR and MAP are always computed at this depth.
pub const MAX_CUTOFF: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricError {
    /// The cutoff k must lie in 1..=10.
    CutoffOutOfRange(usize),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::CutoffOutOfRange(k) => {
                write!(f, "cutoff {k} outside the supported range 1..={MAX_CUTOFF}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricError {}

pub(crate) fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Number of true tags among the first `k` recommended tags.
pub fn hits(recommended: &[&str], true_tags: &BTreeSet<String>, k: usize) -> usize {
    recommended
        .iter()
        .take(k)
        .filter(|t| true_tags.contains(**t))
        .count()
}

/// P@k, R@k and F1@k for one recommendation list.
///
/// With `h` hits in the top k: P@k = h/k, R@k = h/|true|, and F1 is their
/// harmonic mean (0 when both are 0).
pub fn precision_recall_f1(
    recommended: &[&str],
    true_tags: &BTreeSet<String>,
    k: usize,
) -> Result<(f64, f64, f64), MetricError> {
    if k == 0 || k > MAX_CUTOFF {
        return Err(MetricError::CutoffOutOfRange(k));
    }
    let h = hits(recommended, true_tags, k) as f64;
    let p = h / k as f64;
    let r = h / true_tags.len() as f64;
    let f1 = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    Ok((p, r, f1))
}

/// Exact reciprocal rank: (1/|true|) * sum over true tags found at rank
/// r <= cutoff of 1/r.
pub fn reciprocal_rank_exact(
    recommended: &[&str],
    true_tags: &BTreeSet<String>,
    cutoff: usize,
) -> BigRational {
    let mut sum = BigRational::zero();
    for (i, tag) in recommended.iter().take(cutoff).enumerate() {
        if true_tags.contains(*tag) {
            sum += ratio(1, i as u64 + 1);
        }
    }
    sum / BigInt::from(true_tags.len() as u64)
}

/// Per-relevant-tag averaged reciprocal rank within `cutoff`.
pub fn reciprocal_rank(recommended: &[&str], true_tags: &BTreeSet<String>, cutoff: usize) -> f64 {
    reciprocal_rank_exact(recommended, true_tags, cutoff)
        .to_f64()
        .unwrap_or(0.0)
}

/// Exact average precision: (1/|true|) * sum over hit ranks i <= cutoff of
/// P@i.
pub fn average_precision_exact(
    recommended: &[&str],
    true_tags: &BTreeSet<String>,
    cutoff: usize,
) -> BigRational {
    let mut sum = BigRational::zero();
    let mut hits_so_far = 0u64;
    for (i, tag) in recommended.iter().take(cutoff).enumerate() {
        if true_tags.contains(*tag) {
            hits_so_far += 1;
            sum += ratio(hits_so_far, i as u64 + 1);
        }
    }
    sum / BigInt::from(true_tags.len() as u64)
}

/// Average precision within `cutoff`, averaged over the true tag set.
pub fn average_precision(recommended: &[&str], true_tags: &BTreeSet<String>, cutoff: usize) -> f64 {
    average_precision_exact(recommended, true_tags, cutoff)
        .to_f64()
        .unwrap_or(0.0)
}
