//! Batch leave-one-out evaluation.
//!
//! Every test case is scored independently ([`evaluate_case`]) and the
//! per-case results are folded into a [`MetricAccumulator`]. All sums are
//! exact rationals, so the aggregate report is identical no matter how the
//! cases are ordered or partitioned across threads; floats only appear once,
//! when the finished report is materialized.
//!
//! Reported P@k and R@k are means over test posts; F1@k is the harmonic mean
//! of those two aggregate values (not the mean of per-post F1 scores), which
//! keeps F1@k consistent with plotted precision/recall curves. MRR and MAP
//! are means of the per-post reciprocal rank and average precision at depth
//! 10.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::metrics::{average_precision_exact, hits, ratio, reciprocal_rank_exact, MAX_CUTOFF};
use crate::recommend::Recommender;
use crate::split::TestCase;

/// Aggregated metrics of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub cutoffs: Vec<usize>,
    /// Mean P@k per cutoff.
    pub precision: Vec<f64>,
    /// Mean R@k per cutoff.
    pub recall: Vec<f64>,
    /// F1 of the aggregated precision and recall per cutoff.
    pub f1: Vec<f64>,
    pub mrr: f64,
    pub map: f64,
    pub n_posts: usize,
    /// Filled in by callers that time the run; not part of the metrics.
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    EmptyTestSet,
    CutoffOutOfRange(usize),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptyTestSet => write!(f, "test set is empty"),
            EvalError::CutoffOutOfRange(k) => {
                write!(f, "cutoff {k} outside the supported range 1..={MAX_CUTOFF}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

/// The default cutoff list, k = 1..=10.
pub fn default_cutoffs() -> Vec<usize> {
    (1..=MAX_CUTOFF).collect()
}

/// Exact per-case metrics, aligned with the cutoff list they were computed
/// for.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseMetrics {
    hits_per_cutoff: Vec<u64>,
    true_count: u64,
    rr: BigRational,
    ap: BigRational,
}

/// Scores one test case: asks the recommender for 10 tags at the held-out
/// post's timestamp and measures them against the post's true tags.
pub fn evaluate_case(
    recommender: &dyn Recommender,
    case: &TestCase,
    cutoffs: &[usize],
) -> CaseMetrics {
    let recommendation =
        recommender.recommend(&case.user, &case.resource, case.timestamp, MAX_CUTOFF);
    let recommended: Vec<&str> = recommendation.tags().collect();
    CaseMetrics {
        hits_per_cutoff: cutoffs
            .iter()
            .map(|&k| hits(&recommended, &case.true_tags, k) as u64)
            .collect(),
        true_count: case.true_tags.len() as u64,
        rr: reciprocal_rank_exact(&recommended, &case.true_tags, MAX_CUTOFF),
        ap: average_precision_exact(&recommended, &case.true_tags, MAX_CUTOFF),
    }
}

/// Order-insensitive exact reduction of per-case metrics.
#[derive(Debug, Clone)]
pub struct MetricAccumulator {
    cutoffs: Vec<usize>,
    hit_sums: Vec<u64>,
    recall_sums: Vec<BigRational>,
    rr_sum: BigRational,
    ap_sum: BigRational,
    n: u64,
}

impl MetricAccumulator {
    pub fn new(cutoffs: &[usize]) -> Result<Self, EvalError> {
        if let Some(&bad) = cutoffs.iter().find(|&&k| k == 0 || k > MAX_CUTOFF) {
            return Err(EvalError::CutoffOutOfRange(bad));
        }
        Ok(MetricAccumulator {
            cutoffs: cutoffs.to_vec(),
            hit_sums: alloc::vec![0; cutoffs.len()],
            recall_sums: alloc::vec![BigRational::zero(); cutoffs.len()],
            rr_sum: BigRational::zero(),
            ap_sum: BigRational::zero(),
            n: 0,
        })
    }

    pub fn add(&mut self, case: CaseMetrics) {
        debug_assert_eq!(case.hits_per_cutoff.len(), self.cutoffs.len());
        for (i, h) in case.hits_per_cutoff.iter().enumerate() {
            self.hit_sums[i] += h;
            self.recall_sums[i] += ratio(*h, case.true_count);
        }
        self.rr_sum += case.rr;
        self.ap_sum += case.ap;
        self.n += 1;
    }

    pub fn merge(&mut self, other: MetricAccumulator) {
        debug_assert_eq!(self.cutoffs, other.cutoffs);
        for (i, h) in other.hit_sums.iter().enumerate() {
            self.hit_sums[i] += h;
        }
        for (i, r) in other.recall_sums.into_iter().enumerate() {
            self.recall_sums[i] += r;
        }
        self.rr_sum += other.rr_sum;
        self.ap_sum += other.ap_sum;
        self.n += other.n;
    }

    pub fn finish(self) -> Result<EvalReport, EvalError> {
        if self.n == 0 {
            return Err(EvalError::EmptyTestSet);
        }
        let n = BigInt::from(self.n);
        let mut precision = Vec::with_capacity(self.cutoffs.len());
        let mut recall = Vec::with_capacity(self.cutoffs.len());
        let mut f1 = Vec::with_capacity(self.cutoffs.len());
        for (i, &k) in self.cutoffs.iter().enumerate() {
            let p = ratio(self.hit_sums[i], k as u64 * self.n);
            let r = &self.recall_sums[i] / &n;
            let sum = &p + &r;
            let f = if sum.is_zero() {
                BigRational::zero()
            } else {
                BigRational::from(BigInt::from(2)) * &p * &r / sum
            };
            precision.push(p.to_f64().unwrap_or(0.0));
            recall.push(r.to_f64().unwrap_or(0.0));
            f1.push(f.to_f64().unwrap_or(0.0));
        }
        Ok(EvalReport {
            cutoffs: self.cutoffs,
            precision,
            recall,
            f1,
            mrr: (self.rr_sum / &n).to_f64().unwrap_or(0.0),
            map: (self.ap_sum / &n).to_f64().unwrap_or(0.0),
            n_posts: self.n as usize,
            wall_time_ms: 0,
        })
    }
}

/// Evaluates a recommender over a test set, single-threaded.
pub fn evaluate(
    recommender: &dyn Recommender,
    test: &[TestCase],
    cutoffs: &[usize],
) -> Result<EvalReport, EvalError> {
    let mut acc = MetricAccumulator::new(cutoffs)?;
    for case in test {
        acc.add(evaluate_case(recommender, case, cutoffs));
    }
    acc.finish()
}
