//! Time-decay recommenders.
//!
//! The base-level activation of a tag in a user's history is
//!
//! ```text
//! BLA(t, u) = ln( sum over usages i of (ref_time - timestamp_i)^(-d) )
//! ```
//!
//! so a tag gains activation from every past usage, with each usage's
//! contribution decaying as a power law of its age. Recencies are clamped to
//! at least `min_recency` seconds, which keeps the sum finite when a usage
//! coincides with the reference time. Activations are mapped onto 0..1 with a
//! stable softmax over the user's tags.
//!
//! `bll_c` mixes the normalized activation with the softmax-normalized tag
//! counts of the queried resource, weighting the user side with `beta`.
//!
//! `girp` is the exponential first/last-usage baseline: a tag's raw score is
//! its usage count times the mean of `exp(-lambda * age)` over the first and
//! the last usage only. It deliberately ignores everything in between; it is
//! a reconstruction of the published description, with `lambda` defaulting to
//! a one-day time constant. `girptm` adds the resource component exactly like
//! `bll_c` does.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frequency::{mix_components, resource_component};
use crate::index::TrainingIndex;
use crate::math;
use crate::recommend::Recommendation;

/// Parameters of the time-decay recommenders.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayParams {
    /// Power-law decay exponent.
    pub d: f64,
    /// Lower clamp for recencies, in seconds; must stay >= 1.
    pub min_recency: i64,
    /// Weight of the user component in the hybrid recommenders.
    pub beta: f64,
    /// Exponential decay rate per second for `girp`/`girptm`.
    pub lambda: f64,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams {
            d: 0.5,
            min_recency: 1,
            beta: 0.5,
            lambda: 1.0 / 86_400.0,
        }
    }
}

fn clamped_recency(ref_time: i64, timestamp: i64, min_recency: i64) -> f64 {
    (ref_time - timestamp).max(min_recency).max(1) as f64
}

/// Reference time for ad-hoc queries outside an evaluation: one second past
/// the user's latest training post (during evaluation the held-out post's
/// own timestamp is used instead). Unknown users get 0.
pub fn default_ref_time(index: &TrainingIndex, user: &str) -> i64 {
    index
        .user_id(user)
        .map(|u| index.user_latest(u) + 1)
        .unwrap_or(0)
}

fn bla_from_times(times: &[i64], ref_time: i64, params: &DecayParams) -> f64 {
    let sum: f64 = times
        .iter()
        .map(|&ts| math::powf(clamped_recency(ref_time, ts, params.min_recency), -params.d))
        .sum();
    math::ln(sum)
}

/// Base-level activation of `tag` in `user`'s history at `ref_time`.
///
/// `None` means the user never used the tag (or is unknown); the tag is then
/// simply not a candidate, there is no numeric score for it.
pub fn bla(
    index: &TrainingIndex,
    user: &str,
    tag: &str,
    ref_time: i64,
    params: &DecayParams,
) -> Option<f64> {
    let u = index.user_id(user)?;
    let t = index.tag_id(tag)?;
    let entries = index.user_tag_times(u);
    let i = entries.binary_search_by_key(&t, |e| e.0).ok()?;
    Some(bla_from_times(&entries[i].1, ref_time, params))
}

/// Numerically stable softmax: shifts by the maximum before exponentiating.
/// Empty input stays empty.
pub fn softmax_in_place(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in values.iter_mut() {
        *v = math::exp(*v - max);
        sum += *v;
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
}

/// Softmax over a score map; the outputs sum to 1.
pub fn softmax_normalize(scores: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let (keys, mut values): (Vec<String>, Vec<f64>) = scores.into_iter().unzip();
    softmax_in_place(&mut values);
    keys.into_iter().zip(values).collect()
}

/// Softmax-normalized base-level activations of a user's tags,
/// as (tag id, weight).
fn bll_component(
    index: &TrainingIndex,
    user: u32,
    ref_time: i64,
    params: &DecayParams,
) -> Vec<(u32, f64)> {
    let entries = index.user_tag_times(user);
    let mut values: Vec<f64> = entries
        .iter()
        .map(|(_, times)| bla_from_times(times, ref_time, params))
        .collect();
    softmax_in_place(&mut values);
    entries.iter().map(|&(t, _)| t).zip(values).collect()
}

/// Softmax-normalized GIRP scores of a user's tags, as (tag id, weight).
fn girp_component(
    index: &TrainingIndex,
    user: u32,
    ref_time: i64,
    params: &DecayParams,
) -> Vec<(u32, f64)> {
    let entries = index.user_tag_times(user);
    let mut values: Vec<f64> = entries
        .iter()
        .map(|(_, times)| {
            // Timestamp lists are ascending, so ends give first/last usage.
            let first = clamped_recency(ref_time, times[0], params.min_recency);
            let last = clamped_recency(ref_time, times[times.len() - 1], params.min_recency);
            times.len() as f64
                * (math::exp(-params.lambda * last) + math::exp(-params.lambda * first))
                / 2.0
        })
        .collect();
    softmax_in_place(&mut values);
    entries.iter().map(|&(t, _)| t).zip(values).collect()
}

/// Ranks the user's tags by softmax-normalized base-level activation.
pub fn bll_recommend(
    index: &TrainingIndex,
    user: &str,
    ref_time: i64,
    k: usize,
    params: &DecayParams,
) -> Recommendation {
    let Some(u) = index.user_id(user) else {
        return Recommendation::empty();
    };
    let scores = bll_component(index, u, ref_time, params)
        .into_iter()
        .map(|(t, s)| (index.tag_name(t).into(), s))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// Mixes base-level activation with the resource's tag popularity:
/// `beta * |BLA| + (1 - beta) * |count_r|`, both components softmax
/// normalized, candidates drawn from the union of both supports.
pub fn bll_c_recommend(
    index: &TrainingIndex,
    user: &str,
    resource: &str,
    ref_time: i64,
    k: usize,
    params: &DecayParams,
) -> Recommendation {
    let first = index
        .user_id(user)
        .map(|u| bll_component(index, u, ref_time, params))
        .unwrap_or_default();
    let second = index
        .resource_id(resource)
        .map(|r| resource_component(index, r))
        .unwrap_or_default();
    mix_components(index, first, second, params.beta, k)
}

/// Ranks the user's tags by the exponential first/last-usage score.
pub fn girp_recommend(
    index: &TrainingIndex,
    user: &str,
    ref_time: i64,
    k: usize,
    params: &DecayParams,
) -> Recommendation {
    let Some(u) = index.user_id(user) else {
        return Recommendation::empty();
    };
    let scores = girp_component(index, u, ref_time, params)
        .into_iter()
        .map(|(t, s)| (index.tag_name(t).into(), s))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// `girp` with the resource component mixed in, mirroring `bll_c`.
pub fn girptm_recommend(
    index: &TrainingIndex,
    user: &str,
    resource: &str,
    ref_time: i64,
    k: usize,
    params: &DecayParams,
) -> Recommendation {
    let first = index
        .user_id(user)
        .map(|u| girp_component(index, u, ref_time, params))
        .unwrap_or_default();
    let second = index
        .resource_id(resource)
        .map(|r| resource_component(index, r))
        .unwrap_or_default();
    mix_components(index, first, second, params.beta, k)
}
