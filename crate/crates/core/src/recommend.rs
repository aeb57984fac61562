//! Recommendation lists, the recommender interface and the algorithm
//! registry.
//!
//! Every recommender in this crate produces a [`Recommendation`]: at most k
//! (tag, score) pairs with non-increasing scores, ties broken by ascending
//! tag name, no duplicates. The shared [`Recommender`] trait hides per-query
//! state behind a pure function of (user, resource, reference time, k);
//! implementations are bound to a frozen [`TrainingIndex`] at construction,
//! which is also where one-off precomputation (CF norms, the graph and its
//! uniform-preference PageRank) happens.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::frequency::{self, CfModel};
use crate::graph::GraphModel;
use crate::index::TrainingIndex;
use crate::temporal::{self, DecayParams};

/// One recommended tag with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTag {
    pub tag: String,
    pub score: f64,
}

/// Ranked list of at most k scored tags.
///
/// Ordering is total and deterministic: descending score, then ascending tag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Recommendation {
    items: Vec<ScoredTag>,
}

impl Recommendation {
    pub fn empty() -> Self {
        Recommendation { items: Vec::new() }
    }

    /// Sorts `scores` (descending score, ascending tag), keeps the first `k`.
    ///
    /// Scores must be finite; -0.0 is normalized to 0.0 so that numerically
    /// equal scores always fall through to the tag tie-break.
    pub fn from_scores(scores: Vec<(String, f64)>, k: usize) -> Self {
        let mut items: Vec<ScoredTag> = scores
            .into_iter()
            .map(|(tag, score)| ScoredTag {
                tag,
                score: score + 0.0,
            })
            .collect();
        items.sort_by(|a, b| match b.score.partial_cmp(&a.score) {
            Some(Ordering::Equal) | None => a.tag.cmp(&b.tag),
            Some(ord) => ord,
        });
        items.truncate(k);
        Recommendation { items }
    }

    pub fn items(&self) -> &[ScoredTag] {
        &self.items
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|s| s.tag.as_str())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// A tag recommender bound to a frozen training index.
///
/// Implementations must be pure: for fixed construction inputs, the result
/// depends only on (user, resource, ref_time, k).
pub trait Recommender {
    fn recommend(&self, user: &str, resource: &str, ref_time: i64, k: usize) -> Recommendation;
}

impl<F> Recommender for F
where
    F: Fn(&str, &str, i64, usize) -> Recommendation,
{
    fn recommend(&self, user: &str, resource: &str, ref_time: i64, k: usize) -> Recommendation {
        self(user, resource, ref_time, k)
    }
}

/// The registered algorithms, by their command-line names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    /// `mp`: globally most popular tags.
    Mp,
    /// `mp_u`: most popular tags of the user.
    MpU,
    /// `mp_r`: most popular tags of the resource.
    MpR,
    /// `mp_ur`: normalized mixture of `mp_u` and `mp_r`.
    MpUr,
    /// `cf`: user-based collaborative filtering.
    Cf,
    /// `bll`: base-level learning (power-law decay over all usages).
    Bll,
    /// `bll_c`: `bll` mixed with resource tag popularity.
    BllC,
    /// `girp`: exponential decay over first and last usage.
    Girp,
    /// `girptm`: `girp` mixed with resource tag popularity.
    Girptm,
    /// `apr`: adapted PageRank with a query-boosted preference vector.
    Apr,
    /// `fr`: FolkRank, the differential PageRank.
    Fr,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 11] = [
        AlgorithmKind::Mp,
        AlgorithmKind::MpU,
        AlgorithmKind::MpR,
        AlgorithmKind::MpUr,
        AlgorithmKind::Cf,
        AlgorithmKind::Bll,
        AlgorithmKind::BllC,
        AlgorithmKind::Girp,
        AlgorithmKind::Girptm,
        AlgorithmKind::Apr,
        AlgorithmKind::Fr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Mp => "mp",
            AlgorithmKind::MpU => "mp_u",
            AlgorithmKind::MpR => "mp_r",
            AlgorithmKind::MpUr => "mp_ur",
            AlgorithmKind::Cf => "cf",
            AlgorithmKind::Bll => "bll",
            AlgorithmKind::BllC => "bll_c",
            AlgorithmKind::Girp => "girp",
            AlgorithmKind::Girptm => "girptm",
            AlgorithmKind::Apr => "apr",
            AlgorithmKind::Fr => "fr",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.name() == name)
    }
}

/// Tunable parameters shared by the algorithm registry.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmParams {
    pub decay: DecayParams,
    /// Mixing weight of the user component in `mp_ur`.
    pub mix: f64,
    /// Neighborhood size for collaborative filtering.
    pub neighbors: usize,
    /// PageRank damping factor.
    pub damping: f64,
    /// PageRank L1 convergence threshold.
    pub tol: f64,
    /// PageRank iteration cap.
    pub max_iter: usize,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            decay: DecayParams::default(),
            mix: 0.5,
            neighbors: 20,
            damping: 0.7,
            tol: 1e-6,
            max_iter: 100,
        }
    }
}

/// Instantiates a recommender for `kind`, performing any per-index
/// precomputation up front so queries are read-only afterwards.
pub fn build_recommender<'a>(
    kind: AlgorithmKind,
    params: &AlgorithmParams,
    index: &'a TrainingIndex,
) -> Box<dyn Recommender + Send + Sync + 'a> {
    match kind {
        AlgorithmKind::Mp => {
            Box::new(move |_: &str, _: &str, _: i64, k: usize| frequency::mp(index, k))
        }
        AlgorithmKind::MpU => {
            Box::new(move |user: &str, _: &str, _: i64, k: usize| frequency::mp_u(index, user, k))
        }
        AlgorithmKind::MpR => Box::new(move |_: &str, resource: &str, _: i64, k: usize| {
            frequency::mp_r(index, resource, k)
        }),
        AlgorithmKind::MpUr => {
            let mix = params.mix;
            Box::new(move |user: &str, resource: &str, _: i64, k: usize| {
                frequency::mp_ur(index, user, resource, k, mix)
            })
        }
        AlgorithmKind::Cf => {
            let model = CfModel::new(index, params.neighbors);
            Box::new(move |user: &str, _: &str, _: i64, k: usize| model.recommend(user, k))
        }
        AlgorithmKind::Bll => {
            let decay = params.decay.clone();
            Box::new(move |user: &str, _: &str, ref_time: i64, k: usize| {
                temporal::bll_recommend(index, user, ref_time, k, &decay)
            })
        }
        AlgorithmKind::BllC => {
            let decay = params.decay.clone();
            Box::new(move |user: &str, resource: &str, ref_time: i64, k: usize| {
                temporal::bll_c_recommend(index, user, resource, ref_time, k, &decay)
            })
        }
        AlgorithmKind::Girp => {
            let decay = params.decay.clone();
            Box::new(move |user: &str, _: &str, ref_time: i64, k: usize| {
                temporal::girp_recommend(index, user, ref_time, k, &decay)
            })
        }
        AlgorithmKind::Girptm => {
            let decay = params.decay.clone();
            Box::new(move |user: &str, resource: &str, ref_time: i64, k: usize| {
                temporal::girptm_recommend(index, user, resource, ref_time, k, &decay)
            })
        }
        AlgorithmKind::Apr => {
            let model = GraphModel::new(index, params.damping, params.tol, params.max_iter);
            Box::new(move |user: &str, resource: &str, _: i64, k: usize| {
                model.apr_recommend(user, resource, k)
            })
        }
        AlgorithmKind::Fr => {
            let model = GraphModel::new(index, params.damping, params.tol, params.max_iter);
            Box::new(move |user: &str, resource: &str, _: i64, k: usize| {
                model.fr_recommend(user, resource, k)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn ordering_is_score_desc_then_tag_asc() {
        let rec = Recommendation::from_scores(
            vec![
                ("b".to_string(), 1.0),
                ("a".to_string(), 1.0),
                ("c".to_string(), 2.0),
                ("d".to_string(), 0.5),
            ],
            3,
        );
        let tags: Vec<&str> = rec.tags().collect();
        assert_eq!(tags, ["c", "a", "b"]);
    }

    #[test]
    fn negative_zero_ties_with_zero() {
        let rec =
            Recommendation::from_scores(vec![("b".to_string(), 0.0), ("a".to_string(), -0.0)], 2);
        let tags: Vec<&str> = rec.tags().collect();
        assert_eq!(tags, ["a", "b"]);
    }

    #[test]
    fn truncates_to_k() {
        let rec = Recommendation::from_scores(
            vec![
                ("a".to_string(), 3.0),
                ("b".to_string(), 2.0),
                ("c".to_string(), 1.0),
            ],
            2,
        );
        assert_eq!(rec.len(), 2);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for kind in AlgorithmKind::ALL {
            assert_eq!(AlgorithmKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(AlgorithmKind::parse("pitf"), None);
    }
}
