//! Frequency-based recommenders and user-based collaborative filtering.
//!
//! `mp` ranks tags by their global assignment count, `mp_u` by their count in
//! the user's history, `mp_r` by their count on the resource. `mp_ur` mixes
//! the user and resource components after normalizing each with the same
//! softmax used by the time-decay recommenders, so both live on a 0..1 scale
//! before mixing. Collaborative filtering scores tags by the cosine-weighted
//! tag frequencies of the query user's most similar neighbors.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::index::TrainingIndex;
use crate::math;
use crate::recommend::Recommendation;
use crate::temporal::softmax_in_place;

/// Top-k tags by global assignment count; identical for every query.
pub fn mp(index: &TrainingIndex, k: usize) -> Recommendation {
    let scores = index
        .tags()
        .iter()
        .enumerate()
        .map(|(t, name)| (name.clone(), index.tag_count(t as u32) as f64))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// Top-k tags by frequency in the user's tag assignments.
pub fn mp_u(index: &TrainingIndex, user: &str, k: usize) -> Recommendation {
    let Some(u) = index.user_id(user) else {
        return Recommendation::empty();
    };
    let scores = index
        .user_tag_times(u)
        .iter()
        .map(|(t, times)| (index.tag_name(*t).into(), times.len() as f64))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// Top-k tags by frequency in the resource's tag assignments. Resources never
/// seen in training yield an empty list.
pub fn mp_r(index: &TrainingIndex, resource: &str, k: usize) -> Recommendation {
    let Some(r) = index.resource_id(resource) else {
        return Recommendation::empty();
    };
    let scores = index
        .resource_tag_counts(r)
        .iter()
        .map(|&(t, count)| (index.tag_name(t).into(), count as f64))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// Softmax-normalized tag counts of a user's history, as (tag id, weight).
pub(crate) fn user_component(index: &TrainingIndex, user: u32) -> Vec<(u32, f64)> {
    let entries = index.user_tag_times(user);
    let mut values: Vec<f64> = entries
        .iter()
        .map(|(_, times)| times.len() as f64)
        .collect();
    softmax_in_place(&mut values);
    entries.iter().map(|&(t, _)| t).zip(values).collect()
}

/// Softmax-normalized tag counts of a resource, as (tag id, weight).
pub(crate) fn resource_component(index: &TrainingIndex, resource: u32) -> Vec<(u32, f64)> {
    let entries = index.resource_tag_counts(resource);
    let mut values: Vec<f64> = entries.iter().map(|&(_, c)| c as f64).collect();
    softmax_in_place(&mut values);
    entries.iter().map(|&(t, _)| t).zip(values).collect()
}

/// Mixes two normalized per-tag components over the union of their supports
/// and drops candidates whose mixed score is exactly zero (those are only
/// backed by a component weighted with 0).
pub(crate) fn mix_components(
    index: &TrainingIndex,
    first: Vec<(u32, f64)>,
    second: Vec<(u32, f64)>,
    weight_first: f64,
    k: usize,
) -> Recommendation {
    let mut merged: Vec<(u32, f64)> = Vec::with_capacity(first.len() + second.len());
    for (t, v) in first {
        merged.push((t, weight_first * v));
    }
    for (t, v) in second {
        let contribution = (1.0 - weight_first) * v;
        match merged.binary_search_by_key(&t, |e| e.0) {
            Ok(i) => merged[i].1 += contribution,
            Err(i) => merged.insert(i, (t, contribution)),
        }
    }
    let scores = merged
        .into_iter()
        .filter(|&(_, s)| s != 0.0)
        .map(|(t, s)| (index.tag_name(t).into(), s))
        .collect();
    Recommendation::from_scores(scores, k)
}

/// Mixture of the user's and the resource's most popular tags,
/// `mix` weighting the user component.
pub fn mp_ur(
    index: &TrainingIndex,
    user: &str,
    resource: &str,
    k: usize,
    mix: f64,
) -> Recommendation {
    let first = index
        .user_id(user)
        .map(|u| user_component(index, u))
        .unwrap_or_default();
    let second = index
        .resource_id(resource)
        .map(|r| resource_component(index, r))
        .unwrap_or_default();
    mix_components(index, first, second, mix, k)
}

/// User-based collaborative filtering with per-user norms precomputed.
///
/// Neighbors are the `neighbors` users most cosine-similar to the query
/// user's tag-frequency vector (similarity strictly positive, query user
/// excluded; ties broken by ascending user id). Candidate tags come from the
/// neighbors' full profiles, scored by similarity-weighted frequency.
pub struct CfModel<'a> {
    index: &'a TrainingIndex,
    neighbors: usize,
    norms: Vec<f64>,
}

impl<'a> CfModel<'a> {
    pub fn new(index: &'a TrainingIndex, neighbors: usize) -> Self {
        let norms = (0..index.users().len() as u32)
            .map(|u| {
                let ss: f64 = index
                    .user_tag_times(u)
                    .iter()
                    .map(|(_, times)| {
                        let c = times.len() as f64;
                        c * c
                    })
                    .sum();
                math::sqrt(ss)
            })
            .collect();
        CfModel {
            index,
            neighbors,
            norms,
        }
    }

    fn dot(&self, a: u32, b: u32) -> f64 {
        let xs = self.index.user_tag_times(a);
        let ys = self.index.user_tag_times(b);
        let (mut i, mut j) = (0, 0);
        let mut dot = 0.0;
        while i < xs.len() && j < ys.len() {
            match xs[i].0.cmp(&ys[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    dot += xs[i].1.len() as f64 * ys[j].1.len() as f64;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }

    /// The selected neighborhood of `user`: up to `neighbors` users with
    /// strictly positive cosine similarity, most similar first, similarity
    /// ties broken by ascending user id.
    pub fn neighborhood(&self, user: &str) -> Vec<(u32, f64)> {
        let Some(u) = self.index.user_id(user) else {
            return Vec::new();
        };
        if self.norms[u as usize] == 0.0 {
            return Vec::new();
        }
        let mut sims: Vec<(u32, f64)> = Vec::new();
        for v in 0..self.index.users().len() as u32 {
            if v == u || self.norms[v as usize] == 0.0 {
                continue;
            }
            let dot = self.dot(u, v);
            if dot > 0.0 {
                sims.push((v, dot / (self.norms[u as usize] * self.norms[v as usize])));
            }
        }
        sims.sort_by(|a, b| match b.1.partial_cmp(&a.1) {
            Some(Ordering::Equal) | None => a.0.cmp(&b.0),
            Some(ord) => ord,
        });
        sims.truncate(self.neighbors);
        sims
    }

    pub fn recommend(&self, user: &str, k: usize) -> Recommendation {
        let mut scores: Vec<(u32, f64)> = Vec::new();
        for (v, sim) in self.neighborhood(user) {
            for (t, times) in self.index.user_tag_times(v) {
                let contribution = sim * times.len() as f64;
                match scores.binary_search_by_key(t, |e| e.0) {
                    Ok(i) => scores[i].1 += contribution,
                    Err(i) => scores.insert(i, (*t, contribution)),
                }
            }
        }
        let named = scores
            .into_iter()
            .map(|(t, s)| (self.index.tag_name(t).into(), s))
            .collect();
        Recommendation::from_scores(named, k)
    }
}

/// One-off collaborative filtering query; `resource` is accepted for
/// interface parity but candidates are taken from neighbor profiles, which
/// is what keeps CF defined on resources never seen in training.
pub fn cf(
    index: &TrainingIndex,
    user: &str,
    _resource: &str,
    k: usize,
    neighbors: usize,
) -> Recommendation {
    CfModel::new(index, neighbors).recommend(user, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folksonomy::{Folksonomy, Post};
    use crate::index::build_index;
    use alloc::vec;
    use alloc::vec::Vec;

    fn post(user: &str, resource: &str, tags: &[&str], ts: i64) -> Post {
        Post::new(user, resource, tags.iter().copied(), ts).unwrap()
    }

    fn index(posts: Vec<Post>) -> TrainingIndex {
        build_index(&Folksonomy::from_posts(posts).unwrap())
    }

    fn tags(rec: &Recommendation) -> Vec<&str> {
        rec.tags().collect()
    }

    #[test]
    fn mp_ranks_by_global_count() {
        // a: 5 assignments, b: 3, c: 1.
        let idx = index(vec![
            post("u1", "r1", &["a", "b"], 1),
            post("u1", "r2", &["a", "b"], 2),
            post("u2", "r1", &["a", "b"], 3),
            post("u2", "r2", &["a"], 4),
            post("u3", "r3", &["a", "c"], 5),
        ]);
        let rec = mp(&idx, 2);
        assert_eq!(tags(&rec), ["a", "b"]);
        assert_eq!(rec.items()[0].score, 5.0);
        assert_eq!(rec.items()[1].score, 3.0);
    }

    #[test]
    fn mp_breaks_count_ties_lexicographically() {
        let idx = index(vec![post("u1", "r1", &["a", "b"], 1)]);
        assert_eq!(tags(&mp(&idx, 1)), ["a"]);
    }

    #[test]
    fn mp_returns_all_tags_when_k_exceeds_vocabulary() {
        let idx = index(vec![post("u1", "r1", &["a", "b"], 1)]);
        assert_eq!(mp(&idx, 10).len(), 2);
    }

    #[test]
    fn mp_u_counts_user_history() {
        let idx = index(vec![
            post("u1", "r1", &["a"], 1),
            post("u1", "r2", &["a"], 2),
            post("u1", "r3", &["a", "b"], 3),
        ]);
        let rec = mp_u(&idx, "u1", 2);
        assert_eq!(tags(&rec), ["a", "b"]);
        assert_eq!(rec.items()[0].score, 3.0);
        assert_eq!(rec.items()[1].score, 1.0);
    }

    #[test]
    fn mp_u_unknown_user_is_empty() {
        let idx = index(vec![post("u1", "r1", &["a"], 1)]);
        assert!(mp_u(&idx, "ghost", 5).is_empty());
    }

    #[test]
    fn mp_u_tie_break() {
        let idx = index(vec![
            post("u1", "r1", &["a", "b"], 1),
            post("u1", "r2", &["a", "b", "c"], 2),
        ]);
        assert_eq!(tags(&mp_u(&idx, "u1", 2)), ["a", "b"]);
    }

    #[test]
    fn mp_r_counts_resource_tags() {
        let idx = index(vec![
            post("u1", "r1", &["x"], 1),
            post("u2", "r1", &["x"], 2),
            post("u3", "r1", &["x", "y"], 3),
            post("u4", "r1", &["x"], 4),
        ]);
        let rec = mp_r(&idx, "r1", 2);
        assert_eq!(tags(&rec), ["x", "y"]);
        assert_eq!(rec.items()[0].score, 4.0);
    }

    #[test]
    fn mp_r_unseen_resource_is_empty() {
        let idx = index(vec![post("u1", "r1", &["x"], 1)]);
        assert!(mp_r(&idx, "r999", 5).is_empty());
    }

    #[test]
    fn mp_ur_on_unseen_resource_reduces_to_mp_u() {
        let idx = index(vec![
            post("u1", "r1", &["a"], 1),
            post("u1", "r2", &["a", "b"], 2),
        ]);
        let mixed = mp_ur(&idx, "u1", "r999", 10, 0.5);
        assert_eq!(tags(&mixed), tags(&mp_u(&idx, "u1", 10)));
    }

    #[test]
    fn mp_ur_on_unknown_user_reduces_to_mp_r() {
        let idx = index(vec![
            post("u1", "r1", &["a", "b"], 1),
            post("u2", "r1", &["a"], 2),
        ]);
        let mixed = mp_ur(&idx, "ghost", "r1", 10, 0.5);
        assert_eq!(tags(&mixed), tags(&mp_r(&idx, "r1", 10)));
    }

    #[test]
    fn mp_ur_singleton_components_score_half_each() {
        let idx = index(vec![
            post("u1", "r1", &["a"], 1),
            post("u2", "r2", &["b"], 2),
        ]);
        // u1 only ever used a; r2 only carries b. Each softmax is 1.0 over a
        // singleton support, so both mix to 0.5.
        let rec = mp_ur(&idx, "u1", "r2", 10, 0.5);
        assert_eq!(tags(&rec), ["a", "b"]);
        assert!((rec.items()[0].score - 0.5).abs() < 1e-15);
        assert!((rec.items()[1].score - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cf_hand_computed_cosine() {
        // u1 = {a:1}, u2 = {a:1, b:1}: sim = 1/sqrt(2); both tags score
        // sim * 1, ordered lexicographically.
        let idx = index(vec![
            post("u1", "r1", &["a"], 1),
            post("u2", "r2", &["a", "b"], 2),
        ]);
        let rec = cf(&idx, "u1", "r9", 10, 20);
        assert_eq!(tags(&rec), ["a", "b"]);
        let expected = 1.0 / 2f64.sqrt();
        assert!((rec.items()[0].score - expected).abs() < 1e-15);
        assert!((rec.items()[1].score - expected).abs() < 1e-15);
    }

    #[test]
    fn cf_unknown_user_is_empty() {
        let idx = index(vec![post("u1", "r1", &["a"], 1)]);
        assert!(cf(&idx, "ghost", "r1", 5, 20).is_empty());
    }

    #[test]
    fn cf_without_overlapping_tags_is_empty() {
        let idx = index(vec![
            post("u1", "r1", &["a"], 1),
            post("u2", "r2", &["b"], 2),
        ]);
        assert!(cf(&idx, "u1", "r1", 5, 20).is_empty());
    }

    #[test]
    fn cf_neighborhood_is_capped() {
        // Three identical neighbors but n=1: only the smallest user id wins.
        let idx = index(vec![
            post("q", "r0", &["a"], 1),
            post("v1", "r1", &["a", "z1"], 1),
            post("v2", "r2", &["a", "z2"], 1),
            post("v3", "r3", &["a", "z3"], 1),
        ]);
        let rec = cf(&idx, "q", "r9", 10, 1);
        let t = tags(&rec);
        assert!(t.contains(&"z1"));
        assert!(!t.contains(&"z2"));
        assert!(!t.contains(&"z3"));
    }
}
