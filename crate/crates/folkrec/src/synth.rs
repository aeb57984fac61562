//! Seeded synthetic folksonomy generator.
//!
//! Each user writes a random number of posts with strictly increasing
//! timestamps. Every tag slot of a post reuses one of the user's earlier
//! tags with probability `reuse_bias`; the reused tag is drawn with a weight
//! that mixes plain frequency with a recency-rank weight (1/rank, rank 1
//! being the most recently used tag), blended by `recency_bias`. Fresh tags
//! are drawn uniformly from a shared base vocabulary, never repeating a tag
//! the user already has, so `reuse_bias = 0` yields per-user unique tags.
//!
//! Resource selection follows the two folksonomy shapes: with
//! `resource_pool = 0` every post gets a globally unique resource (a narrow
//! folksonomy, where a held-out post's resource never occurs in training);
//! with a positive pool size resources are shared across users (broad), so
//! resource-based recommenders have signal and p-core pruning can retain
//! posts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use folkrec_core::{Folksonomy, Post};

/// Generator knobs; everything is driven by the single seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub users: usize,
    /// Size of the shared vocabulary fresh tags are drawn from.
    pub base_tags: usize,
    /// Probability that a tag slot reuses one of the user's earlier tags.
    pub reuse_bias: f64,
    /// 0 = reuse by frequency only, 1 = reuse by recency rank only.
    pub recency_bias: f64,
    pub seed: u64,
    /// Posts per user are drawn uniformly from 1..=max_posts_per_user.
    pub max_posts_per_user: usize,
    /// 0 = every post gets a fresh resource (narrow folksonomy); otherwise
    /// resources come from a shared pool of this size (broad folksonomy).
    pub resource_pool: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            users: 100,
            base_tags: 100,
            reuse_bias: 0.5,
            recency_bias: 0.5,
            seed: 7,
            max_posts_per_user: 20,
            resource_pool: 0,
        }
    }
}

struct TagHistory {
    names: Vec<String>,
    counts: Vec<u64>,
    last_used: Vec<u64>,
}

impl TagHistory {
    fn record(&mut self, name: &str, sequence: u64) {
        match self.names.iter().position(|n| n == name) {
            Some(i) => {
                self.counts[i] += 1;
                self.last_used[i] = sequence;
            }
            None => {
                self.names.push(name.to_string());
                self.counts.push(1);
                self.last_used.push(sequence);
            }
        }
    }
}

/// Draws an index from `weights` (non-negative, not all zero).
fn weighted_choice(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        x -= w;
        if x <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Generates a corpus; identical parameters give identical output.
pub fn generate_synthetic(params: &SynthParams) -> Folksonomy {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut posts = Vec::new();
    let mut resource_counter = 0u64;
    let mut sequence = 0u64;

    for user_no in 0..params.users {
        let user = format!("u{user_no:06}");
        let n_posts = rng.gen_range(1..=params.max_posts_per_user.max(1));
        let mut time = rng.gen_range(1_000_000i64..2_000_000);
        let mut history = TagHistory {
            names: Vec::new(),
            counts: Vec::new(),
            last_used: Vec::new(),
        };
        let mut fresh_pool: Vec<usize> = (0..params.base_tags).collect();
        let mut unused_resources: Vec<usize> = (0..params.resource_pool).collect();
        let mut overflow = 0usize;

        for _ in 0..n_posts {
            time += rng.gen_range(3_600i64..=604_800);
            let n_tags = rng.gen_range(1..=3usize);
            let mut post_tags: Vec<String> = Vec::with_capacity(n_tags);

            for _ in 0..n_tags {
                let reused = !history.names.is_empty() && rng.gen::<f64>() < params.reuse_bias;
                let candidates: Vec<usize> = if reused {
                    (0..history.names.len())
                        .filter(|&i| !post_tags.contains(&history.names[i]))
                        .collect()
                } else {
                    Vec::new()
                };
                let tag = if !candidates.is_empty() {
                    // Recency rank 1 = most recently used candidate.
                    let mut by_recency: Vec<usize> = candidates.clone();
                    by_recency.sort_by_key(|&i| std::cmp::Reverse(history.last_used[i]));
                    let total_count: u64 = candidates.iter().map(|&i| history.counts[i]).sum();
                    let harmonic: f64 = (1..=candidates.len()).map(|r| 1.0 / r as f64).sum();
                    let weights: Vec<f64> = candidates
                        .iter()
                        .map(|&i| {
                            let freq = history.counts[i] as f64 / total_count as f64;
                            let rank = by_recency.iter().position(|&j| j == i).unwrap() + 1;
                            let recency = 1.0 / rank as f64 / harmonic;
                            (1.0 - params.recency_bias) * freq + params.recency_bias * recency
                        })
                        .collect();
                    history.names[candidates[weighted_choice(&mut rng, &weights)]].clone()
                } else if !fresh_pool.is_empty() {
                    let i = rng.gen_range(0..fresh_pool.len());
                    format!("g{:06}", fresh_pool.swap_remove(i))
                } else {
                    overflow += 1;
                    format!("x{user_no:06}_{overflow}")
                };
                if !post_tags.contains(&tag) {
                    post_tags.push(tag);
                }
            }

            sequence += 1;
            for tag in &post_tags {
                history.record(tag, sequence);
            }
            // Draw from the shared pool without repeating a resource within
            // this user; fall back to a fresh one when the pool runs dry.
            let resource = if !unused_resources.is_empty() {
                let i = rng.gen_range(0..unused_resources.len());
                format!("s{:06}", unused_resources.swap_remove(i))
            } else {
                resource_counter += 1;
                format!("r{:09}", resource_counter - 1)
            };
            posts.push(
                Post::new(user.clone(), resource, post_tags, time)
                    .expect("generated posts are valid"),
            );
        }
    }
    Folksonomy::from_posts(posts).expect("generated resources are unique")
}
