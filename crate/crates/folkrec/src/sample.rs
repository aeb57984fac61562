//! Seeded user sampling, for large narrow folksonomies where evaluating all
//! user profiles is too expensive.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use folkrec_core::Folksonomy;

/// Keeps the posts of `round(fraction * users)` users (at least one),
/// chosen by a seeded shuffle of the sorted user list. `fraction >= 1`
/// returns the input unchanged.
pub fn sample_users(f: Folksonomy, fraction: f64, seed: u64) -> Folksonomy {
    if fraction >= 1.0 {
        return f;
    }
    let mut users: Vec<&str> = f.posts().iter().map(|p| p.user.as_str()).collect();
    users.sort_unstable();
    users.dedup();
    let keep_count = ((fraction * users.len() as f64).round() as usize).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = users.partial_shuffle(&mut rng, keep_count);
    let mut keep: Vec<String> = chosen.iter().map(|u| u.to_string()).collect();
    keep.sort_unstable();

    let posts = f
        .posts()
        .iter()
        .filter(|p| keep.binary_search_by(|u| u.as_str().cmp(&p.user)).is_ok())
        .cloned()
        .collect();
    Folksonomy::from_posts(posts).expect("subset of a valid folksonomy stays valid")
}
