//! Temporal leave-one-out splitting.
//!
//! For every user with at least two posts, the latest post (ties broken
//! towards the lexicographically larger resource id) is withheld as that
//! user's test case; everything else stays in training. Users with a single
//! post keep it in training and do not appear in the test set, since a
//! recommender cannot be asked about a user with no training history. The
//! held-out post's timestamp doubles as the reference time for time-decay
//! scoring.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::folksonomy::{Folksonomy, Post};

/// One held-out post.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub user: String,
    pub resource: String,
    pub true_tags: BTreeSet<String>,
    /// Timestamp of the held-out post; reference time for scoring.
    pub timestamp: i64,
}

/// Training folksonomy plus the per-user test cases, in user order.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Folksonomy,
    pub test: Vec<TestCase>,
}

/// Splits off each user's latest post as a test case.
pub fn leave_one_out_split(f: Folksonomy) -> SplitPair {
    let posts = f.into_posts();
    let mut train: Vec<Post> = Vec::with_capacity(posts.len());
    let mut test: Vec<TestCase> = Vec::new();

    // Posts are sorted by (user, resource), so users form contiguous runs.
    let mut run: Vec<Post> = Vec::new();
    let flush = |run: &mut Vec<Post>, train: &mut Vec<Post>, test: &mut Vec<TestCase>| {
        if run.len() < 2 {
            train.append(run);
            return;
        }
        let held_out = run
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| (a.timestamp, &a.resource).cmp(&(b.timestamp, &b.resource)))
            .map(|(i, _)| i)
            .unwrap();
        let post = run.remove(held_out);
        test.push(TestCase {
            user: post.user.clone(),
            resource: post.resource.clone(),
            true_tags: post.tags().iter().cloned().collect(),
            timestamp: post.timestamp,
        });
        train.append(run);
    };

    for post in posts {
        if run.last().is_some_and(|prev| prev.user != post.user) {
            flush(&mut run, &mut train, &mut test);
        }
        run.push(post);
    }
    flush(&mut run, &mut train, &mut test);

    SplitPair {
        train: Folksonomy::from_valid_posts(train),
        test,
    }
}
