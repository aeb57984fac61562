//! Frozen, query-optimized view of a training folksonomy.
//!
//! [`build_index`] interns users, resources and tags into dense ids (assigned
//! in lexicographic order, so ids are reproducible) and materializes the
//! lookup structures every recommender needs: per-user posts, per-(user, tag)
//! timestamp lists, per-(resource, tag) assignment counts, global tag counts
//! and each user's latest post timestamp. The index never changes after
//! construction, so shared read-only access from multiple threads is safe.

use alloc::string::String;
use alloc::vec::Vec;

use crate::folksonomy::Folksonomy;

/// A post with all identifiers interned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedPost {
    pub resource: u32,
    pub timestamp: i64,
    /// Tag ids, ascending.
    pub tags: Vec<u32>,
}

/// Immutable query index over a training folksonomy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingIndex {
    users: Vec<String>,
    resources: Vec<String>,
    tags: Vec<String>,
    /// Posts per user id, ascending by resource id.
    user_posts: Vec<Vec<IndexedPost>>,
    /// Per user id: (tag id, timestamps ascending), ascending by tag id.
    user_tag_times: Vec<Vec<(u32, Vec<i64>)>>,
    /// Per resource id: (tag id, assignment count), ascending by tag id.
    resource_tag_counts: Vec<Vec<(u32, u32)>>,
    /// Global assignment count per tag id.
    tag_counts: Vec<u64>,
    /// Latest post timestamp per user id.
    user_latest: Vec<i64>,
    total_assignments: u64,
}

/// Builds the immutable training index for a folksonomy.
pub fn build_index(f: &Folksonomy) -> TrainingIndex {
    let mut users: Vec<String> = f.posts().iter().map(|p| p.user.clone()).collect();
    users.sort_unstable();
    users.dedup();
    let mut resources: Vec<String> = f.posts().iter().map(|p| p.resource.clone()).collect();
    resources.sort_unstable();
    resources.dedup();
    let mut tags: Vec<String> = f
        .posts()
        .iter()
        .flat_map(|p| p.tags().iter().cloned())
        .collect();
    tags.sort_unstable();
    tags.dedup();

    let user_id = |name: &str| users.binary_search_by(|u| u.as_str().cmp(name)).unwrap() as u32;
    let resource_id = |name: &str| {
        resources
            .binary_search_by(|r| r.as_str().cmp(name))
            .unwrap() as u32
    };
    let tag_id = |name: &str| tags.binary_search_by(|t| t.as_str().cmp(name)).unwrap() as u32;

    let mut user_posts: Vec<Vec<IndexedPost>> = alloc::vec![Vec::new(); users.len()];
    let mut user_tag_times: Vec<Vec<(u32, Vec<i64>)>> = alloc::vec![Vec::new(); users.len()];
    let mut resource_tag_counts: Vec<Vec<(u32, u32)>> = alloc::vec![Vec::new(); resources.len()];
    let mut tag_counts: Vec<u64> = alloc::vec![0; tags.len()];
    let mut user_latest: Vec<i64> = alloc::vec![i64::MIN; users.len()];
    let mut total_assignments = 0u64;

    for post in f.posts() {
        let u = user_id(&post.user) as usize;
        let r = resource_id(&post.resource) as usize;
        let tag_ids: Vec<u32> = post.tags().iter().map(|t| tag_id(t)).collect();
        for &t in &tag_ids {
            tag_counts[t as usize] += 1;
            total_assignments += 1;
            match user_tag_times[u].binary_search_by_key(&t, |e| e.0) {
                Ok(i) => user_tag_times[u][i].1.push(post.timestamp),
                Err(i) => user_tag_times[u].insert(i, (t, alloc::vec![post.timestamp])),
            }
            match resource_tag_counts[r].binary_search_by_key(&t, |e| e.0) {
                Ok(i) => resource_tag_counts[r][i].1 += 1,
                Err(i) => resource_tag_counts[r].insert(i, (t, 1)),
            }
        }
        user_latest[u] = user_latest[u].max(post.timestamp);
        user_posts[u].push(IndexedPost {
            resource: r as u32,
            timestamp: post.timestamp,
            tags: tag_ids,
        });
    }
    // Posts arrive in (user, resource) order, so per-user lists are already
    // ascending by resource id; timestamp lists still need sorting.
    for entries in &mut user_tag_times {
        for (_, times) in entries.iter_mut() {
            times.sort_unstable();
        }
    }

    TrainingIndex {
        users,
        resources,
        tags,
        user_posts,
        user_tag_times,
        resource_tag_counts,
        tag_counts,
        user_latest,
        total_assignments,
    }
}

impl TrainingIndex {
    pub fn user_id(&self, name: &str) -> Option<u32> {
        self.users
            .binary_search_by(|u| u.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    pub fn resource_id(&self, name: &str) -> Option<u32> {
        self.resources
            .binary_search_by(|r| r.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    pub fn tag_id(&self, name: &str) -> Option<u32> {
        self.tags
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    /// All distinct users, lexicographically sorted; position equals id.
    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn tag_name(&self, tag: u32) -> &str {
        &self.tags[tag as usize]
    }

    pub fn user_name(&self, user: u32) -> &str {
        &self.users[user as usize]
    }

    pub fn resource_name(&self, resource: u32) -> &str {
        &self.resources[resource as usize]
    }

    /// The user's posts, ascending by resource id.
    pub fn user_posts(&self, user: u32) -> &[IndexedPost] {
        &self.user_posts[user as usize]
    }

    /// Timestamps of the user's assignments per tag, ascending by tag id;
    /// each timestamp list is ascending too.
    pub fn user_tag_times(&self, user: u32) -> &[(u32, Vec<i64>)] {
        &self.user_tag_times[user as usize]
    }

    /// Assignment counts per tag on a resource, ascending by tag id.
    pub fn resource_tag_counts(&self, resource: u32) -> &[(u32, u32)] {
        &self.resource_tag_counts[resource as usize]
    }

    /// Global assignment count of a tag.
    pub fn tag_count(&self, tag: u32) -> u64 {
        self.tag_counts[tag as usize]
    }

    /// Latest post timestamp of a user.
    pub fn user_latest(&self, user: u32) -> i64 {
        self.user_latest[user as usize]
    }

    pub fn total_assignments(&self) -> u64 {
        self.total_assignments
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}
