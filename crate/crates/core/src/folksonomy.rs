//! Folksonomy domain model, preprocessing and p-core pruning.
//!
//! A [`Post`] (bookmark) is one user's complete tag set on one resource at one
//! point in time; a [`Folksonomy`] is a collection of posts with at most one
//! post per (user, resource) pair. A tag assignment is a single
//! (user, resource, tag, timestamp) quadruple, so a post with three tags
//! contributes three assignments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One (user, resource, tag, timestamp) quadruple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagAssignment {
    pub user: String,
    pub resource: String,
    pub tag: String,
    /// Epoch seconds, UTC.
    pub timestamp: i64,
}

/// One bookmark: a user's complete tag set for one resource.
///
/// Tags are kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub user: String,
    pub resource: String,
    tags: Vec<String>,
    pub timestamp: i64,
}

impl Post {
    /// Builds a post, sorting and deduplicating `tags`.
    pub fn new(
        user: impl Into<String>,
        resource: impl Into<String>,
        tags: impl IntoIterator<Item = impl Into<String>>,
        timestamp: i64,
    ) -> Result<Self, FolksonomyError> {
        let user = user.into();
        let resource = resource.into();
        let mut tags: Vec<String> = tags.into_iter().map(Into::into).collect();
        tags.sort_unstable();
        tags.dedup();
        if tags.is_empty() {
            return Err(FolksonomyError::EmptyTagSet { user, resource });
        }
        if timestamp < 0 {
            return Err(FolksonomyError::NegativeTimestamp {
                user,
                resource,
                timestamp,
            });
        }
        Ok(Post {
            user,
            resource,
            tags,
            timestamp,
        })
    }

    /// The post's tags, sorted and duplicate-free.
    pub fn tags(&self) -> &[String] {
        &self.tags
    }
}

/// Counts of the five folksonomy dimensions: bookmarks |B|, users |U|,
/// resources |R|, tags |T| and tag assignments |TAS|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FolksonomyStats {
    pub bookmarks: usize,
    pub users: usize,
    pub resources: usize,
    pub tags: usize,
    pub assignments: usize,
}

/// An immutable collection of posts with exactly one post per
/// (user, resource) pair, kept in (user, resource) order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Folksonomy {
    posts: Vec<Post>,
}

impl Folksonomy {
    /// Validates and adopts `posts`: every post needs a non-empty tag set and
    /// no two posts may share a (user, resource) pair.
    pub fn from_posts(mut posts: Vec<Post>) -> Result<Self, FolksonomyError> {
        posts.sort_by(|a, b| (&a.user, &a.resource).cmp(&(&b.user, &b.resource)));
        for w in posts.windows(2) {
            if w[0].user == w[1].user && w[0].resource == w[1].resource {
                return Err(FolksonomyError::DuplicatePost {
                    user: w[0].user.clone(),
                    resource: w[0].resource.clone(),
                });
            }
        }
        Ok(Folksonomy { posts })
    }

    /// Internal constructor for callers that already guarantee the invariants
    /// (subsets of an existing folksonomy keep them).
    pub(crate) fn from_valid_posts(posts: Vec<Post>) -> Self {
        Folksonomy { posts }
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn into_posts(self) -> Vec<Post> {
        self.posts
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Iterates all tag assignments; a post yields one per tag, all carrying
    /// the post's timestamp.
    pub fn assignments(&self) -> impl Iterator<Item = TagAssignment> + '_ {
        self.posts.iter().flat_map(|p| {
            p.tags.iter().map(move |t| TagAssignment {
                user: p.user.clone(),
                resource: p.resource.clone(),
                tag: t.clone(),
                timestamp: p.timestamp,
            })
        })
    }

    /// Distinct-entity counts over the current posts.
    pub fn stats(&self) -> FolksonomyStats {
        let mut users = BTreeSet::new();
        let mut resources = BTreeSet::new();
        let mut tags = BTreeSet::new();
        let mut assignments = 0usize;
        for p in &self.posts {
            users.insert(p.user.as_str());
            resources.insert(p.resource.as_str());
            for t in &p.tags {
                tags.insert(t.as_str());
            }
            assignments += p.tags.len();
        }
        FolksonomyStats {
            bookmarks: self.posts.len(),
            users: users.len(),
            resources: resources.len(),
            tags: tags.len(),
            assignments,
        }
    }
}

/// Errors raised while assembling a folksonomy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolksonomyError {
    DuplicatePost {
        user: String,
        resource: String,
    },
    EmptyTagSet {
        user: String,
        resource: String,
    },
    NegativeTimestamp {
        user: String,
        resource: String,
        timestamp: i64,
    },
}

impl fmt::Display for FolksonomyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolksonomyError::DuplicatePost { user, resource } => {
                write!(
                    f,
                    "duplicate post for user {user:?} and resource {resource:?}"
                )
            }
            FolksonomyError::EmptyTagSet { user, resource } => {
                write!(
                    f,
                    "post of user {user:?} on resource {resource:?} has no tags"
                )
            }
            FolksonomyError::NegativeTimestamp {
                user,
                resource,
                timestamp,
            } => {
                write!(
                    f,
                    "post of user {user:?} on resource {resource:?} has negative timestamp {timestamp}"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FolksonomyError {}

/// Lowercases all tags, drops blacklisted ones and removes posts that end up
/// with an empty tag set. Blacklist entries are matched after lowercasing.
pub fn preprocess(f: Folksonomy, blacklist: &BTreeSet<String>) -> Folksonomy {
    let posts = f
        .into_posts()
        .into_iter()
        .filter_map(|p| {
            let mut tags: Vec<String> = p
                .tags
                .into_iter()
                .map(|t| t.to_lowercase())
                .filter(|t| !blacklist.contains(t.as_str()))
                .collect();
            tags.sort_unstable();
            tags.dedup();
            if tags.is_empty() {
                None
            } else {
                Some(Post {
                    user: p.user,
                    resource: p.resource,
                    tags,
                    timestamp: p.timestamp,
                })
            }
        })
        .collect();
    Folksonomy::from_valid_posts(posts)
}

/// Restricts a folksonomy to its p-core: the maximal subset of posts in which
/// every user, every resource and every tag occurs in at least `p` posts.
///
/// Posts are the unit of occurrence and are removed wholesale. The maximal
/// subset is unique (valid subsets are closed under union), and iterated
/// removal of violating posts reaches exactly that subset. `p <= 1` returns
/// the input unchanged; an empty result is a valid outcome, not an error.
pub fn p_core(f: Folksonomy, p: usize) -> Folksonomy {
    if p <= 1 {
        return f;
    }
    let mut posts = f.into_posts();
    loop {
        let mut user_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut resource_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut tag_count: BTreeMap<&str, usize> = BTreeMap::new();
        for post in &posts {
            *user_count.entry(post.user.as_str()).or_default() += 1;
            *resource_count.entry(post.resource.as_str()).or_default() += 1;
            for t in &post.tags {
                *tag_count.entry(t.as_str()).or_default() += 1;
            }
        }
        let keep: Vec<bool> = posts
            .iter()
            .map(|post| {
                user_count[post.user.as_str()] >= p
                    && resource_count[post.resource.as_str()] >= p
                    && post.tags.iter().all(|t| tag_count[t.as_str()] >= p)
            })
            .collect();
        if keep.iter().all(|&k| k) {
            break;
        }
        let mut it = keep.iter();
        posts.retain(|_| *it.next().unwrap());
    }
    Folksonomy::from_valid_posts(posts)
}
