//! Adapted PageRank and FolkRank over the tripartite folksonomy graph.
//!
//! The graph has one node per user, resource and tag, connected by symmetric
//! weighted edges: w(u, t) counts the user's posts containing the tag,
//! w(u, r) the number of tags in the user's post on the resource, and
//! w(r, t) the number of users assigning the tag to the resource. Spreading
//! weights are obtained by normalizing with the target node's weighted
//! degree, which makes the transition matrix column-stochastic; isolated
//! nodes get a self-loop so no rank mass leaks.
//!
//! Adapted PageRank iterates `w <- damping * A * w + (1 - damping) * p`
//! from the uniform vector. FolkRank runs it twice, once with a preference
//! vector boosting the query user and resource and once with the uniform
//! preference, and ranks tags by the difference: tags that gain rank from
//! the boost are specific to the query.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::index::TrainingIndex;
use crate::recommend::Recommendation;

/// Preference mass placed on the query user and on the query resource when
/// boosting; the remainder is spread uniformly over all nodes.
pub const QUERY_BOOST: f64 = 0.25;

/// Undirected weighted tripartite graph in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct FolksonomyGraph {
    num_users: usize,
    num_resources: usize,
    /// Node names: users, then resources, then tags, each lexicographic.
    names: Vec<String>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    inv_degree: Vec<f64>,
    /// Nodes with no incident edge; they carry an implicit self-loop.
    isolated: Vec<bool>,
}

/// Builds the folksonomy graph for a training index.
pub fn build_graph(index: &TrainingIndex) -> FolksonomyGraph {
    let num_users = index.users().len();
    let num_resources = index.resources().len();
    let num_tags = index.tags().len();
    let user_node = |u: u32| u as usize;
    let resource_node = |r: u32| num_users + r as usize;
    let tag_node = |t: u32| num_users + num_resources + t as usize;

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..num_users as u32 {
        for (t, times) in index.user_tag_times(u) {
            edges.push((user_node(u), tag_node(*t), times.len() as f64));
        }
        for post in index.user_posts(u) {
            edges.push((
                user_node(u),
                resource_node(post.resource),
                post.tags.len() as f64,
            ));
        }
    }
    for r in 0..num_resources as u32 {
        for &(t, count) in index.resource_tag_counts(r) {
            edges.push((resource_node(r), tag_node(t), count as f64));
        }
    }

    let mut names = Vec::with_capacity(num_users + num_resources + num_tags);
    names.extend(index.users().iter().cloned());
    names.extend(index.resources().iter().cloned());
    names.extend(index.tags().iter().cloned());

    FolksonomyGraph::assemble(num_users, num_resources, names, &edges)
}

impl FolksonomyGraph {
    /// Builds a graph from explicit node names and undirected edges; meant
    /// for tests and synthetic benchmarks. Each `(i, j, w)` adds both
    /// directions; weights must be positive.
    pub fn from_parts(
        users: Vec<String>,
        resources: Vec<String>,
        tags: Vec<String>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self, GraphError> {
        let n = users.len() + resources.len() + tags.len();
        for &(i, j, w) in edges {
            if i >= n || j >= n || i == j {
                return Err(GraphError::NodeOutOfRange {
                    node: i.max(j),
                    nodes: n,
                });
            }
            if w.is_nan() || w <= 0.0 {
                return Err(GraphError::NonPositiveWeight);
            }
        }
        let num_users = users.len();
        let num_resources = resources.len();
        let mut names = users;
        names.extend(resources);
        names.extend(tags);
        Ok(Self::assemble(num_users, num_resources, names, edges))
    }

    fn assemble(
        num_users: usize,
        num_resources: usize,
        names: Vec<String>,
        edges: &[(usize, usize, f64)],
    ) -> Self {
        let n = names.len();
        let mut adjacency: Vec<Vec<(u32, f64)>> = alloc::vec![Vec::new(); n];
        for &(i, j, w) in edges {
            adjacency[i].push((j as u32, w));
            adjacency[j].push((i as u32, w));
        }
        let mut degree = alloc::vec![0.0f64; n];
        for (i, adj) in adjacency.iter_mut().enumerate() {
            adj.sort_unstable_by_key(|&(j, _)| j);
            degree[i] = adj.iter().map(|&(_, w)| w).sum();
        }
        let isolated: Vec<bool> = degree.iter().map(|&d| d == 0.0).collect();
        let inv_degree = degree
            .iter()
            .map(|&d| if d == 0.0 { 1.0 } else { 1.0 / d })
            .collect();

        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for adj in &adjacency {
            for &(j, w) in adj {
                neighbors.push(j);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        FolksonomyGraph {
            num_users,
            num_resources,
            names,
            offsets,
            neighbors,
            weights,
            inv_degree,
            isolated,
        }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn user_nodes(&self) -> Range<usize> {
        0..self.num_users
    }

    pub fn resource_nodes(&self) -> Range<usize> {
        self.num_users..self.num_users + self.num_resources
    }

    pub fn tag_nodes(&self) -> Range<usize> {
        self.num_users + self.num_resources..self.node_count()
    }

    pub fn node_name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn user_node(&self, name: &str) -> Option<usize> {
        let users = &self.names[self.user_nodes()];
        users.binary_search_by(|u| u.as_str().cmp(name)).ok()
    }

    pub fn resource_node(&self, name: &str) -> Option<usize> {
        let resources = &self.names[self.resource_nodes()];
        resources
            .binary_search_by(|r| r.as_str().cmp(name))
            .ok()
            .map(|i| self.num_users + i)
    }

    pub fn tag_node(&self, name: &str) -> Option<usize> {
        let base = self.num_users + self.num_resources;
        let tags = &self.names[base..];
        tags.binary_search_by(|t| t.as_str().cmp(name))
            .ok()
            .map(|i| base + i)
    }

    /// Incident edges of `node` as (neighbor, weight), ascending by neighbor.
    pub fn edges(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&j, &w)| (j as usize, w))
    }

    /// Weighted degree of `node`; isolated nodes report their self-loop.
    pub fn degree(&self, node: usize) -> f64 {
        if self.isolated[node] {
            1.0
        } else {
            1.0 / self.inv_degree[node]
        }
    }

    /// Entry (i, j) of the column-stochastic transition matrix.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        if self.isolated[j] {
            return if i == j { 1.0 } else { 0.0 };
        }
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.neighbors[range.clone()].binary_search(&(j as u32)) {
            Ok(pos) => self.weights[range.start + pos] * self.inv_degree[j],
            Err(_) => 0.0,
        }
    }

    /// `out = A * x` with A the column-stochastic transition matrix.
    fn spread(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.offsets[i]..self.offsets[i + 1];
            let mut acc = 0.0;
            for (&j, &w) in self.neighbors[range.clone()]
                .iter()
                .zip(&self.weights[range])
            {
                acc += w * self.inv_degree[j as usize] * x[j as usize];
            }
            if self.isolated[i] {
                acc += x[i];
            }
            *o = acc;
        }
    }
}

/// Errors from graph construction or preference vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    NodeOutOfRange { node: usize, nodes: usize },
    NonPositiveWeight,
    InvalidPreference,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NodeOutOfRange { node, nodes } => {
                write!(f, "edge endpoint {node} outside the {nodes} graph nodes")
            }
            GraphError::NonPositiveWeight => write!(f, "edge weights must be positive"),
            GraphError::InvalidPreference => {
                write!(f, "preference weights must be non-negative and sum to 1")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// Non-negative node weights with total mass 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceVector(Vec<f64>);

impl PreferenceVector {
    pub fn uniform(nodes: usize) -> Self {
        PreferenceVector(alloc::vec![1.0 / nodes as f64; nodes])
    }

    /// Places [`QUERY_BOOST`] on each of the query nodes present in the
    /// graph and spreads the remaining mass uniformly over all nodes.
    pub fn boosted(graph: &FolksonomyGraph, user: Option<&str>, resource: Option<&str>) -> Self {
        let n = graph.node_count();
        let user_node = user.and_then(|u| graph.user_node(u));
        let resource_node = resource.and_then(|r| graph.resource_node(r));
        let boost_mass =
            QUERY_BOOST * (user_node.is_some() as u8 + resource_node.is_some() as u8) as f64;
        let mut p = alloc::vec![(1.0 - boost_mass) / n as f64; n];
        if let Some(i) = user_node {
            p[i] += QUERY_BOOST;
        }
        if let Some(i) = resource_node {
            p[i] += QUERY_BOOST;
        }
        PreferenceVector(p)
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self, GraphError> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(GraphError::InvalidPreference);
        }
        Ok(PreferenceVector(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Result of a power-iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub weights: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Power iteration of `w <- damping * A * w + (1 - damping) * p`, starting
/// from the uniform vector, until the L1 change drops below `tol` or
/// `max_iter` is reached. The iteration is a contraction, so the last
/// iterate is always the best one; non-convergence is only flagged.
pub fn adapted_pagerank(
    graph: &FolksonomyGraph,
    preference: &PreferenceVector,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> PageRank {
    let n = graph.node_count();
    if n == 0 {
        return PageRank {
            weights: Vec::new(),
            converged: true,
            iterations: 0,
        };
    }
    let p = preference.as_slice();
    let mut w = alloc::vec![1.0 / n as f64; n];
    let mut next = alloc::vec![0.0f64; n];
    for iteration in 1..=max_iter {
        graph.spread(&w, &mut next);
        let mut delta = 0.0;
        for i in 0..n {
            next[i] = damping * next[i] + (1.0 - damping) * p[i];
            delta += (next[i] - w[i]).abs();
        }
        core::mem::swap(&mut w, &mut next);
        if delta < tol {
            return PageRank {
                weights: w,
                converged: true,
                iterations: iteration,
            };
        }
    }
    PageRank {
        weights: w,
        converged: false,
        iterations: max_iter,
    }
}

/// FolkRank differential: rank weights under the query-boosted preference
/// minus the weights of the supplied uniform-preference `baseline`,
/// restricted to tag nodes. Returns (tag node, score) pairs, or nothing if
/// neither query entity is in the graph.
pub fn folkrank(
    graph: &FolksonomyGraph,
    baseline: &PageRank,
    user: &str,
    resource: &str,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Vec<(usize, f64)> {
    if graph.user_node(user).is_none() && graph.resource_node(resource).is_none() {
        return Vec::new();
    }
    let boosted = PreferenceVector::boosted(graph, Some(user), Some(resource));
    let w1 = adapted_pagerank(graph, &boosted, damping, tol, max_iter);
    graph
        .tag_nodes()
        .map(|t| (t, w1.weights[t] - baseline.weights[t]))
        .collect()
}

/// Graph, cached uniform-preference PageRank and iteration settings, bundled
/// for querying. The uniform run is query-independent, so it is computed
/// once here and reused by every FolkRank query.
pub struct GraphModel {
    graph: FolksonomyGraph,
    baseline: PageRank,
    damping: f64,
    tol: f64,
    max_iter: usize,
}

impl GraphModel {
    pub fn new(index: &TrainingIndex, damping: f64, tol: f64, max_iter: usize) -> Self {
        let graph = build_graph(index);
        let baseline = adapted_pagerank(
            &graph,
            &PreferenceVector::uniform(graph.node_count().max(1)),
            damping,
            tol,
            max_iter,
        );
        GraphModel {
            graph,
            baseline,
            damping,
            tol,
            max_iter,
        }
    }

    pub fn graph(&self) -> &FolksonomyGraph {
        &self.graph
    }

    pub fn baseline(&self) -> &PageRank {
        &self.baseline
    }

    /// Ranks tags by adapted PageRank weight under the boosted preference;
    /// with neither query entity known this falls back to the cached
    /// uniform-preference weights.
    pub fn apr_recommend(&self, user: &str, resource: &str, k: usize) -> Recommendation {
        if self.graph.node_count() == 0 {
            return Recommendation::empty();
        }
        let known_user = self.graph.user_node(user).is_some();
        let known_resource = self.graph.resource_node(resource).is_some();
        let ranks = if known_user || known_resource {
            let preference = PreferenceVector::boosted(&self.graph, Some(user), Some(resource));
            adapted_pagerank(
                &self.graph,
                &preference,
                self.damping,
                self.tol,
                self.max_iter,
            )
        } else {
            self.baseline.clone()
        };
        let scores = self
            .graph
            .tag_nodes()
            .map(|t| (self.graph.node_name(t).into(), ranks.weights[t]))
            .collect();
        Recommendation::from_scores(scores, k)
    }

    /// Ranks tags by the FolkRank differential. Tags that do not gain rank
    /// from the query boost carry no signal and are not recommended, which
    /// also keeps recommendation scores non-negative.
    pub fn fr_recommend(&self, user: &str, resource: &str, k: usize) -> Recommendation {
        let scores = folkrank(
            &self.graph,
            &self.baseline,
            user,
            resource,
            self.damping,
            self.tol,
            self.max_iter,
        );
        let named = scores
            .into_iter()
            .filter(|&(_, s)| s > 0.0)
            .map(|(t, s)| (self.graph.node_name(t).into(), s))
            .collect();
        Recommendation::from_scores(named, k)
    }
}
