//! Positive-weighted trees whose vertex set is exactly `1..=n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Vertex};
use crate::scalar::{Policy, Scalar};

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    #[serde(rename = "w")]
    pub weight: Scalar,
}

/// Serializes as `{"n": .., "edges": [{"u": .., "v": .., "w": ".."}]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTree {
    n: usize,
    #[serde(skip)]
    policy: Policy,
    /// Sorted by `(u, v)`.
    edges: Vec<Edge>,
}

impl WeightedTree {
    /// Validates and canonicalizes an edge list: labels in `1..=n`, exactly
    /// `n - 1` edges, no cycle, every weight strictly positive.
    pub fn new<I>(n: usize, policy: Policy, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Scalar)>,
    {
        if n == 0 {
            return Err(Error::TooSmall { n: 0, min: 1 });
        }
        let mut canonical = Vec::with_capacity(n.saturating_sub(1));
        for (a, b, weight) in edges {
            for x in [a, b] {
                if !(1..=n).contains(&x) {
                    return Err(Error::InvalidTree(format!("vertex {x} outside 1..={n}")));
                }
            }
            if a == b {
                return Err(Error::InvalidTree(format!("self-loop at vertex {a}")));
            }
            if !policy.admits(&weight) {
                return Err(Error::MixedPolicy);
            }
            if !weight.is_strictly_positive() {
                return Err(Error::InvalidTree(format!(
                    "non-positive weight {weight} on edge ({a},{b})"
                )));
            }
            canonical.push(Edge {
                u: a.min(b),
                v: a.max(b),
                weight,
            });
        }
        if canonical.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "a tree on {n} vertices has {} edges, found {}",
                n - 1,
                canonical.len()
            )));
        }
        canonical.sort_by_key(|e| (e.u, e.v));

        let mut parent: Vec<usize> = (0..=n).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &canonical {
            let (ru, rv) = (root(&mut parent, e.u), root(&mut parent, e.v));
            if ru == rv {
                return Err(Error::InvalidTree(format!(
                    "edge ({},{}) closes a cycle or repeats an edge",
                    e.u, e.v
                )));
            }
            parent[ru] = rv;
        }

        Ok(Self {
            n,
            policy,
            edges: canonical,
        })
    }

    pub fn single_vertex(policy: Policy) -> Self {
        Self {
            n: 1,
            policy,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.n
    }

    /// Unweighted edge list, `u < v`, sorted.
    pub fn topology(&self) -> Vec<(Vertex, Vertex)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    /// Degree-one vertices in increasing order.
    pub fn leaves(&self) -> Vec<Vertex> {
        self.vertices().filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn edge_weight(&self, a: Vertex, b: Vertex) -> Option<&Scalar> {
        let (u, v) = (a.min(b), a.max(b));
        self.edges
            .binary_search_by_key(&(u, v), |e| (e.u, e.v))
            .ok()
            .map(|idx| &self.edges[idx].weight)
    }

    fn adjacency(&self) -> Vec<Vec<(Vertex, &Scalar)>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for e in &self.edges {
            adj[e.u].push((e.v, &e.weight));
            adj[e.v].push((e.u, &e.weight));
        }
        adj
    }

    /// Weight of the path from `source` to every vertex; index 0 is unused.
    fn distances_from(&self, adj: &[Vec<(Vertex, &Scalar)>], source: Vertex) -> Vec<Scalar> {
        let mut dist = vec![self.policy.zero(); self.n + 1];
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(x) = stack.pop() {
            for &(y, w) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    dist[y] = &dist[x] + w;
                    stack.push(y);
                }
            }
        }
        dist
    }
}

/// Sum of edge weights on the unique `i`–`j` path; zero when `i == j`.
pub fn path_weight(t: &WeightedTree, i: Vertex, j: Vertex) -> Result<Scalar> {
    for x in [i, j] {
        if !(1..=t.n).contains(&x) {
            return Err(Error::UnknownVertex { vertex: x, n: t.n });
        }
    }
    if i == j {
        return Ok(t.policy.zero());
    }
    let adj = t.adjacency();
    Ok(t.distances_from(&adj, i).swap_remove(j))
}

/// The matrix of all path weights of `t`.
pub fn all_pairs_weights(t: &WeightedTree) -> DissimilarityMatrix {
    let adj = t.adjacency();
    let rows: Vec<Vec<Scalar>> = t
        .vertices()
        .map(|i| t.distances_from(&adj, i).split_off(1))
        .collect();
    DissimilarityMatrix::new(t.policy, rows)
        .expect("path weights of a positive-weighted tree form a dissimilarity matrix")
}

/// Same `n` and the same edge set with equal weights. Listing order and
/// endpoint order are irrelevant.
pub fn trees_equal(a: &WeightedTree, b: &WeightedTree) -> bool {
    a.n == b.n
        && a.policy == b.policy
        && a.edges.len() == b.edges.len()
        && a.edges.iter().zip(&b.edges).all(|(x, y)| {
            x.u == y.u && x.v == y.v && a.policy.eq(&x.weight, &y.weight)
        })
}
