//! Brute-force ground truth for small `n`.
//!
//! Every labeled tree on `1..=n` is enumerated through its Prüfer sequence.
//! In a tree whose vertices are exactly the labeled points, adjacent
//! vertices are joined by a single edge, so each edge weight is forced to the
//! matrix entry and a topology realizes the matrix iff the forced weights
//! reproduce every other entry.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{with_kernel, Arith};
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Vertex};
use crate::reconstruct::first_mismatch;
use crate::scalar::{Policy, Scalar};
use crate::tree::WeightedTree;

/// Largest `n` enumerated unless the caller raises the cap (`8^6` topologies).
pub const DEFAULT_CAP: usize = 8;

/// Random weights are multiples of `1 / WEIGHT_GRID`.
pub const WEIGHT_GRID: i64 = 1000;

/// Unweighted labeled tree on `1..=n`; edges stored `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Topology {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl Topology {
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let one = Policy::Exact.from_integer(1);
        let tree = WeightedTree::new(n, Policy::Exact, edges.iter().map(|&(u, v)| (u, v, one.clone())))?;
        Ok(Self::of(&tree))
    }

    pub fn of(tree: &WeightedTree) -> Self {
        Self {
            n: tree.n(),
            edges: tree.topology(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }
}

/// Standard Prüfer decoding: repeatedly join the smallest leaf to the head of
/// the remaining sequence, then join the last two vertices.
pub fn prufer_decode(seq: &[Vertex], n: usize) -> Result<Topology> {
    if n < 2 {
        return Err(Error::BadSequence(format!("n must be at least 2, got {n}")));
    }
    if seq.len() != n - 2 {
        return Err(Error::BadSequence(format!(
            "length {} for n = {n}, expected {}",
            seq.len(),
            n - 2
        )));
    }
    if let Some(&bad) = seq.iter().find(|&&v| !(1..=n).contains(&v)) {
        return Err(Error::BadSequence(format!("label {bad} outside 1..={n}")));
    }
    Ok(Topology {
        n,
        edges: decode_unchecked(seq, n),
    })
}

fn decode_unchecked(seq: &[Vertex], n: usize) -> Vec<(Vertex, Vertex)> {
    let mut degree = vec![1usize; n + 1];
    degree[0] = 0;
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &head in seq {
        let leaf = (1..=n).find(|&v| degree[v] == 1).expect("a leaf always remains");
        edges.push((leaf.min(head), leaf.max(head)));
        degree[leaf] -= 1;
        degree[head] -= 1;
    }
    let mut last = (1..=n).filter(|&v| degree[v] == 1);
    let (u, v) = (last.next().expect("two vertices remain"), last.next().expect("two vertices remain"));
    edges.push((u, v));
    edges.sort_unstable();
    edges
}

/// Calls `visit` with every sequence in `{1..=n}^(n-2)` in lexicographic order.
pub fn for_each_prufer_sequence<F: FnMut(&[Vertex])>(n: usize, mut visit: F) {
    if n < 2 {
        return;
    }
    let len = n - 2;
    let mut seq = vec![1; len];
    loop {
        visit(&seq);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if seq[pos] < n {
                seq[pos] += 1;
                break;
            }
            seq[pos] = 1;
        }
    }
}

/// `n^(n-2)`, with 1 for `n` in `{1, 2}`.
pub fn topology_count(n: usize) -> u64 {
    if n <= 2 {
        1
    } else {
        (n as u64).pow((n - 2) as u32)
    }
}

/// The tree with forced weights `w(u,v) = d(u,v)` when it reproduces `m`.
pub fn realize_on_topology(m: &DissimilarityMatrix, topology: &Topology) -> Option<WeightedTree> {
    if topology.n != m.n() {
        return None;
    }
    let pairs: Vec<(usize, usize)> = topology.edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
    with_kernel!(m, |ar| realize_in(ar, m.policy(), &pairs))
}

fn realize_in<K: Arith>(ar: &K, policy: Policy, pairs: &[(usize, usize)]) -> Option<WeightedTree> {
    if pairs.iter().any(|&(u, v)| !ar.is_positive(ar.d(u, v))) {
        return None;
    }
    if first_mismatch(ar, pairs).is_some() {
        return None;
    }
    let edges = pairs
        .iter()
        .map(|&(u, v)| (u + 1, v + 1, ar.to_scalar(ar.d(u, v))));
    WeightedTree::new(ar.n(), policy, edges).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationCensus {
    pub n: usize,
    #[serde(rename = "topologies")]
    pub topologies_examined: u64,
    pub count: usize,
    /// Sorted by edge set.
    pub realizations: Vec<WeightedTree>,
}

impl RealizationCensus {
    /// More than one realization would contradict uniqueness.
    pub fn uniqueness_holds(&self) -> bool {
        self.count <= 1
    }
}

/// Counts the trees on exactly `1..=n` that realize `m`, over all `n^(n-2)`
/// labeled topologies.
pub fn count_realizations(m: &DissimilarityMatrix, cap: usize) -> Result<RealizationCensus> {
    let n = m.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut realizations = match n {
        1 => vec![WeightedTree::single_vertex(m.policy())],
        2 => vec![WeightedTree::new(2, m.policy(), [(1, 2, m.at(1, 2).clone())])?],
        _ => with_kernel!(m, |ar| {
            let mut found = Vec::new();
            for_each_prufer_sequence(n, |seq| {
                let pairs: Vec<(usize, usize)> = decode_unchecked(seq, n)
                    .into_iter()
                    .map(|(u, v)| (u - 1, v - 1))
                    .collect();
                if let Some(tree) = realize_in(ar, m.policy(), &pairs) {
                    found.push(tree);
                }
            });
            found
        }),
    };
    realizations.sort_by_key(WeightedTree::topology);
    Ok(RealizationCensus {
        n,
        topologies_examined: topology_count(n),
        count: realizations.len(),
        realizations,
    })
}

/// Uniform random labeled tree with independent weights drawn from the
/// multiples of `1/1000` in `[low, high]`. Deterministic in `(n, low, high, seed)`.
/// The tree uses the policy of `low`.
pub fn random_weighted_tree(n: usize, low: &Scalar, high: &Scalar, seed: u64) -> Result<WeightedTree> {
    if !low.policy_matches(high) {
        return Err(Error::MixedPolicy);
    }
    if n == 0 {
        return Err(Error::TooSmall { n, min: 1 });
    }
    let policy = if low.is_exact() {
        Policy::Exact
    } else {
        Policy::Float {
            epsilon: Policy::DEFAULT_EPSILON,
        }
    };
    let (lo, hi) = grid_bounds(low, high)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n == 1 {
        return Ok(WeightedTree::single_vertex(policy));
    }
    let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.random_range(1..=n)).collect();
    let topology = decode_unchecked(&seq, n);
    let edges: Vec<(Vertex, Vertex, Scalar)> = topology
        .into_iter()
        .map(|(u, v)| {
            let k = rng.random_range(lo..=hi);
            (u, v, policy.from_ratio(k, WEIGHT_GRID))
        })
        .collect();
    WeightedTree::new(n, policy, edges)
}

/// Grid indices `k` with `low <= k/1000 <= high`.
fn grid_bounds(low: &Scalar, high: &Scalar) -> Result<(i64, i64)> {
    let as_rational = |s: &Scalar| match s {
        Scalar::Exact(r) => Some(r.clone()),
        Scalar::Float(f) => BigRational::from_float(*f),
    };
    let (Some(low), Some(high)) = (as_rational(low), as_rational(high)) else {
        return Err(Error::BadRange("bounds must be finite".into()));
    };
    let zero = BigRational::from_integer(BigInt::from(0));
    if low <= zero {
        return Err(Error::BadRange(format!("lower bound {} must be positive", Scalar::Exact(low))));
    }
    if low > high {
        return Err(Error::BadRange(format!(
            "lower bound {} exceeds upper bound {}",
            Scalar::Exact(low),
            Scalar::Exact(high)
        )));
    }
    let grid = BigInt::from(WEIGHT_GRID);
    let lo = (low * &grid).ceil().to_integer();
    let hi = (high * &grid).floor().to_integer();
    if lo > hi {
        return Err(Error::BadRange("no multiple of 0.001 lies in the range".into()));
    }
    let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
        return Err(Error::BadRange("range too large".into()));
    };
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{all_pairs_weights, trees_equal};
    use std::collections::HashSet;

    fn int(v: i64) -> Scalar {
        Policy::Exact.from_integer(v)
    }

    fn matrix(n: usize, pairs: &[((Vertex, Vertex), i64)]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(n, Policy::Exact, |i, j| {
            let w = pairs
                .iter()
                .find(|((a, b), _)| (*a, *b) == (i, j) || (*b, *a) == (i, j))
                .map(|(_, w)| *w)
                .unwrap_or_else(|| panic!("missing d({i},{j})"));
            int(w)
        })
        .unwrap()
    }

    fn star() -> DissimilarityMatrix {
        matrix(4, &[((1, 2), 3), ((1, 3), 1), ((1, 4), 5), ((2, 3), 2), ((2, 4), 6), ((3, 4), 4)])
    }

    fn uniform(n: usize) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(n, Policy::Exact, |_, _| int(2)).unwrap()
    }

    #[test]
    fn decode_examples() {
        assert_eq!(prufer_decode(&[3, 3], 4).unwrap().edges(), &[(1, 3), (2, 3), (3, 4)]);
        assert_eq!(prufer_decode(&[], 2).unwrap().edges(), &[(1, 2)]);
        assert_eq!(prufer_decode(&[2], 3).unwrap().edges(), &[(1, 2), (2, 3)]);
        // 4-1-3? seq (1,3) for n=4: leaf 2 joins 1, leaf 1 joins 3, then 3-4.
        assert_eq!(prufer_decode(&[1, 3], 4).unwrap().edges(), &[(1, 2), (1, 3), (3, 4)]);
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(prufer_decode(&[1], 4), Err(Error::BadSequence(_))));
        assert!(matches!(prufer_decode(&[5, 1], 4), Err(Error::BadSequence(_))));
        assert!(matches!(prufer_decode(&[0, 1], 4), Err(Error::BadSequence(_))));
        assert!(matches!(prufer_decode(&[], 1), Err(Error::BadSequence(_))));
    }

    #[test]
    fn decoding_is_a_bijection() {
        for n in 2..=6 {
            let mut seen = HashSet::new();
            let mut visited = 0u64;
            for_each_prufer_sequence(n, |seq| {
                visited += 1;
                let t = prufer_decode(seq, n).unwrap();
                assert_eq!(t.edges().len(), n - 1);
                Topology::new(n, t.edges()).expect("decoded topology is a tree");
                seen.insert(t);
            });
            assert_eq!(visited, topology_count(n));
            assert_eq!(seen.len() as u64, topology_count(n), "n = {n}");
        }
    }

    #[test]
    fn realize_examples() {
        let star_topology = prufer_decode(&[3, 3], 4).unwrap();
        let t = realize_on_topology(&star(), &star_topology).unwrap();
        let expect = WeightedTree::new(4, Policy::Exact, [(1, 3, int(1)), (2, 3, int(2)), (3, 4, int(4))]).unwrap();
        assert!(trees_equal(&t, &expect));

        let path = Topology::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(realize_on_topology(&star(), &path).is_none());

        let m = uniform(4);
        let mut topologies = 0;
        for_each_prufer_sequence(4, |seq| {
            topologies += 1;
            assert!(realize_on_topology(&m, &prufer_decode(seq, 4).unwrap()).is_none());
        });
        assert_eq!(topologies, 16);
    }

    #[test]
    fn census_examples() {
        let c = count_realizations(&star(), DEFAULT_CAP).unwrap();
        assert_eq!((c.topologies_examined, c.count), (16, 1));
        assert_eq!(c.realizations[0].topology(), vec![(1, 3), (2, 3), (3, 4)]);

        let c = count_realizations(&uniform(4), DEFAULT_CAP).unwrap();
        assert_eq!((c.topologies_examined, c.count), (16, 0));

        let m = matrix(3, &[((1, 3), 1), ((2, 3), 2), ((1, 2), 3)]);
        let c = count_realizations(&m, DEFAULT_CAP).unwrap();
        assert_eq!((c.topologies_examined, c.count), (3, 1));

        assert!(matches!(count_realizations(&uniform(9), DEFAULT_CAP), Err(Error::TooLarge { n: 9, cap: 8 })));
        assert!(count_realizations(&uniform(3), 2).is_err());
    }

    #[test]
    fn census_trivial_sizes() {
        let c = count_realizations(&uniform(1), DEFAULT_CAP).unwrap();
        assert_eq!((c.topologies_examined, c.count), (1, 1));
        let c = count_realizations(&uniform(2), DEFAULT_CAP).unwrap();
        assert_eq!((c.topologies_examined, c.count), (1, 1));
    }

    #[test]
    fn generator_contract() {
        let lo = Policy::Exact.parse("0.001").unwrap();
        let hi = Policy::Exact.parse("10").unwrap();
        let a = random_weighted_tree(9, &lo, &hi, 42).unwrap();
        let b = random_weighted_tree(9, &lo, &hi, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_weighted_tree(9, &lo, &hi, 43).unwrap());

        let t = random_weighted_tree(3, &lo, &hi, 1).unwrap();
        assert_eq!(t.edges().len(), 2);

        for seed in 0..50 {
            let top = Policy::Exact.parse("0.005").unwrap();
            let t = random_weighted_tree(7, &lo, &top, seed).unwrap();
            for e in t.edges() {
                assert!(Policy::Exact.cmp(&e.weight, &lo).is_ge());
                assert!(Policy::Exact.cmp(&e.weight, &top).is_le());
            }
        }
        assert_eq!(random_weighted_tree(1, &lo, &hi, 0).unwrap().n(), 1);
    }

    #[test]
    fn generator_rejects_bad_ranges() {
        let p = |s: &str| Policy::Exact.parse(s).unwrap();
        assert!(matches!(random_weighted_tree(4, &p("0"), &p("1"), 0), Err(Error::BadRange(_))));
        assert!(matches!(random_weighted_tree(4, &p("2"), &p("1"), 0), Err(Error::BadRange(_))));
        assert!(matches!(random_weighted_tree(4, &p("0.0011"), &p("0.0019"), 0), Err(Error::BadRange(_))));
        assert!(matches!(
            random_weighted_tree(4, &p("1"), &Scalar::Float(2.0), 0),
            Err(Error::MixedPolicy)
        ));
    }

    #[test]
    fn random_trees_realize_only_on_their_topology() {
        let lo = Policy::Exact.parse("0.001").unwrap();
        let hi = Policy::Exact.parse("10").unwrap();
        for seed in 0..20 {
            let t = random_weighted_tree(5, &lo, &hi, seed).unwrap();
            let m = all_pairs_weights(&t);
            let c = count_realizations(&m, DEFAULT_CAP).unwrap();
            assert_eq!(c.count, 1);
            assert!(trees_equal(&c.realizations[0], &t));
        }
    }
}
