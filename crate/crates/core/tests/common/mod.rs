#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tree_realize::{random_weighted_tree, DissimilarityMatrix, Policy, Scalar, WeightedTree};

pub fn exact(text: &str) -> Scalar {
    Policy::Exact.parse(text).unwrap()
}

pub fn int(v: i64) -> Scalar {
    Policy::Exact.from_integer(v)
}

/// Exact matrix from the upper-triangle entries `((i, j), value)`.
pub fn matrix(n: usize, upper: &[((usize, usize), i64)]) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn(n, Policy::Exact, |i, j| {
        if i == j {
            return int(0);
        }
        let key = (i.min(j), i.max(j));
        let (_, v) = upper.iter().find(|(k, _)| *k == key).expect("entry given");
        int(*v)
    })
    .unwrap()
}

pub fn tree(n: usize, edges: &[(usize, usize, &str)]) -> WeightedTree {
    WeightedTree::new(n, Policy::Exact, edges.iter().map(|&(u, v, w)| (u, v, exact(w)))).unwrap()
}

/// Tree with weights on the 1/1000 grid in [0.001, 10].
pub fn grid_tree(n: usize, seed: u64) -> WeightedTree {
    random_weighted_tree(n, &exact("0.001"), &exact("10"), seed).unwrap()
}

/// Symmetric matrix with off-diagonal entries k/1000, k uniform in [lo, hi].
pub fn grid_matrix(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> DissimilarityMatrix {
    let mut upper = vec![vec![0i64; n]; n];
    for (i, row) in upper.iter_mut().enumerate() {
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.random_range(lo..=hi);
        }
    }
    DissimilarityMatrix::from_fn(n, Policy::Exact, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        Policy::Exact.from_ratio(upper[a - 1][b - 1], 1000)
    })
    .unwrap()
}

/// `m` with the symmetric pair at a random off-diagonal position increased by `delta`.
pub fn perturb(rng: &mut ChaCha8Rng, m: &DissimilarityMatrix, delta: &Scalar) -> DissimilarityMatrix {
    let n = m.n();
    let i = rng.random_range(1..=n);
    let mut j = rng.random_range(1..n);
    if j >= i {
        j += 1;
    }
    m.with_entry(i, j, m.at(i, j) + delta).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
