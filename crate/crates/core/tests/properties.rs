mod common;

use std::collections::BTreeSet;

use common::{grid_matrix, grid_tree, perturb, rng};
use proptest::prelude::*;
use tree_realize::conditions::{classify_quadruple, four_point_check};
use tree_realize::reconstruct::reconstruct_with_certificates;
use tree_realize::{
    all_pairs_weights, check_all, count_realizations, random_weighted_tree, reconstruct, trees_equal,
    DissimilarityMatrix, Policy, Scalar,
};

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if p.iter().collect::<BTreeSet<_>>().len() == 4 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Tree metric, optionally with one entry nudged off the tree.
fn mixed_matrix(n: usize, seed: u64, perturbed: bool) -> DissimilarityMatrix {
    let m = all_pairs_weights(&grid_tree(n, seed));
    if perturbed {
        perturb(&mut rng(seed ^ 0x5eed), &m, &common::exact("0.5"))
    } else {
        m
    }
}

/// Small integer entries make ties, and hence every quadruple kind, common.
fn small_int_matrix() -> impl Strategy<Value = DissimilarityMatrix> {
    (4usize..=6).prop_flat_map(|n| {
        prop::collection::vec(1i64..=4, n * (n - 1) / 2).prop_map(move |vals| {
            DissimilarityMatrix::from_fn(n, Policy::Exact, |i, j| {
                if i == j {
                    return Policy::Exact.zero();
                }
                let (a, b) = (i.min(j) - 1, i.max(j) - 1);
                let idx = a * (2 * n - a - 1) / 2 + (b - a - 1);
                Policy::Exact.from_integer(vals[idx])
            })
            .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip_exact(n in 1usize..=12, seed: u64) {
        let t = grid_tree(n, seed);
        let rebuilt = reconstruct(&all_pairs_weights(&t)).unwrap();
        prop_assert!(trees_equal(&rebuilt, &t));
    }

    #[test]
    fn round_trip_float(n in 2usize..=10, seed: u64) {
        let p = Policy::float(1e-9).unwrap();
        let lo = p.parse("0.001").unwrap();
        let hi = p.parse("10").unwrap();
        let t = random_weighted_tree(n, &lo, &hi, seed).unwrap();
        let rebuilt = reconstruct(&all_pairs_weights(&t)).unwrap();
        prop_assert!(trees_equal(&rebuilt, &t));
    }

    #[test]
    fn tree_metrics_satisfy_every_condition(n in 3usize..=9, seed: u64) {
        let report = check_all(&all_pairs_weights(&grid_tree(n, seed))).unwrap();
        prop_assert!(report.realizable, "{:?}", report.witnesses);
        prop_assert!(report.witnesses.is_empty());
    }

    #[test]
    fn reconstruct_agrees_with_conditions(n in 3usize..=7, seed: u64, perturbed: bool) {
        let m = mixed_matrix(n, seed, perturbed);
        let report = check_all(&m).unwrap();
        match reconstruct(&m) {
            Ok(t) => {
                prop_assert!(report.realizable);
                prop_assert!(all_pairs_weights(&t).approx_eq(&m));
            }
            Err(w) => prop_assert!(!report.realizable, "{w}"),
        }
    }

    #[test]
    fn reconstruct_agrees_on_tie_heavy_matrices(m in small_int_matrix()) {
        let realizable = check_all(&m).unwrap().realizable;
        prop_assert_eq!(reconstruct(&m).is_ok(), realizable);
    }

    #[test]
    fn oracle_agrees_with_reconstruct(n in 3usize..=6, seed: u64, perturbed: bool) {
        let m = mixed_matrix(n, seed, perturbed);
        let census = count_realizations(&m, 8).unwrap();
        prop_assert!(census.count <= 1);
        match reconstruct(&m) {
            Ok(t) => {
                prop_assert_eq!(census.count, 1);
                prop_assert!(trees_equal(&census.realizations[0], &t));
            }
            Err(_) => prop_assert_eq!(census.count, 0),
        }
    }

    #[test]
    fn classification_ignores_argument_order(m in small_int_matrix()) {
        let n = m.n();
        let sorted = |sums: &[Scalar]| {
            let mut v = sums.to_vec();
            v.sort_by(|a, b| Policy::Exact.cmp(a, b));
            v
        };
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    for t in k + 1..=n {
                        let q = [i, j, k, t];
                        let base = classify_quadruple(&m, i, j, k, t).unwrap();
                        for p in permutations4() {
                            let c = classify_quadruple(&m, q[p[0]], q[p[1]], q[p[2]], q[p[3]]).unwrap();
                            prop_assert_eq!(c.kind, base.kind);
                            prop_assert_eq!(c.split, base.split);
                            prop_assert_eq!(sorted(&c.sums), sorted(&base.sums));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn four_point_implies_triangle_inequalities(m in small_int_matrix()) {
        if four_point_check(&m).summary.ok {
            let n = m.n();
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        let via = m.at(i, k) + m.at(k, j);
                        prop_assert!(Policy::Exact.cmp(m.at(i, j), &via).is_le());
                    }
                }
            }
        }
    }

    #[test]
    fn support_vertex_is_unique(n in 3usize..=9, seed: u64) {
        let m = all_pairs_weights(&grid_tree(n, seed));
        for a in 1..=n {
            let supports: Vec<usize> = (1..=n)
                .filter(|&l| l != a)
                .filter(|&l| {
                    (1..=n).filter(|&x| x != a).all(|x| m.at(a, x) == &(m.at(a, l) + m.at(l, x)))
                })
                .collect();
            prop_assert!(supports.len() <= 1, "a = {a}: {supports:?}");
        }
    }

    #[test]
    fn peeled_vertices_are_pendant(n in 4usize..=12, seed: u64) {
        let t = grid_tree(n, seed);
        let r = reconstruct_with_certificates(&all_pairs_weights(&t)).unwrap();
        let mut active: BTreeSet<usize> = (1..=n).collect();
        for cert in &r.certificates {
            let neighbors: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&v| v != cert.a && t.edge_weight(cert.a, v).is_some())
                .collect();
            prop_assert_eq!(neighbors, vec![cert.l]);
            prop_assert_eq!(t.edge_weight(cert.a, cert.l), Some(&cert.alpha));
            active.remove(&cert.a);
        }
        prop_assert_eq!(active.len(), 3);
    }
}

#[test]
fn random_matrices_agree() {
    let mut r = rng(11);
    for trial in 0..300 {
        let n = 3 + trial % 5;
        let m = grid_matrix(&mut r, n, 500, 2000);
        let realizable = check_all(&m).unwrap().realizable;
        assert_eq!(reconstruct(&m).is_ok(), realizable, "trial {trial}");
    }
}

#[test]
fn scaled_copies_reconstruct_with_scaled_weights() {
    let t = grid_tree(8, 3);
    let m = all_pairs_weights(&t);
    let scaled = DissimilarityMatrix::from_fn(8, Policy::Exact, |i, j| {
        let mut acc = Policy::Exact.zero();
        for _ in 0..3 {
            acc = &acc + m.at(i, j);
        }
        acc
    })
    .unwrap();
    let rebuilt = reconstruct(&scaled).unwrap();
    assert_eq!(rebuilt.topology(), t.topology());
    for e in rebuilt.edges() {
        let original = t.edge_weight(e.u, e.v).unwrap();
        let tripled: Scalar = &(original + original) + original;
        assert_eq!(e.weight, tripled);
    }
}
