//! Reconstruction of the unique tree on exactly `1..=n` realizing a matrix.
//!
//! Pendant vertices are peeled one at a time. For the active set, pick the
//! ordered triple `(a, b, c)` maximizing `d(a,c) + d(b,c) - d(a,b)` with
//! `2α = d(a,c) + d(a,b) - d(b,c) > 0` (lexicographically smallest among
//! ties). In any realization `a` is then a leaf whose neighbor `l` is the
//! active vertex nearest to `a`, and `d(a,l) = α`. Each peel checks
//! `d(a,x) = d(a,l) + d(l,x)` for every other active `x`, so an
//! unrealizable matrix is rejected at the first peel where that fails. Three
//! remaining vertices form a path through their middle vertex. The assembled
//! tree is compared entry-wise against the input before it is returned.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::arith::{with_kernel, Arith};
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Vertex};
use crate::scalar::Scalar;
use crate::tree::{Edge, WeightedTree};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PendantCertificate {
    /// The pendant vertex.
    pub a: Vertex,
    /// Its unique neighbor.
    pub l: Vertex,
    /// Pendant edge weight, equal to `d(a, l)`.
    pub alpha: Scalar,
    /// The rest of the maximizing triple `(a, b, c)`.
    pub b: Vertex,
    pub c: Vertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ConditionCheck,
    SupportVerification,
    FinalVerification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDetail {
    /// No vertex of the triple lies on the path between the other two.
    NoMiddleVertex { triple: [Vertex; 3] },
    /// `d(a,x) != d(a,l) + d(l,x)`.
    SupportIdentity { a: Vertex, l: Vertex, x: Vertex },
    /// The nearest vertex to `a` is not at distance `alpha`.
    AlphaMismatch {
        a: Vertex,
        l: Vertex,
        alpha: Scalar,
        distance: Scalar,
    },
    /// The assembled tree disagrees with the input at `(i, j)`.
    PairMismatch {
        i: Vertex,
        j: Vertex,
        expected: Scalar,
        actual: Scalar,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnrealizableWitness {
    pub stage: Stage,
    pub detail: WitnessDetail,
    /// Active vertices when the failure was detected.
    pub active: Vec<Vertex>,
}

impl fmt::Display for UnrealizableWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.detail {
            WitnessDetail::NoMiddleVertex { triple: [x, y, z] } => {
                write!(f, "no vertex of {{{x},{y},{z}}} lies between the other two")
            }
            WitnessDetail::SupportIdentity { a, l, x } => {
                write!(f, "d({a},{x}) != d({a},{l}) + d({l},{x})")
            }
            WitnessDetail::AlphaMismatch { a, l, alpha, distance } => {
                write!(f, "d({a},{l}) = {distance} but the pendant weight is {alpha}")
            }
            WitnessDetail::PairMismatch { i, j, expected, actual } => {
                write!(f, "tree gives d({i},{j}) = {actual}, matrix has {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub tree: WeightedTree,
    /// One certificate per peeled pendant, in peel order.
    pub certificates: Vec<PendantCertificate>,
}

/// Kernel-level certificate; `two_alpha` avoids halving integers.
struct Peel<N> {
    a: usize,
    l: usize,
    b: usize,
    c: usize,
    two_alpha: N,
}

type Failure = (Stage, WitnessDetail);

fn find_pendant_in<K: Arith>(ar: &K, active: &[usize]) -> std::result::Result<Peel<K::Num>, Failure> {
    // `active` is sorted, so the first maximizer met is the lexicographically smallest.
    let mut best: Option<(K::Num, [usize; 3], K::Num)> = None;
    for &a in active {
        for &b in active.iter().filter(|&&b| b != a) {
            for &c in active.iter().filter(|&&c| c != a && c != b) {
                let two_alpha = ar.sub(&ar.add(ar.d(a, c), ar.d(a, b)), ar.d(b, c));
                if !ar.is_positive(&two_alpha) {
                    continue;
                }
                let value = ar.sub(&ar.add(ar.d(a, c), ar.d(b, c)), ar.d(a, b));
                let better = match &best {
                    None => true,
                    Some((top, _, _)) => ar.cmp(&value, top) == Ordering::Greater,
                };
                if better {
                    best = Some((value, [a, b, c], two_alpha));
                }
            }
        }
    }
    let (_, [a, b, c], two_alpha) = best.expect("three or more active vertices with positive distances");

    let mut l = None;
    for &x in active.iter().filter(|&&x| x != a) {
        if l.is_none_or(|cur| ar.cmp(ar.d(a, x), ar.d(a, cur)) == Ordering::Less) {
            l = Some(x);
        }
    }
    let l = l.expect("active set has other vertices");

    for &x in active.iter().filter(|&&x| x != a && x != l) {
        if !ar.passes_through(a, x, l) {
            return Err((
                Stage::SupportVerification,
                WitnessDetail::SupportIdentity {
                    a: a + 1,
                    l: l + 1,
                    x: x + 1,
                },
            ));
        }
    }
    if !ar.eq(&ar.add(ar.d(a, l), ar.d(a, l)), &two_alpha) {
        return Err((
            Stage::SupportVerification,
            WitnessDetail::AlphaMismatch {
                a: a + 1,
                l: l + 1,
                alpha: ar.to_scalar(&two_alpha).half(),
                distance: ar.to_scalar(ar.d(a, l)),
            },
        ));
    }
    Ok(Peel { a, l, b, c, two_alpha })
}

/// The path `x - z - y` when `d(x,y) = d(x,z) + d(z,y)`; tries `z` in the given order.
fn base3_in<K: Arith>(ar: &K, triple: [usize; 3]) -> std::result::Result<[(usize, usize); 2], Failure> {
    for pos in 0..3 {
        let z = triple[pos];
        let x = triple[(pos + 1) % 3];
        let y = triple[(pos + 2) % 3];
        if ar.passes_through(x, y, z) {
            return Ok([(x, z), (z, y)]);
        }
    }
    Err((
        Stage::ConditionCheck,
        WitnessDetail::NoMiddleVertex {
            triple: triple.map(|v| v + 1),
        },
    ))
}

fn sorted_labels(active: &[usize]) -> Vec<Vertex> {
    active.iter().map(|v| v + 1).collect()
}

fn validate_active(m: &DissimilarityMatrix, active: &[Vertex]) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(active.len());
    for &v in active {
        m.check_vertex(v)?;
        if idx.contains(&(v - 1)) {
            return Err(Error::DuplicateIndex(v));
        }
        idx.push(v - 1);
    }
    idx.sort_unstable();
    Ok(idx)
}

fn unrealizable((stage, detail): Failure, active: &[usize]) -> UnrealizableWitness {
    UnrealizableWitness {
        stage,
        detail,
        active: sorted_labels(active),
    }
}

/// Path on three vertices realizing `m` restricted to `triple`.
pub fn solve_base3(m: &DissimilarityMatrix, triple: [Vertex; 3]) -> Result<Vec<Edge>> {
    let idx = validate_active(m, &triple)?;
    let zero_based = triple.map(|v| v - 1);
    let pairs = with_kernel!(m, |ar| base3_in(ar, zero_based))
        .map_err(|f| Error::Unrealizable(Box::new(unrealizable(f, &idx))))?;
    let mut edges: Vec<Edge> = pairs
        .iter()
        .map(|&(p, q)| Edge {
            u: p.min(q) + 1,
            v: p.max(q) + 1,
            weight: m.at(p + 1, q + 1).clone(),
        })
        .collect();
    edges.sort_by_key(|e| (e.u, e.v));
    Ok(edges)
}

/// Certifies one pendant vertex of `m` restricted to `active` (at least three labels).
pub fn find_pendant(m: &DissimilarityMatrix, active: &[Vertex]) -> Result<PendantCertificate> {
    let idx = validate_active(m, active)?;
    if idx.len() < 3 {
        return Err(Error::TooSmall { n: idx.len(), min: 3 });
    }
    with_kernel!(m, |ar| {
        find_pendant_in(ar, &idx)
            .map(|p| PendantCertificate {
                a: p.a + 1,
                l: p.l + 1,
                alpha: ar.to_scalar(&p.two_alpha).half(),
                b: p.b + 1,
                c: p.c + 1,
            })
            .map_err(|f| Error::Unrealizable(Box::new(unrealizable(f, &idx))))
    })
}

/// The unique tree on exactly `1..=m.n()` whose path weights equal `m`.
pub fn reconstruct(m: &DissimilarityMatrix) -> std::result::Result<WeightedTree, UnrealizableWitness> {
    reconstruct_with_certificates(m).map(|r| r.tree)
}

pub fn reconstruct_with_certificates(
    m: &DissimilarityMatrix,
) -> std::result::Result<Reconstruction, UnrealizableWitness> {
    with_kernel!(m, |ar| reconstruct_in(ar, m))
}

fn reconstruct_in<K: Arith>(
    ar: &K,
    m: &DissimilarityMatrix,
) -> std::result::Result<Reconstruction, UnrealizableWitness> {
    let n = ar.n();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    let mut certificates = Vec::new();

    while active.len() > 3 {
        let peel = find_pendant_in(ar, &active).map_err(|f| unrealizable(f, &active))?;
        certificates.push(PendantCertificate {
            a: peel.a + 1,
            l: peel.l + 1,
            alpha: ar.to_scalar(&peel.two_alpha).half(),
            b: peel.b + 1,
            c: peel.c + 1,
        });
        pairs.push((peel.a, peel.l));
        active.retain(|&v| v != peel.a);
    }
    match active.len() {
        3 => {
            let path = base3_in(ar, [active[0], active[1], active[2]])
                .map_err(|f| unrealizable(f, &active))?;
            pairs.extend(path);
        }
        2 => pairs.push((active[0], active[1])),
        _ => {}
    }

    if let Some((i, j, actual)) = first_mismatch(ar, &pairs) {
        return Err(UnrealizableWitness {
            stage: Stage::FinalVerification,
            detail: WitnessDetail::PairMismatch {
                i: i + 1,
                j: j + 1,
                expected: ar.to_scalar(ar.d(i, j)),
                actual: ar.to_scalar(&actual),
            },
            active: (1..=n).collect(),
        });
    }

    let tree = WeightedTree::new(
        n,
        m.policy(),
        pairs
            .iter()
            .map(|&(u, v)| (u + 1, v + 1, ar.to_scalar(ar.d(u, v)))),
    )
    .expect("peeling yields a spanning tree with positive weights");
    Ok(Reconstruction { tree, certificates })
}

/// Path weights of the tree with edges `pairs` (weights taken from the
/// matrix) compared against the matrix; first differing `(i, j)` with `i < j`.
pub(crate) fn first_mismatch<K: Arith>(
    ar: &K,
    pairs: &[(usize, usize)],
) -> Option<(usize, usize, K::Num)> {
    let n = ar.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in pairs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist: Vec<Option<K::Num>> = vec![None; n];
    let mut stack = Vec::with_capacity(n);
    for source in 0..n {
        dist.iter_mut().for_each(|d| *d = None);
        dist[source] = Some(ar.zero());
        stack.push(source);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if dist[y].is_none() {
                    let through = ar.add(dist[x].as_ref().expect("visited"), ar.d(x, y));
                    dist[y] = Some(through);
                    stack.push(y);
                }
            }
        }
        for (target, reached) in dist.iter().enumerate().skip(source + 1) {
            match reached {
                Some(d) if ar.eq(d, ar.d(source, target)) => {}
                Some(d) => return Some((source, target, d.clone())),
                None => panic!("edge list does not span the vertex set"),
            }
        }
    }
    None
}
