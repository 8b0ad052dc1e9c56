//! Quadruple classification and the three realizability conditions.
//!
//! For a quadruple `(i, j, k, t)` the three pair sums are, in order,
//! `d(i,j)+d(k,t)`, `d(i,k)+d(j,t)` and `d(i,t)+d(j,k)`. The four-point
//! condition asks that the maximum be attained at least twice. A tree on
//! exactly the labeled points additionally needs every star-shaped quadruple
//! (all sums equal) to have a labeled center, and every triple inside a
//! caterpillar-shaped quadruple (two sums tie above the third) to have a
//! labeled median.
//!
//! Quadruples with repeated indices reduce to triangle inequalities, which the
//! four-point scan checks directly. For `n = 3` there is no quadruple of
//! distinct points, so the caterpillar condition is evaluated on the
//! degenerate quadruple `(i, j, k, k)`: it then requires the three points to
//! have a labeled median.

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::{with_kernel, Arith};
use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Vertex};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrupleKind {
    AllThreeEqual,
    TwoEqualMax,
    Violation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupleClass {
    pub kind: QuadrupleKind,
    /// For `TwoEqualMax`, the pairing with the strictly smallest sum. Each
    /// pair is sorted and the pair holding the smaller label comes first.
    pub split: Option<[[Vertex; 2]; 2]>,
    /// The three pair sums in argument order.
    pub sums: [Scalar; 3],
}

/// The three pairings of a quadruple, as positions into `(i, j, k, t)`, in sum order.
const PAIRINGS: [[[usize; 2]; 2]; 3] = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];

/// Kind plus the position of the strict minimum sum when the kind is `TwoEqualMax`.
fn classify_sums<K: Arith>(k: &K, sums: &[K::Num; 3]) -> (QuadrupleKind, Option<usize>) {
    let mut max = 0;
    for s in 1..3 {
        if k.cmp(&sums[s], &sums[max]) == Ordering::Greater {
            max = s;
        }
    }
    let at_max: Vec<usize> = (0..3).filter(|&s| k.eq(&sums[s], &sums[max])).collect();
    match at_max.len() {
        3 => (QuadrupleKind::AllThreeEqual, None),
        2 => {
            let low = (0..3).find(|s| !at_max.contains(s)).expect("one sum below the maximum");
            (QuadrupleKind::TwoEqualMax, Some(low))
        }
        _ => (QuadrupleKind::Violation, None),
    }
}

fn quad_sums<K: Arith>(k: &K, q: [usize; 4]) -> [K::Num; 3] {
    PAIRINGS.map(|[[a, b], [c, d]]| k.pair_sum(q[a], q[b], q[c], q[d]))
}

fn normalized_split(q: [Vertex; 4], pairing: usize) -> [[Vertex; 2]; 2] {
    let [[a, b], [c, d]] = PAIRINGS[pairing];
    let mut first = [q[a], q[b]];
    let mut second = [q[c], q[d]];
    first.sort_unstable();
    second.sort_unstable();
    if second < first {
        std::mem::swap(&mut first, &mut second);
    }
    [first, second]
}

/// Classifies the pair-sum pattern of four distinct vertices.
pub fn classify_quadruple(
    m: &DissimilarityMatrix,
    i: Vertex,
    j: Vertex,
    k: Vertex,
    t: Vertex,
) -> Result<QuadrupleClass> {
    let q = [i, j, k, t];
    for (pos, &v) in q.iter().enumerate() {
        m.check_vertex(v)?;
        if q[..pos].contains(&v) {
            return Err(Error::DuplicateIndex(v));
        }
    }
    let zero_based = q.map(|v| v - 1);
    Ok(with_kernel!(m, |ar| {
        let sums = quad_sums(ar, zero_based);
        let (kind, low) = classify_sums(ar, &sums);
        QuadrupleClass {
            kind,
            split: low.map(|p| normalized_split(q, p)),
            sums: [
                ar.to_scalar(&sums[0]),
                ar.to_scalar(&sums[1]),
                ar.to_scalar(&sums[2]),
            ],
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionTag {
    FourPoint,
    ConditionI,
    ConditionIi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCode {
    /// The largest of the three pair sums occurs once.
    MaxAttainedOnce,
    /// `d(i,j) > d(i,k) + d(k,j)`, recorded as the quadruple `(i, j, k, k)`.
    TriangleInequality,
    /// Star-shaped quadruple without a labeled center.
    NoStarCenter,
    /// Triple without a labeled median.
    NoMedianVertex,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub quadruple: [Vertex; 4],
    pub triple: Option<[Vertex; 3]>,
    pub condition: ConditionTag,
    pub code: WitnessCode,
    /// Candidate vertex that violates the fewest required identities, for
    /// diagnosing condition (i) and (ii) failures.
    pub closest: Option<Vertex>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConditionSummary {
    pub ok: bool,
    /// Instances the condition was evaluated on: quadruples and triangles for
    /// the four-point condition, hypothesis-matching quadruples for (i) and (ii).
    pub checked: usize,
    pub violations: usize,
    /// Set on (i) and (ii) when the four-point condition failed, in which case
    /// their verdicts carry no realizability meaning on their own.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub caveat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckFragment {
    pub condition: ConditionTag,
    pub summary: ConditionSummary,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub realizable: bool,
    pub n: usize,
    /// False when the scan stopped at the first witness.
    pub complete: bool,
    pub four_point: ConditionSummary,
    pub condition_i: ConditionSummary,
    pub condition_ii: ConditionSummary,
    /// All witnesses, sorted by quadruple, then triple, then condition.
    pub witnesses: Vec<Witness>,
}

impl CheckReport {
    pub fn summary(&self, tag: ConditionTag) -> &ConditionSummary {
        match tag {
            ConditionTag::FourPoint => &self.four_point,
            ConditionTag::ConditionI => &self.condition_i,
            ConditionTag::ConditionIi => &self.condition_ii,
        }
    }

    pub fn fragment(&self, tag: ConditionTag) -> CheckFragment {
        CheckFragment {
            condition: tag,
            summary: self.summary(tag).clone(),
            witnesses: self
                .witnesses
                .iter()
                .filter(|w| w.condition == tag)
                .cloned()
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Collect every witness. When false the scan stops at the first one and
    /// only `realizable` is meaningful.
    pub exhaustive: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { exhaustive: true }
    }
}

/// Four-point condition over distinct quadruples plus every triangle inequality.
pub fn four_point_check(m: &DissimilarityMatrix) -> CheckFragment {
    scan_matrix(m, CheckOptions::default()).fragment(ConditionTag::FourPoint)
}

/// Every star-shaped quadruple has a center `l` with `d(u,v) = d(u,l) + d(v,l)`
/// for all distinct `u, v` in the quadruple.
pub fn condition_i_check(m: &DissimilarityMatrix) -> CheckFragment {
    scan_matrix(m, CheckOptions::default()).fragment(ConditionTag::ConditionI)
}

/// Every triple of every caterpillar-shaped quadruple has a median `l` in `1..=n`.
pub fn condition_ii_check(m: &DissimilarityMatrix) -> CheckFragment {
    scan_matrix(m, CheckOptions::default()).fragment(ConditionTag::ConditionIi)
}

/// Full report; the matrix is realizable by a tree on exactly its points iff
/// all three conditions hold. Requires `n >= 3`.
pub fn check_all(m: &DissimilarityMatrix) -> Result<CheckReport> {
    check_all_with(m, CheckOptions::default())
}

pub fn check_all_with(m: &DissimilarityMatrix, options: CheckOptions) -> Result<CheckReport> {
    if m.n() < 3 {
        return Err(Error::TooSmall { n: m.n(), min: 3 });
    }
    Ok(scan_matrix(m, options))
}

fn scan_matrix(m: &DissimilarityMatrix, options: CheckOptions) -> CheckReport {
    let exact = m.policy().is_exact();
    with_kernel!(m, |ar| Scanner::new(ar, options.exhaustive, exact).run())
}

struct Scanner<'a, K: Arith> {
    ar: &'a K,
    n: usize,
    exhaustive: bool,
    exact: bool,
    summaries: [ConditionSummary; 3],
    witnesses: Vec<Witness>,
    multiple_centers: Vec<[usize; 4]>,
}

fn one_based<const N: usize>(idx: [usize; N]) -> [Vertex; N] {
    idx.map(|v| v + 1)
}

impl<'a, K: Arith> Scanner<'a, K> {
    fn new(ar: &'a K, exhaustive: bool, exact: bool) -> Self {
        Self {
            ar,
            n: ar.n(),
            exhaustive,
            exact,
            summaries: Default::default(),
            witnesses: Vec::new(),
            multiple_centers: Vec::new(),
        }
    }

    fn record(&mut self, witness: Witness) {
        self.summaries[witness.condition as usize].violations += 1;
        self.witnesses.push(witness);
    }

    fn stop(&self) -> bool {
        !self.exhaustive && !self.witnesses.is_empty()
    }

    fn run(mut self) -> CheckReport {
        let complete = self.scan_triangles() && self.scan_quadruples() && self.scan_degenerate_triple();

        let four_point_ok = self.summaries[0].violations == 0;
        if self.exact && four_point_ok {
            assert!(
                self.multiple_centers.is_empty(),
                "star center not unique for quadruples {:?}",
                self.multiple_centers
            );
        }
        for (idx, s) in self.summaries.iter_mut().enumerate() {
            s.ok = s.violations == 0;
            s.caveat = idx > 0 && !four_point_ok;
        }
        self.witnesses.sort();
        let [four_point, condition_i, condition_ii] = self.summaries;
        CheckReport {
            realizable: four_point.ok && condition_i.ok && condition_ii.ok,
            n: self.n,
            complete,
            four_point,
            condition_i,
            condition_ii,
            witnesses: self.witnesses,
        }
    }

    /// Returns false when stopped early.
    fn scan_triangles(&mut self) -> bool {
        let ar = self.ar;
        for i in 0..self.n {
            for j in i + 1..self.n {
                for apex in (0..self.n).filter(|&x| x != i && x != j) {
                    self.summaries[0].checked += 1;
                    let detour = ar.add(ar.d(i, apex), ar.d(apex, j));
                    if ar.cmp(ar.d(i, j), &detour) == Ordering::Greater {
                        let mut triple = [i, j, apex];
                        triple.sort_unstable();
                        self.record(Witness {
                            quadruple: one_based([i, j, apex, apex]),
                            triple: Some(one_based(triple)),
                            condition: ConditionTag::FourPoint,
                            code: WitnessCode::TriangleInequality,
                            closest: None,
                        });
                        if self.stop() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn scan_quadruples(&mut self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for t in k + 1..n {
                        self.visit_quadruple([i, j, k, t]);
                        if self.stop() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn visit_quadruple(&mut self, q: [usize; 4]) {
        let ar = self.ar;
        self.summaries[0].checked += 1;
        let (kind, _) = classify_sums(ar, &quad_sums(ar, q));
        match kind {
            QuadrupleKind::Violation => self.record(Witness {
                quadruple: one_based(q),
                triple: None,
                condition: ConditionTag::FourPoint,
                code: WitnessCode::MaxAttainedOnce,
                closest: None,
            }),
            QuadrupleKind::AllThreeEqual => {
                self.summaries[1].checked += 1;
                let (centers, closest) = self.star_centers(q);
                if centers.is_empty() {
                    self.record(Witness {
                        quadruple: one_based(q),
                        triple: None,
                        condition: ConditionTag::ConditionI,
                        code: WitnessCode::NoStarCenter,
                        closest: Some(closest + 1),
                    });
                } else if centers.len() > 1 {
                    self.multiple_centers.push(one_based(q));
                }
            }
            QuadrupleKind::TwoEqualMax => {
                self.summaries[2].checked += 1;
                let triples = [
                    [q[0], q[1], q[2]],
                    [q[0], q[1], q[3]],
                    [q[0], q[2], q[3]],
                    [q[1], q[2], q[3]],
                ];
                for triple in triples {
                    if let Err(closest) = self.median(triple) {
                        self.record(Witness {
                            quadruple: one_based(q),
                            triple: Some(one_based(triple)),
                            condition: ConditionTag::ConditionIi,
                            code: WitnessCode::NoMedianVertex,
                            closest: Some(closest + 1),
                        });
                    }
                }
            }
        }
    }

    /// With only three points the caterpillar hypothesis can only be met by
    /// the degenerate quadruple `(i, j, k, k)`, i.e. whenever
    /// `d(i,j) < d(i,k) + d(j,k)` for some labeling of the triple.
    fn scan_degenerate_triple(&mut self) -> bool {
        if self.n != 3 {
            return true;
        }
        let ar = self.ar;
        let hypothesis = [[0, 1, 2], [0, 2, 1], [1, 2, 0]].into_iter().find(|&[i, j, apex]| {
            ar.cmp(ar.d(i, j), &ar.add(ar.d(i, apex), ar.d(j, apex))) == Ordering::Less
        });
        let Some([i, j, apex]) = hypothesis else {
            return true;
        };
        self.summaries[2].checked += 1;
        if let Err(closest) = self.median([0, 1, 2]) {
            self.record(Witness {
                quadruple: one_based([i, j, apex, apex]),
                triple: Some([1, 2, 3]),
                condition: ConditionTag::ConditionIi,
                code: WitnessCode::NoMedianVertex,
                closest: Some(closest + 1),
            });
        }
        !self.stop()
    }

    /// All `l` satisfying the star identities on `q`, plus the candidate with
    /// the fewest failed identities (smallest label on ties).
    fn star_centers(&self, q: [usize; 4]) -> (Vec<usize>, usize) {
        let ar = self.ar;
        let mut centers = Vec::new();
        let mut best = (usize::MAX, 0);
        for l in 0..self.n {
            let mut failures = 0;
            for a in 0..4 {
                for b in a + 1..4 {
                    if !ar.passes_through(q[a], q[b], l) {
                        failures += 1;
                    }
                }
            }
            if failures == 0 {
                centers.push(l);
            }
            if failures < best.0 {
                best = (failures, l);
            }
        }
        (centers, best.1)
    }

    /// A median `l` of `(u, v, w)`: the three path identities hold and the three
    /// mixed sums `d(u,v)+d(w,l)`, `d(u,w)+d(v,l)`, `d(u,l)+d(v,w)` agree. On
    /// failure returns the closest candidate.
    fn median(&self, [u, v, w]: [usize; 3]) -> std::result::Result<usize, usize> {
        let ar = self.ar;
        let mut best = (usize::MAX, 0);
        for l in 0..self.n {
            let mixed = [
                ar.pair_sum(u, v, w, l),
                ar.pair_sum(u, w, v, l),
                ar.pair_sum(u, l, v, w),
            ];
            let checks = [
                ar.passes_through(u, v, l),
                ar.passes_through(u, w, l),
                ar.passes_through(v, w, l),
                ar.eq(&mixed[0], &mixed[1]),
                ar.eq(&mixed[1], &mixed[2]),
            ];
            let failures = checks.iter().filter(|ok| !**ok).count();
            if failures == 0 {
                return Ok(l);
            }
            if failures < best.0 {
                best = (failures, l);
            }
        }
        Err(best.1)
    }
}
