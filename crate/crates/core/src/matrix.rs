use std::fmt;

use crate::error::{Error, MatrixViolation, Result};
use crate::scalar::{Policy, Scalar};

/// Vertex label. Labels are 1-based: a matrix or tree on `n` points uses `1..=n`.
pub type Vertex = usize;

/// Symmetric family of pairwise dissimilarities on `1..=n` with zero diagonal
/// and strictly positive off-diagonal entries.
#[derive(Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    policy: Policy,
    entries: Vec<Scalar>,
}

impl DissimilarityMatrix {
    /// Validates `rows` (row `r` holds `d(r+1, 1..=n)`). The first violation in
    /// row-major order over the upper triangle and diagonal is reported.
    pub fn new(policy: Policy, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::TooSmall { n: 0, min: 1 });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedInput {
                    line: r + 1,
                    column: 0,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            if row.iter().any(|v| !policy.admits(v)) {
                return Err(Error::MixedPolicy);
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let value = &rows[r][c];
                let fail = |violation| Error::InvalidMatrix {
                    row: r + 1,
                    col: c + 1,
                    violation,
                };
                if r == c {
                    if !policy.eq(value, &policy.zero()) {
                        return Err(fail(MatrixViolation::NonzeroDiagonal));
                    }
                    entries.push(policy.zero());
                } else if r < c {
                    if !value.is_strictly_positive() {
                        return Err(fail(MatrixViolation::NonPositive));
                    }
                    if !policy.eq(value, &rows[c][r]) {
                        return Err(fail(MatrixViolation::Asymmetric));
                    }
                    entries.push(value.clone());
                } else {
                    // Mirror the upper triangle so symmetry holds exactly under either policy.
                    entries.push(entries[c * n + r].clone());
                }
            }
        }
        Ok(Self { n, policy, entries })
    }

    /// Builds a matrix from `f(i, j)` evaluated for `1 <= i < j <= n`.
    pub fn from_fn<F>(n: usize, policy: Policy, mut f: F) -> Result<Self>
    where
        F: FnMut(Vertex, Vertex) -> Scalar,
    {
        let mut rows = vec![vec![policy.zero(); n]; n];
        for i in 1..=n {
            for j in i + 1..=n {
                let value = f(i, j);
                rows[i - 1][j - 1] = value.clone();
                rows[j - 1][i - 1] = value;
            }
        }
        Self::new(policy, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// `d(i, j)` for 1-based labels.
    pub fn get(&self, i: Vertex, j: Vertex) -> Result<&Scalar> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        Ok(&self.entries[(i - 1) * self.n + (j - 1)])
    }

    /// `d(i, j)` for 1-based labels; panics when a label is out of range.
    pub fn at(&self, i: Vertex, j: Vertex) -> &Scalar {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "vertex out of range"
        );
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// Copy with `d(i, j) = d(j, i) = value`.
    pub fn with_entry(&self, i: Vertex, j: Vertex, value: Scalar) -> Result<Self> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        let mut rows = self.rows();
        rows[i - 1][j - 1] = value.clone();
        rows[j - 1][i - 1] = value;
        Self::new(self.policy, rows)
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.n).map(<[Scalar]>::to_vec).collect()
    }

    /// Entry-wise equality under this matrix's policy.
    pub fn approx_eq(&self, other: &DissimilarityMatrix) -> bool {
        self.n == other.n
            && self.policy == other.policy
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| self.policy.eq(a, b))
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (1..=self.n).contains(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex { vertex: v, n: self.n })
        }
    }

    pub(crate) fn entries(&self) -> &[Scalar] {
        &self.entries
    }
}

impl fmt::Debug for DissimilarityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DissimilarityMatrix(n={}, {:?})", self.n, self.policy)?;
        for row in self.entries.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(Scalar::to_string).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Policy::Exact.from_integer(v)).collect())
            .collect()
    }

    #[test]
    fn accepts_valid_matrix() {
        let m = DissimilarityMatrix::new(Policy::Exact, ints(&[&[0, 3, 1], &[3, 0, 2], &[1, 2, 0]]))
            .unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.at(1, 2), &Policy::Exact.from_integer(3));
        assert_eq!(m.get(3, 2).unwrap(), &Policy::Exact.from_integer(2));
        assert!(matches!(m.get(4, 1), Err(Error::UnknownVertex { vertex: 4, n: 3 })));
    }

    #[test]
    fn reports_violation_location() {
        let err = DissimilarityMatrix::new(Policy::Exact, ints(&[&[0, 1], &[2, 0]])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidMatrix { row: 1, col: 2, violation: MatrixViolation::Asymmetric }
        ));
        let err = DissimilarityMatrix::new(Policy::Exact, ints(&[&[0, -1], &[-1, 0]])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidMatrix { row: 1, col: 2, violation: MatrixViolation::NonPositive }
        ));
        let err = DissimilarityMatrix::new(Policy::Exact, ints(&[&[0, 1], &[1, 5]])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidMatrix { row: 2, col: 2, violation: MatrixViolation::NonzeroDiagonal }
        ));
    }

    #[test]
    fn rejects_ragged_and_mixed() {
        let mut rows = ints(&[&[0, 1], &[1, 0]]);
        rows[1].pop();
        assert!(matches!(
            DissimilarityMatrix::new(Policy::Exact, rows),
            Err(Error::MalformedInput { line: 2, .. })
        ));
        let mut rows = ints(&[&[0, 1], &[1, 0]]);
        rows[0][1] = Scalar::Float(1.0);
        assert!(matches!(
            DissimilarityMatrix::new(Policy::Exact, rows),
            Err(Error::MixedPolicy)
        ));
    }

    #[test]
    fn single_point() {
        let m = DissimilarityMatrix::new(Policy::Exact, ints(&[&[0]])).unwrap();
        assert_eq!(m.n(), 1);
    }
}
