//! Arithmetic back ends for the combinatorial scans.
//!
//! The checkers and the reconstruction only add, subtract and compare matrix
//! entries, so exact matrices are scaled by the least common multiple of
//! their denominators into `i128` whenever the scaled values leave enough
//! headroom. Matrices that do not fit fall back to `BigRational`. Float
//! matrices compare with the policy's relative tolerance.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::matrix::DissimilarityMatrix;
use crate::scalar::{float_cmp, Policy, Scalar};

/// Scaled entries must stay below this so sums of a handful of terms cannot overflow.
const INT_HEADROOM_BITS: u64 = 100;

/// Matrix view used by the scans. Indices are 0-based.
pub(crate) trait Arith {
    type Num: Clone + Debug;

    fn n(&self) -> usize;
    fn d(&self, i: usize, j: usize) -> &Self::Num;
    fn add(&self, a: &Self::Num, b: &Self::Num) -> Self::Num;
    fn sub(&self, a: &Self::Num, b: &Self::Num) -> Self::Num;
    fn cmp(&self, a: &Self::Num, b: &Self::Num) -> Ordering;
    fn zero(&self) -> Self::Num;
    fn to_scalar(&self, a: &Self::Num) -> Scalar;

    fn eq(&self, a: &Self::Num, b: &Self::Num) -> bool {
        self.cmp(a, b) == Ordering::Equal
    }

    fn is_positive(&self, a: &Self::Num) -> bool {
        self.cmp(a, &self.zero()) == Ordering::Greater
    }

    /// `d(i, j) + d(k, l)`.
    fn pair_sum(&self, i: usize, j: usize, k: usize, l: usize) -> Self::Num {
        self.add(self.d(i, j), self.d(k, l))
    }

    /// Whether `d(u, v) == d(u, via) + d(via, v)`.
    fn passes_through(&self, u: usize, v: usize, via: usize) -> bool {
        self.eq(self.d(u, v), &self.add(self.d(u, via), self.d(via, v)))
    }
}

pub(crate) struct ScaledInt {
    n: usize,
    scale: BigInt,
    values: Vec<i128>,
}

impl Arith for ScaledInt {
    type Num = i128;

    fn n(&self) -> usize {
        self.n
    }
    fn d(&self, i: usize, j: usize) -> &i128 {
        &self.values[i * self.n + j]
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        a + b
    }
    fn sub(&self, a: &i128, b: &i128) -> i128 {
        a - b
    }
    fn cmp(&self, a: &i128, b: &i128) -> Ordering {
        a.cmp(b)
    }
    fn zero(&self) -> i128 {
        0
    }
    fn to_scalar(&self, a: &i128) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(*a), self.scale.clone()))
    }
}

pub(crate) struct BigExact {
    n: usize,
    values: Vec<BigRational>,
}

impl Arith for BigExact {
    type Num = BigRational;

    fn n(&self) -> usize {
        self.n
    }
    fn d(&self, i: usize, j: usize) -> &BigRational {
        &self.values[i * self.n + j]
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn cmp(&self, a: &BigRational, b: &BigRational) -> Ordering {
        a.cmp(b)
    }
    fn zero(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(0))
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Exact(a.clone())
    }
}

pub(crate) struct FloatArith {
    n: usize,
    epsilon: f64,
    values: Vec<f64>,
}

impl Arith for FloatArith {
    type Num = f64;

    fn n(&self) -> usize {
        self.n
    }
    fn d(&self, i: usize, j: usize) -> &f64 {
        &self.values[i * self.n + j]
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn cmp(&self, a: &f64, b: &f64) -> Ordering {
        float_cmp(*a, *b, self.epsilon)
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn to_scalar(&self, a: &f64) -> Scalar {
        Scalar::Float(*a)
    }
}

pub(crate) enum Kernel {
    Int(ScaledInt),
    Big(BigExact),
    Float(FloatArith),
}

impl Kernel {
    pub(crate) fn new(m: &DissimilarityMatrix) -> Self {
        let n = m.n();
        match m.policy() {
            Policy::Float { epsilon } => Kernel::Float(FloatArith {
                n,
                epsilon,
                values: m.entries().iter().map(Scalar::to_f64).collect(),
            }),
            Policy::Exact => {
                let values: Vec<BigRational> = m
                    .entries()
                    .iter()
                    .map(|s| s.as_rational().expect("exact matrix").clone())
                    .collect();
                match scale_to_int(&values) {
                    Some((scale, ints)) => Kernel::Int(ScaledInt {
                        n,
                        scale,
                        values: ints,
                    }),
                    None => Kernel::Big(BigExact { n, values }),
                }
            }
        }
    }
}

fn scale_to_int(values: &[BigRational]) -> Option<(BigInt, Vec<i128>)> {
    let scale = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints = values
        .iter()
        .map(|v| {
            let scaled = v.numer() * (&scale / v.denom());
            if scaled.abs().bits() >= INT_HEADROOM_BITS {
                None
            } else {
                scaled.to_i128()
            }
        })
        .collect::<Option<Vec<_>>>()?;
    Some((scale, ints))
}

/// Evaluates `$body` with `$k` bound to the matrix's arithmetic back end.
macro_rules! with_kernel {
    ($matrix:expr, |$k:ident| $body:expr) => {{
        match $crate::arith::Kernel::new($matrix) {
            $crate::arith::Kernel::Int(ref $k) => $body,
            $crate::arith::Kernel::Big(ref $k) => $body,
            $crate::arith::Kernel::Float(ref $k) => $body,
        }
    }};
}
pub(crate) use with_kernel;
