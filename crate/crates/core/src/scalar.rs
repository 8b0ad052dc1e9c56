//! Numeric policy and the scalar values carried by matrices and trees.
//!
//! Two policies exist. `Exact` stores every value as an arbitrary-precision
//! rational and compares exactly; decimal input converts losslessly. `Float`
//! stores `f64` values and treats `x` and `y` as equal when
//! `|x - y| <= epsilon * max(1, |x|, |y|)`.
//!
//! A matrix or tree holds values of a single policy. Arithmetic between an
//! exact and a float scalar is a logic error and panics; constructors reject
//! mixed inputs with [`Error::MixedPolicy`](crate::Error::MixedPolicy).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use bigdecimal::BigDecimal;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Largest decimal exponent accepted when parsing exact values.
const MAX_DECIMAL_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Policy {
    #[default]
    Exact,
    Float { epsilon: f64 },
}

impl Policy {
    pub const DEFAULT_EPSILON: f64 = 1e-9;

    /// Float policy with the given relative tolerance. `epsilon` must be finite and positive.
    pub fn float(epsilon: f64) -> Option<Policy> {
        (epsilon.is_finite() && epsilon > 0.0).then_some(Policy::Float { epsilon })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Policy::Exact)
    }

    /// True when `value` belongs to this policy.
    pub fn admits(&self, value: &Scalar) -> bool {
        matches!(
            (self, value),
            (Policy::Exact, Scalar::Exact(_)) | (Policy::Float { .. }, Scalar::Float(_))
        )
    }

    pub fn zero(&self) -> Scalar {
        self.from_integer(0)
    }

    pub fn from_integer(&self, value: i64) -> Scalar {
        match self {
            Policy::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(value))),
            Policy::Float { .. } => Scalar::Float(value as f64),
        }
    }

    /// `numer / denom` under this policy. Panics when `denom` is zero.
    pub fn from_ratio(&self, numer: i64, denom: i64) -> Scalar {
        assert!(denom != 0, "zero denominator");
        match self {
            Policy::Exact => Scalar::Exact(BigRational::new(numer.into(), denom.into())),
            Policy::Float { .. } => Scalar::Float(numer as f64 / denom as f64),
        }
    }

    /// Converts a scalar of either policy into this one. Exact to float is
    /// lossy; float to exact is lossless (every finite `f64` is a dyadic rational).
    pub fn convert(&self, value: &Scalar) -> Scalar {
        match (self, value) {
            (Policy::Exact, Scalar::Exact(r)) => Scalar::Exact(r.clone()),
            (Policy::Exact, Scalar::Float(f)) => Scalar::Exact(
                BigRational::from_float(*f).unwrap_or_else(BigRational::zero),
            ),
            (Policy::Float { .. }, Scalar::Exact(r)) => {
                Scalar::Float(r.to_f64().unwrap_or(f64::NAN))
            }
            (Policy::Float { .. }, Scalar::Float(f)) => Scalar::Float(*f),
        }
    }

    /// Parses a decimal string (`"3"`, `"-0.25"`, `"1.5e-3"`) or a fraction
    /// (`"7/8"`).
    pub fn parse(&self, text: &str) -> Result<Scalar, String> {
        let text = text.trim();
        if text.is_empty() {
            return Err("empty value".into());
        }
        let exact = parse_rational(text)?;
        match self {
            Policy::Exact => Ok(Scalar::Exact(exact)),
            Policy::Float { .. } => {
                let value = if text.contains('/') {
                    exact.to_f64().unwrap_or(f64::NAN)
                } else {
                    f64::from_str(text).map_err(|e| format!("{text:?}: {e}"))?
                };
                if value.is_finite() {
                    Ok(Scalar::Float(value))
                } else {
                    Err(format!("{text:?} is not a finite number"))
                }
            }
        }
    }

    /// Three-way comparison honoring the policy's notion of equality.
    pub fn cmp(&self, a: &Scalar, b: &Scalar) -> Ordering {
        match (self, a, b) {
            (Policy::Exact, Scalar::Exact(x), Scalar::Exact(y)) => x.cmp(y),
            (Policy::Float { epsilon }, Scalar::Float(x), Scalar::Float(y)) => {
                float_cmp(*x, *y, *epsilon)
            }
            _ => panic!("scalar does not match numeric policy {self:?}"),
        }
    }

    pub fn eq(&self, a: &Scalar, b: &Scalar) -> bool {
        self.cmp(a, b) == Ordering::Equal
    }

    pub fn is_positive(&self, a: &Scalar) -> bool {
        self.cmp(a, &self.zero()) == Ordering::Greater
    }
}

pub(crate) fn float_cmp(x: f64, y: f64, epsilon: f64) -> Ordering {
    let scale = 1f64.max(x.abs()).max(y.abs());
    if (x - y).abs() <= epsilon * scale {
        Ordering::Equal
    } else if x < y {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    if let Some((numer, denom)) = text.split_once('/') {
        let numer = BigInt::from_str(numer.trim()).map_err(|e| format!("{text:?}: {e}"))?;
        let denom = BigInt::from_str(denom.trim()).map_err(|e| format!("{text:?}: {e}"))?;
        if denom.is_zero() {
            return Err(format!("{text:?}: zero denominator"));
        }
        return Ok(BigRational::new(numer, denom));
    }
    let decimal = BigDecimal::from_str(text).map_err(|_| format!("{text:?} is not a decimal number"))?;
    let (digits, scale) = decimal.into_bigint_and_exponent();
    if scale.abs() > MAX_DECIMAL_EXPONENT {
        return Err(format!("{text:?}: exponent out of range"));
    }
    let power = BigInt::from(10u32).pow(scale.unsigned_abs() as u32);
    Ok(if scale >= 0 {
        BigRational::new(digits, power)
    } else {
        BigRational::from_integer(digits * power)
    })
}

/// Decimal rendering of an exact rational: shortest terminating decimal when
/// one exists, `p/q` otherwise.
pub(crate) fn format_rational(value: &BigRational) -> String {
    let denom = value.denom();
    if denom.is_one() {
        return value.numer().to_string();
    }
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut rest = denom.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", value.numer(), denom);
    }
    let digits = twos.max(fives);
    let scaled = value.numer() * BigInt::from(10u32).pow(digits) / denom;
    BigDecimal::new(scaled, digits as i64).to_plain_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn policy_matches(&self, other: &Scalar) -> bool {
        matches!(
            (self, other),
            (Scalar::Exact(_), Scalar::Exact(_)) | (Scalar::Float(_), Scalar::Float(_))
        )
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Sign test without tolerance.
    pub fn is_strictly_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(f) => *f > 0.0,
        }
    }

    pub fn half(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r / BigInt::from(2u32)),
            Scalar::Float(f) => Scalar::Float(f / 2.0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(f) => *f,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&format_rational(r)),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Serialized as its decimal string.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => panic!("mixed numeric policies"),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a - b),
            _ => panic!("mixed numeric policies"),
        }
    }
}
