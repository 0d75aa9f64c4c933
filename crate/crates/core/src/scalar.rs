//! Exact scalar types used for costs, approximation ratios and cycle averages.
//!
//! Every comparison the classifier makes is an exact equality or a strict /
//! non-strict threshold, so the crate is generic over exact rational scalars
//! rather than floating point.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// An exact, totally ordered field element.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Builds `numer / denom`, or `None` when it does not fit the representation.
    fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self>;

    /// Lossy conversion, only used for reporting and constant tuning.
    fn to_f64(&self) -> f64;

    /// `k` as a scalar.
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count fits scalar")
    }

    /// Numerator and denominator in lowest terms (denominator positive).
    fn to_fraction(&self) -> (BigInt, BigInt);

    /// Smallest integer `>= self`.
    fn ceil_to_usize(&self) -> Option<usize> {
        let (n, d) = self.to_fraction();
        let (q, r) = n.div_rem(&d);
        let q = if r > BigInt::zero() { q + 1 } else { q };
        q.to_usize()
    }
}

macro_rules! impl_machine_ratio {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self> {
                if denom.is_zero() {
                    return None;
                }
                let g = numer.gcd(denom);
                let (mut n, mut d) = (numer / &g, denom / &g);
                if d.is_negative() {
                    n = -n;
                    d = -d;
                }
                Some(Ratio::new_raw(n.to_string().parse().ok()?, d.to_string().parse().ok()?))
            }

            fn to_f64(&self) -> f64 {
                *self.numer() as f64 / *self.denom() as f64
            }

            fn to_fraction(&self) -> (BigInt, BigInt) {
                (BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }
        }
    };
}

impl_machine_ratio!(i64);
impl_machine_ratio!(i128);

impl Scalar for BigRational {
    fn from_fraction(numer: &BigInt, denom: &BigInt) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        Some(Ratio::new(numer.clone(), denom.clone()))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_fraction(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }
}

/// Why a rational literal was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{0}` does not fit the scalar type")]
    Overflow(String),
}

/// Parses an integer (`3`), a decimal (`0.25`, converted exactly) or a
/// fraction (`7/4`). Signs are accepted; callers reject negatives where
/// they are meaningless.
pub fn parse_rational<S: Scalar>(text: &str) -> Result<S, RationalError> {
    let t = text.trim();
    let malformed = || RationalError::Malformed(t.to_string());
    let (numer, denom) = if let Some((a, b)) = t.split_once('/') {
        let n = parse_int(a).ok_or_else(malformed)?;
        let d = parse_int(b).ok_or_else(malformed)?;
        if d.is_zero() {
            return Err(RationalError::ZeroDenominator(t.to_string()));
        }
        (n, d)
    } else if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = int.starts_with('-');
        let int_part = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => parse_int(digits).ok_or_else(malformed)?,
        };
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        let frac_part = BigInt::parse_bytes(frac.as_bytes(), 10).ok_or_else(malformed)?;
        let magnitude = int_part * &scale + frac_part;
        (if negative { -magnitude } else { magnitude }, scale)
    } else {
        (parse_int(t).ok_or_else(malformed)?, BigInt::one())
    };
    S::from_fraction(&numer, &denom).ok_or_else(|| RationalError::Overflow(t.to_string()))
}

fn parse_int(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('+').unwrap_or(text);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(digits.as_bytes(), 10)
}
