//! Scalar abstraction for the numeric layer.
//!
//! Distributions, group probabilities, distances and the simplex solver are
//! generic over [`Scalar`]. The game engine itself is pinned to
//! [`Rational`](crate::Rational) because every verdict it produces is an exact
//! comparison against `α`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, Zero};

use crate::error::{Error, Result};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed {
    /// `num / den`; `den` must be nonzero.
    fn from_fraction(num: u64, den: u64) -> Self;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Debug + Integer + Signed + FromPrimitive,
{
    fn from_fraction(num: u64, den: u64) -> Self {
        let n = T::from_u64(num).expect("numerator fits");
        let d = T::from_u64(den).expect("denominator fits");
        Ratio::new(n, d)
    }
}

impl Scalar for f64 {
    fn from_fraction(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
}

/// Renders an exact rational as `num/den` (denominator always present).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses the `num/den` notation used by scenario files and traces.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidRational(text.to_string());
    let (num, den) = text.trim().split_once('/').ok_or_else(bad)?;
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let (num, den) = (num.trim(), den.trim());
    if !is_int(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_notation() {
        let q = parse_rational("2/6").unwrap();
        assert_eq!(format_rational(&q), "1/3");
        assert_eq!(format_rational(&parse_rational("3/1").unwrap()), "3/1");
        for bad in ["0.5", "1", "1/0", "a/b", "/3", "1/-2", ""] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn fractions_across_scalars() {
        assert_eq!(Ratio::<i64>::from_fraction(2, 4), Ratio::new(1, 2));
        assert_eq!(f64::from_fraction(1, 4), 0.25);
        assert_eq!(
            BigRational::from_fraction(3, 9),
            parse_rational("1/3").unwrap()
        );
    }
}
