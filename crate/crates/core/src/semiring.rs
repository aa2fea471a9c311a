//! Zero-sum-free commutative semirings: the scalars that weight distributions.
//!
//! Two instances are provided: exact non-negative rationals and booleans.
//! Zero-sum-freeness (`a + b = 0` forces `a = b = 0`) is what makes
//! support-based reasoning about distributions sound, so signed or floating
//! scalars are deliberately not supported.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// A commutative semiring with decidable equality and a canonical order.
///
/// The order is used only to keep containers canonical; it carries no
/// algebraic meaning. Laws (associativity, commutativity, distributivity,
/// zero-sum-freeness) are checked by sampling in the test suite.
pub trait Semiring: Clone + Eq + Ord + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Exact non-negative rational scalar, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `num/den`, rejecting negative values and zero denominators.
    pub fn new(num: i64, den: i64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::InvalidScalar("denominator is zero".into()));
        }
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        Self::from_big(r)
    }

    pub fn from_big(r: BigRational) -> Result<Self, Error> {
        if r.is_negative() {
            return Err(Error::InvalidScalar(format!("negative scalar {r}")));
        }
        Ok(Rat(r))
    }

    pub fn integer(n: u64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn into_big(self) -> BigRational {
        self.0
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Parses `"num/den"` or `"num"`; whitespace is not accepted.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |what: &str| Error::InvalidScalar(format!("{what}: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        Self::from_big(BigRational::new(num, den))
    }
}

impl Semiring for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn add(&self, rhs: &Self) -> Self {
        Rat(&self.0 + &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rat(&self.0 * &rhs.0)
    }
}

/// The boolean semiring: `add = OR`, `mul = AND`. Distributions over it are
/// possibility assignments (supports).
impl Semiring for bool {
    fn zero() -> Self {
        false
    }
    fn one() -> Self {
        true
    }
    fn add(&self, rhs: &Self) -> Self {
        *self || *rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        *self && *rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn sample_rat(rng: &mut Rng) -> Rat {
        Rat::new((rng.below(40)) as i64, (1 + rng.below(12)) as i64).unwrap()
    }

    #[test]
    fn rational_parse_and_display_round_trip() {
        let r: Rat = "2/6".parse().unwrap();
        assert_eq!(r, Rat::new(1, 3).unwrap());
        assert_eq!(r.to_string(), "1/3");
        assert_eq!("7".parse::<Rat>().unwrap().to_string(), "7");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("-1/2".parse::<Rat>().is_err());
    }

    #[test]
    fn semiring_laws_hold_on_sampled_triples() {
        let mut rng = Rng::new(0xC0FFEE);
        for _ in 0..200 {
            let (a, b, c) = (sample_rat(&mut rng), sample_rat(&mut rng), sample_rat(&mut rng));
            assert_eq!(a.add(&b), b.add(&a));
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.add(&Rat::zero()), a);
            assert_eq!(a.mul(&Rat::one()), a);
            assert_eq!(a.mul(&Rat::zero()), Rat::zero());
        }
        let bools = [false, true];
        for a in bools {
            for b in bools {
                for c in bools {
                    assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                    assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                }
            }
        }
    }

    #[test]
    fn zero_sum_freeness_on_sampled_pairs() {
        let mut rng = Rng::new(7);
        for _ in 0..200 {
            let (a, b) = (sample_rat(&mut rng), sample_rat(&mut rng));
            if a.add(&b).is_zero() {
                assert!(a.is_zero() && b.is_zero());
            }
        }
        for a in [false, true] {
            for b in [false, true] {
                if !a.add(&b) {
                    assert!(!a && !b);
                }
            }
        }
    }
}
