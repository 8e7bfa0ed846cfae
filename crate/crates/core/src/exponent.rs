//! Lebesgue exponents in `[1, inf]`, kept as exact rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinity,
}

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Rational64::new(num, den))
    }

    /// Checked constructor: exponents must lie in `[1, inf]`.
    pub fn new(r: Rational64) -> Result<Self> {
        if r < Rational64::one() {
            return Err(Error::InvalidExponent(r.to_string()));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, exact.
    pub fn reciprocal(&self) -> Rational64 {
        match self {
            Exponent::Finite(r) => r.recip(),
            Exponent::Infinity => Rational64::zero(),
        }
    }

    /// Dual exponent `p'` with `1/p + 1/p' = 1`.
    pub fn dual(&self) -> Exponent {
        let inv = Rational64::one() - self.reciprocal();
        if inv.is_zero() {
            Exponent::Infinity
        } else {
            Exponent::Finite(inv.recip())
        }
    }

    pub fn from_reciprocal(inv: Rational64) -> Result<Exponent> {
        if inv.is_zero() {
            Ok(Exponent::Infinity)
        } else if inv < Rational64::zero() || inv > Rational64::one() {
            Err(Error::InvalidExponent(format!("1/{inv}")))
        } else {
            Ok(Exponent::Finite(inv.recip()))
        }
    }

    pub fn is_even_integer(&self) -> Option<i64> {
        match self {
            Exponent::Finite(r) if r.is_integer() && r.to_integer() % 2 == 0 => {
                Some(r.to_integer())
            }
            _ => None,
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Larger exponent <=> smaller reciprocal.
        other.reciprocal().cmp(&self.reciprocal())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `"inf"`, integers and fractions `"a/b"`; decimals are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let bad = || Error::InvalidExponent(s.to_string());
        let r = if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Rational64::new(a, b)
        } else {
            Rational64::from_integer(t.parse().map_err(|_| bad())?)
        };
        Exponent::new(r)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("8/5".parse::<Exponent>().unwrap(), Exponent::ratio(8, 5));
        assert_eq!("4".parse::<Exponent>().unwrap(), Exponent::int(4));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert!("3.6".parse::<Exponent>().is_err());
        assert!("1/2".parse::<Exponent>().is_err());
        assert_eq!(Exponent::ratio(18, 5).to_string(), "18/5");
    }

    #[test]
    fn duals() {
        assert_eq!(Exponent::int(2).dual(), Exponent::int(2));
        assert_eq!(Exponent::int(1).dual(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.dual(), Exponent::int(1));
        assert_eq!(Exponent::ratio(8, 5).dual(), Exponent::ratio(8, 3));
    }

    #[test]
    fn ordering() {
        assert!(Exponent::int(3) < Exponent::int(4));
        assert!(Exponent::int(4) < Exponent::Infinity);
        assert!(Exponent::ratio(18, 5) > Exponent::int(3));
    }
}
