use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, lcm_all, parse_rational};
use crate::schreier::FinSet;

/// A finitely supported vector with exact rational entries. Zero entries are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector {
    entries: BTreeMap<usize, BigRational>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut v = Self::zero();
        for (c, x) in pairs {
            v.add_at(c, &x);
        }
        v
    }

    /// `Σ_{i∈set} e_i`
    pub fn indicator(set: &FinSet) -> Self {
        Self::from_pairs(set.iter().map(|i| (i, BigRational::one())))
    }

    pub fn unit(coord: usize) -> Self {
        Self::from_pairs([(coord, BigRational::one())])
    }

    pub fn get(&self, coord: usize) -> BigRational {
        self.entries.get(&coord).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, coord: usize, value: BigRational) {
        if value.is_zero() {
            self.entries.remove(&coord);
        } else {
            self.entries.insert(coord, value);
        }
    }

    pub fn add_at(&mut self, coord: usize, value: &BigRational) {
        let v = self.get(coord) + value;
        self.set(coord, v);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> FinSet {
        FinSet::from_sorted(self.entries.keys().copied().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> + '_ {
        self.entries.iter().map(|(&c, x)| (c, x))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_pairs(self.iter().map(|(i, x)| (i, x * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.add_at(i, x);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_pairs(self.iter().map(|(i, x)| (i, -x)))
    }

    /// Coordinates outside `set` are dropped.
    pub fn restrict(&self, set: &FinSet) -> Self {
        Self::from_pairs(
            self.iter()
                .filter(|(i, _)| set.contains(*i))
                .map(|(i, x)| (i, x.clone())),
        )
    }

    pub fn max_abs(&self) -> BigRational {
        self.entries
            .values()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn l1(&self) -> BigRational {
        self.entries
            .values()
            .map(|x| x.abs())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// `Σ_i self(i)·other(i)`
    pub fn dot(&self, other: &Self) -> BigRational {
        self.iter()
            .map(|(i, x)| x * other.get(i))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// `|self(i)| <= |other(i)|` for every coordinate.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.iter().all(|(i, x)| x.abs() <= other.get(i).abs())
    }

    /// Least common denominator `D` and the integer entries of `D·self`.
    pub fn to_integers(&self) -> (BigInt, Vec<(usize, BigInt)>) {
        let d = lcm_all(self.entries.values().map(|x| x.denom()));
        let ints = self
            .iter()
            .map(|(i, x)| (i, x.numer() * (&d / x.denom())))
            .collect();
        (d, ints)
    }
}

impl fmt::Display for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (i, x)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}:{}", fmt_rational(x))?;
        }
        Ok(())
    }
}

impl FromStr for SparseVector {
    type Err = Error;

    /// `3:1,6:-1/2`; `0` or the empty string is the zero vector. Repeated
    /// coordinates are summed.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Self::zero());
        }
        let mut v = Self::zero();
        for item in s.split(',') {
            let (c, x) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("`{item}` is not `coord:value`")))?;
            let c: usize = c
                .trim()
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| Error::Parse(format!("bad coordinate in `{item}`")))?;
            v.add_at(c, &parse_rational(x)?);
        }
        Ok(v)
    }
}

impl Serialize for SparseVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .iter()
            .map(|(i, x)| (i.to_string(), fmt_rational(x)))
            .collect();
        map.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parse_display_round_trip() {
        let v: SparseVector = "6:1/2, 3:1,9:0".parse().unwrap();
        assert_eq!(v.to_string(), "3:1,6:1/2");
        assert_eq!(v.len(), 2);
        assert!("3".parse::<SparseVector>().is_err());
        assert!("0:1".parse::<SparseVector>().is_err());
        assert!("0".parse::<SparseVector>().unwrap().is_zero());
    }

    #[test]
    fn arithmetic() {
        let v: SparseVector = "2:1,3:-1/2".parse().unwrap();
        let w: SparseVector = "3:1/2,4:2".parse().unwrap();
        assert_eq!(v.add(&w).to_string(), "2:1,4:2");
        assert_eq!(v.neg().to_string(), "2:-1,3:1/2");
        assert_eq!(v.max_abs(), int(1));
        assert_eq!(v.l1(), ratio(3, 2));
        assert_eq!(v.dot(&w), ratio(-1, 4));
        let (d, ints) = v.to_integers();
        assert_eq!(d, BigInt::from(2));
        assert_eq!(ints, vec![(2, BigInt::from(2)), (3, BigInt::from(-1))]);
    }
}
