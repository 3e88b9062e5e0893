//! Rational helpers shared by the whole crate: parsing and printing, integer
//! powers, and certified enclosures for the handful of quantities that are
//! irrational (non-integer powers of rationals).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Relative half-width used when a real number has to be enclosed from a
/// floating-point evaluation. It is several orders of magnitude above the
/// error of `f64::powf` for the exponents used here.
pub const ENCLOSURE_REL: f64 = 1e-12;

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `7`, `-3`, `2/5` or a plain decimal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("`{s}` has a zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole: BigInt = match whole.trim() {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|_| bad())?,
        };
        let frac_int: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = BigRational::new(whole.abs() * &scale + frac_int, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical text form, `a` or `a/b`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub struct DisplayRational<'a>(pub &'a BigRational);

impl fmt::Display for DisplayRational<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(self.0))
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn pow_u32(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(base.clone(), exp as usize)
}

/// `Some(n)` when `r` is a non-negative integer that fits in `u32`.
pub fn as_u32(r: &BigRational) -> Option<u32> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v))
}

/// Exact comparison of `base^exp` against `bound` for rational `exp = a/b > 0`
/// and non-negative `base`, `bound`: returns `base^exp <= bound`. Uses
/// `base^a <= bound^b`, so no roots are taken.
pub fn pow_le(base: &BigRational, exp: &BigRational, bound: &BigRational) -> bool {
    let a = exp.numer().to_u32().expect("exponent numerator fits in u32");
    let b = exp.denom().to_u32().expect("exponent denominator fits in u32");
    pow_u32(base, a) <= pow_u32(bound, b)
}

/// A closed interval `[lo, hi]` of rationals known to contain a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn exact(v: BigRational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    /// Widens a positive float estimate by `ENCLOSURE_REL` on both sides.
    pub fn around(estimate: f64) -> Self {
        assert!(estimate.is_finite() && estimate >= 0.0, "bad estimate {estimate}");
        if estimate == 0.0 {
            return Interval {
                lo: BigRational::zero(),
                hi: from_f64(f64::MIN_POSITIVE),
            };
        }
        Interval {
            lo: from_f64(estimate * (1.0 - ENCLOSURE_REL)),
            hi: from_f64(estimate * (1.0 + ENCLOSURE_REL)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        (to_f64(&self.lo) + to_f64(&self.hi)) / 2.0
    }

    /// Product of two intervals of non-negative numbers.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        assert!(!c.is_negative());
        Interval {
            lo: &self.lo * c,
            hi: &self.hi * c,
        }
    }

    /// Reciprocal of a strictly positive interval.
    pub fn recip(&self) -> Interval {
        assert!(self.lo.is_positive());
        Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", fmt_rational(&self.lo))
        } else {
            write!(f, "[{:.15e}, {:.15e}]", to_f64(&self.lo), to_f64(&self.hi))
        }
    }
}

/// Encloses `base^exp` for `base >= 0` and rational `exp > 0`. Exact when the
/// exponent is an integer or the base is 0 or 1.
pub fn pow_interval(base: &BigRational, exp: &BigRational) -> Interval {
    assert!(!base.is_negative(), "negative base");
    assert!(exp.is_positive(), "non-positive exponent");
    if base.is_zero() || base.is_one() {
        return Interval::exact(base.clone());
    }
    if let Some(e) = as_u32(exp) {
        return Interval::exact(pow_u32(base, e));
    }
    Interval::around(to_f64(base).powf(to_f64(exp)))
}

/// Serde adapter writing rationals as `"a/b"` strings.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_supported_forms() {
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("2/5").unwrap(), ratio(2, 5));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(fmt_rational(&ratio(4, 6)), "2/3");
        assert_eq!(fmt_rational(&int(-2)), "-2");
    }

    #[test]
    fn root_free_power_comparison() {
        // (1/2)^(3/2) = 0.3535...
        assert!(pow_le(&ratio(1, 2), &ratio(3, 2), &ratio(36, 100)));
        assert!(!pow_le(&ratio(1, 2), &ratio(3, 2), &ratio(35, 100)));
        assert!(pow_le(&ratio(1, 2), &int(2), &ratio(1, 4)));
    }

    #[test]
    fn enclosures_contain_the_value() {
        let e = pow_interval(&ratio(1, 2), &ratio(6, 5));
        let v = 0.5f64.powf(1.2);
        assert!(to_f64(&e.lo) <= v && v <= to_f64(&e.hi));
        assert!(pow_interval(&ratio(2, 3), &int(2)).is_exact());
    }
}
