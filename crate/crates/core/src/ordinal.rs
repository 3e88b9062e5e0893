//! Ordinals below ω^ω in Cantor normal form.
//!
//! An ordinal is stored as its coefficient list `c_0, c_1, …, c_d` for
//! `c_d·ω^d + … + c_1·ω + c_0`, lowest power first, without trailing zeros.
//! Zero is the empty list.
//!
//! Fundamental sequences follow one fixed convention: if `a = b + ω^(k+1)`
//! where `ω^(k+1)` is the last term of the normal form, then
//! `a[n] = b + ω^k·n`. So `ω[n] = n`, `ω²[n] = ω·n`, `(ω² + ω)[n] = ω² + n`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ordinal {
    coeffs: Vec<u64>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { coeffs: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        Self::from_coeffs(vec![n])
    }

    /// `ω`
    pub fn omega() -> Self {
        Self::from_coeffs(vec![0, 1])
    }

    /// Builds `Σ coeffs[i]·ω^i`; trailing zeros are trimmed.
    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ordinal { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the leading term; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.coeffs.len() {
            0 => Some(0),
            1 => Some(self.coeffs[0]),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.coeffs[0] == 0
    }

    pub fn is_successor(&self) -> bool {
        !self.is_zero() && self.coeffs[0] > 0
    }

    /// `a + 1`
    pub fn succ(&self) -> Ordinal {
        let mut c = self.coeffs.clone();
        if c.is_empty() {
            c.push(0);
        }
        c[0] += 1;
        Ordinal { coeffs: c }
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut c = self.coeffs.clone();
        c[0] -= 1;
        Some(Ordinal::from_coeffs(c))
    }

    /// The `n`-th term of the fixed fundamental sequence of a limit ordinal.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.to_string()));
        }
        if n == 0 {
            return Err(Error::Precondition(
                "fundamental sequence index must be at least 1".into(),
            ));
        }
        let mut c = self.coeffs.clone();
        let k = c
            .iter()
            .position(|&x| x > 0)
            .expect("a limit ordinal has a non-zero coefficient");
        c[k] -= 1;
        c[k - 1] = n;
        Ok(Ordinal::from_coeffs(c))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares two ordinals.
pub fn ord_compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (power, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (power, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (p, 1) => write!(f, "w^{p}")?,
                (p, c) => write!(f, "w^{p}*{c}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    /// Accepts `0`, `7`, `w`, `w*3+2`, `w^2*4+w*1+5`: `+`-separated terms with
    /// strictly decreasing powers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("ordinal `{s}`: {why}"));
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let mut coeffs: Vec<u64> = Vec::new();
        let mut last_power: Option<usize> = None;
        for term in s.split('+') {
            let term: String = term.chars().filter(|c| !c.is_whitespace()).collect();
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (power, coeff) = if let Some(rest) = term.strip_prefix('w') {
                let (power_part, coeff_part) = match rest.split_once('*') {
                    Some((p, c)) => (p, Some(c)),
                    None => (rest, None),
                };
                let power = if power_part.is_empty() {
                    1
                } else {
                    let digits = power_part
                        .strip_prefix('^')
                        .ok_or_else(|| bad("expected `^` after `w`"))?;
                    if digits.contains('w') {
                        return Err(bad("exponents must be finite (ordinals below w^w only)"));
                    }
                    digits
                        .parse::<usize>()
                        .map_err(|_| bad("bad exponent"))?
                };
                let coeff = match coeff_part {
                    Some(c) => c.parse::<u64>().map_err(|_| bad("bad coefficient"))?,
                    None => 1,
                };
                (power, coeff)
            } else {
                (0, term.parse::<u64>().map_err(|_| bad("bad finite term"))?)
            };
            if let Some(lp) = last_power {
                if power >= lp {
                    return Err(bad("powers must be strictly decreasing"));
                }
            }
            last_power = Some(power);
            if coeffs.len() <= power {
                coeffs.resize(power + 1, 0);
            }
            coeffs[power] = coeff;
        }
        Ok(Ordinal::from_coeffs(coeffs))
    }
}

impl TryFrom<String> for Ordinal {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Ordinal> for String {
    fn from(o: Ordinal) -> String {
        o.to_string()
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(ord_compare(&o("5"), &o("w")), Ordering::Less);
        assert_eq!(ord_compare(&o("w*2"), &o("w*2")), Ordering::Equal);
        assert_eq!(ord_compare(&o("w^2"), &o("w*9+7")), Ordering::Greater);
    }

    #[test]
    fn fundamental_sequence_examples() {
        assert_eq!(o("w").fundamental(3).unwrap(), o("3"));
        assert_eq!(o("w^2").fundamental(3).unwrap(), o("w*3"));
        assert_eq!(o("w^2+w").fundamental(5).unwrap(), o("w^2+5"));
    }

    #[test]
    fn fundamental_sequence_rejects_successors_and_zero() {
        assert!(matches!(o("w+1").fundamental(2), Err(Error::NotLimit(_))));
        assert!(matches!(o("0").fundamental(2), Err(Error::NotLimit(_))));
        assert!(matches!(o("4").fundamental(2), Err(Error::NotLimit(_))));
        assert!(o("w").fundamental(0).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(o("0"), Ordinal::zero());
        assert_eq!(o("w^2*4+w*1+5").coeffs(), &[5, 1, 4]);
        assert_eq!(o("w^2*4+w*1+5").to_string(), "w^2*4+w+5");
        assert_eq!(o("w*3+2").to_string(), "w*3+2");
        assert!("w+w".parse::<Ordinal>().is_err());
        assert!("3+w".parse::<Ordinal>().is_err());
        assert!("w^w".parse::<Ordinal>().is_err());
        assert!("w^".parse::<Ordinal>().is_err());
    }

    fn all_small() -> Vec<Ordinal> {
        let mut out = Vec::new();
        for a in 0..=3u64 {
            for b in 0..=3 {
                for c in 0..=3 {
                    for d in 0..=3 {
                        out.push(Ordinal::from_coeffs(vec![a, b, c, d]));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn comparison_is_a_total_order_on_small_ordinals() {
        let all = all_small();
        for a in &all {
            for b in &all {
                let ab = a.cmp(b);
                assert_eq!(ab, b.cmp(a).reverse());
                if ab == Ordering::Equal {
                    assert_eq!(a, b);
                }
            }
        }
        // Transitivity via sorting consistency.
        let mut sorted = all.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            assert!(w[0] < w[1]);
        }
        for a in all.iter().step_by(7) {
            for b in all.iter().step_by(5) {
                for c in all.iter().step_by(3) {
                    if a <= b && b <= c {
                        assert!(a <= c);
                    }
                }
            }
        }
    }

    #[test]
    fn fundamental_sequences_increase_below_their_limit() {
        for a in all_small().into_iter().filter(Ordinal::is_limit) {
            for n in 1..6 {
                let x = a.fundamental(n).unwrap();
                let y = a.fundamental(n + 1).unwrap();
                assert!(x < y && y < a, "{a}: {x} {y}");
            }
        }
    }
}
