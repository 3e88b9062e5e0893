//! Schreier families `S_a` for `a < ω^ω`.
//!
//! The recursion used throughout the crate:
//!
//! * `S_0` is the empty set together with all singletons;
//! * `S_(b+1)` holds `∅` and every union `F_1 ∪ … ∪ F_k` of successive nonempty
//!   sets of `S_b` with `k ≤ min F_1`;
//! * for a limit `a`, `F ∈ S_a` iff `F ∈ S_(a[min F])` (or `F = ∅`), where `a[n]`
//!   is the fundamental sequence of [`Ordinal::fundamental`].
//!
//! `S_1` reduces to the closed form `|F| ≤ min F`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::Ordinal;

/// Default upper bound on the number of sets [`schreier_enumerate`] may return.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// A finite set of positive integers, kept strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FinSet(Vec<usize>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    /// Sorts and deduplicates; rejects `0`.
    pub fn new(mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() == Some(&0) {
            return Err(Error::Parse("sets hold positive integers only".into()));
        }
        Ok(FinSet(elements))
    }

    /// Wraps a list the caller guarantees to be strictly increasing and positive.
    pub fn from_sorted(elements: Vec<usize>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.first().is_none_or(|&m| m > 0));
        FinSet(elements)
    }

    /// `{lo, lo+1, …, hi}`
    pub fn interval(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1);
        FinSet((lo..=hi).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_elem(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max_elem(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Position of `x` counted from 1, if present.
    pub fn rank_of(&self, x: usize) -> Option<usize> {
        self.0.binary_search(&x).ok().map(|i| i + 1)
    }

    /// `self < other` in the sense `max self < min other` (vacuous for empty sets).
    pub fn precedes(&self, other: &FinSet) -> bool {
        match (self.max_elem(), other.min_elem()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for FinSet {
    type Err = Error;

    /// Accepts `2,3,4`, `{2,3,4}` or `{}`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
        if inner.is_empty() {
            return Ok(FinSet::empty());
        }
        let elements = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("`{t}` is not a positive integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        FinSet::new(elements)
    }
}

impl TryFrom<Vec<usize>> for FinSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        FinSet::new(v)
    }
}

impl From<FinSet> for Vec<usize> {
    fn from(s: FinSet) -> Vec<usize> {
        s.0
    }
}

/// Membership `F ∈ S_a`. Uses the closed form for `a = 1`.
pub fn schreier_member(set: &FinSet, a: &Ordinal) -> bool {
    member(set.as_slice(), a, true)
}

/// Membership computed purely from the recursion, never using the `S_1`
/// closed form. Exists so the two can be checked against each other.
pub fn schreier_member_recursive(set: &FinSet, a: &Ordinal) -> bool {
    member(set.as_slice(), a, false)
}

fn member(f: &[usize], a: &Ordinal, closed_form: bool) -> bool {
    let Some(&first) = f.first() else {
        return true;
    };
    if a.is_zero() {
        return f.len() <= 1;
    }
    if closed_form && a.as_finite() == Some(1) {
        return f.len() <= first;
    }
    if let Some(b) = a.pred() {
        // Greedy maximal prefixes give the fewest pieces because S_b is hereditary.
        let mut pieces = 0usize;
        let mut start = 0usize;
        while start < f.len() {
            let mut end = start + 1;
            while end < f.len() && member(&f[start..=end], &b, closed_form) {
                end += 1;
            }
            pieces += 1;
            if pieces > first {
                return false;
            }
            start = end;
        }
        true
    } else {
        let b = a
            .fundamental(first as u64)
            .expect("non-zero non-successor ordinal is a limit");
        member(f, &b, closed_form)
    }
}

/// True iff `F ∈ S_a` cannot be extended by any element above `max F`.
///
/// Membership of `F ∪ {m}` does not depend on the value of `m > max F`: the new
/// element is never the minimum of a piece unless it forms the singleton last
/// piece, and singletons belong to every level. Checking `m = max F + 1` is
/// therefore enough.
pub fn schreier_maximal(set: &FinSet, a: &Ordinal) -> Result<bool> {
    if !schreier_member(set, a) {
        return Err(Error::NotMember(set.to_string(), a.to_string()));
    }
    let mut extended = set.as_slice().to_vec();
    extended.push(set.max_elem().unwrap_or(0) + 1);
    Ok(!member(&extended, a, true))
}

/// All members of `S_a` contained in `{1, …, n}`, ordered by size and then
/// lexicographically.
pub fn schreier_enumerate(a: &Ordinal, n: usize, cap: usize) -> Result<Vec<FinSet>> {
    let mut out = vec![FinSet::empty()];
    let mut current = Vec::new();
    extend(a, n, 1, &mut current, &mut out, cap)?;
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Ok(out)
}

fn extend(
    a: &Ordinal,
    n: usize,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<FinSet>,
    cap: usize,
) -> Result<()> {
    for x in from..=n {
        current.push(x);
        // Hereditary: a non-member has no members among its extensions.
        if member(current, a, true) {
            if out.len() >= cap {
                return Err(Error::ResourceCap {
                    what: "Schreier enumeration",
                    cap,
                });
            }
            out.push(FinSet::from_sorted(current.clone()));
            extend(a, n, x + 1, current, out, cap)?;
        }
        current.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> FinSet {
        text.parse().unwrap()
    }

    fn o(text: &str) -> Ordinal {
        text.parse().unwrap()
    }

    /// Brute-force oracle: try every split into consecutive pieces.
    fn oracle(f: &[usize], a: &Ordinal) -> bool {
        if f.is_empty() {
            return true;
        }
        if a.is_zero() {
            return f.len() <= 1;
        }
        if let Some(b) = a.pred() {
            let k_max = f[0];
            fn splits(f: &[usize], b: &Ordinal, left: usize) -> bool {
                if f.is_empty() {
                    return true;
                }
                if left == 0 {
                    return false;
                }
                (1..=f.len()).any(|cut| oracle(&f[..cut], b) && splits(&f[cut..], b, left - 1))
            }
            splits(f, &b, k_max)
        } else {
            oracle(f, &a.fundamental(f[0] as u64).unwrap())
        }
    }

    #[test]
    fn membership_examples() {
        assert!(schreier_member(&s("3,5,9"), &o("1")));
        assert!(!schreier_member(&s("2,3,4"), &o("1")));
        assert!(schreier_member(&s("2,3,4,5,6,7"), &o("2")));
        assert!(oracle(&[2, 3, 4, 5, 6, 7], &o("2")));
    }

    #[test]
    fn maximality_examples() {
        assert!(schreier_maximal(&s("2,3"), &o("1")).unwrap());
        assert!(!schreier_maximal(&s("3,5"), &o("1")).unwrap());
        assert!(schreier_maximal(&s("1"), &o("1")).unwrap());
        assert!(matches!(
            schreier_maximal(&s("2,3,4"), &o("1")),
            Err(Error::NotMember(_, _))
        ));
    }

    #[test]
    fn maximality_agrees_with_scanning_many_extensions() {
        for a in ["0", "1", "2", "3", "w", "w+1"] {
            let a = o(a);
            for f in schreier_enumerate(&a, 9, DEFAULT_ENUM_CAP).unwrap() {
                let top = f.max_elem().unwrap_or(0);
                let scan = (top + 1..top + 40).all(|m| {
                    let mut g = f.as_slice().to_vec();
                    g.push(m);
                    !schreier_member(&FinSet::from_sorted(g), &a)
                });
                assert_eq!(schreier_maximal(&f, &a).unwrap(), scan, "{f} in S_{a}");
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let got = schreier_enumerate(&o("1"), 4, DEFAULT_ENUM_CAP).unwrap();
        let want: Vec<FinSet> = ["{}", "1", "2", "3", "4", "2,3", "2,4", "3,4"]
            .iter()
            .map(|t| s(t))
            .collect();
        assert_eq!(got, want);

        let got = schreier_enumerate(&o("0"), 3, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(got, vec![s("{}"), s("1"), s("2"), s("3")]);
    }

    #[test]
    fn second_order_window_matches_brute_force() {
        // Oracle: all 8 subsets of {1,2,3} filtered by exhaustive decomposition.
        let mut want = Vec::new();
        for mask in 0u32..8 {
            let f: Vec<usize> = (1..=3).filter(|i| mask >> (i - 1) & 1 == 1).collect();
            if oracle(&f, &o("2")) {
                want.push(FinSet::from_sorted(f));
            }
        }
        want.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        let got = schreier_enumerate(&o("2"), 3, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(got, want);
        assert_eq!(got, vec![s("{}"), s("1"), s("2"), s("3"), s("2,3")]);
    }

    #[test]
    fn greedy_membership_matches_exhaustive_decomposition() {
        for a in ["0", "1", "2", "3", "w", "w+1", "w+2", "w*2", "w*2+1", "w^2"] {
            let a = o(a);
            for mask in 0u32..(1 << 10) {
                let f: Vec<usize> = (1..=10).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                assert_eq!(member(&f, &a, true), oracle(&f, &a), "{f:?} in S_{a}");
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        let err = schreier_enumerate(&o("2"), 10, 5).unwrap_err();
        assert_eq!(
            err,
            Error::ResourceCap {
                what: "Schreier enumeration",
                cap: 5
            }
        );
    }

    #[test]
    fn finset_parsing() {
        assert_eq!(s("{3, 1,2}").as_slice(), &[1, 2, 3]);
        assert!(s("{}").is_empty());
        assert!("0,1".parse::<FinSet>().is_err());
        assert_eq!(s("4,9").to_string(), "{4,9}");
    }
}
