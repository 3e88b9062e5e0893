use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schreier::FinSet;

use super::config::SpaceConfig;
use super::vector::SparseVector;

/// A p-measure: for each block `n` it carries, the length `g_n` of an initial
/// segment of `F_n`. Its atom in block `n` is the `g_n`-th element of `F_n`
/// with weight `(g_n/|F_n|)^p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PMeasure {
    segments: BTreeMap<usize, usize>,
}

impl PMeasure {
    /// Rejects the empty measure and zero lengths. Blocks are checked later
    /// against a configuration.
    pub fn new(segments: BTreeMap<usize, usize>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Structural("empty p-measure".into()));
        }
        if let Some((n, _)) = segments.iter().find(|(&n, &g)| n == 0 || g == 0) {
            return Err(Error::Structural(format!(
                "block {n}: indices and lengths start at 1"
            )));
        }
        Ok(PMeasure { segments })
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn single(block: usize, g: usize) -> Result<Self> {
        Self::from_pairs(&[(block, g)])
    }

    pub fn segments(&self) -> &BTreeMap<usize, usize> {
        &self.segments
    }

    pub fn first_block(&self) -> usize {
        *self.segments.keys().next().expect("non-empty")
    }

    pub fn last_block(&self) -> usize {
        *self.segments.keys().next_back().expect("non-empty")
    }

    /// `(block, g, atom)` triples.
    pub fn atoms<'a>(
        &'a self,
        cfg: &'a SpaceConfig,
    ) -> impl Iterator<Item = Result<(usize, usize, usize)>> + 'a {
        self.segments.iter().map(move |(&n, &g)| {
            let block = cfg.block(n)?;
            let atom = block.as_slice().get(g.wrapping_sub(1)).copied().ok_or_else(|| {
                Error::Structural(format!(
                    "segment length {g} is outside 1..={} for block {n}",
                    block.len()
                ))
            })?;
            Ok((n, g, atom))
        })
    }

    /// Structural validity plus the budget `Σ (g_n/|F_n|)^p ≤ 1`.
    pub fn validate(&self, cfg: &SpaceConfig) -> Result<()> {
        let w = cfg.weights();
        let mut total = BigInt::zero();
        for atom in self.atoms(cfg) {
            let (n, g, _) = atom?;
            total += &w.cost[n - 1][g - 1];
        }
        if total > w.scale {
            return Err(Error::Validation(format!(
                "{self} exceeds the p-measure budget"
            )));
        }
        Ok(())
    }

    /// The sum `Σ (g_n/|F_n|)^p` as stored.
    pub fn mass(&self, cfg: &SpaceConfig) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for atom in self.atoms(cfg) {
            let (n, g, _) = atom?;
            total += cfg.weight(n, g)?;
        }
        Ok(total)
    }
}

impl fmt::Display for PMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, g)) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "b{n}:g={g}")?;
        }
        f.write_str("}")
    }
}

/// A member of the norming set: a unit functional or the sum of an
/// admissible sequence of p-measures. The derived order is the canonical
/// encoding order used to break ties between witnesses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum NormFunctional {
    Unit(usize),
    Admissible(Vec<PMeasure>),
}

impl fmt::Display for NormFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormFunctional::Unit(n) => write!(f, "Unit({n})"),
            NormFunctional::Admissible(ms) => {
                f.write_str("Admissible[")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl NormFunctional {
    /// Checks structure, budgets and admissibility against `cfg`.
    pub fn validate(&self, cfg: &SpaceConfig) -> Result<()> {
        match self {
            NormFunctional::Unit(n) => {
                if *n == 0 {
                    return Err(Error::Structural("coordinates start at 1".into()));
                }
                Ok(())
            }
            NormFunctional::Admissible(ms) => {
                if ms.is_empty() {
                    return Err(Error::Structural("empty admissible sequence".into()));
                }
                for m in ms {
                    m.validate(cfg)?;
                }
                if !admissible_check(ms, cfg) {
                    return Err(Error::Validation(format!("{self} is not admissible")));
                }
                Ok(())
            }
        }
    }

    /// The functional as a coefficient vector `Σ_n Λ(e_n) e_n`.
    pub fn coefficients(&self, cfg: &SpaceConfig) -> Result<SparseVector> {
        match self {
            NormFunctional::Unit(n) => Ok(SparseVector::unit(*n)),
            NormFunctional::Admissible(ms) => {
                let mut v = SparseVector::zero();
                for m in ms {
                    for atom in m.atoms(cfg) {
                        let (n, g, c) = atom?;
                        v.add_at(c, &cfg.weight(n, g)?);
                    }
                }
                Ok(v)
            }
        }
    }
}

/// `Λ(x) = Σ_n x(n)·Λ(n)`, exact for integer `p`.
pub fn functional_value(
    lambda: &NormFunctional,
    x: &SparseVector,
    cfg: &SpaceConfig,
) -> Result<BigRational> {
    match lambda {
        NormFunctional::Unit(n) => Ok(x.get(*n)),
        NormFunctional::Admissible(ms) => {
            let mut total = BigRational::zero();
            for m in ms {
                for atom in m.atoms(cfg) {
                    let (n, g, c) = atom?;
                    let xc = x.get(c);
                    if !xc.is_zero() {
                        total += cfg.weight(n, g)? * xc;
                    }
                }
            }
            Ok(total)
        }
    }
}

/// Keeps only the atoms inside `set`; `None` when nothing survives.
pub fn functional_restrict(
    lambda: &NormFunctional,
    set: &FinSet,
    cfg: &SpaceConfig,
) -> Result<Option<NormFunctional>> {
    match lambda {
        NormFunctional::Unit(n) => Ok(set.contains(*n).then(|| lambda.clone())),
        NormFunctional::Admissible(ms) => {
            let mut kept = Vec::new();
            for m in ms {
                let mut segs = BTreeMap::new();
                for atom in m.atoms(cfg) {
                    let (n, g, c) = atom?;
                    if set.contains(c) {
                        segs.insert(n, g);
                    }
                }
                if !segs.is_empty() {
                    kept.push(PMeasure { segments: segs });
                }
            }
            Ok((!kept.is_empty()).then_some(NormFunctional::Admissible(kept)))
        }
    }
}

/// Block-successive supports and `k ≤ min F_{m_1}`, where `m_1` is the first
/// block of the first measure. Budgets are not checked here.
pub fn admissible_check(ms: &[PMeasure], cfg: &SpaceConfig) -> bool {
    let Some(first) = ms.first() else {
        return true;
    };
    if ms.windows(2).any(|w| w[0].last_block() >= w[1].first_block()) {
        return false;
    }
    match cfg.block(first.first_block()) {
        Ok(block) => ms.len() <= block.min_elem().expect("blocks are non-empty"),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn pm(pairs: &[(usize, usize)]) -> PMeasure {
        PMeasure::from_pairs(pairs).unwrap()
    }

    fn vec(s: &str) -> SparseVector {
        s.parse().unwrap()
    }

    #[test]
    fn values_on_the_toy_config() {
        let t = SpaceConfig::toy();
        let one = NormFunctional::Admissible(vec![pm(&[(1, 2)])]);
        assert_eq!(functional_value(&one, &vec("3:1,6:1"), &t).unwrap(), int(1));
        let quarter = NormFunctional::Admissible(vec![pm(&[(1, 1)])]);
        assert_eq!(functional_value(&quarter, &vec("2:1"), &t).unwrap(), ratio(1, 4));
        let pair = NormFunctional::Admissible(vec![pm(&[(1, 2)]), pm(&[(2, 3)])]);
        assert_eq!(functional_value(&pair, &vec("3:1,6:1"), &t).unwrap(), int(2));
    }

    #[test]
    fn out_of_window_is_structural() {
        let t = SpaceConfig::toy();
        let bad = NormFunctional::Admissible(vec![pm(&[(4, 1)])]);
        assert!(matches!(
            functional_value(&bad, &vec("2:1"), &t),
            Err(Error::Structural(_))
        ));
        let long = NormFunctional::Admissible(vec![pm(&[(1, 3)])]);
        assert!(matches!(long.validate(&t), Err(Error::Structural(_))));
    }

    #[test]
    fn restriction_examples() {
        let t = SpaceConfig::toy();
        let pair = NormFunctional::Admissible(vec![pm(&[(1, 2)]), pm(&[(2, 3)])]);
        let six = FinSet::new(vec![6]).unwrap();
        assert_eq!(
            functional_restrict(&pair, &six, &t).unwrap(),
            Some(NormFunctional::Admissible(vec![pm(&[(2, 3)])]))
        );
        let u = NormFunctional::Unit(5);
        assert_eq!(
            functional_restrict(&u, &FinSet::new(vec![5]).unwrap(), &t).unwrap(),
            Some(u.clone())
        );
        assert_eq!(functional_restrict(&u, &six, &t).unwrap(), None);
    }

    #[test]
    fn admissibility_examples() {
        let t = SpaceConfig::toy();
        assert!(admissible_check(&[pm(&[(1, 2)]), pm(&[(2, 3)])], &t));
        assert!(!admissible_check(
            &[pm(&[(1, 1)]), pm(&[(2, 1)]), pm(&[(3, 1)])],
            &t
        ));
        assert!(admissible_check(&[pm(&[(2, 1)]), pm(&[(3, 2)])], &t));
        // Two measures meeting the same block are not successive.
        assert!(!admissible_check(&[pm(&[(1, 1), (2, 1)]), pm(&[(2, 2)])], &t));
    }

    #[test]
    fn budget_is_enforced() {
        let t = SpaceConfig::toy();
        // 1/4 + 4/9 = 25/36
        assert!(pm(&[(1, 1), (2, 2)]).validate(&t).is_ok());
        assert_eq!(pm(&[(1, 1), (2, 2)]).mass(&t).unwrap(), ratio(25, 36));
        // 1 + 1/9
        assert!(matches!(
            pm(&[(1, 2), (2, 1)]).validate(&t),
            Err(Error::Validation(_))
        ));
        assert!(PMeasure::new(BTreeMap::new()).is_err());
    }

    #[test]
    fn encoding_order_puts_units_first() {
        let a = NormFunctional::Unit(9);
        let b = NormFunctional::Admissible(vec![pm(&[(1, 1)])]);
        assert!(a < b);
        assert_eq!(b.to_string(), "Admissible[{b1:g=1}]");
    }
}
