//! Derived objects: the block averages `u_n*`, the quotient map onto block
//! averages, repeated-average probability measures, and the witness family
//! whose sums over Schreier sets are small while the full sum has norm one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::{norm_bb, norm_bb_with, NormLimits};
use crate::ordinal::Ordinal;
use crate::rational::{fmt_rational, int, pow_interval, pow_le, ratio, serde_rational};
use crate::schreier::{schreier_member, FinSet};
use crate::space::{admissible_check, PMeasure, SpaceConfig, SparseVector};

/// `u_n* = Σ_{i∈F_n} (1/|F_n|) e_i*`, as a coefficient vector.
pub fn u_star(n: usize, cfg: &SpaceConfig) -> Result<SparseVector> {
    let block = cfg.block(n)?;
    let w = ratio(1, block.len() as i64);
    Ok(SparseVector::from_pairs(block.iter().map(|i| (i, w.clone()))))
}

/// `(u_n*(x))_n` over the window blocks.
pub fn quotient_apply(x: &SparseVector, cfg: &SpaceConfig) -> Result<Vec<BigRational>> {
    (1..=cfg.block_count())
        .map(|n| Ok(u_star(n, cfg)?.dot(x)))
        .collect()
}

/// A finitely supported probability measure with exact weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbMeasure {
    #[serde(serialize_with = "serialize_atoms")]
    atoms: BTreeMap<usize, BigRational>,
}

fn serialize_atoms<S: serde::Serializer>(
    atoms: &BTreeMap<usize, BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(atoms.len()))?;
    for (k, v) in atoms {
        map.serialize_entry(k, &fmt_rational(v))?;
    }
    map.end()
}

impl ProbMeasure {
    /// Rejects non-positive weights and totals other than 1.
    pub fn new(atoms: BTreeMap<usize, BigRational>) -> Result<Self> {
        if atoms.values().any(|w| !w.is_positive()) {
            return Err(Error::Validation("probability weights must be positive".into()));
        }
        let total: BigRational = atoms.values().fold(BigRational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::Validation(format!(
                "weights sum to {}, not 1",
                fmt_rational(&total)
            )));
        }
        Ok(ProbMeasure { atoms })
    }

    pub fn atoms(&self) -> &BTreeMap<usize, BigRational> {
        &self.atoms
    }

    pub fn weight(&self, m: usize) -> BigRational {
        self.atoms.get(&m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> FinSet {
        FinSet::from_sorted(self.atoms.keys().copied().collect())
    }

    /// `μ(F)`
    pub fn mass(&self, set: &FinSet) -> BigRational {
        set.iter()
            .map(|m| self.weight(m))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepeatedAverage {
    pub measure: ProbMeasure,
    /// Length of the prefix of the input list that the recursion used.
    pub consumed: usize,
}

/// Safety cap on the elements one recursion may touch.
const AVERAGE_ELEMENT_CAP: usize = 1_000_000;

/// The order-`a` repeated average on `m`:
/// order 0 is the point mass at `min m`; order `b+1` is the uniform average of
/// `n = min m` successive order-`b` averages built left to right; a limit
/// order uses `a[min m]`.
pub fn repeated_average(a: &Ordinal, m: &[usize]) -> Result<RepeatedAverage> {
    if m.windows(2).any(|w| w[0] >= w[1]) || m.first() == Some(&0) {
        return Err(Error::Precondition(
            "the list must be strictly increasing and positive".into(),
        ));
    }
    let mut atoms = BTreeMap::new();
    let mut touched = 0usize;
    let at = |i: usize| m.get(i).copied();
    match average_into(a, 0, &at, &BigRational::one(), &mut atoms, &mut touched) {
        Ok(consumed) => Ok(RepeatedAverage {
            measure: ProbMeasure::new(atoms)?,
            consumed,
        }),
        Err(Short::Cap) => Err(Error::ResourceCap {
            what: "repeated-average elements",
            cap: AVERAGE_ELEMENT_CAP,
        }),
        Err(Short::Exhausted) => {
            // Size the requirement by continuing the list with consecutive integers.
            let last = *m.last().unwrap_or(&0);
            let extended = |i: usize| Some(if i < m.len() { m[i] } else { last + 1 + i - m.len() });
            let mut scratch = BTreeMap::new();
            let mut touched = 0usize;
            let required =
                match average_into(a, 0, &extended, &BigRational::one(), &mut scratch, &mut touched) {
                    Ok(n) => n,
                    Err(_) => AVERAGE_ELEMENT_CAP,
                };
            Err(Error::Exhausted {
                required,
                available: m.len(),
            })
        }
    }
}

enum Short {
    Exhausted,
    Cap,
}

fn average_into(
    a: &Ordinal,
    start: usize,
    at: &dyn Fn(usize) -> Option<usize>,
    weight: &BigRational,
    atoms: &mut BTreeMap<usize, BigRational>,
    touched: &mut usize,
) -> std::result::Result<usize, Short> {
    let first = at(start).ok_or(Short::Exhausted)?;
    *touched += 1;
    if *touched > AVERAGE_ELEMENT_CAP {
        return Err(Short::Cap);
    }
    if a.is_zero() {
        *atoms.entry(first).or_insert_with(BigRational::zero) += weight;
        return Ok(1);
    }
    if let Some(b) = a.pred() {
        let share = weight / BigRational::from_integer(BigInt::from(first));
        let mut used = 0;
        for _ in 0..first {
            used += average_into(&b, start + used, at, &share, atoms, touched)?;
        }
        return Ok(used);
    }
    let b = a.fundamental(first as u64).expect("limit ordinal");
    average_into(&b, start, at, weight, atoms, touched)
}

/// Outcome of the checks run on a witness family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    /// `‖Σ_{m∈M} u_m‖`
    #[serde(with = "serde_rational")]
    pub total_norm: BigRational,
    pub dominated: bool,
    /// Number of nonempty `F ⊆ M` with `F ∈ S_a` that were checked.
    pub sets_checked: usize,
    /// Largest `‖Σ_{m∈F} u_m‖` among them.
    #[serde(with = "serde_rational")]
    pub max_small_norm: BigRational,
    pub worst_set: Option<FinSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessFamily {
    /// `u_m` for every `m ∈ M` (zero off the supports of the measures).
    pub u: BTreeMap<usize, SparseVector>,
    pub k: usize,
    pub measures: Vec<ProbMeasure>,
    /// `|G_im|` for each measure `i` and each `m` in its support.
    pub segments: Vec<BTreeMap<usize, usize>>,
    /// The p-measures `τ_i`; a measure whose segments all round to zero is dropped.
    pub tau: Vec<PMeasure>,
    #[serde(with = "serde_rational")]
    pub d: BigRational,
    pub order: Ordinal,
    /// Number of leading elements of `M` skipped before the measures start.
    pub shift: usize,
    pub report: WitnessReport,
}

/// Builds and validates the witness family for `M` (block indices), order
/// `a` and threshold `eps`.
///
/// Strict mode checks `min M > 2^(p+1)/eps` and `Σ_{m∈M} 1/|F_m| < 1/2^(p+1)`,
/// uses order `a+1` averages from `min M`, and requires `D > 1/2^(p+1)`. Lab
/// mode drops those hypotheses and searches start offsets and orders (`a+1`,
/// `a`, then lower ones) until the output checks pass.
pub fn c5_witness(
    m: &[usize],
    a: &Ordinal,
    eps: &BigRational,
    cfg: &SpaceConfig,
    strict: bool,
) -> Result<WitnessFamily> {
    c5_witness_with(m, a, eps, cfg, strict, &NormLimits::default())
}

pub fn c5_witness_with(
    m: &[usize],
    a: &Ordinal,
    eps: &BigRational,
    cfg: &SpaceConfig,
    strict: bool,
    limits: &NormLimits,
) -> Result<WitnessFamily> {
    let m = FinSet::new(m.to_vec())?;
    if m.is_empty() {
        return Err(Error::Precondition("M is empty".into()));
    }
    if !(eps.is_positive() && *eps < BigRational::one()) {
        return Err(Error::Precondition("eps must lie in (0,1)".into()));
    }
    cfg.check_growth()?;
    for n in m.iter() {
        cfg.block(n)?;
    }
    let k = cfg.block(m.min_elem().unwrap())?.min_elem().unwrap();

    if strict {
        check_strict_preconditions(&m, eps, cfg)?;
        let family = build(&m, 0, &a.succ(), k, cfg, limits)?;
        let two_p1 = pow_interval(&int(2), &(cfg.p() + int(1)));
        // D > 1/2^(p+1) certified by D·lo(2^(p+1)) > 1.
        if &family.d * &two_p1.lo <= BigRational::one() {
            return Err(Error::Validation(format!(
                "D = {} is not above 1/2^(p+1)",
                fmt_rational(&family.d)
            )));
        }
        return validate(family, &m, a, eps, cfg, limits);
    }

    let mut orders = vec![a.succ(), a.clone()];
    if let Some(n) = a.as_finite() {
        orders.extend((0..n).rev().map(Ordinal::finite));
    } else {
        orders.push(Ordinal::zero());
    }
    let mut last_err = None;
    for shift in 0..m.len() {
        for order in &orders {
            let attempt = build(&m, shift, order, k, cfg, limits)
                .and_then(|f| validate(f, &m, a, eps, cfg, limits));
            match attempt {
                Ok(f) => return Ok(f),
                Err(e) => last_err = Some(e),
            }
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn check_strict_preconditions(m: &FinSet, eps: &BigRational, cfg: &SpaceConfig) -> Result<()> {
    let two_p1 = pow_interval(&int(2), &(cfg.p() + int(1)));
    let min_m = int(m.min_elem().unwrap() as i64);
    // min M > 2^(p+1)/eps, certified from the upper end of the enclosure.
    if min_m * eps <= two_p1.hi {
        return Err(Error::Precondition(format!(
            "min M = {} is not above 2^(p+1)/eps",
            m.min_elem().unwrap()
        )));
    }
    let recip: BigRational = m
        .iter()
        .map(|n| ratio(1, cfg.block(n).map(|b| b.len()).unwrap_or(1) as i64))
        .fold(BigRational::zero(), |x, y| x + y);
    if &recip * &two_p1.hi >= BigRational::one() {
        return Err(Error::Precondition(format!(
            "sum of 1/|F_m| over M is {}, not below 1/2^(p+1)",
            fmt_rational(&recip)
        )));
    }
    Ok(())
}

/// Largest `g` with `(g/|F|)^p ≤ μ`, compared without roots.
fn segment_length(mu: &BigRational, size: usize, p: &BigRational) -> usize {
    let mut g = 0;
    while g < size && pow_le(&ratio(g as i64 + 1, size as i64), p, mu) {
        g += 1;
    }
    g
}

fn build(
    m: &FinSet,
    shift: usize,
    order: &Ordinal,
    k: usize,
    cfg: &SpaceConfig,
    limits: &NormLimits,
) -> Result<WitnessFamily> {
    let list = &m.as_slice()[shift..];
    let mut measures = Vec::with_capacity(k);
    let mut pos = 0;
    for _ in 0..k {
        if pos >= list.len() {
            return Err(Error::Exhausted {
                required: pos + 1,
                available: list.len(),
            });
        }
        let r = repeated_average(order, &list[pos..])?;
        pos += r.consumed;
        measures.push(r.measure);
    }

    let kk = ratio(1, k as i64);
    let mut segments = Vec::with_capacity(k);
    let mut tau = Vec::new();
    let mut v: BTreeMap<usize, SparseVector> = BTreeMap::new();
    for mu in &measures {
        let mut segs = BTreeMap::new();
        for (&n, weight) in mu.atoms() {
            let block = cfg.block(n)?;
            let g = segment_length(weight, block.len(), cfg.p());
            segs.insert(n, g);
            let vm = SparseVector::from_pairs(block.iter().take(g).map(|j| (j, kk.clone())));
            v.insert(n, vm);
        }
        let nonzero: BTreeMap<usize, usize> =
            segs.iter().filter(|(_, &g)| g > 0).map(|(&n, &g)| (n, g)).collect();
        if !nonzero.is_empty() {
            let t = PMeasure::new(nonzero)?;
            t.validate(cfg)?;
            tau.push(t);
        }
        segments.push(segs);
    }
    if !admissible_check(&tau, cfg) {
        return Err(Error::Validation("the measures tau_i are not admissible".into()));
    }

    let total = v.values().fold(SparseVector::zero(), |acc, x| acc.add(x));
    let d = norm_bb_with(&total, cfg, limits)?.value;
    if d.is_zero() {
        return Err(Error::Validation("every segment rounded to zero".into()));
    }
    let inv = d.recip();
    let u = m
        .iter()
        .map(|n| (n, v.get(&n).map(|x| x.scale(&inv)).unwrap_or_default()))
        .collect();
    Ok(WitnessFamily {
        u,
        k,
        measures,
        segments,
        tau,
        d,
        order: order.clone(),
        shift,
        report: WitnessReport {
            total_norm: BigRational::zero(),
            dominated: false,
            sets_checked: 0,
            max_small_norm: BigRational::zero(),
            worst_set: None,
        },
    })
}

fn validate(
    mut family: WitnessFamily,
    m: &FinSet,
    a: &Ordinal,
    eps: &BigRational,
    cfg: &SpaceConfig,
    limits: &NormLimits,
) -> Result<WitnessFamily> {
    let total = family
        .u
        .values()
        .fold(SparseVector::zero(), |acc, x| acc.add(x));
    let total_norm = norm_bb_with(&total, cfg, limits)?.value;
    if !total_norm.is_one() {
        return Err(Error::Validation(format!(
            "sum of u_m has norm {}, not 1",
            fmt_rational(&total_norm)
        )));
    }
    for (&n, um) in &family.u {
        let xm = SparseVector::indicator(cfg.block(n)?);
        if !um.dominated_by(&xm) {
            return Err(Error::Validation(format!("u_{n} is not dominated by x_{n}")));
        }
    }

    // Only indices carrying a nonzero u_m matter: dropping the others keeps
    // a set in S_a and leaves the sum unchanged.
    let live: Vec<usize> = m.iter().filter(|n| !family.u[n].is_zero()).collect();
    let mut checked = 0usize;
    let mut worst = BigRational::zero();
    let mut worst_set = None;
    let mut current = Vec::new();
    let mut failure = None;
    small_sets(&live, 0, a, &mut current, &mut |set| {
        if failure.is_some() {
            return;
        }
        let sum = set
            .iter()
            .fold(SparseVector::zero(), |acc, n| acc.add(&family.u[n]));
        let value = match norm_bb_with(&sum, cfg, limits) {
            Ok(r) => r.value,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        checked += 1;
        let fs = FinSet::from_sorted(set.to_vec());
        if value >= *eps {
            failure = Some(Error::Smallness {
                set: fs.to_string(),
                norm: fmt_rational(&value),
                eps: fmt_rational(eps),
            });
        }
        if value > worst {
            worst = value;
            worst_set = Some(fs);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    family.report = WitnessReport {
        total_norm,
        dominated: true,
        sets_checked: checked,
        max_small_norm: worst,
        worst_set,
    };
    Ok(family)
}

/// Visits every nonempty subset of `live` that belongs to `S_a`, pruning by
/// heredity.
fn small_sets(
    live: &[usize],
    from: usize,
    a: &Ordinal,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    for i in from..live.len() {
        current.push(live[i]);
        if schreier_member(&FinSet::from_sorted(current.clone()), a) {
            visit(current);
            small_sets(live, i + 1, a, current, visit);
        }
        current.pop();
    }
}

/// `‖Σ_{m∈F} u_m‖` for a family, exposed for independent re-checks.
pub fn family_sum_norm(family: &WitnessFamily, set: &FinSet, cfg: &SpaceConfig) -> Result<BigRational> {
    let sum = set
        .iter()
        .filter_map(|n| family.u.get(&n))
        .fold(SparseVector::zero(), |acc, x| acc.add(x));
    Ok(norm_bb(&sum, cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn u_star_examples() {
        let t = SpaceConfig::toy();
        assert_eq!(u_star(2, &t).unwrap().to_string(), "4:1/3,5:1/3,6:1/3");
        assert_eq!(u_star(1, &t).unwrap().to_string(), "2:1/2,3:1/2");
        assert!(matches!(u_star(4, &t), Err(Error::Structural(_))));
    }

    #[test]
    fn quotient_examples() {
        let t = SpaceConfig::toy();
        let q = |s: &str| quotient_apply(&s.parse().unwrap(), &t).unwrap();
        assert_eq!(q("2:1,3:1,4:1"), vec![int(1), ratio(1, 3), int(0)]);
        assert_eq!(q("0"), vec![int(0), int(0), int(0)]);
        assert_eq!(q("3:1,6:1"), vec![ratio(1, 2), ratio(1, 3), int(0)]);
    }

    #[test]
    fn repeated_average_examples() {
        let r = repeated_average(&o("0"), &[7, 9, 11]).unwrap();
        assert_eq!(r.measure.atoms().len(), 1);
        assert_eq!(r.measure.weight(7), int(1));
        assert_eq!(r.consumed, 1);

        let r = repeated_average(&o("1"), &[3, 5, 7, 9, 11]).unwrap();
        for c in [3, 5, 7] {
            assert_eq!(r.measure.weight(c), ratio(1, 3));
        }
        assert_eq!(r.consumed, 3);

        // n = 2: uniform on {2,4}, then n = 5: uniform on {5,8,9,10,11}.
        let r = repeated_average(&o("2"), &[2, 4, 5, 8, 9, 10, 11, 12]).unwrap();
        assert_eq!(r.measure.weight(2), ratio(1, 4));
        assert_eq!(r.measure.weight(4), ratio(1, 4));
        for c in [5, 8, 9, 10, 11] {
            assert_eq!(r.measure.weight(c), ratio(1, 10));
        }
        assert_eq!(r.consumed, 7);
    }

    #[test]
    fn exhaustion_names_the_requirement() {
        // n = 4 needs four elements; continuing with 6, 7 gives {4,5,6,7}.
        assert_eq!(
            repeated_average(&o("1"), &[4, 5]),
            Err(Error::Exhausted {
                required: 4,
                available: 2
            })
        );
        assert!(repeated_average(&o("1"), &[]).is_err());
        assert!(repeated_average(&o("1"), &[3, 3]).is_err());
    }

    #[test]
    fn limit_orders_use_the_fundamental_sequence() {
        let m: Vec<usize> = (2..40).collect();
        let a = repeated_average(&o("w"), &m).unwrap();
        let b = repeated_average(&o("2"), &m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn segment_rounding_brackets_the_root() {
        // (4/6)^2 = 4/9 ≤ 1/2 < (5/6)^2: g = 4, matching floor(6·0.7071).
        assert_eq!(segment_length(&ratio(1, 2), 6, &int(2)), 4);
        assert_eq!(segment_length(&int(1), 6, &int(2)), 6);
        assert_eq!(segment_length(&ratio(1, 100), 6, &int(2)), 0);
        for size in 1..12usize {
            for num in 1..20i64 {
                let mu = ratio(num, 20);
                let g = segment_length(&mu, size, &int(2));
                let root = (num as f64 / 20.0).sqrt();
                assert_eq!(g, (size as f64 * root + 1e-12).floor() as usize, "{num}/20 {size}");
            }
        }
    }

    #[test]
    fn strict_mode_rejects_the_toy_config() {
        let t = SpaceConfig::toy();
        let err = c5_witness(&[1, 2, 3], &o("1"), &ratio(9, 10), &t, true).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
    }

    fn lab() -> SpaceConfig {
        SpaceConfig::parse(include_str!("../../../configs/lab/c5.cfg")).unwrap()
    }

    #[test]
    fn lab_witness_passes_its_checks() {
        let cfg = lab();
        let m: Vec<usize> = (1..=6).collect();
        for a in ["1", "2"] {
            let w = c5_witness(&m, &o(a), &ratio(9, 10), &cfg, false).unwrap();
            assert_eq!(w.k, 2);
            assert_eq!(w.report.total_norm, int(1));
            assert!(w.report.max_small_norm < ratio(9, 10));
            assert!(w.report.sets_checked > 0);
            // Independent recheck of every singleton and the full sum.
            let all = FinSet::new(m.clone()).unwrap();
            assert_eq!(family_sum_norm(&w, &all, &cfg).unwrap(), int(1));
            for n in &m {
                let v = family_sum_norm(&w, &FinSet::new(vec![*n]).unwrap(), &cfg).unwrap();
                assert!(v < ratio(9, 10));
            }
        }
    }

    #[test]
    fn impossible_threshold_reports_smallness() {
        let cfg = lab();
        let err = c5_witness(&[1, 2, 3, 4, 5, 6], &o("1"), &ratio(1, 10), &cfg, false).unwrap_err();
        assert!(
            matches!(err, Error::Smallness { .. } | Error::Exhausted { .. } | Error::Validation(_)),
            "{err}"
        );
    }
}
