use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::constructions::u_star;
use crate::error::{Error, Result};
use crate::norm::{dual_norm, norm_bb, norm_exhaustive};
use crate::rational::{from_f64, int, pow_interval, ratio, Interval};
use crate::space::{SpaceConfig, SparseVector};

use super::constants::{constant_a, constant_b};
use super::{norm_enclosure, pow_enclosure, CheckReport, Tally};

/// Relative slack granted to dual norms computed with float weights.
const DUAL_FLOAT_SLACK: f64 = 1e-9;

/// Initial-segment lengths `|G_n|`, one per window block (0 for `G_n = ∅`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct L1Instance {
    pub g: Vec<usize>,
}

/// `u`, a level `n`, and pairs `(i, j_i)` with `j_i ∈ F_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct L3Instance {
    pub u: SparseVector,
    pub n: u32,
    pub picks: Vec<(usize, usize)>,
}

/// `u`, weights `(i, ρ_i)` and the deepest level checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L45Instance {
    pub u: SparseVector,
    pub rhos: Vec<(usize, BigRational)>,
    pub n_max: u32,
}

fn zero() -> Interval {
    Interval::exact(BigRational::zero())
}

fn exact(v: BigRational) -> Interval {
    Interval::exact(v)
}

/// `(g/|F|)^p`
fn segment_weight(cfg: &SpaceConfig, g: usize, size: usize) -> Interval {
    if g == 0 {
        return zero();
    }
    pow_interval(&ratio(g as i64, size as i64), cfg.p())
}

/// Dual norm as an enclosure; float weights get a relative allowance.
fn dual_enclosure(f: &SparseVector, cfg: &SpaceConfig) -> Result<Interval> {
    let d = dual_norm(f, cfg)?.value;
    if cfg.is_exact() {
        return Ok(exact(d));
    }
    Ok(Interval {
        lo: &d * from_f64(1.0 - DUAL_FLOAT_SLACK),
        hi: &d * from_f64(1.0 + DUAL_FLOAT_SLACK),
    })
}

fn need_q(cfg: &SpaceConfig) -> Result<BigRational> {
    cfg.q()
        .ok_or_else(|| Error::Precondition("the conjugate exponent needs p > 1".into()))
}

/// For each instance: the budget `Σ (|G_n|/|F_n|)^p ≤ 1` is required; then
/// `Σ_n μ(G_n) ≤ 1` over every functional (the exhaustive engine), the same
/// bound through branch and bound, and agreement of the two.
pub fn check_l1(cfg: &SpaceConfig, instances: &[L1Instance]) -> Result<CheckReport> {
    let mut tally = Tally::new("L1", cfg);
    let one = exact(int(1));
    for inst in instances {
        if inst.g.len() != cfg.block_count()
            || inst.g.iter().zip(cfg.blocks()).any(|(&g, b)| g > b.len())
        {
            tally.skip();
            continue;
        }
        let budget = inst
            .g
            .iter()
            .zip(cfg.blocks())
            .fold(zero(), |acc, (&g, b)| acc.add(&segment_weight(cfg, g, b.len())));
        if budget.hi > BigRational::one() {
            tally.skip();
            continue;
        }
        tally.instance();
        let x = SparseVector::indicator(&crate::schreier::FinSet::from_sorted(
            inst.g
                .iter()
                .zip(cfg.blocks())
                .flat_map(|(&g, b)| b.iter().take(g))
                .collect(),
        ));
        let input = || format!("g={:?}", inst.g);
        let ex = norm_exhaustive(&x, cfg)?;
        let bb = norm_bb(&x, cfg)?;
        tally.le(&input, "sum of mu(G_n) over all functionals", &norm_enclosure(&ex), &one);
        tally.le(&input, "norm of the segment sum", &norm_enclosure(&bb), &one);
        tally.eq(&input, "engines agree", &ex.value, &bb.value);
    }
    Ok(tally.finish())
}

/// For non-negative `a` with `Σ a_i^q ≤ 1`:
/// `‖Σ a_i u_i*‖ ≥ Σ a_i^q - Σ_{i≤n} 1/|F_i|`, and `≥ A (Σ a_i^q)^{1/q}`
/// whenever the window has `Σ 1/|F_i| < 1`.
pub fn check_l2_lower(cfg: &SpaceConfig, instances: &[Vec<BigRational>]) -> Result<CheckReport> {
    let q = need_q(cfg)?;
    let a_const = constant_a(cfg);
    let mut tally = Tally::new("L2", cfg);
    for a in instances {
        if a.len() > cfg.block_count() || a.iter().any(|v| v.is_negative()) {
            tally.skip();
            continue;
        }
        let sum_q = a
            .iter()
            .fold(zero(), |acc, v| acc.add(&pow_interval(v, &q)));
        if sum_q.lo > BigRational::one() {
            tally.skip();
            continue;
        }
        tally.instance();
        let mut f = SparseVector::zero();
        let mut recip = BigRational::zero();
        for (i, v) in a.iter().enumerate() {
            recip += ratio(1, cfg.block(i + 1)?.len() as i64);
            f = f.add(&u_star(i + 1, cfg)?.scale(v));
        }
        let input = || {
            let parts: Vec<String> = a.iter().map(crate::rational::fmt_rational).collect();
            format!("a=[{}]", parts.join(","))
        };
        let d = dual_enclosure(&f, cfg)?;
        let rhs = Interval {
            lo: &sum_q.lo - &recip,
            hi: &sum_q.hi - &recip,
        };
        tally.le(&input, "sum a^q - sum 1/|F| vs dual norm", &rhs, &d);
        if let Some(a_const) = &a_const {
            let bound = pow_enclosure(&sum_q, &q.recip()).scale(a_const);
            tally.le(&input, "A (sum a^q)^(1/q) vs dual norm", &bound, &d);
        }
    }
    Ok(tally.finish())
}

struct Prepared {
    u: SparseVector,
    norm: Interval,
}

/// Certifies `u ≥ 0` and `‖u‖ ≤ 1`.
fn prepare(cfg: &SpaceConfig, u: &SparseVector) -> Result<Option<Prepared>> {
    if u.iter().any(|(_, v)| v.is_negative()) {
        return Ok(None);
    }
    let norm = norm_enclosure(&norm_bb(u, cfg)?);
    if norm.hi > BigRational::one() {
        return Ok(None);
    }
    Ok(Some(Prepared { u: u.clone(), norm }))
}

/// `Σ_{i∈I} a_{j_i} (|G_i|/|F_i|)^p ≤ (n+1) ‖u‖` with `G_i = [min F_i, j_i] ∩ F_i`,
/// for `a_{j_i}` certified `≥ ε_n`.
pub fn check_l3(cfg: &SpaceConfig, instances: &[L3Instance]) -> Result<CheckReport> {
    cfg.require_params()?;
    let mut tally = Tally::new("L3", cfg);
    for inst in instances {
        let Some(prep) = prepare(cfg, &inst.u)? else {
            tally.skip();
            continue;
        };
        let eps = cfg.eps(inst.n)?;
        let mut lhs = zero();
        let mut seen = BTreeSet::new();
        let mut ok = inst.n >= 1;
        for &(i, j) in &inst.picks {
            let Ok(block) = cfg.block(i) else {
                ok = false;
                break;
            };
            let a = prep.u.get(j);
            match block.rank_of(j) {
                Some(rank) if seen.insert(i) && a >= eps.hi => {
                    lhs = lhs.add(&segment_weight(cfg, rank, block.len()).scale(&a));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            tally.skip();
            continue;
        }
        tally.instance();
        let rhs = prep.norm.scale(&int(inst.n as i64 + 1));
        let input = || format!("u={}; n={}; picks={:?}", inst.u, inst.n, inst.picks);
        tally.le(&input, "L3", &lhs, &rhs);
    }
    Ok(tally.finish())
}

/// Comparison of a rational against a threshold enclosure; `None` when the
/// enclosure straddles it.
fn at_least(a: &BigRational, t: &Interval) -> Option<bool> {
    if *a >= t.hi {
        Some(true)
    } else if *a < t.lo {
        Some(false)
    } else {
        None
    }
}

/// Per-block quantities for one vector.
struct Levels {
    /// `λ_i^0`
    lambda0: BigRational,
    /// `λ_i^n` for `n = 1..=n_max+1` at index `n-1`.
    lambda: Vec<BigRational>,
    /// `a_{j_i^n} (|G_i^n|/|F_i|)^p` for `n = 0..=n_max`.
    terms: Vec<Interval>,
}

fn levels(cfg: &SpaceConfig, u: &SparseVector, i: usize, eps: &[Interval], n_max: usize) -> Result<Option<Levels>> {
    let block = cfg.block(i)?;
    let size = block.len();
    let inv = ratio(1, size as i64);
    let a: Vec<BigRational> = block.iter().map(|j| u.get(j)).collect();
    // cls[r][n] = a_r ≥ ε_{n+1}, for n = 0..=n_max+1.
    let mut cls = Vec::with_capacity(size);
    for v in &a {
        let mut row = Vec::with_capacity(eps.len());
        for e in eps {
            match at_least(v, e) {
                Some(b) => row.push(b),
                None => return Ok(None),
            }
        }
        cls.push(row);
    }
    let mut lambda0 = BigRational::zero();
    let mut lambda = vec![BigRational::zero(); n_max + 1];
    for (r, v) in a.iter().enumerate() {
        if cls[r][0] {
            lambda0 += v * &inv;
        }
        for n in 1..=n_max + 1 {
            if !cls[r][n - 1] {
                lambda[n - 1] += v * &inv;
            }
        }
    }
    let mut terms = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        // Level 0: a ≥ ε_1. Level n ≥ 1: ε_{n+1} ≤ a < ε_n.
        let last = (0..size).rev().find(|&r| {
            if n == 0 {
                cls[r][0]
            } else {
                cls[r][n] && !cls[r][n - 1]
            }
        });
        terms.push(match last {
            Some(r) => segment_weight(cfg, r + 1, size).scale(&a[r]),
            None => zero(),
        });
    }
    Ok(Some(Levels {
        lambda0,
        lambda,
        terms,
    }))
}

/// The estimates (E1), (E2) for `n ≤ n_max`, the block bound
/// `Σ a_{j_i^n} (|G_i^n|/|F_i|)^p ≤ (n+2)‖u‖` for `n ≤ n_max`, and both
/// `λ`-estimates built from them.
pub fn check_l4_l5(cfg: &SpaceConfig, instances: &[L45Instance]) -> Result<CheckReport> {
    let params = cfg.require_params()?.clone();
    let q = need_q(cfg)?;
    let mut tally = Tally::new("L4L5", cfg);
    for inst in instances {
        let Some(prep) = prepare(cfg, &inst.u)? else {
            tally.skip();
            continue;
        };
        let distinct: BTreeSet<usize> = inst.rhos.iter().map(|(i, _)| *i).collect();
        if distinct.len() != inst.rhos.len()
            || inst.rhos.iter().any(|(i, r)| r.is_negative() || *i == 0 || *i > cfg.block_count())
        {
            tally.skip();
            continue;
        }
        let n_max = inst.n_max as usize;
        let eps: Vec<Interval> = (1..=n_max as u32 + 2)
            .map(|n| cfg.eps(n))
            .collect::<Result<_>>()?;
        let mut per_block = Vec::with_capacity(inst.rhos.len());
        let mut ambiguous = false;
        for (i, rho) in &inst.rhos {
            match levels(cfg, &prep.u, *i, &eps, n_max)? {
                Some(l) => per_block.push((rho.clone(), l)),
                None => {
                    ambiguous = true;
                    break;
                }
            }
        }
        if ambiguous {
            tally.skip();
            continue;
        }
        tally.instance();
        let input = || {
            let rhos: Vec<String> = inst
                .rhos
                .iter()
                .map(|(i, r)| format!("{i}:{}", crate::rational::fmt_rational(r)))
                .collect();
            format!("u={}; rho=[{}]; n_max={}", inst.u, rhos.join(","), inst.n_max)
        };

        let rho_q = per_block
            .iter()
            .fold(zero(), |acc, (r, _)| acc.add(&pow_interval(r, &q)));
        let weighted = |f: &dyn Fn(&Levels) -> BigRational| -> Interval {
            exact(
                per_block
                    .iter()
                    .map(|(r, l)| r * f(l))
                    .fold(BigRational::zero(), |a, b| a + b),
            )
        };
        let term_sum = |n: usize| -> Interval {
            per_block
                .iter()
                .fold(zero(), |acc, (_, l)| acc.add(&l.terms[n]))
        };
        let eps_pow = |e: &BigRational, n: u32| {
            pow_interval(&params.theta, &(e * crate::rational::pow_u32(&params.alpha, n)))
        };

        let l0 = weighted(&|l| l.lambda0.clone());
        let inv_eps1 = eps[0].recip();
        let e1_rhs = inv_eps1.mul_nonneg(&term_sum(0)).add(&rho_q);
        tally.le(&input, "E1", &l0, &e1_rhs);
        let l5a_rhs = inv_eps1.scale(&int(2)).mul_nonneg(&prep.norm).add(&rho_q);
        tally.le(&input, "L5 level 0", &l0, &l5a_rhs);
        tally.le(&input, "block bound n=0", &term_sum(0), &prep.norm.scale(&int(2)));

        for n in 1..=n_max {
            let ln = weighted(&|l| l.lambda[n - 1].clone());
            let ln1 = weighted(&|l| l.lambda[n].clone());
            let eg = eps_pow(&params.gamma, n as u32);
            let eb = eps_pow(&params.beta, n as u32);
            let beta_part = eb.mul_nonneg(&rho_q);
            let e2_rhs = ln1.add(&eg.mul_nonneg(&term_sum(n))).add(&beta_part);
            tally.le(&input, &format!("E2 n={n}"), &ln, &e2_rhs);
            let l5_rhs = ln1
                .add(&eg.scale(&int(n as i64 + 2)).mul_nonneg(&prep.norm))
                .add(&beta_part);
            tally.le(&input, &format!("L5 n={n}"), &ln, &l5_rhs);
            tally.le(
                &input,
                &format!("block bound n={n}"),
                &term_sum(n),
                &prep.norm.scale(&int(n as i64 + 2)),
            );
        }
    }
    Ok(tally.finish())
}

/// `A (Σ|ρ_i|^q)^{1/q} ≤ ‖Σ ρ_i u_i*‖ ≤ B (Σ|ρ_i|^q)^{1/q}`; the lower side
/// only when `A` exists on the window.
pub fn check_c2_t3(cfg: &SpaceConfig, instances: &[Vec<(usize, BigRational)>]) -> Result<CheckReport> {
    let q = need_q(cfg)?;
    let b = constant_b(cfg)?;
    let a_const = constant_a(cfg);
    let mut tally = Tally::new("C2T3", cfg);
    for rho in instances {
        let distinct: BTreeSet<usize> = rho.iter().map(|(i, _)| *i).collect();
        if distinct.len() != rho.len() || rho.iter().any(|(i, _)| *i == 0 || *i > cfg.block_count()) {
            tally.skip();
            continue;
        }
        let sum_q = rho
            .iter()
            .fold(zero(), |acc, (_, r)| acc.add(&pow_interval(&r.abs(), &q)));
        if sum_q.lo > BigRational::one() {
            tally.skip();
            continue;
        }
        tally.instance();
        let mut f = SparseVector::zero();
        for (i, r) in rho {
            f = f.add(&u_star(*i, cfg)?.scale(r));
        }
        let input = || {
            let parts: Vec<String> = rho
                .iter()
                .map(|(i, r)| format!("{i}:{}", crate::rational::fmt_rational(r)))
                .collect();
            format!("rho=[{}]", parts.join(","))
        };
        let d = dual_enclosure(&f, cfg)?;
        let lq = pow_enclosure(&sum_q, &q.recip());
        tally.le(&input, "upper: B", &d, &b.value.mul_nonneg(&lq));
        if let Some(a) = &a_const {
            tally.le(&input, "lower: A", &lq.scale(a), &d);
        }
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Verdict;

    fn v(s: &str) -> SparseVector {
        s.parse().unwrap()
    }

    #[test]
    fn l1_examples() {
        let t = SpaceConfig::toy();
        let r = check_l1(
            &t,
            &[L1Instance { g: vec![1, 2, 0] }, L1Instance { g: vec![0, 0, 0] }],
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.instances, 2);
        // e2 + e4 + e5 has norm exactly 1 by the exhaustive engine.
        assert_eq!(norm_exhaustive(&v("2:1,4:1,5:1"), &t).unwrap().value, int(1));
        // Budget 1 + 1 exceeds 1: skipped, not failed.
        let r = check_l1(&t, &[L1Instance { g: vec![2, 3, 0] }]).unwrap();
        assert_eq!((r.instances, r.skipped), (0, 1));
    }

    #[test]
    fn l2_examples() {
        let cfg = SpaceConfig::parse("p = 2\nblocks = [5-9, 10-15, 16-22]").unwrap();
        let r = check_l2_lower(&cfg, &[vec![int(1), int(0), int(0)], vec![int(0)]]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failures);
        assert_eq!(r.instances, 2);
    }

    #[test]
    fn l2_float_mode() {
        // p = 3/2, q = 3; a_i = 2^{-1/3} rounded down so that Σ a^q ≤ 1.
        let cfg = SpaceConfig::parse("p = 3/2\nblocks = [5-9, 10-15, 16-22]").unwrap();
        let a = from_f64(2f64.powf(-1.0 / 3.0) * (1.0 - 1e-12));
        let r = check_l2_lower(&cfg, &[vec![a.clone(), a, int(0)]]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failures);
    }

    #[test]
    fn l3_examples() {
        let g = SpaceConfig::desk();
        // Normalized indicator of block 1: entries 1, I = {1}, j_1 = 8.
        let u = SparseVector::indicator(g.block(1).unwrap());
        let inst = [
            L3Instance { u: u.clone(), n: 1, picks: vec![(1, 8)] },
            L3Instance { u: v("7:1/2"), n: 1, picks: vec![] },
        ];
        let r = check_l3(&g, &inst).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.instances, 2);
        // Entry below ε_1: precondition fails, instance skipped.
        let r = check_l3(&g, &[L3Instance { u: v("7:1/10"), n: 1, picks: vec![(1, 7)] }]).unwrap();
        assert_eq!(r.skipped, 1);
    }

    #[test]
    fn l4_l5_examples() {
        let g = SpaceConfig::desk();
        let u = SparseVector::indicator(g.block(2).unwrap()).scale(&ratio(1, 2));
        let inst = [
            L45Instance { u: u.clone(), rhos: vec![(1, int(0)), (2, int(0))], n_max: 4 },
            L45Instance { u: SparseVector::zero(), rhos: vec![(1, int(1)), (3, ratio(1, 2))], n_max: 4 },
            L45Instance { u, rhos: vec![(2, int(1)), (3, int(2))], n_max: 4 },
        ];
        let r = check_l4_l5(&g, &inst).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failures);
        assert_eq!(r.instances, 3);
    }

    #[test]
    fn c2_t3_examples() {
        let g = SpaceConfig::desk();
        let r = check_c2_t3(&g, &[vec![(1, int(1))], vec![]]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.failures);
        assert_eq!(r.instances, 2);
    }

    #[test]
    fn level_split_by_hand() {
        // ε_1 ≈ 0.435, ε_2 ≈ 0.368, ε_3 ≈ 0.302 on the desk config.
        let g = SpaceConfig::desk();
        let u = v("6:1/2,8:2/5,9:1/10");
        let eps: Vec<Interval> = (1..=3).map(|n| g.eps(n).unwrap()).collect();
        let l = levels(&g, &u, 1, &eps, 1).unwrap().unwrap();
        assert_eq!(l.lambda0, ratio(1, 12));
        // Entries below ε_1: 2/5 and 1/10; below ε_2: only 1/10.
        assert_eq!(l.lambda[0], ratio(1, 12));
        assert_eq!(l.lambda[1], ratio(1, 60));
        // G^0 = {6}: (1/2)(1/6)^2. G^1 = [6, 8]: (2/5)(3/6)^2.
        assert_eq!(l.terms[0], exact(ratio(1, 72)));
        assert_eq!(l.terms[1], exact(ratio(1, 10)));
    }
}
