//! Instance generators. Each one builds inputs that satisfy the check's
//! preconditions by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::Result;
use crate::norm::norm_bb;
use crate::rational::{int, pow_interval, ratio, Interval};
use crate::space::{SpaceConfig, SparseVector};

use super::checks::{L1Instance, L3Instance, L45Instance};
use super::norm_enclosure;

fn budget(cfg: &SpaceConfig, g: &[usize]) -> Interval {
    g.iter()
        .zip(cfg.blocks())
        .filter(|(&g, _)| g > 0)
        .fold(Interval::exact(BigRational::zero()), |acc, (&g, b)| {
            acc.add(&pow_interval(&ratio(g as i64, b.len() as i64), cfg.p()))
        })
}

/// Random initial-segment lengths, trimmed until the budget is certified `≤ 1`.
pub fn gen_l1<R: Rng>(cfg: &SpaceConfig, rng: &mut R) -> L1Instance {
    let mut g: Vec<usize> = cfg
        .blocks()
        .iter()
        .map(|b| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(0..=b.len()) })
        .collect();
    while budget(cfg, &g).hi > BigRational::one() {
        let live: Vec<usize> = (0..g.len()).filter(|&i| g[i] > 0).collect();
        let i = live[rng.gen_range(0..live.len())];
        g[i] -= 1;
    }
    L1Instance { g }
}

/// Integers `r_i` rescaled by the least integer `D` with `D^q ≥ Σ r_i^q`.
fn lq_normalized<R: Rng>(cfg: &SpaceConfig, rng: &mut R, signed: bool) -> Vec<(usize, BigRational)> {
    let q = cfg.q().expect("p > 1");
    let mut r: Vec<(usize, i64)> = Vec::new();
    for i in 1..=cfg.block_count() {
        if rng.gen_bool(0.25) {
            continue;
        }
        let lo = if signed { -12 } else { 0 };
        r.push((i, rng.gen_range(lo..=12)));
    }
    let total = r.iter().fold(Interval::exact(BigRational::zero()), |acc, &(_, v)| {
        acc.add(&pow_interval(&int(v.abs()), &q))
    });
    let mut d: i64 = 1;
    while pow_interval(&int(d), &q).lo < total.hi {
        d += 1;
    }
    r.into_iter()
        .filter(|&(_, v)| v != 0)
        .map(|(i, v)| (i, ratio(v, d)))
        .collect()
}

/// Non-negative coefficients `a_1..a_n` with `Σ a_i^q ≤ 1`.
pub fn gen_l2<R: Rng>(cfg: &SpaceConfig, rng: &mut R) -> Vec<BigRational> {
    let n = rng.gen_range(1..=cfg.block_count());
    let pairs = lq_normalized(cfg, rng, false);
    let mut a = vec![BigRational::zero(); n];
    for (i, v) in pairs {
        if i <= n {
            a[i - 1] = v;
        }
    }
    a
}

/// Signed coefficients indexed by block with `Σ |ρ_i|^q ≤ 1`.
pub fn gen_c2_t3<R: Rng>(cfg: &SpaceConfig, rng: &mut R) -> Vec<(usize, BigRational)> {
    lq_normalized(cfg, rng, true)
}

/// A non-negative vector on the window with norm at most 1, entries drawn
/// from multiples of 1/20 and rescaled by the norm.
pub fn gen_unit_ball_vector<R: Rng>(cfg: &SpaceConfig, rng: &mut R) -> Result<SparseVector> {
    let density = rng.gen_range(0.1..0.6);
    let mut y = SparseVector::zero();
    for b in cfg.blocks() {
        for c in b.iter() {
            if rng.gen_bool(density) {
                y.set(c, ratio(rng.gen_range(1..=20), 20));
            }
        }
    }
    if y.is_zero() {
        return Ok(y);
    }
    let norm = norm_enclosure(&norm_bb(&y, cfg)?).hi;
    let shrink = [int(1), ratio(3, 4), ratio(1, 2)][rng.gen_range(0..3)].clone();
    Ok(y.scale(&(shrink / norm)))
}

/// A unit-ball vector, a level `n` and one coordinate per chosen block with
/// entry certified `≥ ε_n`.
pub fn gen_l3<R: Rng>(cfg: &SpaceConfig, rng: &mut R) -> Result<L3Instance> {
    let u = gen_unit_ball_vector(cfg, rng)?;
    let n = rng.gen_range(1..=6u32);
    let eps = cfg.eps(n)?;
    let mut picks = Vec::new();
    for (i, b) in cfg.blocks().iter().enumerate() {
        let big: Vec<usize> = b.iter().filter(|&j| u.get(j) >= eps.hi).collect();
        if !big.is_empty() && rng.gen_bool(0.8) {
            picks.push((i + 1, big[rng.gen_range(0..big.len())]));
        }
    }
    Ok(L3Instance { u, n, picks })
}

/// A unit-ball vector and non-negative weights `ρ_i` on a random set of blocks.
pub fn gen_l4_l5<R: Rng>(cfg: &SpaceConfig, n_max: u32, rng: &mut R) -> Result<L45Instance> {
    let u = gen_unit_ball_vector(cfg, rng)?;
    let mut rhos = Vec::new();
    for i in 1..=cfg.block_count() {
        if rng.gen_bool(0.8) {
            rhos.push((i, BigRational::new(BigInt::from(rng.gen_range(0..=20)), BigInt::from(10))));
        }
    }
    Ok(L45Instance { u, rhos, n_max })
}
