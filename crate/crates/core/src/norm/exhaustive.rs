//! Brute-force evaluation: list every functional whose atoms lie in the
//! support and take the largest absolute value. Used as the oracle for the
//! branch-and-bound engine, so it shares no search logic with it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::space::{NormFunctional, PMeasure, SpaceConfig};

use super::layout::{Layout, Scaled};
use super::ring::Ring;

#[derive(Clone, Debug)]
struct Opt<R> {
    block: usize,
    g: usize,
    pos: usize,
    value: R,
    cost: R,
}

/// Calls `visit(chosen, cuts)` for every admissible functional: one option
/// per block (or none), and every split of the chosen atoms into consecutive
/// measures (`cuts` has bit `i` set when a new measure starts after atom `i`)
/// that respects the budgets and `k ≤ min F` of the first block used.
fn for_each_functional<R: Ring>(
    options: &[Vec<Opt<R>>],
    mins: &[usize],
    scale: &R,
    cap: u64,
    mut visit: impl FnMut(&[&Opt<R>], u64),
) -> Result<u64> {
    let mut count = 0u64;
    let mut idx = vec![0usize; options.len()];
    let mut chosen: Vec<&Opt<R>> = Vec::with_capacity(options.len());
    let mut first_min = 0usize;
    loop {
        // Odometer step; index 0 means "no atom in this block".
        let mut b = 0;
        while b < options.len() {
            idx[b] += 1;
            if idx[b] <= options[b].len() {
                break;
            }
            idx[b] = 0;
            b += 1;
        }
        if b == options.len() {
            return Ok(count);
        }
        chosen.clear();
        for (b, &i) in idx.iter().enumerate() {
            if i > 0 {
                if chosen.is_empty() {
                    first_min = mins[b];
                }
                chosen.push(&options[b][i - 1]);
            }
        }
        let t = chosen.len();
        for cuts in 0u64..(1u64 << (t - 1)) {
            let k = cuts.count_ones() as usize + 1;
            if k > first_min {
                continue;
            }
            let mut ok = true;
            let mut used = R::zero();
            for (i, o) in chosen.iter().enumerate() {
                used = used + o.cost.clone();
                if used > *scale {
                    ok = false;
                    break;
                }
                if i + 1 < t && cuts >> i & 1 == 1 {
                    used = R::zero();
                }
            }
            if !ok {
                continue;
            }
            count += 1;
            if count > cap {
                return Err(Error::ResourceCap {
                    what: "exhaustive functional enumeration",
                    cap: cap as usize,
                });
            }
            visit(&chosen, cuts);
        }
    }
}

fn build_functional<R>(chosen: &[&Opt<R>], cuts: u64) -> NormFunctional {
    let mut measures = Vec::new();
    let mut current = BTreeMap::new();
    for (i, o) in chosen.iter().enumerate() {
        current.insert(o.block, o.g);
        if i + 1 == chosen.len() || cuts >> i & 1 == 1 {
            measures.push(PMeasure::new(std::mem::take(&mut current)).expect("non-empty"));
        }
    }
    NormFunctional::Admissible(measures)
}

fn block_mins(cfg: &SpaceConfig) -> Vec<usize> {
    cfg.blocks()
        .iter()
        .map(|b| b.min_elem().expect("non-empty block"))
        .collect()
}

/// Result of the exhaustive search, in units of `1/(scale·denominator)`.
pub(crate) struct Exhaustive<R> {
    pub value: R,
    pub witness: Option<NormFunctional>,
    pub functionals: u64,
}

pub(crate) fn run<R: Ring>(
    cfg: &SpaceConfig,
    layout: &Layout,
    scaled: &Scaled,
    cap: u64,
) -> Result<Exhaustive<R>> {
    let w = cfg.weights();
    let scale = R::from_big(&w.scale);
    let all_mins = block_mins(cfg);
    let mut options = Vec::new();
    let mut mins = Vec::new();
    for (b, block) in cfg.blocks().iter().enumerate() {
        let opts: Vec<Opt<R>> = (0..block.len())
            .filter(|&slot| !scaled.dense[layout.offsets[b] + slot].is_zero())
            .map(|slot| {
                let y = R::from_big(&scaled.dense[layout.offsets[b] + slot]);
                Opt {
                    block: b + 1,
                    g: slot + 1,
                    pos: layout.offsets[b] + slot,
                    value: R::from_big(&w.value[b][slot]) * y,
                    cost: R::from_big(&w.cost[b][slot]),
                }
            })
            .collect();
        if !opts.is_empty() {
            options.push(opts);
            mins.push(all_mins[b]);
        }
    }

    let mut best = R::zero();
    let mut witness: Option<NormFunctional> = None;
    for (c, v) in &scaled.entries {
        let val = R::from_big(v).abs() * scale.clone();
        let cand = NormFunctional::Unit(*c);
        if witness.is_none() || val > best || (val == best && Some(&cand) < witness.as_ref()) {
            best = val;
            witness = Some(cand);
        }
    }
    let functionals = for_each_functional(&options, &mins, &scale, cap, |chosen, cuts| {
        let total = chosen
            .iter()
            .fold(R::zero(), |acc, o| acc + o.value.clone())
            .abs();
        if total < best {
            return;
        }
        let cand = build_functional(chosen, cuts);
        if total > best || Some(&cand) < witness.as_ref() {
            best = total;
            witness = Some(cand);
        }
    })?;
    Ok(Exhaustive {
        value: best,
        witness,
        functionals: functionals + scaled.entries.len() as u64,
    })
}

/// Every distinct coefficient vector of an admissible functional on the whole
/// window, precomputed so that many vectors can be evaluated cheaply. The
/// coefficient vector of a functional depends only on its atoms, not on how
/// they are grouped into measures, so one entry per feasible atom choice is
/// enough.
#[derive(Clone, Debug)]
pub struct ExhaustiveTable {
    starts: Vec<usize>,
    terms: Vec<(usize, i64)>,
    scale: i64,
    functionals: u64,
}

impl ExhaustiveTable {
    /// Needs integer `p` and weights that fit comfortably in `i64`.
    pub fn new(cfg: &SpaceConfig, cap: u64) -> Result<Self> {
        if !cfg.is_exact() {
            return Err(Error::ExactRequired("dense tables need integer p".into()));
        }
        let w = cfg.weights();
        let scale = w
            .scale
            .to_i64()
            .filter(|s| *s < 1 << 40)
            .ok_or(Error::ResourceCap {
                what: "weight scale for dense evaluation",
                cap: 1 << 40,
            })?;
        let layout = Layout::new(cfg);
        let mut options = Vec::new();
        for (b, block) in cfg.blocks().iter().enumerate() {
            options.push(
                (0..block.len())
                    .map(|slot| Opt {
                        block: b + 1,
                        g: slot + 1,
                        pos: layout.offsets[b] + slot,
                        value: w.value[b][slot].to_i64().expect("checked scale"),
                        cost: w.cost[b][slot].to_i64().expect("checked scale"),
                    })
                    .collect(),
            );
        }
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut table = ExhaustiveTable {
            starts: vec![0],
            terms: Vec::new(),
            scale,
            functionals: 0,
        };
        let functionals = for_each_functional(&options, &block_mins(cfg), &scale, cap, |chosen, _| {
            let key: Vec<usize> = chosen.iter().map(|o| o.pos).collect();
            if seen.insert(key) {
                table.terms.extend(chosen.iter().map(|o| (o.pos, o.value)));
                table.starts.push(table.terms.len());
            }
        })?;
        table.functionals = functionals;
        Ok(table)
    }

    /// Number of distinct coefficient vectors.
    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Functionals enumerated while building the table.
    pub fn functionals(&self) -> u64 {
        self.functionals
    }

    /// `scale·‖y‖` for an integer vector in layout order, units included.
    /// The caller keeps `|y|` small enough that `scale·Σ|y|` fits in `i64`.
    pub fn max_abs_scaled(&self, y: &[i64]) -> i64 {
        let mut best = y.iter().map(|v| v.abs()).max().unwrap_or(0) * self.scale;
        for k in 0..self.len() {
            let s: i64 = self.terms[self.starts[k]..self.starts[k + 1]]
                .iter()
                .map(|&(pos, w)| w * y[pos])
                .sum();
            best = best.max(s.abs());
        }
        best
    }
}

/// Distinct nonzero coefficient vectors, over `coords`, of every admissible
/// functional with atoms in `coords`. Entries are integers in units of
/// `1/scale`.
pub(crate) fn coefficient_vectors(
    cfg: &SpaceConfig,
    coords: &[usize],
    cap: u64,
) -> Result<Vec<Vec<num_bigint::BigInt>>> {
    use num_bigint::BigInt;
    let w = cfg.weights();
    let mut options: Vec<Vec<Opt<BigInt>>> = Vec::new();
    let mut mins = Vec::new();
    for (b, block) in cfg.blocks().iter().enumerate() {
        let opts: Vec<Opt<BigInt>> = coords
            .iter()
            .enumerate()
            .filter_map(|(k, &c)| {
                block.rank_of(c).map(|g| Opt {
                    block: b + 1,
                    g,
                    pos: k,
                    value: w.value[b][g - 1].clone(),
                    cost: w.cost[b][g - 1].clone(),
                })
            })
            .collect();
        if !opts.is_empty() {
            options.push(opts);
            mins.push(block.min_elem().expect("non-empty block"));
        }
    }
    let mut seen = BTreeSet::new();
    for_each_functional(&options, &mins, &w.scale, cap, |chosen, _| {
        let mut v = vec![<BigInt as Zero>::zero(); coords.len()];
        for o in chosen {
            v[o.pos] = o.value.clone();
        }
        seen.insert(v);
    })?;
    Ok(seen.into_iter().collect())
}
