//! The norm `‖x‖ = max |Λ(x)|` over the norming set, its dual on spans of
//! coordinate functionals, and vertices of small sections of the unit ball.
//!
//! Every routine works on integers: weights are scaled by the common
//! denominator of the weight table and vectors by the common denominator of
//! their entries. The integer width is chosen per call from a bound on every
//! sum the kernels can form.

mod bb;
mod dual;
mod exhaustive;
mod extreme;
mod layout;
mod lp;
mod ring;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::serde_rational;
use crate::space::{NormFunctional, PMeasure, SpaceConfig, SparseVector};

pub use bb::{BbSolver, BbStats, Chunks};
pub use dual::{dual_norm, dual_norm_with, DualNormResult};
pub use exhaustive::ExhaustiveTable;
pub use extreme::{section_extreme_points, section_extreme_points_with};
pub use lp::{LinearProgram, LpSolution};
pub use ring::{Ring, Width};

use layout::{magnitude_bound, scale_vector, Layout, Scaled};
use ring::width_for;

/// Explicit resource caps. Exceeding one is an error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormLimits {
    pub bb_nodes: u64,
    pub exhaustive_functionals: u64,
    pub dual_cuts: usize,
    pub extreme_subsystems: u64,
}

impl Default for NormLimits {
    fn default() -> Self {
        NormLimits {
            bb_nodes: 50_000_000,
            exhaustive_functionals: 20_000_000,
            dual_cuts: 5_000,
            extreme_subsystems: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormStats {
    pub nodes: u64,
    pub pruned: u64,
    pub functionals: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormResult {
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    /// A maximizing functional; `None` only for the zero vector.
    pub witness: Option<NormFunctional>,
    pub stats: NormStats,
    /// Zero for integer `p`. Otherwise a bound on the gap between the stored
    /// weights and the true ones, times `‖x‖_1`.
    #[serde(with = "serde_rational")]
    pub error_bound: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Exhaustive,
    BranchAndBound,
}

pub fn norm(x: &SparseVector, cfg: &SpaceConfig, engine: Engine) -> Result<NormResult> {
    match engine {
        Engine::Exhaustive => norm_exhaustive(x, cfg),
        Engine::BranchAndBound => norm_bb(x, cfg),
    }
}

/// Maximum of `|Λ(x)|` over every functional whose atoms lie in `supp x`,
/// listed one by one. Ties go to the smallest functional in encoding order.
pub fn norm_exhaustive(x: &SparseVector, cfg: &SpaceConfig) -> Result<NormResult> {
    norm_exhaustive_with(x, cfg, &NormLimits::default())
}

pub fn norm_exhaustive_with(
    x: &SparseVector,
    cfg: &SpaceConfig,
    limits: &NormLimits,
) -> Result<NormResult> {
    let layout = Layout::new(cfg);
    let scaled = scale_vector(x, cfg, &layout)?;
    let cap = limits.exhaustive_functionals;
    let (value, witness, functionals) = match width_for(&magnitude_bound(cfg, &scaled)) {
        Width::I64 => {
            let r = exhaustive::run::<i64>(cfg, &layout, &scaled, cap)?;
            (r.value.to_big(), r.witness, r.functionals)
        }
        Width::I128 => {
            let r = exhaustive::run::<i128>(cfg, &layout, &scaled, cap)?;
            (r.value.to_big(), r.witness, r.functionals)
        }
        Width::Big => {
            let r = exhaustive::run::<BigInt>(cfg, &layout, &scaled, cap)?;
            (r.value, r.witness, r.functionals)
        }
    };
    Ok(finish(
        cfg,
        x,
        &scaled,
        value,
        witness,
        NormStats {
            functionals,
            ..NormStats::default()
        },
    ))
}

/// Same value as [`norm_exhaustive`], computed by branch and bound.
pub fn norm_bb(x: &SparseVector, cfg: &SpaceConfig) -> Result<NormResult> {
    norm_bb_with(x, cfg, &NormLimits::default())
}

pub fn norm_bb_with(x: &SparseVector, cfg: &SpaceConfig, limits: &NormLimits) -> Result<NormResult> {
    let layout = Layout::new(cfg);
    let scaled = scale_vector(x, cfg, &layout)?;
    let (value, witness, stats) = match width_for(&magnitude_bound(cfg, &scaled)) {
        Width::I64 => run_bb::<i64>(cfg, &scaled, limits)?,
        Width::I128 => run_bb::<i128>(cfg, &scaled, limits)?,
        Width::Big => run_bb::<BigInt>(cfg, &scaled, limits)?,
    };
    Ok(finish(cfg, x, &scaled, value, witness, stats))
}

fn run_bb<R: Ring>(
    cfg: &SpaceConfig,
    scaled: &Scaled,
    limits: &NormLimits,
) -> Result<(BigInt, Option<NormFunctional>, NormStats)> {
    let scale = R::from_big(&cfg.weights().scale);
    let mut best = R::zero();
    let mut witness = None;
    for (c, v) in &scaled.entries {
        let val = R::from_big(v).abs() * scale.clone();
        if witness.is_none() || val > best {
            best = val;
            witness = Some(NormFunctional::Unit(*c));
        }
    }
    let mut solver = BbSolver::<R>::new(cfg, limits.bb_nodes);
    let y: Vec<R> = scaled.dense.iter().map(R::from_big).collect();
    for negate in [false, true] {
        let (v, chunks) = solver.admissible_max(&y, negate, true)?;
        if v > best {
            best = v;
            witness = Some(chunks_to_functional(chunks.expect("requested")));
        }
    }
    let stats = NormStats {
        nodes: solver.stats.nodes,
        pruned: solver.stats.pruned,
        functionals: 0,
    };
    Ok((best.to_big(), witness, stats))
}

fn chunks_to_functional(chunks: Chunks) -> NormFunctional {
    NormFunctional::Admissible(
        chunks
            .into_iter()
            .map(|c| PMeasure::new(c.into_iter().collect()).expect("non-empty chunk"))
            .collect(),
    )
}

fn finish(
    cfg: &SpaceConfig,
    x: &SparseVector,
    scaled: &Scaled,
    value: BigInt,
    witness: Option<NormFunctional>,
    stats: NormStats,
) -> NormResult {
    let w = cfg.weights();
    let value = BigRational::new(value, &w.scale * &scaled.denom);
    let error_bound = if w.exact {
        BigRational::zero()
    } else {
        &w.error * x.l1()
    };
    NormResult {
        value,
        witness,
        stats,
        error_bound,
    }
}

/// Allocation-free evaluation of many small integer vectors on one
/// configuration, through both engines. Vectors are given densely, one entry
/// per block coordinate in block order, and results are `scale·‖y‖`.
#[derive(Clone, Debug)]
pub struct DenseKernel {
    bb: BbSolver<i64>,
    table: ExhaustiveTable,
    scale: i64,
    coords: Vec<usize>,
}

impl DenseKernel {
    pub fn new(cfg: &SpaceConfig, limits: &NormLimits) -> Result<Self> {
        let table = ExhaustiveTable::new(cfg, limits.exhaustive_functionals)?;
        let scale = num_traits::ToPrimitive::to_i64(&cfg.weights().scale).expect("checked by table");
        Ok(DenseKernel {
            bb: BbSolver::new(cfg, limits.bb_nodes),
            table,
            scale,
            coords: cfg.blocks().iter().flat_map(|b| b.iter()).collect(),
        })
    }

    /// The coordinate behind each dense position.
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn table(&self) -> &ExhaustiveTable {
        &self.table
    }

    fn check(&self, y: &[i64]) -> Result<()> {
        if y.len() != self.coords.len() {
            return Err(Error::Structural(format!(
                "dense vector has {} entries, the window has {}",
                y.len(),
                self.coords.len()
            )));
        }
        let l1: i64 = y.iter().map(|v| v.abs()).sum();
        if l1.checked_mul(self.scale).is_none_or(|v| v > 1 << 60) {
            return Err(Error::ResourceCap {
                what: "dense vector magnitude",
                cap: 1 << 60,
            });
        }
        Ok(())
    }

    pub fn bb_scaled(&mut self, y: &[i64]) -> Result<i64> {
        self.check(y)?;
        let units = y.iter().map(|v| v.abs()).max().unwrap_or(0) * self.scale;
        let (pos, _) = self.bb.admissible_max(y, false, false)?;
        let (neg, _) = self.bb.admissible_max(y, true, false)?;
        Ok(units.max(pos).max(neg))
    }

    pub fn exhaustive_scaled(&self, y: &[i64]) -> Result<i64> {
        self.check(y)?;
        Ok(self.table.max_abs_scaled(y))
    }

    pub fn stats(&self) -> BbStats {
        self.bb.stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::space::functional_value;

    fn vec(s: &str) -> SparseVector {
        s.parse().unwrap()
    }

    fn pm(pairs: &[(usize, usize)]) -> PMeasure {
        PMeasure::from_pairs(pairs).unwrap()
    }

    #[test]
    fn exhaustive_examples() {
        let t = SpaceConfig::toy();
        let r = norm_exhaustive(&vec("2:1"), &t).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.witness, Some(NormFunctional::Unit(2)));

        let r = norm_exhaustive(&vec("3:1,6:1"), &t).unwrap();
        assert_eq!(r.value, int(2));
        assert_eq!(
            r.witness,
            Some(NormFunctional::Admissible(vec![pm(&[(1, 2)]), pm(&[(2, 3)])]))
        );

        let r = norm_exhaustive(&vec("2:1,4:1"), &t).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.witness, Some(NormFunctional::Unit(2)));
    }

    #[test]
    fn bb_examples() {
        let t = SpaceConfig::toy();
        assert_eq!(norm_bb(&vec("3:1,6:1"), &t).unwrap().value, int(2));
        assert_eq!(norm_bb(&vec("2:1,4:1"), &t).unwrap().value, int(1));
        assert_eq!(norm_bb(&vec("4:1,5:1,6:1"), &t).unwrap().value, int(1));
    }

    #[test]
    fn best_pair_of_small_atoms_is_dominated_by_a_unit() {
        // Oracle: 1/4 + 1/9 = 13/36 by hand, below the unit value 1.
        let t = SpaceConfig::toy();
        let f = NormFunctional::Admissible(vec![pm(&[(1, 1), (2, 1)])]);
        assert_eq!(functional_value(&f, &vec("2:1,4:1"), &t).unwrap(), ratio(13, 36));
    }

    #[test]
    fn zero_vector() {
        let t = SpaceConfig::toy();
        for r in [norm_bb(&SparseVector::zero(), &t), norm_exhaustive(&SparseVector::zero(), &t)] {
            let r = r.unwrap();
            assert!(r.value.is_zero());
            assert!(r.witness.is_none());
        }
    }

    #[test]
    fn coordinates_beyond_the_window_are_rejected() {
        let t = SpaceConfig::toy();
        assert!(matches!(norm_bb(&vec("11:1"), &t), Err(Error::Structural(_))));
        // Coordinate 1 lies before the first block: only its unit functional sees it.
        assert_eq!(norm_bb(&vec("1:3"), &t).unwrap().value, int(3));
    }

    #[test]
    fn witnesses_attain_the_value() {
        let t = SpaceConfig::toy();
        for s in ["3:1,6:-1,9:2", "2:-1/2,5:1,7:1,10:-2", "4:1,8:1/3"] {
            let x = vec(s);
            for r in [norm_bb(&x, &t).unwrap(), norm_exhaustive(&x, &t).unwrap()] {
                let w = r.witness.unwrap();
                w.validate(&t).unwrap();
                let v = functional_value(&w, &x, &t).unwrap();
                assert_eq!(num_traits::Signed::abs(&v), r.value, "{s}");
            }
        }
    }

    #[test]
    fn dense_kernel_matches_the_sparse_engines() {
        let t = SpaceConfig::toy();
        let mut k = DenseKernel::new(&t, &NormLimits::default()).unwrap();
        assert_eq!(k.coords(), &[2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let y = [1, -2, 0, 2, 1, 0, -1, 2, 1];
        let x = SparseVector::from_pairs(k.coords().iter().zip(y).map(|(&c, v)| (c, int(v))));
        let want = norm_exhaustive(&x, &t).unwrap().value * int(k.scale());
        assert_eq!(int(k.bb_scaled(&y).unwrap()), want);
        assert_eq!(int(k.exhaustive_scaled(&y).unwrap()), want);
    }

    #[test]
    fn float_mode_reports_an_error_bound() {
        let cfg = SpaceConfig::parse("p = 3/2\nblocks = [2-3, 4-6]").unwrap();
        let x = vec("3:1,6:1");
        let a = norm_bb(&x, &cfg).unwrap();
        let b = norm_exhaustive(&x, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.error_bound > BigRational::zero());
        assert_eq!(a.value, int(2));
    }
}
