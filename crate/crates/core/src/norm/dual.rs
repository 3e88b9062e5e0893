//! Dual norm `max { f(x) : ‖x‖ ≤ 1 }` by cutting planes.
//!
//! The unit ball restricted to `supp f` is the polytope `|Λ(x)| ≤ 1` over all
//! functionals of the norming set, too many to list. The loop starts from the
//! unit-functional rows, solves the relaxation, and asks the branch-and-bound
//! engine for a functional violated by the optimizer. For `f ≥ 0` the search
//! stays in the non-negative orthant, which loses nothing because deleting the
//! negative part of a vector never raises its norm and never lowers `f`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, from_f64, serde_rational};
use crate::space::{functional_value, SpaceConfig, SparseVector};

use super::lp::LinearProgram;
use super::{norm_bb_with, NormLimits};

/// Float-mode stopping tolerance on the separation value.
const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualNormResult {
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    /// A point of the unit ball with `f(witness_point) = value`.
    pub witness_point: SparseVector,
    /// Norm of the witness point as computed by the branch-and-bound engine.
    #[serde(with = "serde_rational")]
    pub witness_norm: BigRational,
    pub cuts_used: usize,
    pub pivots: u64,
}

pub fn dual_norm(f: &SparseVector, cfg: &SpaceConfig) -> Result<DualNormResult> {
    dual_norm_with(f, cfg, &NormLimits::default())
}

pub fn dual_norm_with(
    f: &SparseVector,
    cfg: &SpaceConfig,
    limits: &NormLimits,
) -> Result<DualNormResult> {
    let coords: Vec<usize> = f.support().into_vec();
    let n = coords.len();
    if n == 0 {
        return Ok(DualNormResult {
            value: BigRational::zero(),
            witness_point: SparseVector::zero(),
            witness_norm: BigRational::zero(),
            cuts_used: 0,
            pivots: 0,
        });
    }
    let signed = f.iter().any(|(_, v)| v.is_negative());
    let fc: Vec<BigRational> = coords.iter().map(|&c| f.get(c)).collect();
    let tolerance = if cfg.is_exact() {
        BigRational::one()
    } else {
        from_f64(1.0 + FLOAT_TOLERANCE)
    };

    // Variables: x_j (non-negative case) or x⁺_j, x⁻_j (signed case).
    let width = if signed { 2 * n } else { n };
    let lift = |a: &[BigRational]| -> Vec<BigRational> {
        if signed {
            a.iter().cloned().chain(a.iter().map(|v| -v)).collect()
        } else {
            a.to_vec()
        }
    };
    let mut lp = LinearProgram::new(lift(&fc));
    for j in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[j] = BigRational::one();
        lp.add_row(&lift(&e), BigRational::one());
        if signed {
            e[j] = -BigRational::one();
            lp.add_row(&lift(&e), BigRational::one());
        }
    }
    debug_assert_eq!(lp.variables(), width);

    let mut cuts = 0usize;
    loop {
        let sol = lp.solve()?;
        let x = SparseVector::from_pairs(coords.iter().enumerate().map(|(j, &c)| {
            let v = if signed {
                &sol.x[j] - &sol.x[n + j]
            } else {
                sol.x[j].clone()
            };
            (c, v)
        }));
        let r = norm_bb_with(&x, cfg, limits)?;
        if r.value <= tolerance {
            debug_assert_eq!(functional_value_of(&fc, &coords, &x), sol.value);
            return Ok(DualNormResult {
                value: sol.value,
                witness_point: x,
                witness_norm: r.value,
                cuts_used: cuts,
                pivots: lp.pivots(),
            });
        }
        if cuts >= limits.dual_cuts {
            let lower = &sol.value / &r.value;
            return Err(Error::CutLimit {
                iterations: cuts,
                lower: fmt_rational(&lower),
                upper: fmt_rational(&sol.value),
            });
        }
        let witness = r.witness.expect("non-zero vector has a witness");
        let sign = if functional_value(&witness, &x, cfg)?.is_negative() {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        let coef = witness.coefficients(cfg)?;
        let a: Vec<BigRational> = coords.iter().map(|&c| &sign * coef.get(c)).collect();
        lp.add_row(&lift(&a), BigRational::one());
        cuts += 1;
    }
}

fn functional_value_of(fc: &[BigRational], coords: &[usize], x: &SparseVector) -> BigRational {
    coords
        .iter()
        .zip(fc)
        .map(|(&c, v)| v * x.get(c))
        .fold(BigRational::zero(), |a, b| a + b)
}
