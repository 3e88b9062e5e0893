//! The lower and upper equivalence constants `A` and `B`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::{from_f64, int, pow_interval, pow_u32, ratio, to_f64, Interval};
use crate::space::SpaceConfig;

/// Target for the truncated tail of the series in `B`.
const TAIL_TARGET: f64 = 1e-12;
const MAX_TERMS: u32 = 10_000;

/// `A = (1/2)(1 - Σ 1/|F_i|)` over the window; `None` unless the sum is below 1.
pub fn constant_a(cfg: &SpaceConfig) -> Option<BigRational> {
    let s = cfg.reciprocal_size_sum();
    (s < BigRational::one()).then(|| (BigRational::one() - s) / int(2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantB {
    pub value: Interval,
    /// Number of series terms summed exactly before the tail bound.
    pub terms: u32,
    pub tail_bound: f64,
}

/// `B = 4(1 + 2/ε_1 + Σ ε_n^β + Σ (n+2) ε_n^γ)`.
///
/// Both series are summed term by term until the remainder is below `1e-12`.
/// For `m > N` the ratio of consecutive terms decreases in `m`, so the
/// remainder after `N` is at most `t_{N+1}/(1 - r_{N+1})`, with `r` the ratio
/// at `N+1`; the bound is added to the upper end of the enclosure.
pub fn constant_b(cfg: &SpaceConfig) -> Result<ConstantB> {
    let params = cfg.require_params()?;
    let theta = to_f64(&params.theta);
    let alpha = to_f64(&params.alpha);
    let beta = to_f64(&params.beta);
    let gamma = to_f64(&params.gamma);

    let mut sum = Interval::exact(int(1)).add(&cfg.eps(1)?.recip().scale(&int(2)));
    let mut n = 0u32;
    let tail = loop {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::ResourceCap {
                what: "series terms for B",
                cap: MAX_TERMS as usize,
            });
        }
        let an = pow_u32(&params.alpha, n);
        sum = sum
            .add(&pow_interval(&params.theta, &(&params.beta * &an)))
            .add(&pow_interval(&params.theta, &(&params.gamma * &an)).scale(&int(n as i64 + 2)));

        let next = alpha.powi(n as i32 + 1);
        let t_beta = theta.powf(beta * next);
        let t_gamma = (n as f64 + 3.0) * theta.powf(gamma * next);
        let r_beta = theta.powf(beta * next * (alpha - 1.0));
        let r_gamma = (n as f64 + 4.0) / (n as f64 + 3.0) * theta.powf(gamma * next * (alpha - 1.0));
        if r_beta < 1.0 && r_gamma < 1.0 {
            let tail = t_beta / (1.0 - r_beta) + t_gamma / (1.0 - r_gamma);
            if tail < TAIL_TARGET {
                break tail;
            }
        }
    };
    // Pad the float tail generously against rounding.
    sum.hi += from_f64(2.0 * tail) + ratio(1, 1_000_000_000_000_000);
    Ok(ConstantB {
        value: sum.scale(&int(4)),
        terms: n,
        tail_bound: tail,
    })
}

impl ConstantB {
    pub fn approx(&self) -> f64 {
        self.value.hi.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_on_shipped_configs() {
        assert_eq!(constant_a(&SpaceConfig::toy()), None);
        let g = SpaceConfig::desk();
        let s = ratio(1, 6) + ratio(1, 7) + ratio(1, 8) + ratio(1, 9);
        assert_eq!(constant_a(&g), Some((int(1) - s) / int(2)));
    }

    #[test]
    fn b_matches_a_float_sum() {
        let g = SpaceConfig::desk();
        let b = constant_b(&g).unwrap();
        // Independent float evaluation with many more terms.
        let (t, a, be, ga) = (0.5f64, 1.2f64, 0.4f64, 0.4f64);
        let mut s = 1.0 + 2.0 / t.powf(a);
        for n in 1..400 {
            let e = t.powf(a.powi(n));
            s += e.powf(be) + (n as f64 + 2.0) * e.powf(ga);
        }
        let oracle = 4.0 * s;
        assert!(to_f64(&b.value.lo) <= oracle * (1.0 + 1e-10));
        assert!(to_f64(&b.value.hi) >= oracle * (1.0 - 1e-10));
        assert!(to_f64(&(&b.value.hi - &b.value.lo)) < 1e-9);
        assert!(b.tail_bound < 1e-12);
    }

    #[test]
    fn b_requires_parameters() {
        assert!(constant_b(&SpaceConfig::toy()).is_err());
    }
}
