//! Seeded verification of the quantitative lemmas.
//!
//! Each check evaluates both sides of an inequality per instance and records
//! a replayable failure whenever the relation is not certified. Quantities
//! that involve `ε_n` or non-integer powers are carried as rational
//! enclosures; a relation `lhs ≤ rhs` passes only when `hi(lhs) ≤ lo(rhs)`.

mod checks;
mod constants;
mod gen;

use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::NormResult;
use crate::rational::Interval;
use crate::space::SpaceConfig;

pub use checks::{
    check_c2_t3, check_l1, check_l2_lower, check_l3, check_l4_l5, L1Instance, L3Instance,
    L45Instance,
};
pub use constants::{constant_a, constant_b, ConstantB};
pub use gen::{gen_c2_t3, gen_l1, gen_l2, gen_l3, gen_l4_l5, gen_unit_ball_vector};

/// Suite identifiers accepted by [`run_suite`].
pub const SUITE_IDS: [&str; 5] = ["L1", "L2", "L3", "L4L5", "C2T3"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub instances: usize,
    /// Instances whose preconditions could not be certified.
    pub skipped: usize,
    pub failures: Vec<Failure>,
    pub verdict: Verdict,
    pub runtime_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config_digest: String,
    pub seed: u64,
    pub reports: Vec<CheckReport>,
    pub verdict: Verdict,
}

/// Instance counts per suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteCounts {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub l4_l5: usize,
    pub c2_t3: usize,
    /// Largest `n` for the per-level estimates.
    pub n_max: u32,
}

impl Default for SuiteCounts {
    fn default() -> Self {
        SuiteCounts {
            l1: 1000,
            l2: 200,
            l3: 100,
            l4_l5: 100,
            c2_t3: 100,
            n_max: 6,
        }
    }
}

pub fn run_suite(cfg: &SpaceConfig, ids: &[&str], seed: u64) -> Result<SuiteReport> {
    run_suite_with(cfg, ids, seed, &SuiteCounts::default())
}

/// Runs the named suites. Suite `k` of [`SUITE_IDS`] draws from stream `k` of
/// a ChaCha8 generator seeded with `seed`, so a suite's instances do not
/// depend on which other suites are selected.
pub fn run_suite_with(
    cfg: &SpaceConfig,
    ids: &[&str],
    seed: u64,
    counts: &SuiteCounts,
) -> Result<SuiteReport> {
    let mut selected = Vec::new();
    for id in ids {
        let k = SUITE_IDS
            .iter()
            .position(|s| s.eq_ignore_ascii_case(id.trim()))
            .ok_or_else(|| Error::UnknownSuite(id.to_string()))?;
        selected.push(k);
    }
    let mut reports = Vec::with_capacity(selected.len());
    for k in selected {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut report = match k {
            0 => {
                let inst: Vec<_> = (0..counts.l1).map(|_| gen_l1(cfg, &mut rng)).collect();
                check_l1(cfg, &inst)?
            }
            1 => {
                let inst: Vec<_> = (0..counts.l2).map(|_| gen_l2(cfg, &mut rng)).collect();
                check_l2_lower(cfg, &inst)?
            }
            2 => {
                let mut inst = Vec::with_capacity(counts.l3);
                for _ in 0..counts.l3 {
                    inst.push(gen_l3(cfg, &mut rng)?);
                }
                check_l3(cfg, &inst)?
            }
            3 => {
                let mut inst = Vec::with_capacity(counts.l4_l5);
                for _ in 0..counts.l4_l5 {
                    inst.push(gen_l4_l5(cfg, counts.n_max, &mut rng)?);
                }
                check_l4_l5(cfg, &inst)?
            }
            _ => {
                let inst: Vec<_> = (0..counts.c2_t3).map(|_| gen_c2_t3(cfg, &mut rng)).collect();
                check_c2_t3(cfg, &inst)?
            }
        };
        report.seed = Some(seed);
        reports.push(report);
    }
    let verdict = if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SuiteReport {
        config_digest: cfg.digest(),
        seed,
        reports,
        verdict,
    })
}

/// Accumulates one check's outcome.
pub(crate) struct Tally {
    id: &'static str,
    digest: String,
    start: Instant,
    instances: usize,
    skipped: usize,
    failures: Vec<Failure>,
}

impl Tally {
    pub(crate) fn new(id: &'static str, cfg: &SpaceConfig) -> Self {
        Tally {
            id,
            digest: cfg.digest(),
            start: Instant::now(),
            instances: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    pub(crate) fn instance(&mut self) {
        self.instances += 1;
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    /// Records a failure unless `lhs ≤ rhs` is certified.
    pub(crate) fn le(&mut self, input: &dyn Fn() -> String, label: &str, lhs: &Interval, rhs: &Interval) {
        if lhs.hi <= rhs.lo {
            return;
        }
        let relation = if lhs.lo > rhs.hi {
            format!("{label}: ≤")
        } else {
            format!("{label}: ≤ (not certified)")
        };
        self.failures.push(Failure {
            input: input(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            relation,
        });
    }

    /// Records a failure unless the two exact values agree.
    pub(crate) fn eq(&mut self, input: &dyn Fn() -> String, label: &str, lhs: &BigRational, rhs: &BigRational) {
        if lhs != rhs {
            self.failures.push(Failure {
                input: input(),
                lhs: crate::rational::fmt_rational(lhs),
                rhs: crate::rational::fmt_rational(rhs),
                relation: format!("{label}: ="),
            });
        }
    }

    pub(crate) fn finish(self) -> CheckReport {
        let verdict = if self.failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckReport {
            id: self.id.to_string(),
            config_digest: self.digest,
            seed: None,
            instances: self.instances,
            skipped: self.skipped,
            failures: self.failures,
            verdict,
            runtime_ms: self.start.elapsed().as_millis(),
        }
    }
}

/// Enclosure of a norm computed with the stored weights.
pub(crate) fn norm_enclosure(r: &NormResult) -> Interval {
    let lo = &r.value - &r.error_bound;
    Interval {
        lo: if lo < BigRational::zero() { BigRational::zero() } else { lo },
        hi: &r.value + &r.error_bound,
    }
}

/// Enclosure of `x^e` for an enclosure `x ≥ 0` and `e > 0`.
pub(crate) fn pow_enclosure(x: &Interval, e: &BigRational) -> Interval {
    use crate::rational::pow_interval;
    Interval {
        lo: pow_interval(&x.lo, e).lo,
        hi: pow_interval(&x.hi, e).hi,
    }
}
