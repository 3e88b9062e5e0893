//! Block systems, exponents and the parameter set of the ℓ_q-type regime.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::{
    as_u32, fmt_rational, from_f64, int, lcm_all, parse_rational, pow_interval, pow_u32, ratio,
    to_f64, Interval,
};
use crate::schreier::FinSet;

/// Fixed-point scale used for weights when `p` is not an integer.
const FLOAT_SCALE_BITS: u32 = 60;
/// Upper bound on `true weight - stored weight` in float mode, as a fraction of 1.
const FLOAT_WEIGHT_ERR_BITS: u32 = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Basic,
    Section4,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Basic => "basic",
            Mode::Section4 => "section4",
        })
    }
}

/// `θ`, `α`, `β`, `γ` with `ε_n = θ^(α^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub theta: BigRational,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub gamma: BigRational,
}

/// Integer weight table. `value[n][g-1] / scale` is the weight `(g/|F_n|)^p`
/// used when evaluating functionals and `cost[n][g-1] / scale` the one used for
/// budgets. The two coincide for integer `p`. Otherwise `value` rounds down,
/// `cost` rounds up and both are within `error` of the true weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub scale: BigInt,
    pub value: Vec<Vec<BigInt>>,
    pub cost: Vec<Vec<BigInt>>,
    pub exact: bool,
    pub error: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceConfig {
    p: BigRational,
    blocks: Vec<FinSet>,
    mode: Mode,
    params: Option<Params>,
    weights: WeightTable,
}

/// Violated constraints; empty means the configuration is valid for its mode.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

impl SpaceConfig {
    /// Builds a configuration. Structural problems (empty blocks, `p < 1`,
    /// missing parameters in section4 mode) are errors; the quantitative
    /// constraints are left to [`SpaceConfig::validate`].
    pub fn new(
        p: BigRational,
        blocks: Vec<FinSet>,
        mode: Mode,
        params: Option<Params>,
    ) -> Result<Self> {
        if p < BigRational::one() {
            return Err(Error::InvalidConfig(format!(
                "p = {} is below 1",
                fmt_rational(&p)
            )));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidConfig("no blocks".into()));
        }
        if let Some(i) = blocks.iter().position(FinSet::is_empty) {
            return Err(Error::InvalidConfig(format!("block {} is empty", i + 1)));
        }
        if mode == Mode::Section4 && params.is_none() {
            return Err(Error::InvalidConfig(
                "section4 mode needs theta, alpha, beta and gamma".into(),
            ));
        }
        let weights = weight_table(&p, &blocks);
        Ok(SpaceConfig {
            p,
            blocks,
            mode,
            params,
            weights,
        })
    }

    /// The toy configuration: `p = 2`, blocks `{2,3}, {4,5,6}, {7,8,9,10}`.
    pub fn toy() -> Self {
        Self::parse(include_str!("../../../../configs/T.cfg")).expect("built-in config T")
    }

    /// The desk-scale section4 configuration.
    pub fn desk() -> Self {
        Self::parse(include_str!("../../../../configs/G.cfg")).expect("built-in config G")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses the `key = value` format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = None;
        let mut mode = Mode::Basic;
        let mut blocks = None;
        let (mut theta, mut alpha, mut beta, mut gamma) = (None, None, None, None);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let value = value.trim();
            match key.trim() {
                "p" => p = Some(parse_rational(value)?),
                "mode" => {
                    mode = match value {
                        "basic" => Mode::Basic,
                        "section4" => Mode::Section4,
                        other => {
                            return Err(Error::Parse(format!("unknown mode `{other}`")));
                        }
                    }
                }
                "blocks" => blocks = Some(parse_blocks(value)?),
                "theta" => theta = Some(parse_rational(value)?),
                "alpha" => alpha = Some(parse_rational(value)?),
                "beta" => beta = Some(parse_rational(value)?),
                "gamma" => gamma = Some(parse_rational(value)?),
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let p = p.ok_or_else(|| Error::Parse("missing `p`".into()))?;
        let blocks = blocks.ok_or_else(|| Error::Parse("missing `blocks`".into()))?;
        let params = match (theta, alpha, beta, gamma) {
            (Some(theta), Some(alpha), Some(beta), Some(gamma)) => Some(Params {
                theta,
                alpha,
                beta,
                gamma,
            }),
            (None, None, None, None) => None,
            _ => {
                return Err(Error::Parse(
                    "theta, alpha, beta and gamma must be given together".into(),
                ))
            }
        };
        SpaceConfig::new(p, blocks, mode, params)
    }

    /// The same blocks and exponent under a different mode and parameters.
    pub fn with_mode(&self, mode: Mode, params: Option<Params>) -> Result<Self> {
        SpaceConfig::new(self.p.clone(), self.blocks.clone(), mode, params)
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    /// The conjugate exponent `p/(p-1)`; `None` for `p = 1`.
    pub fn q(&self) -> Option<BigRational> {
        let one = BigRational::one();
        (self.p > one).then(|| &self.p / (&self.p - one))
    }

    /// `p` as an integer, when it is one.
    pub fn p_integer(&self) -> Option<u32> {
        as_u32(&self.p)
    }

    pub fn is_exact(&self) -> bool {
        self.weights.exact
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn params(&self) -> Option<&Params> {
        self.params.as_ref()
    }

    pub fn blocks(&self) -> &[FinSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Block `n`, counted from 1.
    pub fn block(&self, n: usize) -> Result<&FinSet> {
        n.checked_sub(1)
            .and_then(|i| self.blocks.get(i))
            .ok_or_else(|| {
                Error::Structural(format!(
                    "block {n} is outside the window of {} blocks",
                    self.blocks.len()
                ))
            })
    }

    /// `(block index from 1, rank within the block from 1)` of a coordinate.
    pub fn locate(&self, coord: usize) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .enumerate()
            .find_map(|(i, b)| b.rank_of(coord).map(|r| (i + 1, r)))
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    /// The weight `(g/|F_n|)^p` as stored (exact for integer `p`).
    pub fn weight(&self, n: usize, g: usize) -> Result<BigRational> {
        let size = self.block(n)?.len();
        if g == 0 || g > size {
            return Err(Error::Structural(format!(
                "segment length {g} is outside 1..={size} for block {n}"
            )));
        }
        Ok(BigRational::new(
            self.weights.value[n - 1][g - 1].clone(),
            self.weights.scale.clone(),
        ))
    }

    /// `ε_n = θ^(α^n)` as a certified enclosure.
    pub fn eps(&self, n: u32) -> Result<Interval> {
        let params = self.require_params()?;
        Ok(pow_interval(&params.theta, &pow_u32(&params.alpha, n)))
    }

    pub fn require_params(&self) -> Result<&Params> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("configuration has no section4 parameters".into()))
    }

    /// `Σ_n 1/|F_n|` over the window.
    pub fn reciprocal_size_sum(&self) -> BigRational {
        self.blocks
            .iter()
            .map(|b| ratio(1, b.len() as i64))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Every violated constraint of the declared mode.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, w) in self.blocks.windows(2).enumerate() {
            if !w[0].precedes(&w[1]) {
                violations.push(format!(
                    "blocks not successive: max F_{} = {} >= min F_{} = {}",
                    i + 1,
                    w[0].max_elem().unwrap(),
                    i + 2,
                    w[1].min_elem().unwrap()
                ));
            }
        }
        if self.mode == Mode::Section4 {
            self.validate_section4(&mut violations);
        }
        ValidationReport { violations }
    }

    fn validate_section4(&self, violations: &mut Vec<String>) {
        let one = BigRational::one();
        if self.p <= one {
            violations.push(format!("p = {} must exceed 1", fmt_rational(&self.p)));
        }
        let Some(params) = self.params.as_ref() else {
            violations.push("missing theta, alpha, beta, gamma".into());
            return;
        };
        let mut params_ok = true;
        if !(params.theta.is_positive() && params.theta < one) {
            violations.push(format!("theta = {} not in (0,1)", fmt_rational(&params.theta)));
            params_ok = false;
        }
        if params.alpha <= one {
            violations.push(format!("alpha = {} must exceed 1", fmt_rational(&params.alpha)));
            params_ok = false;
        }
        if !params.beta.is_positive() {
            violations.push(format!("beta = {} must be positive", fmt_rational(&params.beta)));
        }
        if !params.gamma.is_positive() {
            violations.push(format!("gamma = {} must be positive", fmt_rational(&params.gamma)));
        }
        if self.p > one {
            // beta/(q-1) = beta*(p-1)
            let lhs = &params.alpha + &params.beta * (&self.p - &one) + &params.gamma;
            if lhs != self.p {
                violations.push(format!(
                    "alpha + beta/(q-1) + gamma = {} differs from p = {}",
                    fmt_rational(&lhs),
                    fmt_rational(&self.p)
                ));
            }
        }
        let recip = self.reciprocal_size_sum();
        if recip >= one {
            violations.push(format!(
                "sum of 1/|F_n| = {} is not below 1",
                fmt_rational(&recip)
            ));
        }
        if !params_ok {
            return;
        }
        for (i, block) in self.blocks.iter().enumerate() {
            let n = i as u32 + 1;
            let eps = self.eps(n).expect("params present");
            // Certified: min F_n > 1 + 2/lo implies min F_n > 1 + 2/eps_n.
            let threshold_hi = &one + int(2) / &eps.lo;
            let min = int(block.min_elem().unwrap() as i64);
            if min <= threshold_hi {
                let threshold = 1.0 + 2.0 / eps.mid_f64();
                violations.push(format!(
                    "min F_{n} = {} < 1 + 2/eps_{n} = {threshold:.4}",
                    block.min_elem().unwrap()
                ));
            }
        }
    }

    /// `|F_n|` nondecreasing across the window.
    pub fn check_growth(&self) -> Result<()> {
        for (i, w) in self.blocks.windows(2).enumerate() {
            if w[1].len() < w[0].len() {
                return Err(Error::InvalidConfig(format!(
                    "|F_{}| = {} > |F_{}| = {}: block sizes must be nondecreasing",
                    i + 1,
                    w[0].len(),
                    i + 2,
                    w[1].len()
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back an equal configuration.
    pub fn canonical_text(&self) -> String {
        let mut out = format!("p = {}\nmode = {}\nblocks = [", fmt_rational(&self.p), self.mode);
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let (lo, hi) = (b.min_elem().unwrap(), b.max_elem().unwrap());
            if hi - lo + 1 == b.len() {
                if lo == hi {
                    out.push_str(&lo.to_string());
                } else {
                    out.push_str(&format!("{lo}-{hi}"));
                }
            } else {
                out.push_str(&b.to_string());
            }
        }
        out.push_str("]\n");
        if let Some(params) = &self.params {
            for (k, v) in [
                ("theta", &params.theta),
                ("alpha", &params.alpha),
                ("beta", &params.beta),
                ("gamma", &params.gamma),
            ] {
                out.push_str(&format!("{k} = {}\n", fmt_rational(v)));
            }
        }
        out
    }

    /// Hex SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical_text().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for SpaceConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

/// `[2-3, 4-6, {11,13}, 20]`
fn parse_blocks(text: &str) -> Result<Vec<FinSet>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse("blocks must be a bracketed list".into()))?;
    let mut blocks = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let (item, tail) = if rest.starts_with('{') {
            let close = rest
                .find('}')
                .ok_or_else(|| Error::Parse("unclosed `{` in blocks".into()))?;
            (&rest[..=close], &rest[close + 1..])
        } else {
            match rest.find(',') {
                Some(i) => (&rest[..i], &rest[i..]),
                None => (rest, ""),
            }
        };
        blocks.push(parse_block(item.trim())?);
        rest = tail.trim_start().trim_start_matches(',').trim_start();
    }
    Ok(blocks)
}

fn parse_block(item: &str) -> Result<FinSet> {
    if item.starts_with('{') {
        return item.parse();
    }
    let bad = || Error::Parse(format!("bad block `{item}`"));
    match item.split_once('-') {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo == 0 || hi < lo {
                return Err(bad());
            }
            Ok(FinSet::interval(lo, hi))
        }
        None => FinSet::new(vec![item.parse().map_err(|_| bad())?]),
    }
}

fn weight_table(p: &BigRational, blocks: &[FinSet]) -> WeightTable {
    if let Some(p) = as_u32(p) {
        let powers: Vec<BigInt> = blocks
            .iter()
            .map(|b| num_traits::pow(BigInt::from(b.len()), p as usize))
            .collect();
        let scale = lcm_all(powers.iter());
        let value: Vec<Vec<BigInt>> = blocks
            .iter()
            .zip(&powers)
            .map(|(b, pw)| {
                let unit = &scale / pw;
                (1..=b.len())
                    .map(|g| num_traits::pow(BigInt::from(g), p as usize) * &unit)
                    .collect()
            })
            .collect();
        return WeightTable {
            scale,
            cost: value.clone(),
            value,
            exact: true,
            error: BigRational::zero(),
        };
    }
    let scale = BigInt::one() << FLOAT_SCALE_BITS;
    let slack = BigInt::one() << (FLOAT_SCALE_BITS - FLOAT_WEIGHT_ERR_BITS);
    let pf = to_f64(p);
    let mut value = Vec::new();
    let mut cost = Vec::new();
    for b in blocks {
        let size = b.len();
        let mut vs = Vec::with_capacity(size);
        let mut cs = Vec::with_capacity(size);
        for g in 1..=size {
            if g == size {
                vs.push(scale.clone());
                cs.push(scale.clone());
                continue;
            }
            let w = (g as f64 / size as f64).powf(pf);
            // Shrink by 2^-50 relative, well above powf's error, then floor.
            let lowered = from_f64(w * (1.0 - f64::EPSILON * 4.0)) * BigRational::from(scale.clone());
            let lo = lowered.floor().to_integer().max(BigInt::zero());
            let hi = (&lo + &slack).min(scale.clone());
            vs.push(lo);
            cs.push(hi);
        }
        value.push(vs);
        cost.push(cs);
    }
    WeightTable {
        scale,
        value,
        cost,
        exact: false,
        error: BigRational::new(BigInt::one(), BigInt::one() << FLOAT_WEIGHT_ERR_BITS),
    }
}

impl WeightTable {
    /// `scale` as an `f64`, for diagnostics.
    pub fn scale_f64(&self) -> f64 {
        self.scale.to_f64().unwrap_or(f64::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g_params() -> Params {
        Params {
            theta: ratio(1, 2),
            alpha: ratio(6, 5),
            beta: ratio(2, 5),
            gamma: ratio(2, 5),
        }
    }

    #[test]
    fn toy_config_is_valid_in_basic_mode() {
        let t = SpaceConfig::toy();
        assert_eq!(t.block_count(), 3);
        assert_eq!(t.block(2).unwrap(), &FinSet::interval(4, 6));
        assert!(t.validate().is_ok());
    }

    #[test]
    fn toy_blocks_fail_the_section4_threshold() {
        let t = SpaceConfig::toy()
            .with_mode(Mode::Section4, Some(g_params()))
            .unwrap();
        let report = t.validate();
        assert!(!report.is_ok());
        assert!(report.violations.iter().any(|v| v.starts_with("min F_1 = 2 < 1 + 2/eps_1")));
        // Oracle: 1 + 2/0.5^1.2 computed independently.
        let threshold = 1.0 + 2.0 / 0.5f64.powf(1.2);
        assert!((threshold - 5.595).abs() < 1e-3);
    }

    #[test]
    fn overlapping_blocks_are_reported() {
        let cfg = SpaceConfig::parse("p = 2\nblocks = [2-3, 3-4]").unwrap();
        let report = cfg.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("not successive"));
    }

    #[test]
    fn desk_config_is_valid() {
        let g = SpaceConfig::desk();
        assert_eq!(g.mode(), Mode::Section4);
        assert!(g.validate().is_ok(), "{}", g.validate());
        let sizes: Vec<usize> = g.blocks().iter().map(FinSet::len).collect();
        assert_eq!(sizes, vec![6, 7, 8, 9]);
    }

    #[test]
    fn integer_weights_are_exact() {
        let t = SpaceConfig::toy();
        assert_eq!(t.weight(1, 1).unwrap(), ratio(1, 4));
        assert_eq!(t.weight(2, 2).unwrap(), ratio(4, 9));
        assert_eq!(t.weight(3, 4).unwrap(), int(1));
        assert!(t.weight(3, 5).is_err());
        assert!(t.weight(4, 1).is_err());
        assert_eq!(t.weights().scale, BigInt::from(144));
    }

    #[test]
    fn float_weights_bracket_the_true_power() {
        let cfg = SpaceConfig::parse("p = 3/2\nblocks = [2-3, 4-6]").unwrap();
        assert!(!cfg.is_exact());
        let w = cfg.weights();
        for (n, size) in [(0usize, 2usize), (1, 3)] {
            for g in 1..=size {
                let truth = (g as f64 / size as f64).powf(1.5);
                let lo = to_f64(&BigRational::new(w.value[n][g - 1].clone(), w.scale.clone()));
                let hi = to_f64(&BigRational::new(w.cost[n][g - 1].clone(), w.scale.clone()));
                assert!(lo <= truth && truth <= hi, "{g}/{size}");
                assert!(hi - lo <= to_f64(&w.error));
            }
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        for cfg in [SpaceConfig::toy(), SpaceConfig::desk()] {
            let again = SpaceConfig::parse(&cfg.canonical_text()).unwrap();
            assert_eq!(again, cfg);
            assert_eq!(again.digest(), cfg.digest());
        }
        assert_ne!(SpaceConfig::toy().digest(), SpaceConfig::desk().digest());
    }

    #[test]
    fn parse_errors() {
        assert!(SpaceConfig::parse("blocks = [2-3]").is_err());
        assert!(SpaceConfig::parse("p = 2").is_err());
        assert!(SpaceConfig::parse("p = 1/2\nblocks = [2-3]").is_err());
        assert!(SpaceConfig::parse("p = 2\nblocks = [3-2]").is_err());
        assert!(SpaceConfig::parse("p = 2\nblocks = [2-3]\ntheta = 1/2").is_err());
        assert!(SpaceConfig::parse("p = 2\nmode = section4\nblocks = [2-3]").is_err());
        let c = SpaceConfig::parse("p = 2 # exponent\nblocks = [{2,5}, 7]").unwrap();
        assert_eq!(c.block(1).unwrap().as_slice(), &[2, 5]);
        assert_eq!(c.block(2).unwrap().as_slice(), &[7]);
    }

    #[test]
    fn growth_check() {
        assert!(SpaceConfig::toy().check_growth().is_ok());
        let c = SpaceConfig::parse("p = 2\nblocks = [2-4, 5-6]").unwrap();
        assert!(c.check_growth().is_err());
    }

    #[test]
    fn eps_is_enclosed() {
        let g = SpaceConfig::desk();
        let e1 = g.eps(1).unwrap();
        let v = 0.5f64.powf(1.2);
        assert!(to_f64(&e1.lo) <= v && v <= to_f64(&e1.hi));
        assert!(SpaceConfig::toy().eps(1).is_err());
    }
}
