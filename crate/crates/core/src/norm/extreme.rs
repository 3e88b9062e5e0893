//! Vertices of `{x supported on coords : |Λ(x)| ≤ 1 for all Λ}` for at most
//! five coordinates, by solving every square subsystem of active constraints.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::schreier::FinSet;
use crate::space::{SpaceConfig, SparseVector};

use super::exhaustive::coefficient_vectors;
use super::layout::Layout;
use super::NormLimits;

/// Hard cap on the section dimension.
pub const MAX_SECTION_DIM: usize = 5;

pub fn section_extreme_points(cfg: &SpaceConfig, coords: &FinSet) -> Result<Vec<SparseVector>> {
    section_extreme_points_with(cfg, coords, &NormLimits::default())
}

pub fn section_extreme_points_with(
    cfg: &SpaceConfig,
    coords: &FinSet,
    limits: &NormLimits,
) -> Result<Vec<SparseVector>> {
    if !cfg.is_exact() {
        return Err(Error::ExactRequired(
            "vertex enumeration compares points exactly".into(),
        ));
    }
    let d = coords.len();
    if d > MAX_SECTION_DIM {
        return Err(Error::ResourceCap {
            what: "section dimension",
            cap: MAX_SECTION_DIM,
        });
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let last = Layout::new(cfg).last_coord;
    if coords.max_elem().unwrap() > last {
        return Err(Error::Structural(format!(
            "coordinates must not exceed the window end {last}"
        )));
    }

    let cs = coords.as_slice();
    let scale = &cfg.weights().scale;
    let mut hyperplanes: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    for j in 0..d {
        let mut e = vec![BigRational::zero(); d];
        e[j] = BigRational::one();
        hyperplanes.insert(e);
    }
    for v in coefficient_vectors(cfg, cs, limits.exhaustive_functionals)? {
        hyperplanes.insert(
            v.into_iter()
                .map(|x| BigRational::new(x, scale.clone()))
                .collect(),
        );
    }
    let planes: Vec<Vec<BigRational>> = hyperplanes.into_iter().collect();

    let subsystems = binomial(planes.len(), d).saturating_mul(1 << d);
    if subsystems > limits.extreme_subsystems {
        return Err(Error::ResourceCap {
            what: "vertex enumeration subsystems",
            cap: limits.extreme_subsystems as usize,
        });
    }

    let mut vertices: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    let mut pick: Vec<usize> = (0..d).collect();
    loop {
        let rows: Vec<&Vec<BigRational>> = pick.iter().map(|&i| &planes[i]).collect();
        if let Some(inv) = inverse(&rows) {
            for signs in 0u32..(1 << d) {
                let rhs: Vec<BigRational> = (0..d)
                    .map(|k| {
                        if signs >> k & 1 == 1 {
                            -BigRational::one()
                        } else {
                            BigRational::one()
                        }
                    })
                    .collect();
                let x: Vec<BigRational> = inv
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&rhs)
                            .map(|(a, b)| a * b)
                            .fold(BigRational::zero(), |s, t| s + t)
                    })
                    .collect();
                if planes.iter().all(|a| dot(a, &x).abs() <= BigRational::one()) {
                    vertices.insert(x);
                }
            }
        }
        if !next_combination(&mut pick, planes.len()) {
            break;
        }
    }
    let mut out: Vec<SparseVector> = vertices
        .into_iter()
        .map(|x| SparseVector::from_pairs(cs.iter().copied().zip(x)))
        .collect();
    out.sort();
    Ok(out)
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .fold(BigRational::zero(), |s, t| s + t)
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    r
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gauss–Jordan inverse; `None` for a singular matrix.
fn inverse(rows: &[&Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let d = rows.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = (*r).clone();
            row.extend((0..d).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..d {
        let p = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot = m[col].clone();
                for (v, p) in m[r].iter_mut().zip(&pivot) {
                    *v -= &f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> FinSet {
        s.parse().unwrap()
    }

    fn pts(s: &[&str]) -> Vec<SparseVector> {
        let mut v: Vec<SparseVector> = s.iter().map(|t| t.parse().unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn one_dimensional_section() {
        let got = section_extreme_points(&SpaceConfig::toy(), &set("2")).unwrap();
        assert_eq!(got, pts(&["2:-1", "2:1"]));
    }

    #[test]
    fn square_section() {
        let got = section_extreme_points(&SpaceConfig::toy(), &set("2,3")).unwrap();
        assert_eq!(got, pts(&["2:1,3:1", "2:1,3:-1", "2:-1,3:1", "2:-1,3:-1"]));
    }

    #[test]
    fn hexagonal_section() {
        // Oracle: constraints |x3| ≤ 1, |x6| ≤ 1, |x3 + x6| ≤ 1 written out by
        // hand; the hexagon's vertices follow from pairwise intersections.
        let got = section_extreme_points(&SpaceConfig::toy(), &set("3,6")).unwrap();
        assert_eq!(
            got,
            pts(&["3:1", "6:1", "3:-1,6:1", "3:-1", "6:-1", "3:1,6:-1"])
        );
    }

    #[test]
    fn caps_and_modes() {
        let t = SpaceConfig::toy();
        assert!(matches!(
            section_extreme_points(&t, &set("2,3,4,5,6,7")),
            Err(Error::ResourceCap { .. })
        ));
        let f = SpaceConfig::parse("p = 3/2\nblocks = [2-3]").unwrap();
        assert!(matches!(
            section_extreme_points(&f, &set("2")),
            Err(Error::ExactRequired(_))
        ));
    }

    #[test]
    fn combinations() {
        let mut p = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut p, 4) {
            n += 1;
        }
        assert_eq!(n, 6);
        assert_eq!(binomial(5, 2), 10);
    }
}
