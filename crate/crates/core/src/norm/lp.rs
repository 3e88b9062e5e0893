//! Dense exact simplex on a Tucker tableau, with rows added on the fly.
//!
//! Problem: maximize `c·x` subject to `A x ≤ b`, `x ≥ 0`. Every row carries a
//! slack; the tableau stores `basic_i = rhs_i − Σ_j T[i][j]·nonbasic_j` and
//! `z = z0 + Σ_j d_j·nonbasic_j`. Primal steps use Bland's rule. After a row
//! is added with a negative right-hand side the tableau is still dual
//! feasible, and dual simplex steps (smallest-index rule) restore primal
//! feasibility.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    n: usize,
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    obj: Vec<BigRational>,
    z: BigRational,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    next_var: usize,
    pivots: u64,
    pivot_cap: u64,
}

impl LinearProgram {
    /// Objective `c` over `c.len()` non-negative variables, no rows yet.
    pub fn new(c: Vec<BigRational>) -> Self {
        let n = c.len();
        LinearProgram {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
            obj: c,
            z: BigRational::zero(),
            basic: Vec::new(),
            nonbasic: (0..n).collect(),
            next_var: n,
            pivots: 0,
            pivot_cap: 1_000_000,
        }
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Adds `a·x ≤ b`, rewritten in terms of the current nonbasic variables.
    pub fn add_row(&mut self, a: &[BigRational], b: BigRational) {
        assert_eq!(a.len(), self.n, "row length");
        let mut row: Vec<BigRational> = self
            .nonbasic
            .iter()
            .map(|&v| if v < self.n { a[v].clone() } else { BigRational::zero() })
            .collect();
        let mut rhs = b;
        for (i, &v) in self.basic.iter().enumerate() {
            if v < self.n && !a[v].is_zero() {
                let coef = &a[v];
                for (r, t) in row.iter_mut().zip(&self.rows[i]) {
                    if !t.is_zero() {
                        *r -= coef * t;
                    }
                }
                rhs -= coef * &self.rhs[i];
            }
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        self.basic.push(self.next_var);
        self.next_var += 1;
    }

    /// Optimizes from the current tableau. The tableau must be primal
    /// feasible or dual feasible.
    pub fn solve(&mut self) -> Result<LpSolution> {
        loop {
            if let Some(r) = self.leaving_dual() {
                if self.obj.iter().any(|d| d.is_positive()) {
                    return Err(Error::Precondition(
                        "tableau is neither primal nor dual feasible".into(),
                    ));
                }
                let c = self.entering_dual(r).ok_or(Error::Infeasible)?;
                self.pivot(r, c)?;
                continue;
            }
            let Some(c) = self.entering_primal() else {
                return Ok(self.solution());
            };
            let r = self.leaving_primal(c).ok_or(Error::Unbounded)?;
            self.pivot(r, c)?;
        }
    }

    fn solution(&self) -> LpSolution {
        let mut x = vec![BigRational::zero(); self.n];
        for (i, &v) in self.basic.iter().enumerate() {
            if v < self.n {
                x[v] = self.rhs[i].clone();
            }
        }
        LpSolution {
            x,
            value: self.z.clone(),
        }
    }

    fn entering_primal(&self) -> Option<usize> {
        (0..self.nonbasic.len())
            .filter(|&j| self.obj[j].is_positive())
            .min_by_key(|&j| self.nonbasic[j])
    }

    fn leaving_primal(&self, c: usize) -> Option<usize> {
        let mut best: Option<(BigRational, usize)> = None;
        for i in 0..self.rows.len() {
            let t = &self.rows[i][c];
            if !t.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / t;
            let better = match &best {
                None => true,
                Some((r, bi)) => ratio < *r || (ratio == *r && self.basic[i] < self.basic[*bi]),
            };
            if better {
                best = Some((ratio, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn leaving_dual(&self) -> Option<usize> {
        (0..self.rows.len())
            .filter(|&i| self.rhs[i].is_negative())
            .min_by_key(|&i| self.basic[i])
    }

    fn entering_dual(&self, r: usize) -> Option<usize> {
        let mut best: Option<(BigRational, usize)> = None;
        for j in 0..self.nonbasic.len() {
            let t = &self.rows[r][j];
            if !t.is_negative() {
                continue;
            }
            let ratio = &self.obj[j] / t;
            let better = match &best {
                None => true,
                Some((q, bj)) => {
                    ratio < *q || (ratio == *q && self.nonbasic[j] < self.nonbasic[*bj])
                }
            };
            if better {
                best = Some((ratio, j));
            }
        }
        best.map(|(_, j)| j)
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.pivot_cap {
            return Err(Error::ResourceCap {
                what: "simplex pivots",
                cap: self.pivot_cap as usize,
            });
        }
        let p = self.rows[r][c].clone();
        let pivot_row: Vec<BigRational> = self.rows[r]
            .iter()
            .enumerate()
            .map(|(j, t)| if j == c { p.recip() } else { t / &p })
            .collect();
        let pivot_rhs = &self.rhs[r] / &p;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for (j, t) in row.iter_mut().enumerate() {
                if j == c {
                    *t = -&f / &p;
                } else if !pivot_row[j].is_zero() {
                    *t -= &f * &pivot_row[j];
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        let d = self.obj[c].clone();
        if !d.is_zero() {
            for (j, o) in self.obj.iter_mut().enumerate() {
                if j == c {
                    *o = -&d / &p;
                } else if !pivot_row[j].is_zero() {
                    *o -= &d * &pivot_row[j];
                }
            }
            self.z += &d * &pivot_rhs;
        }
        self.rows[r] = pivot_row;
        self.rhs[r] = pivot_rhs;
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
        Ok(())
    }
}
