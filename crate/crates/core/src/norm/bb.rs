//! Branch-and-bound evaluation of the norm.
//!
//! Every admissible functional meets each block in at most one atom, so a
//! single measure is a choice of at most one weighted coordinate per block
//! under the budget: a multiple-choice knapsack. An admissible sequence starting
//! at block `s` is a split of the blocks from `s` on into at most `min F_s`
//! consecutive chunks, one measure per chunk. The outer level is a dynamic
//! program over those splits; the inner level solves each chunk's knapsack by
//! depth-first search with the bound `remaining value ≤ min(capacity·max y,
//! Σ best item per block)`.

use crate::error::{Error, Result};
use crate::space::SpaceConfig;

use super::layout::Layout;
use super::ring::Ring;

#[derive(Clone, Debug)]
struct KBlock<R> {
    /// Block index counted from 1.
    index: usize,
    min: usize,
    offset: usize,
    wval: Vec<R>,
    wcost: Vec<R>,
}

#[derive(Clone, Debug)]
struct Item<R> {
    value: R,
    cost: R,
    g: usize,
}

/// Node counters of one or more solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BbStats {
    pub nodes: u64,
    pub pruned: u64,
}

/// Chunks of `(block, g)` pairs; each nonempty chunk is one p-measure.
pub type Chunks = Vec<Vec<(usize, usize)>>;

/// Reusable solver for one configuration. Vectors are passed densely in
/// [`Layout`] order, already scaled to integers.
#[derive(Clone, Debug)]
pub struct BbSolver<R> {
    blocks: Vec<KBlock<R>>,
    node_cap: u64,
    items: Vec<Vec<Item<R>>>,
    active: Vec<usize>,
    maxy: Vec<R>,
    maxv: Vec<R>,
    sufy: Vec<R>,
    sufv: Vec<R>,
    best: Vec<R>,
    picks: Vec<Vec<(usize, usize)>>,
    gtab: Vec<R>,
    garg: Vec<usize>,
    stack: Vec<(usize, usize)>,
    scratch_pick: Vec<(usize, usize)>,
    capacity: R,
    /// Node count at which the current call exceeds its cap.
    node_limit: u64,
    pub stats: BbStats,
}

impl<R: Ring> BbSolver<R> {
    pub fn new(cfg: &SpaceConfig, node_cap: u64) -> Self {
        let layout = Layout::new(cfg);
        let w = cfg.weights();
        let blocks = cfg
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| KBlock {
                index: i + 1,
                min: b.min_elem().expect("non-empty block"),
                offset: layout.offsets[i],
                wval: w.value[i].iter().map(R::from_big).collect(),
                wcost: w.cost[i].iter().map(R::from_big).collect(),
            })
            .collect();
        BbSolver {
            blocks,
            node_cap,
            items: Vec::new(),
            active: Vec::new(),
            maxy: Vec::new(),
            maxv: Vec::new(),
            sufy: Vec::new(),
            sufv: Vec::new(),
            best: Vec::new(),
            picks: Vec::new(),
            gtab: Vec::new(),
            garg: Vec::new(),
            stack: Vec::new(),
            scratch_pick: Vec::new(),
            capacity: R::from_big(&w.scale),
            node_limit: node_cap,
            stats: BbStats::default(),
        }
    }

    /// Largest value of an admissible functional on `y` (or on `-y` when
    /// `negate`), in units of `1/scale`. With `want_witness`, also the chunks
    /// of a maximizer.
    pub fn admissible_max(
        &mut self,
        y: &[R],
        negate: bool,
        want_witness: bool,
    ) -> Result<(R, Option<Chunks>)> {
        self.node_limit = self.stats.nodes.saturating_add(self.node_cap);
        self.collect_items(y, negate);
        let a = self.active.len();
        if a == 0 {
            return Ok((R::zero(), want_witness.then(Vec::new)));
        }
        self.best.clear();
        self.best.resize(a * a, R::zero());
        if self.picks.len() < a * a {
            self.picks.resize(a * a, Vec::new());
        }
        for i in 0..a {
            for j in i..a {
                self.knapsack(i, j)?;
            }
        }

        // gtab[i][r]: best total over blocks i.. with at most r chunks.
        let width = a + 1;
        self.gtab.clear();
        self.gtab.resize(width * width, R::zero());
        self.garg.clear();
        self.garg.resize(width * width, usize::MAX);
        for i in (0..a).rev() {
            for r in 1..=a {
                let mut top = R::zero();
                let mut arg = usize::MAX;
                for j in i..a {
                    let v = self.best[i * a + j].clone() + self.gtab[(j + 1) * width + r - 1].clone();
                    if arg == usize::MAX || v > top {
                        top = v;
                        arg = j;
                    }
                }
                self.gtab[i * width + r] = top;
                self.garg[i * width + r] = arg;
            }
        }

        let mut top = R::zero();
        let mut start = usize::MAX;
        for s in 0..a {
            let k = self.blocks[self.active[s]].min.min(a - s);
            let v = self.gtab[s * width + k].clone();
            if start == usize::MAX || v > top {
                top = v;
                start = s;
            }
        }
        if !want_witness {
            return Ok((top, None));
        }
        let mut chunks = Vec::new();
        let mut i = start;
        let mut r = self.blocks[self.active[start]].min.min(a - start);
        while i < a && r > 0 {
            let j = self.garg[i * width + r];
            let chunk: Vec<(usize, usize)> = self.picks[i * a + j]
                .iter()
                .map(|&(d, slot)| (self.blocks[self.active[d]].index, self.items[d][slot].g))
                .collect();
            if !chunk.is_empty() {
                chunks.push(chunk);
            }
            i = j + 1;
            r -= 1;
        }
        Ok((top, Some(chunks)))
    }

    fn collect_items(&mut self, y: &[R], negate: bool) {
        self.active.clear();
        self.maxy.clear();
        self.maxv.clear();
        for (b, kb) in self.blocks.iter().enumerate() {
            let a = self.active.len();
            if self.items.len() <= a {
                self.items.push(Vec::new());
            }
            let items = &mut self.items[a];
            items.clear();
            let mut maxy = R::zero();
            for (slot, w) in kb.wval.iter().enumerate() {
                let v = if negate {
                    -y[kb.offset + slot].clone()
                } else {
                    y[kb.offset + slot].clone()
                };
                if v.is_positive() {
                    if v > maxy {
                        maxy = v.clone();
                    }
                    items.push(Item {
                        value: w.clone() * v.clone(),
                        cost: kb.wcost[slot].clone(),
                        g: slot + 1,
                    });
                }
            }
            if !items.is_empty() {
                items.sort_unstable_by(|p, q| q.value.cmp(&p.value).then(p.g.cmp(&q.g)));
                self.maxv.push(items[0].value.clone());
                self.maxy.push(maxy);
                self.active.push(b);
            }
        }
    }

    fn knapsack(&mut self, i: usize, j: usize) -> Result<()> {
        let a = self.active.len();
        if i == j {
            // One block: the first affordable item is the best, as the DFS would find.
            self.stats.nodes += 1;
            let slot = &mut self.picks[i * a + j];
            slot.clear();
            match self.items[i].iter().position(|it| it.cost <= self.capacity) {
                Some(k) => {
                    self.best[i * a + j] = self.items[i][k].value.clone();
                    slot.push((i, k));
                }
                None => self.best[i * a + j] = R::zero(),
            }
            return Ok(());
        }
        self.sufy.clear();
        self.sufy.resize(a + 1, R::zero());
        self.sufv.clear();
        self.sufv.resize(a + 1, R::zero());
        for d in (i..=j).rev() {
            let y = self.maxy[d].clone();
            self.sufy[d] = if y > self.sufy[d + 1] {
                y
            } else {
                self.sufy[d + 1].clone()
            };
            self.sufv[d] = self.sufv[d + 1].clone() + self.maxv[d].clone();
        }
        self.stack.clear();
        self.scratch_pick.clear();
        let mut dfs = Dfs {
            items: &self.items,
            sufy: &self.sufy,
            sufv: &self.sufv,
            end: j + 1,
            best: R::zero(),
            best_pick: &mut self.scratch_pick,
            stack: &mut self.stack,
            stats: &mut self.stats,
            node_cap: self.node_cap,
            node_limit: self.node_limit,
        };
        dfs.run(i, self.capacity.clone(), R::zero())?;
        let best = dfs.best;
        self.best[i * a + j] = best;
        let slot = &mut self.picks[i * a + j];
        slot.clear();
        slot.extend_from_slice(&self.scratch_pick);
        Ok(())
    }
}

struct Dfs<'a, R> {
    items: &'a [Vec<Item<R>>],
    sufy: &'a [R],
    sufv: &'a [R],
    end: usize,
    best: R,
    best_pick: &'a mut Vec<(usize, usize)>,
    stack: &'a mut Vec<(usize, usize)>,
    stats: &'a mut BbStats,
    node_cap: u64,
    node_limit: u64,
}

impl<R: Ring> Dfs<'_, R> {
    fn run(&mut self, d: usize, cap: R, acc: R) -> Result<()> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.node_limit {
            return Err(Error::ResourceCap {
                what: "branch-and-bound nodes",
                cap: self.node_cap as usize,
            });
        }
        if d == self.end {
            if acc > self.best {
                self.best = acc;
                self.best_pick.clear();
                self.best_pick.extend_from_slice(self.stack);
            }
            return Ok(());
        }
        let by_capacity = cap.clone() * self.sufy[d].clone();
        let bound = if by_capacity < self.sufv[d] {
            by_capacity
        } else {
            self.sufv[d].clone()
        };
        if acc.clone() + bound <= self.best {
            self.stats.pruned += 1;
            return Ok(());
        }
        for (slot, item) in self.items[d].iter().enumerate() {
            if item.cost <= cap {
                self.stack.push((d, slot));
                self.run(d + 1, cap.clone() - item.cost.clone(), acc.clone() + item.value.clone())?;
                self.stack.pop();
            }
        }
        self.run(d + 1, cap, acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceConfig;

    #[test]
    fn single_block_picks_the_heaviest_atom() {
        let t = SpaceConfig::toy();
        let mut s = BbSolver::<i64>::new(&t, 1_000_000);
        // Layout positions: block 1 -> 0..2, block 2 -> 2..5, block 3 -> 5..9.
        let mut y = vec![0i64; 9];
        y[1] = 1; // coordinate 3
        y[4] = 1; // coordinate 6
        let (v, chunks) = s.admissible_max(&y, false, true).unwrap();
        assert_eq!(v, 2 * 144);
        assert_eq!(chunks.unwrap(), vec![vec![(1, 2)], vec![(2, 3)]]);
        let (v, _) = s.admissible_max(&y, true, false).unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn node_cap_applies_per_call() {
        let t = SpaceConfig::toy();
        let mut s = BbSolver::<i64>::new(&t, 1_000);
        let y = vec![1i64; 9];
        for _ in 0..100 {
            s.admissible_max(&y, false, false).unwrap();
        }
        assert!(s.stats.nodes > 1_000);
    }

    #[test]
    fn node_cap_is_a_hard_error() {
        let t = SpaceConfig::toy();
        let mut s = BbSolver::<i64>::new(&t, 3);
        let y = vec![1i64; 9];
        assert!(matches!(
            s.admissible_max(&y, false, false),
            Err(Error::ResourceCap { .. })
        ));
    }
}
