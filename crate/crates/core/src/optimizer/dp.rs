//! The cross-group ordering dynamic program.
//!
//! Cell `(i, j)` of the `(n_a + 1) × (n_b + 1)` lattice holds the best path
//! that has placed the top `i` samples of `a` and the top `j` of `b`. The
//! path is chosen by comparing Ĝ of the two one-step extensions that reach
//! the cell. Only two rows of win counts are kept; the choice at each cell
//! is stored as one bit and replayed backwards at the end.

use bitvec::prelude::*;

use super::objective::{Objective, ObjectiveConfig, Score, Scorer};
use crate::error::{Error, Result};
use crate::ordering::{CrossGroupOrdering, RankedGroup, Step};

pub const DEFAULT_CELL_BUDGET: u64 = 1_000_000_000;

/// Where a lattice cell's best path came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Back {
    Start,
    FromA,
    FromB,
}

/// State of the best path at one lattice cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpCell {
    pub i: usize,
    pub j: usize,
    pub c_ab: u64,
    pub c_ba: u64,
    pub ghat: f64,
    pub back: Back,
}

/// Dynamic-program solver with a configurable lattice size limit.
#[derive(Debug, Clone)]
pub struct XOrder {
    config: ObjectiveConfig,
    cell_budget: u64,
}

impl XOrder {
    pub fn new(config: ObjectiveConfig) -> Self {
        XOrder {
            config,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn with_cell_budget(mut self, cells: u64) -> Self {
        self.cell_budget = cells;
        self
    }

    pub fn solve(&self, a: &RankedGroup, b: &RankedGroup) -> Result<CrossGroupOrdering> {
        for g in [a, b] {
            if g.is_empty() {
                return Err(Error::EmptyGroup(g.group().to_string()));
            }
        }
        let objective = Objective::new(a, b, self.config)?;
        let cells = (a.len() as u128 + 1) * (b.len() as u128 + 1);
        if cells > self.cell_budget as u128 {
            return Err(Error::CapacityExceeded {
                what: "dynamic-program lattice cells",
                needed: cells,
                budget: self.cell_budget as u128,
            });
        }
        let from_a = match objective.scorer() {
            Scorer::Utility(s) => fill(a, b, &s),
            Scorer::Weighted(s) => fill(a, b, &s),
            Scorer::Exact(s) => fill(a, b, &s),
        };
        Ok(backtrack(&from_a, a.len(), b.len()))
    }

    /// Solves and replays the recovered path, returning the state at every
    /// cell it visits from `(0, 0)` to `(n_a, n_b)`.
    pub fn solve_traced(&self, a: &RankedGroup, b: &RankedGroup) -> Result<(CrossGroupOrdering, Vec<DpCell>)> {
        let ordering = self.solve(a, b)?;
        let objective = Objective::new(a, b, self.config)?;
        Ok((ordering.clone(), replay(&ordering, a, b, &objective)))
    }
}

/// Runs the dynamic program with the default cell budget.
pub fn xorder_dp(a: &RankedGroup, b: &RankedGroup, config: &ObjectiveConfig) -> Result<CrossGroupOrdering> {
    XOrder::new(*config).solve(a, b)
}

/// Fills the lattice row by row. Bit `(i, j)` is set when the best path to
/// the cell ends with a sample from `a`.
fn fill<S: Score>(a: &RankedGroup, b: &RankedGroup, scorer: &S) -> BitVec {
    let (n_a, n_b) = (a.len(), b.len());
    let width = n_b + 1;
    let mut from_a = bitvec![0; (n_a + 1) * width];
    let (a_pos, b_pos) = (a.labels(), b.labels());
    let (a_neg_left, b_neg_left) = (a.suffix_neg(), b.suffix_neg());

    // row 0 only ever takes from b
    let mut prev: Vec<(u64, u64)> = Vec::with_capacity(width);
    prev.push((0, 0));
    for j in 1..=n_b {
        let (c_ab, c_ba) = prev[j - 1];
        prev.push((c_ab, c_ba + b_pos[j - 1] as u64 * a_neg_left[0]));
    }

    let mut cur = vec![(0u64, 0u64); width];
    for i in 1..=n_a {
        let gain_a = if a_pos[i - 1] { 1 } else { 0 };
        let row = i * width;
        // column 0 only ever takes from a
        let (c_ab, c_ba) = prev[0];
        cur[0] = (c_ab + gain_a * b_neg_left[0], c_ba);
        from_a.set(row, true);
        let b_gain = a_neg_left[i];
        for j in 1..=n_b {
            let (ab_a, ba_a) = prev[j];
            let via_a = (ab_a + gain_a * b_neg_left[j], ba_a);
            let (ab_b, ba_b) = cur[j - 1];
            let via_b = (ab_b, ba_b + b_pos[j - 1] as u64 * b_gain);
            if scorer.value(via_a.0, via_a.1) > scorer.value(via_b.0, via_b.1) {
                cur[j] = via_a;
                from_a.set(row + j, true);
            } else {
                cur[j] = via_b;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    from_a
}

fn backtrack(from_a: &BitSlice, n_a: usize, n_b: usize) -> CrossGroupOrdering {
    let width = n_b + 1;
    let mut steps = Vec::with_capacity(n_a + n_b);
    let (mut i, mut j) = (n_a, n_b);
    while i > 0 || j > 0 {
        if from_a[i * width + j] {
            steps.push(Step::TakeA);
            i -= 1;
        } else {
            steps.push(Step::TakeB);
            j -= 1;
        }
    }
    steps.reverse();
    CrossGroupOrdering::new(steps)
}

/// Walks an ordering through the lattice, recomputing the win counts and Ĝ
/// at every visited cell.
pub fn replay(
    ordering: &CrossGroupOrdering,
    a: &RankedGroup,
    b: &RankedGroup,
    objective: &Objective,
) -> Vec<DpCell> {
    let mut cells = Vec::with_capacity(ordering.steps().len() + 1);
    let (mut i, mut j, mut c_ab, mut c_ba) = (0, 0, 0u64, 0u64);
    cells.push(DpCell {
        i,
        j,
        c_ab,
        c_ba,
        ghat: objective.ghat(0, 0),
        back: Back::Start,
    });
    for &s in ordering.steps() {
        let back = match s {
            Step::TakeA => {
                if a.labels()[i] {
                    c_ab += b.suffix_neg()[j];
                }
                i += 1;
                Back::FromA
            }
            Step::TakeB => {
                if b.labels()[j] {
                    c_ba += a.suffix_neg()[i];
                }
                j += 1;
                Back::FromB
            }
        };
        cells.push(DpCell {
            i,
            j,
            c_ab,
            c_ba,
            ghat: objective.ghat(c_ab, c_ba),
            back,
        });
    }
    cells
}
