//! Dense two-phase primal simplex.
//!
//! Pricing is Dantzig's rule (most negative reduced cost, smallest index on
//! ties). After a run of degenerate pivots the solver switches to Bland's
//! rule until the objective moves again, which rules out cycling. Every
//! choice is index-ordered, so a given program always yields the same basis.

use alloc::vec;
use alloc::vec::Vec;

use super::{LinearProgram, Sense};
use crate::Error;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const DEGENERATE_STREAK: usize = 50;

/// Primal solution of a [`LinearProgram`].
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    cols: usize, // without the rhs column
    a: Vec<f64>, // rows x (cols + 1), rhs last
    cost: Vec<f64>, // reduced costs, cols + 1 (last = -objective)
    basis: Vec<usize>,
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.a[pr * w + pc];
        let mut nz = Vec::new();
        for c in 0..w {
            let v = &mut self.a[pr * w + c];
            if *v != 0.0 {
                *v *= inv;
                if v.abs() < 1e-14 {
                    *v = 0.0;
                } else {
                    nz.push(c);
                }
            }
        }
        self.a[pr * w + pc] = 1.0;
        let (before, rest) = self.a.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for &c in &nz {
                    row[c] -= f * prow[c];
                }
                row[pc] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        eliminate(&mut self.cost);
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Runs simplex iterations on the current cost row until optimal.
    fn optimize(&mut self, limit: usize) -> Result<(), Error> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > limit {
                return Err(Error::LpStalled);
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = -COST_TOL;
            for c in 0..self.cols {
                let r = self.cost[c];
                if self.allowed[c] && r < -COST_TOL {
                    if bland {
                        enter = Some(c);
                        break;
                    }
                    if r < best {
                        best = r;
                        enter = Some(c);
                    }
                }
            }
            let Some(pc) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let v = self.at(r, pc);
                if v > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / v;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else { return Err(Error::LpUnbounded) };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc);
        }
    }
}

type CanonRow = (Vec<(usize, f64)>, Sense, f64);

/// Minimises the program. Variables are nonnegative with optional upper
/// bounds.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, Error> {
    let nv = lp.var_count();
    // Gather rows in canonical form: coefficient list, sense, rhs >= 0.
    let mut rows: Vec<CanonRow> = Vec::new();
    for row in &lp.rows {
        let (mut coeffs, mut sense, mut rhs) = (row.coeffs.clone(), row.sense, row.rhs);
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|c| c.1 = -c.1);
            rhs = -rhs;
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        rows.push((coeffs, sense, rhs));
    }
    for (j, ub) in lp.upper.iter().enumerate() {
        if let Some(u) = *ub {
            rows.push((vec![(j, 1.0)], Sense::Le, u));
        }
    }
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let cols = nv + n_slack + n_art;
    let w = cols + 1;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * w],
        cost: vec![0.0; w],
        basis: vec![0; m],
        allowed: vec![true; cols],
        pivots: 0,
    };
    let (mut next_slack, mut next_art) = (nv, nv + n_slack);
    for (r, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        for &(j, c) in coeffs {
            t.a[r * w + j] += c;
        }
        t.a[r * w + cols] = *rhs;
        match sense {
            Sense::Le => {
                t.a[r * w + next_slack] = 1.0;
                t.basis[r] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                t.a[r * w + next_slack] = -1.0;
                next_slack += 1;
                t.a[r * w + next_art] = 1.0;
                t.basis[r] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                t.a[r * w + next_art] = 1.0;
                t.basis[r] = next_art;
                next_art += 1;
            }
        }
    }
    let limit = 50_000 + 50 * (m + cols);

    // Phase 1: minimise the sum of artificials.
    let is_art = |c: usize| c >= nv + n_slack && c < cols;
    if n_art > 0 {
        for c in nv + n_slack..cols {
            t.cost[c] = 1.0;
        }
        for r in 0..m {
            if is_art(t.basis[r]) {
                for c in 0..w {
                    t.cost[c] -= t.a[r * w + c];
                }
            }
        }
        t.optimize(limit)?;
        if -t.cost[cols] > FEAS_TOL {
            return Err(Error::LpInfeasible);
        }
        // Drive remaining (zero-valued) artificials out of the basis.
        for r in 0..m {
            if is_art(t.basis[r]) {
                if let Some(c) = (0..nv + n_slack).find(|&c| t.at(r, c).abs() > PIVOT_TOL) {
                    t.pivot(r, c);
                }
            }
        }
        for c in nv + n_slack..cols {
            t.allowed[c] = false;
        }
    }

    // Phase 2.
    t.cost.iter_mut().for_each(|c| *c = 0.0);
    for &(j, c) in &lp.objective {
        t.cost[j] += c;
    }
    for r in 0..m {
        let b = t.basis[r];
        let cb = if b < nv { lp.objective.iter().filter(|o| o.0 == b).map(|o| o.1).sum() } else { 0.0 };
        if cb != 0.0 {
            for c in 0..w {
                t.cost[c] -= cb * t.a[r * w + c];
            }
        }
    }
    t.optimize(limit)?;

    let mut values = vec![0.0; nv];
    for r in 0..m {
        let b = t.basis[r];
        if b < nv {
            values[b] = t.rhs(r).max(0.0);
        }
    }
    let objective = lp.objective.iter().map(|&(j, c)| c * values[j]).sum();
    Ok(LpSolution { objective, values, pivots: t.pivots })
}
