//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Intended for the small coupled programs used as an independent check of
//! the backward-induction engine; it favours clarity over speed.

use num_traits::{One, Signed, Zero};

use crate::num::Q;

/// Constraint sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

/// Sparse coefficients, sense and right-hand side of one constraint.
type Row = (Vec<(usize, Q)>, Sense, Q);

/// A linear program `minimize c·x` over free or nonnegative variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    objective: Vec<Q>,
    free: Vec<bool>,
    rows: Vec<Row>,
}

/// Outcome of [`LinearProgram::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with objective coefficient `cost`; returns its index.
    pub fn var(&mut self, cost: Q, free: bool) -> usize {
        self.objective.push(cost);
        self.free.push(free);
        self.objective.len() - 1
    }

    /// Adds the constraint `Σ coeff·x sense rhs`.
    pub fn constraint(&mut self, terms: Vec<(usize, Q)>, sense: Sense, rhs: Q) {
        self.rows.push((terms, sense, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn solve(&self) -> LpOutcome {
        // Column layout: split variables, then slacks, then artificials.
        let n = self.objective.len();
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
        let mut ncols = 0;
        for &f in &self.free {
            if f {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let nstruct = ncols;
        let m = self.rows.len();
        let nslack = self.rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let total = nstruct + nslack + m;
        let art0 = nstruct + nslack;
        let mut t = vec![vec![Q::zero(); total + 1]; m];
        let mut basis = vec![0usize; m];
        let mut slack = nstruct;
        for (i, (terms, sense, rhs)) in self.rows.iter().enumerate() {
            for (j, c) in terms {
                let (p, neg) = col_of[*j];
                t[i][p] += c;
                if let Some(nc) = neg {
                    t[i][nc] -= c;
                }
            }
            match sense {
                Sense::Ge => {
                    t[i][slack] = -Q::one();
                    slack += 1;
                }
                Sense::Le => {
                    t[i][slack] = Q::one();
                    slack += 1;
                }
                Sense::Eq => {}
            }
            t[i][total] = rhs.clone();
            if t[i][total].is_negative() {
                for v in t[i].iter_mut() {
                    *v = -v.clone();
                }
            }
            t[i][art0 + i] = Q::one();
            basis[i] = art0 + i;
        }
        // Phase 1: minimize the sum of artificials.
        let mut cost1 = vec![Q::zero(); total];
        for c in cost1.iter_mut().skip(art0) {
            *c = Q::one();
        }
        if !run(&mut t, &mut basis, &cost1, total) {
            return LpOutcome::Unbounded; // cannot happen in phase 1
        }
        let phase1: Q = basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art0)
            .map(|(i, _)| t[i][total].clone())
            .sum();
        if !phase1.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining zero-level artificials out of the basis when possible.
        for i in 0..m {
            if basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| !t[i][j].is_zero()) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
        // Phase 2: original objective, artificials barred from entering.
        let mut cost2 = vec![Q::zero(); total];
        for (j, c) in self.objective.iter().enumerate() {
            let (p, neg) = col_of[j];
            cost2[p] = c.clone();
            if let Some(nc) = neg {
                cost2[nc] = -c.clone();
            }
        }
        // Any artificial still basic sits on an all-zero structural row, so it
        // is unaffected by phase-2 pivots and may keep cost zero.
        if !run_restricted(&mut t, &mut basis, &cost2, total, art0) {
            return LpOutcome::Unbounded;
        }
        let mut colval = vec![Q::zero(); total];
        for (i, &b) in basis.iter().enumerate() {
            colval[b] = t[i][total].clone();
        }
        let x: Vec<Q> = col_of
            .iter()
            .map(|&(p, neg)| match neg {
                Some(nc) => &colval[p] - &colval[nc],
                None => colval[p].clone(),
            })
            .collect();
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { value, x }
    }
}

fn pivot(t: &mut [Vec<Q>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
    basis[r] = c;
}

fn run(t: &mut [Vec<Q>], basis: &mut [usize], cost: &[Q], total: usize) -> bool {
    run_restricted(t, basis, cost, total, total)
}

/// Bland's-rule simplex; columns `>= barrier` may not enter. Returns false if
/// the objective is unbounded.
fn run_restricted(t: &mut [Vec<Q>], basis: &mut [usize], cost: &[Q], total: usize, barrier: usize) -> bool {
    loop {
        // Reduced costs: c_j − c_B B^{-1} a_j.
        let entering = (0..barrier).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut rc = cost[j].clone();
            for (i, &b) in basis.iter().enumerate() {
                if !t[i][j].is_zero() {
                    rc -= &cost[b] * &t[i][j];
                }
            }
            rc.is_negative()
        });
        let Some(c) = entering else {
            return true;
        };
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[c].is_positive() {
                let ratio = &row[total] / &row[c];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(t, basis, r, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    #[test]
    fn small_program() {
        // min V s.t. V ≥ 0, V − a ≥ 0, V + a − b/2 ≥ 1, V + a + b ≥ 0.
        let mut lp = LinearProgram::new();
        let v = lp.var(qi(1), true);
        let a = lp.var(qi(0), true);
        let b = lp.var(qi(0), true);
        lp.constraint(vec![(v, qi(1))], Sense::Ge, qi(0));
        lp.constraint(vec![(v, qi(1)), (a, qi(-1))], Sense::Ge, qi(0));
        lp.constraint(vec![(v, qi(1)), (a, qi(1)), (b, q(-1, 2))], Sense::Ge, qi(1));
        lp.constraint(vec![(v, qi(1)), (a, qi(1)), (b, qi(1))], Sense::Ge, qi(0));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.var(qi(1), false);
        lp.constraint(vec![(x, qi(1))], Sense::Le, qi(-1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new();
        let x = lp.var(qi(1), true);
        lp.constraint(vec![(x, qi(1))], Sense::Le, qi(3));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }
}
