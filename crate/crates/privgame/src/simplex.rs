//! A dense two-phase simplex solver for the tiny linear programs produced
//! by the binary mechanism synthesis (six variables, about a dozen rows).
//!
//! Bland's rule is used for both the entering and leaving choices, which
//! rules out cycling and makes the solver bit-deterministic: identical
//! inputs always produce identical outputs.

use crate::error::{Error, Result};

/// Constraint relation. `Ge` rows can be expressed as negated `Le` rows by
/// callers; both are accepted here for convenience of test problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min objective . x` subject to the constraint rows and per-variable box
/// bounds. Lower bounds must be finite; upper bounds may be infinite.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: self.bounds.len() });
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::ShapeMismatch { expected: n, got: c.coeffs.len() });
            }
            if !c.rhs.is_finite() {
                return Err(Error::InvalidParameter(format!("constraint #{i} rhs not finite")));
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "variable #{j} lower bound must be finite"
                )));
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "variable #{j} has empty bound interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;
const MAX_ITERS: usize = 100_000;

struct Tableau {
    /// m rows of [columns..., rhs].
    rows: Vec<Vec<f64>>,
    /// Reduced-cost row; the last entry is the negated objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may never enter the basis (artificials in phase 2).
    banned: Vec<bool>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row {
                let factor = r[col];
                if factor != 0.0 {
                    for (v, p) in r.iter_mut().zip(&pivot_row) {
                        *v -= factor * p;
                    }
                }
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        self.basis[row] = col;
    }

    /// Run simplex iterations to optimality with Bland's rule.
    fn optimize(&mut self) -> Result<()> {
        for _ in 0..MAX_ITERS {
            // Entering: lowest-index non-banned column with negative
            // reduced cost.
            let entering = (0..self.ncols)
                .find(|&j| !self.banned[j] && self.cost[j] < -COST_TOL);
            let Some(col) = entering else { return Ok(()) };

            // Leaving: minimum ratio; ties resolved by the smallest basic
            // variable index.
            let mut leave: Option<(usize, f64)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                let a = r[col];
                if a > PIVOT_TOL {
                    let ratio = r[self.ncols] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || (ratio < br + 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded { column: col });
            };
            self.pivot(row, col);
        }
        Err(Error::InvalidParameter("simplex iteration limit exceeded".into()))
    }

    fn set_cost_row(&mut self, c: &[f64]) {
        self.cost = vec![0.0; self.ncols + 1];
        self.cost[..c.len()].copy_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.cost[b];
            if cb != 0.0 {
                let row = self.rows[i].clone();
                for (v, p) in self.cost.iter_mut().zip(&row) {
                    *v -= cb * p;
                }
            }
        }
    }
}

/// Solve a small dense LP to optimality.
///
/// Feasible, bounded instances yield the optimal basic solution; infeasible
/// and unbounded instances are reported as errors.
pub fn solve_lp(lp: &LpProblem) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();
    let lo: Vec<f64> = lp.bounds.iter().map(|b| b.0).collect();

    // Rows over the shifted variables x' = x - lo >= 0, with upper bounds
    // appended as explicit rows.
    struct Row {
        a: Vec<f64>,
        rel: Relation,
        b: f64,
    }
    let mut rows: Vec<Row> = Vec::new();
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lo).map(|(a, l)| a * l).sum();
        rows.push(Row { a: c.coeffs.clone(), rel: c.relation, b: c.rhs - shift });
    }
    for (j, (l, h)) in lp.bounds.iter().enumerate() {
        if h.is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push(Row { a, rel: Relation::Le, b: h - l });
        }
    }

    // Normalize to nonnegative rhs; a flipped Le row needs a surplus column
    // and an artificial.
    #[derive(PartialEq)]
    enum Kind {
        Slack,
        Surplus,
        Equality,
    }
    let mut kinds = Vec::with_capacity(rows.len());
    for r in rows.iter_mut() {
        let flipped = r.b < 0.0;
        if flipped {
            for v in r.a.iter_mut() {
                *v = -*v;
            }
            r.b = -r.b;
        }
        kinds.push(match (r.rel, flipped) {
            (Relation::Eq, _) => Kind::Equality,
            (Relation::Le, false) => Kind::Slack,
            (Relation::Le, true) => Kind::Surplus,
        });
    }

    let m = rows.len();
    let n_slack = kinds.iter().filter(|k| **k != Kind::Equality).count();
    let n_art = kinds.iter().filter(|k| **k != Kind::Slack).count();
    let ncols = n + n_slack + n_art;

    let mut t = Tableau {
        rows: vec![vec![0.0; ncols + 1]; m],
        cost: vec![0.0; ncols + 1],
        basis: vec![0; m],
        banned: vec![false; ncols],
        ncols,
    };
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    for (i, r) in rows.iter().enumerate() {
        t.rows[i][..n].copy_from_slice(&r.a);
        t.rows[i][ncols] = r.b;
        match kinds[i] {
            Kind::Slack => {
                t.rows[i][slack_at] = 1.0;
                t.basis[i] = slack_at;
                slack_at += 1;
            }
            Kind::Surplus => {
                t.rows[i][slack_at] = -1.0;
                slack_at += 1;
                t.rows[i][art_at] = 1.0;
                t.basis[i] = art_at;
                art_at += 1;
            }
            Kind::Equality => {
                t.rows[i][art_at] = 1.0;
                t.basis[i] = art_at;
                art_at += 1;
            }
        }
    }

    // Phase 1: drive the artificials to zero.
    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        for j in (n + n_slack)..ncols {
            phase1[j] = 1.0;
        }
        t.set_cost_row(&phase1);
        t.optimize()?;
        let residual = -t.cost[ncols];
        if residual > FEAS_TOL {
            return Err(Error::Infeasible { residual });
        }
        // Pivot remaining artificials out of the basis where possible.
        for i in 0..m {
            if t.basis[i] >= n + n_slack {
                if let Some(col) =
                    (0..n + n_slack).find(|&j| t.rows[i][j].abs() > PIVOT_TOL)
                {
                    t.pivot(i, col);
                }
            }
        }
        for j in (n + n_slack)..ncols {
            t.banned[j] = true;
        }
    }

    // Phase 2: the real objective.
    t.set_cost_row(&lp.objective);
    t.optimize()?;

    let mut shifted = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            shifted[b] = t.rows[i][ncols];
        }
    }
    let values: Vec<f64> = shifted.iter().zip(&lo).map(|(x, l)| x + l).collect();
    let objective = lp.objective.iter().zip(&values).map(|(c, x)| c * x).sum();
    Ok(LpSolution { values, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(coeffs: Vec<f64>, rhs: f64) -> LpConstraint {
        LpConstraint { coeffs, relation: Relation::Le, rhs }
    }

    #[test]
    fn single_variable_lower_bounded() {
        // min x s.t. x >= 3 (as -x <= -3), x in [0, 10]
        let lp = LpProblem {
            objective: vec![1.0],
            constraints: vec![le(vec![-1.0], -3.0)],
            bounds: vec![(0.0, 10.0)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_maximization_via_negation() {
        // max x + y s.t. x + 2y = 4, x,y in [0, 3]  ==  min -(x+y)
        let lp = LpProblem {
            objective: vec![-1.0, -1.0],
            constraints: vec![LpConstraint {
                coeffs: vec![1.0, 2.0],
                relation: Relation::Eq,
                rhs: 4.0,
            }],
            bounds: vec![(0.0, 3.0), (0.0, 3.0)],
        };
        let sol = solve_lp(&lp).unwrap();
        // x = 3, y = 0.5
        assert!((sol.objective + 3.5).abs() < 1e-9);
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.values[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn infeasible_reported() {
        // x <= 1 and x >= 2 cannot both hold.
        let lp = LpProblem {
            objective: vec![1.0],
            constraints: vec![le(vec![1.0], 1.0), le(vec![-1.0], -2.0)],
            bounds: vec![(0.0, 10.0)],
        };
        match solve_lp(&lp) {
            Err(Error::Infeasible { residual }) => assert!(residual > 0.5),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_reported() {
        // min -x with x unbounded above.
        let lp = LpProblem {
            objective: vec![-1.0],
            constraints: vec![],
            bounds: vec![(0.0, f64::INFINITY)],
        };
        assert!(matches!(solve_lp(&lp), Err(Error::Unbounded { .. })));
    }

    #[test]
    fn nonzero_lower_bounds_shifted_correctly() {
        // min x + y s.t. x + y >= 5, x in [2, 10], y in [1, 10].
        let lp = LpProblem {
            objective: vec![1.0, 1.0],
            constraints: vec![le(vec![-1.0, -1.0], -5.0)],
            bounds: vec![(2.0, 10.0), (1.0, 10.0)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!(sol.values[0] >= 2.0 - 1e-12 && sol.values[1] >= 1.0 - 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let lp = LpProblem {
            objective: vec![1.0, 1.0, 0.3, -0.2],
            constraints: vec![
                le(vec![1.0, 2.0, -1.0, 0.5], 2.0),
                le(vec![-1.0, 1.0, 1.0, -1.0], 1.0),
                LpConstraint {
                    coeffs: vec![1.0, 1.0, 1.0, 1.0],
                    relation: Relation::Eq,
                    rhs: 1.5,
                },
            ],
            bounds: vec![(0.0, 1.0); 4],
        };
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }
}
