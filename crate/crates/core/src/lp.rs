//! Dense two-phase primal simplex with Bland's rule.
//!
//! Works over any [`Scalar`]: pivots are exact in rational mode and use an
//! absolute tolerance in float mode. Intended for desk-scale programs (tens
//! of rows and columns).

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// `maximize objective . x` subject to `constraints`, `x >= 0` and the
/// optional per-variable upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub upper_bounds: Vec<Option<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(variables: usize) -> Self {
        LinearProgram {
            objective: vec![S::zero(); variables],
            constraints: Vec::new(),
            upper_bounds: vec![None; variables],
        }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    /// Adds a row given as sparse `(variable, coefficient)` terms.
    pub fn add(&mut self, terms: &[(usize, S)], relation: Relation, rhs: S) {
        let mut coeffs = vec![S::zero(); self.variables()];
        for (var, coeff) in terms {
            coeffs[*var] = coeffs[*var].clone() + coeff.clone();
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub values: Vec<S>,
    pub objective: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("constraint dimensions do not match the variable count")]
    Dimension,
}

struct Tableau<S> {
    rows: usize,
    cols: usize,
    // rows x (cols + 1), right-hand side in the last column
    data: Vec<S>,
    basis: Vec<usize>,
    tol: f64,
}

impl<S: Scalar> Tableau<S> {
    fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> &S {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.cols + 1;
        let pivot = self.at(row, col).clone();
        for c in 0..width {
            let v = self.data[row * width + c].clone() / pivot.clone();
            self.data[row * width + c] = v;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.data[r * width + col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..width {
                let delta = factor.clone() * self.data[row * width + c].clone();
                if delta.is_zero() {
                    continue;
                }
                self.data[r * width + c] = self.data[r * width + c].clone() - delta;
            }
            if !S::EXACT {
                // Keep eliminated entries exactly zero.
                self.data[r * width + col] = S::zero();
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost . x` over the current feasible basis, allowing only
    /// columns where `allowed` is true to enter.
    fn optimize(&mut self, cost: &[S], allowed: &dyn Fn(usize) -> bool) -> Result<(), LpError> {
        loop {
            // Reduced cost d_j = c_B . column_j - c_j; entering when d_j < 0.
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                let d = (0..self.rows).fold(S::zero(), |acc, r| {
                    let a = self.at(r, j);
                    if a.is_zero() {
                        acc
                    } else {
                        acc + cost[self.basis[r]].clone() * a.clone()
                    }
                }) - cost[j].clone();
                d.approx_lt(&S::zero(), self.tol)
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, S)> = None;
            for r in 0..self.rows {
                let a = self.at(r, col);
                if !a.gt_zero() || a.approx_zero(self.tol) {
                    continue;
                }
                let ratio = self.rhs(r).clone() / a.clone();
                let better = match &leaving {
                    None => true,
                    Some((best_row, best)) => {
                        ratio.approx_lt(best, 0.0)
                            || (ratio == *best && self.basis[r] < self.basis[*best_row])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(LpError::Unbounded),
            }
        }
    }
}

/// Solves the program, returning an optimal basic solution.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>, tol: f64) -> Result<LpSolution<S>, LpError> {
    let n = lp.variables();
    let mut rows: Vec<(Vec<S>, Relation, S)> = Vec::new();
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(LpError::Dimension);
        }
        rows.push((c.coeffs.clone(), c.relation, c.rhs.clone()));
    }
    for (var, bound) in lp.upper_bounds.iter().enumerate() {
        if let Some(ub) = bound {
            let mut coeffs = vec![S::zero(); n];
            coeffs[var] = S::one();
            rows.push((coeffs, Relation::Le, ub.clone()));
        }
    }
    // Nonnegative right-hand sides; a `>= 0` row becomes `<= 0` so it needs
    // no artificial variable.
    for (coeffs, relation, rhs) in rows.iter_mut() {
        let flip = rhs.is_negative() || (*relation == Relation::Ge && rhs.is_zero());
        if flip {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
            *rhs = -rhs.clone();
            *relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificial_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_slack = n;
    let first_artificial = n + slack_count;
    let cols = first_artificial + artificial_count;

    let mut tableau = Tableau {
        rows: m,
        cols,
        data: vec![S::zero(); m * (cols + 1)],
        basis: vec![0; m],
        tol,
    };
    let (mut slack, mut artificial) = (first_slack, first_artificial);
    for (r, (coeffs, relation, rhs)) in rows.into_iter().enumerate() {
        let base = r * (cols + 1);
        for (j, c) in coeffs.into_iter().enumerate() {
            tableau.data[base + j] = c;
        }
        tableau.data[base + cols] = rhs;
        match relation {
            Relation::Le => {
                tableau.data[base + slack] = S::one();
                tableau.basis[r] = slack;
                slack += 1;
            }
            Relation::Ge => {
                tableau.data[base + slack] = -S::one();
                slack += 1;
                tableau.data[base + artificial] = S::one();
                tableau.basis[r] = artificial;
                artificial += 1;
            }
            Relation::Eq => {
                tableau.data[base + artificial] = S::one();
                tableau.basis[r] = artificial;
                artificial += 1;
            }
        }
    }

    if artificial_count > 0 {
        let phase_one: Vec<S> = (0..cols)
            .map(|j| {
                if j >= first_artificial {
                    -S::one()
                } else {
                    S::zero()
                }
            })
            .collect();
        tableau.optimize(&phase_one, &|_| true)?;
        let infeasibility = (0..m)
            .filter(|&r| tableau.basis[r] >= first_artificial)
            .fold(S::zero(), |acc, r| acc + tableau.rhs(r).clone());
        if !infeasibility.approx_zero(tol) {
            return Err(LpError::Infeasible);
        }
        // Drive zero-valued artificials out of the basis where possible;
        // rows with no structural entry are redundant and stay inert.
        for r in 0..m {
            if tableau.basis[r] < first_artificial {
                continue;
            }
            if let Some(col) = (0..first_artificial).find(|&j| !tableau.at(r, j).approx_zero(tol)) {
                tableau.pivot(r, col);
            }
        }
    }

    let mut cost = vec![S::zero(); cols];
    cost[..n].clone_from_slice(&lp.objective);
    tableau.optimize(&cost, &|j| j < first_artificial)?;

    let mut values = vec![S::zero(); n];
    for r in 0..m {
        let var = tableau.basis[r];
        if var < n {
            let v = tableau.rhs(r).clone();
            values[var] = if !S::EXACT && v.is_negative() {
                S::zero()
            } else {
                v
            };
        }
    }
    let objective = values
        .iter()
        .zip(&lp.objective)
        .fold(S::zero(), |acc, (x, c)| acc + x.clone() * c.clone());
    Ok(LpSolution { values, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn r(n: i64) -> Rational {
        ratio(n, 1)
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![r(1)];
        lp.add(&[(0, r(1))], Relation::Le, r(3));
        let sol = solve_lp(&lp, 0.0).unwrap();
        assert_eq!(sol.values, vec![r(3)]);
        assert_eq!(sol.objective, r(3));
    }

    #[test]
    fn epigraph_toy() {
        // max 2x - t  s.t.  t >= x, x <= 3
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(2), r(-1)];
        lp.add(&[(1, r(1)), (0, r(-1))], Relation::Ge, r(0));
        lp.add(&[(0, r(1))], Relation::Le, r(3));
        let sol = solve_lp(&lp, 0.0).unwrap();
        assert_eq!(sol.values, vec![r(3), r(3)]);
        assert_eq!(sol.objective, r(3));
    }

    #[test]
    fn zero_objective() {
        let mut lp = LinearProgram::new(2);
        lp.add(&[(0, r(1)), (1, r(1))], Relation::Le, r(4));
        let sol = solve_lp(&lp, 0.0).unwrap();
        assert_eq!(sol.objective, r(0));
        assert_eq!(sol.values, vec![r(0), r(0)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x + y  s.t.  x + 2y = 4, x >= 1, y <= 5  ->  x = 4, y = 0
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(1), r(1)];
        lp.add(&[(0, r(1)), (1, r(2))], Relation::Eq, r(4));
        lp.add(&[(0, r(1))], Relation::Ge, r(1));
        lp.upper_bounds[1] = Some(r(5));
        let sol = solve_lp(&lp, 0.0).unwrap();
        assert_eq!(sol.values, vec![r(4), r(0)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(&[(0, r(1))], Relation::Ge, r(2));
        lp.add(&[(0, r(1))], Relation::Le, r(1));
        assert_eq!(solve_lp(&lp, 0.0), Err(LpError::Infeasible));
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![r(1)];
        lp.add(&[(0, r(1))], Relation::Ge, r(1));
        assert_eq!(solve_lp(&lp, 0.0), Err(LpError::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![r(1), r(0)];
        lp.add(&[(0, r(1)), (1, r(1))], Relation::Eq, r(2));
        lp.add(&[(0, r(2)), (1, r(2))], Relation::Eq, r(4));
        let sol = solve_lp(&lp, 0.0).unwrap();
        assert_eq!(sol.values, vec![r(2), r(0)]);
    }

    #[test]
    fn float_mode_agrees() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![3.0, 2.0];
        lp.add(&[(0, 1.0), (1, 1.0)], Relation::Le, 4.0);
        lp.add(&[(0, 1.0), (1, 3.0)], Relation::Le, 6.0);
        lp.add(&[(0, 1.0)], Relation::Le, 3.0);
        let sol = solve_lp(&lp, 1e-9).unwrap();
        assert!((sol.objective - 11.0).abs() < 1e-9);
    }
}
