//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated with equality constraints only; variables carry a
//! lower bound (default 0) and an optional upper bound. Upper bounds are
//! turned into equality rows with slack columns before solving.

use crate::error::{Error, Result};
use crate::linalg::IncrementalQr;

/// Entries of magnitude at most this are treated as zero when pivoting.
pub const PIVOT_TOL: f64 = 1e-10;
/// Feasibility residual tolerated after refinement.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub sense: Sense,
    pub eq_matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Option<Vec<f64>>,
}

impl LinearProgram {
    /// `sense c·x` subject to `A x = b`, `x ≥ 0`.
    pub fn new(objective: Vec<f64>, sense: Sense, eq_matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        let lp = LinearProgram {
            lower: vec![0.0; n],
            objective,
            sense,
            eq_matrix,
            rhs,
            upper: None,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Option<Vec<f64>>) -> Result<Self> {
        self.lower = lower;
        self.upper = upper;
        self.validate()?;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let m = self.eq_matrix.len();
        if n == 0 || m == 0 {
            return Err(Error::WrongShape("LP needs at least one variable and one constraint".into()));
        }
        if self.rhs.len() != m {
            return Err(Error::WrongShape(format!("rhs has {} entries, expected {m}", self.rhs.len())));
        }
        if self.eq_matrix.iter().any(|row| row.len() != n) {
            return Err(Error::WrongShape("constraint row length mismatch".into()));
        }
        if self.lower.len() != n || self.upper.as_ref().is_some_and(|u| u.len() != n) {
            return Err(Error::WrongShape("bound vector length mismatch".into()));
        }
        let finite = self.objective.iter().all(|x| x.is_finite())
            && self.rhs.iter().all(|x| x.is_finite())
            && self.lower.iter().all(|x| x.is_finite())
            && self.eq_matrix.iter().flatten().all(|x| x.is_finite());
        if !finite || self.upper.as_ref().is_some_and(|u| u.iter().any(|x| x.is_nan())) {
            return Err(Error::InvalidInput("LP data contains NaN or infinite values".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub point: Vec<f64>,
    /// Indices of original variables that are basic at the returned vertex.
    pub basis: Vec<usize>,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        LpSolution {
            status,
            value: f64::NAN,
            point: Vec::new(),
            basis: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>, // each row: coefficients then rhs
    basis: Vec<usize>,
    cols: usize, // number of variable columns
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs `c_j - c_B B^{-1} A_j` for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(&row[..self.cols]) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Runs Bland's rule on `cost` (minimization). Columns with `allowed[j] == false`
    /// never enter. Returns `false` if the problem is unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        let max_pivots = 50_000 + 100 * (self.cols + self.rows.len());
        let scale = cost.iter().fold(1.0f64, |s, c| s.max(c.abs()));
        for _ in 0..max_pivots {
            let d = self.reduced_costs(cost);
            let entering = (0..self.cols).find(|&j| allowed[j] && d[j] < -PIVOT_TOL * scale);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= 1e-12 * lratio.abs().max(1.0);
                            if ratio < lratio && !tie || tie && self.basis[r] < self.basis[lr] {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::NumericalFailure("simplex pivot limit reached".into()))
    }
}

/// Solves a linear program and returns an optimal basic solution, or an
/// infeasible/unbounded status.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n_orig = lp.num_vars();

    // Shift lower bounds to zero and append upper-bound rows with slacks.
    let mut a: Vec<Vec<f64>> = lp.eq_matrix.clone();
    let mut b: Vec<f64> = lp
        .eq_matrix
        .iter()
        .zip(&lp.rhs)
        .map(|(row, &bi)| bi - row.iter().zip(&lp.lower).map(|(x, l)| x * l).sum::<f64>())
        .collect();
    let mut n = n_orig;
    if let Some(upper) = &lp.upper {
        let bounded: Vec<usize> = (0..n_orig).filter(|&j| upper[j].is_finite()).collect();
        let extra = bounded.len();
        for row in a.iter_mut() {
            row.resize(n_orig + extra, 0.0);
        }
        for (k, &j) in bounded.iter().enumerate() {
            let span = upper[j] - lp.lower[j];
            if span < -FEASIBILITY_TOL {
                return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
            }
            let mut row = vec![0.0; n_orig + extra];
            row[j] = 1.0;
            row[n_orig + k] = 1.0;
            a.push(row);
            b.push(span.max(0.0));
        }
        n += extra;
    }
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; n];
    for j in 0..n_orig {
        cost[j] = sign * lp.objective[j];
    }

    // Rank-revealing removal of redundant rows.
    let scale_b = b.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    let mut qr = IncrementalQr::new(n, 1e-9);
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..a.len() {
        if qr.push(&a[i]) {
            kept.push(i);
        } else {
            let (coef, _) = qr.solve(&a[i]);
            let implied: f64 = coef.iter().zip(&kept).map(|(c, &k)| c * b[k]).sum();
            if (implied - b[i]).abs() > 1e-7 * scale_b {
                return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
            }
        }
    }
    let a: Vec<Vec<f64>> = kept.iter().map(|&i| a[i].clone()).collect();
    let b: Vec<f64> = kept.iter().map(|&i| b[i]).collect();
    let m = a.len();

    // Phase 1 tableau with one artificial per row.
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for j in 0..n {
            row[j] = flip * a[i][j];
        }
        row[n + i] = 1.0;
        row[cols] = flip * b[i];
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cols,
    };
    let mut phase1_cost = vec![0.0; cols];
    for c in phase1_cost.iter_mut().skip(n) {
        *c = 1.0;
    }
    let all = vec![true; cols];
    tab.optimize(&phase1_cost, &all)?;
    let infeasibility: f64 = (0..m).filter(|&r| tab.basis[r] >= n).map(|r| tab.rhs(r)).sum();
    if infeasibility > 1e-9 * scale_b.max(1.0) {
        return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
    }

    // Drive artificials out of the basis.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            let col = (0..n).find(|&j| tab.rows[r][j].abs() > PIVOT_TOL);
            match col {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2.
    let mut cost2 = cost.clone();
    cost2.resize(cols, 0.0);
    let allowed: Vec<bool> = (0..cols).map(|j| j < n).collect();
    if !tab.optimize(&cost2, &allowed)? {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded));
    }

    // Refine basic values by solving B x_B = b on the original data.
    let basis: Vec<usize> = tab.basis.clone();
    let kept_rows: Vec<usize> = (0..a.len()).collect();
    let mut x = vec![0.0; n];
    match solve_basis(&a, &b, &basis, &kept_rows) {
        Some(xb) => {
            for (k, &j) in basis.iter().enumerate() {
                x[j] = xb[k];
            }
        }
        None => {
            for (r, &j) in basis.iter().enumerate() {
                x[j] = tab.rhs(r);
            }
        }
    }
    for v in x.iter_mut() {
        if *v < 0.0 && *v > -1e-9 {
            *v = 0.0;
        }
    }
    let resid = a
        .iter()
        .zip(&b)
        .map(|(row, &bi)| (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    if resid > FEASIBILITY_TOL || x.iter().any(|&v| v < -FEASIBILITY_TOL) {
        return Err(Error::NumericalFailure(format!("feasibility residual {resid:.3e}")));
    }

    let point: Vec<f64> = (0..n_orig).map(|j| x[j] + lp.lower[j]).collect();
    let value = lp.objective.iter().zip(&point).map(|(c, v)| c * v).sum();
    let mut orig_basis: Vec<usize> = basis.into_iter().filter(|&j| j < n_orig).collect();
    orig_basis.sort_unstable();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value,
        point,
        basis: orig_basis,
    })
}

/// Solves the square system formed by the basis columns.
fn solve_basis(a: &[Vec<f64>], b: &[f64], basis: &[usize], rows: &[usize]) -> Option<Vec<f64>> {
    if basis.len() != rows.len() {
        return None;
    }
    let mat: Vec<Vec<f64>> = rows.iter().map(|&i| basis.iter().map(|&j| a[i][j]).collect()).collect();
    let rhs: Vec<f64> = rows.iter().map(|&i| b[i]).collect();
    crate::linalg::solve(mat, &rhs, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;

    #[test]
    fn max_single_variable() {
        let lp = LinearProgram::new(vec![1.0, 0.0], Sense::Maximize, vec![vec![1.0, 1.0]], vec![1.0]).unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!((sol.point[0] - 1.0).abs() < 1e-12 && sol.point[1].abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::new(vec![1.0, 1.0], Sense::Minimize, vec![vec![1.0, 1.0]], vec![-1.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let lp = LinearProgram::new(vec![1.0, 0.0], Sense::Maximize, vec![vec![1.0, -1.0]], vec![0.0]).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn inconsistent_redundant_rows_are_infeasible() {
        let lp = LinearProgram::new(
            vec![1.0, 1.0],
            Sense::Minimize,
            vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            vec![1.0, 3.0],
        )
        .unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn consistent_redundant_rows_are_dropped() {
        let lp = LinearProgram::new(
            vec![-1.0, -2.0, 0.0],
            Sense::Minimize,
            vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0], vec![1.0, 0.0, 0.0]],
            vec![1.0, 2.0, 0.25],
        )
        .unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value + 1.75).abs() < 1e-12);
        let cols: Vec<Vec<f64>> = sol
            .basis
            .iter()
            .map(|&j| lp.eq_matrix.iter().map(|r| r[j]).collect())
            .collect();
        assert_eq!(rank(&cols, 1e-9), sol.basis.len());
    }

    #[test]
    fn bounds_are_respected() {
        // max x0 + x1, x0 + x1 + x2 = 3, 0.5 <= x0 <= 1, x1 <= 1
        let lp = LinearProgram::new(vec![1.0, 1.0, 0.0], Sense::Maximize, vec![vec![1.0, 1.0, 1.0]], vec![3.0])
            .unwrap()
            .with_bounds(vec![0.5, 0.0, 0.0], Some(vec![1.0, 1.0, f64::INFINITY]))
            .unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-12);
        assert!((sol.point[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example for the largest-coefficient rule.
        let a = vec![
            vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let lp = LinearProgram::new(
            vec![-10.0, 57.0, 9.0, 24.0, 0.0, 0.0, 0.0],
            Sense::Minimize,
            a,
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.is_optimal());
        assert!((sol.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn shape_validation() {
        assert!(LinearProgram::new(vec![1.0], Sense::Minimize, vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(LinearProgram::new(vec![f64::NAN], Sense::Minimize, vec![vec![1.0]], vec![1.0]).is_err());
    }
}
