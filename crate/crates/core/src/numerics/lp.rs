//! Dense two-phase simplex for the tiny linear programs that show up in
//! membership, support and fiber computations.
//!
//! Problems are stated as `maximize cᵀx` subject to equality and `≤` rows,
//! with every variable nonnegative unless flagged free. Pivoting uses
//! Dantzig's rule with lowest-index ties and falls back to Bland's rule
//! after a run of degenerate pivots. Ratio-test ties go to the largest pivot
//! element, or to the lowest basic variable index under Bland's rule. The solver is deterministic: identical inputs give
//! bit-identical outputs.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;
const DEGENERATE_STREAK: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    n_vars: usize,
    objective: Vec<f64>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    le_rows: Vec<(Vec<f64>, f64)>,
    free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl LpProblem {
    /// A feasibility problem over `n_vars` nonnegative variables.
    pub fn new(n_vars: usize) -> Self {
        LpProblem {
            n_vars,
            objective: vec![0.0; n_vars],
            eq_rows: Vec::new(),
            le_rows: Vec::new(),
            free: vec![false; n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Result<Self> {
        self.check_len(c.len())?;
        self.objective = c;
        Ok(self)
    }

    pub fn set_objective(&mut self, c: Vec<f64>) -> Result<()> {
        self.check_len(c.len())?;
        self.objective = c;
        Ok(())
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        self.check_len(row.len())?;
        self.eq_rows.push((row, rhs));
        Ok(())
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        self.check_len(row.len())?;
        self.le_rows.push((row, rhs));
        Ok(())
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_vars {
            return Err(Error::dims(self.n_vars, len));
        }
        Ok(())
    }

    /// Maximum violation of the constraints at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.eq_rows {
            let lhs: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            worst = worst.max((lhs - rhs).abs());
        }
        for (row, rhs) in &self.le_rows {
            let lhs: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            worst = worst.max(lhs - rhs);
        }
        for (j, &xj) in x.iter().enumerate() {
            if !self.free[j] {
                worst = worst.max(-xj);
            }
        }
        worst
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let mut tab = Tableau::build(self);
        if !tab.phase_one()? {
            return Ok(LpOutcome::Infeasible);
        }
        if !tab.phase_two(self)? {
            return Ok(LpOutcome::Unbounded);
        }
        let std_x = tab.primal();
        let mut x = vec![0.0; self.n_vars];
        for (j, xj) in x.iter_mut().enumerate() {
            let (pos, neg) = tab.var_cols[j];
            *xj = std_x[pos] - neg.map_or(0.0, |c| std_x[c]);
        }
        let scale = self
            .le_rows
            .iter()
            .chain(&self.eq_rows)
            .map(|(_, b)| b.abs())
            .fold(1.0, f64::max);
        let violation = self.violation(&x);
        if violation > FEAS_TOL * scale {
            return Err(Error::Numerical(format!("simplex solution violates constraints by {violation:e}")));
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal(LpSolution { value, x }))
    }
}

/// `maximize c·x` subject to `x ∈ R^n` free and `A x ≤ b`, with `A` given
/// row-major as `n`-vectors.
pub fn maximize_over_halfspaces(
    c: &[f64],
    normals: &[f64],
    offsets: &[f64],
) -> Result<LpOutcome> {
    let n = c.len();
    let mut lp = LpProblem::new(n).maximize(c.to_vec())?;
    for j in 0..n {
        lp.set_free(j);
    }
    for (row, &b) in normals.chunks_exact(n).zip(offsets) {
        lp.add_le(row.to_vec(), b)?;
    }
    lp.solve()
}

struct Tableau {
    m: usize,
    /// Columns: structural, slack, artificial, then rhs.
    width: usize,
    n_struct: usize,
    n_art: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    obj_value: f64,
    basis: Vec<usize>,
    /// Column(s) of each original variable: (positive part, negative part).
    var_cols: Vec<(usize, Option<usize>)>,
    cost: Vec<f64>,
}

impl Tableau {
    fn build(p: &LpProblem) -> Tableau {
        let mut var_cols = Vec::with_capacity(p.n_vars);
        let mut next = 0;
        for j in 0..p.n_vars {
            if p.free[j] {
                var_cols.push((next, Some(next + 1)));
                next += 2;
            } else {
                var_cols.push((next, None));
                next += 1;
            }
        }
        let n_split = next;
        let n_slack = p.le_rows.len();
        let n_struct = n_split + n_slack;
        let m = p.eq_rows.len() + p.le_rows.len();
        let n_art = m;
        let width = n_struct + n_art + 1;
        let mut t = vec![0.0; m * width];
        let rows = p.eq_rows.iter().map(|r| (r, None)).chain(
            p.le_rows.iter().enumerate().map(|(i, r)| (r, Some(n_split + i))),
        );
        for (i, ((coeffs, rhs), slack)) in rows.enumerate() {
            let row = &mut t[i * width..(i + 1) * width];
            for (j, &a) in coeffs.iter().enumerate() {
                let (pos, neg) = var_cols[j];
                row[pos] = a;
                if let Some(neg) = neg {
                    row[neg] = -a;
                }
            }
            if let Some(s) = slack {
                row[s] = 1.0;
            }
            row[width - 1] = *rhs;
            if *rhs < 0.0 {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
            row[n_struct + i] = 1.0;
        }
        let mut cost = vec![0.0; n_struct];
        for (j, &c) in p.objective.iter().enumerate() {
            let (pos, neg) = var_cols[j];
            cost[pos] = c;
            if let Some(neg) = neg {
                cost[neg] = -c;
            }
        }
        Tableau {
            m,
            width,
            n_struct,
            n_art,
            t,
            obj: vec![0.0; width - 1],
            obj_value: 0.0,
            basis: (0..m).map(|i| n_struct + i).collect(),
            var_cols,
            cost,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..w - 1 {
                self.obj[j] -= f * prow[j];
            }
            self.obj[c] = 0.0;
            self.obj_value += f * prow[w - 1];
        }
        self.basis[r] = c;
    }

    /// Run simplex iterations over columns `< limit`. Returns false if unbounded.
    fn iterate(&mut self, limit: usize) -> Result<bool> {
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_PIVOTS {
            let use_bland = degenerate_run >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = COST_TOL;
            for j in 0..limit {
                let d = self.obj[j];
                if d > best {
                    enter = Some(j);
                    if use_bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = enter else { return Ok(true) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            let better_tie = if use_bland {
                                self.basis[i] < self.basis[li]
                            } else {
                                let al = self.at(li, c);
                                a > al || a == al && self.basis[i] < self.basis[li]
                            };
                            if ratio < lr && !tie || tie && better_tie {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else { return Ok(false) };
            if ratio <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }

    fn phase_one(&mut self) -> Result<bool> {
        // maximize −Σ artificials
        for j in 0..self.n_struct {
            self.obj[j] = (0..self.m).map(|i| self.at(i, j)).sum();
        }
        self.obj_value = -(0..self.m).map(|i| self.rhs(i)).sum::<f64>();
        self.iterate(self.n_struct)?;
        let scale = (0..self.m).map(|i| self.rhs(i).abs()).fold(1.0, f64::max);
        if self.obj_value < -FEAS_TOL * scale {
            return Ok(false);
        }
        // Drive remaining artificials out of the basis where possible.
        for r in 0..self.m {
            if self.basis[r] >= self.n_struct {
                let col = (0..self.n_struct)
                    .filter(|&j| self.at(r, j).abs() > 1e-9)
                    .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()));
                if let Some(c) = col {
                    self.pivot(r, c);
                }
            }
        }
        Ok(true)
    }

    fn phase_two(&mut self, _p: &LpProblem) -> Result<bool> {
        let mut obj = vec![0.0; self.width - 1];
        obj[..self.n_struct].copy_from_slice(&self.cost);
        let mut value = 0.0;
        for i in 0..self.m {
            let b = self.basis[i];
            let cb = if b < self.n_struct { self.cost[b] } else { 0.0 };
            if cb != 0.0 {
                for (j, o) in obj.iter_mut().enumerate() {
                    *o -= cb * self.at(i, j);
                }
                value += cb * self.rhs(i);
            }
        }
        for j in self.n_struct..self.n_struct + self.n_art {
            obj[j] = 0.0;
        }
        self.obj = obj;
        self.obj_value = value;
        self.iterate(self.n_struct)
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_membership(px: f64, py: f64) -> LpOutcome {
        let verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let mut lp = LpProblem::new(3);
        lp.add_eq(verts.iter().map(|v| v.0).collect(), px).unwrap();
        lp.add_eq(verts.iter().map(|v| v.1).collect(), py).unwrap();
        lp.add_eq(vec![1.0; 3], 1.0).unwrap();
        lp.solve().unwrap()
    }

    #[test]
    fn single_variable_equality() {
        let mut lp = LpProblem::new(1).maximize(vec![1.0]).unwrap();
        lp.add_eq(vec![1.0], 1.0).unwrap();
        let sol = lp.solve().unwrap().optimal().unwrap();
        assert_eq!(sol.value, 1.0);
    }

    #[test]
    fn hull_membership_by_feasibility() {
        assert!(triangle_membership(0.5, 0.5).is_feasible());
        assert_eq!(triangle_membership(0.6, 0.6), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_is_reported() {
        let mut lp = LpProblem::new(2).maximize(vec![1.0, 0.0]).unwrap();
        lp.add_le(vec![-1.0, 1.0], 1.0).unwrap();
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // max -x s.t. x ≥ -3 written as -x ≤ 3, x free → x = -3
        let mut lp = LpProblem::new(1).maximize(vec![-1.0]).unwrap();
        lp.set_free(0);
        lp.add_le(vec![-1.0], 3.0).unwrap();
        let sol = lp.solve().unwrap().optimal().unwrap();
        assert!((sol.x[0] + 3.0).abs() < 1e-12);
        assert!((sol.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_box_support() {
        // max x+y+z over the unit cube: heavily degenerate at the origin.
        let normals = [
            1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0,
            -1.0,
        ];
        let offsets = [1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let sol = maximize_over_halfspaces(&[1.0, 1.0, 1.0], &normals, &offsets)
            .unwrap()
            .optimal()
            .unwrap();
        assert!((sol.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LpProblem::new(2).maximize(vec![1.0, 2.0]).unwrap();
        lp.add_eq(vec![1.0, 1.0], 1.0).unwrap();
        lp.add_eq(vec![2.0, 2.0], 2.0).unwrap();
        let sol = lp.solve().unwrap().optimal().unwrap();
        assert!((sol.value - 2.0).abs() < 1e-12);
        assert!(lp.violation(&sol.x) < 1e-12);
    }
}
