//! Two-phase dense tableau simplex with Bland's rule.
//!
//! The tableau keeps an identity block of `m` auxiliary columns next to the
//! standard-form columns. Those columns start as the identity and therefore
//! always hold the current basis inverse, from which dual multipliers and
//! Farkas certificates are read.

use num_traits::{One, Signed, Zero};

use crate::{FarkasCertificate, LpOutcome, LpProblem, Multipliers, OptimalSolution, Rational, UnboundedRay};

#[derive(Debug, Clone, Copy)]
enum Column {
    /// `x_j - l_j` for a variable with a lower bound.
    Shifted(usize),
    /// Positive part of a free variable.
    Plus(usize),
    /// Negative part of a free variable.
    Minus(usize),
    Slack,
}

#[derive(Debug, Clone, Copy)]
enum Row {
    Eq(usize),
    Ineq(usize),
    Upper(usize),
}

struct StandardForm {
    columns: Vec<Column>,
    rows: Vec<Row>,
    /// Row-major, before sign normalisation.
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Row index of each row's slack column, if any.
    slack_of_row: Vec<Option<usize>>,
    cost: Vec<Rational>,
}

impl StandardForm {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let mut columns = Vec::new();
        // var_cols[j] = (column, sign) pairs
        let mut var_cols: Vec<Vec<(usize, bool)>> = Vec::with_capacity(n);
        for j in 0..n {
            if p.lower_bounds()[j].is_some() {
                var_cols.push(vec![(columns.len(), true)]);
                columns.push(Column::Shifted(j));
            } else {
                var_cols.push(vec![(columns.len(), true), (columns.len() + 1, false)]);
                columns.push(Column::Plus(j));
                columns.push(Column::Minus(j));
            }
        }
        let structural = columns.len();
        let num_upper = p.upper_bounds().iter().filter(|u| u.is_some()).count();
        let num_slacks = p.inequalities().len() + num_upper;
        columns.extend(std::iter::repeat_n(Column::Slack, num_slacks));
        let width = columns.len();

        let lower = |j: usize| p.lower_bounds()[j].clone().unwrap_or_else(Rational::zero);

        let mut rows = Vec::new();
        let mut matrix = Vec::new();
        let mut rhs = Vec::new();
        let mut slack_of_row = Vec::new();
        let mut next_slack = structural;

        let expand = |coeffs: &[Rational], rhs_value: &Rational| {
            let mut row = vec![Rational::zero(); width];
            let mut b = rhs_value.clone();
            for (j, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &(col, positive) in &var_cols[j] {
                    row[col] = if positive { c.clone() } else { -c };
                }
                b -= c * lower(j);
            }
            (row, b)
        };

        for (i, c) in p.equalities().iter().enumerate() {
            let (row, b) = expand(&c.coeffs, &c.rhs);
            rows.push(Row::Eq(i));
            matrix.push(row);
            rhs.push(b);
            slack_of_row.push(None);
        }
        for (k, c) in p.inequalities().iter().enumerate() {
            let (mut row, b) = expand(&c.coeffs, &c.rhs);
            row[next_slack] = Rational::one();
            rows.push(Row::Ineq(k));
            matrix.push(row);
            rhs.push(b);
            slack_of_row.push(Some(next_slack));
            next_slack += 1;
        }
        for (j, u) in p.upper_bounds().iter().enumerate() {
            let Some(u) = u else { continue };
            let mut unit = vec![Rational::zero(); n];
            unit[j] = Rational::one();
            let (mut row, b) = expand(&unit, u);
            row[next_slack] = Rational::one();
            rows.push(Row::Upper(j));
            matrix.push(row);
            rhs.push(b);
            slack_of_row.push(Some(next_slack));
            next_slack += 1;
        }

        let cost = columns
            .iter()
            .map(|col| match *col {
                Column::Shifted(j) | Column::Plus(j) => p.objective()[j].clone(),
                Column::Minus(j) => -p.objective()[j].clone(),
                Column::Slack => Rational::zero(),
            })
            .collect();

        Self {
            columns,
            rows,
            matrix,
            rhs,
            slack_of_row,
            cost,
        }
    }
}

struct Tableau {
    /// `m × (n + m)`; the trailing block is the basis inverse.
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    n: usize,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.t[r][c];
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.t[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let factor = self.t[i][c].clone();
            for (v, p) in self.t[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = c;
        self.is_basic[c] = true;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut rc = cost[j].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.t[r][j].is_zero() {
                rc -= &cost[b] * &self.t[r][j];
            }
        }
        rc
    }

    /// Runs Bland's rule to optimality. Only the first `n` columns may enter.
    fn run(&mut self, cost: &[Rational]) -> Step {
        loop {
            let entering = (0..self.n).find(|&j| !self.is_basic[j] && self.reduced_cost(cost, j).is_positive());
            let Some(j) = entering else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return Step::Unbounded(j),
            }
        }
    }

    /// `c_Bᵀ B⁻¹`.
    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let m = self.t.len();
        (0..m)
            .map(|i| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| !cost[b].is_zero())
                    .fold(Rational::zero(), |acc, (r, &b)| acc + &cost[b] * &self.t[r][self.n + i])
            })
            .collect()
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }
}

fn map_primal(p: &LpProblem, sf: &StandardForm, x_std: &[Rational], shift: bool) -> Vec<Rational> {
    let mut x: Vec<Rational> = (0..p.num_vars())
        .map(|j| match (&p.lower_bounds()[j], shift) {
            (Some(l), true) => l.clone(),
            _ => Rational::zero(),
        })
        .collect();
    for (col, v) in sf.columns.iter().zip(x_std) {
        match *col {
            Column::Shifted(j) | Column::Plus(j) => x[j] += v,
            Column::Minus(j) => x[j] -= v,
            Column::Slack => {}
        }
    }
    x
}

/// Converts row multipliers of the standard form (already un-flipped) into
/// multipliers of the original rows, given the objective they certify.
fn map_multipliers(p: &LpProblem, sf: &StandardForm, w: &[Rational], objective: &[Rational]) -> Multipliers {
    let n = p.num_vars();
    let mut eq = vec![Rational::zero(); p.equalities().len()];
    let mut ineq = vec![Rational::zero(); p.inequalities().len()];
    let mut upper = vec![Rational::zero(); n];
    for (row, y) in sf.rows.iter().zip(w) {
        match *row {
            Row::Eq(i) => eq[i] = y.clone(),
            Row::Ineq(k) => ineq[k] = y.clone(),
            Row::Upper(j) => upper[j] = y.clone(),
        }
    }
    let partial = Multipliers {
        eq,
        ineq,
        lower: vec![Rational::zero(); n],
        upper,
    };
    let g = partial.combination(p);
    let lower = (0..n)
        .map(|j| match p.lower_bounds()[j] {
            Some(_) => &g[j] - &objective[j],
            None => Rational::zero(),
        })
        .collect();
    Multipliers { lower, ..partial }
}

/// Solves `p` exactly. Identical problems always yield identical outcomes.
pub fn solve(p: &LpProblem) -> LpOutcome {
    let sf = StandardForm::build(p);
    let m = sf.rows.len();
    let n = sf.columns.len();

    let mut sign = Vec::with_capacity(m);
    let mut t = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (r, row) in sf.matrix.iter().enumerate() {
        let flip = sf.rhs[r].is_negative();
        sign.push(flip);
        let mut full: Vec<Rational> = if flip { row.iter().map(|v| -v).collect() } else { row.clone() };
        full.extend((0..m).map(|i| if i == r { Rational::one() } else { Rational::zero() }));
        t.push(full);
        rhs.push(if flip { -sf.rhs[r].clone() } else { sf.rhs[r].clone() });
    }

    let mut basis = Vec::with_capacity(m);
    let mut is_basic = vec![false; n + m];
    let mut phase1_cost = vec![Rational::zero(); n + m];
    for r in 0..m {
        let b = match sf.slack_of_row[r] {
            Some(s) if !sign[r] => s,
            _ => {
                phase1_cost[n + r] = -Rational::one();
                n + r
            }
        };
        basis.push(b);
        is_basic[b] = true;
    }
    let mut tab = Tableau { t, rhs, basis, is_basic, n };
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter().zip(&sign).map(|(v, &f)| if f { -v } else { v }).collect()
    };

    if phase1_cost.iter().any(|c| !c.is_zero()) {
        // Phase one is bounded above by zero, so it always terminates optimal.
        let _ = tab.run(&phase1_cost);
        let infeasibility: Rational = tab
            .basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (r, &b)| acc + &phase1_cost[b] * &tab.rhs[r]);
        if infeasibility.is_negative() {
            let w = unflip(tab.duals(&phase1_cost));
            let zero = vec![Rational::zero(); p.num_vars()];
            return LpOutcome::Infeasible(FarkasCertificate {
                multipliers: map_multipliers(p, &sf, &w, &zero),
            });
        }
        // Drive remaining (zero-valued) auxiliary columns out of the basis.
        for r in 0..m {
            if tab.basis[r] >= n {
                if let Some(j) = (0..n).find(|&j| !tab.is_basic[j] && !tab.t[r][j].is_zero()) {
                    tab.pivot(r, j);
                }
            }
        }
    }

    let mut cost = sf.cost.clone();
    cost.extend(std::iter::repeat_n(Rational::zero(), m));
    match tab.run(&cost) {
        Step::Optimal => {
            let x = map_primal(p, &sf, &tab.primal(), true);
            let objective = p.objective_value(&x);
            let w = unflip(tab.duals(&cost));
            LpOutcome::Optimal(OptimalSolution {
                duals: map_multipliers(p, &sf, &w, p.objective()),
                x,
                objective,
            })
        }
        Step::Unbounded(j) => {
            let point = map_primal(p, &sf, &tab.primal(), true);
            let mut d_std = vec![Rational::zero(); n];
            d_std[j] = Rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    d_std[b] = -tab.t[r][j].clone();
                }
            }
            let direction = map_primal(p, &sf, &d_std, false);
            LpOutcome::Unbounded(UnboundedRay { point, direction })
        }
    }
}
