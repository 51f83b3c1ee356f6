use num_traits::{Signed, Zero};

use crate::problem::dot;
use crate::{LpProblem, Rational};

/// One multiplier per row of an [`LpProblem`], including bound rows.
///
/// Aggregating the rows with these weights gives the linear inequality
/// `combination(problem) · x ≤ bound(problem)`, valid for every feasible `x`
/// provided the sign conditions in [`Multipliers::signs_valid`] hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    /// Free sign.
    pub eq: Vec<Rational>,
    /// Nonnegative.
    pub ineq: Vec<Rational>,
    /// Nonnegative; zero where the variable has no lower bound.
    pub lower: Vec<Rational>,
    /// Nonnegative; zero where the variable has no upper bound.
    pub upper: Vec<Rational>,
}

impl Multipliers {
    pub fn signs_valid(&self, problem: &LpProblem) -> bool {
        let n = problem.num_vars();
        if self.eq.len() != problem.equalities().len()
            || self.ineq.len() != problem.inequalities().len()
            || self.lower.len() != n
            || self.upper.len() != n
        {
            return false;
        }
        let bound_ok = |mults: &[Rational], bounds: &[Option<Rational>]| {
            mults.iter().zip(bounds).all(|(y, b)| match b {
                Some(_) => !y.is_negative(),
                None => y.is_zero(),
            })
        };
        self.ineq.iter().all(|y| !y.is_negative())
            && bound_ok(&self.lower, problem.lower_bounds())
            && bound_ok(&self.upper, problem.upper_bounds())
    }

    /// `Σ y_eq·E + Σ y_ineq·A − y_lower + y_upper`, one entry per variable.
    pub fn combination(&self, problem: &LpProblem) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); problem.num_vars()];
        let rows = problem
            .equalities()
            .iter()
            .zip(&self.eq)
            .chain(problem.inequalities().iter().zip(&self.ineq));
        for (row, y) in rows {
            if y.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&row.coeffs) {
                *o += y * c;
            }
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o -= &self.lower[j];
            *o += &self.upper[j];
        }
        out
    }

    /// `Σ y_eq·e + Σ y_ineq·b − y_lower·l + y_upper·u`.
    pub fn bound(&self, problem: &LpProblem) -> Rational {
        let rhs = |rows: &[crate::Constraint], ys: &[Rational]| {
            rows.iter()
                .zip(ys)
                .fold(Rational::zero(), |acc, (r, y)| acc + y * &r.rhs)
        };
        let mut total = rhs(problem.equalities(), &self.eq) + rhs(problem.inequalities(), &self.ineq);
        for (y, l) in self.lower.iter().zip(problem.lower_bounds()) {
            if let Some(l) = l {
                total -= y * l;
            }
        }
        for (y, u) in self.upper.iter().zip(problem.upper_bounds()) {
            if let Some(u) = u {
                total += y * u;
            }
        }
        total
    }

    /// Checks that these multipliers prove `x` optimal: `x` is feasible, the
    /// aggregated row equals the objective and its bound equals `c · x`.
    pub fn proves_optimal(&self, problem: &LpProblem, x: &[Rational]) -> bool {
        problem.is_feasible(x)
            && self.signs_valid(problem)
            && self.combination(problem) == problem.objective()
            && self.bound(problem) == problem.objective_value(x)
    }
}

/// Nonnegative row aggregation yielding `0 · x ≤ negative`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Multipliers,
}

impl FarkasCertificate {
    pub fn verify(&self, problem: &LpProblem) -> bool {
        let y = &self.multipliers;
        y.signs_valid(problem)
            && y.combination(problem).iter().all(Zero::is_zero)
            && y.bound(problem).is_negative()
    }
}

/// A feasible point together with a recession direction that strictly
/// improves the objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedRay {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

impl UnboundedRay {
    pub fn verify(&self, problem: &LpProblem) -> bool {
        let d = &self.direction;
        if d.len() != problem.num_vars() || !problem.is_feasible(&self.point) {
            return false;
        }
        problem.equalities().iter().all(|c| dot(&c.coeffs, d).is_zero())
            && problem
                .inequalities()
                .iter()
                .all(|c| !dot(&c.coeffs, d).is_positive())
            && problem
                .lower_bounds()
                .iter()
                .zip(d)
                .all(|(l, v)| l.is_none() || !v.is_negative())
            && problem
                .upper_bounds()
                .iter()
                .zip(d)
                .all(|(u, v)| u.is_none() || !v.is_positive())
            && problem.objective_value(d).is_positive()
    }
}
