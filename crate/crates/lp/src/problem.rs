use num_traits::Zero;

use crate::{LpError, Rational};

/// A single linear row `coeffs · x (= or ≤) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (p, q)| acc + p * q)
}

/// `maximize objective · x` subject to equalities, `≤` inequalities and
/// optional bounds. Variables without bounds are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    num_vars: usize,
    objective: Vec<Rational>,
    equalities: Vec<Constraint>,
    inequalities: Vec<Constraint>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

impl LpProblem {
    /// Feasibility problem (zero objective) over `num_vars` free variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            equalities: Vec::new(),
            inequalities: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    fn check_len(&self, len: usize) -> Result<(), LpError> {
        if len == self.num_vars {
            Ok(())
        } else {
            Err(LpError::DimensionMismatch {
                expected: self.num_vars,
                found: len,
            })
        }
    }

    fn check_var(&self, index: usize) -> Result<(), LpError> {
        if index < self.num_vars {
            Ok(())
        } else {
            Err(LpError::VariableOutOfRange {
                index,
                num_vars: self.num_vars,
            })
        }
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> Result<&mut Self, LpError> {
        self.check_len(objective.len())?;
        self.objective = objective;
        Ok(self)
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<&mut Self, LpError> {
        self.check_len(coeffs.len())?;
        self.equalities.push(Constraint { coeffs, rhs });
        Ok(self)
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<&mut Self, LpError> {
        self.check_len(coeffs.len())?;
        self.inequalities.push(Constraint { coeffs, rhs });
        Ok(self)
    }

    /// `coeffs · x ≥ rhs`, stored as `-coeffs · x ≤ -rhs`.
    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<&mut Self, LpError> {
        let negated = coeffs.into_iter().map(|c| -c).collect();
        self.add_le(negated, -rhs)
    }

    pub fn set_lower(&mut self, var: usize, bound: Rational) -> Result<&mut Self, LpError> {
        self.check_var(var)?;
        self.lower[var] = Some(bound);
        Ok(self)
    }

    pub fn set_upper(&mut self, var: usize, bound: Rational) -> Result<&mut Self, LpError> {
        self.check_var(var)?;
        self.upper[var] = Some(bound);
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.inequalities
    }

    pub fn lower_bounds(&self) -> &[Option<Rational>] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[Option<Rational>] {
        &self.upper
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Exact feasibility test of a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        self.equalities.iter().all(|c| c.eval(x) == c.rhs)
            && self.inequalities.iter().all(|c| c.eval(x) <= c.rhs)
            && self
                .lower
                .iter()
                .zip(x)
                .all(|(l, v)| l.as_ref().is_none_or(|l| v >= l))
            && self
                .upper
                .iter()
                .zip(x)
                .all(|(u, v)| u.as_ref().is_none_or(|u| v <= u))
    }
}
