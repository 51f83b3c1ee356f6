//! Exact linear programming over arbitrary-precision rationals.
//!
//! Problems are stated naturally (maximize, equalities, `≤` inequalities,
//! optional per-variable bounds) and solved with a two-phase dense tableau
//! simplex using Bland's rule. Every outcome carries a certificate that can
//! be checked independently against the original problem:
//!
//! - [`LpOutcome::Optimal`] carries Lagrange multipliers proving optimality
//!   (strong duality holds with exact equality),
//! - [`LpOutcome::Infeasible`] carries a Farkas certificate,
//! - [`LpOutcome::Unbounded`] carries a feasible point and an improving ray.
//!
//! There are no tolerances anywhere in this crate.

mod certificate;
pub mod linalg;
mod problem;
mod simplex;

pub use certificate::{FarkasCertificate, Multipliers, UnboundedRay};
pub use problem::{Constraint, LpProblem};
pub use simplex::solve;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number used throughout the workspace.
pub type Rational = BigRational;

/// Build a rational from an integer numerator and denominator.
///
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integral rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("row has {found} coefficients but the problem has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible(_) => LpStatus::Infeasible,
            LpOutcome::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// Dual multipliers read off the final basis.
    pub duals: Multipliers,
}
