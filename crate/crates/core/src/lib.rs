//! Large platonic financial markets on finite probability spaces.
//!
//! The crate models markets where trading on each asset subset `A` of an
//! index system sees its own filtration `ℱ^A`, applies information delays
//! and order-execution delays to such markets, and decides absence of free
//! lunch with two exact oracles (a free-lunch strategy or an equivalent
//! martingale measure). Everything is exact rational arithmetic.
//!
//! Module map:
//!
//! - [`prob`]: partitions, filtrations, stopping-time processes, stopped σ-fields
//! - [`market`]: markets, index systems, simple strategies, gain generators
//! - [`delay`]: information and execution delays and the delayed objects
//! - [`arbitrage`]: the two oracles, verdicts and certificate checks
//! - [`scenario`]: structured and random generators, experiment harnesses
//! - [`document`]: the JSON market document

pub mod arbitrage;
pub mod delay;
pub mod document;
pub mod market;
pub mod prob;
mod report;
pub mod scenario;

pub use platonic_lp::{int, rat, Rational};
pub use report::Violation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("state sets differ: expected {expected} states, found {found}")]
    MismatchedStates { expected: usize, found: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("cannot join an empty list of partitions")]
    EmptyJoin,
    #[error("not a stopping time: {0}")]
    NotAStoppingTime(String),
    #[error("zero-mass atom in conditional expectation")]
    ZeroMassAtom,
    #[error("{}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("precondition violated: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: usize, cap: usize },
    #[error("document: {0}")]
    Document(String),
    #[error(transparent)]
    Lp(#[from] platonic_lp::LpError),
}

fn join_violations(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
