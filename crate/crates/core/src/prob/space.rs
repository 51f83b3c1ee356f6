use std::collections::HashSet;

use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result, Violation};

/// Finite state set with a strictly positive reference measure and an
/// integer time grid `0..=n`, extended to `0..=n_ext` for prices after
/// maturity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    names: Vec<String>,
    probability: Vec<Rational>,
    n: usize,
    n_ext: usize,
}

impl FiniteSpace {
    pub fn new(names: Vec<String>, probability: Vec<Rational>, n: usize, n_ext: usize) -> Result<Self> {
        let violations = Self::check(&names, &probability, n, n_ext);
        if violations.is_empty() {
            Ok(Self {
                names,
                probability,
                n,
                n_ext,
            })
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Uniform measure over states named `s0, s1, …`.
    pub fn uniform(num_states: usize, n: usize, n_ext: usize) -> Result<Self> {
        let names = (0..num_states).map(|i| format!("s{i}")).collect();
        let p = Rational::new(1.into(), (num_states.max(1) as i64).into());
        Self::new(names, vec![p; num_states], n, n_ext)
    }

    pub fn check(names: &[String], probability: &[Rational], n: usize, n_ext: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        if names.is_empty() {
            out.push(Violation::new("empty state space", "at least one state is required"));
        }
        if names.len() != probability.len() {
            out.push(Violation::new(
                "shape mismatch",
                format!("{} states but {} probabilities", names.len(), probability.len()),
            ));
        }
        let mut seen = HashSet::new();
        for name in names {
            if !seen.insert(name) {
                out.push(Violation::new("duplicate state", name.clone()));
            }
        }
        for (name, p) in names.iter().zip(probability) {
            if !p.is_positive() {
                out.push(Violation::new(
                    "measure not strictly positive",
                    format!("state {name} has probability {p}"),
                ));
            }
        }
        let total: Rational = probability.iter().sum();
        if !probability.is_empty() && !total.is_one() {
            out.push(Violation::new(
                "measure not normalized",
                format!("probabilities sum to {total}"),
            ));
        }
        if n < 1 {
            out.push(Violation::new("grid", "maturity n must be at least 1"));
        }
        if n_ext < n {
            out.push(Violation::new("grid", format!("n_ext = {n_ext} is below n = {n}")));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn probability(&self) -> &[Rational] {
        &self.probability
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    /// Trading horizon `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Extended horizon `N_ext ≥ N`.
    pub fn n_ext(&self) -> usize {
        self.n_ext
    }

    /// Same states and measure on a different grid.
    pub fn with_grid(&self, n: usize, n_ext: usize) -> Result<Self> {
        Self::new(self.names.clone(), self.probability.clone(), n, n_ext)
    }

    pub fn expectation(&self, x: &[Rational]) -> Rational {
        x.iter()
            .zip(&self.probability)
            .fold(Rational::zero(), |acc, (v, p)| acc + v * p)
    }
}
