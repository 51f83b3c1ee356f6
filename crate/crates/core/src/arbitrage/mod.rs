//! The two sides of the fundamental theorem of asset pricing.
//!
//! On a finite space the closure in the no-free-lunch condition is vacuous:
//! the attainable terminal wealths `K₀` form a linear subspace, so NAFLp
//! holds iff `K₀` meets the nonnegative orthant only at zero. By Stiemke's
//! alternative this happens iff some strictly positive measure annihilates
//! `K₀`, which is exactly a martingale measure for the whole index system.

mod certificate;

pub use certificate::{canonical_text, verify_certificate};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use platonic_lp::linalg::independent_subset;
use platonic_lp::{solve, LpOutcome, LpProblem};

use crate::market::{gain_generators, validate_market, wealth_process, GainGenerator, IndexSet, Market, Strategy};
use crate::{Error, Rational, Result};

/// A simple strategy whose terminal wealth is nonnegative and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeLunchCertificate {
    pub strategy: Strategy,
    pub terminal_wealth: Vec<Rational>,
}

/// A strictly positive probability under which every asset is a martingale
/// with respect to every trading filtration of the index system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleMeasureCertificate {
    pub q: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    NoFreeLunch(MartingaleMeasureCertificate),
    FreeLunch(FreeLunchCertificate),
}

impl Verdict {
    pub fn is_free_lunch(&self) -> bool {
        matches!(self, Verdict::FreeLunch(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::NoFreeLunch(_) => "no-free-lunch",
            Verdict::FreeLunch(_) => "free-lunch",
        }
    }
}

fn prepare(m: &Market, horizon: usize) -> Result<Vec<GainGenerator>> {
    let violations = validate_market(m);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    if horizon > m.n_ext() {
        return Err(Error::Precondition(vec![format!(
            "horizon {horizon} exceeds n_ext = {}",
            m.n_ext()
        )]));
    }
    let gens = gain_generators(m, horizon);
    let vectors: Vec<Vec<Rational>> = gens.iter().map(|g| g.vector.clone()).collect();
    let basis = independent_subset(&vectors);
    let mut gens: Vec<Option<GainGenerator>> = gens.into_iter().map(Some).collect();
    Ok(basis.into_iter().filter_map(|i| gens[i].take()).collect())
}

/// Searches `K₀` (strategies trading up to `horizon`) for `v ≥ 0, v ≠ 0`.
///
/// Maximises `Σ_ω v(ω)` over `v = Σ μ_j g_j` with `0 ≤ v ≤ 1`, where the
/// `g_j` form a basis of the generator span; a positive optimum is turned
/// back into a strategy on the union of the participating index sets.
pub fn find_free_lunch(m: &Market, horizon: usize) -> Result<Option<FreeLunchCertificate>> {
    let basis = prepare(m, horizon)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let n_states = m.num_states();
    let mut lp = LpProblem::new(basis.len());
    let objective = basis.iter().map(|g| g.vector.iter().sum()).collect();
    lp.maximize(objective)?;
    for w in 0..n_states {
        let row: Vec<Rational> = basis.iter().map(|g| g.vector[w].clone()).collect();
        lp.add_le(row.clone(), Rational::one())?;
        lp.add_ge(row, Rational::zero())?;
    }
    let solution = match solve(&lp) {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::OracleDisagreement(format!(
                "free-lunch program should be bounded and feasible, got {:?}",
                other.status()
            )))
        }
    };
    if !solution.objective.is_positive() {
        return Ok(None);
    }

    let mut union = IndexSet::new();
    for (g, mu) in basis.iter().zip(&solution.x) {
        if !mu.is_zero() {
            union.extend(m.index_system[g.index_set].iter().copied());
        }
    }
    let index_set = m
        .index_of(&union)
        .ok_or_else(|| Error::OracleDisagreement("index system is not union-closed".into()))?;
    let mut holdings: Vec<BTreeMap<usize, Vec<Rational>>> = vec![BTreeMap::new(); horizon];
    for (g, mu) in basis.iter().zip(&solution.x) {
        if mu.is_zero() {
            continue;
        }
        let h = holdings[g.time]
            .entry(g.asset)
            .or_insert_with(|| vec![Rational::zero(); n_states]);
        for &w in &g.atom {
            h[w] += mu;
        }
    }
    let strategy = Strategy {
        index_set,
        dates: (0..=horizon).collect(),
        holdings,
    };
    let terminal_wealth = wealth_process(m, &strategy)?.swap_remove(horizon);
    let expected: Vec<Rational> = (0..n_states)
        .map(|w| basis.iter().zip(&solution.x).map(|(g, mu)| mu * &g.vector[w]).sum())
        .collect();
    if terminal_wealth != expected {
        return Err(Error::OracleDisagreement(
            "reconstructed strategy does not reproduce the optimal wealth".into(),
        ));
    }
    Ok(Some(FreeLunchCertificate {
        strategy,
        terminal_wealth,
    }))
}

/// Searches for a strictly positive `q` annihilating every one-step gain up
/// to `horizon`.
///
/// Maximises `ε` subject to `Σ q = 1`, `q_ω ≥ ε·ℙ(ω)` and the martingale
/// equations, so the reference measure itself is returned whenever it is a
/// martingale measure.
pub fn find_martingale_measure(m: &Market, horizon: usize) -> Result<Option<MartingaleMeasureCertificate>> {
    let basis = prepare(m, horizon)?;
    let n_states = m.num_states();
    let eps = n_states;
    let mut lp = LpProblem::new(n_states + 1);
    let mut objective = vec![Rational::zero(); n_states + 1];
    objective[eps] = Rational::one();
    lp.maximize(objective)?;
    let mut total = vec![Rational::one(); n_states + 1];
    total[eps] = Rational::zero();
    lp.add_eq(total, Rational::one())?;
    for g in &basis {
        let mut row = g.vector.clone();
        row.push(Rational::zero());
        lp.add_eq(row, Rational::zero())?;
    }
    for (w, p) in m.space.probability().iter().enumerate() {
        let mut row = vec![Rational::zero(); n_states + 1];
        row[w] = -Rational::one();
        row[eps] = p.clone();
        lp.add_le(row, Rational::zero())?;
        lp.set_lower(w, Rational::zero())?;
    }
    match solve(&lp) {
        LpOutcome::Optimal(sol) if sol.objective.is_positive() => {
            let mut q = sol.x;
            q.truncate(n_states);
            Ok(Some(MartingaleMeasureCertificate { q }))
        }
        LpOutcome::Optimal(_) | LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded(_) => Err(Error::OracleDisagreement(
            "martingale program cannot be unbounded".into(),
        )),
    }
}

/// Runs both oracles; exactly one must produce a certificate.
pub fn check_naflp(m: &Market, horizon: usize) -> Result<Verdict> {
    let lunch = find_free_lunch(m, horizon)?;
    let measure = find_martingale_measure(m, horizon)?;
    match (lunch, measure) {
        (Some(l), None) => Ok(Verdict::FreeLunch(l)),
        (None, Some(q)) => Ok(Verdict::NoFreeLunch(q)),
        (Some(_), Some(_)) => Err(Error::OracleDisagreement(
            "both a free lunch and a martingale measure were found".into(),
        )),
        (None, None) => Err(Error::OracleDisagreement(
            "neither a free lunch nor a martingale measure was found".into(),
        )),
    }
}
