//! Assets, index systems, trading filtrations and simple strategies.

mod strategy;

pub use strategy::{gain_generators, validate_strategy, wealth_process, GainGenerator, Strategy};

use std::collections::{BTreeSet, HashSet};

use crate::prob::{FiniteSpace, Filtration, Partition};
use crate::{Error, Rational, Result, Violation};

/// A set of asset indices.
pub type IndexSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asset {
    pub id: String,
    /// `prices[t][ω]` for `t` in `0..=n_ext`.
    pub prices: Vec<Vec<Rational>>,
}

/// A large platonic market on a finite space.
///
/// `trading[i]` is the filtration `ℱ^A` of `index_system[i]`; it covers at
/// least `0..=n` and is read as constant past its last stored time.
/// Operations other than [`validate_market`] assume the market is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Market {
    pub space: FiniteSpace,
    pub assets: Vec<Asset>,
    pub index_system: Vec<IndexSet>,
    pub trading: Vec<Filtration>,
    pub grand: Filtration,
}

impl Market {
    /// Builds and validates.
    pub fn new(
        space: FiniteSpace,
        assets: Vec<Asset>,
        index_system: Vec<IndexSet>,
        trading: Vec<Filtration>,
        grand: Filtration,
    ) -> Result<Self> {
        let m = Self {
            space,
            assets,
            index_system,
            trading,
            grand,
        };
        let violations = validate_market(&m);
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn n_ext(&self) -> usize {
        self.space.n_ext()
    }

    pub fn num_states(&self) -> usize {
        self.space.len()
    }

    pub fn price(&self, asset: usize, t: usize) -> &[Rational] {
        &self.assets[asset].prices[t]
    }

    /// `ℱ^A_t` for the `i`-th index set.
    pub fn trading_at(&self, i: usize, t: usize) -> &Partition {
        self.trading[i].at(t)
    }

    pub fn asset_index(&self, id: &str) -> Option<usize> {
        self.assets.iter().position(|a| a.id == id)
    }

    pub fn index_of(&self, set: &IndexSet) -> Option<usize> {
        self.index_system.iter().position(|s| s == set)
    }

    pub fn set_label(&self, set: &IndexSet) -> String {
        let ids: Vec<&str> = set.iter().map(|&a| self.assets[a].id.as_str()).collect();
        format!("{{{}}}", ids.join(","))
    }

    /// Coarsest information shared by all trading filtrations whose index set
    /// contains `asset`, over `0..len`.
    pub fn shared_trading_info(&self, asset: usize, len: usize) -> Filtration {
        let mut out: Option<Filtration> = None;
        for (i, set) in self.index_system.iter().enumerate() {
            if set.contains(&asset) {
                let f = self.trading[i].resized(len);
                out = Some(match out {
                    Some(acc) => acc.meet(&f),
                    None => f,
                });
            }
        }
        out.unwrap_or_else(|| Filtration::trivial(self.num_states(), len))
    }

    /// Replaces the trading filtrations and re-validates.
    pub fn with_trading(&self, trading: Vec<Filtration>) -> Result<Market> {
        Market::new(
            self.space.clone(),
            self.assets.clone(),
            self.index_system.clone(),
            trading,
            self.grand.clone(),
        )
    }
}

/// Lists every violated market invariant (empty iff valid).
pub fn validate_market(m: &Market) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_states = m.space.len();
    let (n, n_ext) = (m.n(), m.n_ext());

    if m.assets.is_empty() {
        out.push(Violation::new("no assets", "the market needs at least one asset"));
    }
    let mut ids = HashSet::new();
    for asset in &m.assets {
        if !ids.insert(&asset.id) {
            out.push(Violation::new("duplicate asset", asset.id.clone()));
        }
        if asset.prices.len() != n_ext + 1 {
            out.push(Violation::new(
                "shape mismatch",
                format!("asset {} has {} price rows, expected n_ext + 1 = {}", asset.id, asset.prices.len(), n_ext + 1),
            ));
        }
        if asset.prices.iter().any(|row| row.len() != n_states) {
            out.push(Violation::new(
                "shape mismatch",
                format!("asset {} has a price row of the wrong length", asset.id),
            ));
        }
    }
    if m.grand.num_states() != n_states || m.grand.len() != n_ext + 1 {
        out.push(Violation::new(
            "shape mismatch",
            format!("grand filtration must cover times 0..={n_ext} over {n_states} states"),
        ));
    }
    if !out.is_empty() {
        return out;
    }

    for asset in &m.assets {
        for (t, row) in asset.prices.iter().enumerate() {
            if !m.grand.at(t).is_measurable(row) {
                out.push(Violation::new(
                    "price not adapted",
                    format!("asset {} at time {t} is not constant on the grand filtration's atoms", asset.id),
                ));
            }
        }
    }

    if m.index_system.is_empty() {
        out.push(Violation::new("empty index system", "at least one index set is required"));
    }
    let mut seen = HashSet::new();
    for set in &m.index_system {
        if set.is_empty() {
            out.push(Violation::new("empty index set", "index sets must be nonempty"));
        }
        if let Some(a) = set.iter().find(|&&a| a >= m.assets.len()) {
            out.push(Violation::new("unknown asset", format!("asset index {a} in an index set")));
            return out;
        }
        if !seen.insert(set) {
            out.push(Violation::new("duplicate index set", m.set_label(set)));
        }
    }
    for (i, a) in m.index_system.iter().enumerate() {
        for b in &m.index_system[i + 1..] {
            let union: IndexSet = a | b;
            if m.index_of(&union).is_none() {
                out.push(Violation::new(
                    "refining property",
                    format!("{} ∪ {} = {} is not in the index system", m.set_label(a), m.set_label(b), m.set_label(&union)),
                ));
            }
        }
    }

    if m.trading.len() != m.index_system.len() {
        out.push(Violation::new(
            "shape mismatch",
            format!("{} trading filtrations for {} index sets", m.trading.len(), m.index_system.len()),
        ));
        return out;
    }
    let mut shapes_ok = true;
    for (set, f) in m.index_system.iter().zip(&m.trading) {
        if f.num_states() != n_states || f.len() < n + 1 || f.len() > n_ext + 1 {
            shapes_ok = false;
            out.push(Violation::new(
                "shape mismatch",
                format!("trading filtration of {} must cover 0..={n} and at most 0..={n_ext}", m.set_label(set)),
            ));
        }
    }
    if !shapes_ok {
        return out;
    }
    for (i, set) in m.index_system.iter().enumerate() {
        if let Some(t) = (0..=n_ext).find(|&t| !m.grand.at(t).refines(m.trading_at(i, t))) {
            out.push(Violation::new(
                "trading filtration exceeds grand filtration",
                format!("ℱ^{} at time {t} is not contained in 𝒢 at {t}", m.set_label(set)),
            ));
        }
        for (j, sup) in m.index_system.iter().enumerate() {
            if i == j || !set.is_subset(sup) {
                continue;
            }
            if let Some(t) = (0..=n_ext).find(|&t| !m.trading_at(j, t).refines(m.trading_at(i, t))) {
                out.push(Violation::new(
                    "monotonicity property",
                    format!("ℱ^{} is not contained in ℱ^{} at time {t}", m.set_label(set), m.set_label(sup)),
                ));
            }
        }
    }
    out
}
