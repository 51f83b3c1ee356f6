use std::collections::BTreeMap;

use num_traits::Zero;

use super::Market;
use crate::{Error, Rational, Result, Violation};

/// Simple strategy on one index set: on `(dates[i], dates[i+1]]` it holds
/// `holdings[i][a]` units of asset `a`, a vector measurable with respect to
/// `ℱ^A` at `dates[i]`. Missing assets hold zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub index_set: usize,
    pub dates: Vec<usize>,
    pub holdings: Vec<BTreeMap<usize, Vec<Rational>>>,
}

pub fn validate_strategy(m: &Market, s: &Strategy) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(set) = m.index_system.get(s.index_set) else {
        out.push(Violation::new("unknown index set", format!("index {}", s.index_set)));
        return out;
    };
    if s.dates.is_empty() || s.dates.windows(2).any(|w| w[0] >= w[1]) {
        out.push(Violation::new("dates", "dates must be nonempty and strictly increasing"));
    }
    if s.dates.iter().any(|&t| t > m.n_ext()) {
        out.push(Violation::new("dates", format!("dates must lie in 0..={}", m.n_ext())));
    }
    if s.holdings.len() + 1 != s.dates.len() {
        out.push(Violation::new(
            "shape mismatch",
            format!("{} holding intervals for {} dates", s.holdings.len(), s.dates.len()),
        ));
    }
    if !out.is_empty() {
        return out;
    }
    for (i, interval) in s.holdings.iter().enumerate() {
        let sigma = m.trading_at(s.index_set, s.dates[i]);
        for (&a, h) in interval {
            if !set.contains(&a) {
                out.push(Violation::new(
                    "asset outside index set",
                    format!("asset {a} is not in {}", m.set_label(set)),
                ));
            } else if h.len() != m.num_states() {
                out.push(Violation::new("shape mismatch", format!("holding of asset {a} has the wrong length")));
            } else if !sigma.is_measurable(h) {
                out.push(Violation::new(
                    "holdings not measurable",
                    format!("holding of {} on interval {i} is not ℱ^A-measurable at time {}", m.assets[a].id, s.dates[i]),
                ));
            }
        }
    }
    out
}

/// `W_t(ω) = Σ_i Σ_a H^a_i(ω)·1(t > t_i)·(S^a(min(t_{i+1}, t), ω) − S^a(t_i, ω))`
/// for every `t` in `0..=n_ext`.
pub fn wealth_process(m: &Market, s: &Strategy) -> Result<Vec<Vec<Rational>>> {
    let violations = validate_strategy(m, s);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let n_states = m.num_states();
    let mut out = vec![vec![Rational::zero(); n_states]; m.n_ext() + 1];
    for (t, row) in out.iter_mut().enumerate() {
        for (i, interval) in s.holdings.iter().enumerate() {
            let (start, end) = (s.dates[i], s.dates[i + 1]);
            if t <= start {
                continue;
            }
            let stop = end.min(t);
            for (&a, h) in interval {
                let (from, to) = (m.price(a, start), m.price(a, stop));
                for w in 0..n_states {
                    if !h[w].is_zero() {
                        row[w] += &h[w] * (&to[w] - &from[w]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `1_F · (S^a_{t+1} − S^a_t)` for an atom `F` of `ℱ^A_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GainGenerator {
    pub index_set: usize,
    pub asset: usize,
    pub time: usize,
    pub atom: Vec<usize>,
    pub vector: Vec<Rational>,
}

/// One-step gains spanning the terminal wealths of all simple strategies
/// trading up to `horizon`. Zero vectors are omitted.
pub fn gain_generators(m: &Market, horizon: usize) -> Vec<GainGenerator> {
    let mut out = Vec::new();
    for (i, set) in m.index_system.iter().enumerate() {
        for &a in set {
            for t in 0..horizon {
                let (now, next) = (m.price(a, t), m.price(a, t + 1));
                for atom in m.trading_at(i, t).atoms() {
                    let mut vector = vec![Rational::zero(); m.num_states()];
                    for &w in atom {
                        vector[w] = &next[w] - &now[w];
                    }
                    if vector.iter().any(|x| !x.is_zero()) {
                        out.push(GainGenerator {
                            index_set: i,
                            asset: a,
                            time: t,
                            atom: atom.clone(),
                            vector,
                        });
                    }
                }
            }
        }
    }
    out
}
