use std::collections::HashMap;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delay::{ExecutionDelay, InformationDelayFamily};
use crate::market::{Asset, IndexSet, Market};
use crate::prob::{conditional_expectation, FiniteSpace, Filtration, Partition, StoppingProcess};
use crate::{Error, Rational, Result};

/// Generator for trial `trial` of an experiment seeded with `seed`. Each
/// trial owns its own ChaCha stream, so trials replay in isolation.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Strictly positive measure with small integer weights.
pub fn random_measure(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| Rational::new(BigInt::from(w), BigInt::from(total)))
        .collect()
}

/// Splits each non-singleton atom in two with probability 1/2.
pub fn random_refinement(rng: &mut impl Rng, p: &Partition) -> Partition {
    let mut side = vec![false; p.num_states()];
    for atom in p.atoms() {
        if atom.len() < 2 || !rng.gen_bool(0.5) {
            continue;
        }
        for &w in atom {
            side[w] = rng.gen_bool(0.5);
        }
        if atom.iter().all(|&w| side[w] == side[atom[0]]) {
            side[atom[0]] = !side[atom[0]];
        }
    }
    Partition::from_key(p.num_states(), |w| (p.label(w), side[w]))
}

/// Merges atoms of `p` into a random number of groups.
pub fn random_coarsening(rng: &mut impl Rng, p: &Partition) -> Partition {
    let groups = rng.gen_range(1..=p.num_atoms());
    let group: Vec<usize> = (0..p.num_atoms()).map(|_| rng.gen_range(0..groups)).collect();
    Partition::from_key(p.num_states(), |w| group[p.label(w)])
}

/// Refining sequence of `len` partitions built by repeated random splits.
pub fn random_filtration(rng: &mut impl Rng, start: Partition, len: usize) -> Filtration {
    let mut parts = vec![start];
    while parts.len() < len {
        let next = random_refinement(rng, parts.last().expect("nonempty"));
        parts.push(next);
    }
    Filtration::new(parts).expect("refinements refine")
}

/// Union-closed family of at most `max_sets` nonempty subsets of `0..num_assets`.
pub fn random_index_system(rng: &mut impl Rng, num_assets: usize, max_sets: usize) -> Vec<IndexSet> {
    loop {
        let draws = rng.gen_range(1..=max_sets.clamp(1, 3));
        let mut family: Vec<IndexSet> = Vec::new();
        for _ in 0..draws {
            let mut set: IndexSet = (0..num_assets).filter(|_| rng.gen_bool(0.5)).collect();
            if set.is_empty() {
                set.insert(rng.gen_range(0..num_assets));
            }
            if !family.contains(&set) {
                family.push(set);
            }
        }
        close_under_union(&mut family);
        if family.len() <= max_sets.max(1) {
            return family;
        }
    }
}

/// Every nonempty subset of `0..num_assets`, smallest first.
pub fn all_subsets(num_assets: usize) -> Vec<IndexSet> {
    let mut family: Vec<IndexSet> = (0..num_assets).map(|a| [a].into_iter().collect()).collect();
    close_under_union(&mut family);
    family
}

fn close_under_union(family: &mut Vec<IndexSet>) {
    let mut i = 0;
    while i < family.len() {
        for j in 0..i {
            let union: IndexSet = &family[i] | &family[j];
            if !family.contains(&union) {
                family.push(union);
            }
        }
        i += 1;
    }
    family.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

/// How asset prices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceKind {
    /// `S_t = E_Q[X | 𝒢_t]` for a random `Q`: free of free lunch by construction.
    Martingale,
    /// A martingale with a random drift added on one atom of one step.
    Perturbed,
    /// Independent random values on every atom.
    Arbitrary,
}

/// Dimensions of a random market.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarketShape {
    pub num_states: usize,
    pub n: usize,
    pub n_ext: usize,
    pub num_assets: usize,
    pub max_index_sets: usize,
    /// Use every nonempty subset as index system, so all singletons are present.
    pub all_subsets: bool,
}

/// A random valid market together with the measure it was built from
/// (meaningful as a martingale measure only for [`PriceKind::Martingale`]).
///
/// Trading filtrations are `ℱ^A_t = 𝒢_t ∧ C_A` with `C_A` the join over
/// `a ∈ A` of a random partition per asset, which makes them monotone in
/// `A` and contained in `𝒢`.
pub fn gen_random_market(rng: &mut impl Rng, shape: &MarketShape, kind: PriceKind) -> Result<(Market, Vec<Rational>)> {
    let n_states = shape.num_states;
    let names = (0..n_states).map(|i| format!("s{i}")).collect();
    let space = FiniteSpace::new(names, random_measure(rng, n_states), shape.n, shape.n_ext)?;
    let start = if rng.gen_bool(0.7) {
        Partition::trivial(n_states)
    } else {
        random_refinement(rng, &Partition::trivial(n_states))
    };
    let grand = random_filtration(rng, start, shape.n_ext + 1);
    let q = random_measure(rng, n_states);

    let mut assets = Vec::with_capacity(shape.num_assets);
    for a in 0..shape.num_assets {
        let prices = match kind {
            PriceKind::Arbitrary => grand
                .parts()
                .iter()
                .map(|p| {
                    let values: Vec<i64> = (0..p.num_atoms()).map(|_| rng.gen_range(-3..=6)).collect();
                    (0..n_states).map(|w| Rational::from_integer(values[p.label(w)].into())).collect()
                })
                .collect(),
            PriceKind::Martingale | PriceKind::Perturbed => {
                let payoff: Vec<Rational> = (0..n_states)
                    .map(|_| Rational::new(rng.gen_range(-6..=12).into(), 2.into()))
                    .collect();
                let mut prices = grand
                    .parts()
                    .iter()
                    .map(|p| conditional_expectation(&payoff, p, &q))
                    .collect::<Result<Vec<_>>>()?;
                if kind == PriceKind::Perturbed && rng.gen_bool(0.5) {
                    let t = rng.gen_range(1..=shape.n_ext);
                    let p = grand.at(t);
                    let atom = rng.gen_range(0..p.num_atoms());
                    let bump = Rational::from_integer(rng.gen_range(1..=2).into());
                    for &w in &p.atoms()[atom] {
                        prices[t][w] += &bump;
                    }
                }
                prices
            }
        };
        assets.push(Asset {
            id: format!("a{a}"),
            prices,
        });
    }

    let index_system = if shape.all_subsets {
        all_subsets(shape.num_assets)
    } else {
        random_index_system(rng, shape.num_assets, shape.max_index_sets)
    };
    let discrete = Partition::discrete(n_states);
    let per_asset: Vec<Partition> = (0..shape.num_assets)
        .map(|_| {
            if rng.gen_bool(0.4) {
                discrete.clone()
            } else {
                random_coarsening(rng, &discrete)
            }
        })
        .collect();
    let trading = index_system
        .iter()
        .map(|set| {
            let cap = set
                .iter()
                .fold(Partition::trivial(n_states), |acc, &a| acc.join(&per_asset[a]));
            let parts = (0..=shape.n).map(|t| grand.at(t).meet(&cap)).collect();
            Filtration::new(parts)
        })
        .collect::<Result<Vec<_>>>()?;
    let market = Market::new(space, assets, index_system, trading, grand)?;
    Ok((market, q))
}

/// Lazily drawn coin per key, so a decision depends only on what the key
/// encodes (typically a time pair and an atom label).
struct Coins<'a, R: Rng> {
    rng: &'a mut R,
    bias: f64,
    drawn: HashMap<(usize, usize, usize), bool>,
}

impl<'a, R: Rng> Coins<'a, R> {
    fn new(rng: &'a mut R, bias: f64) -> Self {
        Self {
            rng,
            bias,
            drawn: HashMap::new(),
        }
    }

    fn flip(&mut self, key: (usize, usize, usize)) -> bool {
        let (rng, bias) = (&mut *self.rng, self.bias);
        *self.drawn.entry(key).or_insert_with(|| rng.gen_bool(bias))
    }
}

/// Random information delay on `rows` times for the given delay information.
///
/// `δ(t) = min{r ≥ δ(t−1) : coin(t, r, atom of 𝔥_r) or r = t}`, a stopping
/// time for `𝔥` by construction. With `zero`, `δ(t) = t`.
pub fn gen_information_delay(rng: &mut impl Rng, info: Filtration, rows: usize, zero: bool) -> StoppingProcess {
    let n = info.num_states();
    let mut values: Vec<Vec<usize>> = Vec::with_capacity(rows);
    if zero {
        return StoppingProcess::from_fn(rows, info, |t, _| t);
    }
    let bias = rng.gen_range(0.2..0.8);
    let mut coins = Coins::new(rng, bias);
    for t in 0..rows {
        let row = (0..n)
            .map(|w| {
                let from = if t == 0 { 0 } else { values[t - 1][w] };
                (from..=t)
                    .find(|&r| r == t || coins.flip((t, r, info.at(r).label(w))))
                    .expect("r = t terminates")
            })
            .collect();
        values.push(row);
    }
    StoppingProcess::new(values, info)
}

/// Random family for every index set, with delay information `ℱ^A` merged
/// with a random constant partition.
pub fn gen_information_family(rng: &mut impl Rng, m: &Market, zero: bool) -> InformationDelayFamily {
    let delays = m
        .trading
        .iter()
        .map(|f| {
            let coarse = random_coarsening(rng, &Partition::discrete(m.num_states()));
            let info = f.meet(&Filtration::constant(coarse, f.len()));
            gen_information_delay(rng, info, f.len(), zero)
        })
        .collect();
    InformationDelayFamily { delays }
}

/// Shape constraints for a random execution delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExecutionSpec {
    pub rows: usize,
    pub n_ext: usize,
    /// Strict upper bound on values; `None` means `n_ext + 1`.
    pub cap: Option<usize>,
    /// `π(t) ≤ t + lag`.
    pub lag: Option<usize>,
    /// Increments in `{0, 1}`.
    pub continuous: bool,
    /// `π(0) = 0`.
    pub start_at_zero: bool,
    /// `π(t + 1) > π(t)`.
    pub strict: bool,
}

impl ExecutionSpec {
    fn upper(&self, t: usize) -> usize {
        let cap_bound = self.cap.map_or(self.n_ext, |c| c.saturating_sub(1));
        let lag_bound = self.lag.map_or(usize::MAX, |l| t + l);
        self.n_ext.min(cap_bound).min(lag_bound)
    }
}

/// Random execution delay that is a stopping time for `info`.
///
/// Each value is the first time `r` above the lower bound where a coin keyed
/// by `(t, r, atom of 𝔍_r)` comes up, or the upper bound. Continuous delays
/// move up by one exactly when a coin keyed by the atom of `𝔍` at the
/// current value says so, with forced moves at the bounds. `floor` raises
/// the lower bound pointwise and must itself be a stopping process for `info`.
pub fn gen_execution_delay(
    rng: &mut impl Rng,
    info: Filtration,
    spec: &ExecutionSpec,
    floor: Option<&StoppingProcess>,
) -> Result<ExecutionDelay> {
    if let Some(t) = (0..spec.rows).find(|&t| spec.upper(t) < t) {
        return Err(Error::Precondition(vec![format!(
            "no admissible execution time at t = {t} under the requested bounds"
        )]));
    }
    if spec.start_at_zero && floor.is_some_and(|f| f.values[0].iter().any(|&v| v > 0)) {
        return Err(Error::Precondition(vec!["floor does not start at zero".into()]));
    }
    let n = info.num_states();
    let bias = rng.gen_range(0.2..0.8);
    let mut coins = Coins::new(rng, bias);
    let mut values: Vec<Vec<usize>> = Vec::with_capacity(spec.rows);
    for t in 0..spec.rows {
        let upper = spec.upper(t);
        let mut row = Vec::with_capacity(n);
        for w in 0..n {
            let lowest = floor.map_or(0, |f| f.values[t][w]);
            let v = if t == 0 && spec.start_at_zero {
                0
            } else if spec.continuous && t > 0 {
                let prev = values[t - 1][w];
                let step = if spec.strict || prev < t.max(lowest) {
                    true
                } else if prev >= upper {
                    false
                } else {
                    coins.flip((t, prev, info.at(prev).label(w)))
                };
                prev + usize::from(step)
            } else {
                let prev = if t > 0 { values[t - 1][w] + usize::from(spec.strict) } else { 0 };
                let from = t.max(lowest).max(prev);
                if from > upper {
                    return Err(Error::Precondition(vec![format!(
                        "no admissible execution time at t = {t} above {from}"
                    )]));
                }
                (from..=upper)
                    .find(|&r| r == upper || coins.flip((t, r, info.at(r).label(w))))
                    .unwrap_or(from)
            };
            row.push(v);
        }
        values.push(row);
    }
    Ok(ExecutionDelay {
        process: StoppingProcess::new(values, info),
        cap: spec.cap,
    })
}

/// Delay information for asset `a` on `0..=n_ext`: what every index set
/// holding `a` knows, lagged by `lag` steps and merged with a random
/// constant partition.
pub fn gen_delay_information(rng: &mut impl Rng, m: &Market, a: usize, lag: usize) -> Result<Filtration> {
    let len = m.n_ext() + 1;
    let shared = m.shared_trading_info(a, len);
    let coarse = random_coarsening(rng, &Partition::discrete(m.num_states()));
    Filtration::new(
        (0..len)
            .map(|s| shared.at(s.saturating_sub(lag)).meet(&coarse))
            .collect(),
    )
}
