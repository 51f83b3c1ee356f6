#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use num_traits::{Signed, Zero};
use platonic_core::arbitrage::{canonical_text, check_naflp, verify_certificate, FreeLunchCertificate, Verdict};
use platonic_core::delay::apply_information_delay;
use platonic_core::market::{Asset, IndexSet, Market};
use platonic_core::prob::{FiniteSpace, Filtration, Partition};
use platonic_core::scenario::{gen_insider_market, DEFAULT_STATE_CAP};
use platonic_core::{rat, Rational};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    rat(n, d)
}

pub fn qs(xs: &[(i64, i64)]) -> Vec<Rational> {
    xs.iter().map(|&(n, d)| rat(n, d)).collect()
}

pub fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| rat(x, 1)).collect()
}

pub fn part(n: usize, atoms: &[&[usize]]) -> Partition {
    let atoms: Vec<Vec<usize>> = atoms.iter().map(|a| a.to_vec()).collect();
    Partition::from_atoms(n, &atoms).unwrap()
}

pub fn set(ids: &[usize]) -> IndexSet {
    ids.iter().copied().collect()
}

pub fn atom_sets(p: &Partition) -> BTreeSet<BTreeSet<usize>> {
    p.atoms().iter().map(|a| a.iter().copied().collect()).collect()
}

/// One-step, two-state, one-asset market with `ℱ_0` trivial.
pub fn binomial(s0: Rational, up: Rational, down: Rational, p_up: Rational) -> Market {
    let p_down = rat(1, 1) - &p_up;
    let space = FiniteSpace::new(vec!["up".into(), "down".into()], vec![p_up, p_down], 1, 1).unwrap();
    let f = Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)]).unwrap();
    Market::new(
        space,
        vec![Asset { id: "S".into(), prices: vec![vec![s0.clone(), s0], vec![up, down]] }],
        vec![set(&[0])],
        vec![f.clone()],
        f,
    )
    .unwrap()
}

/// Labels in `0..k` for `n` states.
pub fn labels(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..k, n)
}

pub fn partition_from(labels: &[usize]) -> Partition {
    Partition::from_key(labels.len(), |w| labels[w])
}

/// A filtration over `len` times on `n` states, built by successive joins.
pub fn filtration(n: usize, len: usize) -> impl Strategy<Value = Filtration> {
    proptest::collection::vec(labels(n, 3), len).prop_map(move |ls| {
        let mut parts: Vec<Partition> = Vec::with_capacity(len);
        for (t, l) in ls.iter().enumerate() {
            let p = partition_from(l);
            let p = if t == 0 { p } else { parts[t - 1].join(&p) };
            parts.push(p);
        }
        Filtration::new(parts).unwrap()
    })
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn positive_measure(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(1i64..=5, n).prop_map(|w| {
        let total: i64 = w.iter().sum();
        w.into_iter().map(|x| rat(x, total)).collect()
    })
}

/// `F ∩ {τ ≤ s} ∈ f_s` for every `s`, checked atom by atom.
pub fn in_stopped_field(f: &Filtration, tau: &[usize], set: &[bool]) -> bool {
    let top = tau.iter().copied().max().unwrap_or(0).max(f.len() - 1);
    (0..=top).all(|s| {
        let slice: Vec<bool> = (0..tau.len()).map(|w| set[w] && tau[w] <= s).collect();
        f.at(s).atoms().iter().all(|atom| {
            let inside = atom.iter().filter(|&&w| slice[w]).count();
            inside == 0 || inside == atom.len()
        })
    })
}

pub fn is_stopping(f: &Filtration, tau: &[usize]) -> bool {
    in_stopped_field(f, tau, &vec![true; tau.len()])
}

/// Atoms of the stopped σ-field by enumerating every subset of `Ω`.
pub fn brute_force_atoms(f: &Filtration, tau: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let n = tau.len();
    let members: Vec<u32> = (0u32..1 << n)
        .filter(|&bits| {
            let set: Vec<bool> = (0..n).map(|w| bits >> w & 1 == 1).collect();
            in_stopped_field(f, tau, &set)
        })
        .collect();
    (0..n)
        .map(|w| {
            let atom = members
                .iter()
                .filter(|&&m| m >> w & 1 == 1)
                .fold((1u32 << n) - 1, |acc, &m| acc & m);
            (0..n).filter(|&v| atom >> v & 1 == 1).collect()
        })
        .collect()
}


/// Every one-step gain on every atom of every trading filtration has zero `q`-mean.
pub fn is_martingale_measure(m: &Market, q: &[Rational], horizon: usize) -> bool {
    if q.iter().any(|x| !x.is_positive()) || q.iter().sum::<Rational>() != rat(1, 1) {
        return false;
    }
    m.index_system.iter().enumerate().all(|(i, set)| {
        set.iter().all(|&a| {
            (0..horizon).all(|t| {
                m.trading_at(i, t).atoms().iter().all(|atom| {
                    atom.iter()
                        .map(|&w| &q[w] * (&m.price(a, t + 1)[w] - &m.price(a, t)[w]))
                        .sum::<Rational>()
                        .is_zero()
                })
            })
        })
    })
}

/// Terminal wealth summed directly from the holdings, interval by interval.
pub fn direct_terminal(m: &Market, c: &FreeLunchCertificate, horizon: usize) -> Vec<Rational> {
    let s = &c.strategy;
    (0..m.num_states())
        .map(|w| {
            let mut total = rat(0, 1);
            for (i, interval) in s.holdings.iter().enumerate() {
                let (from, to) = (s.dates[i].min(horizon), s.dates[i + 1].min(horizon));
                for (&a, h) in interval {
                    total += &h[w] * (&m.price(a, to)[w] - &m.price(a, from)[w]);
                }
            }
            total
        })
        .collect()
}

pub fn independently_valid(m: &Market, v: &Verdict, horizon: usize) -> bool {
    match v {
        Verdict::NoFreeLunch(c) => is_martingale_measure(m, &c.q, horizon),
        Verdict::FreeLunch(c) => {
            let t = direct_terminal(m, c, horizon);
            t == c.terminal_wealth && t.iter().all(|x| !x.is_negative()) && t.iter().any(|x| x.is_positive())
        }
    }
}


pub fn golden(name: &str, text: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("PLATONIC_BLESS").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, expected, "{name} drifted from its golden file");
}

pub fn golden_cases() -> Vec<(&'static str, String)> {
    let binom = binomial(rat(1, 1), rat(2, 1), rat(1, 2), rat(1, 2));
    let dominated = binomial(rat(1, 1), rat(2, 1), rat(1, 1), rat(1, 2));
    let (insider, delta) = gen_insider_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    let delayed = apply_information_delay(&insider, &delta).unwrap();
    let text = |m: &Market, h: usize| {
        let v = check_naflp(m, h).unwrap();
        assert!(verify_certificate(m, &v, h));
        canonical_text(m, &v)
    };
    vec![
        ("binomial.cert", text(&binom, 1)),
        ("dominated.cert", text(&dominated, 1)),
        ("insider.cert", text(&insider, 2)),
        ("insider_delayed.cert", text(&delayed, 2)),
    ]
}
