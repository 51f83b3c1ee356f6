mod common;

use std::collections::BTreeMap;

use common::*;
use platonic_core::market::*;
use platonic_core::prob::{FiniteSpace, Filtration, Partition};
use platonic_core::scenario::{gen_insider_market, gen_random_market, trial_rng, MarketShape, PriceKind, DEFAULT_STATE_CAP};
use platonic_core::{rat, Error, Rational};
use platonic_lp::linalg::rank;
use rand::Rng;

fn two_assets(index_system: Vec<IndexSet>, trading: Vec<Filtration>) -> Result<Market, Error> {
    let space = FiniteSpace::uniform(4, 1, 1).unwrap();
    let grand = Filtration::new(vec![Partition::trivial(4), Partition::discrete(4)]).unwrap();
    let assets = vec![
        Asset { id: "X".into(), prices: vec![ints(&[1; 4]), ints(&[2, 2, 0, 0])] },
        Asset { id: "Y".into(), prices: vec![ints(&[1; 4]), ints(&[2, 0, 2, 0])] },
    ];
    Market::new(space, assets, index_system, trading, grand)
}

fn rules(e: Error) -> Vec<String> {
    match e {
        Error::Invalid(v) => v.into_iter().map(|x| x.rule).collect(),
        other => panic!("expected violations, got {other}"),
    }
}

#[test]
fn binomial_is_valid() {
    let m = binomial(rat(4, 1), rat(8, 1), rat(2, 1), rat(1, 2));
    assert!(validate_market(&m).is_empty());
}

#[test]
fn index_system_must_be_union_closed() {
    let f = Filtration::new(vec![Partition::trivial(4), Partition::discrete(4)]).unwrap();
    let err = two_assets(vec![set(&[0]), set(&[1])], vec![f.clone(), f]).unwrap_err();
    assert!(rules(err).contains(&"refining property".to_string()));
}

#[test]
fn trading_filtrations_must_be_monotone() {
    let fine = Filtration::new(vec![Partition::trivial(4), Partition::discrete(4)]).unwrap();
    let coarse = Filtration::new(vec![Partition::trivial(4), part(4, &[&[0, 1], &[2, 3]])]).unwrap();
    let err = two_assets(vec![set(&[0]), set(&[0, 1])], vec![fine.clone(), coarse.clone()]).unwrap_err();
    assert!(rules(err).contains(&"monotonicity property".to_string()));
    assert!(two_assets(vec![set(&[0]), set(&[0, 1])], vec![coarse, fine]).is_ok());
}

#[test]
fn prices_must_be_adapted() {
    let space = FiniteSpace::uniform(2, 1, 1).unwrap();
    let trivial = Filtration::trivial(2, 2);
    let err = Market::new(
        space,
        vec![Asset { id: "S".into(), prices: vec![ints(&[1, 1]), ints(&[2, 0])] }],
        vec![set(&[0])],
        vec![trivial.clone()],
        trivial,
    )
    .unwrap_err();
    assert!(rules(err).contains(&"price not adapted".to_string()));
}

fn hold(dates: Vec<usize>, holdings: Vec<Vec<Rational>>) -> Strategy {
    Strategy {
        index_set: 0,
        dates,
        holdings: holdings.into_iter().map(|h| BTreeMap::from([(0, h)])).collect(),
    }
}

#[test]
fn buy_and_hold_wealth() {
    let m = binomial(rat(4, 1), rat(8, 1), rat(2, 1), rat(1, 2));
    let w = wealth_process(&m, &hold(vec![0, 1], vec![ints(&[1, 1])])).unwrap();
    assert_eq!(w, vec![ints(&[0, 0]), ints(&[4, -2])]);
    let w = wealth_process(&m, &hold(vec![0, 1], vec![ints(&[0, 0])])).unwrap();
    assert_eq!(w, vec![ints(&[0, 0]); 2]);
}

#[test]
fn holdings_must_be_measurable() {
    let m = binomial(rat(4, 1), rat(8, 1), rat(2, 1), rat(1, 2));
    let v = validate_strategy(&m, &hold(vec![0, 1], vec![ints(&[1, 0])]));
    assert!(v.iter().any(|x| x.rule == "holdings not measurable"));
    assert!(wealth_process(&m, &hold(vec![1, 0], vec![ints(&[1, 1])])).is_err());
}

fn random_market(seed: u64, trial: u64, n: usize) -> Market {
    let mut rng = trial_rng(seed, trial);
    let shape = MarketShape {
        num_states: rng.gen_range(2..=8),
        n,
        n_ext: n,
        num_assets: rng.gen_range(1..=3),
        max_index_sets: 4,
        all_subsets: false,
    };
    gen_random_market(&mut rng, &shape, PriceKind::Arbitrary).unwrap().0
}

/// Constant holdings per atom of `ℱ^A_t`.
fn random_holding(rng: &mut impl Rng, p: &Partition) -> Vec<Rational> {
    let per_atom: Vec<Rational> = (0..p.num_atoms()).map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect();
    (0..p.num_states()).map(|w| per_atom[p.label(w)].clone()).collect()
}

fn random_strategy(rng: &mut impl Rng, m: &Market, horizon: usize) -> Strategy {
    let index_set = rng.gen_range(0..m.index_system.len());
    let mut dates: Vec<usize> = (0..=horizon).filter(|_| rng.gen_bool(0.6)).collect();
    while dates.len() < 2 {
        dates = (0..=horizon).filter(|_| rng.gen_bool(0.6)).collect();
    }
    let holdings = dates[..dates.len() - 1]
        .iter()
        .map(|&t| {
            m.index_system[index_set]
                .iter()
                .map(|&a| (a, random_holding(rng, m.trading_at(index_set, t))))
                .collect()
        })
        .collect();
    Strategy { index_set, dates, holdings }
}

#[test]
fn telescoped_strategy_has_the_same_terminal_wealth() {
    let m = random_market(3, 0, 3);
    let mut rng = trial_rng(3, 1);
    let h = random_holding(&mut rng, m.trading_at(0, 0));
    let assets = &m.index_system[0];
    let held = |dates: Vec<usize>| Strategy {
        index_set: 0,
        holdings: (1..dates.len()).map(|_| assets.iter().map(|&a| (a, h.clone())).collect()).collect(),
        dates,
    };
    let split = wealth_process(&m, &held(vec![0, 1, 3])).unwrap();
    let whole = wealth_process(&m, &held(vec![0, 3])).unwrap();
    assert_eq!(split[3], whole[3]);
    assert_eq!(split, whole);
}

#[test]
fn binomial_has_one_generator() {
    let m = binomial(rat(4, 1), rat(8, 1), rat(2, 1), rat(1, 2));
    let g = gain_generators(&m, 1);
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].vector, ints(&[4, -2]));
}

#[test]
fn insider_generators_follow_the_lookahead_atoms() {
    let (m, _) = gen_insider_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    let g = gain_generators(&m, 2);
    let late: Vec<_> = g.iter().filter(|x| x.time == 1).collect();
    // ℱ_1 knows the first two steps: four atoms of two paths each
    assert_eq!(late.len(), 4);
    for x in late {
        assert_eq!(x.atom.len(), 2);
        for w in 0..8 {
            let expected = if x.atom.contains(&w) { &m.price(0, 2)[w] - &m.price(0, 1)[w] } else { rat(0, 1) };
            assert_eq!(x.vector[w], expected);
        }
    }
    assert_eq!(g.iter().filter(|x| x.time == 0).count(), 1);
}

#[test]
fn terminal_wealth_lies_in_generator_span() {
    let mut checked = 0;
    for trial in 0..25 {
        let m = random_market(11, trial, 1 + trial as usize % 3);
        let horizon = m.n();
        let gens: Vec<Vec<Rational>> = gain_generators(&m, horizon).into_iter().map(|g| g.vector).collect();
        let base = rank(&gens);
        let mut rng = trial_rng(12, trial);
        for _ in 0..6 {
            let s = random_strategy(&mut rng, &m, horizon);
            assert!(validate_strategy(&m, &s).is_empty());
            let w = wealth_process(&m, &s).unwrap();
            assert!(w[0].iter().all(|x| *x == rat(0, 1)));
            let mut with = gens.clone();
            with.push(w[horizon].clone());
            assert_eq!(rank(&with), base, "trial {trial}: terminal wealth escapes the span");
            checked += 1;
        }
    }
    assert!(checked >= 100);
}
