mod common;

use common::*;
use platonic_core::delay::*;
use platonic_core::market::{validate_market, Asset, Market};
use platonic_core::prob::{validate_stopping_process, BoundMode, FiniteSpace, Filtration, Partition, StoppingProcess};
use platonic_core::scenario::{
    gen_insider_execution_market, gen_insider_market, gen_martingale_market, gen_random_delay, trial_rng, DelayFamily,
    DelayMode, ScenarioConfig, DEFAULT_STATE_CAP,
};
use platonic_core::{int, Error};
use proptest::prelude::*;
use rand::Rng;

fn cfg(seed: u64) -> ScenarioConfig {
    ScenarioConfig { seed, max_states: 8, ..ScenarioConfig::default() }
}

fn constant(rows: usize, info: &Filtration, f: impl Fn(usize) -> usize) -> StoppingProcess {
    StoppingProcess::from_fn(rows, info.clone(), |t, _| f(t))
}

#[test]
fn zero_and_total_delay() {
    let (m, _) = gen_insider_market(3, 1, DEFAULT_STATE_CAP).unwrap();
    let f = &m.trading[0];
    assert_eq!(&delayed_trading_filtration(f, &constant(4, f, |t| t)).unwrap(), f);
    let frozen = delayed_trading_filtration(f, &constant(4, f, |_| 0)).unwrap();
    assert!((0..4).all(|t| frozen.at(t) == f.at(0)));
}

/// `σ(W_0, …, W_t)` on paths of length `len`.
fn natural(len: usize, t: usize) -> Partition {
    Partition::from_key(1 << len, |w| w >> (len - t.min(len)))
}

#[test]
fn undelayed_insider_sees_the_natural_filtration() {
    let (n, h) = (3, 1);
    let (m, delta) = gen_insider_market(n, h, DEFAULT_STATE_CAP).unwrap();
    let delayed = delayed_trading_filtration(&m.trading[0], &delta.delays[0]).unwrap();
    for t in 0..=n {
        if t > h {
            assert_eq!(delayed.at(t), &natural(n + h, t), "t = {t}");
        } else {
            // ℱ_0 is trivial, so the first h + 1 delayed σ-fields are trivial too
            assert_eq!(delayed.at(t), &Partition::trivial(1 << (n + h)));
            assert!(natural(n + h, t).refines(delayed.at(t)));
        }
    }
}

#[test]
fn insider_delay_is_strictly_coarser() {
    let (m, delta) = gen_insider_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    assert!(check_coarseness(&m, &delta).unwrap());
    let delayed = large_delayed_filtrations(&m, &delta).unwrap();
    for t in 1..=2 {
        assert!(delayed[0].at(t).num_atoms() < m.trading_at(0, t).num_atoms());
    }
}

#[test]
fn zero_family_changes_nothing() {
    for trial in 0..10 {
        let (m, _) = gen_martingale_market(&cfg(5), trial).unwrap();
        let zero = InformationDelayFamily::zero(&m);
        assert_eq!(large_delayed_filtrations(&m, &zero).unwrap(), m.trading);
        assert!(check_coarseness(&m, &zero).unwrap());
        let Ok(DelayFamily::Information(d)) = gen_random_delay(&cfg(5), trial, DelayMode::Information { zero: true }, &m)
        else {
            panic!()
        };
        assert!(d.delays.iter().all(|p| (0..p.rows()).all(|t| p.at(t).iter().all(|&v| v == t))));
    }
}

#[test]
fn information_family_validation() {
    let (m, _) = gen_insider_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    let ahead = InformationDelayFamily { delays: vec![constant(3, &Filtration::trivial(8, 3), |t| (t + 1).min(2))] };
    let v = validate_information_family(&m, &ahead);
    assert!(v.iter().any(|x| x.rule == "information delay bounds"));
    let nosy = InformationDelayFamily { delays: vec![constant(3, &m.grand.resized(3).join(&Filtration::constant(Partition::discrete(8), 3)), |t| t)] };
    let v = validate_information_family(&m, &nosy);
    assert!(v.iter().any(|x| x.rule == "delay information exceeds trading filtration"));
    assert!(apply_information_delay(&m, &ahead).is_err());
}

/// Four independent two-step walks, one per asset; bits `2a` and `2a + 1` of
/// the state are the steps of asset `a`.
fn four_walks() -> Market {
    let states = 256;
    let prefix = |a: usize, r: usize, w: usize| (w >> (2 * a)) & ((1 << r) - 1);
    let value = |a: usize, t: usize, w: usize| -> i64 { (0..t).map(|k| if (w >> (2 * a + k)) & 1 == 1 { 1 } else { -1 }).sum() };
    let natural = |assets: &[usize], t: usize| -> Partition {
        let assets = assets.to_vec();
        Partition::from_key(states, move |w| assets.iter().map(|&a| prefix(a, t, w)).collect::<Vec<_>>())
    };
    let filtration = |assets: &[usize]| Filtration::new((0..=2).map(|t| natural(assets, t)).collect()).unwrap();
    let sets: [&[usize]; 4] = [&[0, 1], &[2], &[0, 1, 2], &[0, 1, 2, 3]];
    let assets = (0..4)
        .map(|a| Asset {
            id: format!("S{}", a + 1),
            prices: (0..=2).map(|t| (0..states).map(|w| int(value(a, t, w))).collect()).collect(),
        })
        .collect();
    Market::new(
        FiniteSpace::uniform(states, 2, 2).unwrap(),
        assets,
        sets.iter().map(|s| set(s)).collect(),
        sets.iter().map(|s| filtration(s)).collect(),
        filtration(&[0, 1, 2, 3]),
    )
    .unwrap()
}

#[test]
fn super_slow_trading_mixes_delays_per_asset() {
    let m = four_walks();
    let trivial = Filtration::trivial(256, 3);
    let fast = |t: usize| t;
    let slow = |t: usize| t.saturating_sub(1);
    let sslw = |t: usize| t.saturating_sub(2);
    let family = InformationDelayFamily {
        delays: vec![constant(3, &trivial, fast), constant(3, &trivial, slow), constant(3, &trivial, slow), constant(3, &trivial, sslw)],
    };
    let delayed = large_delayed_filtrations(&m, &family).unwrap();
    let prefix = |a: usize, r: usize, w: usize| (w >> (2 * a)) & ((1 << r) - 1);
    for t in 0..=2 {
        let expected = Partition::from_key(256, |w| {
            (prefix(0, fast(t), w), prefix(1, fast(t), w), prefix(2, slow(t), w), prefix(3, sslw(t), w))
        });
        assert_eq!(delayed[3].at(t), &expected, "SSLW at t = {t}");
    }
    // FAST is a minimal set, so its large filtration is the plain delayed one
    assert_eq!(delayed[0], delayed_trading_filtration(&m.trading[0], &family.delays[0]).unwrap());
    assert!(check_coarseness(&m, &family).unwrap());
    assert!(dominance_lint(&m, &family).is_empty());
    assert!(validate_market(&apply_information_delay(&m, &family).unwrap()).is_empty());
}

#[test]
fn identity_execution_delay_restricts_to_maturity() {
    for trial in 0..10 {
        let (m, _) = gen_martingale_market(&ScenarioConfig { max_extension: 3, ..cfg(9) }, trial).unwrap();
        let n = m.n();
        let d = delayed_market(&m, &ExecutionDelayFamily::identity(&m, n + 1)).unwrap();
        assert_eq!(d.n_ext(), n);
        for (a, b) in d.assets.iter().zip(&m.assets) {
            assert_eq!(a.prices[..], b.prices[..=n]);
        }
        assert_eq!(d.grand, m.grand.resized(n + 1));
        assert_eq!(d.index_system, m.index_system);
    }
}

#[test]
fn shifted_walk_prices() {
    let (n, h) = (2, 1);
    let (m, pi) = gen_insider_execution_market(n, h, DEFAULT_STATE_CAP).unwrap();
    let d = delayed_market(&m, &pi).unwrap();
    for t in 0..=n {
        assert_eq!(d.price(0, t), m.price(0, (t + h).min(m.n_ext())));
    }
}

#[test]
fn execution_validation_catches_bounds() {
    let (m, _) = gen_insider_execution_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    let info = Filtration::trivial(m.num_states(), m.n_ext() + 1);
    let late = ExecutionDelayFamily { delays: vec![ExecutionDelay { process: constant(3, &info, |t| t + 2), cap: None }] };
    assert!(!validate_execution_family(&m, &late).is_empty());
    assert!(delayed_market(&m, &late).is_err());
    let capped = ExecutionDelayFamily { delays: vec![ExecutionDelay { process: constant(3, &info, |t| t + 1), cap: Some(3) }] };
    let v = validate_execution_family(&m, &capped);
    assert!(v.iter().any(|x| x.rule == "execution delay cap"), "{v:?}");
}

#[test]
fn inverse_delay_examples() {
    let pi = vec![vec![1], vec![2], vec![3], vec![3]];
    assert_eq!(invert_delay(&pi, 3), vec![vec![0], vec![0], vec![1], vec![2]]);
    let id: Vec<Vec<usize>> = (0..4).map(|t| vec![t, t]).collect();
    assert_eq!(invert_delay(&id, 3), id);
    let (n, h, n_ext) = (4, 2, 5);
    let shift: Vec<Vec<usize>> = (0..=n).map(|t| vec![(t + h).min(n_ext)]).collect();
    let expected: Vec<Vec<usize>> = (0..=n).map(|t| vec![t.saturating_sub(h)]).collect();
    assert_eq!(invert_delay(&shift, n), expected);
}

fn deterministic(rows: usize, info: &Filtration, f: impl Fn(usize) -> usize) -> ExecutionDelayFamily {
    ExecutionDelayFamily { delays: vec![ExecutionDelay { process: constant(rows, info, f), cap: None }] }
}

#[test]
fn superimposition_examples() {
    let info = Filtration::trivial(2, 7);
    let plus_one = deterministic(5, &info, |t| t + 1);
    let plus_two = deterministic(4, &info, |t| t + 2);
    let hat = superimpose_delays(&plus_one, &plus_two).unwrap();
    assert_eq!(hat.delays[0].process.values, (0..4).map(|t| vec![t + 1; 2]).collect::<Vec<_>>());

    let identity = deterministic(6, &info, |t| t);
    let hat = superimpose_delays(&identity, &plus_two).unwrap();
    assert_eq!(hat.delays[0].process.values, plus_two.delays[0].process.values);

    let hat = superimpose_delays(&plus_one, &deterministic(4, &info, |t| t + 1)).unwrap();
    assert_eq!(hat.delays[0].process.values, (0..4).map(|t| vec![t; 2]).collect::<Vec<_>>());

    assert!(matches!(superimpose_delays(&plus_two, &deterministic(4, &info, |t| t + 1)), Err(Error::Precondition(_))));
    let jumpy = deterministic(5, &info, |t| 2 * t);
    assert!(matches!(superimpose_delays(&jumpy, &plus_two), Err(Error::Precondition(_))));
}

#[test]
fn min_delay_examples() {
    let info = Filtration::trivial(2, 7);
    let mut a = deterministic(4, &info, |t| t + 1);
    a.delays[0].cap = Some(6);
    let mut b = deterministic(4, &info, |t| t + 2);
    b.delays[0].cap = Some(7);
    assert_eq!(min_delay(&[a.clone()]).unwrap(), a);
    assert_eq!(min_delay(&[a.clone(), b.clone()]).unwrap(), a);
    assert_eq!(min_delay(&[b, a.clone()]).unwrap(), a);
    let other = deterministic(4, &Filtration::trivial(2, 6), |t| t + 1);
    assert!(min_delay(&[a, other]).is_err());
    assert!(min_delay(&[]).is_err());
}

#[test]
fn representation_examples() {
    let (m, _) = gen_insider_execution_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    let info = m.trading[0].resized(m.n_ext() + 1);
    assert!(representation_check(&m, &deterministic(3, &info, |t| t)).unwrap());
    let shifted = deterministic(3, &Filtration::trivial(m.num_states(), 4), |t| t + 1);
    assert!(matches!(representation_check(&m, &shifted), Err(Error::Precondition(_))));


    let f = Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)]).unwrap();
    let walk = |id: &str| Asset { id: id.into(), prices: vec![ints(&[0, 0]), ints(&[1, -1])] };
    let joint = Market::new(
        FiniteSpace::uniform(2, 1, 1).unwrap(),
        vec![walk("X"), walk("Y")],
        vec![set(&[0, 1])],
        vec![f.clone()],
        f,
    )
    .unwrap();
    let id = ExecutionDelayFamily::identity(&joint, 2);
    assert!(matches!(representation_check(&joint, &id), Err(Error::Precondition(_))));
}

fn exec_mode(rng: &mut impl Rng, n: usize, n_ext: usize) -> DelayMode {
    DelayMode::Execution {
        cap: rng.gen_bool(0.5).then(|| rng.gen_range(n + 1..=n_ext + 1)),
        continuous: rng.gen_bool(0.5),
        strict: false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_information_families_coarsen(seed in any::<u64>()) {
        let c = cfg(seed);
        let (m, _) = gen_martingale_market(&c, 0).unwrap();
        let Ok(DelayFamily::Information(d)) = gen_random_delay(&c, 1, DelayMode::Information { zero: false }, &m) else {
            panic!()
        };
        prop_assert!(validate_information_family(&m, &d).is_empty());
        prop_assert!(check_coarseness(&m, &d).unwrap());
        let delayed = apply_information_delay(&m, &d).unwrap();
        // monotone in the index-set order, and inside the grand filtration
        prop_assert!(validate_market(&delayed).is_empty());
        for (i, a) in m.index_system.iter().enumerate() {
            for (j, b) in m.index_system.iter().enumerate() {
                if a.is_subset(b) {
                    prop_assert!(delayed.trading[j].refines(&delayed.trading[i]));
                }
            }
        }
    }

    #[test]
    fn random_execution_families_are_valid(seed in any::<u64>()) {
        let c = ScenarioConfig { max_extension: 3, ..cfg(seed) };
        let (m, _) = gen_martingale_market(&c, 0).unwrap();
        let mode = exec_mode(&mut trial_rng(seed, 2), m.n(), m.n_ext());
        let Ok(DelayFamily::Execution(p)) = gen_random_delay(&c, 1, mode, &m) else { panic!() };
        prop_assert!(validate_execution_family(&m, &p).is_empty());
        for d in &p.delays {
            let cap = d.effective_cap(m.n_ext());
            let bounds = BoundMode::Execution { n_ext: m.n_ext(), cap };
            prop_assert!(validate_stopping_process(&d.process, bounds).is_empty());
            prop_assert!(d.process.values.iter().flatten().all(|&v| v < cap));
            if let DelayMode::Execution { continuous: true, .. } = mode {
                prop_assert!(d.process.is_continuous());
            }
        }
        let delayed = delayed_market(&m, &p).unwrap();
        for a in 0..delayed.assets.len() {
            for t in 0..=delayed.n_ext() {
                prop_assert!(delayed.grand.at(t).is_measurable(delayed.price(a, t)));
            }
        }
    }

    #[test]
    fn strict_delays_increase(seed in any::<u64>()) {
        let c = ScenarioConfig { max_extension: 4, ..cfg(seed) };
        let (m, _) = gen_martingale_market(&c, 0).unwrap();
        let mode = DelayMode::Execution { cap: None, continuous: false, strict: true };
        if let Ok(DelayFamily::Execution(p)) = gen_random_delay(&c, 1, mode, &m) {
            prop_assert!(validate_execution_family(&m, &p).is_empty());
            for d in &p.delays {
                prop_assert!(d.process.values.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(x, y)| x < y)));
            }
        }
    }

    #[test]
    fn cap_at_maturity_keeps_delays_inside_the_grid(seed in any::<u64>()) {
        let c = cfg(seed);
        let (m, _) = gen_martingale_market(&c, 0).unwrap();
        let mode = DelayMode::Execution { cap: Some(m.n() + 1), continuous: false, strict: false };
        let Ok(DelayFamily::Execution(p)) = gen_random_delay(&c, 1, mode, &m) else { panic!() };
        prop_assert!(p.delays.iter().all(|d| d.process.values.iter().flatten().all(|&v| v <= m.n())));
    }

    #[test]
    fn min_of_random_brokers_is_a_delay(seed in any::<u64>()) {
        let c = ScenarioConfig { max_extension: 2, ..cfg(seed) };
        let (m, _) = gen_martingale_market(&c, 0).unwrap();
        let mode = DelayMode::Execution { cap: None, continuous: false, strict: false };
        let Ok(DelayFamily::Execution(a)) = gen_random_delay(&c, 1, mode, &m) else { panic!() };
        let Ok(DelayFamily::Execution(mut b)) = gen_random_delay(&c, 2, mode, &m) else { panic!() };
        // brokers share the delay information
        for (x, y) in b.delays.iter_mut().zip(&a.delays) {
            let ok = validate_stopping_process(
                &StoppingProcess::new(x.process.values.clone(), y.process.info.clone()),
                BoundMode::Execution { n_ext: m.n_ext(), cap: m.n_ext() + 1 },
            ).is_empty();
            x.process.info = y.process.info.clone();
            if !ok {
                x.process.values = y.process.values.clone();
            }
        }
        let star = min_delay(&[a.clone(), b.clone()]).unwrap();
        prop_assert!(validate_execution_family(&m, &star).is_empty());
        for ((s, x), y) in star.delays.iter().zip(&a.delays).zip(&b.delays) {
            for t in 0..s.process.rows() {
                for w in 0..m.num_states() {
                    prop_assert!(s.process.values[t][w] <= x.process.values[t][w]);
                    prop_assert!(s.process.values[t][w] <= y.process.values[t][w]);
                }
            }
        }
    }
}
