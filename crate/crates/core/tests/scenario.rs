mod common;

use platonic_core::arbitrage::{check_naflp, verify_certificate, MartingaleMeasureCertificate, Verdict};
use platonic_core::delay::{apply_information_delay, delayed_market};
use platonic_core::document::MarketDocument;
use platonic_core::prob::{conditional_expectation, validate_stopping_process, BoundMode};
use platonic_core::scenario::*;
use platonic_core::Error;

fn cfg(seed: u64) -> ScenarioConfig {
    ScenarioConfig { seed, ..ScenarioConfig::default() }
}

#[test]
fn martingale_markets_are_fair() {
    for trial in 0..40 {
        let (m, q) = gen_martingale_market(&cfg(21), trial).unwrap();
        let v = check_naflp(&m, m.n()).unwrap();
        assert!(!v.is_free_lunch(), "trial {trial}");
        let built = Verdict::NoFreeLunch(MartingaleMeasureCertificate { q });
        assert!(verify_certificate(&m, &built, m.n_ext()));
    }
}

#[test]
fn one_step_prices_are_conditional_means() {
    let c = ScenarioConfig { max_steps: 1, max_extension: 0, ..cfg(4) };
    for trial in 0..20 {
        let (m, q) = gen_martingale_market(&c, trial).unwrap();
        assert_eq!(m.n(), 1);
        for a in 0..m.assets.len() {
            let mean = conditional_expectation(m.price(a, 1), m.grand.at(0), &q).unwrap();
            assert_eq!(m.price(a, 0), &mean[..]);
        }
    }
}

#[test]
fn seeds_give_distinct_markets() {
    let doc = |seed| MarketDocument::from_model(&gen_martingale_market(&cfg(seed), 0).unwrap().0, None, None).to_json();
    assert_ne!(doc(1), doc(2));
    assert_eq!(doc(1), doc(1));
}

#[test]
fn random_delays_validate() {
    let c = ScenarioConfig { max_extension: 3, ..cfg(8) };
    for trial in 0..100 {
        let (m, _) = gen_martingale_market(&c, trial).unwrap();
        match gen_random_delay(&c, trial, DelayMode::Information { zero: false }, &m).unwrap() {
            DelayFamily::Information(d) => {
                assert!(d.delays.iter().all(|p| validate_stopping_process(p, BoundMode::Information).is_empty()))
            }
            DelayFamily::Execution(_) => unreachable!(),
        }
        let mode = DelayMode::Execution { cap: None, continuous: trial % 2 == 0, strict: false };
        match gen_random_delay(&c, trial, mode, &m).unwrap() {
            DelayFamily::Execution(p) => {
                let bounds = BoundMode::Execution { n_ext: m.n_ext(), cap: m.n_ext() + 1 };
                assert!(p.delays.iter().all(|d| validate_stopping_process(&d.process, bounds).is_empty()));
            }
            DelayFamily::Information(_) => unreachable!(),
        }
    }
}

#[test]
fn insider_market_shape() {
    let (m, delta) = gen_insider_market(2, 1, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(m.num_states(), 8);
    assert_eq!(delta.delays[0].values, vec![vec![0; 8], vec![0; 8], vec![1; 8]]);
    let (m0, zero) = gen_insider_market(2, 0, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(apply_information_delay(&m0, &zero).unwrap(), m0);
    let (e0, pi0) = gen_insider_execution_market(2, 0, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(delayed_market(&e0, &pi0).unwrap(), e0);
    assert!(matches!(gen_insider_market(1, 1, DEFAULT_STATE_CAP), Err(Error::Precondition(_))));
    assert!(matches!(gen_insider_market(12, 4, 1 << 10), Err(Error::StateSpaceTooLarge { .. })));
}

#[test]
fn experiment_kinds_parse() {
    for kind in ExperimentKind::ALL {
        assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        assert_eq!(serde_json::to_string(&kind).unwrap(), format!("\"{}\"", kind.name()));
    }
    assert!("nonsense".parse::<ExperimentKind>().is_err());
}

fn run(kind: ExperimentKind, trials: usize) -> ExperimentReport {
    let report = run_inheritance_experiment(&ScenarioConfig { seed: 7, trials, ..ScenarioConfig::default() }, kind).unwrap();
    assert!(report.counterexamples.is_empty(), "{kind}: {:?}", report.counterexamples);
    assert_eq!((report.passed, report.failed), (trials, 0));
    assert_eq!(report.records.len(), trials);
    assert!(report.records.iter().enumerate().all(|(i, r)| r.trial == i as u64));
    report
}

#[test]
fn experiments_pass_on_a_small_budget() {
    for kind in ExperimentKind::ALL {
        run(kind, 12);
    }
}

#[test]
fn experiments_are_reproducible() {
    let c = ScenarioConfig { seed: 99, trials: 10, ..ScenarioConfig::default() };
    let a = run_inheritance_experiment(&c, ExperimentKind::Superimpose).unwrap();
    let b = run_inheritance_experiment(&c, ExperimentKind::Superimpose).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn insider_demo_reports_the_converse_failure() {
    let report = run(ExperimentKind::InsiderDemo, 3);
    for r in &report.records {
        assert_eq!(r.before.as_deref(), Some("free-lunch"));
        assert_eq!(r.after.as_deref(), Some("no-free-lunch"));
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let c = ScenarioConfig { max_states: 1, ..ScenarioConfig::default() };
    assert!(run_inheritance_experiment(&c, ExperimentKind::Duality).is_err());
}
