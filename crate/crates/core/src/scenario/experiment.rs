use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::insider::{gen_insider_execution_market, gen_insider_market};
use super::random::{
    gen_delay_information, gen_execution_delay, gen_information_family, gen_random_market, trial_rng, ExecutionSpec,
    MarketShape, PriceKind,
};
use super::ScenarioConfig;
use crate::arbitrage::{canonical_text, check_naflp, verify_certificate, MartingaleMeasureCertificate, Verdict};
use crate::delay::{
    apply_information_delay, check_coarseness, delayed_market, min_delay, representation_check, superimpose_delays,
    validate_execution_family, ExecutionDelayFamily, InformationDelayFamily,
};
use crate::document::MarketDocument;
use crate::market::Market;
use crate::prob::Filtration;
use crate::{Error, Result};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Information delays on martingale markets keep NAFLp.
    Information,
    /// Execution delays on markets free of lunch up to the caps keep NAFLp.
    Execution,
    /// Superimposed execution delays: price identity and inheritance.
    Superimpose,
    /// Brokers: NAFLp under the minimum delay implies it for every broker.
    Broker,
    /// Execution delays undone by their inverse information delays.
    Representation,
    /// Insider markets: free lunch before the delay, none after.
    InsiderDemo,
    /// Exactly one oracle certificate on random markets.
    Duality,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Information,
        ExperimentKind::Execution,
        ExperimentKind::Superimpose,
        ExperimentKind::Broker,
        ExperimentKind::Representation,
        ExperimentKind::InsiderDemo,
        ExperimentKind::Duality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Information => "information",
            ExperimentKind::Execution => "execution",
            ExperimentKind::Superimpose => "superimpose",
            ExperimentKind::Broker => "broker",
            ExperimentKind::Representation => "representation",
            ExperimentKind::InsiderDemo => "insider-demo",
            ExperimentKind::Duality => "duality",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub ok: bool,
    /// The premise of the checked implication did not hold.
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after: Option<String>,
    pub detail: String,
    /// Canonical text of every certificate produced, all re-verified.
    pub certificates: Vec<String>,
}

/// A failing trial, reproducible from `(seed, trial)` alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub trial: u64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<MarketDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub kind: ExperimentKind,
    pub config: ScenarioConfig,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub vacuous: usize,
    /// How often each verdict label occurred before the delay was applied.
    pub verdicts_before: BTreeMap<String, usize>,
    pub records: Vec<TrialRecord>,
    pub counterexamples: Vec<Counterexample>,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Runs `cfg.trials` independent trials of `kind` in parallel. Trial errors
/// count as failures and are reported with a reproduction document.
pub fn run_inheritance_experiment(cfg: &ScenarioConfig, kind: ExperimentKind) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<(TrialRecord, Option<MarketDocument>)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut t = Trial::new(cfg, trial);
            let result = match kind {
                ExperimentKind::Information => t.information(),
                ExperimentKind::Execution => t.execution(),
                ExperimentKind::Superimpose => t.superimpose(),
                ExperimentKind::Broker => t.broker(),
                ExperimentKind::Representation => t.representation(),
                ExperimentKind::InsiderDemo => t.insider_demo(),
                ExperimentKind::Duality => t.duality(),
            };
            if let Err(e) = result {
                t.record.ok = false;
                t.record.detail = format!("error: {e}");
            }
            (t.record, t.case)
        })
        .collect();

    let mut report = ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        kind,
        config: cfg.clone(),
        trials: cfg.trials,
        passed: 0,
        failed: 0,
        vacuous: 0,
        verdicts_before: BTreeMap::new(),
        records: Vec::with_capacity(outcomes.len()),
        counterexamples: Vec::new(),
    };
    for (record, case) in outcomes {
        if record.ok {
            report.passed += 1;
        } else {
            report.failed += 1;
            report.counterexamples.push(Counterexample {
                seed: cfg.seed,
                trial: record.trial,
                detail: record.detail.clone(),
                document: case,
            });
        }
        if record.vacuous {
            report.vacuous += 1;
        }
        if let Some(b) = &record.before {
            *report.verdicts_before.entry(b.clone()).or_default() += 1;
        }
        report.records.push(record);
    }
    Ok(report)
}

struct Trial<'a> {
    cfg: &'a ScenarioConfig,
    rng: rand_chacha::ChaCha8Rng,
    record: TrialRecord,
    case: Option<MarketDocument>,
}

impl<'a> Trial<'a> {
    fn new(cfg: &'a ScenarioConfig, trial: u64) -> Self {
        Self {
            cfg,
            rng: trial_rng(cfg.seed, trial),
            record: TrialRecord {
                trial,
                ok: false,
                vacuous: false,
                before: None,
                after: None,
                detail: String::new(),
                certificates: Vec::new(),
            },
            case: None,
        }
    }

    fn keep_case(&mut self, m: &Market, info: Option<&InformationDelayFamily>, exec: Option<&ExecutionDelayFamily>) {
        self.case = Some(MarketDocument::from_model(m, info, exec));
    }

    /// Runs both oracles and re-verifies the certificate.
    fn verdict(&mut self, m: &Market, horizon: usize) -> Result<Verdict> {
        let v = check_naflp(m, horizon)?;
        if !verify_certificate(m, &v, horizon) {
            return Err(Error::OracleDisagreement("certificate failed verification".into()));
        }
        self.record.certificates.push(canonical_text(m, &v));
        Ok(v)
    }

    fn shape(&mut self, n: usize, n_ext: usize, all_subsets: bool) -> MarketShape {
        let cfg = self.cfg;
        MarketShape {
            num_states: self.rng.gen_range(2..=cfg.max_states),
            n,
            n_ext,
            num_assets: self.rng.gen_range(1..=cfg.max_assets),
            max_index_sets: cfg.max_index_sets,
            all_subsets,
        }
    }

    fn mixed_kind(&mut self) -> PriceKind {
        match self.rng.gen_range(0..3) {
            0 => PriceKind::Martingale,
            1 => PriceKind::Perturbed,
            _ => PriceKind::Arbitrary,
        }
    }

    fn delay_info(&mut self, m: &Market, a: usize, lag: usize) -> Result<Filtration> {
        gen_delay_information(&mut self.rng, m, a, lag)
    }

    fn information(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=self.cfg.max_steps);
        let shape = self.shape(n, n, false);
        let (m, q) = gen_random_market(&mut self.rng, &shape, PriceKind::Martingale)?;
        self.keep_case(&m, None, None);
        let constructed = Verdict::NoFreeLunch(MartingaleMeasureCertificate { q });
        let before = self.verdict(&m, n)?;
        self.record.before = Some(before.label().into());
        let zero = self.rng.gen_bool(0.1);
        let family = gen_information_family(&mut self.rng, &m, zero);
        self.keep_case(&m, Some(&family), None);
        let coarse = check_coarseness(&m, &family)?;
        let delayed = apply_information_delay(&m, &family)?;
        let after = self.verdict(&delayed, n)?;
        self.record.after = Some(after.label().into());
        self.record.ok = verify_certificate(&m, &constructed, n) && !before.is_free_lunch() && coarse && !after.is_free_lunch();
        self.record.detail = format!("{} states, n = {n}, coarser: {coarse}", m.num_states());
        Ok(())
    }

    fn execution(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=self.cfg.max_steps);
        let n_ext = n + self.rng.gen_range(0..=self.cfg.max_extension);
        let shape = self.shape(n, n_ext, false);
        let (m, _) = gen_random_market(&mut self.rng, &shape, PriceKind::Martingale)?;
        self.keep_case(&m, None, None);
        let continuous = self.rng.gen_bool(0.5);
        let mut delays = Vec::new();
        for a in 0..m.assets.len() {
            let info = self.delay_info(&m, a, 0)?;
            let cap = self.rng.gen_bool(0.7).then(|| self.rng.gen_range(n + 1..=n_ext + 1));
            let spec = ExecutionSpec {
                rows: n + 1,
                n_ext,
                cap,
                lag: None,
                continuous,
                start_at_zero: false,
                strict: false,
            };
            delays.push(gen_execution_delay(&mut self.rng, info, &spec, None)?);
        }
        let family = ExecutionDelayFamily { delays };
        self.keep_case(&m, None, Some(&family));
        let horizon = family.delays.iter().map(|d| d.effective_cap(n_ext)).max().expect("assets exist") - 1;
        let before = self.verdict(&m, horizon)?;
        self.record.before = Some(before.label().into());
        self.record.vacuous = before.is_free_lunch();
        let delayed = delayed_market(&m, &family)?;
        let after = self.verdict(&delayed, n)?;
        self.record.after = Some(after.label().into());
        self.record.ok = self.record.vacuous || !after.is_free_lunch();
        self.record.detail = format!("{} states, n = {n}, n_ext = {n_ext}, horizon {horizon}", m.num_states());
        Ok(())
    }

    /// Lag, maturity and extended horizons for the broker-style runs:
    /// delays satisfy `π(t) ≤ t + lag` and read information lagged by `lag`.
    fn lagged_setup(&mut self) -> (usize, usize, usize, usize) {
        let lag = self.rng.gen_range(1..=self.cfg.lookahead);
        let n = self.rng.gen_range(1..=self.cfg.max_steps);
        (lag, n, n + lag, n + 2 * lag)
    }

    fn superimpose(&mut self) -> Result<()> {
        let (lag, n, top, n_ext) = self.lagged_setup();
        let shape = self.shape(n, n_ext, false);
        let kind = self.mixed_kind();
        let (m, _) = gen_random_market(&mut self.rng, &shape, kind)?;
        self.keep_case(&m, None, None);
        let mut base = Vec::new();
        let mut target = Vec::new();
        let start_at_zero = self.rng.gen_bool(0.3);
        let target_continuous = self.rng.gen_bool(0.5);
        for a in 0..m.assets.len() {
            let info = self.delay_info(&m, a, lag)?;
            let spec = ExecutionSpec {
                rows: top + 1,
                n_ext,
                cap: Some(top + 1),
                lag: Some(lag),
                continuous: true,
                start_at_zero,
                strict: false,
            };
            let pi = gen_execution_delay(&mut self.rng, info.clone(), &spec, None)?;
            let spec = ExecutionSpec {
                rows: n + 1,
                continuous: target_continuous,
                start_at_zero: false,
                strict: false,
                ..spec
            };
            let pi_tilde = gen_execution_delay(&mut self.rng, info, &spec, Some(&pi.process))?;
            base.push(pi);
            target.push(pi_tilde);
        }
        let pi = ExecutionDelayFamily { delays: base };
        let pi_tilde = ExecutionDelayFamily { delays: target };
        self.keep_case(&m, None, Some(&pi_tilde));

        let base_market = delayed_market(&m, &pi)?;
        let target_market = delayed_market(&m, &pi_tilde)?;
        let hat = superimpose_delays(&pi, &pi_tilde)?;
        let composed = delayed_market(&base_market, &hat)?;
        let identity = composed.assets == target_market.assets;
        // the hat delay must be readable from every trading filtration containing its asset
        let informed = base_market.index_system.iter().enumerate().all(|(i, set)| {
            set.iter().all(|&a| {
                (0..=top).all(|t| base_market.trading_at(i, t).refines(hat.delays[a].process.info.at(t)))
            })
        });
        let before = self.verdict(&base_market, top)?;
        self.record.before = Some(before.label().into());
        self.record.vacuous = before.is_free_lunch();
        let after = self.verdict(&target_market, n)?;
        self.record.after = Some(after.label().into());
        self.record.ok = identity && informed && (self.record.vacuous || !after.is_free_lunch());
        self.record.detail = format!(
            "{:?} prices, lag {lag}, n = {n}, price identity: {identity}, hat information inside ℱ^A: {informed}",
            kind
        );
        Ok(())
    }

    fn broker(&mut self) -> Result<()> {
        let (lag, n, top, n_ext) = self.lagged_setup();
        let shape = self.shape(n, n_ext, false);
        let kind = self.mixed_kind();
        let (m, _) = gen_random_market(&mut self.rng, &shape, kind)?;
        self.keep_case(&m, None, None);
        let k = self.rng.gen_range(2..=self.cfg.max_brokers);
        let infos = (0..m.assets.len())
            .map(|a| self.delay_info(&m, a, lag))
            .collect::<Result<Vec<_>>>()?;
        let mut brokers = Vec::new();
        for _ in 0..k {
            let start_at_zero = self.rng.gen_bool(0.3);
            let mut delays = Vec::new();
            for info in &infos {
                let spec = ExecutionSpec {
                    rows: top + 1,
                    n_ext,
                    cap: Some(top + 1),
                    lag: Some(lag),
                    continuous: true,
                    start_at_zero,
                    strict: false,
                };
                delays.push(gen_execution_delay(&mut self.rng, info.clone(), &spec, None)?);
            }
            brokers.push(ExecutionDelayFamily { delays });
        }
        let star = min_delay(&brokers)?;
        self.keep_case(&m, None, Some(&star));
        let below = brokers.iter().all(|b| {
            b.delays.iter().zip(&star.delays).all(|(d, s)| {
                d.process
                    .values
                    .iter()
                    .zip(&s.process.values)
                    .all(|(x, y)| x.iter().zip(y).all(|(u, v)| v <= u))
            })
        });
        let star_valid = validate_execution_family(&m, &star).is_empty()
            && star.delays.iter().all(|d| d.process.is_continuous());
        let star_market = delayed_market(&m, &star)?;
        let before = self.verdict(&star_market, top)?;
        self.record.before = Some(before.label().into());
        self.record.vacuous = before.is_free_lunch();
        let mut all_clean = true;
        for b in &brokers {
            let mut truncated = b.clone();
            for d in &mut truncated.delays {
                d.process.values.truncate(n + 1);
            }
            let broker_market = delayed_market(&m, &truncated)?;
            let v = self.verdict(&broker_market, n)?;
            all_clean &= !v.is_free_lunch();
        }
        self.record.after = Some(if all_clean { "no-free-lunch" } else { "free-lunch" }.into());
        self.record.ok = below && star_valid && (self.record.vacuous || all_clean);
        self.record.detail = format!("{kind:?} prices, {k} brokers, lag {lag}, n = {n}");
        Ok(())
    }

    fn representation(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=self.cfg.max_steps);
        let n_ext = n + self.rng.gen_range(0..=self.cfg.max_extension);
        let mut shape = self.shape(n, n_ext, true);
        shape.num_states = shape.num_states.min(8);
        let kind = self.mixed_kind();
        let (m, _) = gen_random_market(&mut self.rng, &shape, kind)?;
        let draw = |t: &mut Self, start_at_zero: bool| -> Result<ExecutionDelayFamily> {
            let mut delays = Vec::new();
            for a in 0..m.assets.len() {
                let info = t.delay_info(&m, a, 0)?;
                let spec = ExecutionSpec {
                    rows: n + 1,
                    n_ext,
                    cap: None,
                    lag: None,
                    continuous: true,
                    start_at_zero,
                    strict: false,
                };
                delays.push(gen_execution_delay(&mut t.rng, info, &spec, None)?);
            }
            Ok(ExecutionDelayFamily { delays })
        };
        let family = draw(self, true)?;
        self.keep_case(&m, None, Some(&family));
        let holds = representation_check(&m, &family)?;
        // negative control: a delay starting above zero must be rejected, not answered
        let control = draw(self, false)?;
        let started_late = control.delays.iter().any(|d| d.process.values[0].iter().any(|&v| v > 0));
        let rejected = match representation_check(&m, &control) {
            Err(Error::Precondition(_)) => true,
            Ok(_) => false,
            Err(e) => return Err(e),
        };
        self.record.ok = holds && (rejected == started_late);
        self.record.detail = format!(
            "{} states, {} index sets, n = {n}, reconstructed: {holds}, late start rejected: {}",
            m.num_states(),
            m.index_system.len(),
            if started_late { rejected.to_string() } else { "n/a".into() }
        );
        Ok(())
    }

    fn insider_demo(&mut self) -> Result<()> {
        let trial = self.record.trial as usize;
        let n = 2 + trial % self.cfg.max_steps.max(2).saturating_sub(1).max(1);
        let h = 1 + trial % self.cfg.lookahead.min(n);
        let (m, delta) = gen_insider_market(n, h, self.cfg.state_cap)?;
        self.keep_case(&m, Some(&delta), None);
        let info_before = self.verdict(&m, n)?;
        let info_after = self.verdict(&apply_information_delay(&m, &delta)?, n)?;
        let (m2, pi) = gen_insider_execution_market(n, h, self.cfg.state_cap)?;
        let exec_before = self.verdict(&m2, n)?;
        let exec_after = self.verdict(&delayed_market(&m2, &pi)?, n)?;
        let pairs_ok = info_before.is_free_lunch()
            && !info_after.is_free_lunch()
            && exec_before.is_free_lunch()
            && !exec_after.is_free_lunch();
        self.record.before = Some(info_before.label().into());
        self.record.after = Some(info_after.label().into());
        self.record.ok = pairs_ok;
        self.record.detail = format!(
            "n = {n}, h = {h}: information {} → {}, execution {} → {}",
            info_before.label(),
            info_after.label(),
            exec_before.label(),
            exec_after.label()
        );
        Ok(())
    }

    fn duality(&mut self) -> Result<()> {
        let n = self.rng.gen_range(1..=self.cfg.max_steps);
        let shape = self.shape(n, n, false);
        let kind = self.mixed_kind();
        let (m, _) = gen_random_market(&mut self.rng, &shape, kind)?;
        self.keep_case(&m, None, None);
        let v = self.verdict(&m, n)?;
        self.record.before = Some(v.label().into());
        self.record.ok = true;
        self.record.detail = format!("{kind:?} prices, {} states, n = {n}", m.num_states());
        Ok(())
    }
}
