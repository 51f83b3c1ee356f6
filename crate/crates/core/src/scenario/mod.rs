//! Structured and random markets, and the experiment harnesses that check
//! the inheritance results on them.

mod experiment;
mod insider;
mod random;

pub use experiment::{run_inheritance_experiment, Counterexample, ExperimentKind, ExperimentReport, TrialRecord};
pub use insider::{gen_insider_execution_market, gen_insider_market, DEFAULT_STATE_CAP};
pub use random::{
    all_subsets, gen_delay_information, gen_execution_delay, gen_information_delay, gen_information_family, gen_random_market,
    random_coarsening, random_filtration, random_index_system, random_measure, random_refinement, trial_rng,
    ExecutionSpec, MarketShape, PriceKind,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::delay::{ExecutionDelayFamily, InformationDelayFamily};
use crate::market::Market;
use crate::{Error, Rational, Result};

/// Parameters shared by the experiment harnesses. Sizes are upper bounds;
/// each trial draws its own dimensions below them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_states: usize,
    pub max_steps: usize,
    /// Largest extension `n_ext − n` for execution experiments.
    pub max_extension: usize,
    pub max_assets: usize,
    pub max_index_sets: usize,
    /// Insider lookahead, and the largest lag for broker/superimposition runs.
    pub lookahead: usize,
    pub max_brokers: usize,
    pub state_cap: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            max_states: 12,
            max_steps: 4,
            max_extension: 2,
            max_assets: 3,
            max_index_sets: 4,
            lookahead: 1,
            max_brokers: 3,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, value) in [
            ("max_states", self.max_states),
            ("max_steps", self.max_steps),
            ("max_assets", self.max_assets),
            ("max_index_sets", self.max_index_sets),
            ("lookahead", self.lookahead),
        ] {
            if value < 1 {
                problems.push(format!("{name} must be at least 1"));
            }
        }
        if self.max_states < 2 {
            problems.push("max_states must be at least 2".into());
        }
        if self.max_brokers < 2 {
            problems.push("max_brokers must be at least 2".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(problems))
        }
    }
}

/// A random martingale market within the bounds of `cfg`, together with
/// the martingale measure it was built from.
pub fn gen_martingale_market(cfg: &ScenarioConfig, trial: u64) -> Result<(Market, Vec<Rational>)> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let n = rng.gen_range(1..=cfg.max_steps);
    let n_ext = n + rng.gen_range(0..=cfg.max_extension);
    let shape = MarketShape {
        num_states: rng.gen_range(2..=cfg.max_states),
        n,
        n_ext,
        num_assets: rng.gen_range(1..=cfg.max_assets),
        max_index_sets: cfg.max_index_sets,
        all_subsets: false,
    };
    gen_random_market(&mut rng, &shape, PriceKind::Martingale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayMode {
    /// `zero` forces `δ(t) = t`.
    Information { zero: bool },
    /// Caps apply to every asset; `None` means `n_ext + 1`.
    Execution { cap: Option<usize>, continuous: bool, strict: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayFamily {
    Information(InformationDelayFamily),
    Execution(ExecutionDelayFamily),
}

/// A random valid delay family for `m`.
pub fn gen_random_delay(cfg: &ScenarioConfig, trial: u64, mode: DelayMode, m: &Market) -> Result<DelayFamily> {
    let mut rng = trial_rng(cfg.seed, trial);
    match mode {
        DelayMode::Information { zero } => Ok(DelayFamily::Information(gen_information_family(&mut rng, m, zero))),
        DelayMode::Execution { cap, continuous, strict } => {
            let mut delays = Vec::with_capacity(m.assets.len());
            for a in 0..m.assets.len() {
                let info = gen_delay_information(&mut rng, m, a, 0)?;
                let spec = ExecutionSpec {
                    rows: m.n() + 1,
                    n_ext: m.n_ext(),
                    cap,
                    lag: None,
                    continuous,
                    start_at_zero: false,
                    strict,
                };
                delays.push(gen_execution_delay(&mut rng, info, &spec, None)?);
            }
            Ok(DelayFamily::Execution(ExecutionDelayFamily { delays }))
        }
    }
}
