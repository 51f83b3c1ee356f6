//! Information delays, order-execution delays and the delayed objects they induce.

mod execution;
mod information;

pub use execution::{
    delayed_market, invert_delay, min_delay, representation_check, superimpose_delays, validate_execution_family,
    ExecutionDelay, ExecutionDelayFamily,
};
pub use information::{
    apply_information_delay, check_coarseness, delayed_trading_filtration, dominance_lint, large_delayed_filtrations,
    recursive_delayed_filtrations, validate_information_family, InformationDelayFamily,
};
