//! Partition/σ-field algebra on finite filtered probability spaces.

mod filtration;
mod partition;
mod space;
mod stopping;

pub use filtration::Filtration;
pub use partition::{conditional_expectation, meet, refines, sigma_join, Partition};
pub use space::FiniteSpace;
pub use stopping::{
    is_stopping_time, stopped_sigma_field, stopping_time_failure, validate_stopping_process, BoundMode,
    StoppingProcess,
};
