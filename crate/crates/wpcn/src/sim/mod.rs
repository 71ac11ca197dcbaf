//! Scenario-driven simulation: per-slot loop wiring channel draws → policy
//! decision → queue updates → metrics, with reproducible seeding, CSV/JSON
//! export, and concurrent execution of independent runs.

mod config;
mod engine;
mod export;
mod metrics;
pub mod presets;

pub use config::{PolicySpec, ScenarioConfig};
pub use engine::{run_many, run_scenario};
pub use export::{export, RunSummary};
pub use metrics::{
    aggregate, convergence_time, Aggregate, QueueSnapshot, RunMetrics, SlotRecord, ViolationCounts,
};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::policy_wpt::PolicyError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("policy error{}: {source}", slot_context(.slot))]
    Policy {
        slot: Option<usize>,
        #[source]
        source: PolicyError,
    },
    #[error("channel error{}: {source}", slot_context(.slot))]
    Channel {
        slot: Option<usize>,
        #[source]
        source: ChannelError,
    },
    #[error("empty trace")]
    EmptyTrace,
}

fn slot_context(slot: &Option<usize>) -> String {
    match slot {
        Some(l) => format!(" at slot {l}"),
        None => String::new(),
    }
}
