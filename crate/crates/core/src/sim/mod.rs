//! Discrete-time simulation: per interval the engine propagates the
//! constellation, generates tasks, runs the selected scheme, draws dish
//! failures and steps every battery.

mod config;
mod engine;
pub mod metrics;
pub mod output;
pub mod rng;
pub mod tasks;

pub use config::{
    AuctionSection, BatterySection, ConstellationSection, NetworkSection, Range, ReliabilitySection,
    ScenarioConfig, TaskSection, SWEEPABLE,
};
pub use engine::{
    run_scenario, run_scenario_with_dishes, select_platform_satellite, DishOutcome, OffloadOutcome,
    Retransmission, ScenarioResult, SimState, Simulation, TranscriptRow,
};
pub use metrics::{IntervalMetrics, ScenarioSummary, SeriesStats};
pub use output::write_outputs;
pub use tasks::{generate_tasks, GeneratedTask};
