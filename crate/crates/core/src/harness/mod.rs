//! Monte Carlo harness: configuration, slot realization, seeded parallel
//! campaigns and result reporting.

pub mod campaign;
pub mod config;
pub mod output;
pub mod presets;
pub mod stats;

pub use campaign::{run_campaign, run_slot, trial_seed, HarnessError, PointResult, Scenario, SweepPoint, UserDraw};
pub use config::{ConfigError, Precision, SimConfig};
pub use stats::{plr, wilson_interval, PlrEstimate, TrialResult};
