//! Quasi-kinematic simulator, scenario files and experiment drivers.

// `!(x > 0)` is deliberate: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod harness;
pub mod log;
pub mod scenario;
pub mod schedule;
pub mod sweep;

pub use harness::{run_scenario, run_scenario_with, track_step, RunOptions};
pub use scenario::{Scenario, ScenarioError};
