//! Scenario files, the batch runner and reports.

mod format;
mod report;
mod runner;

pub use format::{class_at, class_by_name, parse_scenario, Point, Refinement, Scenario, Task, Threefold};
pub use report::*;
pub use runner::{run, run_batch, RunOptions};
