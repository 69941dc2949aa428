//! Scenario files, gridded field IO, the experiment harness and the audits
//! behind the `flowpath` command line tool.

pub mod fieldfile;
pub mod harness;
pub mod oracle;
pub mod parallel;
pub mod report;
pub mod scenario;

pub use harness::{Harness, HarnessError, Job};
pub use parallel::RayonExecutor;
pub use report::{RunRecord, RunReport};
pub use scenario::{Prepared, Scenario, ScenarioError};
