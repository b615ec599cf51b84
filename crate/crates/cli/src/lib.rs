//! Scenario registry, configuration ingestion, and report assembly behind
//! the `folcc` command-line tool.

pub mod config;
pub mod formspec;
pub mod report;
pub mod scenarios;

/// Schema tag stamped on every JSON report.
pub const REPORT_SCHEMA: &str = "folcc-report/1";

/// Exit status contract: 0 all checks pass, 1 at least one check fails,
/// 2 configuration error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
    ConfigError,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::CheckFailed => 1,
            Outcome::ConfigError => 2,
        }
    }
}
