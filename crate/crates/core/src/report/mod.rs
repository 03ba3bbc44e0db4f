//! Configuration, suite orchestration and report emission.

pub mod config;
pub mod export;
pub mod record;
pub mod suites;

pub use config::{load_config, parse_config, AlphaSpec, ConfigError, McConfig, RunConfig, Suite, DEFAULT_SUITES};
pub use export::export_artifacts;
pub use record::{emit_report, CheckRecord, Relation, ReportError, VerificationReport, REPORT_FORMAT};
pub use suites::{run_suite, run_suites, run_suites_with};
