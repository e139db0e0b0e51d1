//! Configuration, binary snapshots and report emission.

pub mod config;
pub mod format;
pub mod report;

pub use config::{parse_config, RunConfig, SobolevIndex};
pub use format::{
    load_field, load_trajectory, read_field, read_trajectory, save_field, save_trajectory, write_field,
    write_trajectory,
};
pub use report::{content_hash, Report, ReportFormat, SCHEMA_VERSION};
