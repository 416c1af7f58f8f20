//! Data ingestion, run configuration and report serialization.

mod config;
mod dataset;
mod kgrid;
mod plot;
mod report;

pub use config::{parse_config, read_config, SimulateConfig, CONFIG_KEYS};
pub use dataset::{parse_dataset, read_dataset};
pub use kgrid::parse_k_grid;
pub use plot::{write_endpoint_plot, write_hill_plot};
pub use report::{
    config_digest, coverage_table, interval_table, parse_records, write_records, Command,
    CoverageRecord, Record, RunManifest,
};
