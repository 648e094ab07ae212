//! Experiment configuration, command drivers, verification suites and
//! report output for the `entgeo` binary.

mod commands;
mod config;
mod manifest;
mod verify;

pub use commands::run_command;
pub use config::{parse_range, Command, ExperimentConfig, Format, MapKind, Origin, RawConfig, Suite, KEYS};
pub use manifest::{
    csv_body, emit_report, fmt_float, manifest_json, validate_manifest, Failure, ResultRow, RunManifest,
    VerifySummary, CSV_HEADER,
};
pub use verify::run_verify;
