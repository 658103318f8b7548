//! Experiment harness: configs, sweeps, reports, and replay.
//!
//! A [`ExperimentConfig`] names one protocol, one accounting model, an
//! input space, an adversary (or the whole scripted suite), and a budget
//! grid. [`run_sweep`] executes every cell of that grid and returns a
//! [`SweepReport`] whose rows are sorted by key, so the same config and
//! seeds always produce byte-identical CSV and JSON output. Each row
//! stores the transcript hash of its run; [`replay_report`] rebuilds any
//! row from the report alone and checks the hash still matches.

mod config;
mod report;
mod sweep;
mod verify;

pub use config::{
    parse_ratio_i64, parse_ratio_u64, ratio_string, AdversaryKind, AdversarySection, CodesSection,
    ExperimentConfig, InputsSection, ModelSection, OutputSection, ProtocolSection,
};
pub use report::{csv_string, write_reports, CSV_HEADER};
pub use sweep::{
    derive_seed, replay_report, run_attacks, run_sweep, Aggregate, NamedAttack, ReplayOutcome,
    SweepReport, SweepRow,
};
pub use verify::{verify_codes, verify_summary};

use thiserror::Error;

use crate::adversaries::AdversaryError;
use crate::ecc::EccError;
use crate::engine::SessionError;
use crate::protocols::ProtocolError;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A semantically invalid config; the message names the field.
    #[error("config: {0}")]
    Config(String),
    /// Syntactically invalid config text (reported with line and column).
    #[error("config parse: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config serialize: {0}")]
    TomlSer(#[from] toml::ser::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error(transparent)]
    Ecc(#[from] EccError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("no sweep row has transcript hash prefix `{0}`")]
    RowNotFound(String),
}

#[cfg(test)]
mod tests;
