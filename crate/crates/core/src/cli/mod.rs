//! Command-line surface: scenario files, simulation runs, validators and
//! CSV/SVG writers.

mod commands;
mod output;
mod scenario;

use thiserror::Error;

use crate::chords::ChordError;
use crate::cspace::CspaceError;
use crate::flow::FlowError;
use crate::patterns::PatternError;

pub use commands::{
    cmd_check_word, cmd_gap_angles, cmd_pattern, cmd_simulate, cmd_tune, cmd_validate, Report, RunSettings,
};
pub use output::{render_svg, trajectory_csv, CSV_HEADER};
pub use scenario::{
    parse_scenario, random_config, render_scenario, FieldSpec, GraphSpec, Harmonics, OutputSpec, PatternSpec,
    PointSpec, Scenario, SimSpec, StartSpec,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Cspace(#[from] CspaceError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_SAFETY: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Csv(_) => EXIT_IO,
            CliError::Flow(FlowError::SafetyViolation { .. })
            | CliError::Chord(ChordError::Flow(FlowError::SafetyViolation { .. })) => EXIT_SAFETY,
            CliError::Parse(_) | CliError::Scenario(_) | CliError::Cspace(_) => EXIT_PARSE,
            CliError::Flow(_) | CliError::Chord(_) | CliError::Pattern(_) => EXIT_INVALID,
        }
    }

    /// One line, `error[<code>]: <message>`.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {msg}", self.exit_code())
    }
}
