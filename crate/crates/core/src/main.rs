use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use agvdance::cli::{self, CliError, Report, RunSettings, Scenario, EXIT_PARSE};
use agvdance::graph::Graph;

#[derive(Parser)]
#[command(name = "agvdance", version, about = "Two-AGV vector-field simulator on the Y-graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// Trajectory CSV path (numbered per start when there are several).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Draw this many random starts instead of the listed ones.
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scenario field from each start.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check that the scenario field generates a semiflow.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Monotonicity, gap angles and winding class of a docking word.
    CheckWord {
        #[arg(required = true, num_args = 1..)]
        tokens: Vec<String>,
    },
    /// Levels, leftover edges and controller iterates for a cyclic block.
    #[command(alias = "check-pattern")]
    Pattern {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Comma-separated edge ids.
        #[arg(long, value_delimiter = ',')]
        block: Vec<usize>,
        #[arg(long)]
        start: Option<usize>,
    },
    /// Diagnostics for a tuned limit-cycle field.
    Tune {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Gaps between successive docking angles (radians or symbol tokens).
    GapAngles {
        #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
        values: Vec<String>,
    },
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    cli::parse_scenario(&text)
}

fn settings(o: Overrides) -> RunSettings {
    RunSettings {
        out: o.out,
        svg: o.svg,
        seed: o.seed,
        starts: o.starts,
    }
}

fn run(cmd: Command) -> Result<Report, CliError> {
    match cmd {
        Command::Simulate { scenario, overrides } => cli::cmd_simulate(&load(&scenario)?, &settings(overrides)),
        Command::Validate { scenario } => cli::cmd_validate(&load(&scenario)?),
        Command::CheckWord { tokens } => cli::cmd_check_word(&tokens.join(" ")),
        Command::Pattern { scenario, block, start } => {
            let (graph, spec) = match scenario {
                Some(p) => {
                    let s = load(&p)?;
                    (s.graph.build()?, s.pattern)
                }
                None => (Graph::y_graph(), None),
            };
            let block = if block.is_empty() {
                spec.as_ref().map(|p| p.block.clone()).unwrap_or_default()
            } else {
                block
            };
            let start = start.or(spec.map(|p| p.start));
            let Some(start) = start else {
                return Err(CliError::Parse("pattern: no start edge given".into()));
            };
            if block.is_empty() {
                return Err(CliError::Parse("pattern: no block given".into()));
            }
            cli::cmd_pattern(&graph, &block, start)
        }
        Command::Tune { scenario, overrides } => cli::cmd_tune(&load(&scenario)?, &settings(overrides)),
        Command::GapAngles { values } => cli::cmd_gap_angles(&values),
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("bad arguments").trim_start_matches("error: ");
            eprintln!("error[{EXIT_PARSE}]: {first}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    match run(parsed.command) {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::from(r.exit as u8)
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
