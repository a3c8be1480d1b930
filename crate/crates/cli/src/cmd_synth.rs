//! Synthetic-log generation with planted ground truth.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::log::write_log;
use sessionlift_core::session::SessionThreshold;
use sessionlift_core::synth::{generate, SynthSpec};

use crate::args::{parse_delta_flag, resolve_format, FormatArg};
use crate::artifacts::truth_csv;
use crate::cli_error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Full generator spec as TOML; overrides the quick flags below
    #[arg(long, value_name = "PATH")]
    pub spec: Option<PathBuf>,
    /// Number of session archetypes with disjoint uniform activity mixes
    #[arg(long, value_name = "N")]
    pub archetypes: Option<usize>,
    /// Alphabet size for the quick spec
    #[arg(long, value_name = "N")]
    pub alphabet: Option<usize>,
    /// Trace count for the quick spec
    #[arg(long, value_name = "N")]
    pub traces: Option<usize>,
    /// Session threshold the gap distributions are built around
    #[arg(long, value_parser = parse_delta_flag, value_name = "N<unit>")]
    pub delta: Option<SessionThreshold>,
    #[arg(long, default_value_t = 42, value_name = "SEED")]
    pub seed: u64,
    /// Generated log output (.xes or .csv)
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Output format; inferred from the extension when omitted
    #[arg(long, value_enum, value_name = "FMT")]
    pub out_format: Option<FormatArg>,
    /// Ground-truth CSV output
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
}

pub fn run(args: SynthArgs) -> CliResult<()> {
    let spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("cannot read spec {}: {e}", path.display())))?;
            toml::from_str::<SynthSpec>(&text)
                .map_err(|e| CliError::data(format!("bad spec {}: {e}", path.display())))?
        }
        None => {
            let (archetypes, alphabet, traces, delta) =
                match (args.archetypes, args.alphabet, args.traces, args.delta) {
                    (Some(a), Some(s), Some(t), Some(d)) => (a, s, t, d),
                    _ => {
                        return Err(CliError::usage(
                            "pass --spec <toml>, or all of --archetypes --alphabet --traces --delta",
                        ))
                    }
                };
            SynthSpec::disjoint(archetypes, alphabet, traces, delta.millis(), args.seed)?
        }
    };

    let format = resolve_format(&args.out, args.out_format)?;
    let (log, truth) = generate(&spec)?;

    let mut bytes = Vec::new();
    write_log(&log, format, &mut bytes)?;
    fs::write(&args.out, bytes)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.out.display())))?;
    fs::write(&args.truth, truth_csv(&truth))
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.truth.display())))?;
    eprintln!(
        "generated {} trace(s), {} event(s), {} planted session(s)",
        log.traces().len(),
        log.event_count(),
        truth.sessions.len()
    );
    Ok(())
}
