//! Standalone sessionization: emit one CSV row per session.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::log::parse_log;
use sessionlift_core::session::{sessionize_log, SessionThreshold};

use crate::args::{parse_delta_flag, resolve_format, InputArgs};
use crate::artifacts::sessions_csv;
use crate::cli_error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SessionizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Session threshold, e.g. 15m or 8h (units s/m/h/d)
    #[arg(long, value_parser = parse_delta_flag, value_name = "N<unit>")]
    pub delta: SessionThreshold,
    /// Output CSV; stdout when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(args: SessionizeArgs) -> CliResult<()> {
    let format = resolve_format(&args.input.input, args.input.input_format)?;
    let data = fs::File::open(&args.input.input)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.input.input.display())))?;
    let log = parse_log(data, format)?;
    let sessionized = sessionize_log(&log, args.delta)?;
    let csv = sessions_csv(&log, &sessionized);
    match &args.out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}
