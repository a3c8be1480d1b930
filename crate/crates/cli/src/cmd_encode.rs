//! Standalone encoding: dump the session-vector matrix as CSV.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::encode::{encode_all, write_vectors_csv};
use sessionlift_core::log::parse_log;
use sessionlift_core::session::{sessionize_log, SessionThreshold};

use crate::args::{parse_delta_flag, resolve_format, EncodingArg, InputArgs};
use crate::cli_error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Session threshold, e.g. 15m or 8h (units s/m/h/d)
    #[arg(long, value_parser = parse_delta_flag, value_name = "N<unit>")]
    pub delta: SessionThreshold,
    /// Session encoding
    #[arg(long, value_enum, default_value = "freq", value_name = "ENC")]
    pub encoding: EncodingArg,
    /// Output CSV; stdout when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(args: EncodeArgs) -> CliResult<()> {
    let format = resolve_format(&args.input.input, args.input.input_format)?;
    let data = fs::File::open(&args.input.input)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.input.input.display())))?;
    let log = parse_log(data, format)?;
    let sessionized = sessionize_log(&log, args.delta)?;
    let vectors = encode_all(&log, &sessionized, args.encoding.into());
    let mut bytes = Vec::new();
    write_vectors_csv(&mut bytes, log.alphabet(), &vectors)?;
    match &args.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}
