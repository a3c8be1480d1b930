//! Standalone abstraction: join a cluster model back onto the log's
//! sessions and emit the abstract event log.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::abstraction::abstract_log;
use sessionlift_core::log::{parse_log, write_log};
use sessionlift_core::session::{sessionize_log, SessionThreshold};
use sessionlift_core::view::{auto_name, load_names, normalize_centroids};

use crate::args::{parse_delta_flag, resolve_format, FormatArg, InputArgs};
use crate::artifacts::ModelFile;
use crate::cli_error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct AbstractArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Session threshold; must match the one the model was built with
    #[arg(long, value_parser = parse_delta_flag, value_name = "N<unit>")]
    pub delta: SessionThreshold,
    /// Model JSON produced by `cluster` (or `run --model-out`)
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Names TSV; automatic naming when omitted
    #[arg(long, value_name = "PATH")]
    pub names: Option<PathBuf>,
    /// Ratio for automatic name concatenation when --names is omitted
    #[arg(long = "concat-ratio", default_value_t = 0.5, value_name = "R")]
    pub concat_ratio: f64,
    /// Abstract log output path (.xes or .csv)
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
    /// Output format; inferred from the extension when omitted
    #[arg(long, value_enum, value_name = "FMT")]
    pub output_format: Option<FormatArg>,
}

pub fn run(args: AbstractArgs) -> CliResult<()> {
    let input_format = resolve_format(&args.input.input, args.input.input_format)?;
    let output_format = resolve_format(&args.output, args.output_format)?;
    let file = ModelFile::load(&args.model)?;
    if let Some(model_delta) = file.delta_ms {
        if model_delta != args.delta.millis() {
            return Err(CliError::data(format!(
                "model was built with delta {model_delta} ms but --delta is {} ms",
                args.delta.millis()
            )));
        }
    }

    let data = fs::File::open(&args.input.input)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.input.input.display())))?;
    let log = parse_log(data, input_format)?;
    let sessionized = sessionize_log(&log, args.delta)?;

    // the model's origins must line up with this log's sessions one-to-one
    let mut expected = file.origins.iter();
    for sequence in &sessionized {
        for index in 0..sequence.session_count() {
            match expected.next() {
                Some(origin) if origin.case_id == sequence.case_id && origin.session_index == index => {}
                Some(origin) => {
                    return Err(CliError::data(format!(
                        "model origin ({}, {}) does not match session ({}, {index}); \
                         was the model built from this log and delta?",
                        origin.case_id, origin.session_index, sequence.case_id
                    )))
                }
                None => {
                    return Err(CliError::data(
                        "model covers fewer sessions than the log".to_string(),
                    ))
                }
            }
        }
    }
    if expected.next().is_some() {
        return Err(CliError::data("model covers more sessions than the log".to_string()));
    }

    let naming = match &args.names {
        Some(path) => {
            let reader = fs::File::open(path)
                .map_err(|e| CliError::data(format!("cannot open names file {}: {e}", path.display())))?;
            load_names(BufReader::new(reader), file.model.cluster_count())?
        }
        None => {
            let nc = normalize_centroids(&file.model, &file.alphabet)?;
            auto_name(&nc, args.concat_ratio)?
        }
    };

    let abstracted = abstract_log(&log, &sessionized, &file.model, &naming)?;
    let mut bytes = Vec::new();
    write_log(&abstracted, output_format, &mut bytes)?;
    fs::write(&args.output, bytes)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", args.output.display())))?;
    eprintln!("wrote {}", args.output.display());
    Ok(())
}
