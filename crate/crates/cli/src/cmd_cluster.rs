//! Standalone clustering: vectors CSV in, model JSON (and optionally the
//! elbow curve CSV) out.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::encode::read_vectors_csv;

use crate::args::ClusterFlags;
use crate::artifacts::ModelFile;
use crate::cli_error::{CliError, CliResult};
use crate::pipeline::{maybe_scale, run_clustering};

#[derive(Debug, Args)]
pub struct ClusterCmdArgs {
    /// Session-vector matrix produced by `encode` (or `run --vectors-out`)
    #[arg(long, value_name = "PATH")]
    pub vectors: PathBuf,
    #[command(flatten)]
    pub cluster: ClusterFlags,
    /// Model JSON output; stdout when omitted
    #[arg(long = "model-out", value_name = "PATH")]
    pub model_out: Option<PathBuf>,
    /// Write the elbow curve CSV here (requires --k-range)
    #[arg(long = "elbow-out", value_name = "PATH")]
    pub elbow_out: Option<PathBuf>,
}

pub fn run(args: ClusterCmdArgs) -> CliResult<()> {
    args.cluster.validate()?;
    if args.elbow_out.is_some() && args.cluster.k_range.is_none() {
        return Err(CliError::usage("--elbow-out needs --k-range"));
    }
    let data = fs::File::open(&args.vectors)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.vectors.display())))?;
    let (alphabet, vectors) = read_vectors_csv(data)?;
    let points = maybe_scale(vectors.iter().map(|v| v.values.clone()).collect(), args.cluster.scale);
    let outcome = run_clustering(&points, &args.cluster)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    if let Some(path) = &args.elbow_out {
        let report = outcome.elbow.as_ref().expect("validated: elbow-out needs k-range");
        let mut bytes = Vec::new();
        report.write_csv(&mut bytes)?;
        fs::write(path, bytes)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    }

    let mut file = ModelFile::new(alphabet, &vectors, outcome.model);
    file.scaled = args.cluster.scale;
    let json = file.to_json();
    match &args.model_out {
        Some(path) => fs::write(path, json)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(json.as_bytes())?,
    }
    Ok(())
}
