//! Standalone naming: inspect a model, render its heatmap and produce the
//! cluster-name table.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::view::{filter_rows, normalize_centroids, render_heatmap, write_names};

use crate::args::NamingFlags;
use crate::artifacts::ModelFile;
use crate::cli_error::{CliError, CliResult};
use crate::pipeline::resolve_naming;

#[derive(Debug, Args)]
pub struct NameArgs {
    /// Model JSON produced by `cluster` (or `run --model-out`)
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[command(flatten)]
    pub naming: NamingFlags,
    /// Write the centroid heatmap SVG here
    #[arg(long = "heatmap-out", value_name = "PATH")]
    pub heatmap_out: Option<PathBuf>,
    /// Names TSV output; stdout when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(args: NameArgs) -> CliResult<()> {
    args.naming.validate()?;
    let file = ModelFile::load(&args.model)?;
    let nc = normalize_centroids(&file.model, &file.alphabet)?;

    if let Some(path) = &args.heatmap_out {
        let filtered = filter_rows(&nc, args.naming.row_filter);
        let svg = render_heatmap(&filtered)?;
        fs::write(path, svg)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
    }

    let mut warnings = Vec::new();
    let naming = resolve_naming(&nc, &file.model.sizes, &args.naming, &mut warnings)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let mut bytes = Vec::new();
    write_names(&mut bytes, &naming)?;
    match &args.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}
