//! External validation: adjusted Rand index of a model's assignments
//! against a planted-truth CSV, joined on (case_id, session_index).

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::synth::adjusted_rand_index;

use crate::artifacts::{read_truth_csv, ModelFile};
use crate::cli_error::{CliError, CliResult, EXIT_CLUSTERING};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model JSON produced by `cluster` (or `run --model-out`)
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// Ground-truth CSV produced by `synth`
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
}

pub fn run(args: EvalArgs) -> CliResult<()> {
    let file = ModelFile::load(&args.model)?;
    let truth = read_truth_csv(&args.truth)?;

    let mut by_origin: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for session in &truth.sessions {
        by_origin.insert((session.case_id.clone(), session.session_index), session.archetype);
    }
    if by_origin.len() != truth.sessions.len() {
        return Err(CliError::data("truth CSV repeats a (case_id, session_index) pair"));
    }

    let mut pred = Vec::with_capacity(file.origins.len());
    let mut labels = Vec::with_capacity(file.origins.len());
    for (origin, assignment) in file.origins.iter().zip(&file.model.assignments) {
        let cluster = assignment.cluster().ok_or_else(|| CliError {
            code: EXIT_CLUSTERING,
            message: format!(
                "session ({}, {}) is noise; rerun clustering with --reassign-outliers",
                origin.case_id, origin.session_index
            ),
        })?;
        let truth_label = by_origin
            .get(&(origin.case_id.clone(), origin.session_index))
            .ok_or_else(|| {
                CliError::data(format!(
                    "truth CSV has no entry for session ({}, {})",
                    origin.case_id, origin.session_index
                ))
            })?;
        pred.push(cluster);
        labels.push(*truth_label);
    }
    if file.origins.len() != truth.sessions.len() {
        return Err(CliError::data(format!(
            "model covers {} sessions but truth lists {}",
            file.origins.len(),
            truth.sessions.len()
        )));
    }

    let ari = adjusted_rand_index(&pred, &labels)?;
    println!("{ari}");
    Ok(())
}
