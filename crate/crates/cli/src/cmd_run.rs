//! End-to-end pipeline: parse, sessionize, encode, cluster, name, abstract,
//! write. All outputs are materialized in memory first and written together,
//! so a failure never leaves partial artifacts behind.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use sessionlift_core::encode::{encode_all, write_vectors_csv, EncodingMode};
use sessionlift_core::log::{parse_log, write_log, Lifecycle};
use sessionlift_core::session::{sessionize_log, SessionThreshold};
use sessionlift_core::view::{filter_rows, normalize_centroids, render_heatmap, write_names};
use sessionlift_core::abstraction::abstract_log;

use crate::args::{parse_delta_flag, resolve_format, ClusterFlags, EncodingArg, FormatArg, InputArgs, NamingFlags};
use crate::artifacts::{write_artifacts, Artifact, ModelFile};
use crate::cli_error::{CliError, CliResult};
use crate::pipeline::{maybe_scale, resolve_naming, run_clustering};
use crate::report::{ClusteringSummary, LogSummary, ReportParameters, RunReport, SessionSummary, REPORT_SCHEMA};

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Session threshold, e.g. 15m or 8h (units s/m/h/d)
    #[arg(long, value_parser = parse_delta_flag, value_name = "N<unit>")]
    pub delta: SessionThreshold,
    /// Session encoding
    #[arg(long, value_enum, default_value = "freq", value_name = "ENC")]
    pub encoding: EncodingArg,
    #[command(flatten)]
    pub cluster: ClusterFlags,
    #[command(flatten)]
    pub naming: NamingFlags,
    /// Abstract log output path (.xes or .csv)
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
    /// Output format; inferred from the extension when omitted
    #[arg(long, value_enum, value_name = "FMT")]
    pub output_format: Option<FormatArg>,
    /// Write the centroid heatmap SVG here
    #[arg(long = "heatmap-out", value_name = "PATH")]
    pub heatmap_out: Option<PathBuf>,
    /// Write the elbow curve CSV here (requires --k-range)
    #[arg(long = "elbow-out", value_name = "PATH")]
    pub elbow_out: Option<PathBuf>,
    /// Dump the session-vector matrix CSV here
    #[arg(long = "vectors-out", value_name = "PATH")]
    pub vectors_out: Option<PathBuf>,
    /// Write the cluster model JSON here
    #[arg(long = "model-out", value_name = "PATH")]
    pub model_out: Option<PathBuf>,
    /// Write the final cluster names TSV here
    #[arg(long = "names-out", value_name = "PATH")]
    pub names_out: Option<PathBuf>,
    /// Run report path; defaults to <output>.report.json
    #[arg(long = "report-out", value_name = "PATH")]
    pub report_out: Option<PathBuf>,
}

pub fn run(args: RunArgs) -> CliResult<()> {
    args.cluster.validate()?;
    args.naming.validate()?;
    if args.elbow_out.is_some() && args.cluster.k_range.is_none() {
        return Err(CliError::usage("--elbow-out needs --k-range"));
    }
    let input_format = resolve_format(&args.input.input, args.input.input_format)?;
    let output_format = resolve_format(&args.output, args.output_format)?;
    let report_out = args
        .report_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.report.json", args.output.display())));

    let mut warnings: Vec<String> = Vec::new();

    // parse + sessionize + encode
    let data = fs::File::open(&args.input.input)
        .map_err(|e| CliError::data(format!("cannot open {}: {e}", args.input.input.display())))?;
    let log = parse_log(data, input_format)?;
    let sessionized = sessionize_log(&log, args.delta)?;
    let mode: EncodingMode = args.encoding.into();
    if mode == EncodingMode::Duration {
        let completions = log
            .traces()
            .iter()
            .flat_map(|t| &t.events)
            .filter(|e| e.lifecycle == Lifecycle::Complete)
            .count();
        if completions > 0 {
            warnings.push(format!(
                "{completions} event(s) carry a complete lifecycle; duration encoding still \
                 treats every event as the start of an execution"
            ));
        }
        let table = sessionlift_core::encode::build_duration_table(&log, &sessionized);
        if !table.fallback_indices().is_empty() {
            let names: Vec<&str> = table
                .fallback_indices()
                .iter()
                .map(|&i| log.alphabet()[i].as_str())
                .collect();
            warnings.push(format!(
                "no duration observable for always-session-final activities ({}), using 0",
                names.join(", ")
            ));
        }
    }
    let vectors = encode_all(&log, &sessionized, mode);
    let points = maybe_scale(vectors.iter().map(|v| v.values.clone()).collect(), args.cluster.scale);

    // cluster
    let outcome = run_clustering(&points, &args.cluster)?;
    warnings.extend(outcome.warnings.iter().cloned());

    // name
    let nc = normalize_centroids(&outcome.model, log.alphabet())?;
    let naming = resolve_naming(&nc, &outcome.model.sizes, &args.naming, &mut warnings)?;

    // abstract
    let abstracted = abstract_log(&log, &sessionized, &outcome.model, &naming)?;

    // materialize artifacts
    let mut artifacts = Vec::new();
    let mut output_bytes = Vec::new();
    write_log(&abstracted, output_format, &mut output_bytes)?;
    artifacts.push(Artifact::new(&args.output, output_bytes));

    if let Some(path) = &args.heatmap_out {
        let filtered = filter_rows(&nc, args.naming.row_filter);
        let svg = render_heatmap(&filtered)?;
        artifacts.push(Artifact::new(path, svg.into_bytes()));
    }
    if let Some(path) = &args.elbow_out {
        let report = outcome.elbow.as_ref().expect("validated: elbow-out needs k-range");
        let mut bytes = Vec::new();
        report.write_csv(&mut bytes)?;
        artifacts.push(Artifact::new(path, bytes));
    }
    if let Some(path) = &args.vectors_out {
        let mut bytes = Vec::new();
        write_vectors_csv(&mut bytes, log.alphabet(), &vectors)?;
        artifacts.push(Artifact::new(path, bytes));
    }
    if let Some(path) = &args.model_out {
        let mut file = ModelFile::new(log.alphabet().to_vec(), &vectors, outcome.model.clone());
        file.scaled = args.cluster.scale;
        file.encoding = Some(mode.as_str().to_string());
        file.delta_ms = Some(args.delta.millis());
        artifacts.push(Artifact::new(path, file.to_json().into_bytes()));
    }
    if let Some(path) = &args.names_out {
        let mut bytes = Vec::new();
        write_names(&mut bytes, &naming)?;
        artifacts.push(Artifact::new(path, bytes));
    }

    let report = RunReport {
        schema: REPORT_SCHEMA,
        parameters: ReportParameters {
            input: args.input.input.display().to_string(),
            input_format: format_name(input_format),
            delta_ms: args.delta.millis(),
            encoding: mode.as_str().to_string(),
            algorithm: outcome.model.algorithm.as_str().to_string(),
            k: args.cluster.k,
            k_range: args.cluster.k_range,
            selected_k: outcome.selected_k,
            eps: outcome.resolved_eps,
            min_pts: outcome.resolved_min_pts,
            seed: args.cluster.seed,
            max_iter: args.cluster.max_iter,
            tol: args.cluster.tol,
            reassign_outliers: args.cluster.reassign_outliers,
            scale: args.cluster.scale,
            concat_ratio: args.naming.concat_ratio,
            row_filter: args.naming.row_filter,
            names_file: args.naming.names_file.as_ref().map(|p| p.display().to_string()),
            interactive_names: args.naming.interactive_names,
            output: args.output.display().to_string(),
            output_format: format_name(output_format),
            heatmap_out: args.heatmap_out.as_ref().map(|p| p.display().to_string()),
            elbow_out: args.elbow_out.as_ref().map(|p| p.display().to_string()),
            vectors_out: args.vectors_out.as_ref().map(|p| p.display().to_string()),
            model_out: args.model_out.as_ref().map(|p| p.display().to_string()),
            names_out: args.names_out.as_ref().map(|p| p.display().to_string()),
            report_out: report_out.display().to_string(),
        },
        log: LogSummary::of(&log),
        sessions: SessionSummary::of(&sessionized),
        clustering: ClusteringSummary::of(&outcome.model, &points, outcome.noise_found, outcome.elbow.as_ref()),
        names: naming.names.clone(),
        warnings: warnings.clone(),
    };
    artifacts.push(Artifact::new(&report_out, report.to_json().into_bytes()));

    write_artifacts(&artifacts)?;

    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    eprintln!(
        "abstracted {} trace(s), {} session(s) into {} cluster(s); wrote {}",
        log.traces().len(),
        report.sessions.total,
        outcome.model.cluster_count(),
        args.output.display()
    );
    Ok(())
}

fn format_name(format: sessionlift_core::log::LogFormat) -> String {
    match format {
        sessionlift_core::log::LogFormat::Xes => "xes".to_string(),
        sessionlift_core::log::LogFormat::Csv => "csv".to_string(),
    }
}
