//! Flag groups shared across subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use sessionlift_core::cluster::ClusterAlgorithm;
use sessionlift_core::encode::EncodingMode;
use sessionlift_core::log::LogFormat;
use sessionlift_core::session::SessionThreshold;

use crate::cli_error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Xes,
    Csv,
}

impl From<FormatArg> for LogFormat {
    fn from(arg: FormatArg) -> LogFormat {
        match arg {
            FormatArg::Xes => LogFormat::Xes,
            FormatArg::Csv => LogFormat::Csv,
        }
    }
}

/// Picks the explicit format or infers it from the file extension.
pub fn resolve_format(path: &Path, explicit: Option<FormatArg>) -> CliResult<LogFormat> {
    if let Some(format) = explicit {
        return Ok(format.into());
    }
    LogFormat::from_extension(path).ok_or_else(|| {
        CliError::usage(format!(
            "cannot infer log format from {}; pass --input-format/--output-format xes|csv",
            path.display()
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Freq,
    Dur,
}

impl From<EncodingArg> for EncodingMode {
    fn from(arg: EncodingArg) -> EncodingMode {
        match arg {
            EncodingArg::Freq => EncodingMode::Frequency,
            EncodingArg::Dur => EncodingMode::Duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Kmeans,
    Dbscan,
}

impl From<AlgorithmArg> for ClusterAlgorithm {
    fn from(arg: AlgorithmArg) -> ClusterAlgorithm {
        match arg {
            AlgorithmArg::Kmeans => ClusterAlgorithm::Kmeans,
            AlgorithmArg::Dbscan => ClusterAlgorithm::Dbscan,
        }
    }
}

pub fn parse_delta_flag(text: &str) -> Result<SessionThreshold, String> {
    SessionThreshold::parse(text).map_err(|e| e.to_string())
}

pub fn parse_range_flag(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {text:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("need 1 <= a <= b, got {lo}..{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input event log (.xes or .csv)
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted
    #[arg(long, value_enum, value_name = "FMT")]
    pub input_format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct ClusterFlags {
    /// Clustering algorithm
    #[arg(long = "cluster", value_enum, default_value = "kmeans", value_name = "ALGO")]
    pub cluster: AlgorithmArg,
    /// Number of clusters for kmeans
    #[arg(long, value_name = "K", conflicts_with = "k_range")]
    pub k: Option<usize>,
    /// Inclusive k range for elbow-method selection, e.g. 2..15
    #[arg(long = "k-range", value_parser = parse_range_flag, value_name = "A..B")]
    pub k_range: Option<(usize, usize)>,
    /// DBSCAN neighborhood radius; defaults to the median 4-NN distance
    #[arg(long, value_name = "EPS")]
    pub eps: Option<f64>,
    /// DBSCAN density threshold
    #[arg(long = "min-pts", value_name = "N")]
    pub min_pts: Option<usize>,
    /// Seed for kmeans++ initialization
    #[arg(long, default_value_t = 42, value_name = "SEED")]
    pub seed: u64,
    /// Maximum Lloyd's iterations
    #[arg(long = "max-iter", default_value_t = 100, value_name = "N")]
    pub max_iter: usize,
    /// Centroid-movement tolerance; 0 iterates to a fixed point
    #[arg(long, default_value_t = 0.0, value_name = "TOL")]
    pub tol: f64,
    /// Move DBSCAN noise points into the nearest-centroid cluster
    #[arg(long = "reassign-outliers")]
    pub reassign_outliers: bool,
    /// Min-max scale each dimension before clustering
    #[arg(long)]
    pub scale: bool,
}

impl ClusterFlags {
    /// Rejects flag combinations that silently would not do what they say.
    pub fn validate(&self) -> CliResult<()> {
        match self.cluster {
            AlgorithmArg::Kmeans => {
                if self.k.is_none() && self.k_range.is_none() {
                    return Err(CliError::usage("kmeans needs --k or --k-range"));
                }
                if self.eps.is_some() || self.min_pts.is_some() {
                    return Err(CliError::usage("--eps/--min-pts only apply to --cluster dbscan"));
                }
            }
            AlgorithmArg::Dbscan => {
                if self.k.is_some() || self.k_range.is_some() {
                    return Err(CliError::usage("--k/--k-range only apply to --cluster kmeans"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct NamingFlags {
    /// TSV file mapping cluster_id<TAB>name; overrides automatic names
    #[arg(long = "names-file", value_name = "PATH", conflicts_with = "interactive_names")]
    pub names_file: Option<PathBuf>,
    /// Prompt for a name per cluster (stdin), empty line accepts the suggestion
    #[arg(long = "interactive-names")]
    pub interactive_names: bool,
    /// Concatenate activities whose value reaches this fraction of the max
    #[arg(long = "concat-ratio", default_value_t = 0.5, value_name = "R")]
    pub concat_ratio: f64,
    /// Drop heatmap rows whose value stays below this in every cluster
    #[arg(long = "row-filter", default_value_t = 0.05, value_name = "T")]
    pub row_filter: f64,
}

impl NamingFlags {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.concat_ratio > 0.0 && self.concat_ratio <= 1.0) {
            return Err(CliError::usage(format!(
                "--concat-ratio must be in (0,1], got {}",
                self.concat_ratio
            )));
        }
        if !(0.0..=1.0).contains(&self.row_filter) {
            return Err(CliError::usage(format!(
                "--row-filter must be in [0,1], got {}",
                self.row_filter
            )));
        }
        Ok(())
    }
}
