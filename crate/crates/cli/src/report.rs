//! Run report: a JSON record of every resolved parameter plus the run's
//! summary numbers and warnings. The parameter echo is sufficient to
//! re-execute the run exactly; nothing time- or machine-dependent goes in.

use serde::Serialize;

use sessionlift_core::cluster::{ClusterModel, ElbowReport};
use sessionlift_core::log::EventLog;
use sessionlift_core::session::SessionSequence;

pub const REPORT_SCHEMA: &str = "sessionlift-report-v1";

#[derive(Debug, Default, Serialize)]
pub struct ReportParameters {
    pub input: String,
    pub input_format: String,
    pub delta_ms: i64,
    pub encoding: String,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_pts: Option<usize>,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
    pub reassign_outliers: bool,
    pub scale: bool,
    pub concat_ratio: f64,
    pub row_filter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names_file: Option<String>,
    pub interactive_names: bool,
    pub output: String,
    pub output_format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heatmap_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elbow_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names_out: Option<String>,
    pub report_out: String,
}

#[derive(Debug, Serialize)]
pub struct LogSummary {
    pub traces: usize,
    pub events: usize,
    pub activities: usize,
}

impl LogSummary {
    pub fn of(log: &EventLog) -> Self {
        LogSummary {
            traces: log.traces().len(),
            events: log.event_count(),
            activities: log.alphabet().len(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SessionSummary {
    pub total: usize,
    pub min_per_trace: usize,
    pub max_per_trace: usize,
}

impl SessionSummary {
    pub fn of(sessionized: &[SessionSequence]) -> Self {
        let counts: Vec<usize> = sessionized.iter().map(|s| s.session_count()).collect();
        SessionSummary {
            total: counts.iter().sum(),
            min_per_trace: counts.iter().copied().min().unwrap_or(0),
            max_per_trace: counts.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ElbowSummary {
    pub candidates: Vec<(usize, f64)>,
    pub selected_k: Option<usize>,
    pub rule: String,
}

impl ElbowSummary {
    pub fn of(report: &ElbowReport) -> Self {
        ElbowSummary {
            candidates: report.entries.iter().map(|e| (e.k, e.wcss)).collect(),
            selected_k: report.selected_k,
            rule: report.rule.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClusteringSummary {
    pub algorithm: String,
    pub clusters: usize,
    pub sizes: Vec<usize>,
    /// Noise count before any reassignment.
    pub noise_found: usize,
    /// Noise count in the final model.
    pub noise_remaining: usize,
    pub wcss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elbow: Option<ElbowSummary>,
}

impl ClusteringSummary {
    pub fn of(
        model: &ClusterModel,
        points: &[Vec<f64>],
        noise_found: usize,
        elbow: Option<&ElbowReport>,
    ) -> Self {
        ClusteringSummary {
            algorithm: model.algorithm.as_str().to_string(),
            clusters: model.cluster_count(),
            sizes: model.sizes.clone(),
            noise_found,
            noise_remaining: model.noise_count(),
            wcss: model.wcss(points),
            elbow: elbow.map(ElbowSummary::of),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub parameters: ReportParameters,
    pub log: LogSummary,
    pub sessions: SessionSummary,
    pub clustering: ClusteringSummary,
    pub names: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
