//! Intermediate artifacts that let the pipeline stages run standalone:
//! the model JSON, the planted-truth CSV, and the sessions CSV, plus the
//! write-all-or-remove helper the `run` command uses for its outputs.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sessionlift_core::cluster::ClusterModel;
use sessionlift_core::encode::SessionVector;
use sessionlift_core::log::{format_timestamp, EventLog};
use sessionlift_core::session::SessionSequence;
use sessionlift_core::synth::{GroundTruth, PlantedSession};

use crate::cli_error::{CliError, CliResult};

pub const MODEL_SCHEMA: &str = "sessionlift-model-v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub case_id: String,
    pub session_index: usize,
}

/// Self-contained clustering artifact: the model plus the alphabet and the
/// (case, session) origin of every clustered vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: String,
    pub alphabet: Vec<String>,
    pub origins: Vec<Origin>,
    pub scaled: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub encoding: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_ms: Option<i64>,
    pub model: ClusterModel,
}

impl ModelFile {
    pub fn new(alphabet: Vec<String>, vectors: &[SessionVector], model: ClusterModel) -> Self {
        ModelFile {
            schema: MODEL_SCHEMA.to_string(),
            alphabet,
            origins: vectors
                .iter()
                .map(|v| Origin {
                    case_id: v.case_id.clone(),
                    session_index: v.session_index,
                })
                .collect(),
            scaled: false,
            encoding: None,
            delta_ms: None,
            model,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> CliResult<ModelFile> {
        let data = fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read model {}: {e}", path.display())))?;
        let file: ModelFile = serde_json::from_str(&data)
            .map_err(|e| CliError::data(format!("bad model file {}: {e}", path.display())))?;
        if file.schema != MODEL_SCHEMA {
            return Err(CliError::data(format!(
                "model file {} has schema {:?}, expected {MODEL_SCHEMA:?}",
                path.display(),
                file.schema
            )));
        }
        if file.origins.len() != file.model.assignments.len() {
            return Err(CliError::data(format!(
                "model file {} has {} origins for {} assignments",
                path.display(),
                file.origins.len(),
                file.model.assignments.len()
            )));
        }
        Ok(file)
    }
}

/// Sessions CSV: one row per session with its index range and span.
pub fn sessions_csv(log: &EventLog, sessionized: &[SessionSequence]) -> String {
    let mut out = String::from("case_id,session_index,start_index,end_index,start_ts,end_ts\n");
    for (trace, sequence) in log.traces().iter().zip(sessionized) {
        for (index, session) in sequence.sessions.iter().enumerate() {
            let events = session.events(trace);
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                escape_csv(&trace.case_id),
                index,
                session.start,
                session.end,
                format_timestamp(events.first().unwrap().timestamp),
                format_timestamp(events.last().unwrap().timestamp),
            ));
        }
    }
    out
}

fn escape_csv(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Ground-truth CSV: planted archetype label and event range per session.
pub fn truth_csv(truth: &GroundTruth) -> String {
    let mut out = String::from("case_id,session_index,archetype,start_index,end_index\n");
    for session in &truth.sessions {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            escape_csv(&session.case_id),
            session.session_index,
            session.archetype,
            session.start_index,
            session.end_index,
        ));
    }
    out
}

pub fn read_truth_csv(path: &Path) -> CliResult<GroundTruth> {
    let data = fs::read(path)
        .map_err(|e| CliError::data(format!("cannot read truth {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(data.as_slice());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::data(format!("bad truth CSV: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers != ["case_id", "session_index", "archetype", "start_index", "end_index"] {
        return Err(CliError::data(format!(
            "unexpected truth CSV header: {}",
            headers.join(",")
        )));
    }
    let mut sessions = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::data(format!("truth CSV line {}: {e}", i + 2)))?;
        let field = |n: usize| -> CliResult<usize> {
            record[n]
                .parse()
                .map_err(|_| CliError::data(format!("truth CSV line {}: bad number {:?}", i + 2, &record[n])))
        };
        sessions.push(PlantedSession {
            case_id: record[0].to_string(),
            session_index: field(1)?,
            archetype: field(2)?,
            start_index: field(3)?,
            end_index: field(4)?,
        });
    }
    Ok(GroundTruth { sessions })
}

/// One pending output file. Content is fully materialized before anything is
/// written so a failure can remove every partial artifact.
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact {
            path: path.into(),
            bytes: bytes.into(),
        }
    }
}

/// Writes all artifacts, removing the ones already written when any write
/// fails.
pub fn write_artifacts(artifacts: &[Artifact]) -> CliResult<()> {
    let mut written: Vec<&Path> = Vec::new();
    for artifact in artifacts {
        let result = fs::File::create(&artifact.path).and_then(|mut f| f.write_all(&artifact.bytes));
        if let Err(e) = result {
            for path in written {
                let _ = fs::remove_file(path);
            }
            return Err(CliError::data(format!(
                "cannot write {}: {e}",
                artifact.path.display()
            )));
        }
        written.push(&artifact.path);
    }
    Ok(())
}
