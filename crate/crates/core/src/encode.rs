//! Session-to-vector encodings over the log's activity alphabet.
//!
//! Two encodings ship: frequency (occurrence counts per activity) and
//! duration (average time from an event to its within-session successor).
//! Both produce one dimension per activity in the alphabet's lexicographic
//! order, so a session becomes a point in a fixed cartesian space. New
//! encodings plug in through [`Encoder`] without touching clustering.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::{EventLog, Trace};
use crate::session::{Session, SessionSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingMode {
    Frequency,
    Duration,
}

impl EncodingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncodingMode::Frequency => "frequency",
            EncodingMode::Duration => "duration",
        }
    }
}

impl std::str::FromStr for EncodingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "freq" | "frequency" => Ok(EncodingMode::Frequency),
            "dur" | "duration" => Ok(EncodingMode::Duration),
            other => Err(Error::Parameter(format!("unknown encoding {other:?} (use freq|dur)"))),
        }
    }
}

/// One session as a point: `values[i]` belongs to `alphabet[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionVector {
    pub case_id: String,
    pub session_index: usize,
    pub values: Vec<f64>,
}

/// Log-wide average duration per activity, computed from events that are not
/// the last of their session. Activities never observed non-final fall back
/// to zero and are reported so callers can warn.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationTable {
    averages: Vec<f64>,
    fallback_indices: Vec<usize>,
}

impl DurationTable {
    pub fn average(&self, activity_index: usize) -> f64 {
        self.averages[activity_index]
    }

    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    /// Alphabet indices whose average was undefined (always session-final).
    pub fn fallback_indices(&self) -> &[usize] {
        &self.fallback_indices
    }
}

/// A session encoding policy. Implementations must emit one value per
/// alphabet entry, in alphabet order.
pub trait Encoder {
    fn encode(&self, trace: &Trace, session: &Session, log: &EventLog) -> Vec<f64>;
}

pub struct FrequencyEncoder;

impl Encoder for FrequencyEncoder {
    fn encode(&self, trace: &Trace, session: &Session, log: &EventLog) -> Vec<f64> {
        encode_frequency(trace, session, log)
    }
}

pub struct DurationEncoder<'a> {
    table: &'a DurationTable,
}

impl<'a> DurationEncoder<'a> {
    pub fn new(table: &'a DurationTable) -> Self {
        DurationEncoder { table }
    }
}

impl Encoder for DurationEncoder<'_> {
    fn encode(&self, trace: &Trace, session: &Session, log: &EventLog) -> Vec<f64> {
        encode_duration(trace, session, self.table, log)
    }
}

/// Occurrence count of each activity within the session.
pub fn encode_frequency(trace: &Trace, session: &Session, log: &EventLog) -> Vec<f64> {
    let mut values = vec![0.0; log.alphabet().len()];
    for event in session.events(trace) {
        let idx = log
            .activity_index(&event.activity)
            .expect("session activity present in log alphabet");
        values[idx] += 1.0;
    }
    values
}

/// Builds the log-wide duration table from an already sessionized log.
pub fn build_duration_table(log: &EventLog, sessionized: &[SessionSequence]) -> DurationTable {
    let dims = log.alphabet().len();
    let mut sums = vec![0.0f64; dims];
    let mut counts = vec![0usize; dims];
    for (trace, sequence) in log.traces().iter().zip(sessionized) {
        for session in &sequence.sessions {
            let events = session.events(trace);
            for pair in events.windows(2) {
                let idx = log
                    .activity_index(&pair[0].activity)
                    .expect("session activity present in log alphabet");
                sums[idx] += (pair[1].timestamp - pair[0].timestamp) as f64;
                counts[idx] += 1;
            }
        }
    }
    let mut averages = vec![0.0; dims];
    let mut fallback_indices = Vec::new();
    for i in 0..dims {
        if counts[i] > 0 {
            averages[i] = sums[i] / counts[i] as f64;
        } else {
            fallback_indices.push(i);
        }
    }
    DurationTable {
        averages,
        fallback_indices,
    }
}

/// Average within-session duration of each activity's non-final occurrences;
/// the session-final activity borrows the log-wide average when it has no
/// other occurrence in the session; absent activities stay at zero.
pub fn encode_duration(
    trace: &Trace,
    session: &Session,
    table: &DurationTable,
    log: &EventLog,
) -> Vec<f64> {
    let dims = log.alphabet().len();
    let mut sums = vec![0.0f64; dims];
    let mut counts = vec![0usize; dims];
    let events = session.events(trace);
    for pair in events.windows(2) {
        let idx = log
            .activity_index(&pair[0].activity)
            .expect("session activity present in log alphabet");
        sums[idx] += (pair[1].timestamp - pair[0].timestamp) as f64;
        counts[idx] += 1;
    }
    let mut values = vec![0.0; dims];
    for i in 0..dims {
        if counts[i] > 0 {
            values[i] = sums[i] / counts[i] as f64;
        }
    }
    if let Some(last) = events.last() {
        let idx = log
            .activity_index(&last.activity)
            .expect("session activity present in log alphabet");
        if counts[idx] == 0 {
            values[idx] = table.average(idx);
        }
    }
    values
}

/// Encodes every session of the log, multiplicity preserved, in trace order
/// then session order. Builds the duration table internally when needed.
pub fn encode_all(
    log: &EventLog,
    sessionized: &[SessionSequence],
    mode: EncodingMode,
) -> Vec<SessionVector> {
    match mode {
        EncodingMode::Frequency => encode_all_with(log, sessionized, &FrequencyEncoder),
        EncodingMode::Duration => {
            let table = build_duration_table(log, sessionized);
            encode_all_with(log, sessionized, &DurationEncoder::new(&table))
        }
    }
}

/// Encodes every session with a caller-supplied encoder.
pub fn encode_all_with(
    log: &EventLog,
    sessionized: &[SessionSequence],
    encoder: &dyn Encoder,
) -> Vec<SessionVector> {
    let mut vectors = Vec::new();
    for (trace, sequence) in log.traces().iter().zip(sessionized) {
        for (session_index, session) in sequence.sessions.iter().enumerate() {
            vectors.push(SessionVector {
                case_id: trace.case_id.clone(),
                session_index,
                values: encoder.encode(trace, session, log),
            });
        }
    }
    vectors
}

/// Dumps the vector matrix as CSV: `case_id,session_index,<activity...>`.
pub fn write_vectors_csv<W: Write>(
    sink: W,
    alphabet: &[String],
    vectors: &[SessionVector],
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    let mut header = vec!["case_id".to_string(), "session_index".to_string()];
    header.extend(alphabet.iter().cloned());
    writer.write_record(&header).map_err(io_err)?;
    for vector in vectors {
        let mut record = vec![vector.case_id.clone(), vector.session_index.to_string()];
        record.extend(vector.values.iter().map(|v| format_value(*v)));
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush()?;
    Ok(())
}

// Integers print without a trailing ".0" so frequency dumps stay readable.
fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Reads a vector matrix written by [`write_vectors_csv`]. Returns the
/// alphabet from the header and the vectors in file order.
pub fn read_vectors_csv<R: Read>(source: R) -> Result<(Vec<String>, Vec<SessionVector>)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let parse_err = |line: usize, msg: String| Error::Parse {
        format: "vectors-csv",
        position: format!("line {line}"),
        message: msg,
    };
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let fields: Vec<&str> = headers.iter().collect();
    if fields.len() < 2 || fields[0] != "case_id" || fields[1] != "session_index" {
        return Err(parse_err(
            1,
            "expected header case_id,session_index,<activities...>".into(),
        ));
    }
    let alphabet: Vec<String> = fields[2..].iter().map(|s| s.to_string()).collect();
    let mut vectors = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let line = index + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() != alphabet.len() + 2 {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", alphabet.len() + 2, record.len()),
            ));
        }
        let session_index: usize = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad session index {:?}", &record[1])))?;
        let values = record
            .iter()
            .skip(2)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("bad numeric value {v:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        vectors.push(SessionVector {
            case_id: record[0].to_string(),
            session_index,
            values,
        });
    }
    Ok((alphabet, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::Event;
    use crate::session::{sessionize_log, SessionThreshold};

    /// The worked single-trace log <a1,b3,c4,a10,d13> with delta 5.
    fn example_log() -> (EventLog, Vec<SessionSequence>) {
        let log = EventLog::new(vec![Trace::new(
            "c",
            vec![
                Event::new("c", "a", 1),
                Event::new("c", "b", 3),
                Event::new("c", "c", 4),
                Event::new("c", "a", 10),
                Event::new("c", "d", 13),
            ],
        )])
        .unwrap();
        let sessions = sessionize_log(&log, SessionThreshold::from_millis(5).unwrap()).unwrap();
        (log, sessions)
    }

    #[test]
    fn frequency_vectors_match_worked_example() {
        let (log, sessions) = example_log();
        let vectors = encode_all(&log, &sessions, EncodingMode::Frequency);
        assert_eq!(vectors.len(), 2);
        assert_eq!(vectors[0].values, [1.0, 1.0, 1.0, 0.0]);
        assert_eq!(vectors[1].values, [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(vectors[0].session_index, 0);
        assert_eq!(vectors[1].session_index, 1);
    }

    #[test]
    fn repeated_activity_counts_accumulate() {
        let log = EventLog::new(vec![Trace::new(
            "c",
            vec![
                Event::new("c", "a", 1),
                Event::new("c", "a", 2),
                Event::new("c", "a", 3),
                Event::new("c", "b", 100_000),
            ],
        )])
        .unwrap();
        let sessions = sessionize_log(&log, SessionThreshold::from_millis(10).unwrap()).unwrap();
        let vectors = encode_all(&log, &sessions, EncodingMode::Frequency);
        assert_eq!(vectors[0].values, [3.0, 0.0]);
    }

    // Hand-enumerated: a is non-final twice (durations 2 and 3), b once
    // (duration 1), c and d are always session-final.
    #[test]
    fn duration_table_matches_hand_enumeration() {
        let (log, sessions) = example_log();
        let table = build_duration_table(&log, &sessions);
        assert_eq!(table.average(0), 2.5); // a
        assert_eq!(table.average(1), 1.0); // b
        assert_eq!(table.average(2), 0.0); // c: fallback
        assert_eq!(table.average(3), 0.0); // d: fallback
        assert_eq!(table.fallback_indices(), [2, 3]);
    }

    #[test]
    fn duration_vectors_match_worked_example() {
        let (log, sessions) = example_log();
        let table = build_duration_table(&log, &sessions);
        let vectors = encode_all(&log, &sessions, EncodingMode::Duration);
        assert_eq!(vectors[0].values, [2.0, 1.0, table.average(2), 0.0]);
        assert_eq!(vectors[1].values, [3.0, 0.0, 0.0, table.average(3)]);
    }

    // A single-event session borrows the log-wide average for its activity.
    #[test]
    fn session_final_only_activity_uses_table_average() {
        let log = EventLog::new(vec![
            Trace::new(
                "c1",
                vec![
                    Event::new("c1", "a", 1),
                    Event::new("c1", "b", 3),
                    Event::new("c1", "c", 4),
                    Event::new("c1", "a", 10),
                    Event::new("c1", "d", 13),
                ],
            ),
            Trace::new("c2", vec![Event::new("c2", "a", 5)]),
        ])
        .unwrap();
        let sessions = sessionize_log(&log, SessionThreshold::from_millis(5).unwrap()).unwrap();
        let table = build_duration_table(&log, &sessions);
        assert_eq!(table.average(0), 2.5);
        let vectors = encode_all(&log, &sessions, EncodingMode::Duration);
        // trace c2 contributes the third vector: single session <a5>
        assert_eq!(vectors[2].values, [2.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn multiset_semantics_keep_duplicates() {
        let log = EventLog::new(vec![
            Trace::new("c1", vec![Event::new("c1", "a", 1)]),
            Trace::new("c2", vec![Event::new("c2", "a", 1)]),
        ])
        .unwrap();
        let sessions = sessionize_log(&log, SessionThreshold::from_millis(5).unwrap()).unwrap();
        let vectors = encode_all(&log, &sessions, EncodingMode::Frequency);
        assert_eq!(vectors.len(), 2);
        assert_eq!(vectors[0].values, vectors[1].values);
    }

    #[test]
    fn empty_session_list_is_empty_multiset() {
        let log = EventLog::new(vec![Trace::new("c", vec![Event::new("c", "a", 1)])]).unwrap();
        let vectors = encode_all(&log, &[], EncodingMode::Frequency);
        assert!(vectors.is_empty());
    }

    // Naive per-activity rescan as an independent check of the counts.
    #[test]
    fn frequency_counts_match_naive_scan() {
        let (log, sessions) = example_log();
        let vectors = encode_all(&log, &sessions, EncodingMode::Frequency);
        for (trace, sequence) in log.traces().iter().zip(&sessions) {
            for (si, session) in sequence.sessions.iter().enumerate() {
                let vector = vectors
                    .iter()
                    .find(|v| v.case_id == trace.case_id && v.session_index == si)
                    .unwrap();
                for (ai, activity) in log.alphabet().iter().enumerate() {
                    let naive = session
                        .events(trace)
                        .iter()
                        .filter(|e| &e.activity == activity)
                        .count();
                    assert_eq!(vector.values[ai], naive as f64);
                }
            }
        }
    }

    #[test]
    fn vectors_csv_round_trip() {
        let (log, sessions) = example_log();
        let vectors = encode_all(&log, &sessions, EncodingMode::Duration);
        let mut out = Vec::new();
        write_vectors_csv(&mut out, log.alphabet(), &vectors).unwrap();
        let (alphabet, again) = read_vectors_csv(out.as_slice()).unwrap();
        assert_eq!(alphabet, log.alphabet());
        assert_eq!(again, vectors);
    }
}
