//! Core event-log data model and file formats.
//!
//! An [`EventLog`] holds timestamp-sorted [`Trace`]s keyed by unique case id
//! plus the log's activity alphabet (sorted lexicographically, no duplicates).
//! Timestamps are normalized to UTC milliseconds since the Unix epoch so that
//! gap arithmetic happens on a single scale.

mod csv_format;
mod xes;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Milliseconds since the Unix epoch, UTC.
pub type TimestampMs = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lifecycle {
    Start,
    Complete,
    Unspecified,
}

impl Lifecycle {
    pub fn as_str(&self) -> &'static str {
        match self {
            Lifecycle::Start => "start",
            Lifecycle::Complete => "complete",
            Lifecycle::Unspecified => "",
        }
    }
}

/// One low-level occurrence: an activity label observed at an instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub case_id: String,
    pub activity: String,
    pub timestamp: TimestampMs,
    pub lifecycle: Lifecycle,
    /// Attributes outside the core schema, preserved on XES round-trips.
    /// BTreeMap so write order is deterministic.
    pub extra: BTreeMap<String, String>,
}

impl Event {
    pub fn new(case_id: impl Into<String>, activity: impl Into<String>, timestamp: TimestampMs) -> Self {
        Event {
            case_id: case_id.into(),
            activity: activity.into(),
            timestamp,
            lifecycle: Lifecycle::Unspecified,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_lifecycle(mut self, lifecycle: Lifecycle) -> Self {
        self.lifecycle = lifecycle;
        self
    }
}

/// Timestamp-ordered sequence of events for one case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(case_id: impl Into<String>, events: Vec<Event>) -> Self {
        Trace {
            case_id: case_id.into(),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// A collection of traces with unique case ids and a fixed activity alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<Trace>,
    alphabet: Vec<String>,
}

impl EventLog {
    /// Builds a log from raw traces: sorts each trace stably by timestamp,
    /// checks case-id consistency and uniqueness, derives the alphabet.
    pub fn new(mut traces: Vec<Trace>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut alphabet = BTreeSet::new();
        for trace in &mut traces {
            if !seen.insert(trace.case_id.clone()) {
                return Err(Error::validation(
                    &trace.case_id,
                    "duplicate case id across traces",
                ));
            }
            for event in &trace.events {
                if event.activity.is_empty() {
                    return Err(Error::validation(&trace.case_id, "event with empty activity"));
                }
                if event.case_id != trace.case_id {
                    return Err(Error::validation(
                        &trace.case_id,
                        format!("event carries foreign case id {:?}", event.case_id),
                    ));
                }
                alphabet.insert(event.activity.clone());
            }
            // stable sort: equal timestamps keep input order
            trace.events.sort_by_key(|e| e.timestamp);
        }
        Ok(EventLog {
            traces,
            alphabet: alphabet.into_iter().collect(),
        })
    }

    pub fn empty() -> Self {
        EventLog {
            traces: Vec::new(),
            alphabet: Vec::new(),
        }
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    /// Lexicographically sorted distinct activity labels.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn activity_index(&self, activity: &str) -> Option<usize> {
        self.alphabet.binary_search_by(|a| a.as_str().cmp(activity)).ok()
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    Xes,
    Csv,
}

impl LogFormat {
    pub fn from_extension(path: &std::path::Path) -> Option<LogFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("xes") => Some(LogFormat::Xes),
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Some(LogFormat::Csv),
            _ => None,
        }
    }
}

impl std::str::FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xes" => Ok(LogFormat::Xes),
            "csv" => Ok(LogFormat::Csv),
            other => Err(Error::Parameter(format!("unknown log format {other:?}"))),
        }
    }
}

/// Reads a log in the given format. Events within each trace come out sorted
/// by timestamp; the alphabet is derived from the content.
pub fn parse_log<R: Read>(mut source: R, format: LogFormat) -> Result<EventLog> {
    let mut data = Vec::new();
    source.read_to_end(&mut data)?;
    match format {
        LogFormat::Xes => xes::parse(&data),
        LogFormat::Csv => csv_format::parse(&data),
    }
}

/// Writes a log so that `parse_log(write_log(L, f), f)` reproduces the
/// retained fields (activity, timestamp, case id, lifecycle; extra attributes
/// for XES).
pub fn write_log<W: Write>(log: &EventLog, format: LogFormat, sink: W) -> Result<()> {
    match format {
        LogFormat::Xes => xes::write(log, sink),
        LogFormat::Csv => csv_format::write(log, sink),
    }
}

/// Trace concatenation: events of `second` appended after `first`.
pub fn concat_traces(first: &Trace, second: &Trace) -> Result<Trace> {
    if let (Some(last), Some(head)) = (first.events.last(), second.events.first()) {
        if last.timestamp > head.timestamp {
            return Err(Error::OrderViolation(format!(
                "cannot concatenate: first trace ends at {} after second starts at {}",
                last.timestamp, head.timestamp
            )));
        }
    }
    let case_id = if first.is_empty() && !second.is_empty() {
        second.case_id.clone()
    } else {
        first.case_id.clone()
    };
    if !first.is_empty() && !second.is_empty() && first.case_id != second.case_id {
        return Err(Error::validation(
            &first.case_id,
            format!("cannot concatenate traces of different cases ({:?})", second.case_id),
        ));
    }
    let mut events = first.events.clone();
    events.extend(second.events.iter().cloned());
    Ok(Trace { case_id, events })
}

/// Parses an ISO-8601 timestamp into UTC milliseconds.
pub fn parse_timestamp(text: &str) -> Result<TimestampMs> {
    let parsed: DateTime<chrono::FixedOffset> = DateTime::parse_from_rfc3339(text)
        .map_err(|e| Error::Parameter(format!("unparseable timestamp {text:?}: {e}")))?;
    Ok(parsed.with_timezone(&Utc).timestamp_millis())
}

/// Formats UTC milliseconds as ISO-8601 with millisecond precision.
pub fn format_timestamp(ms: TimestampMs) -> String {
    let dt = Utc
        .timestamp_millis_opt(ms)
        .single()
        .expect("timestamp in representable range");
    dt.format("%Y-%m-%dT%H:%M:%S%.3f+00:00").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(case: &str, act: &str, ts: i64) -> Event {
        Event::new(case, act, ts)
    }

    #[test]
    fn alphabet_sorted_and_distinct() {
        let log = EventLog::new(vec![
            Trace::new("c2", vec![ev("c2", "b", 5), ev("c2", "a", 9)]),
            Trace::new("c1", vec![ev("c1", "c", 1), ev("c1", "a", 2)]),
        ])
        .unwrap();
        assert_eq!(log.alphabet(), ["a", "b", "c"]);
        assert_eq!(log.activity_index("b"), Some(1));
        assert_eq!(log.activity_index("z"), None);
    }

    #[test]
    fn traces_sorted_stably() {
        let mut first = ev("c", "x", 7);
        first.extra.insert("order".into(), "1".into());
        let mut second = ev("c", "y", 7);
        second.extra.insert("order".into(), "2".into());
        let log = EventLog::new(vec![Trace::new("c", vec![ev("c", "z", 9), first, second])]).unwrap();
        let acts: Vec<_> = log.traces()[0].events.iter().map(|e| e.activity.as_str()).collect();
        assert_eq!(acts, ["x", "y", "z"]);
    }

    #[test]
    fn duplicate_case_ids_rejected() {
        let err = EventLog::new(vec![
            Trace::new("c1", vec![ev("c1", "a", 1)]),
            Trace::new("c1", vec![ev("c1", "b", 2)]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn empty_activity_rejected() {
        let err = EventLog::new(vec![Trace::new("c1", vec![ev("c1", "", 1)])]).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    // Worked concatenation: <a1,b3,c4> ⊕ <a10,d13> = the full five-event trace.
    #[test]
    fn concat_appends_in_order() {
        let first = Trace::new("c", vec![ev("c", "a", 1), ev("c", "b", 3), ev("c", "c", 4)]);
        let second = Trace::new("c", vec![ev("c", "a", 10), ev("c", "d", 13)]);
        let joined = concat_traces(&first, &second).unwrap();
        assert_eq!(joined.len(), 5);
        let acts: Vec<_> = joined.events.iter().map(|e| (e.activity.as_str(), e.timestamp)).collect();
        assert_eq!(acts, [("a", 1), ("b", 3), ("c", 4), ("a", 10), ("d", 13)]);
    }

    #[test]
    fn concat_empty_identity() {
        let empty = Trace::new("c", vec![]);
        let one = Trace::new("c", vec![ev("c", "a", 1)]);
        assert_eq!(concat_traces(&empty, &one).unwrap(), one);
        assert_eq!(concat_traces(&one, &empty).unwrap(), one);
    }

    #[test]
    fn concat_rejects_order_violation() {
        let first = Trace::new("c", vec![ev("c", "a", 5)]);
        let second = Trace::new("c", vec![ev("c", "b", 2)]);
        assert!(matches!(
            concat_traces(&first, &second),
            Err(Error::OrderViolation(_))
        ));
    }

    #[test]
    fn concat_boundary_tie_allowed() {
        let first = Trace::new("c", vec![ev("c", "a", 5)]);
        let second = Trace::new("c", vec![ev("c", "b", 5)]);
        assert_eq!(concat_traces(&first, &second).unwrap().len(), 2);
    }

    #[test]
    fn timestamp_round_trip() {
        let ms = parse_timestamp("1970-01-01T00:00:01Z").unwrap();
        assert_eq!(ms, 1000);
        let text = format_timestamp(ms);
        assert_eq!(text, "1970-01-01T00:00:01.000+00:00");
        assert_eq!(parse_timestamp(&text).unwrap(), ms);
    }

    #[test]
    fn timestamp_offset_normalized_to_utc() {
        let ms = parse_timestamp("2015-07-01T12:00:00.000+02:00").unwrap();
        assert_eq!(ms, parse_timestamp("2015-07-01T10:00:00.000Z").unwrap());
    }
}
