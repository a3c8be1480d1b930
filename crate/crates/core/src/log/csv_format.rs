//! CSV reading and writing.
//!
//! Fixed schema: header `case_id,activity,timestamp[,lifecycle]`, timestamps
//! ISO-8601. Rows may interleave cases; traces are grouped by case id in
//! first-appearance order and sorted by timestamp. Extra event attributes are
//! not representable in this format.

use std::collections::BTreeMap;
use std::io::Write;

use super::{format_timestamp, parse_timestamp, Event, EventLog, Lifecycle, Trace};
use crate::error::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        format: "csv",
        position: format!("line {line}"),
        message: message.into(),
    }
}

pub(super) fn parse(data: &[u8]) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let headers = reader
        .headers()
        .map_err(|e| parse_error(1, e.to_string()))?
        .clone();
    let fields: Vec<&str> = headers.iter().collect();
    let has_lifecycle = match fields.as_slice() {
        ["case_id", "activity", "timestamp"] => false,
        ["case_id", "activity", "timestamp", "lifecycle"] => true,
        other => {
            return Err(parse_error(
                1,
                format!(
                    "expected header case_id,activity,timestamp[,lifecycle], found {}",
                    other.join(",")
                ),
            ))
        }
    };

    let mut order: Vec<String> = Vec::new();
    let mut by_case: BTreeMap<String, Vec<Event>> = BTreeMap::new();
    for (index, record) in reader.records().enumerate() {
        let line = index + 2;
        let record = record.map_err(|e| parse_error(line, e.to_string()))?;
        let expected = if has_lifecycle { 4 } else { 3 };
        if record.len() != expected {
            return Err(parse_error(
                line,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        let case_id = record[0].to_string();
        let activity = record[1].to_string();
        if case_id.is_empty() {
            return Err(parse_error(line, "empty case_id"));
        }
        if activity.is_empty() {
            return Err(Error::validation(&case_id, format!("empty activity at line {line}")));
        }
        let timestamp = parse_timestamp(&record[2])
            .map_err(|e| Error::validation(&case_id, format!("line {line}: {e}")))?;
        let lifecycle = if has_lifecycle {
            match &record[3] {
                "" => Lifecycle::Unspecified,
                "start" => Lifecycle::Start,
                "complete" => Lifecycle::Complete,
                other => {
                    return Err(Error::validation(
                        &case_id,
                        format!("line {line}: unknown lifecycle {other:?}"),
                    ))
                }
            }
        } else {
            Lifecycle::Unspecified
        };
        if !by_case.contains_key(&case_id) {
            order.push(case_id.clone());
        }
        by_case.entry(case_id.clone()).or_default().push(Event {
            case_id,
            activity,
            timestamp,
            lifecycle,
            extra: BTreeMap::new(),
        });
    }

    let traces = order
        .into_iter()
        .map(|case_id| {
            let events = by_case.remove(&case_id).unwrap_or_default();
            Trace { case_id, events }
        })
        .collect();
    EventLog::new(traces)
}

pub(super) fn write<W: Write>(log: &EventLog, sink: W) -> Result<()> {
    let has_lifecycle = log
        .traces()
        .iter()
        .flat_map(|t| &t.events)
        .any(|e| e.lifecycle != Lifecycle::Unspecified);
    let mut writer = csv::Writer::from_writer(sink);
    let io_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    if has_lifecycle {
        writer
            .write_record(["case_id", "activity", "timestamp", "lifecycle"])
            .map_err(io_err)?;
    } else {
        writer
            .write_record(["case_id", "activity", "timestamp"])
            .map_err(io_err)?;
    }
    for trace in log.traces() {
        for event in &trace.events {
            let ts = format_timestamp(event.timestamp);
            if has_lifecycle {
                writer
                    .write_record([
                        event.case_id.as_str(),
                        event.activity.as_str(),
                        ts.as_str(),
                        event.lifecycle.as_str(),
                    ])
                    .map_err(io_err)?;
            } else {
                writer
                    .write_record([event.case_id.as_str(), event.activity.as_str(), ts.as_str()])
                    .map_err(io_err)?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}
