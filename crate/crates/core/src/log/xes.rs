//! XES (XML) reading and writing.
//!
//! Reading is lenient: any attribute element kind is accepted for the core
//! keys, unknown event attributes land in `Event::extra` as strings, and
//! log-level declarations (extensions, globals, classifiers) are skipped.
//! Writing emits the standard concept/time/lifecycle keys plus the extra
//! attributes, so our own output round-trips exactly.

use std::collections::BTreeMap;
use std::io::Write;

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event as XmlEvent};
use quick_xml::{Reader, Writer};

use super::{format_timestamp, parse_timestamp, Event, EventLog, Lifecycle, Trace};
use crate::error::{Error, Result};

const ATTR_KINDS: [&[u8]; 7] = [b"string", b"date", b"int", b"float", b"boolean", b"id", b"list"];

fn line_of(text: &str, byte_pos: u64) -> usize {
    let upto = (byte_pos as usize).min(text.len());
    text.as_bytes()[..upto].iter().filter(|&&b| b == b'\n').count() + 1
}

fn parse_error(text: &str, pos: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        format: "xes",
        position: format!("line {}", line_of(text, pos)),
        message: message.into(),
    }
}

struct PendingEvent {
    activity: Option<String>,
    timestamp: Option<i64>,
    lifecycle: Lifecycle,
    extra: BTreeMap<String, String>,
}

pub(super) fn parse(data: &[u8]) -> Result<EventLog> {
    let text = std::str::from_utf8(data).map_err(|e| Error::Parse {
        format: "xes",
        position: format!("byte {}", e.valid_up_to()),
        message: "document is not valid UTF-8".into(),
    })?;
    let mut reader = Reader::from_str(text);

    let mut saw_log = false;
    let mut log_closed = false;
    let mut traces: Vec<Trace> = Vec::new();
    // (declared case id, events with placeholder case id)
    let mut current_trace: Option<(Option<String>, Vec<Event>)> = None;
    let mut current_event: Option<PendingEvent> = None;

    loop {
        let pos = reader.buffer_position();
        let xml_event = reader
            .read_event()
            .map_err(|e| parse_error(text, reader.buffer_position(), e.to_string()))?;
        match xml_event {
            XmlEvent::Start(ref elem) | XmlEvent::Empty(ref elem) => {
                let is_empty = matches!(xml_event, XmlEvent::Empty(_));
                let name = elem.local_name();
                let local = name.as_ref();
                if !saw_log {
                    if local == b"log" {
                        saw_log = true;
                        if is_empty {
                            log_closed = true;
                        }
                        continue;
                    }
                    return Err(parse_error(text, pos, "expected <log> root element"));
                }
                if local == b"trace" {
                    if current_trace.is_some() {
                        return Err(parse_error(text, pos, "nested <trace> element"));
                    }
                    current_trace = Some((None, Vec::new()));
                    if is_empty {
                        finish_trace(&mut traces, current_trace.take().unwrap(), text, pos)?;
                    }
                } else if local == b"event" {
                    if current_trace.is_none() {
                        return Err(parse_error(text, pos, "<event> outside of a <trace>"));
                    }
                    if current_event.is_some() {
                        return Err(parse_error(text, pos, "nested <event> element"));
                    }
                    current_event = Some(PendingEvent {
                        activity: None,
                        timestamp: None,
                        lifecycle: Lifecycle::Unspecified,
                        extra: BTreeMap::new(),
                    });
                    if is_empty {
                        return Err(parse_error(text, pos, "empty <event/> without attributes"));
                    }
                } else if ATTR_KINDS.contains(&local) {
                    let (key, value) = read_key_value(elem, text, pos)?;
                    if let Some(pending) = current_event.as_mut() {
                        apply_event_attribute(pending, key, value, &traces, &current_trace, text, pos)?;
                    } else if let Some((case_id, _)) = current_trace.as_mut() {
                        if key == "concept:name" {
                            *case_id = Some(value);
                        }
                        // other trace-level attributes are not retained
                    }
                    // log-level attributes are not retained
                    if !is_empty {
                        // nested children of a list/attribute are not retained
                        reader
                            .read_to_end(elem.name())
                            .map_err(|e| parse_error(text, reader.buffer_position(), e.to_string()))?;
                    }
                } else {
                    // extension/global/classifier or foreign elements
                    if !is_empty {
                        reader
                            .read_to_end(elem.name())
                            .map_err(|e| parse_error(text, reader.buffer_position(), e.to_string()))?;
                    }
                }
            }
            XmlEvent::End(elem) => {
                let name = elem.local_name();
                match name.as_ref() {
                    b"event" => {
                        let pending = current_event.take().ok_or_else(|| {
                            parse_error(text, pos, "unmatched </event>")
                        })?;
                        let (case_id, events) = current_trace
                            .as_mut()
                            .ok_or_else(|| parse_error(text, pos, "</event> outside of a <trace>"))?;
                        let context = case_context(case_id, traces.len());
                        let activity = pending
                            .activity
                            .ok_or_else(|| Error::validation(&context, "event missing concept:name"))?;
                        let timestamp = pending
                            .timestamp
                            .ok_or_else(|| Error::validation(&context, "event missing time:timestamp"))?;
                        events.push(Event {
                            case_id: String::new(),
                            activity,
                            timestamp,
                            lifecycle: pending.lifecycle,
                            extra: pending.extra,
                        });
                    }
                    b"trace" => {
                        let finished = current_trace
                            .take()
                            .ok_or_else(|| parse_error(text, pos, "unmatched </trace>"))?;
                        finish_trace(&mut traces, finished, text, pos)?;
                    }
                    b"log" => {
                        log_closed = true;
                    }
                    _ => {}
                }
            }
            XmlEvent::Eof => break,
            // character data, comments, declarations: nothing to keep
            _ => {}
        }
    }

    if !saw_log || !log_closed {
        return Err(parse_error(
            text,
            reader.buffer_position(),
            "document ended before </log>",
        ));
    }
    EventLog::new(traces)
}

fn case_context(case_id: &Option<String>, trace_index: usize) -> String {
    case_id
        .clone()
        .unwrap_or_else(|| format!("trace #{trace_index}"))
}

fn finish_trace(
    traces: &mut Vec<Trace>,
    (case_id, mut events): (Option<String>, Vec<Event>),
    text: &str,
    pos: u64,
) -> Result<()> {
    let case_id = case_id.ok_or_else(|| {
        parse_error(
            text,
            pos,
            format!("trace #{} has no concept:name", traces.len()),
        )
    })?;
    for event in &mut events {
        event.case_id = case_id.clone();
    }
    traces.push(Trace { case_id, events });
    Ok(())
}

fn read_key_value(elem: &BytesStart<'_>, text: &str, pos: u64) -> Result<(String, String)> {
    let mut key = None;
    let mut value = None;
    for attr in elem.attributes() {
        let attr = attr.map_err(|e| parse_error(text, pos, e.to_string()))?;
        let unescaped = attr
            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .map_err(|e| parse_error(text, pos, e.to_string()))?
            .into_owned();
        match attr.key.as_ref() {
            b"key" => key = Some(unescaped),
            b"value" => value = Some(unescaped),
            _ => {}
        }
    }
    let key = key.ok_or_else(|| parse_error(text, pos, "attribute element without key"))?;
    Ok((key, value.unwrap_or_default()))
}

fn apply_event_attribute(
    pending: &mut PendingEvent,
    key: String,
    value: String,
    traces: &[Trace],
    current_trace: &Option<(Option<String>, Vec<Event>)>,
    _text: &str,
    _pos: u64,
) -> Result<()> {
    match key.as_str() {
        "concept:name" => pending.activity = Some(value),
        "time:timestamp" => {
            let context = current_trace
                .as_ref()
                .map(|(id, _)| case_context(id, traces.len()))
                .unwrap_or_else(|| "unknown case".to_string());
            let ms = parse_timestamp(&value)
                .map_err(|e| Error::validation(context, e.to_string()))?;
            pending.timestamp = Some(ms);
        }
        "lifecycle:transition" => match value.to_ascii_lowercase().as_str() {
            "start" => pending.lifecycle = Lifecycle::Start,
            "complete" => pending.lifecycle = Lifecycle::Complete,
            // non-standard transitions survive as plain attributes
            _ => {
                pending.extra.insert(key, value);
            }
        },
        _ => {
            pending.extra.insert(key, value);
        }
    }
    Ok(())
}

pub(super) fn write<W: Write>(log: &EventLog, sink: W) -> Result<()> {
    let mut writer = Writer::new_with_indent(sink, b' ', 2);
    write_xml(&mut writer, log)?;
    Ok(())
}

fn write_xml<W: Write>(writer: &mut Writer<W>, log: &EventLog) -> std::io::Result<()> {
    writer.write_event(XmlEvent::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    let mut root = BytesStart::new("log");
    root.push_attribute(("xes.version", "1.0"));
    root.push_attribute(("xes.features", ""));
    writer.write_event(XmlEvent::Start(root))?;
    for (name, prefix, uri) in [
        ("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
        ("Time", "time", "http://www.xes-standard.org/time.xesext"),
        ("Lifecycle", "lifecycle", "http://www.xes-standard.org/lifecycle.xesext"),
    ] {
        let mut ext = BytesStart::new("extension");
        ext.push_attribute(("name", name));
        ext.push_attribute(("prefix", prefix));
        ext.push_attribute(("uri", uri));
        writer.write_event(XmlEvent::Empty(ext))?;
    }
    for trace in log.traces() {
        writer.write_event(XmlEvent::Start(BytesStart::new("trace")))?;
        write_attr(writer, "string", "concept:name", &trace.case_id)?;
        for event in &trace.events {
            writer.write_event(XmlEvent::Start(BytesStart::new("event")))?;
            write_attr(writer, "string", "concept:name", &event.activity)?;
            write_attr(writer, "date", "time:timestamp", &format_timestamp(event.timestamp))?;
            let lifecycle_written = event.lifecycle != Lifecycle::Unspecified;
            if lifecycle_written {
                write_attr(writer, "string", "lifecycle:transition", event.lifecycle.as_str())?;
            }
            for (key, value) in &event.extra {
                if key == "concept:name"
                    || key == "time:timestamp"
                    || (key == "lifecycle:transition" && lifecycle_written)
                {
                    continue;
                }
                write_attr(writer, "string", key, value)?;
            }
            writer.write_event(XmlEvent::End(BytesEnd::new("event")))?;
        }
        writer.write_event(XmlEvent::End(BytesEnd::new("trace")))?;
    }
    writer.write_event(XmlEvent::End(BytesEnd::new("log")))
}

fn write_attr<W: Write>(
    writer: &mut Writer<W>,
    kind: &str,
    key: &str,
    value: &str,
) -> std::io::Result<()> {
    let mut elem = BytesStart::new(kind);
    elem.push_attribute(("key", key));
    elem.push_attribute(("value", value));
    writer.write_event(XmlEvent::Empty(elem))
}
