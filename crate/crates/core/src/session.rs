//! Trace sessionization: split each trace wherever the gap between
//! consecutive events reaches the session threshold.
//!
//! A new session starts at event `i` exactly when
//! `timestamp(i) - timestamp(i-1) >= delta`; gaps strictly below the
//! threshold (including zero) keep events in the same session. Sessions are
//! stored as index ranges into the trace, so concatenating them reproduces
//! the trace event-for-event.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::{Event, EventLog, Trace};

/// Time gap (milliseconds) at or above which a trace is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionThreshold {
    delta_ms: i64,
}

impl SessionThreshold {
    pub fn from_millis(delta_ms: i64) -> Result<Self> {
        if delta_ms <= 0 {
            return Err(Error::Parameter(format!(
                "session threshold must be positive, got {delta_ms} ms"
            )));
        }
        Ok(SessionThreshold { delta_ms })
    }

    pub fn millis(&self) -> i64 {
        self.delta_ms
    }

    /// Parses `<int><unit>` with unit one of s/m/h/d. A bare number is an
    /// error: the unit must be explicit.
    pub fn parse(text: &str) -> Result<Self> {
        let split = text
            .find(|c: char| !c.is_ascii_digit())
            .ok_or_else(|| Error::Parameter(format!("duration {text:?} is missing a unit suffix (s/m/h/d)")))?;
        let (digits, unit) = text.split_at(split);
        if digits.is_empty() {
            return Err(Error::Parameter(format!("duration {text:?} has no numeric part")));
        }
        let value: i64 = digits
            .parse()
            .map_err(|_| Error::Parameter(format!("duration {text:?} has an invalid numeric part")))?;
        let multiplier = match unit {
            "s" => 1_000,
            "m" => 60_000,
            "h" => 3_600_000,
            "d" => 86_400_000,
            other => {
                return Err(Error::Parameter(format!(
                    "unknown duration unit {other:?} in {text:?} (use s/m/h/d)"
                )))
            }
        };
        SessionThreshold::from_millis(value.checked_mul(multiplier).ok_or_else(|| {
            Error::Parameter(format!("duration {text:?} overflows the millisecond range"))
        })?)
    }
}

/// Half-open index range `[start, end)` into the owning trace's events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub start: usize,
    pub end: usize,
}

impl Session {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn events<'a>(&self, trace: &'a Trace) -> &'a [Event] {
        &trace.events[self.start..self.end]
    }
}

/// The sessions of one trace, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSequence {
    pub case_id: String,
    pub sessions: Vec<Session>,
}

impl SessionSequence {
    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }
}

/// Splits one trace into its unique session sequence.
pub fn sessionize(trace: &Trace, threshold: SessionThreshold) -> Result<SessionSequence> {
    if trace.is_empty() {
        return Err(Error::EmptyInput("cannot sessionize an empty trace"));
    }
    let delta = threshold.millis();
    let mut sessions = Vec::new();
    let mut start = 0;
    for i in 1..trace.events.len() {
        let gap = trace.events[i].timestamp - trace.events[i - 1].timestamp;
        if gap >= delta {
            sessions.push(Session { start, end: i });
            start = i;
        }
    }
    sessions.push(Session {
        start,
        end: trace.events.len(),
    });
    Ok(SessionSequence {
        case_id: trace.case_id.clone(),
        sessions,
    })
}

/// Sessionizes every trace; output order follows trace order.
pub fn sessionize_log(log: &EventLog, threshold: SessionThreshold) -> Result<Vec<SessionSequence>> {
    if log.traces().is_empty() {
        return Err(Error::EmptyInput("cannot sessionize an empty log"));
    }
    log.traces().iter().map(|t| sessionize(t, threshold)).collect()
}
