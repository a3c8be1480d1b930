//! Abstract-log synthesis: each session becomes a start/complete event pair
//! named after the session's cluster. The start event takes the timestamp of
//! the session's first event and the complete event that of its last, so a
//! single-event session yields a zero-duration pair.

use crate::cluster::ClusterModel;
use crate::error::{Error, Result};
use crate::log::{Event, EventLog, Lifecycle, Trace};
use crate::session::SessionSequence;
use crate::view::ClusterNaming;

/// Extra-attribute key carrying the source cluster id on abstract events.
pub const CLUSTER_ATTR: &str = "abstract:cluster";
/// Extra-attribute key carrying the source session index on abstract events.
pub const SESSION_ATTR: &str = "abstract:session";

/// Builds the abstract log. The model's assignments must line up with the
/// sessions in trace order then session order (the same order `encode_all`
/// produces), cover every session, and contain no noise.
pub fn abstract_log(
    log: &EventLog,
    sessionized: &[SessionSequence],
    model: &ClusterModel,
    naming: &ClusterNaming,
) -> Result<EventLog> {
    let total_sessions: usize = sessionized.iter().map(|s| s.sessions.len()).sum();
    if model.assignments.len() != total_sessions {
        return Err(Error::Parameter(format!(
            "model covers {} vectors but the log has {} sessions",
            model.assignments.len(),
            total_sessions
        )));
    }
    if sessionized.len() != log.traces().len() {
        return Err(Error::Parameter(format!(
            "sessionization covers {} traces but the log has {}",
            sessionized.len(),
            log.traces().len()
        )));
    }

    let mut next = 0usize;
    let mut traces = Vec::with_capacity(log.traces().len());
    for (trace, sequence) in log.traces().iter().zip(sessionized) {
        let mut events = Vec::with_capacity(2 * sequence.sessions.len());
        for (session_index, session) in sequence.sessions.iter().enumerate() {
            let assignment = model.assignments[next];
            next += 1;
            let cluster = assignment.cluster().ok_or_else(|| {
                Error::Clustering(format!(
                    "session {session_index} of case {:?} is noise; rerun with \
                     --reassign-outliers or adjust eps/min-pts",
                    trace.case_id
                ))
            })?;
            let name = naming.name(cluster).ok_or_else(|| {
                Error::Naming(format!("no name for cluster {cluster}"))
            })?;
            let session_events = session.events(trace);
            let first = session_events.first().expect("sessions are non-empty");
            let last = session_events.last().expect("sessions are non-empty");
            for (lifecycle, timestamp) in [
                (Lifecycle::Start, first.timestamp),
                (Lifecycle::Complete, last.timestamp),
            ] {
                let mut event = Event::new(trace.case_id.clone(), name, timestamp)
                    .with_lifecycle(lifecycle);
                event.extra.insert(CLUSTER_ATTR.into(), cluster.to_string());
                event.extra.insert(SESSION_ATTR.into(), session_index.to_string());
                events.push(event);
            }
        }
        traces.push(Trace::new(trace.case_id.clone(), events));
    }
    EventLog::new(traces)
}
