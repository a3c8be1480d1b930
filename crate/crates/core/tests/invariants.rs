//! Property-based invariants across the pipeline stages.

use proptest::prelude::*;

use sessionlift_core::encode::{encode_all, EncodingMode};
use sessionlift_core::log::{
    concat_traces, parse_log, write_log, Event, EventLog, Lifecycle, LogFormat, Trace,
};
use sessionlift_core::session::{sessionize, SessionThreshold};

fn trace_strategy() -> impl Strategy<Value = Trace> {
    prop::collection::vec((0u8..6, 0i64..=20), 1..60).prop_map(|steps| {
        let mut ts = 0;
        let events = steps
            .into_iter()
            .map(|(a, gap)| {
                ts += gap;
                Event::new("c", format!("act{a}"), ts)
            })
            .collect();
        Trace::new("c", events)
    })
}

fn log_strategy() -> impl Strategy<Value = EventLog> {
    prop::collection::vec(
        (
            prop::collection::vec((0u8..5, 0i64..=9000, 0u8..3), 1..20),
            0i64..100_000,
        ),
        1..8,
    )
    .prop_map(|traces| {
        let traces = traces
            .into_iter()
            .enumerate()
            .map(|(i, (steps, start))| {
                let case = format!("case{i}");
                let mut ts = start;
                let events = steps
                    .into_iter()
                    .map(|(a, gap, lc)| {
                        ts += gap;
                        let lifecycle = match lc {
                            0 => Lifecycle::Unspecified,
                            1 => Lifecycle::Start,
                            _ => Lifecycle::Complete,
                        };
                        let mut event =
                            Event::new(case.clone(), format!("act{a}"), ts).with_lifecycle(lifecycle);
                        if a == 0 {
                            event.extra.insert("org:resource".into(), format!("r{gap}"));
                        }
                        event
                    })
                    .collect();
                Trace::new(case, events)
            })
            .collect();
        EventLog::new(traces).expect("generated log is valid")
    })
}

proptest! {
    // Concatenating the sessions reproduces the trace event-for-event.
    #[test]
    fn sessions_reconstruct_trace(trace in trace_strategy(), delta in 1i64..=25) {
        let threshold = SessionThreshold::from_millis(delta).unwrap();
        let sequence = sessionize(&trace, threshold).unwrap();
        let rebuilt = sequence
            .sessions
            .iter()
            .map(|s| Trace::new(trace.case_id.clone(), s.events(&trace).to_vec()))
            .try_fold(Trace::new(trace.case_id.clone(), vec![]), |acc, part| {
                concat_traces(&acc, &part)
            })
            .unwrap();
        prop_assert_eq!(rebuilt.events, trace.events.clone());
        prop_assert!(sequence.sessions.iter().all(|s| !s.is_empty()));
    }

    // Between-session gaps reach delta; within-session gaps stay below it.
    #[test]
    fn gap_laws_hold(trace in trace_strategy(), delta in 1i64..=25) {
        let threshold = SessionThreshold::from_millis(delta).unwrap();
        let sequence = sessionize(&trace, threshold).unwrap();
        for pair in sequence.sessions.windows(2) {
            let last = trace.events[pair[0].end - 1].timestamp;
            let first = trace.events[pair[1].start].timestamp;
            prop_assert!(first - last >= delta);
        }
        for session in &sequence.sessions {
            for events in session.events(&trace).windows(2) {
                prop_assert!(events[1].timestamp - events[0].timestamp < delta);
            }
        }
    }

    // Session count equals one plus an independent one-pass count of
    // boundary gaps.
    #[test]
    fn boundary_count_law(trace in trace_strategy(), delta in 1i64..=25) {
        let threshold = SessionThreshold::from_millis(delta).unwrap();
        let sequence = sessionize(&trace, threshold).unwrap();
        let boundaries = trace
            .events
            .windows(2)
            .filter(|w| w[1].timestamp - w[0].timestamp >= delta)
            .count();
        prop_assert_eq!(sequence.session_count(), boundaries + 1);
    }

    // A smaller threshold never yields fewer sessions.
    #[test]
    fn session_count_monotone_in_delta(trace in trace_strategy(), d1 in 1i64..=25, d2 in 1i64..=25) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let n_lo = sessionize(&trace, SessionThreshold::from_millis(lo).unwrap())
            .unwrap()
            .session_count();
        let n_hi = sessionize(&trace, SessionThreshold::from_millis(hi).unwrap())
            .unwrap()
            .session_count();
        prop_assert!(n_lo >= n_hi);
    }

    // Frequency vectors sum to the session length; duration components are
    // bounded by the largest within-session gap and zero for absent
    // activities; both encodings are bit-deterministic.
    #[test]
    fn encoding_laws(log in log_strategy(), delta in 1i64..=9001) {
        let threshold = SessionThreshold::from_millis(delta).unwrap();
        let sessionized = sessionize_log_helper(&log, threshold);
        let freq = encode_all(&log, &sessionized, EncodingMode::Frequency);
        let mut index = 0;
        for sequence in &sessionized {
            for session in &sequence.sessions {
                let sum: f64 = freq[index].values.iter().sum();
                prop_assert_eq!(sum, session.len() as f64);
                index += 1;
            }
        }

        let max_gap = log
            .traces()
            .iter()
            .zip(&sessionized)
            .flat_map(|(trace, sequence)| {
                sequence.sessions.iter().flat_map(|s| {
                    s.events(trace)
                        .windows(2)
                        .map(|w| (w[1].timestamp - w[0].timestamp) as f64)
                        .collect::<Vec<_>>()
                })
            })
            .fold(0.0f64, f64::max);
        let dur = encode_all(&log, &sessionized, EncodingMode::Duration);
        index = 0;
        for (trace, sequence) in log.traces().iter().zip(&sessionized) {
            for session in &sequence.sessions {
                let vector = &dur[index];
                index += 1;
                for (ai, activity) in log.alphabet().iter().enumerate() {
                    let value = vector.values[ai];
                    prop_assert!(value >= 0.0);
                    prop_assert!(value <= max_gap);
                    let present = session.events(trace).iter().any(|e| &e.activity == activity);
                    if !present {
                        prop_assert_eq!(value, 0.0);
                    }
                }
            }
        }

        let freq_again = encode_all(&log, &sessionized, EncodingMode::Frequency);
        let dur_again = encode_all(&log, &sessionized, EncodingMode::Duration);
        prop_assert_eq!(freq, freq_again);
        prop_assert_eq!(dur, dur_again);
    }

    // parse(write(L)) is the identity on both formats; for CSV only the
    // retained fields (extra attributes are XES-only).
    #[test]
    fn round_trip_identity(log in log_strategy()) {
        let mut xes = Vec::new();
        write_log(&log, LogFormat::Xes, &mut xes).unwrap();
        let xes_log = parse_log(xes.as_slice(), LogFormat::Xes).unwrap();
        prop_assert_eq!(&xes_log, &log);

        let mut csv = Vec::new();
        write_log(&log, LogFormat::Csv, &mut csv).unwrap();
        let csv_log = parse_log(csv.as_slice(), LogFormat::Csv).unwrap();
        prop_assert_eq!(csv_log.traces().len(), log.traces().len());
        prop_assert_eq!(csv_log.alphabet(), log.alphabet());
        for (a, b) in csv_log.traces().iter().zip(log.traces()) {
            prop_assert_eq!(&a.case_id, &b.case_id);
            prop_assert_eq!(a.events.len(), b.events.len());
            for (x, y) in a.events.iter().zip(&b.events) {
                prop_assert_eq!(&x.activity, &y.activity);
                prop_assert_eq!(x.timestamp, y.timestamp);
                prop_assert_eq!(x.lifecycle, y.lifecycle);
            }
        }
    }

    // The alphabet does not depend on the order traces appear in.
    #[test]
    fn alphabet_independent_of_trace_order(log in log_strategy()) {
        let mut reversed: Vec<Trace> = log.traces().to_vec();
        reversed.reverse();
        let relogged = EventLog::new(reversed).unwrap();
        prop_assert_eq!(relogged.alphabet(), log.alphabet());
    }
}

fn sessionize_log_helper(
    log: &EventLog,
    threshold: SessionThreshold,
) -> Vec<sessionlift_core::session::SessionSequence> {
    sessionlift_core::session::sessionize_log(log, threshold).unwrap()
}
