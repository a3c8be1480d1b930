//! Synthetic event logs with planted session boundaries and session types.
//!
//! The generator plants ground truth by construction: gaps inside a session
//! are drawn strictly below the threshold and gaps between sessions at or
//! above it, so sessionizing with the same threshold recovers the planted
//! boundaries exactly. Each session is drawn from one archetype (an
//! activity-mix distribution plus a length range), which supplies labels for
//! external validation via the adjusted Rand index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::{Event, EventLog, TimestampMs, Trace};

/// One session type: an activity mix over the alphabet and a length range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archetype {
    pub name: String,
    /// One non-negative weight per alphabet entry; sampled proportionally.
    pub weights: Vec<f64>,
    /// Inclusive session length range.
    pub session_len: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub alphabet_size: usize,
    pub archetypes: Vec<Archetype>,
    pub traces: usize,
    /// Inclusive sessions-per-trace range.
    pub sessions_per_trace: (usize, usize),
    /// Reference threshold the gap ranges are built around.
    pub delta_ms: i64,
    /// Inclusive within-session gap range; must stay strictly below delta.
    pub intra_gap_ms: (i64, i64),
    /// Inclusive between-session gap range; must start at or above delta.
    pub inter_gap_ms: (i64, i64),
    pub seed: u64,
}

impl SynthSpec {
    /// Convenience spec: `archetypes` session types with disjoint uniform
    /// activity mixes carving up the alphabet.
    pub fn disjoint(
        archetypes: usize,
        alphabet_size: usize,
        traces: usize,
        delta_ms: i64,
        seed: u64,
    ) -> Result<SynthSpec> {
        if archetypes == 0 || alphabet_size < archetypes {
            return Err(Error::SynthSpec(format!(
                "cannot carve {alphabet_size} activities into {archetypes} disjoint mixes"
            )));
        }
        let per = alphabet_size / archetypes;
        let mixes = (0..archetypes)
            .map(|a| {
                let lo = a * per;
                let hi = if a + 1 == archetypes { alphabet_size } else { lo + per };
                let mut weights = vec![0.0; alphabet_size];
                for w in &mut weights[lo..hi] {
                    *w = 1.0;
                }
                Archetype {
                    name: format!("type_{a}"),
                    weights,
                    session_len: (5, 10),
                }
            })
            .collect();
        Ok(SynthSpec {
            alphabet_size,
            archetypes: mixes,
            traces,
            sessions_per_trace: (1, 3),
            delta_ms,
            intra_gap_ms: (1, (delta_ms / 4).max(1)),
            inter_gap_ms: (delta_ms, delta_ms * 2),
            seed,
        })
    }

    /// Activity labels, zero-padded so lexicographic order matches index
    /// order.
    pub fn alphabet(&self) -> Vec<String> {
        let width = digits(self.alphabet_size.saturating_sub(1)).max(2);
        (0..self.alphabet_size)
            .map(|i| format!("act_{i:0width$}"))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::SynthSpec(msg));
        if self.alphabet_size == 0 {
            return fail("alphabet_size must be positive".into());
        }
        if self.traces == 0 {
            return fail("traces must be positive".into());
        }
        if self.archetypes.is_empty() {
            return fail("at least one archetype is required".into());
        }
        if self.sessions_per_trace.0 == 0 || self.sessions_per_trace.0 > self.sessions_per_trace.1 {
            return fail(format!(
                "bad sessions_per_trace range {:?}",
                self.sessions_per_trace
            ));
        }
        if self.delta_ms <= 0 {
            return fail(format!("delta_ms must be positive, got {}", self.delta_ms));
        }
        if self.intra_gap_ms.0 < 0 || self.intra_gap_ms.0 > self.intra_gap_ms.1 {
            return fail(format!("bad intra_gap_ms range {:?}", self.intra_gap_ms));
        }
        if self.intra_gap_ms.1 >= self.delta_ms {
            return fail(format!(
                "intra-session gaps must stay strictly below delta: {} >= {}",
                self.intra_gap_ms.1, self.delta_ms
            ));
        }
        if self.inter_gap_ms.0 < self.delta_ms || self.inter_gap_ms.0 > self.inter_gap_ms.1 {
            return fail(format!(
                "inter-session gaps must start at or above delta: {:?} vs delta {}",
                self.inter_gap_ms, self.delta_ms
            ));
        }
        for (i, archetype) in self.archetypes.iter().enumerate() {
            if archetype.weights.len() != self.alphabet_size {
                return fail(format!(
                    "archetype {i} has {} weights for an alphabet of {}",
                    archetype.weights.len(),
                    self.alphabet_size
                ));
            }
            if archetype.weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
                return fail(format!("archetype {i} has a negative or non-finite weight"));
            }
            if archetype.weights.iter().sum::<f64>() <= 0.0 {
                return fail(format!("archetype {i} has an all-zero activity mix"));
            }
            if archetype.session_len.0 == 0 || archetype.session_len.0 > archetype.session_len.1 {
                return fail(format!(
                    "archetype {i} has a bad session length range {:?}",
                    archetype.session_len
                ));
            }
        }
        Ok(())
    }
}

fn digits(mut n: usize) -> usize {
    let mut count = 1;
    while n >= 10 {
        n /= 10;
        count += 1;
    }
    count
}

/// One planted session: which archetype produced which event range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSession {
    pub case_id: String,
    pub session_index: usize,
    pub archetype: usize,
    /// Event index range within the trace, end exclusive.
    pub start_index: usize,
    pub end_index: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub sessions: Vec<PlantedSession>,
}

impl GroundTruth {
    pub fn archetype_labels(&self) -> Vec<usize> {
        self.sessions.iter().map(|s| s.archetype).collect()
    }
}

const BASE_TIMESTAMP: TimestampMs = 1_577_836_800_000; // 2020-01-01T00:00:00Z

/// Generates a seeded-deterministic log plus its planted ground truth.
pub fn generate(spec: &SynthSpec) -> Result<(EventLog, GroundTruth)> {
    spec.validate()?;
    let alphabet = spec.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let case_width = digits(spec.traces.saturating_sub(1)).max(4);

    let mut traces = Vec::with_capacity(spec.traces);
    let mut truth = GroundTruth::default();
    for t in 0..spec.traces {
        let case_id = format!("case_{t:0case_width$}");
        let mut timestamp = BASE_TIMESTAMP + (t as i64) * 86_400_000;
        let mut events = Vec::new();
        let n_sessions = rng.random_range(spec.sessions_per_trace.0..=spec.sessions_per_trace.1);
        for session_index in 0..n_sessions {
            if session_index > 0 {
                timestamp += rng.random_range(spec.inter_gap_ms.0..=spec.inter_gap_ms.1);
            }
            let archetype_index = rng.random_range(0..spec.archetypes.len());
            let archetype = &spec.archetypes[archetype_index];
            let length = rng.random_range(archetype.session_len.0..=archetype.session_len.1);
            let start_index = events.len();
            for e in 0..length {
                if e > 0 {
                    timestamp += rng.random_range(spec.intra_gap_ms.0..=spec.intra_gap_ms.1);
                }
                let activity = &alphabet[sample_weighted(&mut rng, &archetype.weights)];
                events.push(Event::new(case_id.clone(), activity.clone(), timestamp));
            }
            truth.sessions.push(PlantedSession {
                case_id: case_id.clone(),
                session_index,
                archetype: archetype_index,
                start_index,
                end_index: events.len(),
            });
        }
        traces.push(Trace::new(case_id, events));
    }
    Ok((EventLog::new(traces)?, truth))
}

fn sample_weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cumulative += w;
        if w > 0.0 && cumulative > target {
            return i;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("weights validated to have positive mass")
}

/// Pair-counting adjusted Rand index between two labelings: 1.0 exactly when
/// the partitions coincide up to relabeling, 0.0 in expectation for chance
/// agreement.
pub fn adjusted_rand_index(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LabelLengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput("no labels to compare"));
    }

    use std::collections::BTreeMap;
    let mut contingency: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pred_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut truth_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *contingency.entry((p, t)).or_insert(0) += 1;
        *pred_counts.entry(p).or_insert(0) += 1;
        *truth_counts.entry(t).or_insert(0) += 1;
    }
    let comb2 = |n: usize| (n * n.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = contingency.values().map(|&n| comb2(n)).sum();
    let sum_pred: f64 = pred_counts.values().map(|&n| comb2(n)).sum();
    let sum_truth: f64 = truth_counts.values().map(|&n| comb2(n)).sum();
    let total_pairs = comb2(pred.len());

    let expected = sum_pred * sum_truth / total_pairs;
    let max_index = (sum_pred + sum_truth) / 2.0;
    if max_index == expected {
        // both partitions trivial and identical
        return Ok(1.0);
    }
    Ok((sum_cells - expected) / (max_index - expected))
}
