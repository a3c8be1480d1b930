//! Elbow-method support for choosing k.
//!
//! Runs K-Means for every candidate k and reports the WCSS curve. Each k is
//! additionally warm-started from the previous k's centroids plus the point
//! farthest from them, and the better of the two runs is kept; adding a
//! centroid can only shrink WCSS, so the reported curve is non-increasing.
//! The selected k maximizes the second difference of the curve (the knee);
//! a flat curve falls back to the smallest candidate, and ranges with fewer
//! than three candidates skip selection.

use std::io::Write;

use super::kmeans::{kmeans, lloyd, KMeansConfig};
use super::{check_uniform_dims, distance_squared, distinct_count, nearest_centroid, ClusterModel};
use crate::error::{Error, Result};

pub const RULE_SECOND_DIFFERENCE: &str = "max-second-difference";
pub const RULE_FLAT_CURVE: &str = "flat-curve-smallest-k";
pub const RULE_SKIPPED: &str = "skipped-range-too-short";

#[derive(Debug, Clone, PartialEq)]
pub struct ElbowEntry {
    pub k: usize,
    /// k actually run, clamped to the distinct-vector count.
    pub effective_k: usize,
    pub wcss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElbowReport {
    pub entries: Vec<ElbowEntry>,
    pub selected_k: Option<usize>,
    pub rule: &'static str,
}

impl ElbowReport {
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "k,wcss")?;
        for entry in &self.entries {
            writeln!(sink, "{},{}", entry.k, entry.wcss)?;
        }
        Ok(())
    }
}

/// Evaluates k over the inclusive range and picks the knee of the WCSS curve.
pub fn elbow(points: &[Vec<f64>], k_range: (usize, usize), seed: u64) -> Result<ElbowReport> {
    let dims = check_uniform_dims(points)?;
    let (lo, hi) = k_range;
    if lo == 0 || lo > hi {
        return Err(Error::Parameter(format!(
            "invalid k range {lo}..{hi}: need 1 <= lo <= hi"
        )));
    }
    let distinct = distinct_count(points);

    let mut entries = Vec::with_capacity(hi - lo + 1);
    let mut previous: Option<ClusterModel> = None;
    for k in lo..=hi {
        let effective_k = k.min(distinct);
        let cold = kmeans(points, KMeansConfig::new(effective_k, seed))?;
        let mut best = cold;
        if let Some(prev) = &previous {
            if prev.cluster_count() < effective_k {
                let warm = warm_start(points, prev, dims)?;
                if warm.wcss(points) < best.wcss(points) {
                    best = warm;
                }
            }
        }
        entries.push(ElbowEntry {
            k,
            effective_k,
            wcss: best.wcss(points),
        });
        previous = Some(best);
    }

    let (selected_k, rule) = select(&entries);
    Ok(ElbowReport {
        entries,
        selected_k,
        rule,
    })
}

fn warm_start(points: &[Vec<f64>], prev: &ClusterModel, dims: usize) -> Result<ClusterModel> {
    let mut centroids = prev.centroids.clone();
    // split off the point farthest from its current centroid
    let farthest = points
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let da = distance_squared(a, &centroids[nearest_centroid(a, &centroids)]);
            let db = distance_squared(b, &centroids[nearest_centroid(b, &centroids)]);
            da.total_cmp(&db)
        })
        .map(|(i, _)| i)
        .expect("points non-empty");
    centroids.push(points[farthest].clone());
    let config = KMeansConfig::new(centroids.len(), prev.params.seed.unwrap_or(0));
    lloyd(points, centroids, dims, config)
}

fn select(entries: &[ElbowEntry]) -> (Option<usize>, &'static str) {
    if entries.len() < 3 {
        return (None, RULE_SKIPPED);
    }
    let mut best: Option<(usize, f64)> = None;
    for window in entries.windows(3) {
        let second_diff = window[0].wcss - 2.0 * window[1].wcss + window[2].wcss;
        if best.is_none_or(|(_, b)| second_diff > b) {
            best = Some((window[1].k, second_diff));
        }
    }
    match best {
        Some((_, strength)) if strength <= 0.0 => {
            // no convex knee anywhere; prefer the cheapest clustering
            (Some(entries[0].k), RULE_FLAT_CURVE)
        }
        Some((k, _)) => (Some(k), RULE_SECOND_DIFFERENCE),
        None => (None, RULE_SKIPPED),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(counts: &[usize], centers: &[[f64; 2]], spread: f64) -> Vec<Vec<f64>> {
        let mut points = Vec::new();
        for (count, center) in counts.iter().zip(centers) {
            for i in 0..*count {
                let offset = spread * (i as f64 / *count as f64 - 0.5);
                points.push(vec![center[0] + offset, center[1] - offset]);
            }
        }
        points
    }

    #[test]
    fn selects_three_for_three_planted_clusters() {
        let points = planted(&[8, 8, 8], &[[0.0, 0.0], [20.0, 0.0], [0.0, 20.0]], 0.4);
        let report = elbow(&points, (1, 6), 7).unwrap();
        assert_eq!(report.selected_k, Some(3));
        assert_eq!(report.rule, RULE_SECOND_DIFFERENCE);
    }

    #[test]
    fn duplicated_point_selects_smallest_k() {
        let points = vec![vec![4.0, 2.0]; 6];
        let report = elbow(&points, (1, 3), 0).unwrap();
        assert_eq!(report.entries.len(), 3);
        assert!(report.entries.iter().all(|e| e.wcss == 0.0));
        assert!(report.entries.iter().all(|e| e.effective_k == 1));
        assert_eq!(report.selected_k, Some(1));
        assert_eq!(report.rule, RULE_FLAT_CURVE);
    }

    #[test]
    fn wcss_curve_is_non_increasing() {
        let points: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.93).sin() * 12.0, (i as f64 * 1.71).cos() * 9.0])
            .collect();
        let report = elbow(&points, (1, 8), 13).unwrap();
        for window in report.entries.windows(2) {
            assert!(
                window[1].wcss <= window[0].wcss + 1e-9,
                "wcss increased from k={} ({}) to k={} ({})",
                window[0].k,
                window[0].wcss,
                window[1].k,
                window[1].wcss
            );
        }
    }

    #[test]
    fn short_range_skips_selection() {
        let points = vec![vec![0.0], vec![1.0], vec![5.0]];
        let report = elbow(&points, (1, 2), 0).unwrap();
        assert_eq!(report.selected_k, None);
        assert_eq!(report.rule, RULE_SKIPPED);
        assert_eq!(report.entries.len(), 2);
    }

    #[test]
    fn csv_export_lists_curve() {
        let points = vec![vec![0.0], vec![1.0], vec![10.0], vec![11.0]];
        let report = elbow(&points, (1, 3), 0).unwrap();
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,wcss");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn invalid_range_rejected() {
        let points = vec![vec![0.0]];
        assert!(elbow(&points, (0, 3), 0).is_err());
        assert!(elbow(&points, (3, 2), 0).is_err());
    }
}
