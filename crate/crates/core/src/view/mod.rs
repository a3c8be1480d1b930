//! Centroid inspection: normalization, row filtering, heatmap rendering and
//! cluster naming.
//!
//! Each centroid is normalized by the sum of its values so that every column
//! of the matrix sums to 1 (all-zero centroids stay all-zero rather than
//! dividing by zero). Rows are activities, columns are clusters.

mod heatmap;

pub use heatmap::render_heatmap;

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterModel;
use crate::error::{Error, Result};

/// Sum-normalized centroids laid out rows = activities, columns = clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCentroids {
    pub activities: Vec<String>,
    /// `rows[r][c]` is the value of activity `r` in cluster `c`.
    pub rows: Vec<Vec<f64>>,
    pub n_clusters: usize,
}

impl NormalizedCentroids {
    /// Value of activity row `r` in cluster column `c`.
    pub fn value(&self, r: usize, c: usize) -> f64 {
        self.rows[r][c]
    }

    /// One cluster's normalized centroid as a column vector.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|row| row[c]).collect()
    }
}

/// Divides each centroid by the sum of its values; all-zero centroids are
/// kept all-zero.
pub fn normalize_centroids(model: &ClusterModel, alphabet: &[String]) -> Result<NormalizedCentroids> {
    if model.cluster_count() == 0 {
        return Err(Error::Clustering("cannot normalize a model with no clusters".into()));
    }
    let dims = model.centroids[0].len();
    if alphabet.len() != dims {
        return Err(Error::Parameter(format!(
            "alphabet has {} activities but centroids have {} dimensions",
            alphabet.len(),
            dims
        )));
    }
    let mut rows = vec![vec![0.0; model.cluster_count()]; dims];
    for (c, centroid) in model.centroids.iter().enumerate() {
        let sum: f64 = centroid.iter().sum();
        for (r, &v) in centroid.iter().enumerate() {
            rows[r][c] = if sum > 0.0 { v / sum } else { 0.0 };
        }
    }
    Ok(NormalizedCentroids {
        activities: alphabet.to_vec(),
        rows,
        n_clusters: model.cluster_count(),
    })
}

/// Drops activities whose value stays below `threshold` in every cluster.
/// Column sums may drop below 1 afterwards; this is a display aid only.
pub fn filter_rows(nc: &NormalizedCentroids, threshold: f64) -> NormalizedCentroids {
    let mut activities = Vec::new();
    let mut rows = Vec::new();
    for (activity, row) in nc.activities.iter().zip(&nc.rows) {
        if row.iter().any(|&v| v >= threshold) {
            activities.push(activity.clone());
            rows.push(row.clone());
        }
    }
    NormalizedCentroids {
        activities,
        rows,
        n_clusters: nc.n_clusters,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NameProvenance {
    Automatic,
    User,
}

/// Per-cluster names, indexed by cluster id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNaming {
    pub names: Vec<String>,
    pub provenance: NameProvenance,
}

impl ClusterNaming {
    pub fn name(&self, cluster: usize) -> Option<&str> {
        self.names.get(cluster).map(String::as_str)
    }

    /// Names appearing more than once (they merge high-level activities
    /// downstream, which deserves a warning).
    pub fn duplicate_names(&self) -> Vec<String> {
        let mut sorted = self.names.clone();
        sorted.sort();
        let mut duplicates: Vec<String> = sorted
            .windows(2)
            .filter(|w| w[0] == w[1])
            .map(|w| w[0].clone())
            .collect();
        duplicates.dedup();
        duplicates
    }
}

/// Names each cluster after its strongest dimension, concatenating with
/// " & " every other activity whose value reaches `concat_ratio` times the
/// maximum, in descending value order (ties alphabetical). All-zero
/// centroids fall back to `cluster_<id>`.
pub fn auto_name(nc: &NormalizedCentroids, concat_ratio: f64) -> Result<ClusterNaming> {
    if nc.n_clusters == 0 {
        return Err(Error::Clustering("cannot name a model with no clusters".into()));
    }
    if !(concat_ratio > 0.0 && concat_ratio <= 1.0) {
        return Err(Error::Parameter(format!(
            "concat ratio must be in (0,1], got {concat_ratio}"
        )));
    }
    let mut names = Vec::with_capacity(nc.n_clusters);
    for c in 0..nc.n_clusters {
        let column = nc.column(c);
        let max = column.iter().copied().fold(0.0f64, f64::max);
        if max <= 0.0 {
            names.push(format!("cluster_{c}"));
            continue;
        }
        let mut qualifying: Vec<(usize, f64)> = column
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= concat_ratio * max)
            .map(|(r, &v)| (r, v))
            .collect();
        qualifying.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| nc.activities[a.0].cmp(&nc.activities[b.0]))
        });
        let parts: Vec<&str> = qualifying.iter().map(|(r, _)| nc.activities[*r].as_str()).collect();
        names.push(parts.join(" & "));
    }
    Ok(ClusterNaming {
        names,
        provenance: NameProvenance::Automatic,
    })
}

/// Reads a names file: one `cluster_id<TAB>name` line per cluster, `#`
/// comments and blank lines allowed. The file must cover every cluster id
/// exactly once.
pub fn load_names<R: BufRead>(source: R, n_clusters: usize) -> Result<ClusterNaming> {
    let mut names: Vec<Option<String>> = vec![None; n_clusters];
    for (index, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (id_text, name) = trimmed.split_once('\t').ok_or_else(|| {
            Error::Naming(format!("line {}: expected cluster_id<TAB>name", index + 1))
        })?;
        let id: usize = id_text
            .trim()
            .parse()
            .map_err(|_| Error::Naming(format!("line {}: bad cluster id {id_text:?}", index + 1)))?;
        if id >= n_clusters {
            return Err(Error::Naming(format!(
                "unknown cluster id {id} (model has {n_clusters} clusters)"
            )));
        }
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::Naming(format!("empty name for cluster {id}")));
        }
        if names[id].is_some() {
            return Err(Error::Naming(format!("duplicate entry for cluster id {id}")));
        }
        names[id] = Some(name.to_string());
    }
    let missing: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_none())
        .map(|(id, _)| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Naming(format!(
            "names file is missing cluster id(s): {}",
            missing.join(", ")
        )));
    }
    Ok(ClusterNaming {
        names: names.into_iter().map(Option::unwrap).collect(),
        provenance: NameProvenance::User,
    })
}

/// Writes the TSV consumed by [`load_names`].
pub fn write_names<W: std::io::Write>(mut sink: W, naming: &ClusterNaming) -> Result<()> {
    for (id, name) in naming.names.iter().enumerate() {
        writeln!(sink, "{id}\t{name}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Assignment, ClusterAlgorithm, ClusterParams};

    /// The five worked centroids over a six-activity space.
    pub(crate) fn worked_model() -> ClusterModel {
        let centroids = vec![
            vec![1.0, 0.0, 1.0, 1.0, 0.0, 1.0],
            vec![40.0, 0.0, 2.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 10.0, 0.0, 1.0],
            vec![1.0, 2.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 2.0, 2.0, 2.0, 1.0],
        ];
        ClusterModel {
            algorithm: ClusterAlgorithm::Kmeans,
            params: ClusterParams::default(),
            assignments: (0..5).map(Assignment::Cluster).collect(),
            sizes: vec![1; 5],
            centroids,
        }
    }

    pub(crate) fn worked_alphabet() -> Vec<String> {
        (0..6).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn normalization_matches_worked_fractions_exactly() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        // cluster 0: (1,0,1,1,0,1) -> quarters
        assert_eq!(nc.column(0), vec![0.25, 0.0, 0.25, 0.25, 0.0, 0.25]);
        // cluster 1: (40,0,2,0,0,0) -> 40/42 and 2/42
        assert_eq!(
            nc.column(1),
            vec![40.0 / 42.0, 0.0, 2.0 / 42.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            nc.column(2),
            vec![0.0, 0.0, 0.0, 10.0 / 11.0, 0.0, 1.0 / 11.0]
        );
        assert_eq!(nc.column(3), vec![1.0 / 3.0, 2.0 / 3.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            nc.column(4),
            vec![0.0, 0.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]
        );
    }

    #[test]
    fn zero_centroid_stays_zero() {
        let mut model = worked_model();
        model.centroids = vec![vec![0.0, 0.0, 0.0, 0.0]];
        model.sizes = vec![1];
        let alphabet: Vec<String> = (0..4).map(|i| format!("a{i}")).collect();
        let nc = normalize_centroids(&model, &alphabet).unwrap();
        assert_eq!(nc.column(0), vec![0.0; 4]);
    }

    #[test]
    fn column_sums_are_one() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        for c in 0..nc.n_clusters {
            let sum: f64 = nc.column(c).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "column {c} sums to {sum}");
        }
    }

    #[test]
    fn filter_zero_threshold_is_identity() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        assert_eq!(filter_rows(&nc, 0.0), nc);
    }

    // Hand-enumerated over the worked matrix: only rows p0 (0.952), p1
    // (0.667) and p3 (0.909) ever reach 0.3.
    #[test]
    fn filter_drops_rows_below_threshold_everywhere() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        let filtered = filter_rows(&nc, 0.3);
        assert_eq!(filtered.activities, vec!["p0", "p1", "p3"]);
        assert_eq!(filtered.n_clusters, 5);
        assert_eq!(filtered.rows.len(), 3);
    }

    #[test]
    fn filter_removes_near_zero_activity() {
        let nc = NormalizedCentroids {
            activities: vec!["big".into(), "tiny".into()],
            rows: vec![vec![0.999], vec![0.001]],
            n_clusters: 1,
        };
        let filtered = filter_rows(&nc, 0.05);
        assert_eq!(filtered.activities, vec!["big"]);
    }

    #[test]
    fn auto_name_single_dominant_dimension() {
        let nc = NormalizedCentroids {
            activities: vec!["x".into(), "y".into(), "z".into()],
            rows: vec![vec![0.9], vec![0.05], vec![0.05]],
            n_clusters: 1,
        };
        let naming = auto_name(&nc, 0.5).unwrap();
        assert_eq!(naming.names, vec!["x"]);
        assert_eq!(naming.provenance, NameProvenance::Automatic);
    }

    // 0.35 >= 0.8*0.4 qualifies y; 0.25 < 0.32 drops z.
    #[test]
    fn auto_name_concatenates_by_ratio() {
        let nc = NormalizedCentroids {
            activities: vec!["x".into(), "y".into(), "z".into()],
            rows: vec![vec![0.4], vec![0.35], vec![0.25]],
            n_clusters: 1,
        };
        let naming = auto_name(&nc, 0.8).unwrap();
        assert_eq!(naming.names, vec!["x & y"]);
    }

    #[test]
    fn auto_name_breaks_exact_ties_alphabetically() {
        let nc = NormalizedCentroids {
            activities: vec!["y".into(), "x".into()],
            rows: vec![vec![0.5], vec![0.5]],
            n_clusters: 1,
        };
        let naming = auto_name(&nc, 1.0).unwrap();
        assert_eq!(naming.names, vec!["x & y"]);
    }

    #[test]
    fn auto_name_ratio_one_returns_argmax_only() {
        let nc = normalize_centroids(&worked_model(), &worked_alphabet()).unwrap();
        let naming = auto_name(&nc, 1.0).unwrap();
        assert_eq!(naming.names[1], "p0"); // 40/42 dominates cluster 1
        assert_eq!(naming.names[2], "p3"); // 10/11 dominates cluster 2
    }

    #[test]
    fn auto_name_zero_centroid_falls_back() {
        let nc = NormalizedCentroids {
            activities: vec!["x".into()],
            rows: vec![vec![0.0, 1.0]],
            n_clusters: 2,
        };
        let naming = auto_name(&nc, 0.5).unwrap();
        assert_eq!(naming.names, vec!["cluster_0", "x"]);
    }

    #[test]
    fn normalization_preserves_argmax() {
        let model = worked_model();
        let nc = normalize_centroids(&model, &worked_alphabet()).unwrap();
        for (c, centroid) in model.centroids.iter().enumerate() {
            let raw_argmax = centroid
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i);
            let column = nc.column(c);
            let norm_argmax = column
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i);
            assert_eq!(raw_argmax, norm_argmax);
        }
    }

    #[test]
    fn load_names_round_trip() {
        let naming = ClusterNaming {
            names: vec!["Visit page mijn_cv".into(), "search".into()],
            provenance: NameProvenance::User,
        };
        let mut out = Vec::new();
        write_names(&mut out, &naming).unwrap();
        let loaded = load_names(out.as_slice(), 2).unwrap();
        assert_eq!(loaded, naming);
    }

    #[test]
    fn load_names_single_cluster() {
        let data = "# mapping\n0\tVisit page mijn_cv\n";
        let naming = load_names(data.as_bytes(), 1).unwrap();
        assert_eq!(naming.name(0), Some("Visit page mijn_cv"));
    }

    #[test]
    fn load_names_missing_id_is_listed() {
        let data = "0\ta\n1\tb\n2\tc\n";
        let err = load_names(data.as_bytes(), 4).unwrap_err();
        match err {
            Error::Naming(message) => assert!(message.contains('3'), "message: {message}"),
            other => panic!("expected naming error, got {other:?}"),
        }
    }

    #[test]
    fn load_names_unknown_id_rejected() {
        let data = "0\ta\n99\tb\n";
        let err = load_names(data.as_bytes(), 1).unwrap_err();
        match err {
            Error::Naming(message) => assert!(message.contains("99"), "message: {message}"),
            other => panic!("expected naming error, got {other:?}"),
        }
    }

    #[test]
    fn load_names_duplicate_and_empty_rejected() {
        assert!(load_names("0\ta\n0\tb\n".as_bytes(), 1).is_err());
        assert!(load_names("0\t  \n".as_bytes(), 1).is_err());
    }

    #[test]
    fn duplicate_names_reported() {
        let naming = ClusterNaming {
            names: vec!["same".into(), "other".into(), "same".into()],
            provenance: NameProvenance::Automatic,
        };
        assert_eq!(naming.duplicate_names(), vec!["same"]);
    }
}
