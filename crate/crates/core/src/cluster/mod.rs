//! Clustering of session vectors: K-Means with elbow-method k selection, or
//! DBSCAN with optional nearest-centroid reassignment of noise points.
//!
//! Both algorithms use Euclidean distance, which matches the centroid-mean
//! semantics used downstream for heatmaps and naming. All operations are
//! deterministic given the input order and, for K-Means, the seed.

mod dbscan;
mod elbow;
mod kmeans;

pub use dbscan::{dbscan, median_knn_distance};
pub use elbow::{elbow, ElbowEntry, ElbowReport};
pub use kmeans::{kmeans, KMeansConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cluster membership of one input vector. Serialized as the cluster id,
/// with -1 for noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assignment {
    Cluster(usize),
    Noise,
}

impl Assignment {
    pub fn cluster(&self) -> Option<usize> {
        match self {
            Assignment::Cluster(id) => Some(*id),
            Assignment::Noise => None,
        }
    }

    pub fn is_noise(&self) -> bool {
        matches!(self, Assignment::Noise)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Assignment::Cluster(id) => serializer.serialize_i64(*id as i64),
            Assignment::Noise => serializer.serialize_i64(-1),
        }
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = i64::deserialize(deserializer)?;
        if raw < 0 {
            Ok(Assignment::Noise)
        } else {
            Ok(Assignment::Cluster(raw as usize))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterAlgorithm {
    Kmeans,
    Dbscan,
}

impl ClusterAlgorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClusterAlgorithm::Kmeans => "kmeans",
            ClusterAlgorithm::Dbscan => "dbscan",
        }
    }
}

impl std::str::FromStr for ClusterAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(ClusterAlgorithm::Kmeans),
            "dbscan" => Ok(ClusterAlgorithm::Dbscan),
            other => Err(Error::Parameter(format!(
                "unknown clustering algorithm {other:?} (use kmeans|dbscan)"
            ))),
        }
    }
}

/// Echo of the hyperparameters a model was produced with.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_pts: Option<usize>,
    #[serde(default)]
    pub reassigned_outliers: bool,
}

/// A partition of the input vectors into clusters plus an optional noise set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub algorithm: ClusterAlgorithm,
    pub params: ClusterParams,
    /// Per-input-vector membership, parallel to the clustered slice.
    pub assignments: Vec<Assignment>,
    /// Componentwise mean of each cluster's members.
    pub centroids: Vec<Vec<f64>>,
    pub sizes: Vec<usize>,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.centroids.len()
    }

    pub fn noise_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_noise()).count()
    }

    /// Within-cluster sum of squared distances over the given vectors.
    pub fn wcss(&self, points: &[Vec<f64>]) -> f64 {
        self.assignments
            .iter()
            .zip(points)
            .filter_map(|(a, p)| a.cluster().map(|id| distance_squared(p, &self.centroids[id])))
            .sum()
    }
}

pub(crate) fn distance_squared(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    distance_squared(a, b).sqrt()
}

/// Index of the nearest centroid; exact ties go to the lowest cluster id.
pub(crate) fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (id, centroid) in centroids.iter().enumerate() {
        let d2 = distance_squared(point, centroid);
        if d2 < best_d2 {
            best_d2 = d2;
            best = id;
        }
    }
    best
}

/// Componentwise means and sizes for `k` clusters over non-noise assignments.
pub(crate) fn centroids_of(
    points: &[Vec<f64>],
    assignments: &[Assignment],
    k: usize,
    dims: usize,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; dims]; k];
    let mut sizes = vec![0usize; k];
    for (point, assignment) in points.iter().zip(assignments) {
        if let Some(id) = assignment.cluster() {
            sizes[id] += 1;
            for (s, v) in sums[id].iter_mut().zip(point) {
                *s += v;
            }
        }
    }
    for (sum, &size) in sums.iter_mut().zip(&sizes) {
        if size > 0 {
            for s in sum.iter_mut() {
                *s /= size as f64;
            }
        }
    }
    (sums, sizes)
}

pub(crate) fn check_uniform_dims(points: &[Vec<f64>]) -> Result<usize> {
    let dims = points
        .first()
        .ok_or(Error::EmptyInput("no vectors to cluster"))?
        .len();
    if points.iter().any(|p| p.len() != dims) {
        return Err(Error::Parameter("vectors have mixed dimensionality".into()));
    }
    Ok(dims)
}

/// Count of distinct vectors under exact componentwise equality.
pub(crate) fn distinct_count(points: &[Vec<f64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    sorted.windows(2).filter(|w| w[0] != w[1]).count() + 1
}

/// Per-dimension min-max scaling into [0,1]. Constant dimensions map to 0.
pub fn min_max_scale(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let dims = first.len();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for point in points {
        for (d, &v) in point.iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    points
        .iter()
        .map(|point| {
            point
                .iter()
                .enumerate()
                .map(|(d, &v)| {
                    let span = hi[d] - lo[d];
                    if span > 0.0 {
                        (v - lo[d]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Moves every noise vector into the cluster with the nearest centroid
/// (ties to the lowest cluster id), then recomputes centroids and sizes once.
/// Non-noise assignments are never touched.
pub fn reassign_outliers(model: &ClusterModel, points: &[Vec<f64>]) -> Result<ClusterModel> {
    if model.cluster_count() == 0 {
        return Err(Error::Clustering(
            "no clusters to reassign outliers into; loosen eps or lower min-pts".into(),
        ));
    }
    if points.len() != model.assignments.len() {
        return Err(Error::Parameter(format!(
            "model covers {} vectors but {} were supplied",
            model.assignments.len(),
            points.len()
        )));
    }
    if model.noise_count() == 0 {
        return Ok(model.clone());
    }
    let dims = check_uniform_dims(points)?;
    // all reassignments are decided against the original centroids
    let assignments: Vec<Assignment> = model
        .assignments
        .iter()
        .zip(points)
        .map(|(a, p)| match a {
            Assignment::Noise => Assignment::Cluster(nearest_centroid(p, &model.centroids)),
            keep => *keep,
        })
        .collect();
    let (centroids, sizes) = centroids_of(points, &assignments, model.cluster_count(), dims);
    let mut params = model.params.clone();
    params.reassigned_outliers = true;
    Ok(ClusterModel {
        algorithm: model.algorithm,
        params,
        assignments,
        centroids,
        sizes,
    })
}
