//! Lloyd's K-Means with seeded k-means++ initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    centroids_of, check_uniform_dims, distance_squared, distinct_count, nearest_centroid,
    Assignment, ClusterAlgorithm, ClusterModel, ClusterParams,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            seed,
            max_iter: 100,
            // tol 0 means: iterate until the assignment is an exact fixed
            // point (or max_iter), not until centroids merely crawl
            tol: 0.0,
        }
    }
}

/// Runs Lloyd's iteration from a k-means++ start. Terminates when the
/// assignment stops changing, when centroid movement drops below `tol`
/// (if positive), or after `max_iter` rounds. Empty clusters are repaired by
/// reseeding them with the point farthest from its own centroid, so the
/// output always has exactly `k` non-empty clusters.
pub fn kmeans(points: &[Vec<f64>], config: KMeansConfig) -> Result<ClusterModel> {
    let dims = check_uniform_dims(points)?;
    if config.k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    if config.max_iter == 0 {
        return Err(Error::Parameter("max_iter must be positive".into()));
    }
    if config.tol < 0.0 {
        return Err(Error::Parameter("tol must be non-negative".into()));
    }
    let distinct = distinct_count(points);
    if config.k > distinct {
        return Err(Error::Parameter(format!(
            "k={} exceeds the {} distinct vectors",
            config.k, distinct
        )));
    }

    let centroids = plus_plus_init(points, config.k, config.seed);
    lloyd(points, centroids, dims, config)
}

/// Lloyd's iteration from explicit starting centroids (used by the elbow
/// warm start as well as from the k-means++ entry point).
pub(super) fn lloyd(
    points: &[Vec<f64>],
    mut centroids: Vec<Vec<f64>>,
    dims: usize,
    config: KMeansConfig,
) -> Result<ClusterModel> {
    let k = centroids.len();
    let mut prev: Option<Vec<usize>> = None;
    let mut sizes = vec![0usize; k];
    let mut labels: Vec<usize> = Vec::new();

    for _ in 0..config.max_iter {
        let mut assignment: Vec<usize> =
            points.iter().map(|p| nearest_centroid(p, &centroids)).collect();
        repair_empty_clusters(points, &mut assignment, &centroids, k);

        let wrapped: Vec<Assignment> = assignment.iter().map(|&id| Assignment::Cluster(id)).collect();
        let (new_centroids, new_sizes) = centroids_of(points, &wrapped, k, dims);
        let movement = centroids
            .iter()
            .zip(&new_centroids)
            .map(|(a, b)| distance_squared(a, b).sqrt())
            .fold(0.0f64, f64::max);
        centroids = new_centroids;
        sizes = new_sizes;

        let stable = prev.as_ref() == Some(&assignment);
        labels = assignment.clone();
        prev = Some(assignment);
        if stable || (config.tol > 0.0 && movement < config.tol) {
            break;
        }
    }

    Ok(ClusterModel {
        algorithm: ClusterAlgorithm::Kmeans,
        params: ClusterParams {
            k: Some(k),
            seed: Some(config.seed),
            max_iter: Some(config.max_iter),
            tol: Some(config.tol),
            ..ClusterParams::default()
        },
        assignments: labels.into_iter().map(Assignment::Cluster).collect(),
        centroids,
        sizes,
    })
}

/// Seeded k-means++: first center uniform, then D^2-weighted sampling.
/// Points coinciding with a chosen center carry zero mass, so all k starting
/// centers are distinct whenever k <= distinct-vector count.
fn plus_plus_init(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());

    let mut best_d2: Vec<f64> = points
        .iter()
        .map(|p| distance_squared(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = best_d2.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (i, &d2) in best_d2.iter().enumerate() {
            cumulative += d2;
            if d2 > 0.0 && cumulative > target {
                chosen = Some(i);
                break;
            }
        }
        // floating-point tail: fall back to the last point with positive mass
        let chosen = chosen.unwrap_or_else(|| {
            best_d2
                .iter()
                .rposition(|&d2| d2 > 0.0)
                .expect("k <= distinct count guarantees a positive-mass point")
        });
        centroids.push(points[chosen].clone());
        let latest = centroids.last().unwrap();
        for (d2, p) in best_d2.iter_mut().zip(points) {
            *d2 = d2.min(distance_squared(p, latest));
        }
    }
    centroids
}

/// Gives every empty cluster the point currently farthest from its own
/// centroid (ties to the lowest point index). Points that are the sole
/// member of their cluster stay put so repair never empties another cluster.
fn repair_empty_clusters(
    points: &[Vec<f64>],
    assignment: &mut [usize],
    centroids: &[Vec<f64>],
    k: usize,
) {
    let mut counts = vec![0usize; k];
    for &id in assignment.iter() {
        counts[id] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut farthest: Option<(usize, f64)> = None;
        for (i, point) in points.iter().enumerate() {
            if counts[assignment[i]] <= 1 {
                continue;
            }
            let d2 = distance_squared(point, &centroids[assignment[i]]);
            if farthest.is_none_or(|(_, best)| d2 > best) {
                farthest = Some((i, d2));
            }
        }
        if let Some((i, _)) = farthest {
            counts[assignment[i]] -= 1;
            assignment[i] = empty;
            counts[empty] = 1;
        }
    }
}
