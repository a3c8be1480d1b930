//! Density-based clustering with core/border/noise semantics.
//!
//! Neighborhoods use Euclidean distance with `dist <= eps`, counting the
//! point itself, and a point is core when its neighborhood holds at least
//! `min_pts` points. Clusters are the density-connected components of core
//! points; border points join the first (lowest-id) cluster that reaches
//! them. Everything is deterministic in the input order.

use std::collections::VecDeque;

use super::{
    centroids_of, check_uniform_dims, distance_squared, Assignment, ClusterAlgorithm, ClusterModel,
    ClusterParams,
};
use crate::error::{Error, Result};

pub fn dbscan(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Result<ClusterModel> {
    let dims = check_uniform_dims(points)?;
    if eps.is_nan() || eps <= 0.0 || eps.is_infinite() {
        return Err(Error::Parameter(format!("eps must be positive and finite, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::Parameter("min-pts must be positive".into()));
    }

    let eps2 = eps * eps;
    let neighbors = |i: usize| -> Vec<usize> {
        points
            .iter()
            .enumerate()
            .filter(|(_, q)| distance_squared(&points[i], q) <= eps2)
            .map(|(j, _)| j)
            .collect()
    };

    let mut labels: Vec<Option<Assignment>> = vec![None; points.len()];
    let mut next_cluster = 0usize;
    for i in 0..points.len() {
        if labels[i].is_some() {
            continue;
        }
        let seed_neighbors = neighbors(i);
        if seed_neighbors.len() < min_pts {
            labels[i] = Some(Assignment::Noise);
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[i] = Some(Assignment::Cluster(cluster));
        let mut queue: VecDeque<usize> = seed_neighbors.into_iter().filter(|&j| j != i).collect();
        while let Some(j) = queue.pop_front() {
            if labels[j] == Some(Assignment::Noise) {
                // border point, previously judged in isolation
                labels[j] = Some(Assignment::Cluster(cluster));
            }
            if labels[j].is_some() {
                continue;
            }
            labels[j] = Some(Assignment::Cluster(cluster));
            let reach = neighbors(j);
            if reach.len() >= min_pts {
                queue.extend(reach);
            }
        }
    }

    let assignments: Vec<Assignment> = labels
        .into_iter()
        .map(|l| l.expect("every point labeled"))
        .collect();
    let (centroids, sizes) = centroids_of(points, &assignments, next_cluster, dims);
    Ok(ClusterModel {
        algorithm: ClusterAlgorithm::Dbscan,
        params: ClusterParams {
            eps: Some(eps),
            min_pts: Some(min_pts),
            ..ClusterParams::default()
        },
        assignments,
        centroids,
        sizes,
    })
}

/// Median distance to the `k`-th nearest neighbor, a common starting point
/// for eps when nothing better is known. Deterministic in the input order.
pub fn median_knn_distance(points: &[Vec<f64>], k: usize) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = k.max(1);
    let mut kth: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut dists: Vec<f64> = points
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| distance_squared(p, q).sqrt())
                .collect();
            dists.sort_by(f64::total_cmp);
            dists[k.min(dists.len()) - 1]
        })
        .collect();
    kth.sort_by(f64::total_cmp);
    Some(kth[kth.len() / 2])
}
