//! Clustering and naming steps shared by `run` and the standalone
//! subcommands.

use std::fs;
use std::io::{BufRead, BufReader, IsTerminal, Write};

use sessionlift_core::cluster::{
    dbscan, elbow, kmeans, median_knn_distance, min_max_scale, reassign_outliers, ClusterModel,
    ElbowReport, KMeansConfig,
};
use sessionlift_core::view::{auto_name, load_names, ClusterNaming, NormalizedCentroids};

use crate::args::{AlgorithmArg, ClusterFlags, NamingFlags};
use crate::cli_error::{CliError, CliResult};

pub struct ClusterOutcome {
    pub model: ClusterModel,
    pub elbow: Option<ElbowReport>,
    /// Noise count straight out of DBSCAN, before any reassignment.
    pub noise_found: usize,
    pub selected_k: Option<usize>,
    pub resolved_eps: Option<f64>,
    pub resolved_min_pts: Option<usize>,
    pub warnings: Vec<String>,
}

/// Runs the configured clustering (plus elbow selection and outlier
/// reassignment) over the points.
pub fn run_clustering(points: &[Vec<f64>], flags: &ClusterFlags) -> CliResult<ClusterOutcome> {
    flags.validate()?;
    let mut warnings = Vec::new();
    match flags.cluster {
        AlgorithmArg::Kmeans => {
            let mut elbow_report = None;
            let k = match (flags.k, flags.k_range) {
                (Some(k), _) => k,
                (None, Some(range)) => {
                    let report = elbow(points, range, flags.seed)?;
                    let selected = report.selected_k.ok_or_else(|| {
                        CliError::usage(format!(
                            "elbow over {}..{} is too short to select k; pass --k or widen the range",
                            range.0, range.1
                        ))
                    })?;
                    elbow_report = Some(report);
                    selected
                }
                (None, None) => unreachable!("validated: kmeans needs --k or --k-range"),
            };
            let config = KMeansConfig {
                k,
                seed: flags.seed,
                max_iter: flags.max_iter,
                tol: flags.tol,
            };
            let model = kmeans(points, config)?;
            Ok(ClusterOutcome {
                model,
                selected_k: Some(k),
                elbow: elbow_report,
                noise_found: 0,
                resolved_eps: None,
                resolved_min_pts: None,
                warnings,
            })
        }
        AlgorithmArg::Dbscan => {
            let min_pts = flags.min_pts.unwrap_or(4);
            let eps = match flags.eps {
                Some(eps) => eps,
                None => {
                    let eps = median_knn_distance(points, 4).ok_or_else(|| {
                        CliError::usage("too few vectors to derive a default eps; pass --eps")
                    })?;
                    warnings.push(format!(
                        "eps not given; using median 4-NN distance {eps} as a starting point"
                    ));
                    eps
                }
            };
            let mut model = dbscan(points, eps, min_pts)?;
            let noise_found = model.noise_count();
            if model.cluster_count() == 0 {
                warnings.push(
                    "DBSCAN found no clusters (all points are noise); naming and abstraction \
                     will fail until eps/min-pts change"
                        .to_string(),
                );
            }
            if flags.reassign_outliers {
                model = reassign_outliers(&model, points)?;
            } else if noise_found > 0 {
                warnings.push(format!(
                    "{noise_found} noise session(s) remain; abstraction will refuse them \
                     (consider --reassign-outliers)"
                ));
            }
            Ok(ClusterOutcome {
                model,
                elbow: None,
                noise_found,
                selected_k: None,
                resolved_eps: Some(eps),
                resolved_min_pts: Some(min_pts),
                warnings,
            })
        }
    }
}

/// Applies optional min-max scaling, returning the points to cluster on.
pub fn maybe_scale(values: Vec<Vec<f64>>, scale: bool) -> Vec<Vec<f64>> {
    if scale {
        min_max_scale(&values)
    } else {
        values
    }
}

/// Resolves cluster names: user file > interactive prompt > automatic.
pub fn resolve_naming(
    nc: &NormalizedCentroids,
    sizes: &[usize],
    flags: &NamingFlags,
    warnings: &mut Vec<String>,
) -> CliResult<ClusterNaming> {
    flags.validate()?;
    let naming = if let Some(path) = &flags.names_file {
        let file = fs::File::open(path)
            .map_err(|e| CliError::data(format!("cannot open names file {}: {e}", path.display())))?;
        load_names(BufReader::new(file), nc.n_clusters)?
    } else if flags.interactive_names {
        prompt_names(nc, sizes, flags.concat_ratio, warnings)?
    } else {
        auto_name(nc, flags.concat_ratio)?
    };
    let duplicates = naming.duplicate_names();
    if !duplicates.is_empty() {
        warnings.push(format!(
            "duplicate cluster names merge high-level activities: {}",
            duplicates.join(", ")
        ));
    }
    if naming.provenance == sessionlift_core::view::NameProvenance::Automatic {
        for (id, name) in naming.names.iter().enumerate() {
            if name == &format!("cluster_{id}") {
                warnings.push(format!(
                    "cluster {id} has an all-zero centroid; named {name:?} as a fallback"
                ));
            }
        }
    }
    Ok(naming)
}

/// Shows each cluster's strongest dimensions and reads one name per line
/// from stdin; an empty line accepts the automatic suggestion. When stdin
/// runs out (or is closed), the remaining clusters keep their automatic
/// names and a warning records the fallback.
fn prompt_names(
    nc: &NormalizedCentroids,
    sizes: &[usize],
    concat_ratio: f64,
    warnings: &mut Vec<String>,
) -> CliResult<ClusterNaming> {
    let suggestions = auto_name(nc, concat_ratio)?;
    let stdin = std::io::stdin();
    if stdin.is_terminal() {
        eprintln!("interactive naming: empty input accepts the suggestion");
    }
    let mut input = BufReader::new(stdin.lock());
    let mut names = Vec::with_capacity(nc.n_clusters);
    let mut overridden = false;
    let mut exhausted = false;
    for cluster in 0..nc.n_clusters {
        let suggestion = &suggestions.names[cluster];
        if !exhausted {
            describe_cluster(nc, sizes, cluster);
            eprint!("name for cluster {cluster} [{suggestion}]: ");
            let _ = std::io::stderr().flush();
            let mut line = String::new();
            match input.read_line(&mut line) {
                Ok(0) | Err(_) => {
                    exhausted = true;
                }
                Ok(_) => {
                    let trimmed = line.trim();
                    if trimmed.is_empty() {
                        names.push(suggestion.clone());
                    } else {
                        names.push(trimmed.to_string());
                        overridden = true;
                    }
                    continue;
                }
            }
        }
        names.push(suggestion.clone());
    }
    if exhausted {
        warnings.push(
            "interactive naming input ended early; remaining clusters keep automatic names"
                .to_string(),
        );
    }
    Ok(ClusterNaming {
        names,
        provenance: if overridden {
            sessionlift_core::view::NameProvenance::User
        } else {
            sessionlift_core::view::NameProvenance::Automatic
        },
    })
}

/// Prints the top five dimensions of one cluster to stderr.
fn describe_cluster(nc: &NormalizedCentroids, sizes: &[usize], cluster: usize) {
    let mut ranked: Vec<(usize, f64)> = nc
        .column(cluster)
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v > 0.0)
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| nc.activities[a.0].cmp(&nc.activities[b.0])));
    ranked.truncate(5);
    let size = sizes.get(cluster).copied().unwrap_or(0);
    let summary: Vec<String> = ranked
        .iter()
        .map(|(r, v)| format!("{}={:.3}", nc.activities[*r], v))
        .collect();
    eprintln!("cluster {cluster} ({size} sessions): {}", summary.join(", "));
}
