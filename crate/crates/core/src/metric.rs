//! Built-in metrics and distance-matrix construction.

use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, graft_point, graph_all_pairs};
use crate::kernel::{kernel_distance, kernel_distance_matrix, KernelDescriptor};
use crate::matrix::{DistanceMatrix, DistanceVector};
use crate::par::map_indices;
use crate::points::PointSet;

pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Declarative choice of metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricDescriptor {
    Euclidean,
    /// (Σ|Δ|^p)^(1/p). Not a true metric for p < 1 but permitted, matching
    /// the Lp sweep down to p = 0.5.
    Lp(f64),
    /// Great-circle distance on the unit sphere.
    ArcLength,
    Hamming,
    Discrete,
    /// British rail: ‖x₁‖ + ‖x₂‖ for distinct points.
    Rail,
    Kernel(KernelDescriptor),
    /// Geodesic distance on the k-NN graph of the euclidean distances.
    KnnGraph(usize),
}

impl MetricDescriptor {
    /// False when the triangle inequality is not guaranteed (lp with p < 1).
    pub fn is_true_metric(&self) -> bool {
        !matches!(self, MetricDescriptor::Lp(p) if *p < 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricDescriptor::Lp(p) if !(*p > 0.0) => Err(Error::InvalidLpExponent(*p)),
            MetricDescriptor::KnnGraph(0) => Err(Error::InvalidNeighborCount { k: 0, n: 0 }),
            _ => Ok(()),
        }
    }

    /// Parses the flat CLI grammar:
    /// `euclidean|lp:<p>|arclength|hamming|discrete|rail|kernel:gaussian:<gamma>|kernel:rq|kernel:linear|knn:<k>`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::UnknownMetric(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let m = match parts.as_slice() {
            ["euclidean"] => MetricDescriptor::Euclidean,
            ["lp", p] => MetricDescriptor::Lp(p.parse().map_err(|_| bad())?),
            ["arclength"] => MetricDescriptor::ArcLength,
            ["hamming"] => MetricDescriptor::Hamming,
            ["discrete"] => MetricDescriptor::Discrete,
            ["rail"] => MetricDescriptor::Rail,
            ["kernel", "gaussian", g] => MetricDescriptor::Kernel(KernelDescriptor::Gaussian {
                gamma: g.parse().map_err(|_| bad())?,
            }),
            ["kernel", "rq"] => MetricDescriptor::Kernel(KernelDescriptor::RationalQuadratic),
            ["kernel", "linear"] => MetricDescriptor::Kernel(KernelDescriptor::Linear),
            ["knn", k] => MetricDescriptor::KnnGraph(k.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        m.validate()?;
        Ok(m)
    }
}

impl std::fmt::Display for MetricDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricDescriptor::Euclidean => write!(f, "euclidean"),
            MetricDescriptor::Lp(p) => write!(f, "lp:{p}"),
            MetricDescriptor::ArcLength => write!(f, "arclength"),
            MetricDescriptor::Hamming => write!(f, "hamming"),
            MetricDescriptor::Discrete => write!(f, "discrete"),
            MetricDescriptor::Rail => write!(f, "rail"),
            MetricDescriptor::Kernel(KernelDescriptor::Gaussian { gamma }) => {
                write!(f, "kernel:gaussian:{gamma}")
            }
            MetricDescriptor::Kernel(KernelDescriptor::RationalQuadratic) => write!(f, "kernel:rq"),
            MetricDescriptor::Kernel(KernelDescriptor::Linear) => write!(f, "kernel:linear"),
            MetricDescriptor::KnnGraph(k) => write!(f, "knn:{k}"),
        }
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn lp(a: &[f64], b: &[f64], p: f64) -> f64 {
    // p = 2 takes the euclidean path so lp:2 and euclidean agree bit-for-bit
    if p == 2.0 {
        return euclidean(a, b);
    }
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum();
    s.powf(1.0 / p)
}

/// Inner products are clamped to [−1, 1] before arccos: rounding can push
/// them just outside.
fn arc_length(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot.clamp(-1.0, 1.0).acos()
}

fn hamming(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Exact coordinate equality defines "same point" for the indicator metrics.
fn same_point(a: &[f64], b: &[f64]) -> bool {
    a == b
}

fn check_preconditions(points: &PointSet, metric: &MetricDescriptor) -> Result<()> {
    metric.validate()?;
    match metric {
        MetricDescriptor::ArcLength => {
            for (i, row) in points.rows().enumerate() {
                let nrm = norm(row);
                if (nrm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::NonUnitNorm { row: i, norm: nrm });
                }
            }
        }
        MetricDescriptor::Hamming => {
            for (i, row) in points.rows().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if v != 0.0 && v != 1.0 {
                        return Err(Error::NonBinaryEntry {
                            row: i,
                            col: j,
                            value: v,
                        });
                    }
                }
            }
        }
        MetricDescriptor::KnnGraph(k) => {
            if *k == 0 || *k > points.n().saturating_sub(1) {
                return Err(Error::InvalidNeighborCount {
                    k: *k,
                    n: points.n(),
                });
            }
        }
        _ => {}
    }
    Ok(())
}

fn check_point(mu: &[f64], p: usize, metric: &MetricDescriptor) -> Result<()> {
    if mu.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: mu.len(),
        });
    }
    match metric {
        MetricDescriptor::ArcLength => {
            let nrm = norm(mu);
            if (nrm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::NonUnitNorm {
                    row: usize::MAX,
                    norm: nrm,
                });
            }
        }
        MetricDescriptor::Hamming => {
            for (j, &v) in mu.iter().enumerate() {
                if v != 0.0 && v != 1.0 {
                    return Err(Error::NonBinaryEntry {
                        row: usize::MAX,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// Distance between two coordinate vectors under a non-graph metric.
pub fn point_distance(a: &[f64], b: &[f64], metric: &MetricDescriptor) -> Result<f64> {
    Ok(match metric {
        MetricDescriptor::Euclidean => euclidean(a, b),
        MetricDescriptor::Lp(p) => lp(a, b, *p),
        MetricDescriptor::ArcLength => arc_length(a, b),
        MetricDescriptor::Hamming => hamming(a, b),
        MetricDescriptor::Discrete => {
            if same_point(a, b) {
                0.0
            } else {
                1.0
            }
        }
        MetricDescriptor::Rail => {
            if same_point(a, b) {
                0.0
            } else {
                norm(a) + norm(b)
            }
        }
        MetricDescriptor::Kernel(kernel) => kernel_distance(a, b, *kernel)?,
        MetricDescriptor::KnnGraph(_) => {
            return Err(Error::InvalidConfig(
                "knn-graph distances are defined on a sample, not on point pairs".into(),
            ))
        }
    })
}

/// All pairwise distances under `metric`. Rows are computed independently
/// (and in parallel), and the upper triangle mirrored, so the result is
/// identical regardless of the parallel schedule.
pub fn pairwise_distances(points: &PointSet, metric: &MetricDescriptor) -> Result<DistanceMatrix> {
    check_preconditions(points, metric)?;
    match metric {
        MetricDescriptor::Kernel(kernel) => return kernel_distance_matrix(points, *kernel),
        MetricDescriptor::KnnGraph(k) => {
            let base = pairwise_distances(points, &MetricDescriptor::Euclidean)?;
            let graph = build_knn_graph(&base, *k)?;
            return graph_all_pairs(&graph);
        }
        _ => {}
    }
    let n = points.n();
    let metric = *metric;
    let rows = map_indices(n, |i| {
        let xi = points.row(i);
        ((i + 1)..n)
            .map(|j| point_distance(xi, points.row(j), &metric).expect("validated"))
            .collect::<Vec<f64>>()
    });
    let mut data = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            let j = i + 1 + off;
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix::new(data, n)
}

/// Distances from each sample point to a query point `mu`. For the
/// knn-graph metric the query is grafted to the graph by its k nearest
/// sample points.
pub fn distances_to_point(
    points: &PointSet,
    mu: &[f64],
    metric: &MetricDescriptor,
) -> Result<DistanceVector> {
    check_preconditions(points, metric)?;
    check_point(mu, points.p(), metric)?;
    if let MetricDescriptor::KnnGraph(k) = metric {
        let base = pairwise_distances(points, &MetricDescriptor::Euclidean)?;
        let graph = build_knn_graph(&base, *k)?;
        let direct = distances_to_point(points, mu, &MetricDescriptor::Euclidean)?;
        return graft_point(&graph, &direct, *k);
    }
    points
        .rows()
        .map(|row| point_distance(row, mu, metric))
        .collect()
}
