//! Analytic reference depths for four explicitly solvable scenarios, plus
//! the empirical twin constructions that reproduce them with the sample
//! estimator. Surfaced through the `oracle-check` CLI subcommand.

use crate::depth::spatial_depth;
use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, DistanceVector};
use crate::metric::{distances_to_point, pairwise_distances, MetricDescriptor};
use crate::points::PointSet;

/// Exact finite-sample identities are held to this tolerance.
pub const EXACT_TOL: f64 = 1e-9;
/// Asymptotic limits checked at desk scale.
pub const ASYMPTOTIC_TOL: f64 = 1e-3;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidProbabilityVector("empty".into()));
        }
        if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidProbabilityVector(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbabilityVector(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Spatial depth in a Euclidean space: 1 − ‖mean sign vector‖², sgn(0) = 0.
pub fn hilbert_depth(points: &PointSet, mu: &[f64]) -> Result<f64> {
    if mu.len() != points.p() {
        return Err(Error::DimensionMismatch {
            expected: points.p(),
            got: mu.len(),
        });
    }
    let p = points.p();
    let mut mean_sign = vec![0.0; p];
    for row in points.rows() {
        let norm: f64 = row
            .iter()
            .zip(mu)
            .map(|(x, m)| (x - m) * (x - m))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        for (acc, (x, m)) in mean_sign.iter_mut().zip(row.iter().zip(mu)) {
            *acc += (x - m) / norm;
        }
    }
    let n = points.n() as f64;
    let sq: f64 = mean_sign.iter().map(|s| (s / n) * (s / n)).sum();
    Ok(1.0 - sq)
}

/// Depth of point `index` in a finite set under the discrete metric:
/// ½(1 − Σ pᵢ²) + p_index.
pub fn discrete_metric_depth(p: &ProbabilityVector, index: usize) -> Result<f64> {
    let probs = p.as_slice();
    if index >= probs.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: probs.len(),
        });
    }
    let sum_sq: f64 = probs.iter().map(|x| x * x).sum();
    Ok(0.5 * (1.0 - sum_sq) + probs[index])
}

/// Upper bound on the depth of one of n equiprobable distinct points:
/// 1 + (1 − 1/n)(1 − 3/n). Attained exactly by hub-and-spoke distances.
pub fn star_graph_bound(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::TooFewPoints { need: 1, got: n });
    }
    let nf = n as f64;
    Ok(1.0 + (1.0 - 1.0 / nf) * (1.0 - 3.0 / nf))
}

/// Distance matrix of a star graph: point 0 is the hub, d(0, i) = lenᵢ and
/// d(i, j) = lenᵢ + lenⱼ for spokes i ≠ j.
pub fn star_graph_distance_matrix(n: usize, edge_lengths: &[f64]) -> Result<DistanceMatrix> {
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    if edge_lengths.len() != n - 1 {
        return Err(Error::LengthMismatch {
            expected: n - 1,
            got: edge_lengths.len(),
        });
    }
    if let Some(&bad) = edge_lengths.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::NonPositiveEdgeLength(bad));
    }
    DistanceMatrix::from_fn(n, |i, j| {
        // i < j always holds here
        if i == 0 {
            edge_lengths[j - 1]
        } else {
            edge_lengths[i - 1] + edge_lengths[j - 1]
        }
    })
}

/// Depth of a support point of the 2k-point equispaced circle under the
/// arc-length distance: −1 + 1/k − 1/(4k²) + Σ_{j=1..k} 1/j².
pub fn circle_uniform_depth_finite(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let kf = k as f64;
    let partial: f64 = (1..=k).map(|j| 1.0 / (j as f64 * j as f64)).sum();
    Ok(-1.0 + 1.0 / kf - 1.0 / (4.0 * kf * kf) + partial)
}

/// Rail-metric depth at a point of norm `mu_norm` for an empirical sample
/// given by its (strictly positive) norms:
/// mean over ordered pairs of 2‖X₁‖‖X₂‖ / ((‖X₁‖+‖μ‖)(‖X₂‖+‖μ‖)).
pub fn rail_depth_origin(norms: &[f64], mu_norm: f64) -> Result<f64> {
    if norms.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if let Some(&bad) = norms.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveNorm(bad));
    }
    if !(mu_norm >= 0.0) {
        return Err(Error::NonPositiveNorm(mu_norm));
    }
    let mean_factor: f64 =
        norms.iter().map(|&x| x / (x + mu_norm)).sum::<f64>() / norms.len() as f64;
    Ok(2.0 * mean_factor * mean_factor)
}

// --- empirical twins ---------------------------------------------------

/// 2k equispaced points on the unit circle.
pub fn equispaced_circle_points(k: usize) -> PointSet {
    let n = 2 * k;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            vec![theta.cos(), theta.sin()]
        })
        .collect();
    PointSet::from_rows(&rows).expect("nonempty")
}

/// Empirical spatial depth of support point 0 of the 2k-equispaced circle
/// under the arc-length metric.
pub fn circle_empirical_depth(k: usize) -> Result<f64> {
    let pts = equispaced_circle_points(k);
    let d = pairwise_distances(&pts, &MetricDescriptor::ArcLength)?;
    spatial_depth(&d.row(0).to_vec(), &d)
}

/// Realizes a rational probability vector by replicating category points
/// with integer multiplicities, then evaluates the spatial depth of the
/// `index` category under the discrete metric.
pub fn discrete_empirical_depth(multiplicities: &[usize], index: usize) -> Result<f64> {
    if multiplicities.iter().any(|&m| m == 0) {
        return Err(Error::InvalidProbabilityVector(
            "zero multiplicity".into(),
        ));
    }
    if index >= multiplicities.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: multiplicities.len(),
        });
    }
    let mut values = Vec::new();
    for (cat, &m) in multiplicities.iter().enumerate() {
        values.extend(std::iter::repeat(cat as f64).take(m));
    }
    let pts = PointSet::from_scalars(&values)?;
    let d = pairwise_distances(&pts, &MetricDescriptor::Discrete)?;
    let v = distances_to_point(&pts, &[index as f64], &MetricDescriptor::Discrete)?;
    spatial_depth(&v, &d)
}

/// Empirical spatial depth of the hub of a star graph.
pub fn star_graph_empirical_depth(n: usize, edge_lengths: &[f64]) -> Result<f64> {
    let d = star_graph_distance_matrix(n, edge_lengths)?;
    spatial_depth(&d.row(0).to_vec(), &d)
}

/// Empirical rail-metric spatial depth at a point with norm `mu_norm`
/// lying in a direction distinct from every sample point. Distances are
/// formed directly from the norms: d(Xᵢ, μ) = ‖Xᵢ‖ + ‖μ‖ (or ‖Xᵢ‖ when
/// μ is the origin), d(Xᵢ, Xⱼ) = ‖Xᵢ‖ + ‖Xⱼ‖ for i ≠ j.
pub fn rail_empirical_depth(norms: &[f64], mu_norm: f64) -> Result<f64> {
    if let Some(&bad) = norms.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveNorm(bad));
    }
    let n = norms.len();
    let d = DistanceMatrix::from_fn(n, |i, j| norms[i] + norms[j])?;
    let v: DistanceVector = norms.iter().map(|&x| x + mu_norm).collect();
    spatial_depth(&v, &d)
}

// --- oracle-check report ------------------------------------------------

#[derive(Debug, Clone)]
pub struct OracleCheckRow {
    pub name: String,
    pub analytic: f64,
    pub empirical: f64,
    pub tolerance: f64,
}

impl OracleCheckRow {
    pub fn gap(&self) -> f64 {
        (self.analytic - self.empirical).abs()
    }

    pub fn pass(&self) -> bool {
        self.gap() <= self.tolerance
    }
}

/// Every oracle paired with its empirical twin, for the CLI table and the
/// acceptance suite.
pub fn oracle_check() -> Result<Vec<OracleCheckRow>> {
    let mut rows = Vec::new();

    for k in [1usize, 5, 50] {
        rows.push(OracleCheckRow {
            name: format!("circle k={k}"),
            analytic: circle_uniform_depth_finite(k)?,
            empirical: circle_empirical_depth(k)?,
            tolerance: EXACT_TOL,
        });
    }
    rows.push(OracleCheckRow {
        name: "circle k=100 vs pi^2/6 - 1".into(),
        analytic: std::f64::consts::PI.powi(2) / 6.0 - 1.0,
        empirical: circle_empirical_depth(100)?,
        tolerance: 1e-2,
    });

    let ones = vec![1.0; 10];
    rows.push(OracleCheckRow {
        name: "star graph n=11".into(),
        analytic: star_graph_bound(11)?,
        empirical: star_graph_empirical_depth(11, &ones)?,
        tolerance: EXACT_TOL,
    });

    for (mults, idx) in [(vec![1usize, 1], 0), (vec![3, 2, 1], 0), (vec![1, 4, 2, 3], 2)] {
        let total: usize = mults.iter().sum();
        let probs: Vec<f64> = mults.iter().map(|&m| m as f64 / total as f64).collect();
        let p = ProbabilityVector::new(probs)?;
        rows.push(OracleCheckRow {
            name: format!("discrete {mults:?} idx={idx}"),
            analytic: discrete_metric_depth(&p, idx)?,
            empirical: discrete_empirical_depth(&mults, idx)?,
            tolerance: EXACT_TOL,
        });
    }

    let norms: Vec<f64> = (1..=40).map(|i| 0.5 + i as f64 * 0.25).collect();
    rows.push(OracleCheckRow {
        name: "rail mu=0, n=40 vs 2 - 2/n".into(),
        analytic: 2.0 - 2.0 / 40.0,
        empirical: rail_empirical_depth(&norms, 0.0)?,
        tolerance: EXACT_TOL,
    });
    rows.push(OracleCheckRow {
        name: "rail |mu|=3 closed form".into(),
        analytic: rail_depth_origin(&norms, 3.0)?,
        empirical: rail_empirical_depth(&norms, 3.0)?,
        // closed form is the atomless limit: empirical diagonal terms
        // contribute O(1/n)
        tolerance: 0.05,
    });

    Ok(rows)
}
