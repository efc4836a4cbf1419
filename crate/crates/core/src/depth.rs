//! Depth estimators operating purely on distances: metric spatial depth,
//! lens depth, half-space depth and the spatial-depth influence function.

use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, DistanceVector};
use crate::par::map_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthMethod {
    Spatial,
    Lens,
    Halfspace,
}

impl DepthMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spatial" => Ok(DepthMethod::Spatial),
            "lens" => Ok(DepthMethod::Lens),
            "halfspace" => Ok(DepthMethod::Halfspace),
            _ => Err(Error::InvalidConfig(format!("unknown depth method {s:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DepthMethod::Spatial => "spatial",
            DepthMethod::Lens => "lens",
            DepthMethod::Halfspace => "halfspace",
        }
    }
}

impl std::fmt::Display for DepthMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-point depth values tagged with the method that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthVector {
    pub values: Vec<f64>,
    pub method: DepthMethod,
}

/// The auxiliary kernel of the metric spatial depth, evaluated from the
/// three pairwise distances d(x₁, x₃), d(x₂, x₃), d(x₁, x₂). The indicator
/// x₃ ∉ {x₁, x₂} is realized as a zero-distance test, which also removes
/// the singularity of the ratio.
#[inline]
pub fn h_term(d13: f64, d23: f64, d12: f64) -> f64 {
    if d13 == 0.0 || d23 == 0.0 {
        return 0.0;
    }
    (d13 * d13 + d23 * d23 - d12 * d12) / (d13 * d23)
}

fn check_len(dist_to_mu: &[f64], d: &DistanceMatrix) -> Result<()> {
    if dist_to_mu.len() != d.n() {
        return Err(Error::LengthMismatch {
            expected: d.n(),
            got: dist_to_mu.len(),
        });
    }
    Ok(())
}

/// Mean of h(Xᵢ, Xⱼ, μ) over all n² ordered pairs, diagonal included.
fn mean_h(dist_to_mu: &[f64], d: &DistanceMatrix) -> f64 {
    let n = d.n();
    let mut sum = 0.0;
    for i in 0..n {
        let di = dist_to_mu[i];
        if di == 0.0 {
            continue;
        }
        let row = d.row(i);
        for j in 0..n {
            sum += h_term(di, dist_to_mu[j], row[j]);
        }
    }
    sum / (n * n) as f64
}

/// Sample metric spatial depth of μ: 1 − (1/2n²) Σᵢⱼ h(Xᵢ, Xⱼ, μ), the
/// double sum running over all ordered pairs including i = j.
pub fn spatial_depth(dist_to_mu: &DistanceVector, d: &DistanceMatrix) -> Result<f64> {
    check_len(dist_to_mu, d)?;
    Ok(1.0 - 0.5 * mean_h(dist_to_mu, d))
}

/// Lens depth of μ: the proportion of unordered sample pairs i < j with
/// d(Xᵢ, Xⱼ) ≥ max{d(Xᵢ, μ), d(Xⱼ, μ)} (ties inclusive).
pub fn lens_depth(dist_to_mu: &DistanceVector, d: &DistanceMatrix) -> Result<f64> {
    check_len(dist_to_mu, d)?;
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let mut hits = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if d.get(i, j) >= dist_to_mu[i].max(dist_to_mu[j]) {
                hits += 1;
            }
        }
    }
    Ok(hits as f64 / (n * (n - 1) / 2) as f64)
}

/// Metric half-space depth of μ: minimum over ordered anchor pairs
/// (z₁, z₂) of distinct sample points with d(z₁, μ) ≤ d(z₂, μ) of the
/// fraction of points with d(X, z₁) ≤ d(X, z₂).
pub fn halfspace_depth(dist_to_mu: &DistanceVector, d: &DistanceMatrix) -> Result<f64> {
    check_len(dist_to_mu, d)?;
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, got: n });
    }
    let mut best = 1.0f64;
    for a in 0..n {
        for b in 0..n {
            if a == b || dist_to_mu[a] > dist_to_mu[b] {
                continue;
            }
            let mut count = 0usize;
            for i in 0..n {
                if d.get(i, a) <= d.get(i, b) {
                    count += 1;
                }
            }
            let frac = count as f64 / n as f64;
            if frac < best {
                best = frac;
            }
        }
    }
    Ok(best)
}

/// Depth of every sample point, taking μ = Xₖ with row k of the matrix as
/// its distance vector. Parallelizes over k; values are bit-identical to
/// per-point calls.
pub fn depth_all(d: &DistanceMatrix, method: DepthMethod) -> Result<DepthVector> {
    let n = d.n();
    let values = map_indices(n, |k| {
        let row = d.row(k).to_vec();
        match method {
            DepthMethod::Spatial => spatial_depth(&row, d),
            DepthMethod::Lens => lens_depth(&row, d),
            DepthMethod::Halfspace => halfspace_depth(&row, d),
        }
    });
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(DepthVector { values, method })
}

pub fn spatial_depth_all(d: &DistanceMatrix) -> Result<DepthVector> {
    depth_all(d, DepthMethod::Spatial)
}

/// Empirical influence function of the spatial depth at contamination
/// point z: IF = 2 − 2 D(μ) − mean of h(Xᵢ, z, μ).
pub fn influence_function(
    dist_x_to_mu: &DistanceVector,
    d_z_mu: f64,
    dist_x_to_z: &DistanceVector,
    depth_mu: f64,
) -> Result<f64> {
    if dist_x_to_mu.len() != dist_x_to_z.len() {
        return Err(Error::LengthMismatch {
            expected: dist_x_to_mu.len(),
            got: dist_x_to_z.len(),
        });
    }
    let n = dist_x_to_mu.len();
    let mean_h_xz: f64 = dist_x_to_mu
        .iter()
        .zip(dist_x_to_z)
        .map(|(&di, &wi)| h_term(di, d_z_mu, wi))
        .sum::<f64>()
        / n as f64;
    Ok(2.0 - 2.0 * depth_mu - mean_h_xz)
}

/// Spatial depth of μ under the contaminated mixture (1 − ε) Pₙ + ε δ_z,
/// via the mixture expansion of the double expectation. ε = 0 reproduces
/// `spatial_depth` exactly.
pub fn contaminated_spatial_depth(
    dist_to_mu: &DistanceVector,
    d: &DistanceMatrix,
    d_z_mu: f64,
    dist_x_to_z: &DistanceVector,
    eps: f64,
) -> Result<f64> {
    check_len(dist_to_mu, d)?;
    if dist_x_to_z.len() != dist_to_mu.len() {
        return Err(Error::LengthMismatch {
            expected: dist_to_mu.len(),
            got: dist_x_to_z.len(),
        });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidConfig(format!("eps must be in [0, 1], got {eps}")));
    }
    if eps == 0.0 {
        return spatial_depth(dist_to_mu, d);
    }
    let n = dist_to_mu.len();
    let mean_h_xx = mean_h(dist_to_mu, d);
    let mean_h_xz: f64 = dist_to_mu
        .iter()
        .zip(dist_x_to_z)
        .map(|(&di, &wi)| h_term(di, d_z_mu, wi))
        .sum::<f64>()
        / n as f64;
    let h_zz = if d_z_mu == 0.0 { 0.0 } else { 2.0 };
    let mix = (1.0 - eps) * (1.0 - eps) * mean_h_xx
        + 2.0 * eps * (1.0 - eps) * mean_h_xz
        + eps * eps * h_zz;
    Ok(1.0 - 0.5 * mix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distances_to_point, pairwise_distances, MetricDescriptor};
    use crate::points::PointSet;
    use proptest::prelude::*;

    fn one_d(sample: &[f64]) -> (PointSet, DistanceMatrix) {
        let pts = PointSet::from_scalars(sample).unwrap();
        let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
        (pts, d)
    }

    fn depth_at(sample: &[f64], mu: f64) -> f64 {
        let (pts, d) = one_d(sample);
        let v = distances_to_point(&pts, &[mu], &MetricDescriptor::Euclidean).unwrap();
        spatial_depth(&v, &d).unwrap()
    }

    #[test]
    fn h_term_cases() {
        assert_eq!(h_term(1.0, 1.0, 2.0), -2.0);
        assert_eq!(h_term(1.0, 1.0, 0.0), 2.0);
        assert_eq!(h_term(0.0, 1.0, 1.0), 0.0);
        assert_eq!(h_term(1.0, 2.0, 2.0), 0.5);
    }

    #[test]
    fn spatial_depth_line_sample() {
        let sample = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((depth_at(&sample, 3.0) - 1.0).abs() < 1e-14);
        assert!(depth_at(&sample, 6.0).abs() < 1e-14);
        assert!((depth_at(&sample, 1.0) - 0.36).abs() < 1e-14);
    }

    #[test]
    fn spatial_depth_all_matches_per_point() {
        let (_, d) = one_d(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let all = spatial_depth_all(&d).unwrap();
        let expected = [0.36, 0.84, 1.0, 0.84, 0.36];
        for (v, e) in all.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
        for k in 0..5 {
            let row = d.row(k).to_vec();
            assert_eq!(all.values[k], spatial_depth(&row, &d).unwrap());
        }
    }

    #[test]
    fn identical_points_have_depth_one() {
        let (_, d) = one_d(&[7.0, 7.0]);
        let all = spatial_depth_all(&d).unwrap();
        assert_eq!(all.values, vec![1.0, 1.0]);
    }

    #[test]
    fn rail_origin_depth_is_two_minus_two_over_n() {
        for n in [3usize, 10, 40] {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let t = i as f64 + 1.0;
                    vec![t.cos() * t, t.sin() * t]
                })
                .collect();
            let pts = PointSet::from_rows(&rows).unwrap();
            let d = pairwise_distances(&pts, &MetricDescriptor::Rail).unwrap();
            let v = distances_to_point(&pts, &[0.0, 0.0], &MetricDescriptor::Rail).unwrap();
            let depth = spatial_depth(&v, &d).unwrap();
            assert!((depth - (2.0 - 2.0 / n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn lens_depth_cases() {
        let (pts, d) = one_d(&[1.0, 2.0, 3.0]);
        let at = |mu: f64| {
            let v = distances_to_point(&pts, &[mu], &MetricDescriptor::Euclidean).unwrap();
            lens_depth(&v, &d).unwrap()
        };
        assert_eq!(at(2.0), 1.0);
        assert_eq!(at(0.0), 0.0);
        let (_, d1) = one_d(&[1.0]);
        assert!(lens_depth(&vec![0.5], &d1).is_err());
    }

    #[test]
    fn halfspace_depth_cases() {
        let (pts, d) = one_d(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let at = |mu: f64| {
            let v = distances_to_point(&pts, &[mu], &MetricDescriptor::Euclidean).unwrap();
            halfspace_depth(&v, &d).unwrap()
        };
        assert!((at(3.0) - 0.6).abs() < 1e-15);
        assert!((at(5.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn halfspace_two_points_equidistant_mu() {
        let (pts, d) = one_d(&[0.0, 2.0]);
        let v = distances_to_point(&pts, &[1.0], &MetricDescriptor::Euclidean).unwrap();
        // both anchor orders admissible; each half-count is 1/2
        assert_eq!(halfspace_depth(&v, &d).unwrap(), 0.5);
    }

    #[test]
    fn influence_at_z_equals_mu() {
        let (pts, d) = one_d(&[1.0, 2.0, 3.0, 4.0]);
        let mu = [2.5];
        let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
        let depth = spatial_depth(&v, &d).unwrap();
        let iff = influence_function(&v, 0.0, &v, depth).unwrap();
        assert!((iff - (2.0 - 2.0 * depth)).abs() < 1e-15);
    }

    #[test]
    fn contamination_matches_plain_depth_at_eps_zero_and_one() {
        let (pts, d) = one_d(&[1.0, 2.0, 3.0, 4.0]);
        let mu = [2.5];
        let z = [10.0];
        let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
        let w = distances_to_point(&pts, &z, &MetricDescriptor::Euclidean).unwrap();
        let d_z_mu = (z[0] - mu[0]).abs();
        let plain = spatial_depth(&v, &d).unwrap();
        assert_eq!(
            contaminated_spatial_depth(&v, &d, d_z_mu, &w, 0.0).unwrap(),
            plain
        );
        assert_eq!(
            contaminated_spatial_depth(&v, &d, d_z_mu, &w, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn finite_difference_matches_influence() {
        let (pts, d) = one_d(&[1.0, 2.0, 3.0, 4.0, 7.0]);
        let mu = [2.5];
        let z = [6.0];
        let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
        let w = distances_to_point(&pts, &z, &MetricDescriptor::Euclidean).unwrap();
        let d_z_mu = (z[0] - mu[0]).abs();
        let depth = spatial_depth(&v, &d).unwrap();
        let iff = influence_function(&v, d_z_mu, &w, depth).unwrap();
        let eps = 0.01;
        let contaminated = contaminated_spatial_depth(&v, &d, d_z_mu, &w, eps).unwrap();
        let quotient = (contaminated - depth) / eps;
        assert!((quotient - iff).abs() < 10.0 * eps, "{quotient} vs {iff}");
    }

    proptest! {
        #[test]
        fn spatial_range_and_permutation_invariance(
            values in proptest::collection::vec(-50.0f64..50.0, 3..12),
            mu in -60.0f64..60.0,
        ) {
            let pts = PointSet::from_scalars(&values).unwrap();
            let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let v = distances_to_point(&pts, &[mu], &MetricDescriptor::Euclidean).unwrap();
            let depth = spatial_depth(&v, &d).unwrap();
            prop_assert!((-1e-12..=2.0 + 1e-12).contains(&depth));

            let mut rev = values.clone();
            rev.reverse();
            let pts_r = PointSet::from_scalars(&rev).unwrap();
            let d_r = pairwise_distances(&pts_r, &MetricDescriptor::Euclidean).unwrap();
            let v_r = distances_to_point(&pts_r, &[mu], &MetricDescriptor::Euclidean).unwrap();
            let depth_r = spatial_depth(&v_r, &d_r).unwrap();
            prop_assert!((depth - depth_r).abs() < 1e-12);
        }

        #[test]
        fn h_term_bounded_for_metric_triples(
            a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0,
        ) {
            // true-metric distances on the real line
            let d13 = (a - c).abs();
            let d23 = (b - c).abs();
            let d12 = (a - b).abs();
            let h = h_term(d13, d23, d12);
            prop_assert!((-2.0 - 1e-12..=2.0 + 1e-12).contains(&h));
        }

        #[test]
        fn lens_and_halfspace_ranges(
            values in proptest::collection::vec(-20.0f64..20.0, 2..10),
            mu in -25.0f64..25.0,
        ) {
            let pts = PointSet::from_scalars(&values).unwrap();
            let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let v = distances_to_point(&pts, &[mu], &MetricDescriptor::Euclidean).unwrap();
            let lens = lens_depth(&v, &d).unwrap();
            let half = halfspace_depth(&v, &d).unwrap();
            prop_assert!((0.0..=1.0).contains(&lens));
            prop_assert!(half > 0.0 && half <= 1.0);
        }
    }
}
