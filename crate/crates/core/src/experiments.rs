//! Seeded experiment harnesses: the sphere outlier study with the crossing
//! statistic, depth contour grids on the circular data, and the Lp
//! classification accuracy sweep. Every study is a pure function of its
//! config; replicate r draws its RNG stream from seed = master_seed + r, so
//! parallel execution changes nothing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classify::{accuracy, depth_features, fit, ClassifierKind};
use crate::depth::{depth_all, spatial_depth, DepthMethod, DepthVector};
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, graft_point_with_all_pairs, graph_all_pairs};
use crate::metric::{distances_to_point, pairwise_distances, MetricDescriptor};
use crate::par::map_indices;
use crate::points::{LabeledSample, PointSet};

// --- outlier study (unit sphere in R^10, arc-length metric) -------------

#[derive(Debug, Clone)]
pub struct OutlierStudyConfig {
    pub n: usize,
    pub lambda: f64,
    pub eps_grid: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<DepthMethod>,
}

impl OutlierStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig("n must be >= 2".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidConfig("lambda must be > 0".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no depth methods selected".into()));
        }
        for &eps in &self.eps_grid {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::InvalidConfig(format!(
                    "eps must be in (0, 0.5), got {eps}"
                )));
            }
            let bulk = ((1.0 - eps) * self.n as f64).round() as usize;
            if self.n - bulk < 1 {
                return Err(Error::InvalidConfig(format!(
                    "n = {}, eps = {eps} rounds to zero outliers",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRow {
    pub method: DepthMethod,
    pub lambda: f64,
    pub n: usize,
    pub eps: f64,
    pub mean_c: f64,
}

pub type CrossingTable = Vec<CrossingRow>;

fn draw_normal_vector(rng: &mut ChaCha8Rng, mean: f64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| mean + rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn normalize(v: &mut [f64]) -> bool {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}

/// Bulk of round((1−ε)n) points drawn around λ·1₁₀ and n − bulk outliers
/// around −λ·1₁₀, each projected to the unit sphere. Labels: 0 = bulk,
/// 1 = outlier.
pub fn gen_sphere_mixture(n: usize, lambda: f64, eps: f64, seed: u64) -> Result<LabeledSample> {
    const DIM: usize = 10;
    let bulk = ((1.0 - eps) * n as f64).round() as usize;
    let outliers = n - bulk;
    if bulk == 0 || outliers == 0 {
        return Err(Error::InvalidConfig(format!(
            "n = {n}, eps = {eps} leaves an empty group"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mean = if i < bulk { lambda } else { -lambda };
        loop {
            let mut v = draw_normal_vector(&mut rng, mean, DIM);
            if normalize(&mut v) {
                rows.push(v);
                break;
            }
        }
        labels.push(usize::from(i >= bulk));
    }
    LabeledSample::new(PointSet::from_rows(&rows)?, labels)
}

/// Fraction of (bulk, outlier) pairs whose depth ordering is violated,
/// i.e. the outlier's depth is >= the bulk point's (ties count). 0 means
/// perfect separation.
pub fn crossing_statistic(depths: &DepthVector, labels: &[usize]) -> Result<f64> {
    if depths.values.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: depths.values.len(),
        });
    }
    let bulk: Vec<f64> = depths
        .values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(&d, _)| d)
        .collect();
    let out: Vec<f64> = depths
        .values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(&d, _)| d)
        .collect();
    if bulk.is_empty() || out.is_empty() {
        return Err(Error::EmptyGroup(usize::from(bulk.is_empty())));
    }
    let crossings = bulk
        .iter()
        .flat_map(|&b| out.iter().map(move |&o| usize::from(o >= b)))
        .sum::<usize>();
    Ok(crossings as f64 / (bulk.len() * out.len()) as f64)
}

/// Mean crossing statistic per (method, eps) over seeded replications under
/// the arc-length metric. Methods share each replicate's sample, so the
/// comparison is paired; reruns with the same config are bit-identical.
pub fn run_outlier_study(config: &OutlierStudyConfig) -> Result<CrossingTable> {
    config.validate()?;
    let mut table = Vec::new();
    for (eps_idx, &eps) in config.eps_grid.iter().enumerate() {
        let per_rep = map_indices(config.replications, |r| -> Result<Vec<f64>> {
            // distinct stream per (eps, replicate)
            let seed = config
                .seed
                .wrapping_add((eps_idx * config.replications + r) as u64);
            let sample = gen_sphere_mixture(config.n, config.lambda, eps, seed)?;
            let d = pairwise_distances(&sample.points, &MetricDescriptor::ArcLength)?;
            config
                .methods
                .iter()
                .map(|&m| crossing_statistic(&depth_all(&d, m)?, &sample.labels))
                .collect()
        });
        let per_rep = per_rep.into_iter().collect::<Result<Vec<_>>>()?;
        for (m_idx, &method) in config.methods.iter().enumerate() {
            let mean_c =
                per_rep.iter().map(|row| row[m_idx]).sum::<f64>() / config.replications as f64;
            table.push(CrossingRow {
                method,
                lambda: config.lambda,
                n: config.n,
                eps,
                mean_c,
            });
        }
    }
    Ok(table)
}

// --- contour grids -------------------------------------------------------

/// Noisy circle of radius 2: x = 2(cos θ, sin θ) + √0.1 · ε.
pub fn gen_circle_data(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = 0.1f64.sqrt();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let e1: f64 = rng.sample(StandardNormal);
            let e2: f64 = rng.sample(StandardNormal);
            vec![2.0 * theta.cos() + noise * e1, 2.0 * theta.sin() + noise * e2]
        })
        .collect();
    PointSet::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, resolution: usize) -> Self {
        Self {
            x_min: lo,
            x_max: hi,
            y_min: lo,
            y_max: hi,
            nx: resolution,
            ny: resolution,
        }
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n == 1 {
                (lo + hi) / 2.0
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                out.push((
                    step(self.x_min, self.x_max, self.nx, ix),
                    step(self.y_min, self.y_max, self.ny, iy),
                ));
            }
        }
        out
    }
}

/// Spatial depths over a planar grid, one value per node (row-major in y
/// then x, matching `GridSpec::nodes`).
#[derive(Debug, Clone)]
pub struct ContourGrid {
    pub spec: GridSpec,
    pub nodes: Vec<(f64, f64)>,
    pub depths: Vec<f64>,
    pub metric: MetricDescriptor,
}

/// Spatial depth of every grid node as μ against the sample. For the
/// knn-graph metric the graph and its all-pairs distances are built once
/// and each node grafted by its k nearest sample points.
pub fn contour_grid(
    sample: &PointSet,
    metric: &MetricDescriptor,
    spec: GridSpec,
) -> Result<ContourGrid> {
    let nodes = spec.nodes();
    let depths = match metric {
        MetricDescriptor::KnnGraph(k) => {
            let base = pairwise_distances(sample, &MetricDescriptor::Euclidean)?;
            let graph = build_knn_graph(&base, *k)?;
            let star = graph_all_pairs(&graph)?;
            let k = *k;
            map_indices(nodes.len(), |i| -> Result<f64> {
                let mu = [nodes[i].0, nodes[i].1];
                let direct = distances_to_point(sample, &mu, &MetricDescriptor::Euclidean)?;
                let grafted = graft_point_with_all_pairs(&star, &direct, k)?;
                spatial_depth(&grafted, &star)
            })
        }
        _ => {
            let d = pairwise_distances(sample, metric)?;
            let metric = *metric;
            map_indices(nodes.len(), |i| -> Result<f64> {
                let mu = [nodes[i].0, nodes[i].1];
                let v = distances_to_point(sample, &mu, &metric)?;
                spatial_depth(&v, &d)
            })
        }
    };
    let depths = depths.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ContourGrid {
        spec,
        nodes,
        depths,
        metric: *metric,
    })
}

/// Spatial depth of a single planar point against the sample under the
/// same machinery as `contour_grid`.
pub fn depth_at_point(sample: &PointSet, metric: &MetricDescriptor, mu: &[f64]) -> Result<f64> {
    match metric {
        MetricDescriptor::KnnGraph(k) => {
            let base = pairwise_distances(sample, &MetricDescriptor::Euclidean)?;
            let graph = build_knn_graph(&base, *k)?;
            let star = graph_all_pairs(&graph)?;
            let direct = distances_to_point(sample, mu, &MetricDescriptor::Euclidean)?;
            let grafted = graft_point_with_all_pairs(&star, &direct, *k)?;
            spatial_depth(&grafted, &star)
        }
        _ => {
            let d = pairwise_distances(sample, metric)?;
            let v = distances_to_point(sample, mu, metric)?;
            spatial_depth(&v, &d)
        }
    }
}

// --- Lp classification study ---------------------------------------------

/// Three well-separated Gaussian blobs in `dim` dimensions; class g is
/// centered at `separation` · e_g.
pub fn gen_gaussian_blobs(
    n_per_class: usize,
    n_classes: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledSample> {
    if n_per_class == 0 || n_classes == 0 || dim < n_classes {
        return Err(Error::InvalidConfig(
            "need n_per_class >= 1 and dim >= n_classes".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_per_class * n_classes);
    let mut labels = Vec::with_capacity(n_per_class * n_classes);
    for g in 0..n_classes {
        for _ in 0..n_per_class {
            let mut v = draw_normal_vector(&mut rng, 0.0, dim);
            v[g] += separation;
            rows.push(v);
            labels.push(g);
        }
    }
    LabeledSample::new(PointSet::from_rows(&rows)?, labels)
}

#[derive(Debug, Clone)]
pub enum LpStudySource {
    /// Synthetic blobs, fresh train/test draws per replicate.
    SyntheticBlobs {
        n_classes: usize,
        dim: usize,
        separation: f64,
        n_train_per_class: usize,
        n_test_per_class: usize,
    },
    /// Random train/test split of a fixed labeled dataset per replicate.
    Dataset {
        data: LabeledSample,
        n_train: usize,
        n_test: usize,
    },
}

#[derive(Debug, Clone)]
pub struct LpStudyConfig {
    pub source: LpStudySource,
    pub p_grid: Vec<f64>,
    pub classifier: ClassifierKind,
    pub depth_method: DepthMethod,
    pub replications: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpAccuracyRow {
    pub p: f64,
    pub mean_accuracy: f64,
}

/// Deterministic train/test pair for replicate r of the study.
pub fn lp_study_split(
    source: &LpStudySource,
    seed: u64,
    replicate: usize,
) -> Result<(LabeledSample, LabeledSample)> {
    let rep_seed = seed.wrapping_add(replicate as u64);
    match source {
        LpStudySource::SyntheticBlobs {
            n_classes,
            dim,
            separation,
            n_train_per_class,
            n_test_per_class,
        } => {
            let train =
                gen_gaussian_blobs(*n_train_per_class, *n_classes, *dim, *separation, rep_seed)?;
            let test = gen_gaussian_blobs(
                *n_test_per_class,
                *n_classes,
                *dim,
                *separation,
                rep_seed ^ 0x9e37_79b9_7f4a_7c15,
            )?;
            Ok((train, test))
        }
        LpStudySource::Dataset {
            data,
            n_train,
            n_test,
        } => {
            let n = data.points.n();
            if n_train + n_test > n {
                return Err(Error::InvalidConfig(format!(
                    "split {n_train}+{n_test} exceeds dataset size {n}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
            let mut idx: Vec<usize> = (0..n).collect();
            // Fisher-Yates
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                idx.swap(i, j);
            }
            let train_idx = &idx[..*n_train];
            let test_idx = &idx[*n_train..*n_train + *n_test];
            let train = LabeledSample::new(
                data.points.select(train_idx)?,
                train_idx.iter().map(|&i| data.labels[i]).collect(),
            )?;
            let test = LabeledSample::new(
                data.points.select(test_idx)?,
                test_idx.iter().map(|&i| data.labels[i]).collect(),
            )?;
            Ok((train, test))
        }
    }
}

/// Mean test accuracy of DD-classification per replicate, with the given
/// metric.
pub fn dd_classify_accuracy(
    train: &LabeledSample,
    test: &LabeledSample,
    metric: &MetricDescriptor,
    method: DepthMethod,
    classifier: ClassifierKind,
) -> Result<f64> {
    let train_features = depth_features(train, &train.points, metric, method)?;
    let model = fit(&train_features, &train.labels, classifier)?;
    let test_features = depth_features(train, &test.points, metric, method)?;
    let predicted = model.classify(&test_features)?;
    Ok(accuracy(&predicted, &test.labels))
}

/// Mean test accuracy per grid value of p over seeded replications.
pub fn lp_classification_study(config: &LpStudyConfig) -> Result<Vec<LpAccuracyRow>> {
    if config.replications == 0 {
        return Err(Error::InvalidConfig("replications must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(config.p_grid.len());
    for &p in &config.p_grid {
        let metric = MetricDescriptor::Lp(p);
        metric.validate()?;
        let accs = map_indices(config.replications, |r| -> Result<f64> {
            let (train, test) = lp_study_split(&config.source, config.seed, r)?;
            dd_classify_accuracy(&train, &test, &metric, config.depth_method, config.classifier)
        });
        let accs = accs.into_iter().collect::<Result<Vec<_>>>()?;
        rows.push(LpAccuracyRow {
            p,
            mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
        });
    }
    Ok(rows)
}
