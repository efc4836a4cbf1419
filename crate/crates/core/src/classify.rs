//! Depth-depth classification: map observations to per-group depth vectors,
//! then fit a Gaussian discriminant (LDA/QDA) in depth space.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::depth::{halfspace_depth, lens_depth, spatial_depth, DepthMethod};
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::metric::{distances_to_point, pairwise_distances, MetricDescriptor};
use crate::par::map_indices;
use crate::points::{LabeledSample, PointSet};

/// m×G matrix of depths: entry (i, g) is the depth of eval point i with
/// respect to group g's empirical distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFeatures {
    pub z: Vec<Vec<f64>>,
    pub n_groups: usize,
}

impl DepthFeatures {
    pub fn n_points(&self) -> usize {
        self.z.len()
    }
}

/// Depth vectors of `eval_points` with respect to each training group.
/// Training points evaluate against their own group including themselves
/// (plain plug-in, no leave-one-out).
pub fn depth_features(
    train: &LabeledSample,
    eval_points: &PointSet,
    metric: &MetricDescriptor,
    method: DepthMethod,
) -> Result<DepthFeatures> {
    if eval_points.p() != train.points.p() {
        return Err(Error::DimensionMismatch {
            expected: train.points.p(),
            got: eval_points.p(),
        });
    }
    let groups: Vec<(PointSet, DistanceMatrix)> = (0..train.n_groups)
        .map(|g| {
            let pts = train.group_points(g)?;
            let d = pairwise_distances(&pts, metric)?;
            Ok((pts, d))
        })
        .collect::<Result<_>>()?;

    let m = eval_points.n();
    let rows = map_indices(m, |i| -> Result<Vec<f64>> {
        let mu = eval_points.row(i);
        groups
            .iter()
            .map(|(pts, d)| {
                let v = distances_to_point(pts, mu, metric)?;
                match method {
                    DepthMethod::Spatial => spatial_depth(&v, d),
                    DepthMethod::Lens => lens_depth(&v, d),
                    DepthMethod::Halfspace => halfspace_depth(&v, d),
                }
            })
            .collect()
    });
    let z = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DepthFeatures {
        z,
        n_groups: train.n_groups,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Lda,
    Qda,
}

impl ClassifierKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lda" => Ok(ClassifierKind::Lda),
            "qda" => Ok(ClassifierKind::Qda),
            _ => Err(Error::InvalidConfig(format!("unknown classifier {s:?}"))),
        }
    }
}

/// Gaussian discriminant in depth space: pooled covariance for LDA,
/// per-class covariances for QDA.
#[derive(Debug, Clone)]
pub struct GaussianClassifier {
    pub kind: ClassifierKind,
    dim: usize,
    means: Vec<DVector<f64>>,
    /// one entry for LDA (pooled), one per class for QDA
    precisions: Vec<DMatrix<f64>>,
    log_dets: Vec<f64>,
    log_priors: Vec<f64>,
}

const RIDGE_LAMBDA: f64 = 1e-6;
const MIN_EIGENVALUE: f64 = 1e-10;

/// Ridge-regularizes by λ·(trace/dim)·I when the smallest eigenvalue drops
/// below 1e-10, then factors. Errors when still singular (all-identical
/// features).
fn factor(mut cov: DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let dim = cov.nrows();
    let min_eig = cov
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < MIN_EIGENVALUE {
        let ridge = RIDGE_LAMBDA * cov.trace() / dim as f64;
        for i in 0..dim {
            cov[(i, i)] += ridge;
        }
    }
    let chol = Cholesky::new(cov).ok_or(Error::SingularCovariance)?;
    let log_det = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    Ok((chol.inverse(), log_det))
}

fn split_by_class(
    features: &DepthFeatures,
    labels: &[usize],
) -> Result<(usize, Vec<Vec<DVector<f64>>>)> {
    let m = features.n_points();
    if labels.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: labels.len(),
        });
    }
    let n_classes = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut by_class: Vec<Vec<DVector<f64>>> = vec![Vec::new(); n_classes];
    for (row, &l) in features.z.iter().zip(labels) {
        by_class[l].push(DVector::from_row_slice(row));
    }
    if let Some(g) = by_class.iter().position(|c| c.is_empty()) {
        return Err(Error::EmptyGroup(g));
    }
    Ok((n_classes, by_class))
}

pub fn fit(
    features: &DepthFeatures,
    labels: &[usize],
    kind: ClassifierKind,
) -> Result<GaussianClassifier> {
    let (n_classes, by_class) = split_by_class(features, labels)?;
    let dim = features.n_groups;
    let m = features.n_points();

    let means: Vec<DVector<f64>> = by_class
        .iter()
        .map(|rows| {
            let mut mean = DVector::zeros(dim);
            for r in rows {
                mean += r;
            }
            mean / rows.len() as f64
        })
        .collect();
    let log_priors: Vec<f64> = by_class
        .iter()
        .map(|rows| (rows.len() as f64 / m as f64).ln())
        .collect();

    let scatter = |rows: &[DVector<f64>], mean: &DVector<f64>| -> DMatrix<f64> {
        let mut s = DMatrix::zeros(dim, dim);
        for r in rows {
            let c = r - mean;
            s += &c * c.transpose();
        }
        s
    };

    let (precisions, log_dets) = match kind {
        ClassifierKind::Lda => {
            let mut pooled = DMatrix::zeros(dim, dim);
            for (rows, mean) in by_class.iter().zip(&means) {
                pooled += scatter(rows, mean);
            }
            pooled /= (m - n_classes).max(1) as f64;
            let (prec, log_det) = factor(pooled)?;
            (vec![prec], vec![log_det])
        }
        ClassifierKind::Qda => {
            let mut precisions = Vec::with_capacity(n_classes);
            let mut log_dets = Vec::with_capacity(n_classes);
            for (rows, mean) in by_class.iter().zip(&means) {
                if rows.len() < 2 {
                    return Err(Error::TooFewPoints {
                        need: 2,
                        got: rows.len(),
                    });
                }
                let cov = scatter(rows, mean) / (rows.len() - 1) as f64;
                let (prec, log_det) = factor(cov)?;
                precisions.push(prec);
                log_dets.push(log_det);
            }
            (precisions, log_dets)
        }
    };

    Ok(GaussianClassifier {
        kind,
        dim,
        means,
        precisions,
        log_dets,
        log_priors,
    })
}

pub fn lda_fit(features: &DepthFeatures, labels: &[usize]) -> Result<GaussianClassifier> {
    fit(features, labels, ClassifierKind::Lda)
}

pub fn qda_fit(features: &DepthFeatures, labels: &[usize]) -> Result<GaussianClassifier> {
    fit(features, labels, ClassifierKind::Qda)
}

impl GaussianClassifier {
    fn score(&self, x: &DVector<f64>, class: usize) -> f64 {
        match self.kind {
            ClassifierKind::Lda => {
                let prec = &self.precisions[0];
                let mean = &self.means[class];
                (x.transpose() * prec * mean)[(0, 0)]
                    - 0.5 * (mean.transpose() * prec * mean)[(0, 0)]
                    + self.log_priors[class]
            }
            ClassifierKind::Qda => {
                let prec = &self.precisions[class];
                let c = x - &self.means[class];
                -0.5 * self.log_dets[class] - 0.5 * (c.transpose() * prec * &c)[(0, 0)]
                    + self.log_priors[class]
            }
        }
    }

    /// Predicted class labels, ties broken by lower class index.
    pub fn classify(&self, features: &DepthFeatures) -> Result<Vec<usize>> {
        if features.n_groups != self.dim {
            return Err(Error::FeatureDimensionMismatch {
                expected: self.dim,
                got: features.n_groups,
            });
        }
        Ok(features
            .z
            .iter()
            .map(|row| {
                let x = DVector::from_row_slice(row);
                let mut best = 0usize;
                let mut best_score = self.score(&x, 0);
                for class in 1..self.means.len() {
                    let s = self.score(&x, class);
                    if s > best_score {
                        best = class;
                        best_score = s;
                    }
                }
                best
            })
            .collect())
    }

    /// QDA twin with every class covariance replaced by the given one;
    /// with the pooled covariance this makes QDA reproduce LDA decisions.
    #[cfg(test)]
    fn with_shared_covariance(&self, cov: DMatrix<f64>) -> Result<Self> {
        let n_classes = self.means.len();
        let (prec, log_det) = factor(cov)?;
        Ok(GaussianClassifier {
            kind: ClassifierKind::Qda,
            dim: self.dim,
            means: self.means.clone(),
            precisions: vec![prec; n_classes],
            log_dets: vec![log_det; n_classes],
            log_priors: self.log_priors.clone(),
        })
    }
}

pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
