//! RKHS-induced distances: d²(x₁, x₂) = κ(x₁, x₁) − 2κ(x₁, x₂) + κ(x₂, x₂).

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::par::map_indices;
use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelDescriptor {
    Gaussian { gamma: f64 },
    RationalQuadratic,
    Linear,
}

/// Default Gaussian bandwidth for the built-in contour study.
pub const DEFAULT_GAUSSIAN_GAMMA: f64 = 0.933;

fn sq_dist(x1: &[f64], x2: &[f64]) -> f64 {
    x1.iter()
        .zip(x2)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

pub fn kernel_value(x1: &[f64], x2: &[f64], kernel: KernelDescriptor) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x1.len(),
            got: x2.len(),
        });
    }
    Ok(match kernel {
        KernelDescriptor::Gaussian { gamma } => (-gamma * sq_dist(x1, x2)).exp(),
        KernelDescriptor::RationalQuadratic => 1.0 / (1.0 + sq_dist(x1, x2)),
        KernelDescriptor::Linear => x1.iter().zip(x2).map(|(a, b)| a * b).sum(),
    })
}

/// Distance between the implicit feature maps of `x1` and `x2`. The squared
/// distance is clamped at zero before the root: it is nonnegative
/// analytically but floating point can dip below.
pub fn kernel_distance(x1: &[f64], x2: &[f64], kernel: KernelDescriptor) -> Result<f64> {
    let k11 = kernel_value(x1, x1, kernel)?;
    let k12 = kernel_value(x1, x2, kernel)?;
    let k22 = kernel_value(x2, x2, kernel)?;
    Ok((k11 - 2.0 * k12 + k22).max(0.0).sqrt())
}

pub fn kernel_distance_matrix(
    points: &PointSet,
    kernel: KernelDescriptor,
) -> Result<DistanceMatrix> {
    if let KernelDescriptor::Gaussian { gamma } = kernel {
        if gamma <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "gaussian kernel requires gamma > 0, got {gamma}"
            )));
        }
    }
    let n = points.n();
    let rows = map_indices(n, |i| {
        let xi = points.row(i);
        ((i + 1)..n)
            .map(|j| kernel_distance(xi, points.row(j), kernel).expect("dims match"))
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
