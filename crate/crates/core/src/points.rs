use crate::error::{Error, Result};

/// A sample of `n` observations in `R^p`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    p: usize,
}

impl PointSet {
    pub fn new(data: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::EmptyPointSet);
        }
        if data.len() != n * p {
            return Err(Error::LengthMismatch {
                expected: n * p,
                got: data.len(),
            });
        }
        for (idx, &x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: idx / p,
                    col: idx % p,
                });
            }
        }
        Ok(Self { data, n, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let p = rows[0].len();
        for row in rows {
            if row.len() != p {
                return Err(Error::LengthMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(data, rows.len(), p)
    }

    /// 1-D sample from a flat list of values.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    /// New point set keeping only the rows whose index is in `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, indices.len(), self.p)
    }
}

/// Points with integer group labels in `0..n_groups`.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub points: PointSet,
    pub labels: Vec<usize>,
    pub n_groups: usize,
}

impl LabeledSample {
    pub fn new(points: PointSet, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != points.n() {
            return Err(Error::LengthMismatch {
                expected: points.n(),
                got: labels.len(),
            });
        }
        let n_groups = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0usize; n_groups];
        for &l in &labels {
            counts[l] += 1;
        }
        if let Some(g) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyGroup(g));
        }
        Ok(Self {
            points,
            labels,
            n_groups,
        })
    }

    pub fn group_indices(&self, g: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == g)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn group_points(&self, g: usize) -> Result<PointSet> {
        self.points.select(&self.group_indices(g))
    }
}
