use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TRIANGLE_TOL: f64 = 1e-9;

/// Symmetric n×n nonnegative matrix with zero diagonal; the interchange
/// object between metrics and depth estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    data: Vec<f64>,
    n: usize,
}

/// Distances from one query point to the sample.
pub type DistanceVector = Vec<f64>;

impl DistanceMatrix {
    /// Validates the invariants (symmetry, zero diagonal, nonnegative,
    /// finite) before accepting the storage.
    pub fn new(data: Vec<f64>, n: usize) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        let m = Self { data, n };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "nonzero diagonal at ({i}, {i})"
                )));
            }
            for j in 0..n {
                let d = m.get(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "bad entry {d} at ({i}, {j})"
                    )));
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "asymmetry at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// Builds from the upper triangle of `f`, mirroring so the result is
    /// bit-symmetric whatever `f` does.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self::new(data, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[cfg(test)]
    pub(crate) fn from_raw_unchecked(data: Vec<f64>, n: usize) -> Self {
        Self { data, n }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub n: usize,
    pub symmetry_violations: usize,
    pub diagonal_violations: usize,
    pub negative_entries: usize,
    pub non_finite_entries: usize,
    pub triangle_checks: usize,
    pub triangle_violations: usize,
}

impl ValidationReport {
    pub fn structure_ok(&self) -> bool {
        self.symmetry_violations == 0
            && self.diagonal_violations == 0
            && self.negative_entries == 0
            && self.non_finite_entries == 0
    }
}

/// Checks the structural invariants exhaustively and the triangle
/// inequality on `spot_checks` random triples. Triangle violations are
/// informational: lp with p < 1 legitimately fails them.
pub fn validate_distance_matrix(
    d: &DistanceMatrix,
    spot_checks: usize,
    seed: u64,
) -> ValidationReport {
    let n = d.n();
    let mut report = ValidationReport {
        n,
        symmetry_violations: 0,
        diagonal_violations: 0,
        negative_entries: 0,
        non_finite_entries: 0,
        triangle_checks: 0,
        triangle_violations: 0,
    };
    for i in 0..n {
        if d.get(i, i) != 0.0 {
            report.diagonal_violations += 1;
        }
        for j in (i + 1)..n {
            let a = d.get(i, j);
            let b = d.get(j, i);
            if a != b {
                report.symmetry_violations += 1;
            }
            for &v in &[a, b] {
                if !v.is_finite() {
                    report.non_finite_entries += 1;
                } else if v < 0.0 {
                    report.negative_entries += 1;
                }
            }
        }
    }
    if n >= 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..spot_checks {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let c = rng.gen_range(0..n);
            report.triangle_checks += 1;
            if d.get(a, c) > d.get(a, b) + d.get(b, c) + TRIANGLE_TOL {
                report.triangle_violations += 1;
            }
        }
    }
    report
}
