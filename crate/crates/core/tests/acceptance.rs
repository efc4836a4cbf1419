//! Acceptance suite. Each test covers one numbered criterion and prints a
//! single pass/fail line; run with `cargo test --test acceptance -- --nocapture`
//! to see them.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use metric_depth::depth::{
    contaminated_spatial_depth, depth_all, halfspace_depth, influence_function, lens_depth,
    spatial_depth, DepthMethod,
};
use metric_depth::experiments::{
    depth_at_point, dd_classify_accuracy, gen_circle_data, gen_gaussian_blobs, gen_sphere_mixture,
    run_outlier_study, GridSpec, OutlierStudyConfig,
};
use metric_depth::graph::{build_knn_graph, graph_all_pairs};
use metric_depth::kernel::KernelDescriptor;
use metric_depth::matrix::DistanceMatrix;
use metric_depth::metric::{distances_to_point, pairwise_distances, MetricDescriptor};
use metric_depth::oracle::{
    circle_empirical_depth, circle_uniform_depth_finite, discrete_empirical_depth,
    discrete_metric_depth, hilbert_depth, rail_empirical_depth, star_graph_bound,
    star_graph_empirical_depth, ProbabilityVector,
};
use metric_depth::points::{LabeledSample, PointSet};

fn report(number: u32, label: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("criterion {number:02} PASS: {label}"),
        Err(_) => println!("criterion {number:02} FAIL: {label}"),
    }
    if let Err(cause) = outcome {
        resume_unwind(cause);
    }
}

fn gaussian_points(rng: &mut ChaCha8Rng, n: usize, p: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

#[test]
fn criterion_01_circle_oracle() {
    report(1, "equispaced circle depth matches the closed form", || {
        for k in [1usize, 5, 50, 100] {
            let analytic = circle_uniform_depth_finite(k).unwrap();
            let empirical = circle_empirical_depth(k).unwrap();
            assert!(
                (analytic - empirical).abs() <= 1e-9,
                "k = {k}: analytic {analytic}, empirical {empirical}"
            );
        }
        let limit = std::f64::consts::PI.powi(2) / 6.0 - 1.0;
        let at_100 = circle_uniform_depth_finite(100).unwrap();
        assert!((at_100 - limit).abs() <= 1e-2, "k = 100 vs limit: {at_100} vs {limit}");
    });
}

#[test]
fn criterion_02_star_graph() {
    report(2, "star-graph hub depth attains the n-point bound", || {
        let bound = star_graph_bound(11).unwrap();
        assert!((bound - (2.0 - 41.0 / 121.0)).abs() <= 1e-12);
        let unit = star_graph_empirical_depth(11, &[1.0; 10]).unwrap();
        assert!((unit - bound).abs() <= 1e-12, "unit lengths: {unit} vs {bound}");

        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..5 {
            let lens: Vec<f64> = (0..10).map(|_| rng.gen_range(0.05..20.0)).collect();
            let hub = star_graph_empirical_depth(11, &lens).unwrap();
            assert!((hub - bound).abs() <= 1e-12, "lengths {lens:?}: {hub} vs {bound}");
        }
    });
}

#[test]
fn criterion_03_discrete_metric() {
    report(3, "discrete-metric depth matches the closed form", || {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..20 {
            let cats = rng.gen_range(2..=6usize);
            let mult: Vec<usize> = (0..cats).map(|_| rng.gen_range(1..=10usize)).collect();
            let total: usize = mult.iter().sum();
            assert!(total <= 60);
            let probs: Vec<f64> = mult.iter().map(|&m| m as f64 / total as f64).collect();
            let p = ProbabilityVector::new(probs).unwrap();
            let index = rng.gen_range(0..cats);
            let analytic = discrete_metric_depth(&p, index).unwrap();
            let empirical = discrete_empirical_depth(&mult, index).unwrap();
            assert!(
                (analytic - empirical).abs() <= 1e-12,
                "mult {mult:?} index {index}: {analytic} vs {empirical}"
            );
        }

        // point mass at the evaluation point: depth exactly 1
        assert_eq!(discrete_empirical_depth(&[7], 0).unwrap(), 1.0);

        // all mass at a different point: depth exactly 0
        let pts = PointSet::from_scalars(&[1.0; 9]).unwrap();
        let d = pairwise_distances(&pts, &MetricDescriptor::Discrete).unwrap();
        let v = distances_to_point(&pts, &[0.0], &MetricDescriptor::Discrete).unwrap();
        assert_eq!(spatial_depth(&v, &d).unwrap(), 0.0);
    });
}

#[test]
fn criterion_04_rail_metric() {
    report(4, "rail-metric origin depth equals 2 - 2/n, far points vanish", || {
        for n in [5usize, 50, 500] {
            let norms: Vec<f64> = (1..=n).map(|i| 0.5 + i as f64).collect();
            let at_origin = rail_empirical_depth(&norms, 0.0).unwrap();
            let expected = 2.0 - 2.0 / n as f64;
            assert!(
                (at_origin - expected).abs() <= 1e-12,
                "n = {n}: {at_origin} vs {expected}"
            );
            let far = norms.iter().cloned().fold(f64::MIN, f64::max) * 1e6;
            let far_depth = rail_empirical_depth(&norms, far).unwrap();
            assert!(far_depth < 1e-3, "n = {n}: far depth {far_depth}");
        }
    });
}

#[test]
fn criterion_05_hilbert_equivalence() {
    report(5, "euclidean spatial depth equals the sign-vector form", || {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for s in 0..50 {
            let p = [1usize, 2, 10][s % 3];
            let pts = gaussian_points(&mut rng, 200, p);
            let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            for _ in 0..10 {
                let mu: Vec<f64> =
                    (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
                let estimated = spatial_depth(&v, &d).unwrap();
                let closed = hilbert_depth(&pts, &mu).unwrap();
                assert!(
                    (estimated - closed).abs() <= 1e-10,
                    "p = {p}: {estimated} vs {closed}"
                );
                assert!(closed <= 1.0);
                assert!(estimated <= 1.0 + 1e-10);
            }
        }
    });
}

#[test]
fn criterion_06_range_and_influence() {
    report(6, "depth ranges hold and the influence function is bounded", || {
        let mut rng = ChaCha8Rng::seed_from_u64(60);

        let mut samples: Vec<PointSet> = vec![
            gen_circle_data(80, 63).unwrap(),
            gen_sphere_mixture(60, 0.5, 0.1, 64).unwrap().points,
        ];
        for _ in 0..4 {
            let p = rng.gen_range(1..=6usize);
            let n = rng.gen_range(10..=80usize);
            samples.push(gaussian_points(&mut rng, n, p));
        }
        for pts in &samples {
            let metric = if pts.p() == 10 {
                MetricDescriptor::ArcLength
            } else {
                MetricDescriptor::Euclidean
            };
            let d = pairwise_distances(pts, &metric).unwrap();
            for &v in &depth_all(&d, DepthMethod::Spatial).unwrap().values {
                assert!((0.0..=2.0).contains(&v), "spatial {v} out of range");
            }
            for &v in &depth_all(&d, DepthMethod::Lens).unwrap().values {
                assert!((0.0..=1.0).contains(&v), "lens {v} out of range");
            }
            for &v in &depth_all(&d, DepthMethod::Halfspace).unwrap().values {
                assert!(v > 0.0 && v <= 1.0, "halfspace {v} out of range");
            }
        }

        // bounded influence over random (z, mu) probes, and agreement with
        // the finite-difference contamination quotient at eps = 1e-4
        let pts = gaussian_points(&mut rng, 80, 3);
        let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
        let eps = 1e-4;
        for _ in 0..1000 {
            let mu: Vec<f64> =
                (0..3).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let z: Vec<f64> =
                (0..3).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
            let v_mu = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
            let v_z = distances_to_point(&pts, &z, &MetricDescriptor::Euclidean).unwrap();
            let d_z_mu = z
                .iter()
                .zip(&mu)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let depth_mu = spatial_depth(&v_mu, &d).unwrap();
            let inf = influence_function(&v_mu, d_z_mu, &v_z, depth_mu).unwrap();
            assert!(inf.abs() <= 4.0 + 1e-12, "influence {inf} out of bound");

            let perturbed =
                contaminated_spatial_depth(&v_mu, &d, d_z_mu, &v_z, eps).unwrap();
            let quotient = (perturbed - depth_mu) / eps;
            assert!(
                (quotient - inf).abs() <= 1e-2,
                "finite difference {quotient} vs analytic {inf}"
            );
        }
    });
}

#[test]
fn criterion_07_consistency() {
    report(7, "estimation error shrinks by >= 1.6x from n=250 to n=1000", || {
        let mu = [0.3, -0.4];
        // large-sample reference; the sign-vector form is exact for the
        // euclidean metric and avoids the quadratic pair sum
        let mut ref_rng = ChaCha8Rng::seed_from_u64(700);
        let reference_sample = gaussian_points(&mut ref_rng, 100_000, 2);
        let reference = hilbert_depth(&reference_sample, &mu).unwrap();

        let error_at = |n: usize, seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts = gaussian_points(&mut rng, n, 2);
            let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();
            (spatial_depth(&v, &d).unwrap() - reference).abs()
        };

        let median = |mut xs: Vec<f64>| {
            xs.sort_by(f64::total_cmp);
            let m = xs.len() / 2;
            if xs.len() % 2 == 1 {
                xs[m]
            } else {
                0.5 * (xs[m - 1] + xs[m])
            }
        };

        let coarse = median((0..50).map(|s| error_at(250, 701 + s)).collect());
        let fine = median((0..50).map(|s| error_at(1000, 701 + s)).collect());
        let ratio = coarse / fine;
        assert!(
            ratio >= 1.6,
            "median error {coarse} at n=250, {fine} at n=1000, ratio {ratio}"
        );
    });
}

#[test]
fn criterion_08_outlier_study() {
    report(8, "spatial depth separates sphere outliers at least as well as lens", || {
        let config = OutlierStudyConfig {
            n: 100,
            lambda: 0.5,
            eps_grid: vec![0.05, 0.10],
            replications: 100,
            seed: 800,
            methods: vec![DepthMethod::Spatial, DepthMethod::Lens],
        };
        let table = run_outlier_study(&config).unwrap();
        let rerun = run_outlier_study(&config).unwrap();
        assert_eq!(table, rerun, "rerun differs under a fixed seed");
        for row in &table {
            assert!((0.0..=1.0).contains(&row.mean_c), "mean C {} out of range", row.mean_c);
        }
        for &eps in &config.eps_grid {
            let mean_of = |m: DepthMethod| {
                table
                    .iter()
                    .find(|r| r.method == m && r.eps == eps)
                    .unwrap()
                    .mean_c
            };
            let spatial = mean_of(DepthMethod::Spatial);
            let lens = mean_of(DepthMethod::Lens);
            assert!(
                spatial <= lens + 0.01,
                "eps = {eps}: spatial {spatial} vs lens {lens}"
            );
        }
    });
}

fn percentile(values: &[f64], q: f64) -> f64 {
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let pos = q * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    xs[lo] * (1.0 - frac) + xs[hi] * frac
}

#[test]
fn criterion_09_contour_shapes() {
    report(9, "contour grids rank the origin as each metric should", || {
        let sample = gen_circle_data(150, 900).unwrap();
        let spec = GridSpec::square(-2.5, 2.5, 60);
        let origin = [0.0, 0.0];

        let euclid = MetricDescriptor::Euclidean;
        let grid = metric_depth::experiments::contour_grid(&sample, &euclid, spec).unwrap();
        let at_origin = depth_at_point(&sample, &euclid, &origin).unwrap();
        let p80 = percentile(&grid.depths, 0.80);
        assert!(at_origin > p80, "euclidean origin {at_origin} vs 80th pct {p80}");

        let gauss = MetricDescriptor::Kernel(KernelDescriptor::Gaussian { gamma: 0.933 });
        let grid = metric_depth::experiments::contour_grid(&sample, &gauss, spec).unwrap();
        let at_origin = depth_at_point(&sample, &gauss, &origin).unwrap();
        let p20 = percentile(&grid.depths, 0.20);
        assert!(at_origin < p20, "gaussian origin {at_origin} vs 20th pct {p20}");

        let knn = MetricDescriptor::KnnGraph(8);
        let grid = metric_depth::experiments::contour_grid(&sample, &knn, spec).unwrap();
        let at_origin = depth_at_point(&sample, &knn, &origin).unwrap();
        let med = percentile(&grid.depths, 0.50);
        assert!(at_origin > med, "knn origin {at_origin} vs median {med}");
    });
}

#[test]
fn criterion_10_dd_classification() {
    report(10, "DD-classification beats 0.9 accuracy over the p grid", || {
        // three unit-variance classes in R^3, centers 4 apart along the axes;
        // 50 train and 17 test per class, test truncated to 50 points
        let split = |rep: u64| {
            let train = gen_gaussian_blobs(50, 3, 3, 4.0, 1000 + rep).unwrap();
            let full = gen_gaussian_blobs(17, 3, 3, 4.0, (1000 + rep) ^ 0x9e37_79b9_7f4a_7c15)
                .unwrap();
            let keep: Vec<usize> = (0..50).collect();
            let test = LabeledSample::new(
                full.points.select(&keep).unwrap(),
                keep.iter().map(|&i| full.labels[i]).collect(),
            )
            .unwrap();
            (train, test)
        };

        for classifier in ["lda", "qda"] {
            let kind = metric_depth::classify::ClassifierKind::parse(classifier).unwrap();
            let mut per_p_euclid: Vec<Vec<f64>> = Vec::new();
            for &p in &[1.0, 2.0, 3.0] {
                let metric = MetricDescriptor::Lp(p);
                let accs: Vec<f64> = (0..20)
                    .map(|rep| {
                        let (train, test) = split(rep);
                        dd_classify_accuracy(&train, &test, &metric, DepthMethod::Spatial, kind)
                            .unwrap()
                    })
                    .collect();
                let mean = accs.iter().sum::<f64>() / accs.len() as f64;
                assert!(mean > 0.9, "{classifier} p = {p}: mean accuracy {mean}");
                if p == 2.0 {
                    per_p_euclid.push(accs);
                }
            }

            // lp with p = 2 must reproduce the euclidean run bit for bit
            let euclid_accs: Vec<f64> = (0..20)
                .map(|rep| {
                    let (train, test) = split(rep);
                    dd_classify_accuracy(
                        &train,
                        &test,
                        &MetricDescriptor::Euclidean,
                        DepthMethod::Spatial,
                        kind,
                    )
                    .unwrap()
                })
                .collect();
            for (a, b) in per_p_euclid[0].iter().zip(&euclid_accs) {
                assert_eq!(a.to_bits(), b.to_bits(), "{classifier}: p=2 diverges from euclidean");
            }
        }
    });
}

// --- criterion 11 helpers: independent reference implementations ---------

fn ref_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn ref_spatial(rows: &[Vec<f64>], mu: &[f64]) -> f64 {
    let n = rows.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d13 = ref_distance(&rows[i], mu);
            let d23 = ref_distance(&rows[j], mu);
            let d12 = ref_distance(&rows[i], &rows[j]);
            if d13 > 0.0 && d23 > 0.0 {
                sum += (d13 * d13 + d23 * d23 - d12 * d12) / (d13 * d23);
            }
        }
    }
    1.0 - 0.5 * sum / (n * n) as f64
}

fn ref_lens(rows: &[Vec<f64>], mu: &[f64]) -> f64 {
    let n = rows.len();
    let mut hits = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let d12 = ref_distance(&rows[i], &rows[j]);
            if d12 >= ref_distance(&rows[i], mu) && d12 >= ref_distance(&rows[j], mu) {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * (n - 1) / 2) as f64
}

fn ref_halfspace(rows: &[Vec<f64>], mu: &[f64]) -> f64 {
    let n = rows.len();
    let mut best = 1.0f64;
    for a in 0..n {
        for b in 0..n {
            if a == b || ref_distance(&rows[a], mu) > ref_distance(&rows[b], mu) {
                continue;
            }
            let mut count = 0usize;
            for row in rows {
                if ref_distance(row, &rows[a]) <= ref_distance(row, &rows[b]) {
                    count += 1;
                }
            }
            best = best.min(count as f64 / n as f64);
        }
    }
    best
}

fn random_orthogonal(p: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn apply_map(pts: &PointSet, q: &DMatrix<f64>, shift: &[f64]) -> PointSet {
    let rows: Vec<Vec<f64>> = pts
        .rows()
        .map(|row| {
            let v = q * DMatrix::from_column_slice(row.len(), 1, row);
            v.column(0)
                .iter()
                .zip(shift)
                .map(|(x, t)| x + t)
                .collect()
        })
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

#[test]
fn criterion_11_property_suite() {
    report(11, "invariance and brute-force equivalence properties", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1100);

        // isometry invariance under random rotations plus translation
        for _ in 0..5 {
            let p = rng.gen_range(2..=5usize);
            let pts = gaussian_points(&mut rng, 40, p);
            let q = random_orthogonal(p, &mut rng);
            let shift: Vec<f64> =
                (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let mapped = apply_map(&pts, &q, &shift);
            let d0 = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let d1 = pairwise_distances(&mapped, &MetricDescriptor::Euclidean).unwrap();
            for method in [DepthMethod::Spatial, DepthMethod::Lens, DepthMethod::Halfspace] {
                let before = depth_all(&d0, method).unwrap();
                let after = depth_all(&d1, method).unwrap();
                for (a, b) in before.values.iter().zip(&after.values) {
                    assert!((a - b).abs() <= 1e-12, "{method}: {a} vs {b} after isometry");
                }
            }
        }

        // permutation invariance of all estimators
        for _ in 0..5 {
            let pts = gaussian_points(&mut rng, 25, 3);
            let mut perm: Vec<usize> = (0..25).collect();
            for i in (1..25usize).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let shuffled = pts.select(&perm).unwrap();
            let d0 = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let d1 = pairwise_distances(&shuffled, &MetricDescriptor::Euclidean).unwrap();
            for method in [DepthMethod::Spatial, DepthMethod::Lens, DepthMethod::Halfspace] {
                let base = depth_all(&d0, method).unwrap();
                let perm_depths = depth_all(&d1, method).unwrap();
                for (k, &src) in perm.iter().enumerate() {
                    let a = base.values[src];
                    let b = perm_depths.values[k];
                    assert!((a - b).abs() <= 1e-12, "{method}: {a} vs {b} after permutation");
                }
            }
        }

        // knn-graph geodesics shrink (weakly) as k grows
        let pts = gaussian_points(&mut rng, 60, 2);
        let base = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
        let geodesics: Vec<DistanceMatrix> = [4usize, 6, 10, 15]
            .iter()
            .map(|&k| graph_all_pairs(&build_knn_graph(&base, k).unwrap()).unwrap())
            .collect();
        for pair in geodesics.windows(2) {
            for i in 0..60 {
                for j in 0..60 {
                    assert!(
                        pair[0].get(i, j) >= pair[1].get(i, j) - 1e-12,
                        "geodesic grew with k at ({i}, {j})"
                    );
                }
            }
        }

        // brute-force triple-loop equivalence on small samples
        for _ in 0..20 {
            let n = rng.gen_range(3..=15usize);
            let p = rng.gen_range(1..=4usize);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
                .collect();
            let pts = PointSet::from_rows(&rows).unwrap();
            let d = pairwise_distances(&pts, &MetricDescriptor::Euclidean).unwrap();
            let mu: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let v = distances_to_point(&pts, &mu, &MetricDescriptor::Euclidean).unwrap();

            let pairs = [
                (spatial_depth(&v, &d).unwrap(), ref_spatial(&rows, &mu)),
                (lens_depth(&v, &d).unwrap(), ref_lens(&rows, &mu)),
                (halfspace_depth(&v, &d).unwrap(), ref_halfspace(&rows, &mu)),
            ];
            for (lib, reference) in pairs {
                assert!(
                    (lib - reference).abs() <= 1e-12,
                    "n = {n}, p = {p}: {lib} vs reference {reference}"
                );
            }
        }
    });
}
