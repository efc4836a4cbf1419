use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use metric_depth::classify::{accuracy, depth_features, fit, ClassifierKind};
use metric_depth::depth::{depth_all, DepthMethod};
use metric_depth::error::Error;
use metric_depth::experiments::{
    contour_grid, gen_circle_data, lp_classification_study, run_outlier_study, GridSpec,
    LpStudyConfig, LpStudySource, OutlierStudyConfig,
};
use metric_depth::io::{
    fmt_f64, read_distance_matrix_csv, read_labeled_csv, read_points_csv, write_depth_csv,
    write_distance_matrix_csv, write_table,
};
use metric_depth::matrix::validate_distance_matrix;
use metric_depth::metric::{pairwise_distances, MetricDescriptor};
use metric_depth::oracle::oracle_check;

#[derive(Parser)]
#[command(name = "mdepth", version, about = "Metric spatial depth toolkit")]
struct Cli {
    /// Worker thread cap; defaults to MDEPTH_THREADS or all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-point depths from raw points or a cached distance matrix.
    Depth(DepthArgs),
    /// Compute and cache a pairwise distance matrix.
    Distmat(DistmatArgs),
    /// Check the closed-form depth oracles against their empirical twins.
    OracleCheck,
    /// Spatial-depth contour grid over the plane.
    Contour(ContourArgs),
    /// Sphere-mixture outlier study with the crossing statistic.
    OutlierSim(OutlierArgs),
    /// DD-classification of a labeled train/test pair.
    Ddclass(DdclassArgs),
    /// Lp-distance classification accuracy sweep.
    Lpstudy(LpstudyArgs),
}

#[derive(Args)]
struct DepthArgs {
    /// Points CSV (one observation per row).
    #[arg(long, conflicts_with = "distmat")]
    input: Option<PathBuf>,
    /// Cached distance matrix CSV.
    #[arg(long)]
    distmat: Option<PathBuf>,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long, default_value = "spatial")]
    method: String,
    /// Output CSV (index, depth, method); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistmatArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "euclidean")]
    metric: String,
    #[arg(long)]
    out: PathBuf,
    /// Random triangle-inequality spot checks to report.
    #[arg(long, default_value_t = 0)]
    spot_checks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ContourArgs {
    /// Sample CSV; omitted -> the built-in noisy circle.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Size of the generated circle sample when --input is not given.
    #[arg(long)]
    circle_n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    metric: Option<String>,
    /// Square grid bounds, low and high.
    #[arg(long, num_args = 2)]
    bounds: Option<Vec<f64>>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with the same fields; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OutlierArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated contamination rates.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of spatial,lens,halfspace.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DdclassArgs {
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    classifier: Option<String>,
    /// Predicted labels CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accuracy summary JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct LpstudyArgs {
    /// Comma-separated grid of p values.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Labeled dataset CSV; omitted -> synthetic Gaussian blobs.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

fn merge<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(
    path: &Option<PathBuf>,
) -> Result<T, Error> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))
        }
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<DepthMethod>, Error> {
    names.iter().map(|s| DepthMethod::parse(s)).collect()
}

fn cmd_depth(args: &DepthArgs) -> Result<(), Error> {
    let method = DepthMethod::parse(&args.method)?;
    let d = match (&args.input, &args.distmat) {
        (Some(input), None) => {
            let metric = MetricDescriptor::parse(&args.metric)?;
            pairwise_distances(&read_points_csv(input)?, &metric)?
        }
        (None, Some(cache)) => read_distance_matrix_csv(cache)?,
        _ => {
            return Err(Error::InvalidConfig(
                "exactly one of --input or --distmat is required".into(),
            ))
        }
    };
    let depths = depth_all(&d, method)?;
    match &args.out {
        Some(path) => write_depth_csv(path, &depths)?,
        None => {
            println!("index,depth,method");
            for (i, v) in depths.values.iter().enumerate() {
                println!("{i},{},{}", fmt_f64(*v), depths.method);
            }
        }
    }
    Ok(())
}

fn cmd_distmat(args: &DistmatArgs) -> Result<(), Error> {
    let metric = MetricDescriptor::parse(&args.metric)?;
    let d = pairwise_distances(&read_points_csv(&args.input)?, &metric)?;
    if args.spot_checks > 0 {
        let report = validate_distance_matrix(&d, args.spot_checks, args.seed);
        eprintln!(
            "triangle spot checks: {} of {} violated (tolerance 1e-9)",
            report.triangle_violations, report.triangle_checks
        );
    }
    write_distance_matrix_csv(&args.out, &d)
}

fn cmd_oracle_check() -> Result<bool, Error> {
    let rows = oracle_check()?;
    println!(
        "{:<34} {:>18} {:>18} {:>12} {:>6}",
        "oracle", "analytic", "empirical", "|gap|", "pass"
    );
    let mut all_pass = true;
    for row in &rows {
        all_pass &= row.pass();
        println!(
            "{:<34} {:>18.12} {:>18.12} {:>12.3e} {:>6}",
            row.name,
            row.analytic,
            row.empirical,
            row.gap(),
            if row.pass() { "ok" } else { "FAIL" }
        );
    }
    Ok(all_pass)
}

fn cmd_contour(args: &ContourArgs) -> Result<(), Error> {
    let cfg: ContourArgs = load_config(&args.config)?;
    let metric = MetricDescriptor::parse(
        &merge(args.metric.clone(), cfg.metric).unwrap_or_else(|| "euclidean".into()),
    )?;
    let seed = merge(args.seed, cfg.seed).unwrap_or(1);
    let sample = match merge(args.input.clone(), cfg.input) {
        Some(path) => read_points_csv(path)?,
        None => gen_circle_data(merge(args.circle_n, cfg.circle_n).unwrap_or(150), seed)?,
    };
    let bounds = merge(args.bounds.clone(), cfg.bounds).unwrap_or_else(|| vec![-4.0, 4.0]);
    if bounds.len() != 2 || bounds[0] >= bounds[1] {
        return Err(Error::InvalidConfig("bounds must be low high".into()));
    }
    let resolution = merge(args.resolution, cfg.resolution).unwrap_or(60);
    let grid = contour_grid(&sample, &metric, GridSpec::square(bounds[0], bounds[1], resolution))?;
    let rows: Vec<Vec<String>> = grid
        .nodes
        .iter()
        .zip(&grid.depths)
        .map(|(&(x, y), &depth)| vec![fmt_f64(x), fmt_f64(y), fmt_f64(depth)])
        .collect();
    match merge(args.out.clone(), cfg.out) {
        Some(path) => write_table(path, &["x", "y", "depth"], &rows)?,
        None => {
            println!("x,y,depth");
            for row in rows {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(())
}

fn cmd_outlier(args: &OutlierArgs) -> Result<(), Error> {
    let cfg: OutlierArgs = load_config(&args.config)?;
    let methods = merge(args.methods.clone(), cfg.methods)
        .unwrap_or_else(|| vec!["spatial".into(), "lens".into(), "halfspace".into()]);
    let config = OutlierStudyConfig {
        n: merge(args.n, cfg.n).unwrap_or(100),
        lambda: merge(args.lambda, cfg.lambda).unwrap_or(0.5),
        eps_grid: merge(args.eps.clone(), cfg.eps).unwrap_or_else(|| vec![0.05, 0.10]),
        replications: merge(args.reps, cfg.reps).unwrap_or(100),
        seed: merge(args.seed, cfg.seed).unwrap_or(1),
        methods: parse_methods(&methods)?,
    };
    let table = run_outlier_study(&config)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                fmt_f64(r.lambda),
                r.n.to_string(),
                fmt_f64(r.eps),
                fmt_f64(r.mean_c),
            ]
        })
        .collect();
    let header = ["method", "lambda", "n", "eps", "mean_C"];
    match merge(args.out.clone(), cfg.out) {
        Some(path) => write_table(path, &header, &rows)?,
        None => {
            println!("{}", header.join(","));
            for row in rows {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(())
}

fn cmd_ddclass(args: &DdclassArgs) -> Result<(), Error> {
    let cfg: DdclassArgs = load_config(&args.config)?;
    let train_path = merge(args.train.clone(), cfg.train)
        .ok_or_else(|| Error::InvalidConfig("--train is required".into()))?;
    let test_path = merge(args.test.clone(), cfg.test)
        .ok_or_else(|| Error::InvalidConfig("--test is required".into()))?;
    let label_col = merge(args.label_col.clone(), cfg.label_col).unwrap_or_else(|| "label".into());
    let metric = MetricDescriptor::parse(
        &merge(args.metric.clone(), cfg.metric).unwrap_or_else(|| "euclidean".into()),
    )?;
    let method =
        DepthMethod::parse(&merge(args.depth.clone(), cfg.depth).unwrap_or_else(|| "spatial".into()))?;
    let classifier = ClassifierKind::parse(
        &merge(args.classifier.clone(), cfg.classifier).unwrap_or_else(|| "lda".into()),
    )?;

    let train = read_labeled_csv(&train_path, &label_col)?;
    let test = read_labeled_csv(&test_path, &label_col)?;
    let train_features = depth_features(&train, &train.points, &metric, method)?;
    let model = fit(&train_features, &train.labels, classifier)?;
    let test_features = depth_features(&train, &test.points, &metric, method)?;
    let predicted = model.classify(&test_features)?;
    let acc = accuracy(&predicted, &test.labels);

    let rows: Vec<Vec<String>> = predicted
        .iter()
        .enumerate()
        .map(|(i, &l)| vec![i.to_string(), l.to_string()])
        .collect();
    match merge(args.out.clone(), cfg.out) {
        Some(path) => write_table(path, &["index", "predicted"], &rows)?,
        None => {
            println!("index,predicted");
            for row in rows {
                println!("{}", row.join(","));
            }
        }
    }
    let summary = serde_json::json!({
        "n_train": train.points.n(),
        "n_test": test.points.n(),
        "n_groups": train.n_groups,
        "metric": metric.to_string(),
        "depth": method.to_string(),
        "classifier": if classifier == ClassifierKind::Lda { "lda" } else { "qda" },
        "accuracy": acc,
    });
    match merge(args.summary.clone(), cfg.summary) {
        Some(path) => std::fs::write(path, serde_json::to_string_pretty(&summary).unwrap())?,
        None => eprintln!("{summary}"),
    }
    Ok(())
}

fn cmd_lpstudy(args: &LpstudyArgs) -> Result<(), Error> {
    let cfg: LpstudyArgs = load_config(&args.config)?;
    let classifier = ClassifierKind::parse(
        &merge(args.classifier.clone(), cfg.classifier).unwrap_or_else(|| "lda".into()),
    )?;
    let source = match merge(args.data.clone(), cfg.data) {
        Some(path) => {
            let label_col =
                merge(args.label_col.clone(), cfg.label_col).unwrap_or_else(|| "label".into());
            LpStudySource::Dataset {
                data: read_labeled_csv(&path, &label_col)?,
                n_train: merge(args.n_train, cfg.n_train).unwrap_or(150),
                n_test: merge(args.n_test, cfg.n_test).unwrap_or(50),
            }
        }
        None => LpStudySource::SyntheticBlobs {
            n_classes: 3,
            dim: 3,
            separation: 4.0,
            n_train_per_class: 50,
            n_test_per_class: 17,
        },
    };
    let config = LpStudyConfig {
        source,
        p_grid: merge(args.p_grid.clone(), cfg.p_grid).unwrap_or_else(|| vec![1.0, 2.0, 3.0]),
        classifier,
        depth_method: DepthMethod::Spatial,
        replications: merge(args.reps, cfg.reps).unwrap_or(20),
        seed: merge(args.seed, cfg.seed).unwrap_or(1),
    };
    let table = lp_classification_study(&config)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| vec![fmt_f64(r.p), fmt_f64(r.mean_accuracy)])
        .collect();
    match merge(args.out.clone(), cfg.out) {
        Some(path) => write_table(path, &["p", "mean_accuracy"], &rows)?,
        None => {
            println!("p,mean_accuracy");
            for row in rows {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn init_threads(cap: Option<usize>) {
    let cap = cap.or_else(|| {
        std::env::var("MDEPTH_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(k) = cap {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(_cap: Option<usize>) {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the error path too
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    init_threads(cli.threads);
    let result = match &cli.command {
        Command::Depth(args) => cmd_depth(args),
        Command::Distmat(args) => cmd_distmat(args),
        Command::OracleCheck => match cmd_oracle_check() {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(2),
            Err(e) => Err(e),
        },
        Command::Contour(args) => cmd_contour(args),
        Command::OutlierSim(args) => cmd_outlier(args),
        Command::Ddclass(args) => cmd_ddclass(args),
        Command::Lpstudy(args) => cmd_lpstudy(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::InvalidConfig(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
