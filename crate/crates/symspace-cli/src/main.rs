//! Command-line front end for the symmetric-space library: property
//! verification suites with JSON reports, a ball-MLR training demo,
//! micro-benchmarks of the core kernels, and synthetic-dataset generation.
//!
//! Flag values resolve in precedence order: explicit flag, then a
//! `key=value` line in the `--config` file, then (for the seed) the
//! `SYMSPACE_SEED` environment variable, then the built-in default.
//! Exit codes: 0 success, 1 failed checks or runtime error, 2 usage error.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use symspace::attention::{attention_forward, AttentionBlock, AttentionFc};
use symspace::matkernels::{sym_exp, SymMatrix};
use symspace::poincare::{busemann_ball, dist_ball, exp_map_ball, BallBoundary, BallPoint};
use symspace::spd_pem::{pem_dist, FcLayerLe, FcPairLe, PhiMap};
use symspace::symspace_gi::{gi_dist, iwasawa_h, CosetRep};
use symspace::training::{gen_synthetic, train_mlr, Dataset, HeadKind, TrainConfig};
use symspace::verify::{run_suite, PropertyReport};

/// Seed used when neither a flag, a config line, nor `SYMSPACE_SEED`
/// provides one.
const DEFAULT_SEED: u64 = 7;

/// Norm the largest loaded CSV feature vector is mapped to inside the ball.
const CSV_TARGET_NORM: f64 = 0.9;

#[derive(Parser)]
#[command(
    name = "symspace",
    version,
    about = "Verification suites, demos, and benchmarks for symmetric-space distances",
    arg_required_else_help = true
)]
struct Cli {
    /// Flat key=value file supplying defaults for any flag below (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and optionally emit a JSON report.
    Verify(VerifyArgs),
    /// Training demos on synthetic or CSV data.
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Time one core operation and print median/p90 wall times.
    Bench(BenchArgs),
    /// Draw a labeled synthetic ball dataset and dump it as CSV.
    GenSynthetic(GenSyntheticArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run: poincare, pem, gi, attention, or all [default: all].
    #[arg(long)]
    suite: Option<String>,
    /// Base RNG seed [default: SYMSPACE_SEED or 7].
    #[arg(long)]
    seed: Option<u64>,
    /// Base trials per check; 0 runs nothing and passes vacuously
    /// [default: 100].
    #[arg(long)]
    trials: Option<usize>,
    /// Worker-thread cap for running checks [default: 1].
    #[arg(long)]
    threads: Option<usize>,
    /// Write the JSON report to this path, or '-' for standard output.
    #[arg(long, value_name = "PATH")]
    report: Option<String>,
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Train a multinomial-regression head on the ball and report
    /// per-epoch loss plus final training accuracy.
    Mlr(MlrArgs),
}

#[derive(Args)]
struct MlrArgs {
    /// Head kind: g (geodesic), h (horoplane), or b (Busemann)
    /// [default: b].
    #[arg(long)]
    distance: Option<String>,
    /// Feature dimension of the synthetic draw [default: 2].
    #[arg(long)]
    dim: Option<usize>,
    /// Class count of the synthetic draw [default: 3].
    #[arg(long)]
    classes: Option<usize>,
    /// Sample count of the synthetic draw [default: 300].
    #[arg(long)]
    samples: Option<usize>,
    /// Wrapped-normal spread of the synthetic draw [default: 0.1].
    #[arg(long)]
    sigma: Option<f64>,
    /// Training epochs [default: 200].
    #[arg(long)]
    epochs: Option<usize>,
    /// SGD learning rate [default: 0.1].
    #[arg(long)]
    lr: Option<f64>,
    /// Base RNG seed for the draw and the trainer
    /// [default: SYMSPACE_SEED or 7].
    #[arg(long)]
    seed: Option<u64>,
    /// Train on this CSV file (header `f0..f{D-1},label`) instead of a
    /// synthetic draw.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Operation to time: dist-ball, busemann-ball, pem-dist, gi-dist,
    /// iwasawa, or attention.
    #[arg(long)]
    op: Option<String>,
    /// Matrix or vector dimension of the inputs [default: 3].
    #[arg(long)]
    dim: Option<usize>,
    /// Timed iterations [default: 1000].
    #[arg(long)]
    iters: Option<usize>,
    /// Seed for the deterministic input draw [default: SYMSPACE_SEED or 7].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// Feature dimension [default: 2].
    #[arg(long)]
    dim: Option<usize>,
    /// Class count (>= 2) [default: 3].
    #[arg(long)]
    classes: Option<usize>,
    /// Sample count [default: 300].
    #[arg(long)]
    samples: Option<usize>,
    /// Wrapped-normal spread around each class prototype [default: 0.1].
    #[arg(long)]
    sigma: Option<f64>,
    /// Base RNG seed [default: SYMSPACE_SEED or 7].
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path, or '-' for standard output [default: -].
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

/// CLI-level failure, split by which exit code it maps to.
#[derive(Debug)]
enum CliError {
    /// Bad invocation: unknown config key, out-of-range value, missing
    /// required setting. Exit code 2.
    Usage(String),
    /// Legitimate invocation that failed: unreadable file, malformed CSV,
    /// training error. Exit code 1.
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err @ CliError::Usage(_)) => {
            eprintln!("error: {err}");
            eprintln!("run `symspace --help` for usage");
            ExitCode::from(2)
        }
        Err(err @ CliError::Runtime(_)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let defaults = FileDefaults::load(cli.config.as_deref())?;
    match cli.command {
        Command::Verify(args) => run_verify(args, &defaults),
        Command::Demo(DemoCommand::Mlr(args)) => run_demo_mlr(args, &defaults),
        Command::Bench(args) => run_bench(args, &defaults),
        Command::GenSynthetic(args) => run_gen_synthetic(args, &defaults),
    }
}

// ---------------------------------------------------------------------------
// Config file and flag resolution
// ---------------------------------------------------------------------------

/// Keys a config file may define; the union of all subcommand flags, so one
/// file can serve several invocations.
const CONFIG_KEYS: &[&str] = &[
    "suite", "seed", "trials", "threads", "report", "distance", "dim", "classes", "samples",
    "sigma", "epochs", "lr", "data", "op", "iters", "out",
];

/// Values loaded from the optional `key=value` config file.
struct FileDefaults {
    values: BTreeMap<String, String>,
}

impl FileDefaults {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        let Some(path) = path else {
            return Ok(FileDefaults { values });
        };
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Runtime(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config {} line {}: expected key=value, got `{line}`",
                    path.display(),
                    index + 1
                )));
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "config {} line {}: unknown key `{key}`",
                    path.display(),
                    index + 1
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileDefaults { values })
    }

    /// The config value for `key` parsed as `T`, if present.
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config value `{raw}` is invalid for `{key}`"))
            }),
        }
    }
}

/// flag > config > default.
fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    defaults: &FileDefaults,
    key: &str,
    fallback: T,
) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(defaults.get(key)?.unwrap_or(fallback)),
    }
}

/// flag > config > SYMSPACE_SEED > 7.
fn resolve_seed(flag: Option<u64>, defaults: &FileDefaults) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if let Some(seed) = defaults.get("seed")? {
        return Ok(seed);
    }
    match std::env::var("SYMSPACE_SEED") {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::Usage(format!(
                "SYMSPACE_SEED must be an unsigned integer, got `{raw}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(args: VerifyArgs, defaults: &FileDefaults) -> Result<ExitCode, CliError> {
    let suite = resolve(args.suite, defaults, "suite", "all".to_string())?;
    let seed = resolve_seed(args.seed, defaults)?;
    let trials = resolve(args.trials, defaults, "trials", 100)?;
    let threads = resolve(args.threads, defaults, "threads", 1)?;
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let report_target: Option<String> = match args.report {
        Some(t) => Some(t),
        None => defaults.get("report")?,
    };

    let report =
        run_suite(&suite, seed, trials, threads).map_err(|e| CliError::Usage(e.to_string()))?;

    // The human-readable table normally goes to stdout; when the JSON
    // report itself streams there, the table moves to stderr so the
    // output stays machine-parseable.
    let json_to_stdout = report_target.as_deref() == Some("-");
    let mut table = String::new();
    render_report_table(&report, trials, threads, &mut table);
    if json_to_stdout {
        eprint!("{table}");
    } else {
        print!("{table}");
    }

    if let Some(target) = report_target {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Runtime(format!("cannot serialize report: {e}")))?;
        if json_to_stdout {
            println!("{json}");
        } else {
            fs::write(&target, format!("{json}\n"))
                .map_err(|e| CliError::Runtime(format!("cannot write report {target}: {e}")))?;
        }
    }

    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn render_report_table(report: &PropertyReport, trials: usize, threads: usize, out: &mut String) {
    use fmt::Write as _;
    let _ = writeln!(
        out,
        "suite {}  seed {}  trials {}  threads {}",
        report.suite, report.seed, trials, threads
    );
    for check in &report.checks {
        let _ = writeln!(
            out,
            "  {:<4} {:<34} trials {:>4}  max {:>12.5e}  tol {:>9.1e}",
            if check.passed { "pass" } else { "FAIL" },
            check.name,
            check.trials,
            check.max_error,
            check.tolerance
        );
    }
    let _ = writeln!(
        out,
        "clamp events {}  elapsed {} ms  result: {}",
        report.clamp_events,
        report.elapsed_ms,
        if report.passed() { "PASS" } else { "FAIL" }
    );
}

// ---------------------------------------------------------------------------
// demo mlr
// ---------------------------------------------------------------------------

fn run_demo_mlr(args: MlrArgs, defaults: &FileDefaults) -> Result<ExitCode, CliError> {
    let distance = resolve(args.distance, defaults, "distance", "b".to_string())?;
    let kind = match distance.as_str() {
        "g" => HeadKind::G,
        "h" => HeadKind::H,
        "b" => HeadKind::B,
        other => {
            return Err(CliError::Usage(format!(
                "--distance must be g, h, or b, got `{other}`"
            )))
        }
    };
    let seed = resolve_seed(args.seed, defaults)?;
    let epochs = resolve(args.epochs, defaults, "epochs", 200)?;
    let lr = resolve(args.lr, defaults, "lr", 0.1)?;
    if epochs == 0 {
        return Err(CliError::Usage("--epochs must be at least 1".into()));
    }
    if lr.is_nan() || lr < 0.0 {
        return Err(CliError::Usage("--lr must be nonnegative".into()));
    }

    let data_path: Option<PathBuf> = match args.data {
        Some(p) => Some(p),
        None => defaults.get::<String>("data")?.map(PathBuf::from),
    };
    let dataset = match &data_path {
        Some(path) => {
            let dataset = load_csv(path)?;
            println!(
                "dataset {} ({} points, dim {}, {} classes)",
                path.display(),
                dataset.len(),
                dataset.dim(),
                dataset.num_classes()
            );
            dataset
        }
        None => {
            let dim = resolve(args.dim, defaults, "dim", 2)?;
            let classes = resolve(args.classes, defaults, "classes", 3)?;
            let samples = resolve(args.samples, defaults, "samples", 300)?;
            let sigma = resolve(args.sigma, defaults, "sigma", 0.1)?;
            println!(
                "dataset synthetic (dim {dim}, {classes} classes, {samples} points, \
                 sigma {sigma}, seed {seed})"
            );
            gen_synthetic(dim, classes, samples, sigma, seed)
                .map_err(|e| CliError::Runtime(e.to_string()))?
        }
    };

    let config = TrainConfig {
        learning_rate: lr,
        epochs,
        seed,
        ..TrainConfig::default()
    };
    println!(
        "training {}-head: lr {}, {} epochs, full batch",
        distance, config.learning_rate, config.epochs
    );
    let metrics =
        train_mlr(&dataset, kind, &config).map_err(|e| CliError::Runtime(e.to_string()))?;

    println!("epoch  loss");
    println!("{:>5}  {:.6}", 0, metrics.initial_loss);
    for (i, loss) in metrics.losses.iter().enumerate() {
        println!("{:>5}  {loss:.6}", i + 1);
    }
    println!("final train accuracy: {:.4}", metrics.final_accuracy);
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// CSV in and out
// ---------------------------------------------------------------------------

/// Loads a `f0..f{D-1},label` CSV and maps the feature vectors into the
/// ball: `exp_map_ball(0, s·v)` with one global `s` chosen so the largest
/// mapped norm is 0.9.
fn load_csv(path: &Path) -> Result<Dataset, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(CliError::Runtime(format!("{}: empty file", path.display())));
    };
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = columns.len().saturating_sub(1);
    let header_ok = dim >= 1
        && columns[dim] == "label"
        && columns[..dim]
            .iter()
            .enumerate()
            .all(|(i, c)| *c == format!("f{i}"));
    if !header_ok {
        return Err(CliError::Runtime(format!(
            "{} line 1: header must be `f0..f{{D-1}},label`, got `{header}`",
            path.display()
        )));
    }

    let mut raw_features: Vec<DVector<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (index, raw) in lines {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != dim + 1 {
            return Err(CliError::Runtime(format!(
                "{} line {line_no}: expected {} cells, got {}",
                path.display(),
                dim + 1,
                cells.len()
            )));
        }
        let mut v = DVector::zeros(dim);
        for (j, cell) in cells[..dim].iter().enumerate() {
            v[j] = cell.parse::<f64>().map_err(|_| {
                CliError::Runtime(format!(
                    "{} line {line_no}: non-numeric value `{cell}` in column f{j}",
                    path.display()
                ))
            })?;
            if !v[j].is_finite() {
                return Err(CliError::Runtime(format!(
                    "{} line {line_no}: non-finite value in column f{j}",
                    path.display()
                )));
            }
        }
        let label: usize = cells[dim].parse().map_err(|_| {
            CliError::Runtime(format!(
                "{} line {line_no}: label must be a nonnegative integer, got `{}`",
                path.display(),
                cells[dim]
            ))
        })?;
        raw_features.push(v);
        labels.push(label);
    }
    if raw_features.is_empty() {
        return Err(CliError::Runtime(format!(
            "{}: no data rows",
            path.display()
        )));
    }

    let max_norm = raw_features.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // tanh(s·max_norm) = target ⇒ s = atanh(target)/max_norm; an all-zero
    // dataset maps wholesale to the origin.
    let scale = if max_norm > 0.0 {
        CSV_TARGET_NORM.atanh() / max_norm
    } else {
        0.0
    };
    let origin = BallPoint::origin(raw_features[0].len());
    let features: Vec<BallPoint> = raw_features
        .iter()
        .map(|v| exp_map_ball(&origin, &(v * scale)))
        .collect();
    let num_classes = labels.iter().max().copied().unwrap_or(0) + 1;
    Dataset::new(features, labels, num_classes).map_err(|e| CliError::Runtime(e.to_string()))
}

fn run_gen_synthetic(
    args: GenSyntheticArgs,
    defaults: &FileDefaults,
) -> Result<ExitCode, CliError> {
    let dim = resolve(args.dim, defaults, "dim", 2)?;
    let classes = resolve(args.classes, defaults, "classes", 3)?;
    let samples = resolve(args.samples, defaults, "samples", 300)?;
    let sigma = resolve(args.sigma, defaults, "sigma", 0.1)?;
    let seed = resolve_seed(args.seed, defaults)?;
    let out = match args.out {
        Some(o) => o,
        None => defaults.get("out")?.unwrap_or_else(|| "-".to_string()),
    };

    let dataset = gen_synthetic(dim, classes, samples, sigma, seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = String::new();
    {
        use fmt::Write as _;
        for j in 0..dim {
            let _ = write!(csv, "f{j},");
        }
        let _ = writeln!(csv, "label");
        for (point, label) in dataset.features().iter().zip(dataset.labels()) {
            for j in 0..dim {
                // Default f64 formatting round-trips exactly.
                let _ = write!(csv, "{},", point.coords()[j]);
            }
            let _ = writeln!(csv, "{label}");
        }
    }
    if out == "-" {
        print!("{csv}");
        std::io::stdout()
            .flush()
            .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))?;
    } else {
        fs::write(&out, csv).map_err(|e| CliError::Runtime(format!("cannot write {out}: {e}")))?;
        eprintln!("wrote {samples} rows to {out}");
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

fn run_bench(args: BenchArgs, defaults: &FileDefaults) -> Result<ExitCode, CliError> {
    let op = match args.op {
        Some(o) => o,
        None => defaults
            .get("op")?
            .ok_or_else(|| CliError::Usage("--op is required for bench".into()))?,
    };
    let dim = resolve(args.dim, defaults, "dim", 3)?;
    let iters = resolve(args.iters, defaults, "iters", 1000)?;
    let seed = resolve_seed(args.seed, defaults)?;
    if dim < 2 {
        return Err(CliError::Usage("--dim must be at least 2".into()));
    }
    if iters == 0 {
        return Err(CliError::Usage("--iters must be at least 1".into()));
    }

    let mut draw = SplitMix::new(seed);
    let body: Box<dyn Fn()> = match op.as_str() {
        "dist-ball" => {
            let x = draw.ball_point(dim);
            let y = draw.ball_point(dim);
            Box::new(move || {
                std::hint::black_box(dist_ball(&x, &y));
            })
        }
        "busemann-ball" => {
            let xi = draw.boundary(dim);
            let x = draw.ball_point(dim);
            Box::new(move || {
                std::hint::black_box(busemann_ball(&xi, &x));
            })
        }
        "pem-dist" => {
            let phi = PhiMap::log_euclidean();
            let x = draw.spd(dim, 1.0);
            let y = draw.spd(dim, 1.0);
            Box::new(move || {
                std::hint::black_box(pem_dist(&phi, &x, &y).expect("benchmark input"));
            })
        }
        "gi-dist" => {
            let x = draw.spd(dim, 1.0);
            let y = draw.spd(dim, 1.0);
            Box::new(move || {
                std::hint::black_box(gi_dist(&x, &y).expect("benchmark input"));
            })
        }
        "iwasawa" => {
            let g = draw.coset_rep(dim);
            Box::new(move || {
                std::hint::black_box(iwasawa_h(&g).expect("benchmark input"));
            })
        }
        "attention" => {
            let block = draw.le_attention_block(dim);
            let seq: Vec<_> = (0..4).map(|_| draw.spd(dim, 0.5)).collect();
            Box::new(move || {
                std::hint::black_box(attention_forward(&block, &seq).expect("benchmark input"));
            })
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown bench op `{other}` (expected dist-ball, busemann-ball, \
                 pem-dist, gi-dist, iwasawa, or attention)"
            )))
        }
    };

    // Warm-up pass, then per-iteration wall times.
    body();
    let mut times_us: Vec<f64> = (0..iters)
        .map(|_| {
            let start = Instant::now();
            body();
            start.elapsed().as_secs_f64() * 1e6
        })
        .collect();
    times_us.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if iters % 2 == 1 {
        times_us[iters / 2]
    } else {
        0.5 * (times_us[iters / 2 - 1] + times_us[iters / 2])
    };
    let p90 = times_us[((iters as f64 * 0.9).ceil() as usize).clamp(1, iters) - 1];
    println!("bench {op}  dim {dim}  iters {iters}");
    println!("median {median:.3} us  p90 {p90:.3} us");
    Ok(ExitCode::SUCCESS)
}

/// Deterministic input generator for benchmarks: splitmix64 stream mapped
/// to the handful of sample shapes the timed kernels need. Not meant for
/// statistics — just cheap, seed-stable, dependency-free inputs.
struct SplitMix {
    state: u64,
}

impl SplitMix {
    fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    fn symmetric_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    fn vector(&mut self, dim: usize, scale: f64) -> DVector<f64> {
        DVector::from_fn(dim, |_, _| scale * self.symmetric_unit())
    }

    fn ball_point(&mut self, dim: usize) -> BallPoint {
        let v = self.vector(dim, 1.0);
        let norm = v.norm().max(1e-9);
        BallPoint::clamped(&v * (0.8 / norm * self.symmetric_unit().abs()))
    }

    fn boundary(&mut self, dim: usize) -> BallBoundary {
        let v = self.vector(dim, 1.0);
        BallBoundary::from_vector(v).expect("nonzero draw")
    }

    fn spd(&mut self, dim: usize, scale: f64) -> symspace::matkernels::SpdMatrix {
        let s = SymMatrix::new(DMatrix::from_fn(dim, dim, |_, _| {
            scale * self.symmetric_unit()
        }))
        .expect("finite square matrix");
        sym_exp(&s).expect("exp of a bounded symmetric matrix")
    }

    fn coset_rep(&mut self, dim: usize) -> CosetRep {
        // SPD times unit-upper-triangular: always invertible.
        let spd = self.spd(dim, 1.0);
        let mut n = DMatrix::<f64>::identity(dim, dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                n[(i, j)] = 0.5 * self.symmetric_unit();
            }
        }
        CosetRep::new(spd.matrix() * n).expect("product of invertible factors")
    }

    fn le_attention_block(&mut self, dim: usize) -> AttentionBlock {
        let m_out = dim.min(3);
        let layer = |draw: &mut SplitMix| {
            let pairs: Vec<FcPairLe> = (0..m_out * (m_out + 1) / 2)
                .map(|_| FcPairLe {
                    p: draw.spd(dim, 0.5),
                    a: draw.spd(dim, 0.5),
                })
                .collect();
            AttentionFc::Le(FcLayerLe::new(dim, m_out, &pairs).expect("well-formed layer"))
        };
        let fc_q = layer(self);
        let fc_k = layer(self);
        let fc_v = layer(self);
        AttentionBlock::new(fc_q, fc_k, fc_v, 0.5, 0.0)
            .expect("layers share variant and dimensions")
    }
}
