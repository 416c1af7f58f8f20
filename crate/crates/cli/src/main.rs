//! `tailmean`: confidence intervals for the mean of heavy-tailed data.
//!
//! Exit status: 0 on success, 2 for usage or validation errors, 3 for data
//! errors, 4 when a solver or experiment fails.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use tailmean::baselines::{normal_ci, BootstrapDraws};
use tailmean::el::ElProblem;
use tailmean::harness::{
    endpoints_vs_k, harness_el_options, hill_curve, run_coverage, EndpointSweep, N1Rule,
};
use tailmean::io::{
    coverage_table, interval_table, parse_k_grid, read_config, read_dataset, write_endpoint_plot,
    write_hill_plot, write_records, Command, CoverageRecord, Record, RunManifest,
};
use tailmean::rng::stream;
use tailmean::tail_fit::make_sorted;
use tailmean::{ConfidenceInterval, Error, Method, Result, TailMode, TailWindow};

#[derive(Parser)]
#[command(name = "tailmean", version, about = "Confidence intervals for the mean of heavy-tailed data")]
struct Cli {
    /// Log progress and solver warnings (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Output {
    /// Directory for report files.
    #[arg(long, env = "TAILMEAN_OUT_DIR", default_value = "tailmean-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Data {
    /// Comma-separated input file.
    #[arg(long)]
    data: PathBuf,
    /// Column header name, or zero-based column index.
    #[arg(long, default_value = "0")]
    column: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Intervals for the mean of one dataset.
    Ci {
        #[command(flatten)]
        data: Data,
        /// Upper order statistics modelled as the right tail.
        #[arg(long)]
        k: usize,
        /// Lower order statistics modelled as the left tail (two-tail mode).
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value = "one-tail")]
        mode: TailMode,
        #[arg(long, value_delimiter = ',', default_value = "0.90,0.95")]
        levels: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "el,normal,bootstrap")]
        methods: Vec<Method>,
        /// Bootstrap subsample size (default: k).
        #[arg(long)]
        n1: Option<usize>,
        /// Bootstrap resamples.
        #[arg(long = "resamples", short = 'B', default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo coverage study from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Interval endpoints across a grid of tail sizes.
    Sweep {
        #[command(flatten)]
        data: Data,
        /// `start:end:step` (inclusive) or a comma list.
        #[arg(long)]
        k_grid: String,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_delimiter = ',', default_value = "el,normal,bootstrap")]
        methods: Vec<Method>,
        /// Fixed bootstrap subsample size (default: equal to k).
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long = "resamples", short = 'B', default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Hill estimates of the right tail index across tail sizes.
    HillDiag {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        k_grid: String,
        #[command(flatten)]
        output: Output,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Domain(_) | Error::FormulaSingular(_) => 2,
        Error::Data(_) | Error::Io(_) | Error::Degenerate(_) => 3,
        Error::NonConvergence(_)
        | Error::ConstraintBoundary(_)
        | Error::UnboundedSide { .. }
        | Error::InfeasibleMean { .. }
        | Error::InfeasibleParameters(_)
        | Error::Experiment(_) => 4,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Digest input for data-driven commands: the argument summary plus the
/// dataset bytes.
fn data_digest(summary: &str, data: &Path) -> Result<Vec<u8>> {
    let mut bytes = summary.as_bytes().to_vec();
    bytes.extend(std::fs::read(data).map_err(|e| Error::Io(format!("cannot read {}: {e}", data.display())))?);
    Ok(bytes)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Ci {
            data,
            k,
            m,
            mode,
            levels,
            methods,
            n1,
            resamples,
            seed,
            output,
        } => {
            let values = read_dataset(&data.data, &data.column)?;
            let sample = make_sorted(values)?;
            let window = match mode {
                TailMode::OneTail => TailWindow::one_tail(k),
                TailMode::TwoTail => TailWindow::two_tail(k, m),
            };
            if mode == TailMode::OneTail && m != 0 {
                return Err(Error::Validation("one-tail mode takes no --m".into()));
            }
            window.validate(&sample)?;
            let mut intervals: Vec<ConfidenceInterval> = Vec::new();
            for method in &methods {
                match method {
                    Method::El => {
                        let problem = ElProblem::new(&sample, window)?;
                        let opts = harness_el_options();
                        for &level in &levels {
                            intervals.push(problem.interval(level, &opts)?);
                        }
                    }
                    Method::Normal => {
                        for &level in &levels {
                            intervals.push(normal_ci(sample.values(), level)?);
                        }
                    }
                    Method::Bootstrap => {
                        let draws =
                            BootstrapDraws::draw(sample.values(), n1.unwrap_or(k), resamples, &mut stream(seed))?;
                        for &level in &levels {
                            intervals.push(draws.interval(level)?);
                        }
                    }
                }
            }
            print!("{}", interval_table(&intervals));
            if let Some(el) = intervals.iter().find(|c| c.method == Method::El) {
                let d = &el.diagnostics;
                println!(
                    "\nEL diagnostics: alpha_bar_r = {:.6}, c_bar_r = {:.6}, mu_hat = {:.6}, max residual = {:.2e}",
                    d["alpha_bar_r"], d["c_bar_r"], d["mu_hat"], d["max_residual"]
                );
            }
            let summary = format!(
                "ci k={k} m={m} mode={mode:?} levels={levels:?} methods={methods:?} n1={n1:?} B={resamples} seed={seed} column={}",
                data.column
            );
            let manifest = RunManifest::new(
                Command::Ci,
                &data.data.display().to_string(),
                seed,
                &output.out_dir.display().to_string(),
                &data_digest(&summary, &data.data)?,
            );
            let mut records = vec![Record::Manifest(manifest)];
            records.extend(intervals.into_iter().map(Record::Interval));
            let path = write_file(&output.out_dir, "ci.jsonl", &write_records(&records)?)?;
            eprintln!("wrote {}", path.display());
        }
        Cmd::Simulate { config, output } => {
            let parsed = read_config(&config)?;
            let experiment = parsed.experiment()?;
            let name = parsed.name.clone().unwrap_or_else(|| {
                config
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "simulate".into())
            });
            let bytes = std::fs::read(&config)
                .map_err(|e| Error::Io(format!("cannot read {}: {e}", config.display())))?;
            let started = Instant::now();
            let report = run_coverage(&experiment)?;
            let manifest = RunManifest::new(
                Command::Simulate,
                &config.display().to_string(),
                experiment.seed,
                &output.out_dir.display().to_string(),
                &bytes,
            );
            let mut records = vec![Record::Manifest(manifest.clone())];
            records.extend(CoverageRecord::from_report(&report).into_iter().map(Record::Coverage));
            let table = coverage_table(std::slice::from_ref(&report));
            let jsonl = write_file(&output.out_dir, &format!("{name}.jsonl"), &write_records(&records)?)?;
            let text = format!(
                "# seed={} config_digest={} tool_version={}\n{table}",
                manifest.seed, manifest.config_digest, manifest.tool_version
            );
            let txt = write_file(&output.out_dir, &format!("{name}.txt"), &text)?;
            print!("{table}");
            eprintln!(
                "{} replications in {:.1?}; wrote {} and {}",
                report.reps,
                started.elapsed(),
                jsonl.display(),
                txt.display()
            );
        }
        Cmd::Sweep {
            data,
            k_grid,
            level,
            methods,
            n1,
            resamples,
            seed,
            output,
        } => {
            let ks = parse_k_grid(&k_grid)?;
            let sample = make_sorted(read_dataset(&data.data, &data.column)?)?;
            let sweep = EndpointSweep {
                level,
                methods: methods.clone(),
                n1_rule: n1.map_or(N1Rule::EqualK, N1Rule::Fixed),
                resamples,
                seed,
            };
            let rows = endpoints_vs_k(&sample, &ks, &sweep)?;
            let summary = format!(
                "sweep k_grid={k_grid} level={level} methods={methods:?} n1={n1:?} B={resamples} seed={seed} column={}",
                data.column
            );
            let manifest = RunManifest::new(
                Command::Sweep,
                &data.data.display().to_string(),
                seed,
                &output.out_dir.display().to_string(),
                &data_digest(&summary, &data.data)?,
            );
            let text = write_endpoint_plot(&manifest, level, &methods, &rows)?;
            let path = write_file(&output.out_dir, "sweep.csv", &text)?;
            let failed = rows
                .iter()
                .filter(|r| r.cells.iter().any(|c| c.error.is_some()))
                .count();
            eprintln!("{} rows ({failed} with a failed method); wrote {}", rows.len(), path.display());
        }
        Cmd::HillDiag { data, k_grid, output } => {
            let ks = parse_k_grid(&k_grid)?;
            let sample = make_sorted(read_dataset(&data.data, &data.column)?)?;
            let points = hill_curve(&sample, &ks)?;
            let summary = format!("hill-diag k_grid={k_grid} column={}", data.column);
            let manifest = RunManifest::new(
                Command::HillDiag,
                &data.data.display().to_string(),
                0,
                &output.out_dir.display().to_string(),
                &data_digest(&summary, &data.data)?,
            );
            let path = write_file(&output.out_dir, "hill.csv", &write_hill_plot(&manifest, &points)?)?;
            for (k, a) in &points {
                println!("{k:>6} {a:>10.4}");
            }
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
