use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use perfest::experiments::{
    run_convergence_experiment, run_coverage_experiment, run_shift_experiment, write_csv,
    ConvergenceConfig, CoverageConfig, ShiftConfig,
};
use perfest::output::{calibration_json, true_metrics_json, write_dataset};
use perfest::{parse_input, render_json, windowed_estimates, ConfigEcho, Format, ParsedInput};
use perfest_core::calibration::DEFAULT_ACE_BINS;
use perfest_core::synthesis::{hypersphere_dataset, HypersphereConfig};
use perfest_core::{
    ace, threshold_predictions, true_metrics, EstimationConfig, Method, Metric, PredictionBatch,
};

#[derive(Parser)]
#[command(
    name = "perfest",
    version,
    about = "Estimate classifier performance from calibrated confidence scores"
)]
struct Cli {
    /// Master seed for every randomised command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate metrics per monitoring window without labels.
    Estimate(EstimateArgs),
    /// Compute realised metrics from a labelled file.
    TrueMetrics(InputArgs),
    /// Adaptive expected calibration error of a labelled file.
    Ace {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_ACE_BINS)]
        bins: usize,
    },
    /// Run a simulation study.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Generate synthetic data.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to the file extension (.jsonl/.ndjson, otherwise CSV).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Shortcut,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Shortcut => Method::Shortcut,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Records per window; 0 treats the whole file as one window.
    #[arg(long, default_value_t = 0)]
    window_size: usize,
    /// Comma-separated subset of accuracy, precision, recall, f1.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "accuracy,precision,recall,f1"
    )]
    metrics: Vec<String>,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// HDI level; the interval covers 1 - alpha. Exact method only.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Skip interval computation.
    #[arg(long)]
    no_interval: bool,
    /// Include full metric distributions in the report.
    #[arg(long)]
    emit_distributions: bool,
    /// Re-derive predictions as score >= threshold instead of using the prediction column.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Exact versus shortcut point estimates on beta-distributed scores.
    Convergence {
        #[arg(long, value_delimiter = ',', default_value = "10,50,100,200,500")]
        windows: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// HDI coverage on reverse-sampled labels.
    Coverage {
        #[arg(long, value_delimiter = ',', default_value = "100,300,500")]
        windows: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimation error on the hypersphere data before and after covariate shift.
    Shift {
        #[command(flatten)]
        sphere: SphereArgs,
        #[arg(long, default_value_t = 1000)]
        window_size: usize,
        #[arg(long, default_value_t = 200)]
        windows: usize,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Points around a hypersphere scored by the analytic calibrated classifier.
    Hypersphere {
        #[command(flatten)]
        sphere: SphereArgs,
        /// Swap the easy and hard proportions.
        #[arg(long)]
        shifted: bool,
        /// Append feature columns x0, x1, ...
        #[arg(long)]
        with_features: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SphereArgs {
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long, default_value_t = 3.0)]
    radius: f64,
    /// Decay rate of the label probability; defaults to ln(sqrt(2)).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0.8)]
    easy_fraction: f64,
    #[arg(long, default_value_t = 0.55)]
    outward_probability: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
}

impl SphereArgs {
    fn config(&self, seed: u64) -> HypersphereConfig {
        let defaults = HypersphereConfig::default();
        HypersphereConfig {
            n_dims: self.dims,
            radius: self.radius,
            lambda: self.lambda.unwrap_or(defaults.lambda),
            easy_fraction: self.easy_fraction,
            n_points: self.points,
            outward_probability: self.outward_probability,
            threshold: self.threshold,
            seed,
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn load(args: &InputArgs) -> Result<PredictionBatch> {
    let format = args
        .format
        .unwrap_or_else(|| Format::from_path(&args.input));
    let ParsedInput { batch, warnings } =
        parse_input(&args.input, format).with_context(|| format!("{}", args.input.display()))?;
    for w in warnings {
        eprintln!("warning: {}: {w}", args.input.display());
    }
    if batch.is_empty() {
        bail!("{}: no records", args.input.display());
    }
    Ok(batch)
}

fn estimate(args: &EstimateArgs) -> Result<()> {
    let mut batch = load(&args.input)?;
    if let Some(t) = args.threshold {
        let scores: Vec<f64> = batch.scores().collect();
        let predicted = threshold_predictions(&scores, t);
        batch = batch
            .into_records()
            .into_iter()
            .zip(predicted)
            .map(|(mut r, p)| {
                r.predicted = p;
                r
            })
            .collect();
    }
    let metrics = args
        .metrics
        .iter()
        .map(|name| {
            Metric::from_name(name.trim()).with_context(|| format!("unknown metric {name:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    let method = Method::from(args.method);
    let alpha = (method == Method::Exact && !args.no_interval).then_some(args.alpha);
    let config = EstimationConfig {
        metrics,
        method,
        alpha,
    };
    let window_size = if args.window_size == 0 {
        batch.len()
    } else {
        args.window_size
    };

    let reports = windowed_estimates(&batch, window_size, &config)?;
    let echo = ConfigEcho::new(
        &config,
        args.threshold,
        window_size,
        args.emit_distributions,
    );
    let mut out = open_output(args.input.output.as_deref())?;
    out.write_all(render_json(&reports, &echo)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Estimate(args) => estimate(&args),
        Command::TrueMetrics(args) => {
            let batch = load(&args)?;
            write_json(
                args.output.as_deref(),
                &true_metrics_json(&true_metrics(&batch)?),
            )
        }
        Command::Ace { input, bins } => {
            let batch = load(&input)?;
            write_json(
                input.output.as_deref(),
                &calibration_json(&ace(&batch, bins)?),
            )
        }
        Command::Simulate(SimulateCommand::Convergence {
            windows,
            trials,
            threshold,
            output,
        }) => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let rows = run_convergence_experiment(&ConvergenceConfig {
                window_sizes: windows,
                trials,
                seed,
                threshold,
            });
            write_csv(open_output(output.as_deref())?, &rows)?;
            Ok(())
        }
        Command::Simulate(SimulateCommand::Coverage {
            windows,
            trials,
            alphas,
            threshold,
            output,
        }) => {
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            let config = CoverageConfig {
                window_sizes: windows,
                trials,
                alphas,
                seed,
                threshold,
            };
            let rows = run_coverage_experiment(&config)?;
            write_csv(open_output(output.as_deref())?, &rows)?;
            Ok(())
        }
        Command::Simulate(SimulateCommand::Shift {
            sphere,
            window_size,
            windows,
            method,
            output,
        }) => {
            let config = ShiftConfig {
                dataset: sphere.config(seed),
                window_size,
                windows,
                method: method.into(),
                ace_bins: DEFAULT_ACE_BINS,
            };
            let rows = run_shift_experiment(&config)?;
            write_csv(open_output(output.as_deref())?, &rows)?;
            Ok(())
        }
        Command::Generate(GenerateCommand::Hypersphere {
            sphere,
            shifted,
            with_features,
            format,
            output,
        }) => {
            let mut config = sphere.config(seed);
            if shifted {
                config = config.shifted();
            }
            let data = hypersphere_dataset(&config)?;
            write_dataset(
                open_output(output.as_deref())?,
                &data,
                with_features,
                format,
            )?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
