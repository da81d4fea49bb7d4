use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fivenum::convert::{self, ConvertMethod, Scenario};
use fivenum::estimators::{
    approx_j, approx_optimal_weight, coefficient_table, normalization_constants, render_table_csv,
    render_table_text, Method,
};
use fivenum::order_stats::{j_of_n, MomentCache, MomentMethod, SampleSizeQ};
use fivenum::power_law::{fit_power_law_with, PowerLawOptions};
use fivenum::render::sig9;
use fivenum::simulation::{
    histogram_scenario, render_histogram_csv, render_rmse_csv, run_rmse, DistributionSpec,
    SdDivisor, SimulationConfig, SummaryConvention, DEFAULT_GRID,
};

#[derive(Parser)]
#[command(
    name = "fivenum",
    version,
    about = "Mean and SD estimates from five-number summaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert study summaries (CSV) to mean and SD estimates.
    Convert(ConvertArgs),
    /// Print the θ1/θ2 coefficient table for n = 4Q+1.
    Table(TableArgs),
    /// Print optimal weights on the range component.
    Weights(WeightsArgs),
    /// Run the RMSE comparison or a histogram scenario.
    Simulate(SimulateArgs),
    /// Fit J(n) ≈ c1 n^c2 over exact J values for Q = 1..q_max.
    Fit(FitArgs),
}

#[derive(Args)]
struct ConvertArgs {
    /// Input CSV; `-` reads standard input.
    #[arg(long, short, default_value = "-")]
    input: String,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "auto", value_parser = parse_convert_method)]
    method: ConvertMethod,
    /// Force S1, S2 or S3 instead of detecting it from the present cells.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Error sidecar CSV; errors go to standard error when omitted.
    #[arg(long)]
    errors: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 60)]
    q_max: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WeightMode {
    Approx,
    Exact,
}

#[derive(Args)]
struct WeightsArgs {
    /// Comma-separated sample sizes.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n_list: Vec<u64>,
    #[arg(long, value_enum, default_value = "approx")]
    mode: WeightMode,
    #[command(flatten)]
    moments: MomentArgs,
}

#[derive(Args)]
struct MomentArgs {
    /// Absolute tolerance of each quadrature.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Moment cache file, created if missing.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// ranks_4q1 for n = 4Q+1, interpolated otherwise.
    Auto,
    #[value(name = "ranks_4q1")]
    Ranks4q1,
    Interpolated,
}

#[derive(Args)]
struct SimulateArgs {
    /// Write the histogram scenario instead of the RMSE comparison.
    #[arg(long, requires = "n", conflicts_with_all = ["dist", "grid", "pair", "divisor", "convention"])]
    histogram: bool,
    /// Sample size of the histogram scenario.
    #[arg(long, requires = "histogram")]
    n: Option<u64>,
    /// normal:MU,SIGMA | lognormal:LOC,SCALE | chisq:DF | beta:A,B | weibull:SHAPE,SCALE
    #[arg(long, default_value = "normal:50,17", value_parser = parse_dist)]
    dist: DistributionSpec,
    /// `default` or comma-separated sample sizes.
    #[arg(long, default_value = "default")]
    grid: String,
    /// Repetitions; 200000 for normal data, 100000 otherwise, 10000 for histograms.
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long, env = "FIVENUM_SEED", default_value_t = 1)]
    seed: u64,
    /// Existing and new estimator labels.
    #[arg(long, default_value = "wan_sd_s3,shi_sd")]
    pair: String,
    /// Divisor of the full-sample SD: n-1 or n.
    #[arg(long, default_value = "n-1", value_parser = parse_divisor)]
    divisor: SdDivisor,
    #[arg(long, value_enum, default_value = "auto")]
    convention: ConventionArg,
    /// Output CSV; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value_t = 100)]
    q_max: u64,
    /// Fit an additive constant c0 as well.
    #[arg(long)]
    intercept: bool,
    #[command(flatten)]
    moments: MomentArgs,
}

fn parse_convert_method(s: &str) -> Result<ConvertMethod, String> {
    s.parse().map_err(|e: fivenum::Error| e.to_string())
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: fivenum::Error| e.to_string())
}

fn parse_dist(s: &str) -> Result<DistributionSpec, String> {
    s.parse().map_err(|e: fivenum::Error| e.to_string())
}

fn parse_divisor(s: &str) -> Result<SdDivisor, String> {
    s.parse().map_err(|e: fivenum::Error| e.to_string())
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// `Ok(true)` when every row converted.
fn run_convert(args: ConvertArgs) -> anyhow::Result<bool> {
    let input: Box<dyn Read> = if args.input == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(File::open(&args.input).with_context(|| format!("opening {}", args.input))?)
    };
    let outcome = convert::convert_csv(input, args.method, args.scenario)?;
    write_output(args.output.as_deref(), &convert::render_rows(&outcome.rows))?;
    let errors = convert::render_errors(&outcome.errors);
    match &args.errors {
        Some(p) => std::fs::write(p, errors).with_context(|| format!("writing {}", p.display()))?,
        None if !outcome.errors.is_empty() => eprint!("{errors}"),
        None => {}
    }
    Ok(outcome.errors.is_empty())
}

fn run_table(args: TableArgs) -> anyhow::Result<bool> {
    let rows = coefficient_table(args.q_max)?;
    let text = match args.format {
        TableFormat::Text => render_table_text(&rows),
        TableFormat::Csv => render_table_csv(&rows),
    };
    write_output(None, &text)?;
    Ok(true)
}

fn open_cache(args: &MomentArgs) -> anyhow::Result<MomentCache> {
    Ok(match &args.cache {
        Some(p) => MomentCache::open(p)?,
        None => MomentCache::in_memory(),
    })
}

fn exact_j(cache: &mut MomentCache, method: &MomentMethod, n: u64) -> fivenum::Result<f64> {
    let size = SampleSizeQ::from_n(n)?;
    let moments = cache.get_or_compute(size, method)?;
    j_of_n(&moments, &normalization_constants(n)?)
}

fn run_weights(args: WeightsArgs) -> anyhow::Result<bool> {
    let method = MomentMethod::Quadrature {
        abs_tol: args.moments.tol,
    };
    let mut cache = open_cache(&args.moments)?;
    let mut out = String::from("n,w,J,mode\n");
    let mut ok = true;
    for &n in &args.n_list {
        let row = match args.mode {
            WeightMode::Approx => approx_optimal_weight(n).map(|w| (w, approx_j(n), "approx")),
            WeightMode::Exact => {
                exact_j(&mut cache, &method, n).map(|j| (1.0 / (1.0 + j), j, "exact"))
            }
        };
        match row {
            Ok((w, j, mode)) => out.push_str(&format!("{n},{},{},{mode}\n", sig9(w), sig9(j))),
            Err(e) => {
                ok = false;
                eprintln!("n = {n}: {e}");
            }
        }
    }
    cache.save()?;
    write_output(None, &out)?;
    Ok(ok)
}

fn parse_grid(text: &str) -> anyhow::Result<Vec<u64>> {
    if text == "default" {
        return Ok(DEFAULT_GRID.to_vec());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .with_context(|| format!("bad grid entry {s:?}"))
        })
        .collect()
}

fn parse_pair(text: &str) -> anyhow::Result<(Method, Method)> {
    let Some((a, b)) = text.split_once(',') else {
        bail!("--pair expects two comma-separated estimator labels");
    };
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn run_simulate(args: SimulateArgs) -> anyhow::Result<bool> {
    let text = if args.histogram {
        let n = args.n.context("--histogram needs --n")?;
        let h = histogram_scenario(n, args.reps.unwrap_or(10_000), args.seed)?;
        render_histogram_csv(&h)
    } else {
        let base = SimulationConfig::new(args.dist, args.seed);
        let config = SimulationConfig {
            n_grid: parse_grid(&args.grid)?,
            reps: args.reps.unwrap_or(base.reps),
            estimator_pair: parse_pair(&args.pair)?,
            sd_divisor: args.divisor,
            convention: match args.convention {
                ConventionArg::Auto => None,
                ConventionArg::Ranks4q1 => Some(SummaryConvention::Ranks4Q1),
                ConventionArg::Interpolated => Some(SummaryConvention::Interpolated),
            },
            ..base
        };
        render_rmse_csv(&run_rmse(&config)?)
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(true)
}

fn run_fit(args: FitArgs) -> anyhow::Result<bool> {
    if args.q_max < 10 {
        bail!("--q-max must be at least 10");
    }
    let method = MomentMethod::Quadrature {
        abs_tol: args.moments.tol,
    };
    let mut cache = open_cache(&args.moments)?;
    let mut points = Vec::with_capacity(args.q_max as usize);
    for q in 1..=args.q_max {
        let n = 4 * q + 1;
        points.push((n as f64, exact_j(&mut cache, &method, n)?));
    }
    cache.save()?;
    let fit = fit_power_law_with(
        &points,
        PowerLawOptions {
            fit_intercept: args.intercept,
        },
    )?;
    let text = format!(
        "c0,c1,c2,residual,loglog_c1,loglog_c2\n{},{},{},{},{},{}\n",
        sig9(fit.c0),
        sig9(fit.c1),
        sig9(fit.c2),
        sig9(fit.residual),
        sig9(fit.log_linear.0),
        sig9(fit.log_linear.1)
    );
    write_output(None, &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert(a) => run_convert(a),
        Command::Table(a) => run_table(a),
        Command::Weights(a) => run_weights(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Fit(a) => run_fit(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
