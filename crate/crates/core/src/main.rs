use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use median_core::generate::{generate, InstanceKind, InstanceSpec};
use median_core::harness::{
    bench, h_from_epsilon, run_report, write_csv, write_report, BenchConfig, BenchSummary,
};
use median_core::{validate_metric, Error, MetricSpace};

const EXIT_CLAIM: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "median",
    version,
    about = "Nonadaptive approximate metric 1-median"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random metric instance file.
    Gen(GenArgs),
    /// Run the algorithm on an instance file.
    Run(RunArgs),
    /// Sweep generated instances and write a CSV table.
    Bench(BenchArgs),
    /// Check an instance file against the metric axioms.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: InstanceKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge probability for graph instances.
    #[arg(long)]
    density: Option<f64>,
    /// Perturbation amplitude for perturbed-uniform instances.
    #[arg(long, default_value_t = 0.9)]
    amplitude: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("depth").required(true).args(["h", "h_from_epsilon"])))]
struct RunArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    h: Option<u32>,
    /// Set h = max(2, round((E/2) log2 n)).
    #[arg(long, value_name = "E")]
    h_from_epsilon: Option<f64>,
    /// Also compute the exact optimum and the ratio.
    #[arg(long)]
    exact: bool,
    /// Also count queries of the d_tilde baseline.
    #[arg(long)]
    tilde: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    h_list: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "euclidean,graph,perturbed-uniform"
    )]
    kinds: Vec<InstanceKind>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add the d_tilde query count (n <= 4096 only).
    #[arg(long)]
    tilde: bool,
    /// Skip the exact oracle above this n.
    #[arg(long, default_value_t = 8192)]
    exact_max_n: usize,
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if let Error::InvalidMetric(violations) = &err {
                for v in violations {
                    eprintln!("  {v}");
                }
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn load_valid(path: &std::path::Path) -> Result<MetricSpace, Error> {
    let metric = MetricSpace::load(path)?;
    let violations = validate_metric(&metric);
    if violations.is_empty() {
        Ok(metric)
    } else {
        Err(Error::InvalidMetric(violations))
    }
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let spec = InstanceSpec {
        kind: args.kind,
        n: args.n,
        seed: args.seed,
        dim: args.dim,
        density: args.density,
        amplitude: args.amplitude,
    };
    let metric = generate(&spec)?;
    metric.save(&args.out)?;
    println!("{} n={}", args.out.display(), metric.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let metric = load_valid(&args.input)?;
    let h = match (args.h, args.h_from_epsilon) {
        (Some(h), _) => h as usize,
        (None, Some(eps)) => h_from_epsilon(eps, metric.len()),
        (None, None) => unreachable!("clap enforces the depth group"),
    };
    let report = run_report(&metric, h, args.exact, args.tilde)?;
    if let Some(out) = &args.out {
        write_report(out, &report)?;
    }
    println!("{}", report.summary_line());
    let violations = report.violations();
    if violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in violations {
            eprintln!("claim violated: {v}");
        }
        Ok(ExitCode::from(EXIT_CLAIM))
    }
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let config = BenchConfig {
        n_list: args.n_list,
        h_list: args.h_list,
        kinds: args.kinds,
        trials: args.trials,
        seed: args.seed,
        tilde: args.tilde,
        exact_max_n: args.exact_max_n,
    };
    let rows = bench(&config)?;
    write_csv(&args.csv, &rows)?;
    let summary = BenchSummary::from_rows(&rows);
    println!("{} rows -> {}", rows.len(), args.csv.display());
    print!("{}", summary.render());
    if summary.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_CLAIM))
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, Error> {
    let metric = MetricSpace::load(&args.input)?;
    let violations = validate_metric(&metric);
    if violations.is_empty() {
        println!("ok");
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &violations {
            println!("{v}");
        }
        Ok(ExitCode::from(EXIT_CLAIM))
    }
}
