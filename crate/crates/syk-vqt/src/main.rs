//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 config error, 2 compute error, 3 partial
//! failure (all outputs written, but some points missed the fidelity
//! target or did not converge).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use syk_vqt::config::{self, load_file_config, load_resolved_config, FileConfig, Overrides, OutputFormat, RunConfig};
use syk_vqt::engine::{resource_report, run_ensemble, OptimizerKind};
use syk_vqt::output::{self, read_records_json_lines};
use syk_vqt::syk::{sample_instance, SykMode};
use syk_vqt::tfd::{tfd_fidelity_map, HbConvention};

#[derive(Parser)]
#[command(name = "syk-vqt", version, about = "Thermal-state preparation for the SYK model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the two-circuit free-energy minimization over a disorder ensemble.
    Thermal(ThermalArgs),
    /// Scan thermofield-double fidelity over a (mu, T) grid.
    Tfd(TfdArgs),
    /// Summarize layer/parameter/CNOT usage from an emitted records file.
    Resources(ResourcesArgs),
    /// Re-run an emitted resolved config and reproduce its records.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Majorana fermion count N (even, >= 4)
    #[arg(long = "N", visible_alias = "n-majorana")]
    n_majorana: Option<usize>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SykMode>,
    /// Disorder strength J
    #[arg(long = "J")]
    j_strength: Option<f64>,
    /// Sparse connectivity k (sparse mode only; defaults to 8.7)
    #[arg(long = "k")]
    k_connectivity: Option<f64>,
    /// Master disorder seed
    #[arg(long)]
    seed: Option<u64>,
    /// Config file (JSON); flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (relative paths resolve under $SYK_VQT_OUT_ROOT)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ThermalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of disorder realizations
    #[arg(long)]
    instances: Option<usize>,
    /// Comma-separated beta grid (default 1..35 in 9 steps)
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long)]
    target_fidelity: Option<f64>,
    #[arg(long)]
    max_layers: Option<usize>,
    #[arg(long, value_parser = parse_optimizer)]
    optimizer: Option<OptimizerKind>,
    #[arg(long)]
    loss_tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Seed for parameter initialization (independent of disorder seed)
    #[arg(long)]
    init_seed: Option<u64>,
    /// Emulate finite measurement shots for the probability readout
    #[arg(long)]
    shots: Option<usize>,
    /// Stop early once fidelity reaches target, checking every K iterations
    #[arg(long, value_name = "K")]
    fidelity_check_every: Option<usize>,
    /// Warm-start each beta from the previous one's parameters
    #[arg(long)]
    warm_start: bool,
}

#[derive(Args)]
struct TfdArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    mu_min: Option<f64>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long)]
    mu_steps: Option<usize>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_steps: Option<usize>,
    /// H_B sign convention: same | sign-flipped
    #[arg(long, value_parser = parse_convention)]
    convention: Option<HbConvention>,
}

#[derive(Args)]
struct ResourcesArgs {
    /// Records file in JSON-lines format (records.jsonl from a thermal run)
    #[arg(long)]
    records: PathBuf,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// A config.resolved.json emitted by a previous run
    #[arg(long)]
    config: PathBuf,
    /// Output directory override (defaults to the recorded one)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<SykMode, String> {
    match s {
        "dense" => Ok(SykMode::Dense),
        "sparse" => Ok(SykMode::Sparse),
        other => Err(format!("unknown mode '{other}' (expected dense|sparse)")),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json-lines" => Ok(OutputFormat::JsonLines),
        other => Err(format!("unknown format '{other}' (expected csv|json-lines)")),
    }
}

fn parse_optimizer(s: &str) -> Result<OptimizerKind, String> {
    match s {
        "quasi-newton" => Ok(OptimizerKind::QuasiNewton),
        "nelder-mead" => Ok(OptimizerKind::NelderMead),
        other => Err(format!("unknown optimizer '{other}' (expected quasi-newton|nelder-mead)")),
    }
}

fn parse_convention(s: &str) -> Result<HbConvention, String> {
    match s {
        "same" => Ok(HbConvention::Same),
        "sign-flipped" => Ok(HbConvention::SignFlipped),
        other => Err(format!("unknown convention '{other}' (expected same|sign-flipped)")),
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type CliResult = Result<u8, (u8, String)>;

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Thermal(args) => {
            let config = thermal_config(&args)?;
            run_thermal(&config)
        }
        Command::Tfd(args) => {
            let config = tfd_config(&args)?;
            run_tfd(&config)
        }
        Command::Resources(args) => run_resources(&args),
        Command::Replay(args) => {
            let mut config = load_resolved_config(&args.config).map_err(cfg_err)?;
            if let Some(out) = args.out {
                config.out_dir = out;
            }
            config.validate().map_err(cfg_err)?;
            match config.subcommand.as_str() {
                "thermal" => run_thermal(&config),
                "tfd" => run_tfd(&config),
                other => Err((EXIT_CONFIG, format!("cannot replay subcommand '{other}'"))),
            }
        }
    }
}

fn cfg_err(e: syk_vqt::Error) -> (u8, String) {
    (EXIT_CONFIG, e.to_string())
}

fn compute_err(e: syk_vqt::Error) -> (u8, String) {
    (EXIT_COMPUTE, e.to_string())
}

fn file_config(common: &CommonArgs) -> Result<FileConfig, (u8, String)> {
    match &common.config {
        Some(path) => load_file_config(path).map_err(cfg_err),
        None => Ok(FileConfig::default()),
    }
}

fn common_overrides(common: &CommonArgs) -> Overrides {
    Overrides {
        n_majorana: common.n_majorana,
        mode: common.mode,
        j_strength: common.j_strength,
        k_connectivity: common.k_connectivity,
        seed: common.seed,
        out_dir: common.out.clone(),
        format: common.format,
        workers: common.workers,
        ..Default::default()
    }
}

fn thermal_config(args: &ThermalArgs) -> Result<RunConfig, (u8, String)> {
    let file = file_config(&args.common)?;
    let mut flags = common_overrides(&args.common);
    flags.n_instances = args.instances;
    flags.betas = args.betas.clone();
    flags.target_fidelity = args.target_fidelity;
    flags.max_layers = args.max_layers;
    flags.optimizer = args.optimizer;
    flags.loss_tolerance = args.loss_tolerance;
    flags.max_iterations = args.max_iterations;
    flags.init_seed = args.init_seed;
    flags.shots = args.shots;
    flags.fidelity_check_every = args.fidelity_check_every;
    if args.warm_start {
        flags.warm_start = Some(true);
    }
    config::resolve("thermal", file, flags).map_err(cfg_err)
}

fn tfd_config(args: &TfdArgs) -> Result<RunConfig, (u8, String)> {
    let file = file_config(&args.common)?;
    let mut flags = common_overrides(&args.common);
    flags.mu_min = args.mu_min;
    flags.mu_max = args.mu_max;
    flags.mu_steps = args.mu_steps;
    flags.t_min = args.t_min;
    flags.t_max = args.t_max;
    flags.t_steps = args.t_steps;
    flags.convention = args.convention;
    config::resolve("tfd", file, flags).map_err(cfg_err)
}

fn run_thermal(config: &RunConfig) -> CliResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| (EXIT_COMPUTE, e.to_string()))?;
    let report = pool
        .install(|| run_ensemble(&config.syk_params(), config.n_instances, &config.vqt))
        .map_err(compute_err)?;
    output::write_thermal_outputs(config, &report).map_err(compute_err)?;
    let dir = config.resolved_out_dir();
    let below: usize =
        report.points.iter().filter(|p| p.result.fidelity < config.vqt.target_fidelity).count();
    println!(
        "{} records -> {} ({} below target fidelity, {} failed)",
        report.points.len(),
        dir.display(),
        below,
        report.failures.len()
    );
    if !report.failures.is_empty() || below > 0 {
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn run_tfd(config: &RunConfig) -> CliResult {
    let inst = sample_instance(&config.syk_params()).map_err(compute_err)?;
    let map = tfd_fidelity_map(&inst, &config.tfd.mu_grid(), &config.tfd.beta_grid(), config.tfd.convention)
        .map_err(compute_err)?;
    output::write_tfd_outputs(config, &map).map_err(compute_err)?;
    println!(
        "{} grid points -> {} ({} mu values with degenerate TFD ground state)",
        map.points.len(),
        config.resolved_out_dir().display(),
        map.degenerate_mus.len()
    );
    Ok(0)
}

fn run_resources(args: &ResourcesArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.records)
        .map_err(|e| (EXIT_CONFIG, format!("{}: {e}", args.records.display())))?;
    let points = read_records_json_lines(&text).map_err(cfg_err)?;
    let table = resource_report(&points).map_err(compute_err)?;
    match &args.out {
        Some(path) => std::fs::write(path, &table).map_err(|e| (EXIT_COMPUTE, e.to_string()))?,
        None => print!("{table}"),
    }
    Ok(0)
}
