//! Command-line front end for the certificate library.
//!
//! Data goes to standard output, logs and errors to standard error.
//! Exit codes: 0 on success, 1 when a computation fails or the
//! verification sweep finds a violation, 2 on usage errors (bad flags,
//! malformed config or prior files).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::{env, fs, process};

use clap::{Args, Parser, Subcommand};

use dpipac::bounds::{certify, sweep, sweep_to_csv, BoundRequest, Method};
use dpipac::change_of_measure::{verify_lemmas, VerifyOptions};
use dpipac::divergence::{Prob, MASS_SUM_TOLERANCE};
use dpipac::experiment::{
    coverage_csv, coverage_estimate, budget_table_csv, budget_table, ExperimentConfig,
};

const EXIT_COMPUTATION: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn computation(message: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_COMPUTATION, message: message.to_string() }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "dpipac", version, about = "Generalization-bound certificates from change-of-measure inequalities", max_term_width = 100)]
struct Cli {
    /// Worker threads for parallel sections; 0 picks the CPU count.
    /// Results are byte-identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a population-risk ceiling from one empirical loss.
    Certify(CertifyArgs),
    /// Tabulate bound budgets over sample sizes and orders (CSV).
    Compare(CompareArgs),
    /// Estimate each bound's violation frequency by Monte Carlo (CSV).
    Coverage(ConfigArgs),
    /// Brute-force the change-of-measure bounds and the data-processing
    /// inequality on random instances (JSON report).
    Verify(VerifyArgs),
    /// Tabulate the synthetic study's budget curves (CSV).
    Experiment(ConfigArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Args)]
struct CertifyArgs {
    /// Bound family, e.g. occams_razor or d_alpha.
    #[arg(long, value_parser = parse_method)]
    method: Method,

    /// Training-sample size.
    #[arg(long)]
    n: u64,

    /// Failure probability, in (0, 1].
    #[arg(long)]
    delta: f64,

    /// Observed empirical loss, in [0, 1].
    #[arg(long)]
    empirical_loss: f64,

    /// Prior mass of the certified hypothesis, in (0, 1].
    #[arg(long, conflicts_with = "prior_file")]
    q_mass: Option<f64>,

    /// JSON file mapping hypothesis names to prior masses; the smallest
    /// mass is used unless --hypothesis names one.
    #[arg(long)]
    prior_file: Option<PathBuf>,

    /// Hypothesis name to read from --prior-file.
    #[arg(long, requires = "prior_file")]
    hypothesis: Option<String>,

    /// Divergence order; required for d_alpha and hellinger_p.
    #[arg(long)]
    order: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Sample sizes to tabulate.
    #[arg(long, value_delimiter = ',', default_values_t = [100, 200, 400, 800, 1600])]
    n_values: Vec<u64>,

    /// Failure probability, in (0, 1].
    #[arg(long, default_value_t = 0.025)]
    delta: f64,

    /// Smallest prior mass, in (0, 1].
    #[arg(long, default_value_t = 0.02)]
    q_min: f64,

    /// Divergence orders for the parametrized families.
    #[arg(long, value_delimiter = ',', default_values_t = [10.0, 1e3, 1e7])]
    orders: Vec<f64>,

    /// Bound families to include.
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_method,
        default_values_t = [
            Method::OccamsRazor,
            Method::PacBayesPointMass,
            Method::ChiSquared,
            Method::DAlpha,
            Method::HellingerP,
        ]
    )]
    methods: Vec<Method>,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON config file; missing keys fall back to the built-in
    /// defaults, unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed; overrides DPIPAC_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,

    /// Trial count; overrides the config file.
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random instances to draw.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,

    /// Largest support size for the sampled distributions (at least 2).
    #[arg(long, default_value_t = 6)]
    max_support: usize,

    /// Master seed; overrides DPIPAC_SEED.
    #[arg(long)]
    seed: Option<u64>,

    /// Divergence orders to exercise.
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 2.0, 5.0, 10.0, 100.0])]
    orders: Vec<f64>,

    /// Tighten every bound by this much before checking; a positive
    /// value must produce violations, which exercises the failure path.
    #[arg(long, default_value_t = 0.0, hide = true)]
    inject_slack: f64,
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("warning: could not configure {} threads: {e}", cli.threads);
        }
    }
    let result = match cli.command {
        Command::Certify(args) => cmd_certify(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        process::exit(e.code);
    }
}

/// Seed precedence: explicit flag, then the DPIPAC_SEED environment
/// variable, then whatever the caller falls back to.
fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match env::var("DPIPAC_SEED") {
        Ok(text) => text.trim().parse().map(Some).map_err(|_| {
            CliError::usage(format!("DPIPAC_SEED must be an unsigned integer, got {text:?}"))
        }),
        Err(env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::usage(format!("DPIPAC_SEED is not readable: {e}"))),
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        None => ExperimentConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::usage(format!("config {}: {e}", path.display()))
            })?
        }
    };
    if let Some(seed) = resolve_seed(args.seed)? {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    config.validate().map_err(|e| CliError::usage(format!("config: {e}")))?;
    Ok(config)
}

/// Reads a prior file: a JSON object of strictly positive masses
/// summing to one. Returns the named hypothesis's mass, or the smallest
/// mass when no name is given.
fn prior_mass(path: &Path, hypothesis: Option<&str>) -> Result<f64, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read prior file {}: {e}", path.display())))?;
    let entries: BTreeMap<String, f64> = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("prior file {}: {e}", path.display())))?;
    if entries.is_empty() {
        return Err(CliError::usage("prior file is empty"));
    }
    for (name, &mass) in &entries {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(CliError::usage(format!(
                "prior mass for {name:?} must be positive and finite, got {mass}"
            )));
        }
    }
    let total: f64 = entries.values().sum();
    if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
        return Err(CliError::usage(format!("prior masses sum to {total}, expected 1")));
    }
    match hypothesis {
        Some(name) => entries.get(name).copied().ok_or_else(|| {
            CliError::usage(format!("hypothesis {name:?} not found in the prior file"))
        }),
        None => Ok(entries.values().copied().fold(f64::INFINITY, f64::min)),
    }
}

fn cmd_certify(args: CertifyArgs) -> CliResult {
    if args.method.requires_order() && args.order.is_none() {
        return Err(CliError::usage(format!("method {} requires --order", args.method)));
    }
    // clap waives `requires = "prior_file"` when --q-mass is present
    // (the required flag conflicts with a used one); catch it here so
    // --hypothesis is never silently ignored.
    if args.hypothesis.is_some() && args.prior_file.is_none() {
        return Err(CliError::usage(
            "--hypothesis only selects an entry of --prior-file".to_string(),
        ));
    }
    let q_mass = match (args.q_mass, &args.prior_file) {
        (Some(q), None) => q,
        (None, Some(path)) => prior_mass(path, args.hypothesis.as_deref())?,
        (None, None) if args.method.uses_prior_mass() => {
            return Err(CliError::usage(format!(
                "method {} needs a prior: pass --q-mass or --prior-file",
                args.method
            )));
        }
        // test_set ignores the prior; any valid placeholder works
        (None, None) => 1.0,
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let empirical = Prob::new(args.empirical_loss).map_err(CliError::computation)?;
    let request = BoundRequest::new(args.method, args.n, args.delta, q_mass, args.order)
        .map_err(CliError::computation)?;
    let certificate = certify(&request, empirical).map_err(CliError::computation)?;
    let json = serde_json::to_string_pretty(&certificate).map_err(CliError::computation)?;
    println!("{json}");
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> CliResult {
    let rows = sweep(&args.methods, &args.n_values, args.delta, args.q_min, &args.orders)
        .map_err(|e| CliError::usage(e.to_string()))?;
    print!("{}", sweep_to_csv(&rows));
    Ok(())
}

fn cmd_coverage(args: ConfigArgs) -> CliResult {
    let config = load_config(&args)?;
    eprintln!(
        "coverage: {} trials per n over {:?}, {} hypotheses, seed {}",
        config.trials, config.n_values, config.hypothesis_count, config.seed
    );
    let rows = coverage_estimate(&config).map_err(CliError::computation)?;
    print!("{}", coverage_csv(&rows));
    Ok(())
}

fn cmd_experiment(args: ConfigArgs) -> CliResult {
    let config = load_config(&args)?;
    let rows = budget_table(&config).map_err(CliError::computation)?;
    print!("{}", budget_table_csv(&rows));
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let options = VerifyOptions {
        trials: args.trials,
        max_support: args.max_support,
        seed: resolve_seed(args.seed)?.unwrap_or(0),
        orders: args.orders,
        bound_offset: args.inject_slack,
    };
    let report = verify_lemmas(&options).map_err(CliError::computation)?;
    let json = serde_json::to_string_pretty(&report).map_err(CliError::computation)?;
    println!("{json}");
    if report.violations > 0 {
        return Err(CliError::computation(format!(
            "{} of {} checks violated a bound",
            report.violations, report.applicable
        )));
    }
    eprintln!("verified {} checks across {} trials, max slack {:.3e}",
        report.applicable, report.trials, report.max_slack_observed);
    Ok(())
}
