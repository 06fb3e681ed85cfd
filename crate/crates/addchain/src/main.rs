//! Command-line front end: genetic chain search, exact lengths, classic
//! baselines, chain validation, modular exponentiation, and reproductions of
//! the benchmark tables.
//!
//! All results go to stdout; diagnostics go to stderr. Lines starting with
//! `#` are metadata, so any printed chain can be piped straight back in as a
//! chain file. Exit codes: 0 success (or valid chain), 1 invalid input or
//! failed validation, 2 internal error.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use addchain::bench::{
    self, Accumulated, BenchError, Method, Report, ReportFormat, ReportRow, SingleRun,
    REFERENCE_CHAINS,
};
use addchain::{
    binary_chain, evolve, mary_chain, optimal_table, oracle, parse_chain_text, validate_chain,
    AdditionChain, Exponent, GaConfig, ModContext, Radix,
};

/// Prints a result line, exiting quietly if the reader closed the pipe.
macro_rules! say {
    ($($arg:tt)*) => {
        if let Err(err) = writeln!(io::stdout(), $($arg)*) {
            if err.kind() == io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            eprintln!("error: cannot write to stdout: {err}");
            std::process::exit(2);
        }
    };
}

fn main() -> ExitCode {
    ExitCode::from(run())
}

fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land on stdout and succeed; anything
            // else is a usage error on stderr.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Ga(args) => cmd_ga(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Modexp(args) => cmd_modexp(args),
    }
}

/// A command failure: bad input exits 1, an internal fault exits 2.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) | Failure::Internal(msg) => f.write_str(msg),
        }
    }
}

fn input(err: impl fmt::Display) -> Failure {
    Failure::Input(err.to_string())
}

fn internal(err: impl fmt::Display) -> Failure {
    Failure::Internal(err.to_string())
}

fn bench_failure(err: BenchError) -> Failure {
    match err {
        BenchError::Io(_) | BenchError::EmptyReport => internal(err),
        _ => input(err),
    }
}

#[derive(Parser)]
#[command(
    name = "addchain",
    version,
    about = "Short addition chains for fast modular exponentiation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a short addition chain with the genetic algorithm
    Ga(GaArgs),
    /// Exact minimal chain lengths by exhaustive search
    Oracle(OracleArgs),
    /// Classic binary / m-ary chains
    Baseline(BaselineArgs),
    /// Reproduce the benchmark tables
    Bench(BenchArgs),
    /// Check a chain file against an exponent
    Validate(ValidateArgs),
    /// Run a chain as a modular exponentiation program
    Modexp(ModexpArgs),
}

#[derive(Args)]
struct GaArgs {
    /// Target exponent for a single search
    #[arg(long, required_unless_present = "range_max", conflicts_with = "range_max")]
    exponent: Option<u64>,
    /// Accumulate chain lengths for every exponent in [1, RANGE_MAX]
    #[arg(long, value_name = "RANGE_MAX")]
    range_max: Option<u64>,
    /// Independent runs when accumulating over a range
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Search parameters as flat `key = value` lines; flags override the file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: GaOverrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Exponent to solve exactly (may take long beyond ~2^20)
    #[arg(long, required_unless_present = "limit", conflicts_with = "limit")]
    exponent: Option<u64>,
    /// Accumulate exact lengths for every exponent in [1, LIMIT]
    #[arg(long)]
    limit: Option<u64>,
    /// Cache file for the exact-length table (created if absent)
    #[arg(long, value_name = "PATH")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    /// Chain construction method
    #[arg(long, value_enum)]
    method: BaselineMethod,
    /// Radix for the m-ary method (a power of two, at least 2)
    #[arg(long, default_value_t = 4)]
    radix: u64,
    /// Target exponent
    #[arg(long)]
    exponent: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineMethod {
    Binary,
    Mary,
}

#[derive(Args)]
struct BenchArgs {
    /// Which table to reproduce
    #[arg(value_enum)]
    table: Table,
    /// ci shrinks ranges, runs, and generations to CI budgets
    #[arg(long, value_enum, default_value_t = Scale::Ci)]
    scale: Scale,
    /// Thread cap for parallel sections (defaults to all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Cache file for the exact-length table (table1 only)
    #[arg(long, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// Search parameters as flat `key = value` lines; flags override the file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: GaOverrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    Table1,
    Table2,
    Table3,
    Table4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Ci,
    Paper,
}

#[derive(Args)]
struct ValidateArgs {
    /// Chain file: whitespace-separated values, `#` comments ignored
    #[arg(long, value_name = "CHAIN")]
    file: PathBuf,
    /// Exponent the chain must reach
    #[arg(long)]
    exponent: u64,
}

#[derive(Args)]
struct ModexpArgs {
    /// Chain file: whitespace-separated values, `#` comments ignored
    #[arg(long, value_name = "CHAIN")]
    file: PathBuf,
    /// Base of the exponentiation (decimal, arbitrary precision)
    #[arg(long)]
    base: String,
    /// Modulus (decimal, arbitrary precision, at least 2)
    #[arg(long = "mod", value_name = "N")]
    modulus: String,
}

/// Per-field overrides applied on top of the config file.
#[derive(Args, Default)]
struct GaOverrides {
    /// Chromosomes per generation
    #[arg(long, help_heading = "Search parameters")]
    population_size: Option<usize>,
    /// Breeding generation cap per search
    #[arg(long, help_heading = "Search parameters")]
    max_generations: Option<usize>,
    /// Roulette weight of single-point crossover
    #[arg(long, help_heading = "Search parameters")]
    p_single: Option<f64>,
    /// Roulette weight of two-point crossover
    #[arg(long, help_heading = "Search parameters")]
    p_two: Option<f64>,
    /// Roulette weight of uniform crossover
    #[arg(long, help_heading = "Search parameters")]
    p_uniform: Option<f64>,
    /// Probability that a selected pair is crossed at all
    #[arg(long, help_heading = "Search parameters")]
    crossover_rate: Option<f64>,
    /// Probability that a child is mutated at all
    #[arg(long, help_heading = "Search parameters")]
    mutation_rate: Option<f64>,
    /// Mutants bred per mutation; the best one survives
    #[arg(long, help_heading = "Search parameters")]
    n_mutants: Option<usize>,
    /// Gene generation: probability of doubling the last element
    #[arg(long, help_heading = "Search parameters")]
    p_double: Option<f64>,
    /// Gene generation: probability of adding the last two elements
    #[arg(long, help_heading = "Search parameters")]
    p_add: Option<f64>,
    /// Gene generation: probability of adding a random earlier element
    #[arg(long, help_heading = "Search parameters")]
    p_random: Option<f64>,
    /// Stop as soon as a chain meets the length lower bound
    #[arg(long, help_heading = "Search parameters")]
    early_stop_at_lower_bound: Option<bool>,
    /// Keep the parent when every mutant is worse
    #[arg(long, help_heading = "Search parameters")]
    elitist_mutation: Option<bool>,
    /// Seed for the deterministic random stream
    #[arg(long, help_heading = "Search parameters")]
    seed: Option<u64>,
}

impl GaOverrides {
    fn apply(&self, config: &mut GaConfig) {
        macro_rules! put {
            ($field:ident) => {
                if let Some(value) = self.$field {
                    config.$field = value;
                }
            };
        }
        put!(population_size);
        put!(max_generations);
        put!(p_single);
        put!(p_two);
        put!(p_uniform);
        put!(crossover_rate);
        put!(mutation_rate);
        put!(n_mutants);
        put!(p_double);
        put!(p_add);
        put!(p_random);
        put!(early_stop_at_lower_bound);
        put!(elitist_mutation);
        put!(seed);
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write a machine-readable report here
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Report format for --out
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(format: FormatArg) -> ReportFormat {
        match format {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

fn parse_exponent(raw: u64) -> Result<Exponent, Failure> {
    Exponent::new(raw).map_err(input)
}

/// Default config plus the optional `key = value` file.
fn load_config(path: Option<&Path>) -> Result<GaConfig, Failure> {
    let mut config = GaConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path)
            .map_err(|err| input(format!("cannot read config file {}: {err}", path.display())))?;
        config
            .apply_file_text(&text)
            .map_err(|err| input(format!("config file {}: {err}", path.display())))?;
    }
    Ok(config)
}

/// Applies flag overrides and validates the final parameters.
fn finish_config(mut config: GaConfig, overrides: &GaOverrides) -> Result<GaConfig, Failure> {
    overrides.apply(&mut config);
    config.validate().map_err(input)?;
    Ok(config)
}

fn read_chain_file(path: &Path) -> Result<Vec<u64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|err| input(format!("cannot read chain file {}: {err}", path.display())))?;
    parse_chain_text(&text).map_err(|err| input(format!("chain file {}: {err}", path.display())))
}

fn save_report(
    output: &OutputArgs,
    config: &GaConfig,
    rows: Vec<ReportRow>,
) -> Result<(), Failure> {
    let Some(path) = &output.out else {
        return Ok(());
    };
    let report = Report::new(config.seed, config, rows);
    bench::write_report(&report, output.format.into(), path).map_err(internal)
}

fn join_u64s(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_ga(args: GaArgs) -> Result<u8, Failure> {
    let config = finish_config(load_config(args.config.as_deref())?, &args.overrides)?;
    match (args.exponent, args.range_max) {
        (Some(raw), None) => {
            let exponent = parse_exponent(raw)?;
            let result = evolve(exponent, &config).map_err(input)?;
            say!("# command ga");
            say!("# exponent {exponent}");
            say!("# seed {}", config.seed);
            say!("# length {}", result.length);
            say!("# generations {}", result.generations_run);
            say!("# evaluations {}", result.evaluations);
            say!("{}", result.best.chain());
            let row = ReportRow::SingleRun(SingleRun {
                exponent: raw,
                best_length: result.length.additions(),
                best_chain: result.best.chain().values().to_vec(),
                seeds: vec![config.seed],
            });
            save_report(&args.output, &config, vec![row])?;
        }
        (None, Some(raw)) => {
            let range_max = parse_exponent(raw)?;
            if args.runs < 1 {
                return Err(input("--runs must be at least 1"));
            }
            let stats = bench::run_stats(Method::Ga, range_max, args.runs, config.seed, &config)
                .map_err(bench_failure)?;
            say!("# command ga");
            say!("# range 1..={range_max}");
            say!("# runs {}", stats.runs);
            say!("# seed {}", stats.master_seed);
            say!("# totals {}", join_u64s(&stats.totals));
            say!("# best {}", stats.best);
            say!("# worst {}", stats.worst);
            say!("# average {:.2}", stats.average);
            say!("# median {:.2}", stats.median);
            save_report(&args.output, &config, vec![ReportRow::RunStats(stats)])?;
        }
        _ => unreachable!("clap enforces exactly one of --exponent / --range-max"),
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    match (args.exponent, args.limit) {
        (Some(raw), None) => {
            let exponent = parse_exponent(raw)?;
            let result = oracle::search(exponent, None);
            say!("# command oracle");
            say!("# exponent {exponent}");
            say!("# length {}", result.length());
            say!("# proven {}", result.proven);
            say!("# nodes {}", result.nodes);
            say!("{}", result.chain);
        }
        (None, Some(limit)) => {
            if limit < 1 {
                return Err(input("--limit must be at least 1"));
            }
            let table = optimal_table(limit, args.cache.as_deref())
                .map_err(|err| input(format!("exact-length table: {err}")))?;
            say!("# command oracle");
            say!("# limit {limit}");
            if let Some(path) = &args.cache {
                say!("# cache {}", path.display());
            }
            say!("# accumulated exact chain length over [1, {limit}]");
            say!("{}", table.accumulated(limit));
        }
        _ => unreachable!("clap enforces exactly one of --exponent / --limit"),
    }
    Ok(0)
}

fn cmd_baseline(args: BaselineArgs) -> Result<u8, Failure> {
    let exponent = parse_exponent(args.exponent)?;
    let (label, chain) = match args.method {
        BaselineMethod::Binary => ("binary".to_string(), binary_chain(exponent)),
        BaselineMethod::Mary => {
            let radix = Radix::new(args.radix).map_err(input)?;
            (format!("mary({})", args.radix), mary_chain(exponent, radix))
        }
    };
    say!("# command baseline");
    say!("# method {label}");
    say!("# exponent {exponent}");
    say!("# length {}", chain.length());
    say!("{chain}");
    Ok(0)
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, Failure> {
    let values = read_chain_file(&args.file)?;
    let exponent = parse_exponent(args.exponent)?;
    let report = validate_chain(&values, exponent);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|err| internal(format!("cannot serialize validation report: {err}")))?;
    say!("{json}");
    Ok(if report.valid { 0 } else { 1 })
}

fn cmd_modexp(args: ModexpArgs) -> Result<u8, Failure> {
    let values = read_chain_file(&args.file)?;
    let chain = AdditionChain::from_values(&values)
        .map_err(|err| input(format!("chain file {}: {err}", args.file.display())))?;
    let base: BigUint = args
        .base
        .parse()
        .map_err(|err| input(format!("base: {err}")))?;
    let modulus: BigUint = args
        .modulus
        .parse()
        .map_err(|err| input(format!("modulus: {err}")))?;
    let ctx = ModContext::new(base, modulus).map_err(input)?;
    let execution = addchain::modexp::execute(&chain, &ctx);
    say!("# command modexp");
    say!("# exponent {}", chain.last());
    say!("# multiplications {}", execution.multiplications);
    say!("{}", execution.result);
    Ok(0)
}

/// Workload sizes for one benchmark scale.
struct ScaleParams {
    /// Upper ends of the accumulation ranges [1, r].
    ranges: &'static [u64],
    /// Independent runs for the statistics table.
    runs: usize,
    /// Exponent widths for the random-exponent averages.
    bit_sizes: &'static [u32],
    /// Random exponents drawn per width.
    samples: usize,
    /// Seeds tried per hard single exponent.
    special_seeds: usize,
    /// Generation cap applied before flag overrides (None keeps the default).
    generation_cap: Option<usize>,
    note: &'static str,
}

fn scale_params(scale: Scale) -> ScaleParams {
    match scale {
        Scale::Ci => ScaleParams {
            ranges: &[128],
            runs: 5,
            bit_sizes: &[8, 16, 32],
            samples: 5,
            special_seeds: 5,
            generation_cap: Some(100),
            note: "ci: range [1,128], 5 runs, 5 samples, 5 seeds, generations capped at 100",
        },
        Scale::Paper => ScaleParams {
            ranges: &[512, 1000, 1024, 2000, 2048, 4096],
            runs: 40,
            bit_sizes: &[32, 64],
            samples: 20,
            special_seeds: 40,
            generation_cap: None,
            note: "paper: ranges up to [1,4096], 40 runs, 20 samples, 40 seeds",
        },
    }
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Failure> {
    if let Some(workers) = args.workers {
        if workers < 1 {
            return Err(input("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(internal)?;
    }
    let params = scale_params(args.scale);
    let mut config = load_config(args.config.as_deref())?;
    if let Some(cap) = params.generation_cap {
        config.max_generations = config.max_generations.min(cap);
    }
    let config = finish_config(config, &args.overrides)?;

    say!("# scale {}", params.note);
    say!("# seed {}", config.seed);
    let rows = match args.table {
        Table::Table1 => bench_table1(&params, &config, args.cache.as_deref())?,
        Table::Table2 => bench_table2(&params, &config)?,
        Table::Table3 => bench_table3(&params, &config)?,
        Table::Table4 => bench_table4(&params, &config)?,
    };
    save_report(&args.output, &config, rows)?;
    Ok(0)
}

/// Accumulated chain length over exponent ranges, per method.
fn bench_table1(
    params: &ScaleParams,
    config: &GaConfig,
    cache: Option<&Path>,
) -> Result<Vec<ReportRow>, Failure> {
    let top = *params.ranges.last().expect("each scale has ranges");
    let table = optimal_table(top, cache)
        .map_err(|err| input(format!("exact-length table: {err}")))?;
    say!("# table1: accumulated chain length over [1, r], one ga run per range");
    say!(
        "{:<10} {:>8} {:>8} {:>8} {:>8}",
        "range", "oracle", "ga", "mary(4)", "binary"
    );
    let mut rows = Vec::new();
    for &r in params.ranges {
        let range_max = Exponent::new(r).expect("ranges are positive");
        let oracle_row = Accumulated {
            method: Method::Oracle,
            range_max: r,
            total: table.accumulated(r),
            per_exponent: (1..=r).map(|n| table.length(n).additions() as u32).collect(),
            seed: None,
        };
        let ga_row = bench::accumulated(Method::Ga, range_max, config).map_err(bench_failure)?;
        let mary_row =
            bench::accumulated(Method::Mary(4), range_max, config).map_err(bench_failure)?;
        let binary_row =
            bench::accumulated(Method::Binary, range_max, config).map_err(bench_failure)?;
        say!(
            "{:<10} {:>8} {:>8} {:>8} {:>8}",
            format!("[1,{r}]"),
            oracle_row.total,
            ga_row.total,
            mary_row.total,
            binary_row.total
        );
        for row in [oracle_row, ga_row, mary_row, binary_row] {
            rows.push(ReportRow::Accumulated(row));
        }
    }
    Ok(rows)
}

/// Statistics of the ga accumulation over independent runs.
fn bench_table2(params: &ScaleParams, config: &GaConfig) -> Result<Vec<ReportRow>, Failure> {
    say!("# table2: ga accumulated totals over {} independent runs", params.runs);
    say!(
        "{:<10} {:>5} {:>8} {:>10} {:>10} {:>8}",
        "range", "runs", "best", "average", "median", "worst"
    );
    let mut rows = Vec::new();
    for &r in params.ranges {
        let range_max = Exponent::new(r).expect("ranges are positive");
        let stats = bench::run_stats(Method::Ga, range_max, params.runs, config.seed, config)
            .map_err(bench_failure)?;
        say!(
            "{:<10} {:>5} {:>8} {:>10.2} {:>10.2} {:>8}",
            format!("[1,{r}]"),
            stats.runs,
            stats.best,
            stats.average,
            stats.median,
            stats.worst
        );
        rows.push(ReportRow::RunStats(stats));
    }
    Ok(rows)
}

/// Average chain length on random fixed-width exponents, per method.
fn bench_table3(params: &ScaleParams, config: &GaConfig) -> Result<Vec<ReportRow>, Failure> {
    let methods = [Method::Ga, Method::Binary, Method::Mary(4)];
    say!(
        "# table3: average chain length over {} random exponents per width",
        params.samples
    );
    say!(
        "{:<6} {:>8} {:>8} {:>8} {:>8}",
        "bits", "samples", "ga", "binary", "mary(4)"
    );
    let mut rows = Vec::new();
    for &bits in params.bit_sizes {
        let averages = bench::random_exponent_avg(bits, params.samples, &methods, config.seed, config)
            .map_err(bench_failure)?;
        let by_method = |method: Method| {
            averages
                .averages
                .iter()
                .find(|entry| entry.method == method)
                .map(|entry| entry.average)
                .expect("every requested method is averaged")
        };
        say!(
            "{:<6} {:>8} {:>8.2} {:>8.2} {:>8.2}",
            bits,
            averages.samples,
            by_method(Method::Ga),
            by_method(Method::Binary),
            by_method(Method::Mary(4))
        );
        rows.push(ReportRow::BitAverages(averages));
    }
    Ok(rows)
}

/// Hard single exponents: reference chains revalidated, then ga searches.
fn bench_table4(params: &ScaleParams, config: &GaConfig) -> Result<Vec<ReportRow>, Failure> {
    let seeds: Vec<u64> = (0..params.special_seeds as u64).collect();
    let runs = bench::special_exponents(config, &seeds).map_err(bench_failure)?;
    say!(
        "# table4: hard exponents, best ga chain over {} seeds",
        seeds.len()
    );
    say!("# reference: the published chain for the exponent, revalidated here");
    say!("{:<10} {:>12} {:>8}", "exponent", "reference", "ga");
    let mut rows = Vec::new();
    for run in runs {
        let reference = REFERENCE_CHAINS
            .iter()
            .find(|(e, _)| *e == run.exponent)
            .map(|(_, text)| text)
            .expect("every special exponent has a reference chain");
        let values = parse_chain_text(reference).expect("embedded chains parse");
        let exponent = Exponent::new(run.exponent).expect("special exponents are positive");
        let verdict = if validate_chain(&values, exponent).valid {
            format!("valid({})", values.len() - 1)
        } else {
            "invalid".to_string()
        };
        say!(
            "{:<10} {:>12} {:>8}",
            run.exponent, verdict, run.best_length
        );
        rows.push(ReportRow::SingleRun(run));
    }
    for row in &rows {
        if let ReportRow::SingleRun(run) = row {
            say!("# ga chain {}: {}", run.exponent, join_u64s(&run.best_chain));
        }
    }
    Ok(rows)
}
