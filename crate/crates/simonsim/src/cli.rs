//! The `simonsim` command-line tool.
//!
//! Subcommands cover the full workflow: `gen` writes a function-table
//! file, `verify` checks one against the promise and the exact structure
//! claims, `simon` runs quantum shift recovery, `classical` runs a
//! collision search, and `compare` benchmarks quantum rounds against
//! classical queries over many trials.
//!
//! Reproducibility contract: trial t of any run draws from a ChaCha
//! stream seeded with `seed + t` (wrapping), consuming draws in a fixed
//! stage order — shift draw (generated instances without an explicit
//! shift), table draw (generated instances), run seed (always), then any
//! birthday-search draws. Identical invocations therefore produce
//! byte-identical output.
//!
//! Exit codes: 0 on success; 1 when the domain rejects the work (promise
//! violations, zero shifts, capacity, exhausted round budgets, failed
//! checks); 2 for usage and file-format errors.

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use crate::baseline::{
    birthday_collision, build_cost_report, lower_median, scan_collision, CollisionResult,
    CostReport, Strategy,
};
use crate::error::{Error, Result};
use crate::oracle::{parse_hex, to_hex, CountingOracle, HiddenShift, SimonFunction, TableDocument};
use crate::pipeline::{
    distillation_check, equivalence_check, recover_hidden_shift, DistillationReport,
    EquivalenceReport, RunReport,
};

#[derive(Parser, Debug)]
#[command(
    name = "simonsim",
    version,
    about = "Hidden-shift simulator and query-cost benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a promise-satisfying function table
    Gen(GenArgs),
    /// Check a table file: promise, measurement equivalence, distillation
    Verify(VerifyArgs),
    /// Recover the hidden shift by quantum rounds
    Simon(SimonArgs),
    /// Find a colliding pair classically
    Classical(ClassicalArgs),
    /// Benchmark quantum rounds against classical queries
    Compare(CompareArgs),
}

/// Where the problem instance comes from: a table file, or generation.
#[derive(Args, Debug)]
struct InstanceArgs {
    /// Function-table JSON file
    #[arg(long, conflicts_with_all = ["n", "r"])]
    table: Option<PathBuf>,
    /// Register width of a generated instance
    #[arg(long)]
    n: Option<usize>,
    /// Shift of a generated instance (lowercase hex); drawn from the
    /// seed stream when omitted
    #[arg(long)]
    r: Option<String>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Register width
    #[arg(long)]
    n: usize,
    /// Seed for the shift and table draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shift (lowercase hex); drawn from the seed stream when omitted
    #[arg(long)]
    r: Option<String>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Function-table JSON file
    #[arg(long)]
    table: PathBuf,
    /// Largest acceptable deviation in the exact checks
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("instance").required(true).args(["table", "n"])))]
struct SimonArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Base seed; trial t uses seed + t
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measure the value register before the argument readout
    #[arg(long = "measure-v", value_enum, default_value_t = Toggle::On)]
    measure_v: Toggle,
    /// Round budget per trial (20·n when omitted)
    #[arg(long = "max-rounds")]
    max_rounds: Option<usize>,
    /// Number of independent trials
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("instance").required(true).args(["table", "n"])))]
struct ClassicalArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search strategy
    #[arg(long, default_value = "scan")]
    strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("instance").required(true).args(["table", "n"])))]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "measure-v", value_enum, default_value_t = Toggle::On)]
    measure_v: Toggle,
    #[arg(long = "max-rounds")]
    max_rounds: Option<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn is_on(self) -> bool {
        matches!(self, Toggle::On)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// Parse arguments, run, and translate errors into exit codes.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::MalformedDocument(_) | Error::Json(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simon(args) => cmd_simon(args),
        Command::Classical(args) => cmd_classical(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

/// The ChaCha stream owned by one trial.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// A resolved instance source: a fixed table, or a recipe to generate one
/// per trial.
enum InstanceSource {
    File(SimonFunction),
    Generated { n: usize, r: Option<u64> },
}

fn load_source(args: &InstanceArgs) -> Result<InstanceSource> {
    if let Some(path) = &args.table {
        let text = std::fs::read_to_string(path)?;
        let f = TableDocument::from_json_str(&text)?.to_function()?;
        return Ok(InstanceSource::File(f));
    }
    let n = args.n.expect("argument group guarantees --table or --n");
    let r = match &args.r {
        Some(text) => {
            let r = parse_hex(text)?;
            HiddenShift::new(r)?;
            if n >= 64 || r >> n != 0 {
                return Err(Error::ValueOutOfRange { value: r, n });
            }
            Some(r)
        }
        None => None,
    };
    Ok(InstanceSource::Generated { n, r })
}

/// Produce this trial's function, consuming the stream's shift and table
/// stages as documented.
fn instance_for_trial(source: &InstanceSource, rng: &mut ChaCha8Rng) -> Result<SimonFunction> {
    match source {
        InstanceSource::File(f) => Ok(f.clone()),
        InstanceSource::Generated { n, r } => {
            let r = match r {
                Some(r) => *r,
                None => rng.gen_range(1..1u64 << n),
            };
            let table_seed = rng.gen();
            SimonFunction::generate(*n, HiddenShift::new(r)?, table_seed)
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let source = load_source(&InstanceArgs {
        table: None,
        n: Some(args.n),
        r: args.r.clone(),
    })?;
    let mut rng = trial_rng(args.seed, 0);
    let f = instance_for_trial(&source, &mut rng)?;
    let text = TableDocument::from_function(&f, true).to_json_string()?;
    emit(&text, args.out.as_ref())
}

#[derive(Serialize)]
struct VerifyOutput {
    n: usize,
    r: String,
    tolerance: f64,
    /// Always true in an emitted summary: a violated promise aborts
    /// before the structure checks can run.
    promise: bool,
    equivalence: EquivalenceReport,
    distillation: DistillationReport,
    pass: bool,
}

/// Load the table (which checks the promise), then run both exact
/// structure checks against it. Exits nonzero unless all three hold at
/// the given tolerance.
fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.table)?;
    let f = TableDocument::from_json_str(&text)?.to_function()?;
    let equivalence = equivalence_check(&f, args.tolerance)?;
    let distillation = distillation_check(&f)?;
    let pass = equivalence.pass && distillation.pass(args.tolerance);
    let output = VerifyOutput {
        n: f.n(),
        r: to_hex(f.hidden_shift().value(), f.n()),
        tolerance: args.tolerance,
        promise: true,
        equivalence,
        distillation,
        pass,
    };
    emit(&to_pretty_json(&output)?, args.out.as_ref())?;
    if !pass {
        return Err(Error::InvalidState {
            reason: "exact structure checks failed".into(),
        });
    }
    Ok(())
}

const SIMON_CSV_HEADER: &str = "trial,n,seed,measure_v,rounds,oracle_queries,recovered,success";

fn render_simon_csv(reports: &[RunReport]) -> String {
    let mut text = String::from(SIMON_CSV_HEADER);
    text.push('\n');
    for (trial, r) in reports.iter().enumerate() {
        text.push_str(&format!(
            "{trial},{},{},{},{},{},{},{}\n",
            r.n,
            r.seed,
            r.measure_v,
            r.rounds,
            r.oracle_queries,
            r.recovered.as_deref().unwrap_or(""),
            r.success
        ));
    }
    text
}

fn cmd_simon(args: SimonArgs) -> Result<()> {
    let source = load_source(&args.instance)?;
    let mut reports = Vec::new();
    let mut failure = None;
    for trial in 0..args.trials {
        let mut rng = trial_rng(args.seed, trial);
        let f = instance_for_trial(&source, &mut rng)?;
        let run_seed: u64 = rng.gen();
        let max_rounds = args.max_rounds.unwrap_or(20 * f.n());
        match recover_hidden_shift(&f, args.measure_v.is_on(), run_seed, max_rounds) {
            Ok(report) => reports.push(report),
            Err(Error::BudgetExhausted {
                max_rounds,
                rank,
                report,
            }) => {
                // Keep the partial report in the output, then fail.
                reports.push((*report).clone());
                failure = Some(Error::BudgetExhausted {
                    max_rounds,
                    rank,
                    report,
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let text = match args.format {
        OutputFormat::Json if args.trials == 1 => to_pretty_json(&reports[0])?,
        OutputFormat::Json => to_pretty_json(&reports)?,
        OutputFormat::Csv => render_simon_csv(&reports),
    };
    emit(&text, args.out.as_ref())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

const CLASSICAL_CSV_HEADER: &str = "trial,n,strategy,x1,x2,queries";

fn render_classical_csv(results: &[CollisionResult]) -> String {
    let mut text = String::from(CLASSICAL_CSV_HEADER);
    text.push('\n');
    for (trial, r) in results.iter().enumerate() {
        text.push_str(&format!(
            "{trial},{},{},{},{},{}\n",
            r.n, r.strategy, r.x1, r.x2, r.queries
        ));
    }
    text
}

fn cmd_classical(args: ClassicalArgs) -> Result<()> {
    let source = load_source(&args.instance)?;
    let mut results = Vec::new();
    for trial in 0..args.trials {
        let mut rng = trial_rng(args.seed, trial);
        let f = instance_for_trial(&source, &mut rng)?;
        let _run_seed: u64 = rng.gen(); // keep the stage order uniform
        let mut oracle = CountingOracle::new(f);
        results.push(match args.strategy {
            Strategy::Scan => scan_collision(&mut oracle),
            Strategy::Birthday => birthday_collision(&mut oracle, &mut rng),
        });
    }
    let text = match args.format {
        OutputFormat::Json if args.trials == 1 => to_pretty_json(&results[0])?,
        OutputFormat::Json => to_pretty_json(&results)?,
        OutputFormat::Csv => render_classical_csv(&results),
    };
    emit(&text, args.out.as_ref())
}

#[derive(Serialize)]
struct CompareRow {
    trial: usize,
    #[serde(flatten)]
    cost: CostReport,
}

#[derive(Serialize)]
struct MedianSummary {
    quantum_rounds: u64,
    quantum_oracle_queries: u64,
    quantum_measurement_units: u64,
    classical_scan_queries: u64,
    classical_birthday_queries: u64,
}

#[derive(Serialize)]
struct CompareOutput {
    n: usize,
    seed: u64,
    trials: usize,
    measure_v: bool,
    rows: Vec<CompareRow>,
    median: MedianSummary,
}

const COMPARE_CSV_HEADER: &str = "trial,n,quantum_rounds,quantum_oracle_queries,\
quantum_measurement_units,classical_scan_queries,classical_birthday_queries,\
printout_terms,printout_term_bits";

fn render_compare_csv(output: &CompareOutput) -> String {
    let mut text = String::from(COMPARE_CSV_HEADER);
    text.push('\n');
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for row in &output.rows {
        let c = &row.cost;
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.trial,
            c.n,
            c.quantum_rounds.map(|v| v.to_string()).unwrap_or_default(),
            opt(c.quantum_oracle_queries),
            opt(c.quantum_measurement_units),
            opt(c.classical_scan_queries),
            opt(c.classical_birthday_queries),
            c.printout_terms,
            c.printout_term_bits,
        ));
    }
    let m = &output.median;
    let (terms, bits) = output
        .rows
        .first()
        .map(|r| (r.cost.printout_terms, r.cost.printout_term_bits))
        .unwrap_or((0, 0));
    text.push_str(&format!(
        "median,{},{},{},{},{},{},{terms},{bits}\n",
        output.n,
        m.quantum_rounds,
        m.quantum_oracle_queries,
        m.quantum_measurement_units,
        m.classical_scan_queries,
        m.classical_birthday_queries,
    ));
    text
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let source = load_source(&args.instance)?;
    let mut rows = Vec::new();
    let mut failure = None;
    for trial in 0..args.trials {
        let mut rng = trial_rng(args.seed, trial);
        let f = instance_for_trial(&source, &mut rng)?;
        let run_seed: u64 = rng.gen();
        let max_rounds = args.max_rounds.unwrap_or(20 * f.n());
        let run = match recover_hidden_shift(&f, args.measure_v.is_on(), run_seed, max_rounds) {
            Ok(run) => run,
            Err(e @ Error::BudgetExhausted { .. }) => {
                failure = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let mut oracle = CountingOracle::new(f);
        let scan = scan_collision(&mut oracle);
        let birthday = birthday_collision(&mut oracle, &mut rng);
        rows.push(CompareRow {
            trial,
            cost: build_cost_report(&run, &scan, Some(&birthday))?,
        });
    }
    if rows.is_empty() {
        return Err(failure.expect("no rows means the first trial failed"));
    }
    let column = |pick: fn(&CostReport) -> u64| -> u64 {
        let mut values: Vec<u64> = rows.iter().map(|r| pick(&r.cost)).collect();
        lower_median(&mut values)
    };
    let median = MedianSummary {
        quantum_rounds: column(|c| c.quantum_rounds.unwrap_or(0) as u64),
        quantum_oracle_queries: column(|c| c.quantum_oracle_queries.unwrap_or(0)),
        quantum_measurement_units: column(|c| c.quantum_measurement_units.unwrap_or(0)),
        classical_scan_queries: column(|c| c.classical_scan_queries.unwrap_or(0)),
        classical_birthday_queries: column(|c| c.classical_birthday_queries.unwrap_or(0)),
    };
    let output = CompareOutput {
        n: rows[0].cost.n,
        seed: args.seed,
        trials: args.trials,
        measure_v: args.measure_v.is_on(),
        rows,
        median,
    };
    let text = match args.format {
        OutputFormat::Json => to_pretty_json(&output)?,
        OutputFormat::Csv => render_compare_csv(&output),
    };
    emit(&text, args.out.as_ref())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_declaration_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn compare_csv_carries_the_median_row() {
        let cost = CostReport {
            n: 3,
            quantum_rounds: Some(4),
            quantum_oracle_queries: Some(4),
            quantum_measurement_units: Some(24),
            classical_scan_queries: Some(3),
            classical_birthday_queries: Some(2),
            printout_terms: 8,
            printout_term_bits: 6,
        };
        let output = CompareOutput {
            n: 3,
            seed: 0,
            trials: 1,
            measure_v: true,
            rows: vec![CompareRow { trial: 0, cost }],
            median: MedianSummary {
                quantum_rounds: 4,
                quantum_oracle_queries: 4,
                quantum_measurement_units: 24,
                classical_scan_queries: 3,
                classical_birthday_queries: 2,
            },
        };
        let text = render_compare_csv(&output);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("trial,n,quantum_rounds"));
        assert_eq!(lines[1], "0,3,4,4,24,3,2,8,6");
        assert_eq!(lines[2], "median,3,4,4,24,3,2,8,6");
    }

    #[test]
    fn exit_codes_split_domain_from_format_errors() {
        assert_eq!(exit_code_for(&Error::ZeroShift), 1);
        assert_eq!(
            exit_code_for(&Error::CapacityExceeded { n: 13, max_n: 12 }),
            1
        );
        assert_eq!(
            exit_code_for(&Error::MalformedDocument("bad hex".into())),
            2
        );
    }
}
