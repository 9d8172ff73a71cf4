use std::fs::File;
use std::io::{self, BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use visolve::bench::{self, RunItem, RunRequest, SolverChoice, X0Selection};
use visolve::suite::{self, ProblemSpec};
use visolve::SolverConfig;

#[derive(Parser)]
#[command(name = "visolve", version, about = "Benchmark harness for monotone VI solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run solvers over suite problems and write CSV.
    Run(RunArgs),
    /// List the suite problems.
    List,
    /// Align two result CSVs and flag regressions of the second against the first.
    Compare { first: PathBuf, second: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Problem names (ex1..ex12), comma separated, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    problem: Vec<String>,
    /// Dimensions, comma separated; ignored by fixed-size problems.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Starting point label or zero-based index; all of them by default.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, default_value = "both")]
    solver: String,
    /// Seed for the randomized problems.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Flat key=value solver configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Timing repetitions (median is reported).
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

fn request(args: &RunArgs) -> Result<RunRequest, Box<dyn std::error::Error>> {
    let mut config = match &args.config {
        Some(path) => SolverConfig::from_key_value(&std::fs::read_to_string(path)?)?,
        None => SolverConfig::default(),
    };
    if let Some(tol) = args.tol {
        config.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        config.max_iter = max_iter;
    }
    config.validate()?;

    let names: Vec<String> = if args.problem.iter().any(|p| p == "all") {
        suite::NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        args.problem.iter().filter(|p| !p.is_empty()).cloned().collect()
    };
    let x0 = args.x0.clone().map_or(X0Selection::All, X0Selection::One);
    let mut items = Vec::new();
    for name in names {
        let entry = suite::entry_for(&name).ok_or_else(|| suite::SuiteError::UnknownProblem(name.clone()))?;
        let dims: Vec<Option<usize>> = if entry.fixed_n.is_some() || args.n.is_empty() {
            vec![None]
        } else {
            args.n.iter().copied().map(Some).collect()
        };
        for n in dims {
            let mut spec = ProblemSpec::new(name.clone());
            spec.n = n;
            spec.seed = args.seed;
            items.push(RunItem { spec, x0: x0.clone() });
        }
    }
    Ok(RunRequest {
        items,
        solver: args.solver.parse::<SolverChoice>()?,
        config,
        reps: args.reps,
    })
}

fn execute(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::List => print!("{}", suite::render_list()?),
        Command::Run(args) => {
            let rows = bench::run(&request(&args)?)?;
            match &args.out {
                Some(path) => bench::write_csv(BufWriter::new(File::create(path)?), &rows)?,
                None => bench::write_csv(io::stdout().lock(), &rows)?,
            }
        }
        Command::Compare { first, second } => {
            let a = bench::read_csv(BufReader::new(File::open(first)?))?;
            let b = bench::read_csv(BufReader::new(File::open(second)?))?;
            print!("{}", bench::compare(&a, &b)?.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
