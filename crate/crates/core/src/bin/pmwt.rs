use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use pmwt::harness::{self, GroupBy, RunPlan};
use pmwt::ils::{Budget, Mode};
use pmwt::instances::{GenParams, FACTOR_GRID, INSTANCES_PER_PAIR};

#[derive(Parser)]
#[command(name = "pmwt", about = "Parallel-machine weighted tardiness benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a batch of random instances and its manifest.
    Generate {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instances per (R, T) pair.
        #[arg(long, default_value_t = INSTANCES_PER_PAIR)]
        count: usize,
        /// Due date range values, e.g. 0.2,0.6 (default: 0.2 … 1.0).
        #[arg(long, value_delimiter = ',', value_parser = parse_factor)]
        r: Vec<u32>,
        /// Tardiness factor values (default: 0.2 … 1.0).
        #[arg(long, value_delimiter = ',', value_parser = parse_factor)]
        t: Vec<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algorithms on instances, appending to a results file.
    Run {
        /// Instance files or directories.
        instances: Vec<PathBuf>,
        /// OR-library weighted tardiness file (requires --n and --m).
        #[arg(long, requires_all = ["n", "m"])]
        orlib: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "A1,A3")]
        modes: Vec<Mode>,
        /// Seconds per run.
        #[arg(long, default_value_t = 10.0)]
        time_limit: f64,
        /// Outer iterations per run instead of a time limit.
        #[arg(long, conflicts_with = "time_limit")]
        iterations: Option<u64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Summarize a results file.
    Table {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = Grouping::Nm)]
        group_by: Grouping,
        /// Count a best only when strictly better than every other algorithm.
        #[arg(long)]
        strict_wins: bool,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Grouping {
    Nm,
    Rt,
}

fn parse_factor(s: &str) -> Result<u32, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{s} is outside [0, 1]"));
    }
    Ok((v * 100.0).round() as u32)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Generate { n, m, seed, count, r, t, out } => {
            let or_grid = |v: Vec<u32>| if v.is_empty() { FACTOR_GRID.to_vec() } else { v };
            let params = GenParams { n, m, r_values: or_grid(r), t_values: or_grid(t), seed, count };
            let paths = harness::cmd_generate(&params, &out)?;
            println!("wrote {} instances and {} to {}", paths.len(), harness::MANIFEST, out.display());
        }
        Command::Run { instances, orlib, n, m, modes, time_limit, iterations, seeds, results, jobs } => {
            let mut tasks = harness::load_tasks(&instances)?;
            if let (Some(path), Some(n), Some(m)) = (orlib, n, m) {
                tasks.extend(harness::orlib_tasks(&path, n, m)?);
            }
            let budget = match iterations {
                Some(k) => Budget::Iterations(k),
                None => Budget::Time(Duration::from_secs_f64(time_limit)),
            };
            let plan = RunPlan { modes, budget, seeds, jobs };
            let records = harness::cmd_run(&tasks, &plan, &results)?;
            for r in &records {
                println!("{} {} seed={} cost={} t_best={:.2}s", r.instance, r.mode, r.seed, r.best_cost, r.time_to_best);
            }
            println!("{} new records in {}", records.len(), results.display());
        }
        Command::Table { results, group_by, strict_wins, csv } => {
            let records = harness::read_results(&results)?;
            let group_by = match group_by {
                Grouping::Nm => GroupBy::Size,
                Grouping::Rt => GroupBy::Factors,
            };
            let table = harness::cmd_table(&records, group_by, strict_wins)?;
            print!("{}", table.render_text());
            if let Some(path) = csv {
                std::fs::write(&path, table.render_csv())?;
            }
        }
    }
    Ok(())
}
