//! Runs A1, A2 and A3 through the benchmark harness on a small generated batch and prints the
//! comparison tables.
//!
//! cargo run --release --example compare_algorithms -- [seconds per run]

use pmwt::harness::{cmd_generate, cmd_run, cmd_table, load_tasks, GroupBy, RunPlan};
use pmwt::ils::Mode;
use pmwt::instances::GenParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seconds: f64 = std::env::args().nth(1).map_or(Ok(1.0), |s| s.parse())?;
    let dir = tempfile::tempdir()?;
    let params = GenParams { r_values: vec![20, 60], t_values: vec![40, 80], count: 2, ..GenParams::standard(40, 4, 3) };
    let files = cmd_generate(&params, &dir.path().join("instances"))?;
    println!("generated {} instances", files.len());

    let tasks = load_tasks(&[dir.path().join("instances")])?;
    let results = dir.path().join("results.jsonl");
    let plan = RunPlan::timed(Mode::ALL.to_vec(), seconds, vec![1]);
    cmd_run(&tasks, &plan, &results)?;

    let records = pmwt::harness::read_results(&results)?;
    print!("{}", cmd_table(&records, GroupBy::Size, false)?.render_text());
    println!();
    print!("{}", cmd_table(&records, GroupBy::Factors, false)?.render_text());
    Ok(())
}
