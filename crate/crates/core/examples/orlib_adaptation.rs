//! Reads single-machine instances in the OR-library layout and adapts them to parallel
//! machines by dividing due dates by m.
//!
//! cargo run --release --example orlib_adaptation -- [wt40.txt]

use pmwt::ils::{run, Budget, Mode, SearchConfig};
use pmwt::instances::{adapt_to_parallel, generate, load_orlib, serialize_orlib, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => {
            let params = GenParams { r_values: vec![60], t_values: vec![60], count: 3, ..GenParams::standard(40, 1, 9) };
            serialize_orlib(&generate(&params)?)
        }
    };
    let singles = load_orlib(&text, 40, "wt40")?;
    println!("{} single-machine instances", singles.len());
    for (i, single) in singles.iter().take(3).enumerate() {
        for m in [2, 4] {
            let instance = adapt_to_parallel(single, m)?;
            let report = run(&instance, &SearchConfig::new(Mode::A3, Budget::Iterations(20), 1));
            println!("instance {} on {m} machines: cost {}", i + 1, report.best_cost);
        }
    }
    Ok(())
}
