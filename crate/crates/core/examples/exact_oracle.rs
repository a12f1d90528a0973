//! Compares the heuristics with the exact optimum on tiny instances.
//!
//! cargo run --release --example exact_oracle

use pmwt::ils::{run, Budget, Mode, SearchConfig};
use pmwt::instances::{generate_one, InstanceSpec};
use pmwt::oracle::solve_exact;

fn main() {
    println!("{:>3} {:>2} {:>8} {:>8} {:>8} {:>8}", "n", "m", "optimum", "A1", "A2", "A3");
    for seed in 0..8u64 {
        let spec = InstanceSpec { n: 6 + (seed as usize % 5), m: 2 + (seed as usize % 2), r_pct: 40, t_pct: 60, seed };
        let instance = generate_one(&spec, 0);
        let exact = solve_exact(&instance).unwrap();
        let costs: Vec<i64> = Mode::ALL
            .iter()
            .map(|&mode| run(&instance, &SearchConfig::new(mode, Budget::Iterations(30), seed)).best_cost)
            .collect();
        println!("{:>3} {:>2} {:>8} {:>8} {:>8} {:>8}", spec.n, spec.m, exact.optimum, costs[0], costs[1], costs[2]);
    }
}
