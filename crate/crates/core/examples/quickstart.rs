//! Generate one instance, run the matching-based search for two seconds and print the schedule.
//!
//! cargo run --release --example quickstart

use std::time::Duration;

use pmwt::ils::{run, Budget, Mode, SearchConfig};
use pmwt::instances::{generate_one, InstanceSpec};
use pmwt::model::{dispatch, edd_sequence};

fn main() {
    let spec = InstanceSpec { n: 40, m: 4, r_pct: 60, t_pct: 60, seed: 2024 };
    let instance = generate_one(&spec, 0);
    let edd = dispatch(&instance, &edd_sequence(&instance)).unwrap();
    println!("{} jobs on {} machines, EDD dispatch cost {}", instance.n(), instance.m(), edd.cost());

    let report = run(&instance, &SearchConfig::new(Mode::A3, Budget::Time(Duration::from_secs(2)), 1));
    println!(
        "A3: cost {} after {:.2}s ({} descents, {} iterations)",
        report.best_cost, report.time_to_best, report.descents, report.iterations
    );
    let completion = report.best.completion_times(&instance);
    for (k, seq) in report.best.machines().iter().enumerate() {
        let late: Vec<_> = seq.iter().filter(|&&j| completion[j] > instance.job(j).d).collect();
        println!("  machine {k}: {seq:?}  late {late:?}");
    }
}
