//! The machine-pair improvement graph, its maximum-weight matching and one N2 step.
//!
//! cargo run --release --example parallel_neighborhood

use pmwt::instances::{generate_one, InstanceSpec};
use pmwt::model::{dispatch, edd_sequence};
use pmwt::parallel::{best_matching, build_improvement_graph, full_descent_n2, n2_step};

fn main() {
    let instance = generate_one(&InstanceSpec { n: 30, m: 6, r_pct: 20, t_pct: 60, seed: 5 }, 0);
    let start = dispatch(&instance, &edd_sequence(&instance)).unwrap();
    println!("EDD schedule cost {}", start.cost());

    let graph = build_improvement_graph(&instance, &start);
    for mv in &graph.edges {
        println!("  edge {}-{}: gain {:>4}  {:?}", mv.m1, mv.m2, mv.delta, mv.kind);
    }
    let matching = best_matching(&graph);
    println!("matching {:?}, weight {}", matching.edges, matching.weight);

    let step = n2_step(&instance, &start).expect("EDD schedule is improvable");
    println!("after one N2 step: cost {} (gain {})", step.schedule.cost(), step.gain);

    let (local, steps) = full_descent_n2(&instance, &start);
    println!("N2 local optimum after {steps} steps: cost {}", local.cost());
}
