//! Dynasearch on a single machine: each step applies the best set of independent moves.
//!
//! cargo run --release --example dynasearch_single_machine

use pmwt::dynasearch::dynasearch_step;
use pmwt::instances::{generate_one, InstanceSpec};
use pmwt::model::sequence_cost;

fn main() {
    let instance = generate_one(&InstanceSpec { n: 40, m: 1, r_pct: 40, t_pct: 80, seed: 11 }, 0);
    let mut seq: Vec<usize> = (0..instance.n()).collect();
    println!("identity order: cost {}", sequence_cost(&instance, &seq));
    for step_no in 1.. {
        let step = dynasearch_step(&instance, &seq);
        if step.moves.is_empty() {
            break;
        }
        let kinds: Vec<String> = step.moves.iter().map(|mv| format!("{:?}({},{})", mv.kind, mv.k, mv.l)).collect();
        println!("step {step_no}: {} moves, cost {}  {}", step.moves.len(), step.cost, kinds.join(" "));
        seq = step.sequence;
    }
    println!("dynasearch local optimum: {seq:?}");
}
