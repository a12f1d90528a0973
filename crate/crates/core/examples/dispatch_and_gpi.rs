//! The dispatch rule, the four GPI operators and a full descent of the GPI neighborhood.
//!
//! cargo run --example dispatch_and_gpi

use pmwt::gpi::{apply_gpi, full_descent_n1, GpiKind, GpiMove};
use pmwt::model::dispatch;
use pmwt::Instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let instance = Instance::from_columns(&[4, 2, 3, 5, 1, 6], &[2, 5, 1, 3, 4, 2], &[4, 3, 6, 5, 2, 7], 2).unwrap();
    let seq: Vec<usize> = (0..instance.n()).collect();
    let schedule = dispatch(&instance, &seq).unwrap();
    println!("dispatch {seq:?} -> {:?}, cost {}", schedule.machines(), schedule.cost());

    for kind in GpiKind::ALL {
        let next = apply_gpi(&seq, GpiMove::new(kind, 1, 4)).unwrap();
        let cost = dispatch(&instance, &next).unwrap().cost();
        println!("{kind:?}(1, 4): {next:?} cost {cost}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let local = full_descent_n1(&instance, &seq, &mut rng);
    let schedule = dispatch(&instance, &local).unwrap();
    println!("GPI local optimum {local:?} -> {:?}, cost {}", schedule.machines(), schedule.cost());
}
