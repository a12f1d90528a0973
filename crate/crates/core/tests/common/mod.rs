#![allow(dead_code)]

use pmwt::instances::{generate_one, InstanceSpec, FACTOR_GRID};
use pmwt::model::Job;
use pmwt::{Instance, JobId, Schedule};
use rand::seq::SliceRandom;
use rand::Rng;

/// Instance with independent uniform data, unrelated to the generator under test.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let total: i64 = 25 * n as i64 / m as i64 + 1;
    let jobs = (0..n)
        .map(|_| Job::new(rng.gen_range(1..=50), rng.gen_range(1..=10), rng.gen_range(0..=total)))
        .collect();
    Instance::new(jobs, m).unwrap()
}

/// Generated instance with (R, T) drawn from the standard grid.
pub fn grid_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Instance {
    let spec = InstanceSpec {
        n,
        m,
        r_pct: *FACTOR_GRID.choose(rng).unwrap(),
        t_pct: *FACTOR_GRID.choose(rng).unwrap(),
        seed: rng.gen(),
    };
    generate_one(&spec, 0)
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<JobId> {
    let mut seq: Vec<JobId> = (0..n).collect();
    seq.shuffle(rng);
    seq
}

/// Random assignment of a random permutation to machines.
pub fn random_schedule<R: Rng>(rng: &mut R, instance: &Instance) -> Schedule {
    let mut machines = vec![Vec::new(); instance.m()];
    for j in random_permutation(rng, instance.n()) {
        machines[rng.gen_range(0..instance.m())].push(j);
    }
    Schedule::new(instance, machines).unwrap()
}

/// Objective recomputed from scratch, job by job.
pub fn recompute_cost(instance: &Instance, machines: &[Vec<JobId>]) -> i64 {
    let mut total = 0;
    for seq in machines {
        let mut t = 0;
        for &j in seq {
            let job = instance.job(j);
            t += job.p;
            total += job.w * (t - job.d).max(0);
        }
    }
    total
}
