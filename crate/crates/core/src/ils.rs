//! Iterated local search drivers.
//!
//! * [`Mode::A1`]: GPI local search on the job sequence (swap and both insertions), schedules
//!   built by dispatching.
//! * [`Mode::A2`]: as A1, but every dispatched schedule is refined by a dynasearch descent on
//!   each machine before its cost is read.
//! * [`Mode::A3`]: per-machine dynasearch, a full N1 descent, then alternating full descents of
//!   the parallel-machines neighborhood (N2) with single explorations of the dynasearch-refined
//!   GPI neighborhood (N3) while they keep improving, followed by a kick.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynasearch::dynasearch_descent;
use crate::gpi::{descend, explore_stage, DispatchCost, ExploreStats, GpiKind, GpiMove, SequenceCost};
use crate::model::{dispatch_unchecked, edd_sequence, Cost, Instance, JobId, Schedule};
use crate::parallel::full_descent_n2_until;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    A1,
    A2,
    A3,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A1, Mode::A2, Mode::A3];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::A1 => "A1",
            Mode::A2 => "A2",
            Mode::A3 => "A3",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Mode::A1),
            "A2" => Ok(Mode::A2),
            "A3" => Ok(Mode::A3),
            other => Err(format!("unknown mode {other:?} (expected A1, A2 or A3)")),
        }
    }
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// Wall-clock limit, checked between neighborhood stages.
    Time(Duration),
    /// Number of outer iterations; runs are then fully reproducible for a given seed.
    Iterations(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: Mode,
    pub budget: Budget,
    /// Non-improving iterations tolerated before kicking from the best schedule.
    pub max_no_improve: u32,
    /// Last stage explored by N3.
    pub gamma_max: usize,
    /// Random moves per kick.
    pub kick_strength: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(mode: Mode, budget: Budget, seed: u64) -> Self {
        Self { mode, budget, max_no_improve: 5, gamma_max: 5, kick_strength: 3, seed }
    }
}

/// Outcome of one search run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    pub seed: u64,
    pub best: Schedule,
    pub best_cost: Cost,
    /// Seconds from the start until the best schedule was first found.
    pub time_to_best: f64,
    pub elapsed: f64,
    /// Completed N1 (A1, A2) or outer-loop N1 (A3) full descents.
    pub descents: u64,
    /// Outer iterations started.
    pub iterations: u64,
    /// Candidate sequences evaluated by the GPI explorations.
    pub evaluations: u64,
}

struct Clock {
    start: Instant,
    budget: Budget,
    expired: Cell<bool>,
}

impl Clock {
    fn new(budget: Budget) -> Self {
        Self { start: Instant::now(), budget, expired: Cell::new(false) }
    }

    fn seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    /// Checked at the top of every outer iteration.
    fn exhausted(&self, iterations: u64) -> bool {
        let done = match self.budget {
            Budget::Time(limit) => self.start.elapsed() >= limit,
            Budget::Iterations(max) => iterations >= max,
        };
        if done {
            self.expired.set(true);
        }
        done
    }

    /// Polled inside descents; iteration budgets never interrupt a descent.
    fn interrupted(&self) -> bool {
        if let Budget::Time(limit) = self.budget {
            if self.start.elapsed() >= limit {
                self.expired.set(true);
            }
        }
        self.expired.get()
    }
}

/// Dispatch followed by a dynasearch descent on every machine.
pub fn refined_schedule(instance: &Instance, sequence: &[JobId]) -> Schedule {
    dynasearch_descent(instance, &dispatch_unchecked(instance, sequence))
}

struct RefinedCost<'a>(&'a Instance);

impl SequenceCost for RefinedCost<'_> {
    fn cost(&mut self, sequence: &[JobId]) -> Cost {
        refined_schedule(self.0, sequence).cost()
    }
}

pub fn run(instance: &Instance, config: &SearchConfig) -> RunReport {
    match config.mode {
        Mode::A1 | Mode::A2 => run_sequence_ils(instance, config),
        Mode::A3 => run_a3(instance, config),
    }
}

pub fn run_a1(instance: &Instance, config: &SearchConfig) -> RunReport {
    run_sequence_ils(instance, &SearchConfig { mode: Mode::A1, ..config.clone() })
}

pub fn run_a2(instance: &Instance, config: &SearchConfig) -> RunReport {
    run_sequence_ils(instance, &SearchConfig { mode: Mode::A2, ..config.clone() })
}

/// Applies `strength` random GPI moves drawn from `kinds`.
pub fn kick_sequence<R: Rng>(sequence: &[JobId], kinds: &[GpiKind], strength: usize, rng: &mut R) -> Vec<JobId> {
    let mut seq = sequence.to_vec();
    let n = seq.len();
    if n < 2 {
        return seq;
    }
    for _ in 0..strength {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let kind = *kinds.choose(rng).expect("at least one operator");
        GpiMove::new(kind, a.min(b), a.max(b)).apply_in_place(&mut seq);
    }
    seq
}

fn run_sequence_ils(instance: &Instance, config: &SearchConfig) -> RunReport {
    let clock = Clock::new(config.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let kinds = &GpiKind::BASIC;
    let refine = config.mode == Mode::A2;
    let mut dispatch_eval = DispatchCost::new(instance);
    let mut refined_eval = RefinedCost(instance);
    let mut eval = |seq: &[JobId]| if refine { refined_eval.cost(seq) } else { dispatch_eval.cost(seq) };

    let mut seq = edd_sequence(instance);
    let mut cost = eval(&seq);
    let (mut best_seq, mut best_cost) = (seq.clone(), cost);
    let mut time_to_best = clock.seconds();
    let (mut descents, mut iterations, mut no_improve) = (0u64, 0u64, 0u32);
    let mut stats = ExploreStats::default();

    while best_cost > 0 && !clock.exhausted(iterations) {
        iterations += 1;
        if let Some((s, c)) = descend(&seq, cost, kinds, &mut eval, &mut rng, &mut stats, || clock.interrupted()) {
            seq = s;
            cost = c;
        }
        if !clock.interrupted() {
            descents += 1;
        }
        if cost < best_cost {
            best_seq.clone_from(&seq);
            best_cost = cost;
            time_to_best = clock.seconds();
            no_improve = 0;
        } else {
            no_improve += 1;
        }
        let from = if no_improve > config.max_no_improve {
            no_improve = 0;
            &best_seq
        } else {
            &seq
        };
        seq = kick_sequence(from, kinds, config.kick_strength, &mut rng);
        cost = eval(&seq);
    }

    let best = if refine { refined_schedule(instance, &best_seq) } else { dispatch_unchecked(instance, &best_seq) };
    debug_assert_eq!(best.cost(), best_cost);
    RunReport {
        mode: config.mode,
        seed: config.seed,
        best_cost: best.cost(),
        best,
        time_to_best,
        elapsed: clock.seconds(),
        descents,
        iterations,
        evaluations: stats.evaluations,
    }
}

/// Full N1 descent of a schedule: GPI moves (all four operators) on its start-time
/// linearization, evaluated by dispatch. Returns the schedule itself when no neighbor beats it.
fn descend_n1_schedule<R: Rng>(
    instance: &Instance,
    schedule: &Schedule,
    rng: &mut R,
    stats: &mut ExploreStats,
    stop: impl FnMut() -> bool,
) -> Schedule {
    let seq = schedule.linearize(instance);
    let mut eval = DispatchCost::new(instance);
    match descend(&seq, schedule.cost(), &GpiKind::ALL, &mut eval, rng, stats, stop) {
        Some((seq, _)) => dispatch_unchecked(instance, &seq),
        None => schedule.clone(),
    }
}

/// One exploration of N3: stages `1..=gamma_max` of the GPI neighborhood of the schedule's
/// linearization, every neighbor dispatched and refined by per-machine dynasearch. Returns the
/// first refined neighbor strictly cheaper than `schedule`.
pub fn search_n3<R: Rng>(instance: &Instance, schedule: &Schedule, gamma_max: usize, rng: &mut R) -> Option<Schedule> {
    search_n3_inner(instance, schedule, gamma_max, rng, &mut ExploreStats::default(), || false)
}

fn search_n3_inner<R: Rng>(
    instance: &Instance,
    schedule: &Schedule,
    gamma_max: usize,
    rng: &mut R,
    stats: &mut ExploreStats,
    mut stop: impl FnMut() -> bool,
) -> Option<Schedule> {
    assert!(gamma_max >= 1, "gamma_max must be at least 1");
    let seq = schedule.linearize(instance);
    let n = seq.len();
    let mut eval = RefinedCost(instance);
    for gamma in 1..=gamma_max.min(n.saturating_sub(1)) {
        if stop() {
            break;
        }
        if let Some((next, cost)) = explore_stage(&seq, schedule.cost(), gamma, &GpiKind::ALL, &mut eval, rng, stats) {
            let refined = refined_schedule(instance, &next);
            debug_assert_eq!(refined.cost(), cost);
            return Some(refined);
        }
    }
    None
}

/// Random inter-machine perturbation: `strength` moves, each with equal probability a transfer
/// of a random job to a random slot of another machine or an exchange of two jobs on distinct
/// machines keeping their positions. With a single machine the moves are random swaps.
pub fn kick<R: Rng>(instance: &Instance, schedule: &Schedule, strength: usize, rng: &mut R) -> Schedule {
    let mut machines = schedule.machines().to_vec();
    let m = machines.len();
    let n = instance.n();
    for _ in 0..strength {
        if n < 2 {
            break;
        }
        if m == 1 {
            let seq = &mut machines[0];
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            seq.swap(a, b);
            continue;
        }
        let (src, pos) = locate(&machines, rng.gen_range(0..n));
        let exchange = rng.gen_bool(0.5);
        let others: Vec<usize> = (0..m).filter(|&k| k != src && (!exchange || !machines[k].is_empty())).collect();
        if exchange && !others.is_empty() {
            let dst = *others.choose(rng).unwrap();
            let other_pos = rng.gen_range(0..machines[dst].len());
            let a = machines[src][pos];
            machines[src][pos] = std::mem::replace(&mut machines[dst][other_pos], a);
        } else {
            let dst = loop {
                let k = rng.gen_range(0..m);
                if k != src {
                    break k;
                }
            };
            let job = machines[src].remove(pos);
            let slot = rng.gen_range(0..=machines[dst].len());
            machines[dst].insert(slot, job);
        }
    }
    Schedule::from_parts(instance, machines)
}

fn locate(machines: &[Vec<JobId>], mut index: usize) -> (usize, usize) {
    for (k, seq) in machines.iter().enumerate() {
        if index < seq.len() {
            return (k, index);
        }
        index -= seq.len();
    }
    unreachable!("job index within total job count")
}

pub fn run_a3(instance: &Instance, config: &SearchConfig) -> RunReport {
    let clock = Clock::new(config.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let stop = || clock.interrupted();
    let mut stats = ExploreStats::default();

    let mut s = dispatch_unchecked(instance, &edd_sequence(instance));
    let mut best = s.clone();
    let mut time_to_best = clock.seconds();
    let (mut descents, mut iterations, mut no_improve) = (0u64, 0u64, 0u32);

    while best.cost() > 0 && !clock.exhausted(iterations) {
        iterations += 1;
        s = dynasearch_descent(instance, &s);
        let mut s1 = descend_n1_schedule(instance, &s, &mut rng, &mut stats, stop);
        if !clock.interrupted() {
            descents += 1;
        }
        let mut n2_improved;
        let s3 = loop {
            let entering = s1.cost();
            let (s2, _) = full_descent_n2_until(instance, &s1, stop);
            n2_improved = s2.cost() < entering;
            match search_n3_inner(instance, &s2, config.gamma_max, &mut rng, &mut stats, stop) {
                Some(s3) if !clock.interrupted() => s1 = s3,
                Some(s3) => break s3,
                None => break s2,
            }
        };
        if s3.cost() >= best.cost() {
            no_improve += 1;
        } else {
            best = s3.clone();
            time_to_best = clock.seconds();
            no_improve = 0;
        }
        s = if n2_improved {
            s3
        } else if no_improve > config.max_no_improve {
            no_improve = 0;
            kick(instance, &best, config.kick_strength, &mut rng)
        } else {
            kick(instance, &s3, config.kick_strength, &mut rng)
        };
    }

    RunReport {
        mode: Mode::A3,
        seed: config.seed,
        best_cost: best.cost(),
        best,
        time_to_best,
        elapsed: clock.seconds(),
        descents,
        iterations,
        evaluations: stats.evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, Job};
    use crate::parallel::n2_step;

    fn random_instance(seed: u64, n: usize, m: usize) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let jobs = (0..n)
            .map(|_| Job::new(rng.gen_range(1..=30), rng.gen_range(1..=10), rng.gen_range(0..=(n as i64 * 15) / m as i64)))
            .collect();
        Instance::new(jobs, m).unwrap()
    }

    fn iters(mode: Mode, k: u64, seed: u64) -> SearchConfig {
        SearchConfig::new(mode, Budget::Iterations(k), seed)
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("a3".parse::<Mode>(), Ok(Mode::A3));
        assert!("A4".parse::<Mode>().is_err());
        assert_eq!(Mode::A2.to_string(), "A2");
    }

    #[test]
    fn zero_cost_exits_immediately() {
        let inst = Instance::new(vec![Job::new(2, 1, 1000); 8], 2).unwrap();
        for mode in Mode::ALL {
            let r = run(&inst, &iters(mode, 100, 1));
            assert_eq!(r.best_cost, 0);
            assert_eq!(r.iterations, 0);
        }
    }

    #[test]
    fn reported_cost_is_exact() {
        let inst = random_instance(3, 20, 3);
        for mode in Mode::ALL {
            let r = run(&inst, &iters(mode, 6, 7));
            assert_eq!(evaluate(&inst, r.best.machines()), Ok(r.best_cost));
            assert!(r.best_cost <= dispatch_unchecked(&inst, &edd_sequence(&inst)).cost());
        }
    }

    #[test]
    fn iteration_budget_is_reproducible() {
        let inst = random_instance(11, 25, 4);
        for mode in Mode::ALL {
            let a = run(&inst, &iters(mode, 5, 42));
            let b = run(&inst, &iters(mode, 5, 42));
            assert_eq!((a.best, a.descents, a.iterations, a.evaluations), (b.best, b.descents, b.iterations, b.evaluations));
        }
    }

    #[test]
    fn a1_counts_descents() {
        let inst = random_instance(5, 15, 2);
        let r = run(&inst, &iters(Mode::A1, 9, 1));
        if r.best_cost > 0 {
            assert_eq!(r.descents, 9);
            assert_eq!(r.iterations, 9);
        }
    }

    #[test]
    fn a2_evaluation_never_worse_than_a1() {
        let inst = random_instance(17, 20, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seq: Vec<JobId> = (0..20).collect();
        for _ in 0..50 {
            seq.shuffle(&mut rng);
            assert!(refined_schedule(&inst, &seq).cost() <= dispatch_unchecked(&inst, &seq).cost());
        }
    }

    #[test]
    fn a3_incumbent_is_n2_local_optimum() {
        for seed in 0..5 {
            let inst = random_instance(seed, 18, 3);
            let r = run_a3(&inst, &iters(Mode::A3, 4, seed));
            assert_eq!(n2_step(&inst, &r.best), None);
        }
    }

    #[test]
    fn n3_returns_cheaper_schedules() {
        for seed in 0..10 {
            let inst = random_instance(seed, 14, 2);
            let s = dispatch_unchecked(&inst, &(0..14).collect::<Vec<_>>());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Some(t) = search_n3(&inst, &s, 5, &mut rng) {
                assert!(t.cost() < s.cost());
            }
            let mut a = ChaCha8Rng::seed_from_u64(1);
            let mut b = ChaCha8Rng::seed_from_u64(1);
            assert_eq!(search_n3(&inst, &s, 5, &mut a), search_n3(&inst, &s, 5, &mut b));
        }
        let inst = Instance::new(vec![Job::new(2, 1, 1000); 6], 2).unwrap();
        let s = dispatch_unchecked(&inst, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(search_n3(&inst, &s, 5, &mut ChaCha8Rng::seed_from_u64(0)), None);
    }

    #[test]
    fn kick_preserves_jobs() {
        for (m, seed) in [(1, 1), (2, 2), (4, 3)] {
            let inst = random_instance(seed, 12, m);
            let s = dispatch_unchecked(&inst, &(0..12).collect::<Vec<_>>());
            let k1 = kick(&inst, &s, 3, &mut ChaCha8Rng::seed_from_u64(seed));
            let k2 = kick(&inst, &s, 3, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(k1, k2);
            k1.verify(&inst).unwrap();
            if m == 1 {
                assert_eq!(k1.machines()[0].len(), 12);
            }
        }
    }

    #[test]
    fn sequence_kick_is_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut out = kick_sequence(&(0..10).collect::<Vec<_>>(), &GpiKind::BASIC, 3, &mut rng);
        out.sort_unstable();
        assert_eq!(out, (0..10).collect::<Vec<_>>());
        assert_eq!(kick_sequence(&[4], &GpiKind::BASIC, 3, &mut rng), vec![4]);
    }
}
