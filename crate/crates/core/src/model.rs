//! Problem and solution types for `Pm||ΣwjTj` together with exact objective evaluation.
//!
//! Jobs are addressed by their zero-based index into [`Instance::jobs`]. Every time and cost is an
//! exact integer.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer time unit.
pub type Time = i64;
/// Integer weighted tardiness.
pub type Cost = i64;
/// Zero-based job index into [`Instance::jobs`].
pub type JobId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("job {0} appears more than once")]
    DuplicateJob(JobId),
    #[error("job {0} is not scheduled")]
    MissingJob(JobId),
    #[error("job {0} does not exist (instance has {1} jobs)")]
    UnknownJob(JobId, usize),
    #[error("schedule has {found} machines, instance has {expected}")]
    MachineCount { expected: usize, found: usize },
    #[error("machine count must be at least 1")]
    NoMachines,
    #[error("job {index}: {reason}")]
    InvalidJob { index: usize, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    /// Processing time.
    pub p: Time,
    /// Weight (cost per unit of tardiness).
    pub w: Cost,
    /// Due date.
    pub d: Time,
}

impl Job {
    pub const fn new(p: Time, w: Cost, d: Time) -> Self {
        Self { p, w, d }
    }

    /// Weighted tardiness of this job when it completes at `completion`.
    #[inline]
    pub fn tardiness_cost(&self, completion: Time) -> Cost {
        self.w * (completion - self.d).max(0)
    }
}

/// Where an instance came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceMeta {
    /// Drawn by the random generator. `r_pct`/`t_pct` are the due date range and tardiness
    /// factor in hundredths.
    Generated { r_pct: u32, t_pct: u32, index: usize, seed: u64 },
    /// Block `index` of an OR-library style file.
    OrLib { file: String, index: usize },
    /// Read from a native instance file.
    File { path: String },
    #[default]
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub jobs: Vec<Job>,
    machines: usize,
    pub meta: InstanceMeta,
}

impl Instance {
    pub fn new(jobs: Vec<Job>, machines: usize) -> Result<Self, ModelError> {
        if machines == 0 {
            return Err(ModelError::NoMachines);
        }
        for (index, job) in jobs.iter().enumerate() {
            let reason = if job.p < 1 {
                "processing time must be at least 1"
            } else if job.w < 1 {
                "weight must be at least 1"
            } else if job.d < 0 {
                "due date must be nonnegative"
            } else {
                continue;
            };
            return Err(ModelError::InvalidJob { index, reason });
        }
        Ok(Self { jobs, machines, meta: InstanceMeta::Unknown })
    }

    /// Builds an instance from parallel `p`, `w`, `d` columns.
    ///
    /// # Panics
    /// If the columns have different lengths.
    pub fn from_columns(p: &[Time], w: &[Cost], d: &[Time], machines: usize) -> Result<Self, ModelError> {
        assert!(p.len() == w.len() && w.len() == d.len(), "column lengths differ");
        let jobs = p.iter().zip(w).zip(d).map(|((&p, &w), &d)| Job::new(p, w, d)).collect();
        Self::new(jobs, machines)
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = meta;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.machines
    }

    #[inline]
    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id]
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.p).sum()
    }
}

/// Weighted tardiness of `sequence` processed without idle time from `start`.
pub fn sequence_cost_from(instance: &Instance, sequence: &[JobId], start: Time) -> Cost {
    let mut t = start;
    let mut cost = 0;
    for &j in sequence {
        let job = instance.job(j);
        t += job.p;
        cost += job.tardiness_cost(t);
    }
    cost
}

/// Weighted tardiness of a single machine sequence starting at time 0.
#[inline]
pub fn sequence_cost(instance: &Instance, sequence: &[JobId]) -> Cost {
    sequence_cost_from(instance, sequence, 0)
}

pub fn sequence_load(instance: &Instance, sequence: &[JobId]) -> Time {
    sequence.iter().map(|&j| instance.job(j).p).sum()
}

/// One job sequence per machine with the cached total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    machines: Vec<Vec<JobId>>,
    cost: Cost,
}

impl Schedule {
    /// Validates that `machines` partitions the instance's jobs and evaluates it.
    pub fn new(instance: &Instance, machines: Vec<Vec<JobId>>) -> Result<Self, ModelError> {
        check_partition(instance, &machines)?;
        let cost = machines.iter().map(|s| sequence_cost(instance, s)).sum();
        Ok(Self { machines, cost })
    }

    /// Builds a schedule whose validity the caller guarantees; checked in debug builds.
    pub(crate) fn from_parts(instance: &Instance, machines: Vec<Vec<JobId>>) -> Self {
        debug_assert_eq!(check_partition(instance, &machines), Ok(()));
        let cost = machines.iter().map(|s| sequence_cost(instance, s)).sum();
        Self { machines, cost }
    }

    #[inline]
    pub fn cost(&self) -> Cost {
        self.cost
    }

    #[inline]
    pub fn machines(&self) -> &[Vec<JobId>] {
        &self.machines
    }

    #[inline]
    pub fn machine(&self, k: usize) -> &[JobId] {
        &self.machines[k]
    }

    pub fn into_machines(self) -> Vec<Vec<JobId>> {
        self.machines
    }

    /// Replaces the sequences of some machines and refreshes the cached cost.
    ///
    /// The new sequences must hold the same jobs in total as the replaced ones.
    pub(crate) fn replace_machines(&mut self, instance: &Instance, updates: Vec<(usize, Vec<JobId>)>) {
        for (k, seq) in updates {
            self.cost -= sequence_cost(instance, &self.machines[k]);
            self.cost += sequence_cost(instance, &seq);
            self.machines[k] = seq;
        }
        debug_assert_eq!(check_partition(instance, &self.machines), Ok(()));
        debug_assert_eq!(Ok(self.cost), evaluate(instance, &self.machines));
    }

    /// Completion time of every job, indexed by job id.
    pub fn completion_times(&self, instance: &Instance) -> Vec<Time> {
        let mut completion = vec![0; instance.n()];
        for seq in &self.machines {
            let mut t = 0;
            for &j in seq {
                t += instance.job(j).p;
                completion[j] = t;
            }
        }
        completion
    }

    /// Start time of every job, indexed by job id.
    pub fn start_times(&self, instance: &Instance) -> Vec<Time> {
        let mut start = vec![0; instance.n()];
        for seq in &self.machines {
            let mut t = 0;
            for &j in seq {
                start[j] = t;
                t += instance.job(j).p;
            }
        }
        start
    }

    pub fn loads(&self, instance: &Instance) -> Vec<Time> {
        self.machines.iter().map(|s| sequence_load(instance, s)).collect()
    }

    /// Flattens the schedule into one job list ordered by start time, ties broken by machine index.
    ///
    /// Dispatching this list reproduces the schedule whenever the schedule is itself the result of
    /// a dispatch, which makes it the natural working sequence for sequence-level neighborhoods.
    pub fn linearize(&self, instance: &Instance) -> Vec<JobId> {
        let start = self.start_times(instance);
        let mut order: Vec<(Time, usize, usize, JobId)> = self
            .machines
            .iter()
            .enumerate()
            .flat_map(|(k, seq)| seq.iter().enumerate().map(move |(pos, &j)| (k, pos, j)))
            .map(|(k, pos, j)| (start[j], k, pos, j))
            .collect();
        order.sort_unstable();
        order.into_iter().map(|(_, _, _, j)| j).collect()
    }

    /// Recomputes the cost from scratch and checks it against the cached value.
    pub fn verify(&self, instance: &Instance) -> Result<(), ModelError> {
        let cost = evaluate(instance, &self.machines)?;
        assert_eq!(cost, self.cost, "cached schedule cost is stale");
        Ok(())
    }
}

fn check_partition(instance: &Instance, machines: &[Vec<JobId>]) -> Result<(), ModelError> {
    if machines.len() != instance.m() {
        return Err(ModelError::MachineCount { expected: instance.m(), found: machines.len() });
    }
    let n = instance.n();
    let mut seen = vec![false; n];
    for &j in machines.iter().flatten() {
        if j >= n {
            return Err(ModelError::UnknownJob(j, n));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(ModelError::DuplicateJob(j));
        }
    }
    match seen.iter().position(|s| !s) {
        Some(j) => Err(ModelError::MissingJob(j)),
        None => Ok(()),
    }
}

/// Total weighted tardiness `Σ wj·max{Cj − dj, 0}` of a set of machine sequences, each processed
/// from time 0 without idle time.
pub fn evaluate(instance: &Instance, machines: &[Vec<JobId>]) -> Result<Cost, ModelError> {
    check_partition(instance, machines)?;
    Ok(machines.iter().map(|s| sequence_cost(instance, s)).sum())
}

/// Checks that `sequence` is a permutation of the instance's jobs.
pub fn check_permutation(instance: &Instance, sequence: &[JobId]) -> Result<(), ModelError> {
    let n = instance.n();
    let mut seen = vec![false; n];
    for &j in sequence {
        if j >= n {
            return Err(ModelError::UnknownJob(j, n));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(ModelError::DuplicateJob(j));
        }
    }
    match seen.iter().position(|s| !s) {
        Some(j) => Err(ModelError::MissingJob(j)),
        None => Ok(()),
    }
}

/// Assigns the jobs of `sequence` in order, each to the machine with the smallest current load.
/// Ties go to the lowest machine index.
pub fn dispatch(instance: &Instance, sequence: &[JobId]) -> Result<Schedule, ModelError> {
    check_permutation(instance, sequence)?;
    Ok(dispatch_unchecked(instance, sequence))
}

pub(crate) fn dispatch_unchecked(instance: &Instance, sequence: &[JobId]) -> Schedule {
    let m = instance.m();
    let mut machines = vec![Vec::with_capacity(sequence.len() / m + 1); m];
    let mut cost = 0;
    let mut loads: BinaryHeap<Reverse<(Time, usize)>> = (0..m).map(|k| Reverse((0, k))).collect();
    for &j in sequence {
        let Reverse((load, k)) = loads.pop().expect("at least one machine");
        let job = instance.job(j);
        let completion = load + job.p;
        cost += job.tardiness_cost(completion);
        machines[k].push(j);
        loads.push(Reverse((completion, k)));
    }
    Schedule { machines, cost }
}

/// Cost of the dispatched schedule of `sequence` without materializing it.
pub(crate) fn dispatch_cost(instance: &Instance, sequence: &[JobId], heap: &mut BinaryHeap<Reverse<(Time, usize)>>) -> Cost {
    heap.clear();
    heap.extend((0..instance.m()).map(|k| Reverse((0, k))));
    let mut cost = 0;
    for &j in sequence {
        let Reverse((load, k)) = heap.pop().expect("at least one machine");
        let job = instance.job(j);
        let completion = load + job.p;
        cost += job.tardiness_cost(completion);
        heap.push(Reverse((completion, k)));
    }
    cost
}

/// Jobs sorted by nondecreasing due date, ties by job id.
pub fn edd_sequence(instance: &Instance) -> Vec<JobId> {
    let mut seq: Vec<JobId> = (0..instance.n()).collect();
    seq.sort_by_key(|&j| (instance.job(j).d, j));
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inst(p: &[Time], w: &[Cost], d: &[Time], m: usize) -> Instance {
        Instance::from_columns(p, w, d, m).unwrap()
    }

    #[test]
    fn evaluate_single_machine() {
        let instance = inst(&[2, 3], &[1, 2], &[2, 2], 1);
        let s = Schedule::new(&instance, vec![vec![0, 1]]).unwrap();
        assert_eq!(s.completion_times(&instance), vec![2, 5]);
        assert_eq!(s.cost(), 6);
    }

    #[test]
    fn evaluate_two_machines() {
        let instance = inst(&[4, 1, 2, 3], &[1, 2, 1, 1], &[2, 2, 2, 2], 2);
        let s = Schedule::new(&instance, vec![vec![0], vec![1, 2, 3]]).unwrap();
        assert_eq!(s.completion_times(&instance), vec![4, 1, 3, 6]);
        assert_eq!(s.cost(), 7);
    }

    #[test]
    fn loose_due_dates_cost_nothing() {
        let instance = inst(&[3, 5, 7], &[4, 4, 4], &[15, 15, 15], 2);
        for machines in [vec![vec![0, 1, 2], vec![]], vec![vec![2], vec![1, 0]]] {
            assert_eq!(evaluate(&instance, &machines), Ok(0));
        }
    }

    #[test]
    fn rejects_bad_partitions() {
        let instance = inst(&[1, 1, 1], &[1, 1, 1], &[0, 0, 0], 2);
        assert_eq!(evaluate(&instance, &[vec![0, 1], vec![1, 2]]), Err(ModelError::DuplicateJob(1)));
        assert_eq!(evaluate(&instance, &[vec![0], vec![2]]), Err(ModelError::MissingJob(1)));
        assert_eq!(evaluate(&instance, &[vec![0, 1, 2, 3], vec![]]), Err(ModelError::UnknownJob(3, 3)));
        assert!(matches!(evaluate(&instance, &[vec![0, 1, 2]]), Err(ModelError::MachineCount { .. })));
    }

    #[test]
    fn rejects_invalid_jobs() {
        assert!(Instance::from_columns(&[0], &[1], &[0], 1).is_err());
        assert!(Instance::from_columns(&[1], &[0], &[0], 1).is_err());
        assert!(Instance::from_columns(&[1], &[1], &[-1], 1).is_err());
        assert_eq!(Instance::from_columns(&[1], &[1], &[0], 0), Err(ModelError::NoMachines));
    }

    #[test]
    fn dispatch_earliest_available_machine() {
        let instance = inst(&[4, 1, 2, 3], &[1, 1, 1, 1], &[0, 0, 0, 0], 2);
        let s = dispatch(&instance, &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.machines(), &[vec![0], vec![1, 2, 3]]);
        assert_eq!(s.loads(&instance), vec![4, 6]);
    }

    #[test]
    fn dispatch_single_machine_keeps_order() {
        let instance = inst(&[4, 1, 2, 3], &[1, 1, 1, 1], &[0, 0, 0, 0], 1);
        let s = dispatch(&instance, &[2, 0, 3, 1]).unwrap();
        assert_eq!(s.machines(), &[vec![2, 0, 3, 1]]);
    }

    #[test]
    fn dispatch_more_machines_than_jobs() {
        let instance = inst(&[4, 1, 2], &[1, 1, 1], &[0, 0, 0], 5);
        let s = dispatch(&instance, &[0, 1, 2]).unwrap();
        assert_eq!(s.machines(), &[vec![0], vec![1], vec![2], vec![], vec![]]);
    }

    #[test]
    fn dispatch_rejects_non_permutation() {
        let instance = inst(&[1, 1], &[1, 1], &[0, 0], 1);
        assert_eq!(dispatch(&instance, &[0, 0]).unwrap_err(), ModelError::DuplicateJob(0));
        assert_eq!(dispatch(&instance, &[1]).unwrap_err(), ModelError::MissingJob(0));
    }

    #[test]
    fn edd_orders() {
        let by_d = |d: &[Time]| {
            let n = d.len();
            edd_sequence(&inst(&vec![1; n], &vec![1; n], d, 1))
        };
        assert_eq!(by_d(&[5, 3, 9]), vec![1, 0, 2]);
        assert_eq!(by_d(&[4, 4, 4]), vec![0, 1, 2]);
        assert_eq!(by_d(&[1, 2, 3]), vec![0, 1, 2]);
    }

    #[test]
    fn linearize_roundtrips_dispatched_schedules() {
        let instance = inst(&[4, 1, 2, 3, 5, 2], &[1; 6], &[0; 6], 3);
        let s = dispatch(&instance, &[3, 1, 0, 5, 2, 4]).unwrap();
        let again = dispatch(&instance, &s.linearize(&instance)).unwrap();
        assert_eq!(again, s);
    }

    fn arb_instance() -> impl Strategy<Value = (Instance, Vec<JobId>)> {
        (1usize..12, 1usize..5)
            .prop_flat_map(|(n, m)| {
                (
                    proptest::collection::vec((1i64..20, 1i64..10, 0i64..60), n),
                    Just(m),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                )
            })
            .prop_map(|(jobs, m, seq)| {
                let jobs = jobs.into_iter().map(|(p, w, d)| Job::new(p, w, d)).collect();
                (Instance::new(jobs, m).unwrap(), seq)
            })
    }

    proptest! {
        #[test]
        fn dispatch_balances_loads((instance, seq) in arb_instance()) {
            let s = dispatch(&instance, &seq).unwrap();
            let loads = s.loads(&instance);
            let max_p = instance.jobs.iter().map(|j| j.p).max().unwrap();
            let spread = loads.iter().max().unwrap() - loads.iter().min().unwrap();
            prop_assert!(spread <= max_p);
            prop_assert_eq!(evaluate(&instance, s.machines()), Ok(s.cost()));
        }

        #[test]
        fn cost_ignores_machine_labels((instance, seq) in arb_instance()) {
            let s = dispatch(&instance, &seq).unwrap();
            let mut machines = s.machines().to_vec();
            machines.reverse();
            prop_assert_eq!(evaluate(&instance, &machines), Ok(s.cost()));
        }
    }
}
