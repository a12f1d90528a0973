//! Single-machine GPI dynasearch.
//!
//! Moves acting on disjoint position intervals `[k, l]`, `[p, q]` with `l < p` do not interact:
//! a GPI move only permutes jobs inside its interval, so every job outside it keeps its
//! completion time. The best set of such independent moves is therefore found by a dynamic
//! program over sequence prefixes:
//!
//! ```text
//! F(0) = 0
//! F(k) = min( F(k−1) + c(k),  min over q < k and operator o of  F(q−1) + seg(q, k, o) )
//! ```
//!
//! where `c(k)` is the cost of the job at position `k` and `seg(q, k, o)` the cost of positions
//! `q..=k` after applying `o` on `(q, k)`, started at the unchanged prefix time.

use crate::gpi::{GpiKind, GpiMove};
use crate::model::{sequence_cost_from, Cost, Instance, JobId, Schedule, Time};

/// Result of one dynasearch step on a machine sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynasearchStep {
    pub sequence: Vec<JobId>,
    /// `F(L)`: cost of the returned sequence.
    pub cost: Cost,
    /// The independent moves applied, left to right.
    pub moves: Vec<GpiMove>,
}

/// Cost of positions `q..=k` of `seq` after applying `kind` on `(q, k)`, starting at `start`.
fn segment_cost(instance: &Instance, seq: &[JobId], q: usize, k: usize, kind: GpiKind, start: Time, buf: &mut Vec<JobId>) -> Cost {
    buf.clear();
    buf.extend_from_slice(&seq[q..=k]);
    GpiMove::new(kind, 0, k - q).apply_in_place(buf);
    sequence_cost_from(instance, buf, start)
}

/// Best combination of pairwise-independent GPI moves (all four operators) on one machine
/// sequence processed from time 0. Returns the sequence unchanged unless a strictly cheaper
/// combination exists.
pub fn dynasearch_step(instance: &Instance, seq: &[JobId]) -> DynasearchStep {
    dynasearch_step_with(instance, seq, &GpiKind::ALL)
}

pub fn dynasearch_step_with(instance: &Instance, seq: &[JobId], kinds: &[GpiKind]) -> DynasearchStep {
    let len = seq.len();
    let mut prefix = Vec::with_capacity(len + 1);
    prefix.push(0);
    for &j in seq {
        prefix.push(prefix.last().unwrap() + instance.job(j).p);
    }
    let mut f: Vec<Cost> = vec![0; len + 1];
    // choice[k + 1] = move ending at position k, if any
    let mut choice: Vec<Option<GpiMove>> = vec![None; len + 1];
    let mut buf = Vec::with_capacity(len);
    for k in 0..len {
        let mut best = f[k] + instance.job(seq[k]).tardiness_cost(prefix[k + 1]);
        let mut best_move = None;
        for q in 0..k {
            for &kind in kinds {
                let c = f[q] + segment_cost(instance, seq, q, k, kind, prefix[q], &mut buf);
                if c < best {
                    best = c;
                    best_move = Some(GpiMove::new(kind, q, k));
                }
            }
        }
        f[k + 1] = best;
        choice[k + 1] = best_move;
    }

    let mut moves = Vec::new();
    let mut k = len;
    while k > 0 {
        match choice[k] {
            Some(mv) => {
                moves.push(mv);
                k = mv.k;
            }
            None => k -= 1,
        }
    }
    moves.reverse();
    let mut sequence = seq.to_vec();
    for mv in &moves {
        mv.apply_in_place(&mut sequence);
    }
    debug_assert_eq!(sequence_cost_from(instance, &sequence, 0), f[len]);
    DynasearchStep { sequence, cost: f[len], moves }
}

/// Repeats dynasearch steps on one sequence until no strict improvement remains.
pub fn dynasearch_sequence(instance: &Instance, seq: &[JobId]) -> (Vec<JobId>, Cost) {
    let mut current = seq.to_vec();
    let mut cost = sequence_cost_from(instance, &current, 0);
    loop {
        let step = dynasearch_step(instance, &current);
        if step.cost >= cost {
            return (current, cost);
        }
        current = step.sequence;
        cost = step.cost;
    }
}

/// Dynasearch descent on every machine of the schedule. The job-to-machine assignment is kept.
pub fn dynasearch_descent(instance: &Instance, schedule: &Schedule) -> Schedule {
    let machines = schedule
        .machines()
        .iter()
        .map(|seq| if seq.len() < 2 { seq.clone() } else { dynasearch_sequence(instance, seq).0 })
        .collect();
    Schedule::from_parts(instance, machines)
}
