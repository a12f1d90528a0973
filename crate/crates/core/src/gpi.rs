//! Generalized pairwise interchange (GPI) operators and the staged first-improve exploration
//! of dispatched sequences.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::model::{dispatch_cost, Cost, Instance, JobId, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GpiKind {
    /// `α i π j ω → α j π i ω`
    Swap,
    /// `α i π j ω → α π j i ω`
    ForwardInsert,
    /// `α i π j ω → α j i π ω`
    BackwardInsert,
    /// `α i π j ω → α j π̄ i ω`
    Twist,
}

impl GpiKind {
    pub const ALL: [GpiKind; 4] = [GpiKind::Swap, GpiKind::ForwardInsert, GpiKind::BackwardInsert, GpiKind::Twist];
    /// The three operators of the plain GPI local search.
    pub const BASIC: [GpiKind; 3] = [GpiKind::Swap, GpiKind::ForwardInsert, GpiKind::BackwardInsert];
}

/// A GPI operator acting on zero-based positions `k < l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GpiMove {
    pub kind: GpiKind,
    pub k: usize,
    pub l: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GpiError {
    #[error("positions ({k}, {l}) invalid for a sequence of length {len}")]
    OutOfBounds { k: usize, l: usize, len: usize },
}

impl GpiMove {
    pub const fn new(kind: GpiKind, k: usize, l: usize) -> Self {
        Self { kind, k, l }
    }

    /// Applies the move in place.
    ///
    /// # Panics
    /// If `k >= l` or `l` is out of bounds.
    #[inline]
    pub fn apply_in_place<T>(&self, seq: &mut [T]) {
        let (k, l) = (self.k, self.l);
        assert!(k < l, "GPI move needs k < l");
        match self.kind {
            GpiKind::Swap => seq.swap(k, l),
            GpiKind::ForwardInsert => seq[k..=l].rotate_left(1),
            GpiKind::BackwardInsert => seq[k..=l].rotate_right(1),
            GpiKind::Twist => seq[k..=l].reverse(),
        }
    }
}

pub fn apply_gpi(sequence: &[JobId], mv: GpiMove) -> Result<Vec<JobId>, GpiError> {
    if mv.k >= mv.l || mv.l >= sequence.len() {
        return Err(GpiError::OutOfBounds { k: mv.k, l: mv.l, len: sequence.len() });
    }
    let mut out = sequence.to_vec();
    mv.apply_in_place(&mut out);
    Ok(out)
}

/// Ordered position pair for stage `gamma` anchored at `i`: `i` and `(i + gamma) mod n`.
#[inline]
pub fn stage_pair(i: usize, gamma: usize, n: usize) -> (usize, usize) {
    let j = (i + gamma) % n;
    (i.min(j), i.max(j))
}

/// Cost of a candidate sequence, as seen by a sequence-level neighborhood.
pub trait SequenceCost {
    fn cost(&mut self, sequence: &[JobId]) -> Cost;
}

/// Cost of the dispatched schedule.
pub struct DispatchCost<'a> {
    instance: &'a Instance,
    heap: BinaryHeap<Reverse<(Time, usize)>>,
}

impl<'a> DispatchCost<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Self { instance, heap: BinaryHeap::with_capacity(instance.m()) }
    }
}

impl SequenceCost for DispatchCost<'_> {
    #[inline]
    fn cost(&mut self, sequence: &[JobId]) -> Cost {
        dispatch_cost(self.instance, sequence, &mut self.heap)
    }
}

impl<F: FnMut(&[JobId]) -> Cost> SequenceCost for F {
    fn cost(&mut self, sequence: &[JobId]) -> Cost {
        self(sequence)
    }
}

/// Counters shared by the sequence explorations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExploreStats {
    pub evaluations: u64,
    pub improvements: u64,
}

/// One stage of the GPI neighborhood: for every anchor `i` (scanned in random order) and every
/// operator in `kinds`, the neighbor obtained on positions `i` and `i + gamma mod n`.
///
/// Returns the first neighbor whose cost is strictly below `current`, with its cost.
#[allow(clippy::too_many_arguments)]
pub fn explore_stage<C: SequenceCost, R: Rng>(
    sequence: &[JobId],
    current: Cost,
    gamma: usize,
    kinds: &[GpiKind],
    eval: &mut C,
    rng: &mut R,
    stats: &mut ExploreStats,
) -> Option<(Vec<JobId>, Cost)> {
    let n = sequence.len();
    if n < 2 || current == 0 {
        return None;
    }
    assert!((1..n).contains(&gamma), "stage {gamma} out of range for n = {n}");
    let mut anchors: Vec<usize> = (0..n).collect();
    anchors.shuffle(rng);
    let mut work = sequence.to_vec();
    for i in anchors {
        let (k, l) = stage_pair(i, gamma, n);
        for &kind in kinds {
            let mv = GpiMove::new(kind, k, l);
            work.copy_from_slice(sequence);
            mv.apply_in_place(&mut work);
            stats.evaluations += 1;
            let cost = eval.cost(&work);
            if cost < current {
                stats.improvements += 1;
                return Some((work, cost));
            }
        }
    }
    None
}

/// Stage exploration with the dispatch evaluator and all four operators.
pub fn explore_n1<R: Rng>(instance: &Instance, sequence: &[JobId], gamma: usize, rng: &mut R) -> Option<Vec<JobId>> {
    let mut eval = DispatchCost::new(instance);
    let current = eval.cost(sequence);
    explore_stage(sequence, current, gamma, &GpiKind::ALL, &mut eval, rng, &mut ExploreStats::default())
        .map(|(seq, _)| seq)
}

/// First-improve descent through stages `gamma = 1, 2, …, n − 1`, restarting at stage 1 after
/// every improvement, until a complete sweep finds nothing.
///
/// `current` is the cost of the incumbent the neighbors must beat; it may differ from
/// `eval.cost(sequence)` when the incumbent is a schedule that the sequence does not reproduce
/// exactly. Returns the improved sequence and cost, or `None` when the first sweep fails.
/// `stop` is polled between stages.
#[allow(clippy::too_many_arguments)]
pub fn descend<C: SequenceCost, R: Rng>(
    sequence: &[JobId],
    current: Cost,
    kinds: &[GpiKind],
    eval: &mut C,
    rng: &mut R,
    stats: &mut ExploreStats,
    mut stop: impl FnMut() -> bool,
) -> Option<(Vec<JobId>, Cost)> {
    let n = sequence.len();
    let mut best: Option<(Vec<JobId>, Cost)> = None;
    let mut seq = sequence.to_vec();
    let mut cost = current;
    'sweep: loop {
        for gamma in 1..n {
            if stop() {
                break 'sweep;
            }
            if let Some((next, c)) = explore_stage(&seq, cost, gamma, kinds, eval, rng, stats) {
                seq.clone_from(&next);
                cost = c;
                best = Some((next, c));
                continue 'sweep;
            }
        }
        break;
    }
    best
}

/// Full N1 descent of a sequence under dispatch evaluation with all four operators.
pub fn full_descent_n1<R: Rng>(instance: &Instance, sequence: &[JobId], rng: &mut R) -> Vec<JobId> {
    full_descent_n1_with(instance, sequence, &GpiKind::ALL, rng)
}

pub fn full_descent_n1_with<R: Rng>(instance: &Instance, sequence: &[JobId], kinds: &[GpiKind], rng: &mut R) -> Vec<JobId> {
    let mut eval = DispatchCost::new(instance);
    let current = eval.cost(sequence);
    descend(sequence, current, kinds, &mut eval, rng, &mut ExploreStats::default(), || false)
        .map_or_else(|| sequence.to_vec(), |(seq, _)| seq)
}
