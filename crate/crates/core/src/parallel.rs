//! The parallel-machines neighborhood.
//!
//! For every pair of machines the best two-machine move is computed: a transfer of one job in
//! either direction, or an exchange of one job from each side, with every inserted job placed
//! at its cheapest slot. Pairs with a strictly positive gain form the edges of an improvement
//! graph on the machines. Moves on disjoint machine pairs do not interact, so any matching of
//! the graph can be applied at once and its weight is the exact cost decrease; a maximum-weight
//! matching gives the best neighbor.

use crate::model::{sequence_cost, Cost, Instance, JobId, Schedule, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMoveKind {
    /// Move `job` from the first machine into the second at `slot`.
    TransferAB { job: JobId, slot: usize },
    /// Move `job` from the second machine into the first at `slot`.
    TransferBA { job: JobId, slot: usize },
    /// Job `i` (first machine) goes to slot `slot_i` of the second machine without `j`, job `j`
    /// goes to slot `slot_j` of the first machine without `i`.
    Exchange { i: JobId, j: JobId, slot_i: usize, slot_j: usize },
}

/// A two-machine move with its gain (cost before minus cost after).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairMove {
    pub m1: usize,
    pub m2: usize,
    pub kind: PairMoveKind,
    pub delta: Cost,
}

impl PairMove {
    /// New sequences of `m1` and `m2` after the move.
    pub fn apply(&self, seq1: &[JobId], seq2: &[JobId]) -> (Vec<JobId>, Vec<JobId>) {
        let without = |seq: &[JobId], job: JobId| -> Vec<JobId> { seq.iter().copied().filter(|&x| x != job).collect() };
        match self.kind {
            PairMoveKind::TransferAB { job, slot } => {
                let mut b = seq2.to_vec();
                b.insert(slot, job);
                (without(seq1, job), b)
            }
            PairMoveKind::TransferBA { job, slot } => {
                let mut a = seq1.to_vec();
                a.insert(slot, job);
                (a, without(seq2, job))
            }
            PairMoveKind::Exchange { i, j, slot_i, slot_j } => {
                let mut a = without(seq1, i);
                let mut b = without(seq2, j);
                a.insert(slot_j, j);
                b.insert(slot_i, i);
                (a, b)
            }
        }
    }
}

/// Cheapest insertion slot for `job` into `seq` (machine starting at 0), in linear time.
///
/// Returns `(slot, cost of the resulting sequence)`; ties go to the lowest slot.
pub fn best_insertion(instance: &Instance, seq: &[JobId], job: JobId, scratch: &mut Vec<Cost>) -> (usize, Cost) {
    let len = seq.len();
    let inserted = instance.job(job);
    // scratch[s] = cost of seq[s..] delayed by the inserted job's processing time
    scratch.clear();
    scratch.resize(len + 1, 0);
    let total: Time = seq.iter().map(|&j| instance.job(j).p).sum();
    let mut end = total;
    for s in (0..len).rev() {
        let job = instance.job(seq[s]);
        scratch[s] = scratch[s + 1] + job.tardiness_cost(end + inserted.p);
        end -= job.p;
    }
    let mut best = (0, Cost::MAX);
    let mut prefix_cost = 0;
    let mut t = 0;
    for s in 0..=len {
        let c = prefix_cost + inserted.tardiness_cost(t + inserted.p) + scratch[s];
        if c < best.1 {
            best = (s, c);
        }
        if s < len {
            let job = instance.job(seq[s]);
            t += job.p;
            prefix_cost += job.tardiness_cost(t);
        }
    }
    best
}

fn without_position(seq: &[JobId], pos: usize, out: &mut Vec<JobId>) {
    out.clear();
    out.extend_from_slice(&seq[..pos]);
    out.extend_from_slice(&seq[pos + 1..]);
}

/// Positions of `seq` ordered by job id.
fn positions_by_id(seq: &[JobId]) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..seq.len()).collect();
    pos.sort_unstable_by_key(|&p| seq[p]);
    pos
}

/// Best strictly improving move between machines `m1` and `m2`, if any.
///
/// Candidates are scanned transfers `m1 → m2` first, then `m2 → m1`, then exchanges, each in
/// increasing job id order; a later candidate only wins with a strictly larger gain.
pub fn best_pair_move(instance: &Instance, schedule: &Schedule, m1: usize, m2: usize) -> Option<PairMove> {
    assert_ne!(m1, m2, "machine pair must be distinct");
    let (s1, s2) = (schedule.machine(m1), schedule.machine(m2));
    let (c1, c2) = (sequence_cost(instance, s1), sequence_cost(instance, s2));
    let before = c1 + c2;
    let mut best: Option<PairMove> = None;
    let mut consider = |kind: PairMoveKind, after: Cost| {
        let delta = before - after;
        if delta > 0 && best.is_none_or(|b| delta > b.delta) {
            best = Some(PairMove { m1, m2, kind, delta });
        }
    };
    let mut scratch = Vec::new();
    let mut rest1 = Vec::with_capacity(s1.len());
    let mut rest2 = Vec::with_capacity(s2.len());
    let (order1, order2) = (positions_by_id(s1), positions_by_id(s2));

    for &a in &order1 {
        without_position(s1, a, &mut rest1);
        let (slot, cost2) = best_insertion(instance, s2, s1[a], &mut scratch);
        consider(PairMoveKind::TransferAB { job: s1[a], slot }, sequence_cost(instance, &rest1) + cost2);
    }
    for &b in &order2 {
        without_position(s2, b, &mut rest2);
        let (slot, cost1) = best_insertion(instance, s1, s2[b], &mut scratch);
        consider(PairMoveKind::TransferBA { job: s2[b], slot }, cost1 + sequence_cost(instance, &rest2));
    }
    for &a in &order1 {
        without_position(s1, a, &mut rest1);
        for &b in &order2 {
            without_position(s2, b, &mut rest2);
            let (slot_j, cost1) = best_insertion(instance, &rest1, s2[b], &mut scratch);
            let (slot_i, cost2) = best_insertion(instance, &rest2, s1[a], &mut scratch);
            consider(PairMoveKind::Exchange { i: s1[a], j: s2[b], slot_i, slot_j }, cost1 + cost2);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementGraph {
    pub machines: usize,
    /// One edge per machine pair with a strictly positive gain, weight = `PairMove::delta`.
    pub edges: Vec<PairMove>,
}

impl ImprovementGraph {
    pub fn from_edges(machines: usize, edges: Vec<PairMove>) -> Self {
        Self { machines, edges }
    }
}

pub fn build_improvement_graph(instance: &Instance, schedule: &Schedule) -> ImprovementGraph {
    let m = instance.m();
    let mut edges = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if let Some(mv) = best_pair_move(instance, schedule, a, b) {
                edges.push(mv);
            }
        }
    }
    ImprovementGraph { machines: m, edges }
}

/// A set of vertex-disjoint edges, as indices into `ImprovementGraph::edges`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pub edges: Vec<usize>,
    pub weight: Cost,
}

/// Largest machine component handled by the subset dynamic program.
pub const MAX_COMPONENT: usize = 26;

/// Exact maximum-weight matching.
///
/// Each connected component is solved by a dynamic program over vertex subsets: the best
/// matching of a subset either leaves its lowest vertex unmatched or matches it to a neighbor.
///
/// # Panics
/// If a connected component has more than [`MAX_COMPONENT`] vertices.
pub fn best_matching(graph: &ImprovementGraph) -> Matching {
    let m = graph.machines;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (e, mv) in graph.edges.iter().enumerate() {
        assert!(mv.delta > 0, "improvement graph edges must have positive weight");
        adjacency[mv.m1].push((mv.m2, e));
        adjacency[mv.m2].push((mv.m1, e));
    }

    let mut component = vec![usize::MAX; m];
    let mut result = Matching::default();
    for root in 0..m {
        if component[root] != usize::MAX || adjacency[root].is_empty() {
            continue;
        }
        let mut members = vec![root];
        component[root] = root;
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            for &(u, _) in &adjacency[v] {
                if component[u] == usize::MAX {
                    component[u] = root;
                    members.push(u);
                }
            }
        }
        members.sort_unstable();
        let part = match_component(graph, &adjacency, &members);
        result.weight += part.weight;
        result.edges.extend(part.edges);
    }
    result.edges.sort_unstable();
    result
}

fn match_component(graph: &ImprovementGraph, adjacency: &[Vec<(usize, usize)>], members: &[usize]) -> Matching {
    let c = members.len();
    assert!(c <= MAX_COMPONENT, "matching component of {c} machines exceeds {MAX_COMPONENT}");
    let local = |v: usize| members.binary_search(&v).expect("vertex in component");
    // local adjacency: (neighbor bit, weight, edge index)
    let adj: Vec<Vec<(usize, Cost, usize)>> = members
        .iter()
        .map(|&v| adjacency[v].iter().map(|&(u, e)| (local(u), graph.edges[e].delta, e)).collect())
        .collect();

    let states = 1usize << c;
    let mut best: Vec<Cost> = vec![0; states];
    // choice[mask] = edge matched to the lowest vertex of mask, or NONE
    const NONE: u32 = u32::MAX;
    let mut choice: Vec<u32> = vec![NONE; states];
    for mask in 1..states {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << v);
        let mut value = best[rest];
        let mut pick = NONE;
        for &(u, w, e) in &adj[v] {
            if rest & (1 << u) != 0 {
                let candidate = w + best[rest & !(1 << u)];
                if candidate > value {
                    value = candidate;
                    pick = e as u32;
                }
            }
        }
        best[mask] = value;
        choice[mask] = pick;
    }

    let mut matching = Matching { edges: Vec::new(), weight: best[states - 1] };
    let mut mask = states - 1;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        mask &= !(1 << v);
        if choice[mask | (1 << v)] != NONE {
            let e = choice[mask | (1 << v)] as usize;
            let mv = &graph.edges[e];
            let other = if members[v] == mv.m1 { mv.m2 } else { mv.m1 };
            mask &= !(1 << local(other));
            matching.edges.push(e);
        }
    }
    matching
}

/// Outcome of one parallel-neighborhood step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct N2Step {
    pub schedule: Schedule,
    /// Matching weight, equal to the realized cost decrease.
    pub gain: Cost,
    pub moves: Vec<PairMove>,
}

/// Applies moves on pairwise disjoint machine pairs.
pub fn apply_pair_moves(instance: &Instance, schedule: &Schedule, moves: &[PairMove]) -> Schedule {
    let mut next = schedule.clone();
    let mut updates = Vec::with_capacity(2 * moves.len());
    for mv in moves {
        let (a, b) = mv.apply(schedule.machine(mv.m1), schedule.machine(mv.m2));
        updates.push((mv.m1, a));
        updates.push((mv.m2, b));
    }
    next.replace_machines(instance, updates);
    next
}

/// Best neighbor in the parallel-machines neighborhood, or `None` when no machine pair admits a
/// strictly improving move.
///
/// # Panics
/// If the realized cost decrease differs from the matching weight.
pub fn n2_step(instance: &Instance, schedule: &Schedule) -> Option<N2Step> {
    let graph = build_improvement_graph(instance, schedule);
    if graph.edges.is_empty() {
        return None;
    }
    let matching = best_matching(&graph);
    let moves: Vec<PairMove> = matching.edges.iter().map(|&e| graph.edges[e]).collect();
    let next = apply_pair_moves(instance, schedule, &moves);
    let realized = schedule.cost() - crate::model::evaluate(instance, next.machines()).expect("moves keep a partition");
    assert_eq!(realized, matching.weight, "matched pair moves must combine additively");
    Some(N2Step { schedule: next, gain: matching.weight, moves })
}

/// Repeats [`n2_step`] until no improving neighbor remains. Returns the local optimum and the
/// number of steps taken.
pub fn full_descent_n2(instance: &Instance, schedule: &Schedule) -> (Schedule, usize) {
    full_descent_n2_until(instance, schedule, || false)
}

pub fn full_descent_n2_until(instance: &Instance, schedule: &Schedule, mut stop: impl FnMut() -> bool) -> (Schedule, usize) {
    let mut current = schedule.clone();
    let mut steps = 0;
    while !stop() {
        match n2_step(instance, &current) {
            Some(step) => {
                debug_assert!(step.schedule.cost() < current.cost());
                current = step.schedule;
                steps += 1;
            }
            None => break,
        }
    }
    (current, steps)
}
