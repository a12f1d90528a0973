//! Exhaustive reference procedures for small inputs.
//!
//! Nothing here shares code with the search modules beyond the objective itself: operators are
//! re-applied by hand and candidate costs are recomputed from scratch.

use thiserror::Error;

use crate::model::{dispatch, sequence_cost, Cost, Instance, JobId, Schedule};

pub const MAX_EXACT_JOBS: usize = 12;
pub const MAX_MOVE_SET_LEN: usize = 10;
pub const MAX_PAIR_JOBS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} of size {size} exceeds the oracle limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: Cost,
    pub witness: Schedule,
    /// Dynamic program transitions examined.
    pub nodes: u64,
}

/// Exact optimum for `n ≤ 12`.
///
/// First the best single-machine cost of every job subset (`best[S] = min over last job j of
/// best[S − j] + wj·max{P(S) − dj, 0}`), then the best split of the full set into at most `m`
/// subsets.
pub fn solve_exact(instance: &Instance) -> Result<OracleResult, OracleError> {
    let n = instance.n();
    if n > MAX_EXACT_JOBS {
        return Err(OracleError::TooLarge { what: "instance", size: n, limit: MAX_EXACT_JOBS });
    }
    let full = (1usize << n) - 1;
    let mut nodes = 0u64;

    let mut load = vec![0i64; full + 1];
    for mask in 1..=full {
        let j = mask.trailing_zeros() as usize;
        load[mask] = load[mask & (mask - 1)] + instance.job(j).p;
    }
    let mut single = vec![Cost::MAX; full + 1];
    let mut last = vec![usize::MAX; full + 1];
    single[0] = 0;
    for mask in 1..=full {
        for j in (0..n).filter(|j| mask & (1 << j) != 0) {
            nodes += 1;
            let c = single[mask ^ (1 << j)] + instance.job(j).tardiness_cost(load[mask]);
            if c < single[mask] {
                single[mask] = c;
                last[mask] = j;
            }
        }
    }

    // split[k][mask]: best cost of `mask` on k machines
    let m = instance.m().min(n.max(1));
    let mut split = vec![single.clone()];
    let mut part = vec![vec![full + 1; full + 1]];
    for _ in 1..m {
        let prev = split.last().unwrap();
        let mut cur = prev.clone();
        let mut cut = vec![full + 1; full + 1];
        for mask in 1..=full {
            let low = mask & mask.wrapping_neg();
            let mut sub = mask;
            while sub != 0 {
                // the machine holding the lowest job takes `sub`
                if sub & low != 0 {
                    nodes += 1;
                    let c = single[sub] + prev[mask ^ sub];
                    if c < cur[mask] {
                        cur[mask] = c;
                        cut[mask] = sub;
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        split.push(cur);
        part.push(cut);
    }

    let mut machines = vec![Vec::new(); instance.m()];
    let mut mask = full;
    let mut machine = 0;
    for k in (0..m).rev() {
        if mask == 0 {
            break;
        }
        let sub = if k == 0 {
            mask
        } else if part[k][mask] <= full {
            part[k][mask]
        } else {
            continue;
        };
        let mut seq = Vec::new();
        let mut s = sub;
        while s != 0 {
            let j = last[s];
            seq.push(j);
            s ^= 1 << j;
        }
        seq.reverse();
        machines[machine] = seq;
        machine += 1;
        mask ^= sub;
    }
    let witness = Schedule::new(instance, machines).expect("oracle witness is a partition");
    let optimum = split[m - 1][full];
    assert_eq!(witness.cost(), optimum);
    Ok(OracleResult { optimum, witness, nodes })
}

/// Operator index: 0 swap, 1 forward insertion, 2 backward insertion, 3 twist.
fn apply_op(seq: &mut [JobId], op: usize, k: usize, l: usize) {
    match op {
        0 => seq.swap(k, l),
        1 => {
            let first = seq[k];
            for t in k..l {
                seq[t] = seq[t + 1];
            }
            seq[l] = first;
        }
        2 => {
            let last = seq[l];
            for t in (k..l).rev() {
                seq[t + 1] = seq[t];
            }
            seq[k] = last;
        }
        3 => {
            let (mut a, mut b) = (k, l);
            while a < b {
                seq.swap(a, b);
                a += 1;
                b -= 1;
            }
        }
        _ => unreachable!("operator index"),
    }
}

/// Minimum cost reachable from a single machine sequence by one set of pairwise-independent
/// GPI moves (any of the four operators), by plain enumeration of all such sets.
pub fn enumerate_independent_move_sets(instance: &Instance, seq: &[JobId]) -> Result<Cost, OracleError> {
    if seq.len() > MAX_MOVE_SET_LEN {
        return Err(OracleError::TooLarge { what: "sequence", size: seq.len(), limit: MAX_MOVE_SET_LEN });
    }
    fn walk(instance: &Instance, from: usize, work: &mut Vec<JobId>, best: &mut Cost) {
        let len = work.len();
        *best = (*best).min(sequence_cost(instance, work));
        for k in from..len {
            for l in k + 1..len {
                for op in 0..4 {
                    let saved = work[k..=l].to_vec();
                    apply_op(work, op, k, l);
                    walk(instance, l + 1, work, best);
                    work[k..=l].copy_from_slice(&saved);
                }
            }
        }
    }
    let mut best = Cost::MAX;
    walk(instance, 0, &mut seq.to_vec(), &mut best);
    Ok(best)
}

/// Largest gain over every transfer and exchange between machines `m1` and `m2` and every
/// combination of insertion slots. Zero or negative when nothing improves.
pub fn enumerate_pair_moves(instance: &Instance, schedule: &Schedule, m1: usize, m2: usize) -> Result<Cost, OracleError> {
    let (s1, s2) = (schedule.machine(m1), schedule.machine(m2));
    let size = s1.len() + s2.len();
    if size > MAX_PAIR_JOBS {
        return Err(OracleError::TooLarge { what: "machine pair", size, limit: MAX_PAIR_JOBS });
    }
    let before = sequence_cost(instance, s1) + sequence_cost(instance, s2);
    let removed = |seq: &[JobId], pos: usize| -> Vec<JobId> {
        let mut v = seq.to_vec();
        v.remove(pos);
        v
    };
    let inserted = |seq: &[JobId], slot: usize, job: JobId| -> Vec<JobId> {
        let mut v = seq.to_vec();
        v.insert(slot, job);
        v
    };
    let mut best = Cost::MIN;
    for (from, to) in [(s1, s2), (s2, s1)] {
        for a in 0..from.len() {
            let rest = removed(from, a);
            for slot in 0..=to.len() {
                let after = sequence_cost(instance, &rest) + sequence_cost(instance, &inserted(to, slot, from[a]));
                best = best.max(before - after);
            }
        }
    }
    for a in 0..s1.len() {
        for b in 0..s2.len() {
            let (rest1, rest2) = (removed(s1, a), removed(s2, b));
            for slot_j in 0..=rest1.len() {
                for slot_i in 0..=rest2.len() {
                    let after = sequence_cost(instance, &inserted(&rest1, slot_j, s2[b]))
                        + sequence_cost(instance, &inserted(&rest2, slot_i, s1[a]));
                    best = best.max(before - after);
                }
            }
        }
    }
    Ok(if best == Cost::MIN { 0 } else { best })
}

/// Brute-force maximum matching weight over all vertex-disjoint edge subsets.
pub fn brute_force_matching(machines: usize, edges: &[(usize, usize, Cost)]) -> Cost {
    fn go(edges: &[(usize, usize, Cost)], i: usize, used: u64, acc: Cost, best: &mut Cost) {
        if i == edges.len() {
            *best = (*best).max(acc);
            return;
        }
        go(edges, i + 1, used, acc, best);
        let (a, b, w) = edges[i];
        if used & (1 << a) == 0 && used & (1 << b) == 0 {
            go(edges, i + 1, used | 1 << a | 1 << b, acc + w, best);
        }
    }
    assert!(machines <= 64);
    let mut best = 0;
    go(edges, 0, 0, 0, &mut best);
    best
}

/// A strictly improving GPI neighbor of the dispatched `seq` over every position pair and
/// every operator in `ops` (indices as in the operator table above), if one exists.
pub fn find_improving_gpi(instance: &Instance, seq: &[JobId], ops: &[usize]) -> Option<Vec<JobId>> {
    let current = dispatch(instance, seq).ok()?.cost();
    let n = seq.len();
    for k in 0..n {
        for l in k + 1..n {
            for &op in ops {
                let mut v = seq.to_vec();
                apply_op(&mut v, op, k, l);
                if dispatch(instance, &v).expect("permutation").cost() < current {
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Whether any machine pair admits a strictly improving transfer or exchange.
pub fn has_improving_pair_move(instance: &Instance, schedule: &Schedule) -> Result<bool, OracleError> {
    for a in 0..instance.m() {
        for b in a + 1..instance.m() {
            if enumerate_pair_moves(instance, schedule, a, b)? > 0 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
