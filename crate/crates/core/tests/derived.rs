mod common;

use pmwt::dynasearch::{dynasearch_descent, dynasearch_step};
use pmwt::gpi::{explore_n1, full_descent_n1_with, GpiKind};
use pmwt::harness::{cmd_run, RunPlan, RunTask};
use pmwt::ils::{run, Budget, Mode, SearchConfig};
use pmwt::model::dispatch;
use pmwt::oracle;
use pmwt::parallel::n2_step;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{grid_instance, random_instance, random_permutation, random_schedule, recompute_cost};

#[test]
fn every_mode_stays_above_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..15 {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(1..=3);
        let instance = grid_instance(&mut rng, n, m);
        let optimum = oracle::solve_exact(&instance).unwrap().optimum;
        for mode in Mode::ALL {
            let report = run(&instance, &SearchConfig::new(mode, Budget::Iterations(10), case));
            assert_eq!(recompute_cost(&instance, report.best.machines()), report.best_cost);
            assert!(report.best_cost >= optimum, "{mode} below optimum");
        }
    }
}

#[test]
fn harness_records_are_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tasks: Vec<RunTask> = (0..3)
        .map(|i| RunTask { id: format!("t{i}"), instance: random_instance(&mut rng, 7, 2) })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let plan = RunPlan { modes: Mode::ALL.to_vec(), budget: Budget::Iterations(2), seeds: vec![3], jobs: 2 };
    let records = cmd_run(&tasks, &plan, &dir.path().join("r.jsonl")).unwrap();
    assert_eq!(records.len(), 9);
    for r in records {
        let task = tasks.iter().find(|t| t.id == r.instance).unwrap();
        assert!(r.best_cost >= oracle::solve_exact(&task.instance).unwrap().optimum);
    }
}

#[test]
fn n1_stage_returns_strictly_better_neighbor() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let n = rng.gen_range(2..=9);
        let m = rng.gen_range(1..=3);
        let instance = random_instance(&mut rng, n, m);
        let seq = random_permutation(&mut rng, n);
        let current = dispatch(&instance, &seq).unwrap().cost();
        let improvable = oracle::find_improving_gpi(&instance, &seq, &[0, 1, 2, 3]).is_some();
        let found = (1..n).find_map(|gamma| explore_n1(&instance, &seq, gamma, &mut rng));
        assert_eq!(found.is_some(), improvable);
        if let Some(next) = found {
            assert!(dispatch(&instance, &next).unwrap().cost() < current);
        }
    }
}

#[test]
fn basic_operator_descent_is_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let instance = random_instance(&mut rng, 12, 2);
        let seq = random_permutation(&mut rng, 12);
        let local = full_descent_n1_with(&instance, &seq, &GpiKind::BASIC, &mut rng);
        assert!(oracle::find_improving_gpi(&instance, &local, &[0, 1, 2]).is_none());
    }
}

#[test]
fn dynasearch_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let len = rng.gen_range(1..=8);
        let instance = random_instance(&mut rng, len, 1);
        let seq = random_permutation(&mut rng, len);
        assert_eq!(dynasearch_step(&instance, &seq).cost, oracle::enumerate_independent_move_sets(&instance, &seq).unwrap());
    }
}

#[test]
fn dynasearch_descent_never_worsens() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let instance = random_instance(&mut rng, 20, 3);
        let schedule = random_schedule(&mut rng, &instance);
        let refined = dynasearch_descent(&instance, &schedule);
        assert!(refined.cost() <= schedule.cost());
        for (a, b) in schedule.machines().iter().zip(refined.machines()) {
            let (mut a, mut b) = (a.clone(), b.clone());
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn n2_predicted_gain_is_realized() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let instance = random_instance(&mut rng, 30, 6);
        let schedule = random_schedule(&mut rng, &instance);
        if let Some(step) = n2_step(&instance, &schedule) {
            assert_eq!(schedule.cost() - recompute_cost(&instance, step.schedule.machines()), step.gain);
            assert!(oracle::has_improving_pair_move(&instance, &schedule).unwrap());
        } else {
            assert!(!oracle::has_improving_pair_move(&instance, &schedule).unwrap());
        }
    }
}
