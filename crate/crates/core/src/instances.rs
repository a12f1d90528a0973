//! Instance generation, OR-library ingestion and the native text format.
//!
//! Generated instances follow the classic single-machine scheme: `p` and `w` uniform in
//! `[1, 100]`, due dates uniform in `[(1 − T − R/2)·P, (1 − T + R/2)·P]` with `P = Σ p`, then
//! divided by `m` (rounded down) for the parallel-machine variant. The lower bound is clamped
//! at 0.
//!
//! Random numbers come from `ChaCha8Rng::seed_from_u64(seed)`; integers are drawn with
//! `Rng::gen_range`, which rejects out-of-zone samples instead of reducing modulo the range.
//! Per instance the draws are: all `p` in job order, then all `w`, then all `d`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Cost, Instance, InstanceMeta, Job, ModelError, Time};

/// The `R` and `T` values used by the standard benchmark sets, in hundredths.
pub const FACTOR_GRID: [u32; 5] = [20, 40, 60, 80, 100];

/// Instances drawn per `(R, T)` pair in a standard batch.
pub const INSTANCES_PER_PAIR: usize = 5;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("token {offset}: expected an integer, found {token:?}")]
    NotAnInteger { offset: usize, token: String },
    #[error("token count {count} is not a multiple of 3n = {block} (trailing block starts at token {offset})")]
    Truncated { count: usize, block: usize, offset: usize },
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    /// Due date range `R` in hundredths.
    pub r_pct: u32,
    /// Tardiness factor `T` in hundredths.
    pub t_pct: u32,
    pub seed: u64,
}

/// Parameters of a generated batch: `count` instances for every `(R, T)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub r_values: Vec<u32>,
    pub t_values: Vec<u32>,
    pub seed: u64,
    pub count: usize,
}

impl GenParams {
    /// The standard 25-pair, 125-instance batch.
    pub fn standard(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            r_values: FACTOR_GRID.to_vec(),
            t_values: FACTOR_GRID.to_vec(),
            seed,
            count: INSTANCES_PER_PAIR,
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.n == 0 || self.m == 0 {
            return Err(InstanceError::Params("n and m must be positive".into()));
        }
        if let Some(f) = self.r_values.iter().chain(&self.t_values).find(|&&f| f > 100) {
            return Err(InstanceError::Params(format!("factor {}/100 exceeds 1", f)));
        }
        Ok(())
    }

    /// The per-instance specs of the batch, in `(R, T, k)` lexicographic order.
    ///
    /// Instance number `i` of the batch gets seed `seed + (i + 1)·0x9E3779B97F4A7C15`
    /// (wrapping).
    pub fn specs(&self) -> Vec<InstanceSpec> {
        let mut specs = Vec::with_capacity(self.r_values.len() * self.t_values.len() * self.count);
        for &r_pct in &self.r_values {
            for &t_pct in &self.t_values {
                for _ in 0..self.count {
                    let i = specs.len() as u64;
                    let seed = self.seed.wrapping_add((i + 1).wrapping_mul(SEED_STRIDE));
                    specs.push(InstanceSpec { n: self.n, m: self.m, r_pct, t_pct, seed });
                }
            }
        }
        specs
    }
}

/// Raw single-machine due date interval `[lo, hi]` for total processing time `total`.
pub fn due_date_bounds(total: Time, r_pct: u32, t_pct: u32) -> (Time, Time) {
    let (r, t) = (r_pct as i64, t_pct as i64);
    // (1 − T ∓ R/2)·P = (200 − 2T ∓ R)·P / 200
    let lo = ((200 - 2 * t - r) * total).div_euclid(200);
    let hi = ((200 - 2 * t + r) * total).div_euclid(200);
    (lo.max(0), hi)
}

/// Draws one instance; `index` only feeds the metadata.
pub fn generate_one(spec: &InstanceSpec, index: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let p: Vec<Time> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
    let w: Vec<Cost> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
    let (lo, hi) = due_date_bounds(p.iter().sum(), spec.r_pct, spec.t_pct);
    let m = spec.m as Time;
    let d: Vec<Time> = (0..n).map(|_| rng.gen_range(lo..=hi) / m).collect();
    Instance::from_columns(&p, &w, &d, spec.m)
        .expect("generated data is valid")
        .with_meta(InstanceMeta::Generated { r_pct: spec.r_pct, t_pct: spec.t_pct, index, seed: spec.seed })
}

pub fn generate(params: &GenParams) -> Result<Vec<Instance>, InstanceError> {
    params.validate()?;
    Ok(params.specs().iter().enumerate().map(|(i, s)| generate_one(s, i)).collect())
}

/// Parses an OR-library weighted tardiness file: consecutive blocks of `3n` integers, each
/// holding the `n` processing times, then the `n` weights, then the `n` due dates.
/// Instances are returned with one machine.
pub fn load_orlib(text: &str, n: usize, file: &str) -> Result<Vec<Instance>, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Params("n must be positive".into()));
    }
    let values = text
        .split_ascii_whitespace()
        .enumerate()
        .map(|(offset, token)| {
            token
                .parse::<i64>()
                .map_err(|_| InstanceError::NotAnInteger { offset, token: token.to_owned() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let block = 3 * n;
    if values.len() % block != 0 {
        return Err(InstanceError::Truncated {
            count: values.len(),
            block,
            offset: values.len() / block * block,
        });
    }
    values
        .chunks_exact(block)
        .enumerate()
        .map(|(index, chunk)| {
            let (p, rest) = chunk.split_at(n);
            let (w, d) = rest.split_at(n);
            Ok(Instance::from_columns(p, w, d, 1)?
                .with_meta(InstanceMeta::OrLib { file: file.to_owned(), index }))
        })
        .collect()
}

/// Writes instances in the OR-library block layout, 20 numbers per line.
pub fn serialize_orlib(instances: &[Instance]) -> String {
    let mut out = String::new();
    for instance in instances {
        let columns: [Vec<i64>; 3] = [
            instance.jobs.iter().map(|j| j.p).collect(),
            instance.jobs.iter().map(|j| j.w).collect(),
            instance.jobs.iter().map(|j| j.d).collect(),
        ];
        for column in &columns {
            for line in column.chunks(20) {
                let line: Vec<String> = line.iter().map(|v| format!("{v:>5}")).collect();
                out.push_str(&line.join(""));
                out.push('\n');
            }
        }
    }
    out
}

/// Same `p` and `w`, due dates divided by `m` (rounded down), `m` machines.
pub fn adapt_to_parallel(instance: &Instance, m: usize) -> Result<Instance, InstanceError> {
    let jobs = instance
        .jobs
        .iter()
        .map(|j| Job::new(j.p, j.w, j.d.div_euclid(m.max(1) as Time)))
        .collect();
    Ok(Instance::new(jobs, m)?.with_meta(instance.meta.clone()))
}

/// Native text format: a header line `n m`, then one `p w d` line per job, LF-terminated.
pub fn to_native(instance: &Instance) -> String {
    let mut out = String::with_capacity(16 * (instance.n() + 1));
    let _ = writeln!(out, "{} {}", instance.n(), instance.m());
    for job in &instance.jobs {
        let _ = writeln!(out, "{} {} {}", job.p, job.w, job.d);
    }
    out
}

pub fn from_native(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let format_err = |line: usize, reason: &str| InstanceError::Format { line: line + 1, reason: reason.to_owned() };
    let (hl, header) = lines.next().ok_or_else(|| format_err(0, "missing header"))?;
    let header = parse_ints(header).map_err(|r| format_err(hl, &r))?;
    let [n, m] = header[..] else {
        return Err(format_err(hl, "header must be `n m`"));
    };
    if n < 0 || m < 1 {
        return Err(format_err(hl, "header values out of range"));
    }
    let mut jobs = Vec::with_capacity(n as usize);
    for (ln, line) in lines {
        let v = parse_ints(line).map_err(|r| format_err(ln, &r))?;
        let [p, w, d] = v[..] else {
            return Err(format_err(ln, "job line must be `p w d`"));
        };
        if jobs.len() == n as usize {
            return Err(format_err(ln, "more job lines than declared"));
        }
        jobs.push(Job::new(p, w, d));
    }
    if jobs.len() != n as usize {
        return Err(format_err(text.lines().count(), "fewer job lines than declared"));
    }
    Ok(Instance::new(jobs, m as usize)?)
}

fn parse_ints(line: &str) -> Result<Vec<i64>, String> {
    line.split_ascii_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| format!("not an integer: {t:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clamped_bounds() {
        // R = 0.2, T = 1.0: raw interval [−0.1P, 0.1P]
        assert_eq!(due_date_bounds(1000, 20, 100), (0, 100));
        assert_eq!(due_date_bounds(1000, 20, 20), (700, 900));
        assert_eq!(due_date_bounds(1001, 100, 100), (0, 500));
        assert_eq!(due_date_bounds(999, 60, 40), (299, 899));
    }

    #[test]
    fn generated_values_in_range() {
        let params = GenParams::standard(40, 1, 7);
        let instances = generate(&params).unwrap();
        assert_eq!(instances.len(), 125);
        for (inst, spec) in instances.iter().zip(params.specs()) {
            let (lo, hi) = due_date_bounds(inst.total_processing(), spec.r_pct, spec.t_pct);
            for j in &inst.jobs {
                assert!((1..=100).contains(&j.p) && (1..=100).contains(&j.w));
                assert!((lo..=hi).contains(&j.d));
            }
        }
    }

    #[test]
    fn scaling_divides_due_dates() {
        let one = generate_one(&InstanceSpec { n: 30, m: 1, r_pct: 60, t_pct: 40, seed: 3 }, 0);
        let four = generate_one(&InstanceSpec { n: 30, m: 4, r_pct: 60, t_pct: 40, seed: 3 }, 0);
        for (a, b) in one.jobs.iter().zip(&four.jobs) {
            assert_eq!((a.p, a.w, a.d / 4), (b.p, b.w, b.d));
        }
        assert_eq!(adapt_to_parallel(&one, 4).unwrap().jobs, four.jobs);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GenParams { count: 2, ..GenParams::standard(20, 3, 11) };
        assert_eq!(generate(&params).unwrap(), generate(&params).unwrap());
        let other = GenParams { seed: 12, ..params.clone() };
        assert_ne!(generate(&params).unwrap()[0].jobs, generate(&other).unwrap()[0].jobs);
    }

    #[test]
    fn orlib_blocks() {
        let tokens: Vec<String> = (1..=750).map(|v| v.to_string()).collect();
        let instances = load_orlib(&tokens.join(" "), 50, "x").unwrap();
        assert_eq!(instances.len(), 5);
        assert_eq!(instances[0].jobs[0], Job::new(1, 51, 101));
        assert_eq!(instances[1].jobs[49], Job::new(200, 250, 300));
        assert_eq!(instances[0].jobs.iter().map(|j| j.p).collect::<Vec<_>>(), (1..=50).collect::<Vec<_>>());
        assert!(load_orlib("", 50, "x").unwrap().is_empty());
        assert!(load_orlib(" \n\t ", 50, "x").unwrap().is_empty());
    }

    #[test]
    fn orlib_errors() {
        match load_orlib("1 2 3 4 5 6 7", 2, "x") {
            Err(InstanceError::Truncated { count: 7, block: 6, offset: 6 }) => {}
            other => panic!("{other:?}"),
        }
        match load_orlib("1 2 x 4 5 6", 2, "x") {
            Err(InstanceError::NotAnInteger { offset: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn adapt_floors() {
        let inst = Instance::from_columns(&[1, 1], &[1, 1], &[7, 10], 1).unwrap();
        let two = adapt_to_parallel(&inst, 2).unwrap();
        assert_eq!(two.jobs.iter().map(|j| j.d).collect::<Vec<_>>(), vec![3, 5]);
        assert_eq!(two.m(), 2);
        assert_eq!(adapt_to_parallel(&inst, 1).unwrap().jobs, inst.jobs);
        let zero = Instance::from_columns(&[5], &[1], &[0], 1).unwrap();
        assert_eq!(adapt_to_parallel(&zero, 7).unwrap().jobs[0].d, 0);
    }

    #[test]
    fn native_format() {
        let inst = Instance::from_columns(&[4, 1], &[2, 3], &[0, 9], 2).unwrap();
        let text = to_native(&inst);
        assert_eq!(text, "2 2\n4 2 0\n1 3 9\n");
        assert_eq!(from_native(&text).unwrap(), inst);
        assert!(from_native("2 2\n4 2 0\n").is_err());
        assert!(from_native("1 2\n4 2\n").is_err());
        assert!(from_native("1 0\n4 2 1\n").is_err());
    }

    fn arb_jobs() -> impl Strategy<Value = Vec<Job>> {
        proptest::collection::vec((1i64..1000, 1i64..1000, 0i64..100_000), 1..30)
            .prop_map(|v| v.into_iter().map(|(p, w, d)| Job::new(p, w, d)).collect())
    }

    proptest! {
        #[test]
        fn native_roundtrip(jobs in arb_jobs(), m in 1usize..30) {
            let inst = Instance::new(jobs, m).unwrap();
            let text = to_native(&inst);
            let back = from_native(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(to_native(&back), text);
        }

        #[test]
        fn orlib_roundtrip(batch in proptest::collection::vec(proptest::collection::vec((1i64..100, 1i64..100, 0i64..5000), 7), 0..4)) {
            let instances: Vec<Instance> = batch
                .into_iter()
                .map(|v| Instance::new(v.into_iter().map(|(p, w, d)| Job::new(p, w, d)).collect(), 1).unwrap())
                .collect();
            let back = load_orlib(&serialize_orlib(&instances), 7, "f").unwrap();
            prop_assert_eq!(back.len(), instances.len());
            for (a, b) in back.iter().zip(&instances) {
                prop_assert_eq!(&a.jobs, &b.jobs);
            }
        }
    }
}
