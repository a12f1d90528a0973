//! Benchmark harness: instance batches on disk, timed runs appended to a results file, and
//! comparison tables computed from it.
//!
//! Files:
//!  - instance files in the native format (see [`crate::instances::to_native`])
//!  - `manifest.jsonl` next to a generated batch, one [`ManifestEntry`] per line
//!  - results files, one [`RunRecord`] JSON object per line, append-only

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ils::{run, Budget, Mode, SearchConfig};
use crate::instances::{self, GenParams, InstanceError, InstanceSpec};
use crate::model::{Cost, Instance, InstanceMeta};

pub const MANIFEST: &str = "manifest.jsonl";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Record { path: PathBuf, line: usize, source: serde_json::Error },
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: InstanceError },
    #[error(transparent)]
    Params(#[from] InstanceError),
    #[error("record for instance {0:?} has no (R, T) metadata")]
    MissingFactors(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_owned(), source }
}

/// One line of a batch manifest; enough to regenerate the instance byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub n: usize,
    pub m: usize,
    pub r_pct: u32,
    pub t_pct: u32,
    pub index: usize,
    pub seed: u64,
}

impl ManifestEntry {
    pub fn spec(&self) -> InstanceSpec {
        InstanceSpec { n: self.n, m: self.m, r_pct: self.r_pct, t_pct: self.t_pct, seed: self.seed }
    }

    pub fn regenerate(&self) -> Instance {
        instances::generate_one(&self.spec(), self.index)
    }
}

pub fn instance_file_name(spec: &InstanceSpec, index: usize) -> String {
    format!("n{}_m{}_r{:03}_t{:03}_{:03}.txt", spec.n, spec.m, spec.r_pct, spec.t_pct, index)
}

/// Writes every instance of the batch plus its manifest into `out`. Returns the instance paths.
pub fn cmd_generate(params: &GenParams, out: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    params.validate()?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut manifest = String::new();
    let mut paths = Vec::new();
    for (index, spec) in params.specs().iter().enumerate() {
        let file = instance_file_name(spec, index);
        let path = out.join(&file);
        let instance = instances::generate_one(spec, index);
        fs::write(&path, instances::to_native(&instance)).map_err(io_err(&path))?;
        let entry = ManifestEntry { file, n: spec.n, m: spec.m, r_pct: spec.r_pct, t_pct: spec.t_pct, index, seed: spec.seed };
        manifest.push_str(&serde_json::to_string(&entry).expect("manifest entry serializes"));
        manifest.push('\n');
        paths.push(path);
    }
    let manifest_path = out.join(MANIFEST);
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    Ok(paths)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, HarnessError> {
    read_jsonl(path)
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|source| HarnessError::Record { path: path.to_owned(), line: i + 1, source })?;
        out.push(record);
    }
    Ok(out)
}

/// An instance queued for benchmarking, with the id used in results files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTask {
    pub id: String,
    pub instance: Instance,
}

/// Loads native instance files. Directories contribute their `*.txt` files in name order;
/// metadata is taken from a sibling `manifest.jsonl` when present.
pub fn load_tasks(paths: &[PathBuf]) -> Result<Vec<RunTask>, HarnessError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)
                .map_err(io_err(path))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "txt"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }
    let mut manifests: BTreeMap<PathBuf, BTreeMap<String, ManifestEntry>> = BTreeMap::new();
    let mut tasks = Vec::with_capacity(files.len());
    for file in files {
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        if !manifests.contains_key(&dir) {
            let manifest = dir.join(MANIFEST);
            let entries = if manifest.exists() { read_manifest(&manifest)? } else { Vec::new() };
            manifests.insert(dir.clone(), entries.into_iter().map(|e| (e.file.clone(), e)).collect());
        }
        let text = fs::read_to_string(&file).map_err(io_err(&file))?;
        let instance = instances::from_native(&text)
            .map_err(|source| HarnessError::Instance { path: file.clone(), source })?;
        let name = file.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let meta = match manifests[&dir].get(&name) {
            Some(e) => InstanceMeta::Generated { r_pct: e.r_pct, t_pct: e.t_pct, index: e.index, seed: e.seed },
            None => InstanceMeta::File { path: file.display().to_string() },
        };
        let id = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(name);
        tasks.push(RunTask { id, instance: instance.with_meta(meta) });
    }
    Ok(tasks)
}

/// OR-library file adapted to `m` machines; ids are `<file stem>#<1-based block>`.
pub fn orlib_tasks(path: &Path, n: usize, m: usize) -> Result<Vec<RunTask>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let name = path.display().to_string();
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| name.clone());
    let parsed = instances::load_orlib(&text, n, &name)
        .map_err(|source| HarnessError::Instance { path: path.to_owned(), source })?;
    parsed
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            Ok(RunTask { id: format!("{stem}#{}", i + 1), instance: instances::adapt_to_parallel(inst, m)? })
        })
        .collect()
}

/// One benchmark cell result; a line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_pct: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_pct: Option<u32>,
    pub mode: Mode,
    pub seed: u64,
    /// Wall-clock limit in seconds; absent for iteration-limited runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iteration_limit: Option<u64>,
    pub best_cost: Cost,
    pub time_to_best: f64,
    pub descents: u64,
    pub iterations: u64,
}

impl RunRecord {
    pub fn to_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("record serializes");
        line.push('\n');
        line
    }

    fn key(&self) -> CellKey {
        (self.instance.clone(), self.mode, self.seed, self.time_limit.map(f64::to_bits), self.iteration_limit)
    }
}

type CellKey = (String, Mode, u64, Option<u64>, Option<u64>);

pub fn read_results(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_jsonl(path)
}

fn budget_fields(budget: Budget) -> (Option<f64>, Option<u64>) {
    match budget {
        Budget::Time(d) => (Some(d.as_secs_f64()), None),
        Budget::Iterations(k) => (None, Some(k)),
    }
}

/// Options of a batch run.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub modes: Vec<Mode>,
    pub budget: Budget,
    pub seeds: Vec<u64>,
    /// Worker threads; cells are independent.
    pub jobs: usize,
}

impl RunPlan {
    pub fn timed(modes: Vec<Mode>, seconds: f64, seeds: Vec<u64>) -> Self {
        Self { modes, budget: Budget::Time(Duration::from_secs_f64(seconds)), seeds, jobs: 1 }
    }
}

/// Runs every `(instance, mode, seed)` cell not already present in `results`, appending one
/// record per finished cell. Returns the new records in completion order.
pub fn cmd_run(tasks: &[RunTask], plan: &RunPlan, results: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let (time_limit, iteration_limit) = budget_fields(plan.budget);
    let done: HashSet<CellKey> = read_results(results)?.iter().map(RunRecord::key).collect();
    let mut cells = Vec::new();
    for task in tasks {
        for &mode in &plan.modes {
            for &seed in &plan.seeds {
                let key = (task.id.clone(), mode, seed, time_limit.map(f64::to_bits), iteration_limit);
                if !done.contains(&key) {
                    cells.push((task, mode, seed));
                }
            }
        }
    }
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(dir) = results.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let file = OpenOptions::new().create(true).append(true).open(results).map_err(io_err(results))?;
    let sink = Mutex::new((file, Vec::new()));
    let next = AtomicUsize::new(0);
    let failure: Mutex<Option<HarnessError>> = Mutex::new(None);

    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(task, mode, seed)) = cells.get(i) else { break };
        let report = run(&task.instance, &SearchConfig::new(mode, plan.budget, seed));
        let (r_pct, t_pct) = match task.instance.meta {
            InstanceMeta::Generated { r_pct, t_pct, .. } => (Some(r_pct), Some(t_pct)),
            _ => (None, None),
        };
        let record = RunRecord {
            instance: task.id.clone(),
            n: task.instance.n(),
            m: task.instance.m(),
            r_pct,
            t_pct,
            mode,
            seed,
            time_limit,
            iteration_limit,
            best_cost: report.best_cost,
            time_to_best: report.time_to_best,
            descents: report.descents,
            iterations: report.iterations,
        };
        let mut guard = sink.lock().unwrap();
        let (file, records) = &mut *guard;
        if let Err(source) = file.write_all(record.to_line().as_bytes()).and_then(|_| file.flush()) {
            failure.lock().unwrap().get_or_insert(HarnessError::Io { path: results.to_owned(), source });
            break;
        }
        records.push(record);
    };
    std::thread::scope(|scope| {
        for _ in 1..plan.jobs.max(1) {
            scope.spawn(worker);
        }
        worker();
    });
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(sink.into_inner().unwrap().1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    /// `(n, m)`
    Size,
    /// `(R, T)`
    Factors,
}

/// Aggregates of one algorithm within one group.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSummary {
    pub dev_avg: f64,
    pub dev_max: f64,
    pub bests: usize,
    pub cpu_avg: f64,
    pub descents_avg: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub group: (u64, u64),
    pub summaries: BTreeMap<Mode, ModeSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub group_by: GroupBy,
    pub modes: Vec<Mode>,
    pub rows: Vec<TableRow>,
}

/// Percent deviation of `cost` from `best`. A zero best counts as 1 in the denominator so that
/// `0/0` is 0 and other deviations from a zero optimum stay finite.
pub fn deviation(cost: Cost, best: Cost) -> f64 {
    100.0 * (cost - best) as f64 / best.max(1) as f64
}

/// Builds the comparison table. The reference value of a cell (instance, seed, budget) is the
/// best cost any algorithm reached in it. With `strict_wins` an algorithm only scores a best
/// when it beats every other algorithm of the cell; otherwise ties credit everyone tied.
pub fn cmd_table(records: &[RunRecord], group_by: GroupBy, strict_wins: bool) -> Result<ComparisonTable, HarnessError> {
    type Cell = (String, u64, Option<u64>, Option<u64>);
    let mut cells: BTreeMap<Cell, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.instance.clone(), r.seed, r.time_limit.map(f64::to_bits), r.iteration_limit);
        cells.entry(key).or_default().push(r);
    }
    let modes: Vec<Mode> = records.iter().map(|r| r.mode).collect::<std::collections::BTreeSet<_>>().into_iter().collect();

    #[derive(Default)]
    struct Acc {
        devs: Vec<f64>,
        bests: usize,
        cpu: f64,
        descents: f64,
    }
    let mut groups: BTreeMap<(u64, u64), BTreeMap<Mode, Acc>> = BTreeMap::new();
    for runs in cells.values() {
        let best = runs.iter().map(|r| r.best_cost).min().expect("non-empty cell");
        let at_best = runs.iter().filter(|r| r.best_cost == best).count();
        for r in runs {
            let group = match group_by {
                GroupBy::Size => (r.n as u64, r.m as u64),
                GroupBy::Factors => match (r.r_pct, r.t_pct) {
                    (Some(rr), Some(tt)) => (rr as u64, tt as u64),
                    _ => return Err(HarnessError::MissingFactors(r.instance.clone())),
                },
            };
            let acc = groups.entry(group).or_default().entry(r.mode).or_default();
            acc.devs.push(deviation(r.best_cost, best));
            let wins = r.best_cost == best && (!strict_wins || at_best == 1);
            acc.bests += usize::from(wins);
            acc.cpu += r.time_to_best;
            acc.descents += r.descents as f64;
        }
    }
    let rows = groups
        .into_iter()
        .map(|(group, per_mode)| TableRow {
            group,
            summaries: per_mode
                .into_iter()
                .map(|(mode, acc)| {
                    let k = acc.devs.len() as f64;
                    let summary = ModeSummary {
                        dev_avg: acc.devs.iter().sum::<f64>() / k,
                        dev_max: acc.devs.iter().copied().fold(0.0, f64::max),
                        bests: acc.bests,
                        cpu_avg: acc.cpu / k,
                        descents_avg: acc.descents / k,
                        runs: acc.devs.len(),
                    };
                    (mode, summary)
                })
                .collect(),
        })
        .collect();
    Ok(ComparisonTable { group_by, modes, rows })
}

impl ComparisonTable {
    fn group_headers(&self) -> [&'static str; 2] {
        match self.group_by {
            GroupBy::Size => ["n", "m"],
            GroupBy::Factors => ["R", "T"],
        }
    }

    fn group_cells(&self, group: (u64, u64)) -> [String; 2] {
        match self.group_by {
            GroupBy::Size => [group.0.to_string(), group.1.to_string()],
            GroupBy::Factors => [format!("{:.1}", group.0 as f64 / 100.0), format!("{:.1}", group.1 as f64 / 100.0)],
        }
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.group_headers().iter().map(|s| s.to_string()).collect();
        for metric in ["dev_avg", "dev_max", "bests", "cpu_best", "descents"] {
            for mode in &self.modes {
                h.push(format!("{metric}_{mode}"));
            }
        }
        h
    }

    fn body(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let mut cells: Vec<String> = self.group_cells(row.group).into();
                let get = |mode: &Mode, f: &dyn Fn(&ModeSummary) -> String| row.summaries.get(mode).map_or("-".to_owned(), f);
                let metrics: [&dyn Fn(&ModeSummary) -> String; 5] = [
                    &|s| format!("{:.1}", s.dev_avg),
                    &|s| format!("{:.1}", s.dev_max),
                    &|s| s.bests.to_string(),
                    &|s| format!("{:.2}", s.cpu_avg),
                    &|s| format!("{:.1}", s.descents_avg),
                ];
                for metric in metrics {
                    for mode in &self.modes {
                        cells.push(get(mode, metric));
                    }
                }
                cells
            })
            .collect()
    }

    /// Right-aligned plain text.
    pub fn render_text(&self) -> String {
        let header = self.header();
        let body = self.body();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: &[String]| -> String {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_owned() + "\n"
        };
        let mut out = line(&header);
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
        out.push('\n');
        for row in &body {
            out.push_str(&line(row));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for row in self.body() {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(instance: &str, mode: Mode, cost: Cost) -> RunRecord {
        RunRecord {
            instance: instance.into(),
            n: 10,
            m: 2,
            r_pct: Some(20),
            t_pct: Some(40),
            mode,
            seed: 1,
            time_limit: Some(1.0),
            iteration_limit: None,
            best_cost: cost,
            time_to_best: 0.5,
            descents: 4,
            iterations: 4,
        }
    }

    #[test]
    fn deviations() {
        let table = cmd_table(&[record("a", Mode::A1, 110), record("a", Mode::A3, 100)], GroupBy::Size, false).unwrap();
        let row = &table.rows[0];
        assert_eq!(row.summaries[&Mode::A1].dev_avg, 10.0);
        assert_eq!(row.summaries[&Mode::A3].dev_avg, 0.0);
        assert_eq!(row.summaries[&Mode::A3].bests, 1);
        assert_eq!(row.summaries[&Mode::A1].bests, 0);
    }

    #[test]
    fn ties_and_strict_wins() {
        let records = [record("a", Mode::A1, 50), record("a", Mode::A3, 50)];
        let shared = cmd_table(&records, GroupBy::Factors, false).unwrap();
        assert!(shared.rows[0].summaries.values().all(|s| s.bests == 1 && s.dev_max == 0.0));
        let strict = cmd_table(&records, GroupBy::Factors, true).unwrap();
        assert!(strict.rows[0].summaries.values().all(|s| s.bests == 0));
    }

    #[test]
    fn single_record_is_best() {
        let t = cmd_table(&[record("a", Mode::A2, 77)], GroupBy::Size, false).unwrap();
        assert_eq!(t.rows[0].summaries[&Mode::A2].dev_avg, 0.0);
        assert!(cmd_table(&[], GroupBy::Size, false).unwrap().rows.is_empty());
    }

    #[test]
    fn zero_over_zero() {
        assert_eq!(deviation(0, 0), 0.0);
        assert_eq!(deviation(3, 0), 300.0);
    }

    #[test]
    fn factors_required_for_rt_grouping() {
        let mut r = record("x", Mode::A1, 5);
        r.r_pct = None;
        assert!(matches!(cmd_table(&[r], GroupBy::Factors, false), Err(HarnessError::MissingFactors(_))));
    }

    #[test]
    fn record_line_roundtrip() {
        let r = record("n10_m2", Mode::A3, 12345);
        let line = r.to_line();
        let back: RunRecord = serde_json::from_str(line.trim_end()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_line(), line);
    }

    #[test]
    fn file_names() {
        let spec = InstanceSpec { n: 100, m: 4, r_pct: 20, t_pct: 100, seed: 0 };
        assert_eq!(instance_file_name(&spec, 7), "n100_m4_r020_t100_007.txt");
    }
}
