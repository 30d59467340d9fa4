//! Experiment matrices, result tables and variant comparisons.
//!
//! An experiment runs every configured problem `runs` times with seeds
//! `base_seed, base_seed + 1, ...` and writes three files to the output
//! directory:
//!
//! - `table.csv`: one row per problem with best, worst, median, mean and std
//!   of the thresholded error, at full precision;
//! - `table.txt`: the same numbers in `0.00E+00` notation;
//! - `records.jsonl`: one JSON object per run.
//!
//! Problems are builtin names (`rastrigin`) or shift-rotate references of
//! the form `base@file`, where `file` is resolved against the data directory
//! and holds the shift vector followed by the rotation matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{run, threshold_error, RunConfig, RunRecord, Variant};
use crate::problem::{Builtin, BuiltinKind, Objective, ShiftRotateProblem};

/// Above this many nonzero differences the signed-rank test uses the normal
/// approximation.
pub const EXACT_LIMIT: usize = 25;
/// Fewer nonzero differences than this make a comparison inconclusive.
pub const MIN_PAIRS: usize = 5;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub dim: usize,
    pub runs: usize,
    pub base_seed: u64,
    /// Evaluation budget per run; `10000·dim` when unset.
    pub budget: Option<u64>,
    pub variant: Variant,
    pub out_dir: PathBuf,
    pub data_dir: Option<PathBuf>,
    /// Worker threads; all cores when unset.
    pub jobs: Option<usize>,
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: BuiltinKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            dim: 10,
            runs: 25,
            base_seed: 1,
            budget: None,
            variant: Variant::Full,
            out_dir: PathBuf::from("results"),
            data_dir: None,
            jobs: None,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    /// Parses a `key = value` document. Blank lines and `#` comments are
    /// ignored; unknown keys are errors.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: n + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, found `{line}`")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Sets one field from its textual form. Shared by the file parser and
    /// command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{value}`")))
        }
        match key {
            "problems" | "problem" => {
                self.problems = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
            }
            "dim" => self.dim = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "seed" | "base_seed" => self.base_seed = num(key, value)?,
            "budget" => self.budget = Some(num(key, value)?),
            "variant" => self.variant = value.parse()?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "data_dir" | "data-dir" => self.data_dir = Some(PathBuf::from(value)),
            "jobs" => self.jobs = Some(num(key, value)?),
            "trace" => {
                self.trace = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::Config(format!("`trace` expects true or false, got `{value}`"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn budget(&self) -> u64 {
        self.budget.unwrap_or(10_000 * self.dim as u64)
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig::new(self.dim)
            .with_budget(self.budget())
            .with_variant(self.variant)
            .with_trace(self.trace)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::Config("no problems configured".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        self.run_config().validate()
    }

    /// Resolves every problem name, failing on the first unknown one.
    pub fn resolve_problems(&self) -> Result<Vec<Box<dyn Objective>>> {
        self.problems
            .iter()
            .map(|p| resolve_problem(p, self.dim, self.data_dir.as_deref()))
            .collect()
    }
}

/// Builtin by name, or `base@file` for a shift-rotated builtin.
pub fn resolve_problem(reference: &str, dim: usize, data_dir: Option<&Path>) -> Result<Box<dyn Objective>> {
    match reference.split_once('@') {
        None => Ok(Box::new(Builtin::by_name(reference, dim)?)),
        Some((base, file)) => {
            let base = Builtin::by_name(base, dim)?;
            let path = match data_dir {
                Some(d) => d.join(file),
                None => PathBuf::from(file),
            };
            if !path.is_file() {
                return Err(Error::Config(format!("data file {} not found", path.display())));
            }
            Ok(Box::new(
                ShiftRotateProblem::from_file(Box::new(base), &path, 0.0)?.with_name(reference),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub best: f64,
    pub worst: f64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

/// Best, worst, median, mean and sample standard deviation (0 for a single
/// value).
pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::invalid("cannot summarize an empty list"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("cannot summarize NaN"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    let mean = v.iter().sum::<f64>() / n as f64;
    let std = if n == 1 {
        0.0
    } else {
        (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Ok(Summary {
        best: v[0],
        worst: v[n - 1],
        median,
        mean,
        std,
    })
}

/// `8.08E+00` style: two decimals, signed two-digit exponent.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: String,
    pub best: f64,
    pub worst: f64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

impl ResultRow {
    pub fn summary(&self) -> Summary {
        Summary {
            best: self.best,
            worst: self.worst,
            median: self.median,
            mean: self.mean,
            std: self.std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, problem: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.problem == problem)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row).map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>().map_err(csv_err)?;
        Ok(Self { rows })
    }

    /// Fixed-width text rendering in `0.00E+00` notation.
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.problem.len()).max().unwrap_or(7).max(7);
        let mut s = format!(
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}\n",
            "problem", "best", "worst", "median", "mean", "std"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:<width$}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}\n",
                r.problem,
                format_sci(r.best),
                format_sci(r.worst),
                format_sci(r.median),
                format_sci(r.mean),
                format_sci(r.std)
            ));
        }
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Validation(format!("csv: {other:?}")),
    }
}

/// One run of one problem, as persisted in `records.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub problem: String,
    pub variant: String,
    pub run: usize,
    #[serde(flatten)]
    pub record: RunRecord,
}

impl RunEntry {
    pub fn error(&self) -> f64 {
        threshold_error(self.record.reported_error())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub table: ResultTable,
    /// Ordered by problem, then run.
    pub entries: Vec<RunEntry>,
}

impl ExperimentResult {
    pub fn errors(&self, problem: &str) -> Vec<f64> {
        self.entries.iter().filter(|e| e.problem == problem).map(RunEntry::error).collect()
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs the full problem × run matrix without writing anything.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let problems = cfg.resolve_problems()?;
    let base = cfg.run_config();
    let cells: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|p| (0..cfg.runs).map(move |r| (p, r)))
        .collect();
    let records = with_pool(cfg.jobs, || {
        cells
            .par_iter()
            .map(|&(p, r)| {
                let mut rc = base.clone();
                rc.seed = cfg.base_seed.wrapping_add(r as u64);
                run(problems[p].as_ref(), &rc)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let variant = cfg.variant.to_string();
    let entries: Vec<RunEntry> = cells
        .iter()
        .zip(records)
        .map(|(&(p, r), record)| RunEntry {
            problem: cfg.problems[p].clone(),
            variant: variant.clone(),
            run: r,
            record,
        })
        .collect();
    let mut table = ResultTable::default();
    for name in &cfg.problems {
        let errors: Vec<f64> = entries.iter().filter(|e| &e.problem == name).map(RunEntry::error).collect();
        let s = summarize(&errors)?;
        table.rows.push(ResultRow {
            problem: name.clone(),
            best: s.best,
            worst: s.worst,
            median: s.median,
            mean: s.mean,
            std: s.std,
        });
    }
    Ok(ExperimentResult { table, entries })
}

/// Runs the experiment and writes `table.csv`, `table.txt` and
/// `records.jsonl` into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.resolve_problems()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let result = execute(cfg)?;
    write_outputs(&result, &cfg.out_dir)?;
    Ok(result)
}

pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    let csv_path = dir.join("table.csv");
    result.table.write_csv(create(&csv_path)?)?;
    let txt_path = dir.join("table.txt");
    fs::write(&txt_path, result.table.to_text()).map_err(|e| Error::io(&txt_path, e))?;
    write_records(&result.entries, &dir.join("records.jsonl"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn write_records(entries: &[RunEntry], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for e in entries {
        serde_json::to_writer(&mut w, e).map_err(|err| Error::Validation(format!("json: {err}")))?;
        w.write_all(b"\n").map_err(|err| Error::io(path, err))?;
    }
    w.flush().map_err(|err| Error::io(path, err))
}

pub fn read_records(path: &Path) -> Result<Vec<RunEntry>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        out.push(entry);
    }
    Ok(out)
}

/// Long-format convergence data: `problem,run,nfes,best_f`. Entries without
/// a trace are skipped with a warning. Returns the number of data rows.
pub fn export_trace(entries: &[RunEntry], path: &Path) -> Result<usize> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["problem", "run", "nfes", "best_f"]).map_err(csv_err)?;
    let mut rows = 0;
    for e in entries {
        if e.record.trace.is_empty() {
            log::warn!("{} run {} has no trace; skipped", e.problem, e.run);
            continue;
        }
        for p in &e.record.trace {
            w.write_record([e.problem.clone(), e.run.to_string(), p.nfes.to_string(), p.best_f.to_string()])
                .map_err(csv_err)?;
            rows += 1;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Better,
    Similar,
    Worse,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Better => "better",
            Verdict::Similar => "similar",
            Verdict::Worse => "worse",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Better means `a` is smaller (minimization).
    pub verdict: Verdict,
    /// `min(W+, W−)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    /// Nonzero differences used.
    pub n: usize,
    pub exact: bool,
    /// Fewer than five nonzero differences; the verdict is forced to similar.
    pub insufficient: bool,
}

/// Average ranks of `|d|`, doubled so they are integers.
fn doubled_ranks(abs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&i, &j| abs[i].total_cmp(&abs[j]));
    let mut ranks = vec![0u64; abs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && abs[order[j + 1]] == abs[order[i]] {
            j += 1;
        }
        // positions i..=j hold 1-based ranks i+1..=j+1; their doubled mean is i+j+2
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided exact p-value of a doubled signed-rank sum `w2`, by counting
/// sign assignments with a subset-sum table.
fn exact_p(ranks: &[u64], w2: u64) -> f64 {
    let total: u64 = ranks.iter().sum();
    let mut count = vec![0u64; total as usize + 1];
    count[0] = 1;
    let mut reach = 0usize;
    for &r in ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if count[s] > 0 {
                count[s + r] += count[s];
            }
        }
        reach += r;
    }
    let all = 2f64.powi(ranks.len() as i32);
    let lower: u64 = count[..=w2 as usize].iter().sum();
    let upper: u64 = count[w2 as usize..].iter().sum();
    (2.0 * lower.min(upper) as f64 / all).min(1.0)
}

fn normal_p(ranks: &[u64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut ties: BTreeMap<u64, f64> = BTreeMap::new();
    for &r in ranks {
        *ties.entry(r).or_default() += 1.0;
    }
    let tie_term: f64 = ties.values().map(|t| t * t * t - t).sum::<f64>() / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    statrs::function::erf::erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Paired two-sided signed-rank test of `a` against `b`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("paired samples differ in length: {} vs {}", a.len(), b.len())));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("differences must be finite"));
    }
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = doubled_ranks(&abs);
    let w2_plus: u64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let w2_total: u64 = ranks.iter().sum();
    let w_plus = w2_plus as f64 / 2.0;
    let w_minus = (w2_total - w2_plus) as f64 / 2.0;
    let exact = n <= EXACT_LIMIT;
    let p_value = if n == 0 {
        1.0
    } else if exact {
        exact_p(&ranks, w2_plus)
    } else {
        normal_p(&ranks, w_plus)
    };
    let insufficient = n < MIN_PAIRS;
    let verdict = if insufficient || p_value >= alpha {
        Verdict::Similar
    } else {
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        if median < 0.0 {
            Verdict::Better
        } else if median > 0.0 {
            Verdict::Worse
        } else {
            Verdict::Similar
        }
    };
    Ok(WilcoxonResult {
        verdict,
        statistic: w_plus.min(w_minus),
        w_plus,
        w_minus,
        p_value,
        n,
        exact,
        insufficient,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub verdict: Verdict,
    pub insufficient: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub better: usize,
    pub similar: usize,
    pub worse: usize,
}

impl Tally {
    pub fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Better => self.better += 1,
            Verdict::Similar => self.similar += 1,
            Verdict::Worse => self.worse += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.better + self.similar + self.worse
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.better, self.similar, self.worse)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub variant_a: Variant,
    pub variant_b: Variant,
    pub alpha: f64,
    pub rows: Vec<ComparisonRow>,
    pub tally: Tally,
}

impl Comparison {
    /// One row per problem, then a `tally` row whose verdict column holds
    /// `better/similar/worse` counts.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["problem", "variant_a", "variant_b", "mean_a", "mean_b", "statistic", "p_value", "verdict", "insufficient"])
            .map_err(csv_err)?;
        let (va, vb) = (self.variant_a.to_string(), self.variant_b.to_string());
        for r in &self.rows {
            out.write_record([
                r.problem.clone(),
                va.clone(),
                vb.clone(),
                r.mean_a.to_string(),
                r.mean_b.to_string(),
                r.statistic.to_string(),
                r.p_value.to_string(),
                r.verdict.to_string(),
                r.insufficient.to_string(),
            ])
            .map_err(csv_err)?;
        }
        out.write_record(["tally", &va, &vb, "", "", "", "", &self.tally.to_string(), ""])
            .map_err(csv_err)?;
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Paired per-problem comparison of two variants over identical problems,
/// runs and seeds.
pub fn compare_results(
    cfg_a: &ExperimentConfig,
    a: &ExperimentResult,
    cfg_b: &ExperimentConfig,
    b: &ExperimentResult,
    alpha: f64,
) -> Result<Comparison> {
    check_paired(cfg_a, cfg_b)?;
    let mut rows = Vec::new();
    let mut tally = Tally::default();
    for p in &cfg_a.problems {
        let (ea, eb) = (a.errors(p), b.errors(p));
        let w = wilcoxon_signed_rank(&ea, &eb, alpha)?;
        tally.add(w.verdict);
        rows.push(ComparisonRow {
            problem: p.clone(),
            mean_a: ea.iter().sum::<f64>() / ea.len() as f64,
            mean_b: eb.iter().sum::<f64>() / eb.len() as f64,
            statistic: w.statistic,
            p_value: w.p_value,
            verdict: w.verdict,
            insufficient: w.insufficient,
        });
    }
    Ok(Comparison {
        variant_a: cfg_a.variant,
        variant_b: cfg_b.variant,
        alpha,
        rows,
        tally,
    })
}

fn check_paired(a: &ExperimentConfig, b: &ExperimentConfig) -> Result<()> {
    if a.problems != b.problems || a.dim != b.dim || a.runs != b.runs || a.base_seed != b.base_seed || a.budget() != b.budget() {
        return Err(Error::Config(
            "compared experiments must share problems, dimension, runs, seeds and budget".into(),
        ));
    }
    Ok(())
}

/// Runs both experiments and compares them.
pub fn compare_variants(cfg_a: &ExperimentConfig, cfg_b: &ExperimentConfig, alpha: f64) -> Result<Comparison> {
    check_paired(cfg_a, cfg_b)?;
    let a = execute(cfg_a)?;
    let b = execute(cfg_b)?;
    compare_results(cfg_a, &a, cfg_b, &b, alpha)
}
