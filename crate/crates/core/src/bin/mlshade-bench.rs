use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mlshade::harness::{self, ExperimentConfig, DEFAULT_ALPHA};
use mlshade::{Error, Result, Variant};

#[derive(Parser)]
#[command(name = "mlshade-bench", version, about = "Benchmark runner for the mlshade optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write table.csv, table.txt and records.jsonl.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<String>,
        /// Record convergence traces in the per-run records.
        #[arg(long)]
        trace: bool,
    },
    /// Compare two variants with paired signed-rank tests; writes comparison.csv.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Give exactly twice: first and second variant.
        #[arg(long, num_args = 1)]
        variant: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Export convergence data to trace.csv, from an existing records file or a fresh run.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<String>,
        /// Read runs from this records.jsonl instead of running.
        #[arg(long)]
        records: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Key-value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin name or base@file; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    problem: Vec<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

impl Common {
    fn experiment(&self, variant: Option<&str>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if !self.problem.is_empty() {
            cfg.problems = self.problem.clone();
        }
        if let Some(v) = self.dim {
            cfg.dim = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.seed {
            cfg.base_seed = v;
        }
        if self.budget.is_some() {
            cfg.budget = self.budget;
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = v.clone();
        }
        if self.data_dir.is_some() {
            cfg.data_dir = self.data_dir.clone();
        }
        if let Some(v) = variant {
            cfg.variant = v.parse::<Variant>()?;
        }
        cfg.validate()?;
        cfg.resolve_problems()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, variant, trace } => {
            let mut cfg = common.experiment(variant.as_deref())?;
            cfg.trace |= trace;
            let result = harness::run_experiment(&cfg)?;
            print!("{}", result.table.to_text());
            eprintln!("wrote {}", cfg.out_dir.display());
        }
        Command::Compare { common, variant, alpha } => {
            if variant.len() != 2 {
                return Err(Error::Config(format!("compare needs exactly two --variant flags, got {}", variant.len())));
            }
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            let a = common.experiment(Some(&variant[0]))?;
            let b = common.experiment(Some(&variant[1]))?;
            let cmp = harness::compare_variants(&a, &b, alpha)?;
            fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
            let path = a.out_dir.join("comparison.csv");
            let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
            cmp.write_csv(file)?;
            cmp.write_csv(std::io::stdout())?;
            eprintln!("wrote {}", path.display());
        }
        Command::Trace { common, variant, records } => {
            let mut cfg = common.experiment(variant.as_deref())?;
            let entries = match records {
                Some(path) => harness::read_records(&path)?,
                None => {
                    cfg.trace = true;
                    harness::run_experiment(&cfg)?.entries
                }
            };
            fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
            let path = cfg.out_dir.join("trace.csv");
            let rows = harness::export_trace(&entries, &path)?;
            eprintln!("wrote {rows} rows to {}", path.display());
        }
    }
    Ok(())
}

fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
