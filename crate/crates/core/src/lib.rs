//! Multi-operator LSHADE with restart and local search for bound-constrained
//! single-objective minimization.
//!
//! The optimizer combines three mutation strategies chosen by their recent
//! improvement rates, success-history adaptation of F and CR with a
//! sinusoidal schedule early on, a crossover performed in the eigenbasis of
//! the best individual's neighborhood, linear population size reduction, a
//! restart mechanism for stagnant individuals and a late-phase quasi-Newton
//! refinement of the incumbent.
//!
//! ```
//! use mlshade::{run, Builtin, BuiltinKind, RunConfig};
//!
//! let sphere = Builtin::new(BuiltinKind::Sphere, 5).unwrap();
//! let cfg = RunConfig::new(5).with_budget(20_000).with_seed(7);
//! let record = run(&sphere, &cfg).unwrap();
//! assert!(record.best_f < 1e-6);
//! assert!(record.evaluations <= 20_000 + 90);
//! ```
//!
//! Any closure can be optimized through [`FnObjective`]; the [`harness`]
//! module runs experiment matrices and the Wilcoxon comparisons used to
//! evaluate ablations.

pub mod adaptation;
pub mod cml;
pub mod engine;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod local_search;
pub mod optimizer;
pub mod problem;
pub mod restart;

pub use engine::{Archive, Individual, Population, StrategyKind};
pub use error::{Error, Result};
pub use optimizer::{run, run_many, run_observed, GenerationSnapshot, RunConfig, RunRecord, TracePoint, Variant};
pub use problem::{builtin_suite, Bounds, Builtin, BuiltinKind, FnObjective, Objective, ShiftRotateProblem};
