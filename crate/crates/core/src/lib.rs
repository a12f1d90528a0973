//! # pmwt
//! Heuristics for scheduling jobs on identical parallel machines so as to minimize the total
//! weighted tardiness `Σ wj·max{Cj − dj, 0}` (`Pm||ΣwjTj` in Graham's notation).
//!
//! The building blocks:
//!  - [`model`]: instances, schedules, the objective, the earliest-available-machine dispatch
//!    rule and the EDD start sequence
//!  - [`gpi`]: swap / insertion / twist operators and their staged first-improve exploration
//!  - [`dynasearch`]: best set of independent GPI moves on one machine by dynamic programming
//!  - [`parallel`]: the machine-pair improvement graph and its maximum-weight matching
//!  - [`ils`]: the three search drivers (A1, A2, A3) and the kick
//!  - [`instances`]: random generation, OR-library input, the native file format
//!  - [`oracle`]: exact and exhaustive reference procedures for tiny inputs
//!  - [`harness`]: batch runs, the results file and comparison tables
//!
//! Runnable walkthroughs live in `examples/`; the `pmwt` binary wraps [`harness`].
//!
//! ```
//! use pmwt::ils::{run, Budget, Mode, SearchConfig};
//! use pmwt::instances::{generate_one, InstanceSpec};
//!
//! let instance = generate_one(&InstanceSpec { n: 20, m: 3, r_pct: 60, t_pct: 60, seed: 1 }, 0);
//! let report = run(&instance, &SearchConfig::new(Mode::A3, Budget::Iterations(3), 7));
//! assert_eq!(report.best.cost(), report.best_cost);
//! ```

pub mod dynasearch;
pub mod gpi;
pub mod harness;
pub mod ils;
pub mod instances;
pub mod model;
pub mod oracle;
pub mod parallel;

pub use model::{Cost, Instance, Job, JobId, Schedule};
