//! Sweeps the compiled oscillation circuits over baselines or energies in analytic, ideal,
//! sampled or pulse-level mode, scores them against the closed form and writes reproducible
//! artifacts.

pub mod config;
pub mod emit;
pub mod error;
pub mod run;
pub mod score;

pub use config::{Grid, JobLayout, Mode, ScenarioConfig, SweepAxis};
pub use emit::{emit, read_csv, table_from_csv, write_csv, CsvRecord, EmitPaths};
pub use error::{Result, RunError};
pub use run::{run_scenario, ResultTable, Row, Status};
pub use score::{gates, r_squared, relative_errors, score, Gate, ScoreReport};
