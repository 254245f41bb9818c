//! Batch verification: configuration, seeded substreams, suite execution and reports.

pub mod config;
pub mod report;
pub mod rng;
mod run;

pub use config::{Family, RunConfig, SpaceSel, Suite, SuiteOverrides, SuiteParams};
pub use report::{report_write, Record, VerificationReport};
pub use rng::substream;
pub use run::{
    exit_code, replay_witness, run, CROSSCHECK_P, EIGEN_DRAWS, K_TOL_FACTOR, MATCH_TOL_FACTOR, PHI2_TOL_FACTOR,
};
