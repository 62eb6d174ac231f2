//! Reproducible experiments: test-function generators, configured runs and
//! CSV reports.

pub mod config;
pub mod function_spec;
pub mod report;
pub mod rng;
pub mod runners;

pub use config::{parse_config, Experiment, ExperimentConfig, SummabilitySetup, WeakOperator};
pub use function_spec::{Dim, FunctionKind, FunctionSpec, GeneratedFunction};
pub use report::{write_csv, write_grid_csv, Abscissa, RunRecord, Sample, SummabilityReport};
pub use runners::{
    run_all, run_experiment, run_phi_means_1d, run_bmo_sweep, run_exp_summability, run_weak_type_suite,
};
