//! Stream generators, the Monte Carlo driver and the fixed-sample BH baseline.

pub mod cholesky;
pub mod fbh;
pub mod montecarlo;
pub mod streams;

pub use cholesky::cholesky_factor;
pub use fbh::{delta_factor, fixed_sample_bh, fixed_sample_pvalue, PValueInput};
pub use montecarlo::{
    run_monte_carlo, threads_from_env, Experiment, ExperimentConfig, FbhReport, McReport,
    Replication, ReplicationTrace, Variant, DEFAULT_CAP, THREADS_ENV,
};
pub use streams::{
    generate_step, named_covariance, CovarianceSpec, HypothesisSpec, Observation, SimulatedFeed,
    StreamModel, StreamModelSpec,
};
