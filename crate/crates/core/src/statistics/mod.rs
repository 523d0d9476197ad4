//! Sequential test statistics and the critical-value ladders that go with them.

pub mod binomial;
pub mod calibrate;
pub mod expfam;
pub mod glr;
pub mod wald;

pub use binomial::{
    two_sample_binomial_glr, two_sample_binomial_glr_alt, TwoSampleBinomialSpec,
    TwoSampleBinomialStatistic,
};
pub use calibrate::{
    calibrate_full_ladder, calibrate_rejective_ladder, simulate_statistic_path, Calibration,
};
pub use expfam::{
    bernoulli_natural, kl_info, llr_increment, ExpFamilyModel, LlrStatistic, SequentialStatistic,
    SimpleTestSpec, StatisticAccumulator,
};
pub use glr::{
    constrained_kl_infimum, glr_statistics, signed_root, Functional, GlrSpec, GlrStatistic,
};
pub use wald::{
    fractional_levels, rejective_wald_ladder, rejective_wald_ladder_with, sbh_wald_ladder,
    sbh_wald_ladder_with, sbh_wald_rows, wald_ab, LadderRow, Overshoot, WaldConfig,
    CONTINUOUS_RHO,
};
