//! Critical-value ladders, standardizing maps, and the stage-based
//! accept/reject state machines. Nothing here depends on a particular
//! statistic or data model.

pub mod ladder;
pub mod run;
pub mod standardize;
pub mod state;

pub use ladder::{CriticalLadder, RejectiveLadder};
pub use run::{
    run_procedure, Exhaustion, Procedure, ProcedureSpec, RunOptions, RunOutcome, Schedule,
    StatisticPath, StatisticSupplier, StreamFeed,
};
pub use standardize::{build_full_standardizer, build_rejective_standardizer, Knot, Standardizer};
pub use state::{Decision, ProcedureState, StepKind, StepOutcome, Verdict};
