//! Driving a procedure over data streams along a sampling schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::ladder::{CriticalLadder, RejectiveLadder};
use crate::procedure::standardize::{
    build_full_standardizer, build_rejective_standardizer, Standardizer,
};
use crate::procedure::state::{Decision, ProcedureState, StepOutcome};

/// Sample sizes at which boundaries are checked.
///
/// Statistics keep updating between schedule points, but decisions are only
/// taken at the points themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule {
    /// `1, 2, 3, ..`
    #[default]
    FullySequential,
    /// `m, 2m, .., gm` (unbounded when `groups` is absent).
    Group {
        size: u64,
        #[serde(default)]
        groups: Option<u64>,
    },
    /// An explicit strictly increasing list of sample sizes.
    Explicit { points: Vec<u64> },
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::FullySequential => Ok(()),
            Schedule::Group { size, groups } => {
                if *size == 0 {
                    return Err(Error::Usage("group size must be at least 1".into()));
                }
                if *groups == Some(0) {
                    return Err(Error::Usage("group count must be at least 1".into()));
                }
                Ok(())
            }
            Schedule::Explicit { points } => {
                if points.is_empty() {
                    return Err(Error::Usage("explicit schedule is empty".into()));
                }
                if points[0] == 0 || points.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Usage(
                        "schedule points must be positive and strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The `i`-th point (zero-based), or `None` past the end.
    pub fn point(&self, i: u64) -> Option<u64> {
        match self {
            Schedule::FullySequential => Some(i + 1),
            Schedule::Group { size, groups } => match groups {
                Some(g) if i >= *g => None,
                _ => Some((i + 1) * size),
            },
            Schedule::Explicit { points } => points.get(i as usize).copied(),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            Schedule::FullySequential => n >= 1,
            Schedule::Group { size, groups } => {
                n >= *size && n % size == 0 && groups.is_none_or(|g| n / size <= g)
            }
            Schedule::Explicit { points } => points.binary_search(&n).is_ok(),
        }
    }
}

/// Source of one stream's sequential statistic.
pub trait StatisticSupplier {
    /// Consumes the next observation and returns the statistic at the new
    /// sample size, or `None` when the stream has no more data.
    fn next_value(&mut self) -> Option<f64>;
}

impl<F: FnMut() -> Option<f64>> StatisticSupplier for F {
    fn next_value(&mut self) -> Option<f64> {
        self()
    }
}

/// A precomputed statistic path `Lambda_1, Lambda_2, ..`.
#[derive(Debug, Clone)]
pub struct StatisticPath {
    values: Vec<f64>,
    pos: usize,
}

impl StatisticPath {
    pub fn new(values: Vec<f64>) -> Self {
        StatisticPath { values, pos: 0 }
    }
}

impl StatisticSupplier for StatisticPath {
    fn next_value(&mut self) -> Option<f64> {
        let v = self.values.get(self.pos).copied();
        self.pos += 1;
        v
    }
}

/// A joint view of all `K` streams, advanced one time step at a time.
///
/// Joint feeds let correlated streams share one draw per time step; a
/// `Vec` of independent suppliers is a feed as well.
pub trait StreamFeed {
    fn streams(&self) -> usize;

    /// Advances every stream in `active` by one observation and stores its
    /// new raw statistic in `values[stream]`. `n` is the new sample size.
    fn advance(&mut self, n: u64, active: &[usize], values: &mut [f64]) -> Result<()>;
}

impl<S: StatisticSupplier> StreamFeed for Vec<S> {
    fn streams(&self) -> usize {
        self.len()
    }

    fn advance(&mut self, n: u64, active: &[usize], values: &mut [f64]) -> Result<()> {
        for &k in active {
            values[k] = self[k]
                .next_value()
                .ok_or(Error::StreamUnderrun { stream: k, n })?;
        }
        Ok(())
    }
}

/// Which procedure to run, with its per-stream ladders.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcedureSpec {
    /// Controls FDR and FNR; stops early to accept or reject.
    Full { ladders: Vec<CriticalLadder> },
    /// Controls FDR only; stops early to reject, accepts survivors at `truncation`.
    Rejective {
        ladders: Vec<RejectiveLadder>,
        truncation: u64,
    },
}

/// What to do when the schedule (or the sample-size cap) runs out first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exhaustion {
    #[default]
    Error,
    AcceptRemaining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Hard cap on the per-stream sample size.
    pub max_n: Option<u64>,
    pub on_exhaustion: Exhaustion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub decisions: Vec<Decision>,
    /// Sample size at which each stream stopped being sampled.
    pub per_stream_n: Vec<u64>,
    pub total_n: u64,
    /// True when remaining streams were force-accepted at the cap.
    pub forced: bool,
}

/// A procedure with its standardizing maps built once, reusable across runs.
#[derive(Debug, Clone)]
pub struct Procedure {
    standardizers: Vec<Standardizer>,
    truncation: Option<u64>,
}

impl Procedure {
    pub fn new(spec: &ProcedureSpec) -> Result<Self> {
        match spec {
            ProcedureSpec::Full { ladders } => {
                let k = ladders.len();
                if k == 0 {
                    return Err(Error::Usage("at least one stream is required".into()));
                }
                let standardizers = ladders
                    .iter()
                    .map(|l| build_full_standardizer(l, k))
                    .collect::<Result<_>>()?;
                Ok(Procedure {
                    standardizers,
                    truncation: None,
                })
            }
            ProcedureSpec::Rejective {
                ladders,
                truncation,
            } => {
                let k = ladders.len();
                if k == 0 {
                    return Err(Error::Usage("at least one stream is required".into()));
                }
                if *truncation == 0 {
                    return Err(Error::Usage("truncation point must be at least 1".into()));
                }
                let standardizers = ladders
                    .iter()
                    .map(|l| build_rejective_standardizer(l, k))
                    .collect::<Result<_>>()?;
                Ok(Procedure {
                    standardizers,
                    truncation: Some(*truncation),
                })
            }
        }
    }

    pub fn streams(&self) -> usize {
        self.standardizers.len()
    }

    pub fn truncation(&self) -> Option<u64> {
        self.truncation
    }

    pub fn standardizer(&self, stream: usize) -> &Standardizer {
        &self.standardizers[stream]
    }

    /// Standardizes the raw statistics of the active streams and applies the
    /// step rule of this procedure at sample size `n`.
    pub fn step(
        &self,
        state: &mut ProcedureState,
        n: u64,
        raw: &[f64],
        scratch: &mut Vec<(usize, f64)>,
    ) -> Result<StepOutcome> {
        scratch.clear();
        scratch.extend(
            state
                .active()
                .iter()
                .map(|&k| (k, self.standardizers[k].apply(raw[k]))),
        );
        match self.truncation {
            None => state.sbh_step(n, scratch),
            Some(t) => state.rejective_step(n, scratch, t),
        }
    }

    /// The `index`-th sample size at which boundaries are checked.
    /// The truncation point of the rejective procedure is always a check point.
    pub fn next_point(&self, schedule: &Schedule, index: u64) -> Option<u64> {
        let p = schedule.point(index);
        match (self.truncation, p) {
            (Some(t), Some(p)) => Some(p.min(t)),
            (Some(t), None) => Some(t),
            (None, p) => p,
        }
    }

    /// Runs to termination over `feed`.
    pub fn run<F: StreamFeed + ?Sized>(
        &self,
        feed: &mut F,
        schedule: &Schedule,
        options: RunOptions,
    ) -> Result<RunOutcome> {
        let k = self.streams();
        if feed.streams() != k {
            return Err(Error::Usage(format!(
                "{} streams supplied for {k} ladders",
                feed.streams()
            )));
        }
        schedule.validate()?;
        let mut state = ProcedureState::new(k);
        let mut raw = vec![0.0; k];
        let mut scratch = Vec::with_capacity(k);
        let mut n = 0u64;
        let mut index = 0u64;
        let mut forced = false;
        while !state.is_terminal() {
            let target = match self.next_point(schedule, index) {
                Some(p) if options.max_n.is_none_or(|cap| p <= cap) => p,
                _ => {
                    match options.on_exhaustion {
                        Exhaustion::Error => {
                            return Err(Error::ScheduleExhausted {
                                n,
                                active: state.active().len(),
                            })
                        }
                        Exhaustion::AcceptRemaining => {
                            if n == 0 {
                                return Err(Error::ScheduleExhausted { n, active: k });
                            }
                            state.force_accept_remaining();
                            forced = true;
                        }
                    }
                    break;
                }
            };
            index += 1;
            while n < target {
                n += 1;
                feed.advance(n, state.active(), &mut raw)?;
            }
            self.step(&mut state, n, &raw, &mut scratch)?;
        }
        let decisions = state.into_decisions();
        let mut per_stream_n = vec![0u64; k];
        for d in &decisions {
            per_stream_n[d.stream] = d.sample_size;
        }
        Ok(RunOutcome {
            total_n: per_stream_n.iter().sum(),
            per_stream_n,
            decisions,
            forced,
        })
    }
}

/// Builds the procedure for `spec` and runs it once over `feed`.
pub fn run_procedure<F: StreamFeed + ?Sized>(
    feed: &mut F,
    spec: &ProcedureSpec,
    schedule: &Schedule,
) -> Result<RunOutcome> {
    Procedure::new(spec)?.run(feed, schedule, RunOptions::default())
}
