//! Stage bookkeeping and the two accept/reject step rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

/// One terminal verdict on one stream's null hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub stream: usize,
    pub verdict: Verdict,
    pub stage: u32,
    pub sample_size: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Continue,
    Decide,
}

/// Result of checking the boundaries at one schedule point.
///
/// Stream indices are listed in ascending rank of their standardized statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub kind: StepKind,
    pub accepted: Vec<usize>,
    pub rejected: Vec<usize>,
}

impl StepOutcome {
    fn cont() -> Self {
        StepOutcome {
            kind: StepKind::Continue,
            accepted: Vec::new(),
            rejected: Vec::new(),
        }
    }
}

/// Bookkeeping for one run of either procedure.
///
/// Invariant: `accepted_count + rejected_count + active.len() == K`, and
/// `active` is sorted ascending.
#[derive(Debug, Clone)]
pub struct ProcedureState {
    k: usize,
    active: Vec<usize>,
    accepted_count: usize,
    rejected_count: usize,
    stage: u32,
    n: u64,
    decisions: Vec<Decision>,
    truncated: bool,
    ranked: Vec<(f64, usize)>,
}

impl ProcedureState {
    /// Fresh state with all `k` streams active at stage 1, `n = 0`.
    pub fn new(k: usize) -> Self {
        ProcedureState {
            k,
            active: (0..k).collect(),
            accepted_count: 0,
            rejected_count: 0,
            stage: 1,
            n: 0,
            decisions: Vec::new(),
            truncated: false,
            ranked: Vec::with_capacity(k),
        }
    }

    /// Rebuilds a mid-run state from its counters (no decision history).
    pub fn from_parts(
        k: usize,
        mut active: Vec<usize>,
        accepted_count: usize,
        rejected_count: usize,
        stage: u32,
        n: u64,
    ) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        if active.iter().any(|&s| s >= k) {
            return Err(Error::Usage(format!("active stream index out of range for K={k}")));
        }
        if accepted_count + rejected_count + active.len() != k {
            return Err(Error::Usage(format!(
                "a + r + |active| = {} + {} + {} does not equal K = {k}",
                accepted_count,
                rejected_count,
                active.len()
            )));
        }
        Ok(ProcedureState {
            k,
            active,
            accepted_count,
            rejected_count,
            stage,
            n,
            decisions: Vec::new(),
            truncated: false,
            ranked: Vec::with_capacity(k),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted_count
    }

    pub fn rejected_count(&self) -> usize {
        self.rejected_count
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn into_decisions(self) -> Vec<Decision> {
        self.decisions
    }

    pub fn is_terminal(&self) -> bool {
        self.active.is_empty() || self.truncated
    }

    /// Sorts the supplied `(stream, standardized value)` pairs by value, ties by
    /// stream index, after checking they cover exactly the active set.
    fn rank(&mut self, n: u64, stats: &[(usize, f64)]) -> Result<()> {
        if self.is_terminal() {
            return Err(Error::Usage("procedure already terminated".into()));
        }
        if n <= self.n {
            return Err(Error::Usage(format!(
                "sample size must increase: got n={n} after n={}",
                self.n
            )));
        }
        if stats.len() != self.active.len() {
            return Err(Error::Usage(format!(
                "{} statistics supplied for {} active streams",
                stats.len(),
                self.active.len()
            )));
        }
        self.ranked.clear();
        self.ranked.extend(stats.iter().map(|&(s, v)| (v, s)));
        self.ranked.sort_unstable_by_key(|&(_, s)| s);
        for (&(v, s), &expected) in self.ranked.iter().zip(&self.active) {
            if s != expected {
                return Err(Error::Usage(format!(
                    "statistic supplied for stream {s}, expected stream {expected}"
                )));
            }
            if v.is_nan() {
                return Err(Error::Usage(format!("NaN statistic for stream {s}")));
            }
        }
        self.ranked
            .sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.n = n;
        Ok(())
    }

    /// One stage check of the procedure controlling both FDR and FNR.
    ///
    /// Streams keep sampling while every rank-`l` standardized statistic lies
    /// strictly inside `(-(K - a - l + 1), a + l)`. Otherwise the lowest `m_j`
    /// ranks are accepted and the highest `m_j'` ranks rejected, both chosen by
    /// step-up maxima; acceptances and rejections may happen in the same stage.
    pub fn sbh_step(&mut self, n: u64, stats: &[(usize, f64)]) -> Result<StepOutcome> {
        self.rank(n, stats)?;
        let m_acc = accept_count(&self.ranked, self.k, self.accepted_count);
        let m_rej = reject_count(&self.ranked, self.k, self.rejected_count);
        if m_acc == 0 && m_rej == 0 {
            return Ok(StepOutcome::cont());
        }
        let size = self.ranked.len();
        let accepted: Vec<usize> = self.ranked[..m_acc].iter().map(|&(_, s)| s).collect();
        let rejected: Vec<usize> = self.ranked[size - m_rej..].iter().map(|&(_, s)| s).collect();
        assert!(
            m_acc + m_rej <= size,
            "accept and reject sets overlap (m_j = {m_acc}, m_j' = {m_rej}, |I_j| = {size})"
        );
        self.accepted_count += m_acc;
        self.rejected_count += m_rej;
        self.commit(&accepted, &rejected);
        Ok(StepOutcome {
            kind: StepKind::Decide,
            accepted,
            rejected,
        })
    }

    /// One stage check of the rejective procedure truncated at `truncation`.
    ///
    /// Before truncation, if some rank-`l` statistic reaches `l`, every stream
    /// from the smallest such rank upward is rejected. At `n == truncation`
    /// all active streams are accepted and the run ends.
    pub fn rejective_step(
        &mut self,
        n: u64,
        stats: &[(usize, f64)],
        truncation: u64,
    ) -> Result<StepOutcome> {
        if n > truncation {
            return Err(Error::Usage(format!(
                "sample size {n} beyond truncation point {truncation}"
            )));
        }
        self.rank(n, stats)?;
        if n == truncation {
            let accepted: Vec<usize> = self.ranked.iter().map(|&(_, s)| s).collect();
            self.accepted_count += accepted.len();
            self.truncated = true;
            self.commit(&accepted, &[]);
            return Ok(StepOutcome {
                kind: StepKind::Decide,
                accepted,
                rejected: Vec::new(),
            });
        }
        match rejective_cut(&self.ranked) {
            None => Ok(StepOutcome::cont()),
            Some(first) => {
                let rejected: Vec<usize> = self.ranked[first..].iter().map(|&(_, s)| s).collect();
                self.rejected_count += rejected.len();
                self.commit(&[], &rejected);
                Ok(StepOutcome {
                    kind: StepKind::Decide,
                    accepted: Vec::new(),
                    rejected,
                })
            }
        }
    }

    fn commit(&mut self, accepted: &[usize], rejected: &[usize]) {
        let (stage, n) = (self.stage, self.n);
        for (&stream, verdict) in accepted
            .iter()
            .map(|s| (s, Verdict::Accept))
            .chain(rejected.iter().map(|s| (s, Verdict::Reject)))
        {
            self.decisions.push(Decision {
                stream,
                verdict,
                stage,
                sample_size: n,
            });
        }
        self.active
            .retain(|s| !accepted.contains(s) && !rejected.contains(s));
        self.stage += 1;
        debug_assert_eq!(
            self.accepted_count + self.rejected_count + self.active.len(),
            self.k
        );
    }

    /// Accepts every remaining active stream at the current sample size.
    /// Used when a run is cut off by a safety cap.
    pub fn force_accept_remaining(&mut self) -> Vec<usize> {
        let accepted = self.active.clone();
        self.accepted_count += accepted.len();
        self.truncated = true;
        self.commit(&accepted, &[]);
        accepted
    }
}

/// `m_j = max{m : v_(m) <= -(K - a - m + 1)}`, or 0 when no lower boundary is crossed.
fn accept_count(ranked: &[(f64, usize)], k: usize, a: usize) -> usize {
    (1..=ranked.len())
        .rev()
        .find(|&m| ranked[m - 1].0 <= -((k - a - m + 1) as f64))
        .unwrap_or(0)
}

/// `m_j' = max{m : v_(|I|-m+1) >= K - r - m + 1}`, or 0 when no upper boundary is crossed.
fn reject_count(ranked: &[(f64, usize)], k: usize, r: usize) -> usize {
    let size = ranked.len();
    (1..=size)
        .rev()
        .find(|&m| ranked[size - m].0 >= (k - r - m + 1) as f64)
        .unwrap_or(0)
}

/// Zero-based position of `l_j = min{l : v_(l) >= l}`.
fn rejective_cut(ranked: &[(f64, usize)]) -> Option<usize> {
    ranked
        .iter()
        .enumerate()
        .position(|(i, &(v, _))| v >= (i + 1) as f64)
}
