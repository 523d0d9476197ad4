//! Per-stream critical-value ladders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `2K` thresholds of one stream,
/// `A_1 <= A_2 <= .. <= A_K < B_K <= .. <= B_1`.
///
/// `lower[s-1]` is `A_s` and `upper[s-1]` is `B_s`. The continuation region
/// `(A_K, B_K)` must be nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLadder")]
pub struct CriticalLadder {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawLadder {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawLadder> for CriticalLadder {
    type Error = Error;

    fn try_from(raw: RawLadder) -> Result<Self> {
        CriticalLadder::new(raw.lower, raw.upper)
    }
}

impl CriticalLadder {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Ladder("ladder needs at least one level".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Ladder(format!(
                "{} lower but {} upper critical values",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::Ladder("critical values must be finite".into()));
        }
        check_non_decreasing(&lower, "A")?;
        check_non_increasing(&upper, "B")?;
        let k = lower.len();
        if lower[k - 1] >= upper[k - 1] {
            return Err(Error::Ladder(format!(
                "empty continuation region: A_{k} = {} is not below B_{k} = {}",
                lower[k - 1],
                upper[k - 1]
            )));
        }
        Ok(CriticalLadder { lower, upper })
    }

    /// Number of levels `K`.
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// `A_s` for `s` in `1..=K`.
    pub fn a(&self, s: usize) -> f64 {
        self.lower[s - 1]
    }

    /// `B_s` for `s` in `1..=K`.
    pub fn b(&self, s: usize) -> f64 {
        self.upper[s - 1]
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Upper thresholds `B_K <= .. <= B_1` used by the rejective procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRejective")]
pub struct RejectiveLadder {
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawRejective {
    upper: Vec<f64>,
}

impl TryFrom<RawRejective> for RejectiveLadder {
    type Error = Error;

    fn try_from(raw: RawRejective) -> Result<Self> {
        RejectiveLadder::new(raw.upper)
    }
}

impl RejectiveLadder {
    pub fn new(upper: Vec<f64>) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::Ladder("ladder needs at least one level".into()));
        }
        if upper.iter().any(|v| !v.is_finite()) {
            return Err(Error::Ladder("critical values must be finite".into()));
        }
        check_non_increasing(&upper, "B")?;
        Ok(RejectiveLadder { upper })
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    /// `B_s` for `s` in `1..=K`.
    pub fn b(&self, s: usize) -> f64 {
        self.upper[s - 1]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

impl From<&CriticalLadder> for RejectiveLadder {
    fn from(ladder: &CriticalLadder) -> Self {
        RejectiveLadder {
            upper: ladder.upper.clone(),
        }
    }
}

fn check_non_decreasing(values: &[f64], name: &str) -> Result<()> {
    for (s, w) in values.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::Ladder(format!(
                "{name}_{} = {} exceeds {name}_{} = {}",
                s + 1,
                w[0],
                s + 2,
                w[1]
            )));
        }
    }
    Ok(())
}

fn check_non_increasing(values: &[f64], name: &str) -> Result<()> {
    for (s, w) in values.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(Error::Ladder(format!(
                "{name}_{} = {} is below {name}_{} = {}",
                s + 1,
                w[0],
                s + 2,
                w[1]
            )));
        }
    }
    Ok(())
}
