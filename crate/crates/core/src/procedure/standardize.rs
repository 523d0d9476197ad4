//! Piecewise-linear standardizing maps that pin every stream's critical
//! values to the common integer levels `-K, .., -1, 1, .., K`.

use crate::error::{Error, Result};
use crate::procedure::ladder::{CriticalLadder, RejectiveLadder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub raw: f64,
    pub standardized: f64,
}

/// Increasing piecewise-linear map with slope-1 outer tails.
///
/// Knots are kept in ascending raw order and may share a raw value when two
/// adjacent critical values coincide. At such a point the map takes the
/// pinned level farthest from zero: a statistic sitting on `A_s = A_{s+1}`
/// has crossed both lower thresholds, so it is reported at the more extreme
/// level `-(K-s+1)`, and symmetrically on the upper side. The map stays
/// strictly increasing (it jumps upward across the skipped degenerate piece).
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    knots: Vec<Knot>,
}

impl Standardizer {
    fn from_knots(knots: Vec<Knot>) -> Self {
        debug_assert!(!knots.is_empty());
        debug_assert!(knots.windows(2).all(|w| w[0].raw <= w[1].raw
            && w[0].standardized < w[1].standardized));
        Standardizer { knots }
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// Evaluates the map at a raw statistic value.
    pub fn apply(&self, x: f64) -> f64 {
        let knots = &self.knots;
        let idx = knots.partition_point(|k| k.raw < x);
        if idx < knots.len() && knots[idx].raw == x {
            return knots[idx..]
                .iter()
                .take_while(|k| k.raw == x)
                .map(|k| k.standardized)
                .fold(0.0_f64, |best, y| if y.abs() > best.abs() { y } else { best });
        }
        if idx == 0 {
            let first = knots[0];
            return x - first.raw + first.standardized;
        }
        if idx == knots.len() {
            let last = knots[knots.len() - 1];
            return x - last.raw + last.standardized;
        }
        let lo = knots[idx - 1];
        let hi = knots[idx];
        let t = (x - lo.raw) / (hi.raw - lo.raw);
        lo.standardized + t * (hi.standardized - lo.standardized)
    }
}

/// Builds the map with `phi(A_s) = -(K-s+1)` and `phi(B_s) = K-s+1`.
///
/// Between `A_K` and `B_K` the map is `2(x - A_K)/(B_K - A_K) - 1`; below
/// `A_1` and above `B_1` it has slope one.
pub fn build_full_standardizer(ladder: &CriticalLadder, k: usize) -> Result<Standardizer> {
    if k == 0 || ladder.len() != k {
        return Err(Error::Ladder(format!(
            "ladder has {} levels but K = {k}",
            ladder.len()
        )));
    }
    let mut knots = Vec::with_capacity(2 * k);
    for s in 1..=k {
        knots.push(Knot {
            raw: ladder.a(s),
            standardized: -((k - s + 1) as f64),
        });
    }
    for s in (1..=k).rev() {
        knots.push(Knot {
            raw: ladder.b(s),
            standardized: (k - s + 1) as f64,
        });
    }
    Ok(Standardizer::from_knots(knots))
}

/// Builds the rejective map with `phi(B_s) = K-s+1`, slope one outside `[B_K, B_1]`.
pub fn build_rejective_standardizer(ladder: &RejectiveLadder, k: usize) -> Result<Standardizer> {
    if k == 0 || ladder.len() != k {
        return Err(Error::Ladder(format!(
            "ladder has {} levels but K = {k}",
            ladder.len()
        )));
    }
    let knots = (1..=k)
        .rev()
        .map(|s| Knot {
            raw: ladder.b(s),
            standardized: (k - s + 1) as f64,
        })
        .collect();
    Ok(Standardizer::from_knots(knots))
}
