//! GLR statistics comparing two binomial proportions per stream, as in
//! differential isoform usage from read counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistics::expfam::{xlogx, ExpFamilyModel, SequentialStatistic, StatisticAccumulator};
use crate::statistics::glr::{constrained_kl_infimum, signed_root, Functional};

/// Each time step yields `Y1 ~ Bin(m1, p1)` and `Y2 ~ Bin(m2, p2)`; `delta` is the
/// indifference margin on `|p1 - p2|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoSampleBinomialSpec {
    pub m1: u32,
    pub m2: u32,
    pub delta: f64,
}

impl TwoSampleBinomialSpec {
    pub fn new(m1: u32, m2: u32, delta: f64) -> Result<Self> {
        let spec = TwoSampleBinomialSpec { m1, m2, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::Domain(format!(
                "reads per step must be positive, got m1 = {}, m2 = {}",
                self.m1, self.m2
            )));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::Domain(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        Ok(())
    }

    pub fn model(&self) -> ExpFamilyModel {
        ExpFamilyModel::TwoSampleBinomial {
            m1: self.m1,
            m2: self.m2,
        }
    }
}

/// `p log(p/q) + (1-p) log((1-p)/(1-q))` with `0 log 0 = 0`.
fn bernoulli_kl(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { xlogx(a) - a * b.ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

fn proportions(spec: &TwoSampleBinomialSpec, counts: (f64, f64), n: u64) -> Result<(f64, f64)> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Domain("binomial GLR needs n >= 1".into()));
    }
    let nf = n as f64;
    let (t1, t2) = (nf * f64::from(spec.m1), nf * f64::from(spec.m2));
    let (y1, y2) = counts;
    if !(0.0..=t1).contains(&y1) || !(0.0..=t2).contains(&y2) {
        return Err(Error::Domain(format!(
            "counts ({y1}, {y2}) outside [0, {t1}] x [0, {t2}]"
        )));
    }
    Ok((y1 / t1, y2 / t2))
}

/// Log-GLR against `p1 = p2`: `n sum_i m_i kl(p_hat_i, pi)` with pooled
/// `pi = (sum Y1 + sum Y2) / (n (m1 + m2))`.
pub fn two_sample_binomial_glr(
    spec: &TwoSampleBinomialSpec,
    counts: (f64, f64),
    n: u64,
) -> Result<f64> {
    let (p1, p2) = proportions(spec, counts, n)?;
    let (m1, m2) = (f64::from(spec.m1), f64::from(spec.m2));
    let pooled = (counts.0 + counts.1) / (n as f64 * (m1 + m2));
    Ok(n as f64 * (m1 * bernoulli_kl(p1, pooled) + m2 * bernoulli_kl(p2, pooled)))
}

/// Log-GLR against `|p1 - p2| = delta`, constrained by one-dimensional search.
pub fn two_sample_binomial_glr_alt(
    spec: &TwoSampleBinomialSpec,
    counts: (f64, f64),
    n: u64,
) -> Result<f64> {
    proportions(spec, counts, n)?;
    let nf = n as f64;
    let mean = [counts.0 / nf, counts.1 / nf];
    let inf = constrained_kl_infimum(
        &spec.model(),
        &Functional::ProportionGapSquared,
        &mean,
        spec.delta * spec.delta,
    )?;
    Ok(nf * inf.max(0.0))
}

/// Signed root of the two binomial log-GLRs: positive when the proportions
/// look further apart than `delta`, negative when they look equal.
#[derive(Debug, Clone)]
pub struct TwoSampleBinomialStatistic {
    spec: TwoSampleBinomialSpec,
    acc: StatisticAccumulator,
}

impl TwoSampleBinomialStatistic {
    pub fn new(spec: TwoSampleBinomialSpec) -> Result<Self> {
        spec.validate()?;
        if spec.delta == 0.0 {
            return Err(Error::Domain(
                "the signed-root statistic needs delta > 0 to separate the hypotheses".into(),
            ));
        }
        Ok(TwoSampleBinomialStatistic {
            spec,
            acc: StatisticAccumulator::new(2),
        })
    }

    pub fn accumulator(&self) -> &StatisticAccumulator {
        &self.acc
    }
}

impl SequentialStatistic for TwoSampleBinomialStatistic {
    fn observe(&mut self, x: &[f64]) -> Result<f64> {
        self.spec.model().check_observation(x)?;
        self.acc.push(x);
        let counts = (self.acc.sum[0], self.acc.sum[1]);
        let h = two_sample_binomial_glr(&self.spec, counts, self.acc.n)?;
        let g = two_sample_binomial_glr_alt(&self.spec, counts, self.acc.n)?;
        let (p1, p2) = proportions(&self.spec, counts, self.acc.n)?;
        self.acc.value = signed_root(h, g, (p1 - p2).powi(2), 0.0);
        Ok(self.acc.value)
    }

    fn value(&self) -> f64 {
        self.acc.value
    }

    fn n(&self) -> u64 {
        self.acc.n
    }
}
