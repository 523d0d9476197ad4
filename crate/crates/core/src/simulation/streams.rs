//! Data-stream models, hypothesis specifications and the simulated feed that
//! turns raw draws into per-stream sequential statistics.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::StreamFeed;
use crate::simulation::cholesky::cholesky_factor;
use crate::statistics::{LlrStatistic, SimpleTestSpec, CONTINUOUS_RHO};

/// `M1`..`M4`: two-, four- and six-stream correlation structures mixing
/// positive and negative dependence.
pub fn named_covariance(name: &str) -> Option<Vec<Vec<f64>>> {
    let rows: &[&[f64]] = match name {
        "M1" => &[&[1.0, 0.8], &[0.8, 1.0]],
        "M2" => &[&[1.0, -0.8], &[-0.8, 1.0]],
        "M3" => &[
            &[1.0, 0.8, -0.6, -0.8],
            &[0.8, 1.0, -0.6, -0.8],
            &[-0.6, -0.6, 1.0, 0.8],
            &[-0.8, -0.8, 0.8, 1.0],
        ],
        "M4" => &[
            &[1.0, 0.8, 0.6, -0.4, -0.6, -0.8],
            &[0.8, 1.0, 0.8, -0.4, -0.6, -0.8],
            &[0.6, 0.8, 1.0, -0.4, -0.6, -0.8],
            &[-0.4, -0.4, -0.4, 1.0, 0.8, 0.6],
            &[-0.6, -0.6, -0.6, 0.8, 1.0, 0.8],
            &[-0.8, -0.8, -0.8, 0.6, 0.8, 1.0],
        ],
        _ => return None,
    };
    Some(rows.iter().map(|r| r.to_vec()).collect())
}

/// A covariance matrix given by name (`"M1"`..`"M4"`, `"identity"`) or explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CovarianceSpec {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

impl CovarianceSpec {
    pub fn resolve(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        let m = match self {
            CovarianceSpec::Named(name) if name == "identity" => (0..dim)
                .map(|i| (0..dim).map(|j| f64::from(u8::from(i == j))).collect())
                .collect(),
            CovarianceSpec::Named(name) => named_covariance(name)
                .ok_or_else(|| Error::Domain(format!("unknown covariance matrix {name:?}")))?,
            CovarianceSpec::Matrix(m) => m.clone(),
        };
        if m.len() != dim {
            return Err(Error::Domain(format!(
                "covariance is {0}x{0} but the mean has {dim} entries",
                m.len()
            )));
        }
        Ok(m)
    }
}

/// How the `K` streams are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamModelSpec {
    /// Independent Bernoulli streams with success probabilities `p`.
    IidBernoulli { p: Vec<f64> },
    /// One `N(mean, covariance)` draw per time step, one coordinate per stream.
    CorrelatedNormal {
        mean: Vec<f64>,
        covariance: CovarianceSpec,
    },
}

impl StreamModelSpec {
    pub fn streams(&self) -> usize {
        match self {
            StreamModelSpec::IidBernoulli { p } => p.len(),
            StreamModelSpec::CorrelatedNormal { mean, .. } => mean.len(),
        }
    }

    /// Overshoot correction conventionally paired with this model.
    pub fn default_rho(&self) -> f64 {
        match self {
            StreamModelSpec::IidBernoulli { .. } => 0.0,
            StreamModelSpec::CorrelatedNormal { .. } => CONTINUOUS_RHO,
        }
    }
}

/// The per-stream hypotheses, identical across streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HypothesisSpec {
    /// `p <= p0` against `p >= p1`.
    BernoulliSimple { p0: f64, p1: f64 },
    /// `theta <= 0` against `theta >= delta` for unit-variance normal means.
    NormalMean { delta: f64 },
}

impl HypothesisSpec {
    /// The simple-vs-simple test at the boundary points of the two hypotheses.
    pub fn simple_test(&self) -> Result<SimpleTestSpec> {
        match *self {
            HypothesisSpec::BernoulliSimple { p0, p1 } => {
                if !(p0 < p1) {
                    return Err(Error::Domain(format!("need p0 < p1, got {p0}, {p1}")));
                }
                SimpleTestSpec::bernoulli(p0, p1)
            }
            HypothesisSpec::NormalMean { delta } => {
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(Error::Domain(format!("delta must be positive, got {delta}")));
                }
                SimpleTestSpec::normal_mean(0.0, delta)
            }
        }
    }

    /// `Some(true)` for a true null, `Some(false)` for a false null, `None`
    /// for a parameter in the indifference zone.
    pub fn null_is_true(&self, param: f64) -> Option<bool> {
        let (lo, hi) = match *self {
            HypothesisSpec::BernoulliSimple { p0, p1 } => (p0, p1),
            HypothesisSpec::NormalMean { delta } => (0.0, delta),
        };
        if param <= lo {
            Some(true)
        } else if param >= hi {
            Some(false)
        } else {
            None
        }
    }

    fn fits(&self, model: &StreamModelSpec) -> bool {
        matches!(
            (self, model),
            (HypothesisSpec::BernoulliSimple { .. }, StreamModelSpec::IidBernoulli { .. })
                | (HypothesisSpec::NormalMean { .. }, StreamModelSpec::CorrelatedNormal { .. })
        )
    }
}

/// A validated stream model ready for sampling.
#[derive(Debug, Clone)]
pub enum StreamModel {
    IidBernoulli { p: Vec<f64> },
    CorrelatedNormal { mean: Vec<f64>, factor: Vec<Vec<f64>> },
}

impl StreamModel {
    pub fn new(spec: &StreamModelSpec) -> Result<Self> {
        if spec.streams() == 0 {
            return Err(Error::Domain("at least one stream is required".into()));
        }
        match spec {
            StreamModelSpec::IidBernoulli { p } => {
                if let Some((k, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
                    return Err(Error::Domain(format!("p[{k}] = {v} is not in (0, 1)")));
                }
                Ok(StreamModel::IidBernoulli { p: p.clone() })
            }
            StreamModelSpec::CorrelatedNormal { mean, covariance } => {
                if let Some(k) = mean.iter().position(|v| !v.is_finite()) {
                    return Err(Error::Domain(format!("mean[{k}] is not finite")));
                }
                let factor = cholesky_factor(&covariance.resolve(mean.len())?)?;
                Ok(StreamModel::CorrelatedNormal {
                    mean: mean.clone(),
                    factor,
                })
            }
        }
    }

    pub fn streams(&self) -> usize {
        match self {
            StreamModel::IidBernoulli { p } => p.len(),
            StreamModel::CorrelatedNormal { mean, .. } => mean.len(),
        }
    }

    /// The parameter (`p` or mean) of each stream.
    pub fn params(&self) -> &[f64] {
        match self {
            StreamModel::IidBernoulli { p } => p,
            StreamModel::CorrelatedNormal { mean, .. } => mean,
        }
    }

    /// Draws one time step of every stream into `out`.
    pub fn fill_step<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut Vec<f64>, out: &mut [f64]) {
        match self {
            StreamModel::IidBernoulli { p } => {
                for (o, &pk) in out.iter_mut().zip(p) {
                    *o = f64::from(u8::from(rng.random::<f64>() < pk));
                }
            }
            StreamModel::CorrelatedNormal { mean, factor } => {
                z.clear();
                z.extend((0..mean.len()).map(|_| rng.sample::<f64, _>(StandardNormal)));
                for (i, o) in out.iter_mut().enumerate() {
                    *o = mean[i] + factor[i][..=i].iter().zip(z.iter()).map(|(l, z)| l * z).sum::<f64>();
                }
            }
        }
    }
}

/// One time step of all streams: `theta + L z` for correlated normals,
/// independent Bernoulli draws otherwise.
pub fn generate_step<R: Rng + ?Sized>(model: &StreamModel, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; model.streams()];
    model.fill_step(rng, &mut Vec::new(), &mut out);
    out
}

/// One recorded observation: time index, stream, value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub t: u64,
    pub stream: usize,
    pub value: f64,
}

/// A [`StreamFeed`] drawing from a [`StreamModel`] and updating one LLR
/// statistic per stream.
pub struct SimulatedFeed<'a, R> {
    model: &'a StreamModel,
    stats: Vec<LlrStatistic>,
    rng: R,
    z: Vec<f64>,
    step: Vec<f64>,
    trace: Option<Vec<Observation>>,
}

impl<'a, R: Rng> SimulatedFeed<'a, R> {
    pub fn new(model: &'a StreamModel, test: &SimpleTestSpec, rng: R) -> Self {
        let k = model.streams();
        SimulatedFeed {
            model,
            stats: vec![LlrStatistic::new(test.clone()); k],
            rng,
            z: Vec::with_capacity(k),
            step: vec![0.0; k],
            trace: None,
        }
    }

    /// Records every observation consumed by an active stream.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn into_trace(self) -> Vec<Observation> {
        self.trace.unwrap_or_default()
    }
}

impl<R: Rng> StreamFeed for SimulatedFeed<'_, R> {
    fn streams(&self) -> usize {
        self.stats.len()
    }

    fn advance(&mut self, n: u64, active: &[usize], values: &mut [f64]) -> Result<()> {
        self.model.fill_step(&mut self.rng, &mut self.z, &mut self.step);
        for &k in active {
            let x = self.step[k];
            values[k] = self.stats[k].observe_unchecked(&[x]);
            if let Some(trace) = self.trace.as_mut() {
                trace.push(Observation {
                    t: n,
                    stream: k,
                    value: x,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_pairing(model: &StreamModelSpec, hypothesis: &HypothesisSpec) -> Result<()> {
    if hypothesis.fits(model) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "hypothesis {hypothesis:?} does not apply to stream model {model:?}"
        )))
    }
}
