//! JSON documents read by the command-line front end.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::{CriticalLadder, ProcedureSpec, RejectiveLadder, Schedule};
use crate::simulation::{ExperimentConfig, HypothesisSpec, Variant};
use crate::statistics::{
    rejective_wald_ladder_with, sbh_wald_ladder_with, ExpFamilyModel, Functional, GlrSpec,
    GlrStatistic, LlrStatistic, Overshoot, SequentialStatistic, SimpleTestSpec,
    TwoSampleBinomialSpec, TwoSampleBinomialStatistic, WaldConfig,
};

/// A batch of simulated scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub scenarios: Vec<ExperimentConfig>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(source: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::config(
            format!("{source}:{}:{}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn prefixed(prefix: &str, e: Error) -> Error {
    match e {
        Error::Config { path, message } => Error::config(format!("{prefix}.{path}"), message),
        other => Error::config(prefix, other.to_string()),
    }
}

impl SimulationConfig {
    /// Parses and validates; `source` names the document in diagnostics.
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let cfg: SimulationConfig = parse_json(source, text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.scenarios.iter().enumerate() {
            s.validate().map_err(|e| prefixed(&format!("scenarios[{i}]"), e))?;
        }
        Ok(())
    }
}

/// The sequential statistic computed from one stream's observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamStatistic {
    /// Bernoulli observations, `p = p0` against `p = p1`.
    BernoulliLlr { p0: f64, p1: f64 },
    /// Unit-variance normal observations, mean `mu0` against `mu1`.
    NormalLlr { mu0: f64, mu1: f64 },
    /// Simple-vs-simple LLR in any supported family.
    Llr {
        model: ExpFamilyModel,
        eta: Vec<f64>,
        gamma: Vec<f64>,
    },
    /// Signed-root GLR for `u <= u0` against `u >= u1`.
    Glr {
        model: ExpFamilyModel,
        functional: Functional,
        u0: f64,
        u1: f64,
    },
    /// Signed-root GLR for `p1 = p2` against `|p1 - p2| >= delta` from paired read counts.
    TwoSampleBinomial { m1: u32, m2: u32, delta: f64 },
}

impl StreamStatistic {
    pub fn build(&self) -> Result<Box<dyn SequentialStatistic + Send>> {
        Ok(match self {
            StreamStatistic::BernoulliLlr { p0, p1 } => {
                Box::new(LlrStatistic::new(SimpleTestSpec::bernoulli(*p0, *p1)?))
            }
            StreamStatistic::NormalLlr { mu0, mu1 } => {
                Box::new(LlrStatistic::new(SimpleTestSpec::normal_mean(*mu0, *mu1)?))
            }
            StreamStatistic::Llr { model, eta, gamma } => Box::new(LlrStatistic::new(
                SimpleTestSpec::new(*model, eta.clone(), gamma.clone())?,
            )),
            StreamStatistic::Glr {
                model,
                functional,
                u0,
                u1,
            } => Box::new(GlrStatistic::new(GlrSpec::new(
                *model,
                functional.clone(),
                *u0,
                *u1,
            )?)),
            StreamStatistic::TwoSampleBinomial { m1, m2, delta } => Box::new(
                TwoSampleBinomialStatistic::new(TwoSampleBinomialSpec::new(*m1, *m2, *delta)?)?,
            ),
        })
    }

    fn model(&self) -> ExpFamilyModel {
        match self {
            StreamStatistic::BernoulliLlr { .. } => ExpFamilyModel::Bernoulli,
            StreamStatistic::NormalLlr { .. } => ExpFamilyModel::UnitNormal { dim: 1 },
            StreamStatistic::Llr { model, .. } | StreamStatistic::Glr { model, .. } => *model,
            StreamStatistic::TwoSampleBinomial { m1, m2, .. } => {
                ExpFamilyModel::TwoSampleBinomial { m1: *m1, m2: *m2 }
            }
        }
    }

    /// Overshoot correction conventionally paired with the stream's family.
    pub fn default_rho(&self) -> f64 {
        self.model().default_rho()
    }
}

/// Hypotheses and ladders for applying the procedure to external data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub variant: Variant,
    pub alpha: f64,
    /// Required by the full variant unless `ladders` is given.
    #[serde(default)]
    pub beta: Option<f64>,
    /// Defaults per stream to the family's conventional value.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub overshoot: Overshoot,
    #[serde(default)]
    pub truncation: Option<u64>,
    #[serde(default)]
    pub schedule: Schedule,
    pub streams: Vec<StreamStatistic>,
    /// Explicit full-variant ladders, one per stream, replacing the Wald ladders.
    #[serde(default)]
    pub ladders: Option<Vec<CriticalLadder>>,
    /// Explicit rejective ladders, one per stream.
    #[serde(default)]
    pub rejective_ladders: Option<Vec<RejectiveLadder>>,
}

impl RunConfig {
    pub fn parse(source: &str, text: &str) -> Result<Self> {
        let cfg: RunConfig = parse_json(source, text)?;
        cfg.procedure_spec()?;
        Ok(cfg)
    }

    /// Mirrors a simulated scenario so its recorded observations can be replayed.
    pub fn for_experiment(cfg: &ExperimentConfig) -> Self {
        let stat = match cfg.hypothesis {
            HypothesisSpec::BernoulliSimple { p0, p1 } => StreamStatistic::BernoulliLlr { p0, p1 },
            HypothesisSpec::NormalMean { delta } => StreamStatistic::NormalLlr {
                mu0: 0.0,
                mu1: delta,
            },
        };
        RunConfig {
            variant: cfg.variant,
            alpha: cfg.alpha,
            beta: Some(cfg.beta),
            rho: Some(cfg.rho()),
            overshoot: cfg.overshoot,
            truncation: cfg.truncation,
            schedule: cfg.schedule.clone(),
            streams: vec![stat; cfg.k()],
            ladders: None,
            rejective_ladders: None,
        }
    }

    pub fn k(&self) -> usize {
        self.streams.len()
    }

    /// Validates and builds the per-stream ladders.
    pub fn procedure_spec(&self) -> Result<ProcedureSpec> {
        let k = self.k();
        if k == 0 {
            return Err(Error::config("streams", "at least one stream is required"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if let Some(rho) = self.rho {
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(Error::config("rho", format!("must be finite and >= 0, got {rho}")));
            }
        }
        for (i, s) in self.streams.iter().enumerate() {
            s.build().map_err(|e| Error::config(format!("streams[{i}]"), e.to_string()))?;
        }
        self.schedule
            .validate()
            .map_err(|e| Error::config("schedule", e.to_string()))?;
        let rho = |i: usize| self.rho.unwrap_or_else(|| self.streams[i].default_rho());
        let count = |name: &str, n: usize| {
            if n == k {
                Ok(())
            } else {
                Err(Error::config(name, format!("{n} ladders for {k} streams")))
            }
        };
        match self.variant {
            Variant::Full => {
                if self.truncation.is_some() {
                    return Err(Error::config("truncation", "only the rejective variant is truncated"));
                }
                let ladders = match &self.ladders {
                    Some(l) => {
                        count("ladders", l.len())?;
                        if let Some(i) = l.iter().position(|l| l.len() != k) {
                            return Err(Error::config(
                                format!("ladders[{i}]"),
                                format!("needs {k} levels"),
                            ));
                        }
                        l.clone()
                    }
                    None => {
                        let beta = self.beta.ok_or_else(|| {
                            Error::config("beta", "the full variant needs beta or explicit ladders")
                        })?;
                        (0..k)
                            .map(|i| {
                                WaldConfig::new(self.alpha, beta, k, rho(i))
                                    .and_then(|c| sbh_wald_ladder_with(&c, self.overshoot))
                                    .map_err(|e| Error::config("beta", e.to_string()))
                            })
                            .collect::<Result<_>>()?
                    }
                };
                Ok(ProcedureSpec::Full { ladders })
            }
            Variant::Rejective => {
                let truncation = match self.truncation {
                    Some(t) if t >= 1 => t,
                    _ => {
                        return Err(Error::config(
                            "truncation",
                            "the rejective variant needs a truncation point >= 1",
                        ))
                    }
                };
                let ladders = match &self.rejective_ladders {
                    Some(l) => {
                        count("rejective_ladders", l.len())?;
                        if let Some(i) = l.iter().position(|l| l.len() != k) {
                            return Err(Error::config(
                                format!("rejective_ladders[{i}]"),
                                format!("needs {k} levels"),
                            ));
                        }
                        l.clone()
                    }
                    None => (0..k)
                        .map(|i| rejective_wald_ladder_with(self.alpha, k, rho(i), self.overshoot))
                        .collect::<Result<_>>()?,
                };
                Ok(ProcedureSpec::Rejective {
                    ladders,
                    truncation,
                })
            }
        }
    }
}
