//! Monte Carlo estimation of FDR, FNR and expected total sample size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::{
    Exhaustion, Procedure, ProcedureSpec, RunOptions, RunOutcome, Schedule, Verdict,
};
use crate::simulation::fbh::{delta_factor, fixed_sample_bh, fixed_sample_pvalue, PValueInput};
use crate::simulation::streams::{
    check_pairing, HypothesisSpec, Observation, SimulatedFeed, StreamModel, StreamModelSpec,
};
use crate::statistics::{
    rejective_wald_ladder_with, sbh_wald_ladder_with, Overshoot, SimpleTestSpec, WaldConfig,
};

/// Per-stream sample-size cap used when a config does not set one.
pub const DEFAULT_CAP: u64 = 100_000;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SEQBH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Full,
    Rejective,
}

/// One simulated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub label: String,
    pub model: StreamModelSpec,
    pub hypothesis: HypothesisSpec,
    pub alpha: f64,
    pub beta: f64,
    /// Overshoot correction; defaults to the model's conventional value.
    #[serde(default)]
    pub rho: Option<f64>,
    /// Direction in which `rho` moves the Wald boundaries.
    #[serde(default)]
    pub overshoot: Overshoot,
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub truncation: Option<u64>,
    /// Total fixed sample size of the BH baseline, split evenly across streams.
    #[serde(default)]
    pub fbh_total_n: Option<u64>,
    #[serde(default)]
    pub cap: Option<u64>,
    /// Free-form notes carried into the report.
    #[serde(default)]
    pub flags: Vec<String>,
}

fn bad(path: &str, message: impl Into<String>) -> Error {
    Error::config(path, message)
}

impl ExperimentConfig {
    pub fn k(&self) -> usize {
        self.model.streams()
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or_else(|| self.model.default_rho())
    }

    pub fn cap(&self) -> u64 {
        self.cap.unwrap_or(DEFAULT_CAP)
    }

    /// Checks every invariant, reporting the offending field path.
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(bad("model", "at least one stream is required"));
        }
        if self.replications == 0 {
            return Err(bad("replications", "must be at least 1"));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(bad(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        if self.alpha + self.beta > 1.0 {
            return Err(bad("beta", format!("alpha + beta = {} exceeds 1", self.alpha + self.beta)));
        }
        if let Some(rho) = self.rho {
            if !(rho >= 0.0 && rho.is_finite()) {
                return Err(bad("rho", format!("must be finite and >= 0, got {rho}")));
            }
        }
        match &self.model {
            StreamModelSpec::IidBernoulli { p } => {
                if let Some(i) = p.iter().position(|v| !(*v > 0.0 && *v < 1.0)) {
                    return Err(bad(&format!("model.p[{i}]"), format!("{} is not in (0, 1)", p[i])));
                }
            }
            StreamModelSpec::CorrelatedNormal { mean, covariance } => {
                if let Some(i) = mean.iter().position(|v| !v.is_finite()) {
                    return Err(bad(&format!("model.mean[{i}]"), "must be finite"));
                }
                covariance
                    .resolve(k)
                    .and_then(|m| crate::simulation::cholesky_factor(&m))
                    .map_err(|e| bad("model.covariance", e.to_string()))?;
            }
        }
        check_pairing(&self.model, &self.hypothesis).map_err(|e| bad("hypothesis", e.to_string()))?;
        if let HypothesisSpec::BernoulliSimple { p0, p1 } = self.hypothesis {
            if !(p0 > 0.0 && p0 < p1 && p1 < 1.0) {
                return Err(bad("hypothesis", format!("need 0 < p0 < p1 < 1, got {p0}, {p1}")));
            }
        }
        self.hypothesis.simple_test().map_err(|e| bad("hypothesis", e.to_string()))?;
        self.schedule.validate().map_err(|e| bad("schedule", e.to_string()))?;
        match (self.variant, self.truncation) {
            (Variant::Rejective, None) => {
                return Err(bad("truncation", "the rejective variant needs a truncation point"))
            }
            (Variant::Rejective, Some(0)) => return Err(bad("truncation", "must be at least 1")),
            (Variant::Full, Some(_)) => {
                return Err(bad("truncation", "only the rejective variant is truncated"))
            }
            _ => {}
        }
        if let Some(n) = self.fbh_total_n {
            if n == 0 || n % k as u64 != 0 {
                return Err(bad(
                    "fbh_total_n",
                    format!("must be a positive multiple of K = {k}, got {n}"),
                ));
            }
        }
        if self.cap == Some(0) {
            return Err(bad("cap", "must be at least 1"));
        }
        self.procedure_spec().map_err(|e| bad("rho", e.to_string()))?;
        Ok(())
    }

    /// The procedure with closed-form Wald ladders for this scenario.
    pub fn procedure_spec(&self) -> Result<ProcedureSpec> {
        let k = self.k();
        Ok(match self.variant {
            Variant::Full => {
                let cfg = WaldConfig::new(self.alpha, self.beta, k, self.rho())?;
                let ladder = sbh_wald_ladder_with(&cfg, self.overshoot)?;
                ProcedureSpec::Full {
                    ladders: vec![ladder; k],
                }
            }
            Variant::Rejective => ProcedureSpec::Rejective {
                ladders: vec![
                    rejective_wald_ladder_with(self.alpha, k, self.rho(), self.overshoot)?;
                    k
                ],
                truncation: self.truncation.unwrap_or_default(),
            },
        })
    }
}

/// Estimates for the fixed-sample baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FbhReport {
    pub total_n: u64,
    pub fdr_hat: f64,
    pub fdr_se: f64,
    pub fnr_hat: f64,
    pub fnr_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub label: String,
    pub k: usize,
    pub k0: usize,
    pub k1: usize,
    pub replications: usize,
    pub fdr_hat: f64,
    pub fdr_se: f64,
    pub fnr_hat: f64,
    pub fnr_se: f64,
    pub en_hat: f64,
    pub en_se: f64,
    /// `K0 alpha / K`.
    pub bound_fdr: f64,
    /// `K1 beta / K`.
    pub bound_fnr: f64,
    /// `sum_{k<=K} 1/k`.
    pub delta: f64,
    pub fbh: Option<FbhReport>,
    /// `100 (1 - EN / n_FBH)`.
    pub savings_vs_fbh: Option<f64>,
    pub cap_hits: usize,
    pub flags: Vec<String>,
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    /// `V / (R v 1)`.
    pub fdp: f64,
    /// `U / (S v 1)`.
    pub fnp: f64,
    pub total_n: u64,
    pub cap_hit: bool,
    /// Baseline `(V/(R v 1), U/(S v 1))`, when configured.
    pub fbh: Option<(f64, f64)>,
}

/// A replication with every observation its procedure consumed.
#[derive(Debug, Clone)]
pub struct ReplicationTrace {
    pub outcome: RunOutcome,
    pub observations: Vec<Observation>,
}

/// A validated scenario with its ladders and generators built.
#[derive(Debug, Clone)]
pub struct Experiment {
    cfg: ExperimentConfig,
    model: StreamModel,
    test: SimpleTestSpec,
    procedure: Procedure,
    truth: Vec<Option<bool>>,
}

fn error_proportion(decisions: impl Iterator<Item = (bool, Option<bool>)>) -> (f64, f64) {
    let (mut v, mut r, mut u, mut s) = (0u32, 0u32, 0u32, 0u32);
    for (rejected, null_true) in decisions {
        if rejected {
            r += 1;
            v += u32::from(null_true == Some(true));
        } else {
            s += 1;
            u += u32::from(null_true == Some(false));
        }
    }
    (f64::from(v) / f64::from(r.max(1)), f64::from(u) / f64::from(s.max(1)))
}

fn mean_se(values: impl Iterator<Item = f64> + Clone, reps: usize) -> (f64, f64) {
    let n = reps as f64;
    let mean = values.clone().sum::<f64>() / n;
    if reps < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Worker-thread cap from `SEQBH_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

impl Experiment {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let model = StreamModel::new(&cfg.model)?;
        let test = cfg.hypothesis.simple_test()?;
        let procedure = Procedure::new(&cfg.procedure_spec()?)?;
        let truth = model.params().iter().map(|&p| cfg.hypothesis.null_is_true(p)).collect();
        Ok(Experiment {
            cfg: cfg.clone(),
            model,
            test,
            procedure,
            truth,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn procedure(&self) -> &Procedure {
        &self.procedure
    }

    /// Whether each stream's null hypothesis is true (`None` in the indifference zone).
    pub fn truth(&self) -> &[Option<bool>] {
        &self.truth
    }

    fn rng(&self, rep: u64, baseline: bool) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(2 * rep + u64::from(baseline));
        rng
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            max_n: Some(self.cfg.cap()),
            on_exhaustion: Exhaustion::AcceptRemaining,
        }
    }

    fn run_sequential(&self, rep: u64, trace: bool) -> Result<ReplicationTrace> {
        let mut feed = SimulatedFeed::new(&self.model, &self.test, self.rng(rep, false));
        if trace {
            feed = feed.with_trace();
        }
        let outcome = self.procedure.run(&mut feed, &self.cfg.schedule, self.options())?;
        Ok(ReplicationTrace {
            outcome,
            observations: feed.into_trace(),
        })
    }

    fn run_baseline(&self, rep: u64, total_n: u64) -> Result<(f64, f64)> {
        let k = self.model.streams();
        let n = total_n / k as u64;
        let mut rng = self.rng(rep, true);
        let (mut z, mut step, mut sums) = (Vec::new(), vec![0.0; k], vec![0.0; k]);
        for _ in 0..n {
            self.model.fill_step(&mut rng, &mut z, &mut step);
            for (s, x) in sums.iter_mut().zip(&step) {
                *s += x;
            }
        }
        let p_values = sums
            .iter()
            .map(|&s| {
                fixed_sample_pvalue(match self.cfg.hypothesis {
                    HypothesisSpec::BernoulliSimple { p0, .. } => PValueInput::Bernoulli {
                        n,
                        successes: s as u64,
                        p0,
                    },
                    HypothesisSpec::NormalMean { .. } => PValueInput::Normal {
                        n,
                        mean: s / n as f64,
                        theta0: 0.0,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rejected = fixed_sample_bh(&p_values, self.cfg.alpha)?;
        Ok(error_proportion(
            (0..k).map(|i| (rejected.binary_search(&i).is_ok(), self.truth[i])),
        ))
    }

    /// Runs replication `rep`; the result depends only on the seed and `rep`.
    pub fn replicate(&self, rep: u64) -> Result<Replication> {
        let run = self.run_sequential(rep, false)?.outcome;
        let (fdp, fnp) = error_proportion(
            run.decisions
                .iter()
                .map(|d| (d.verdict == Verdict::Reject, self.truth[d.stream])),
        );
        let fbh = self
            .cfg
            .fbh_total_n
            .map(|n| self.run_baseline(rep, n))
            .transpose()?;
        Ok(Replication {
            fdp,
            fnp,
            total_n: run.total_n,
            cap_hit: run.forced,
            fbh,
        })
    }

    /// Replication `rep` with its raw observations recorded.
    pub fn trace(&self, rep: u64) -> Result<ReplicationTrace> {
        self.run_sequential(rep, true)
    }

    /// Runs all replications on at most `threads` workers (all cores when `None`).
    pub fn run(&self, threads: Option<usize>) -> Result<McReport> {
        let reps = self.cfg.replications;
        let work = || {
            (0..reps as u64)
                .into_par_iter()
                .map(|rep| self.replicate(rep))
                .collect::<Result<Vec<_>>>()
        };
        let results = match threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {n} worker threads: {e}")))?
                .install(work)?,
            None => work()?,
        };
        Ok(self.summarize(&results))
    }

    fn summarize(&self, results: &[Replication]) -> McReport {
        let reps = results.len();
        let k = self.model.streams();
        let k0 = self.truth.iter().filter(|t| **t == Some(true)).count();
        let k1 = self.truth.iter().filter(|t| **t == Some(false)).count();
        let (fdr_hat, fdr_se) = mean_se(results.iter().map(|r| r.fdp), reps);
        let (fnr_hat, fnr_se) = mean_se(results.iter().map(|r| r.fnp), reps);
        let (en_hat, en_se) = mean_se(results.iter().map(|r| r.total_n as f64), reps);
        let fbh = self.cfg.fbh_total_n.map(|total_n| {
            let (fdr_hat, fdr_se) = mean_se(results.iter().map(|r| r.fbh.unwrap_or_default().0), reps);
            let (fnr_hat, fnr_se) = mean_se(results.iter().map(|r| r.fbh.unwrap_or_default().1), reps);
            FbhReport {
                total_n,
                fdr_hat,
                fdr_se,
                fnr_hat,
                fnr_se,
            }
        });
        McReport {
            label: self.cfg.label.clone(),
            k,
            k0,
            k1,
            replications: reps,
            fdr_hat,
            fdr_se,
            fnr_hat,
            fnr_se,
            en_hat,
            en_se,
            bound_fdr: k0 as f64 * self.cfg.alpha / k as f64,
            bound_fnr: k1 as f64 * self.cfg.beta / k as f64,
            delta: delta_factor(k),
            savings_vs_fbh: self
                .cfg
                .fbh_total_n
                .map(|n| 100.0 * (1.0 - en_hat / n as f64)),
            fbh,
            cap_hits: results.iter().filter(|r| r.cap_hit).count(),
            flags: self.cfg.flags.clone(),
        }
    }
}

/// Validates `cfg` and runs it with the thread cap taken from `SEQBH_THREADS`.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<McReport> {
    Experiment::new(cfg)?.run(threads_from_env()?)
}
