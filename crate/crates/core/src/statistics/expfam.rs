//! Exponential families `f_theta(x) = exp(theta' x - psi(theta))` used by the
//! per-stream statistics, with simple-vs-simple log-likelihood ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The families supported by the composite and simple statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExpFamilyModel {
    /// Bernoulli trials, `theta = logit(p)`, `psi = log(1 + e^theta)`.
    Bernoulli,
    /// `dim` independent unit-variance normals, `psi = |theta|^2 / 2`.
    UnitNormal { dim: usize },
    /// One observation is `(Y1, Y2)` with independent `Bin(m1, p1)`, `Bin(m2, p2)`.
    TwoSampleBinomial { m1: u32, m2: u32 },
}

pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `q log q + (1-q) log(1-q)` with `0 log 0 = 0`.
pub(crate) fn neg_binary_entropy(q: f64) -> f64 {
    xlogx(q) + xlogx(1.0 - q)
}

pub(crate) fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Natural parameter of a Bernoulli distribution, `logit(p)`.
pub fn bernoulli_natural(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(logit(p))
    } else {
        Err(Error::Domain(format!("Bernoulli p must lie in (0, 1), got {p}")))
    }
}

impl ExpFamilyModel {
    pub fn dim(&self) -> usize {
        match self {
            ExpFamilyModel::Bernoulli => 1,
            ExpFamilyModel::UnitNormal { dim } => *dim,
            ExpFamilyModel::TwoSampleBinomial { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExpFamilyModel::UnitNormal { dim: 0 } => {
                Err(Error::Domain("normal model needs dim >= 1".into()))
            }
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } if *m1 == 0 || *m2 == 0 => Err(
                Error::Domain("two-sample binomial needs m1, m2 >= 1".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Overshoot correction used with Wald ladders for this family:
    /// zero for discrete data, 0.583 for continuous data.
    pub fn default_rho(&self) -> f64 {
        match self {
            ExpFamilyModel::UnitNormal { .. } => super::wald::CONTINUOUS_RHO,
            _ => 0.0,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "expected a {}-vector, got length {}",
                self.dim(),
                v.len()
            )))
        }
    }

    /// Cumulant generating function `psi(theta)`.
    pub fn cumulant(&self, theta: &[f64]) -> f64 {
        match self {
            ExpFamilyModel::Bernoulli => softplus(theta[0]),
            ExpFamilyModel::UnitNormal { .. } => 0.5 * theta.iter().map(|t| t * t).sum::<f64>(),
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => {
                f64::from(*m1) * softplus(theta[0]) + f64::from(*m2) * softplus(theta[1])
            }
        }
    }

    /// Mean map `grad psi(theta)`.
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        match self {
            ExpFamilyModel::Bernoulli => vec![sigmoid(theta[0])],
            ExpFamilyModel::UnitNormal { .. } => theta.to_vec(),
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => vec![
                f64::from(*m1) * sigmoid(theta[0]),
                f64::from(*m2) * sigmoid(theta[1]),
            ],
        }
    }

    /// `(grad psi)^-1(mean)`, defined only for means interior to the mean domain.
    pub fn inverse_gradient(&self, mean: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(mean)?;
        match self {
            ExpFamilyModel::Bernoulli => Ok(vec![bernoulli_natural(mean[0])?]),
            ExpFamilyModel::UnitNormal { .. } => Ok(mean.to_vec()),
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => Ok(vec![
                bernoulli_natural(mean[0] / f64::from(*m1))?,
                bernoulli_natural(mean[1] / f64::from(*m2))?,
            ]),
        }
    }

    /// Whether `mean` lies in the closed convex support of the family.
    pub fn mean_in_closure(&self, mean: &[f64]) -> bool {
        if mean.len() != self.dim() || mean.iter().any(|m| !m.is_finite()) {
            return false;
        }
        match self {
            ExpFamilyModel::Bernoulli => (0.0..=1.0).contains(&mean[0]),
            ExpFamilyModel::UnitNormal { .. } => true,
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => {
                (0.0..=f64::from(*m1)).contains(&mean[0])
                    && (0.0..=f64::from(*m2)).contains(&mean[1])
            }
        }
    }

    /// Convex conjugate `psi*(mean) = sup_theta theta'mean - psi(theta)`.
    ///
    /// Finite on the whole closed mean domain (with `0 log 0 = 0`), which lets
    /// Kullback-Leibler numbers be evaluated at boundary MLEs.
    pub fn conjugate(&self, mean: &[f64]) -> f64 {
        match self {
            ExpFamilyModel::Bernoulli => neg_binary_entropy(mean[0]),
            ExpFamilyModel::UnitNormal { .. } => 0.5 * mean.iter().map(|m| m * m).sum::<f64>(),
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => {
                let (m1, m2) = (f64::from(*m1), f64::from(*m2));
                m1 * neg_binary_entropy(mean[0] / m1) + m2 * neg_binary_entropy(mean[1] / m2)
            }
        }
    }

    /// `I(theta_hat, lambda)` where `theta_hat` is the natural parameter with
    /// mean `mean_hat`, written as `psi*(mean_hat) - lambda'mean_hat + psi(lambda)`.
    pub fn kl_from_mean(&self, mean_hat: &[f64], lambda: &[f64]) -> f64 {
        let cross: f64 = lambda
            .iter()
            .zip(mean_hat)
            .map(|(l, m)| if *m == 0.0 { 0.0 } else { l * m })
            .sum();
        self.conjugate(mean_hat) - cross + self.cumulant(lambda)
    }

    /// Checks that `x` is a possible observation.
    pub fn check_observation(&self, x: &[f64]) -> Result<()> {
        self.check_dim(x)?;
        let ok = match self {
            ExpFamilyModel::Bernoulli => x[0] == 0.0 || x[0] == 1.0,
            ExpFamilyModel::UnitNormal { .. } => x.iter().all(|v| v.is_finite()),
            ExpFamilyModel::TwoSampleBinomial { m1, m2 } => {
                let count_ok = |y: f64, m: u32| y.fract() == 0.0 && (0.0..=f64::from(m)).contains(&y);
                count_ok(x[0], *m1) && count_ok(x[1], *m2)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("observation {x:?} outside the support of {self:?}")))
        }
    }
}

/// Kullback-Leibler information
/// `I(theta, lambda) = (theta - lambda)' grad psi(theta) - [psi(theta) - psi(lambda)]`.
pub fn kl_info(model: &ExpFamilyModel, theta: &[f64], lambda: &[f64]) -> f64 {
    let grad = model.gradient(theta);
    let linear: f64 = theta
        .iter()
        .zip(lambda)
        .zip(&grad)
        .map(|((t, l), g)| (t - l) * g)
        .sum();
    linear - (model.cumulant(theta) - model.cumulant(lambda))
}

/// Simple null `theta = eta` against simple alternative `theta = gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleTestSpec {
    pub model: ExpFamilyModel,
    pub eta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl SimpleTestSpec {
    pub fn new(model: ExpFamilyModel, eta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        model.validate()?;
        model.check_dim(&eta)?;
        model.check_dim(&gamma)?;
        if eta == gamma {
            return Err(Error::Domain("null and alternative parameters coincide".into()));
        }
        if eta.iter().chain(&gamma).any(|v| !v.is_finite()) {
            return Err(Error::Domain("natural parameters must be finite".into()));
        }
        Ok(SimpleTestSpec { model, eta, gamma })
    }

    /// `p = p0` against `p = p1` for Bernoulli trials.
    pub fn bernoulli(p0: f64, p1: f64) -> Result<Self> {
        Self::new(
            ExpFamilyModel::Bernoulli,
            vec![bernoulli_natural(p0)?],
            vec![bernoulli_natural(p1)?],
        )
    }

    /// Mean `mu0` against mean `mu1` for unit-variance normal observations.
    pub fn normal_mean(mu0: f64, mu1: f64) -> Result<Self> {
        Self::new(ExpFamilyModel::UnitNormal { dim: 1 }, vec![mu0], vec![mu1])
    }

    fn cumulant_gap(&self) -> f64 {
        self.model.cumulant(&self.gamma) - self.model.cumulant(&self.eta)
    }
}

/// Log-likelihood-ratio contribution of one observation:
/// `(gamma - eta)' x - [psi(gamma) - psi(eta)]`.
pub fn llr_increment(spec: &SimpleTestSpec, x: &[f64]) -> f64 {
    let linear: f64 = spec
        .gamma
        .iter()
        .zip(&spec.eta)
        .zip(x)
        .map(|((g, e), xi)| (g - e) * xi)
        .sum();
    linear - spec.cumulant_gap()
}

/// A sequential statistic fed one observation at a time.
pub trait SequentialStatistic {
    /// Consumes one observation and returns the updated statistic.
    fn observe(&mut self, x: &[f64]) -> Result<f64>;
    fn value(&self) -> f64;
    fn n(&self) -> u64;
}

/// Running sample size, sufficient statistic `S_n`, and current statistic value.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticAccumulator {
    pub n: u64,
    pub sum: Vec<f64>,
    pub value: f64,
}

impl StatisticAccumulator {
    pub fn new(dim: usize) -> Self {
        StatisticAccumulator {
            n: 0,
            sum: vec![0.0; dim],
            value: 0.0,
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.n += 1;
        for (s, v) in self.sum.iter_mut().zip(x) {
            *s += v;
        }
    }

    /// `S_n / n`; `None` before the first observation.
    pub fn mean(&self) -> Option<Vec<f64>> {
        (self.n > 0).then(|| self.sum.iter().map(|s| s / self.n as f64).collect())
    }
}

/// `Lambda_n = (gamma - eta)' S_n - n [psi(gamma) - psi(eta)]`.
#[derive(Debug, Clone)]
pub struct LlrStatistic {
    spec: SimpleTestSpec,
    direction: Vec<f64>,
    cumulant_gap: f64,
    acc: StatisticAccumulator,
}

impl LlrStatistic {
    pub fn new(spec: SimpleTestSpec) -> Self {
        let direction = spec.gamma.iter().zip(&spec.eta).map(|(g, e)| g - e).collect();
        let cumulant_gap = spec.cumulant_gap();
        let acc = StatisticAccumulator::new(spec.model.dim());
        LlrStatistic {
            spec,
            direction,
            cumulant_gap,
            acc,
        }
    }

    pub fn spec(&self) -> &SimpleTestSpec {
        &self.spec
    }

    pub fn accumulator(&self) -> &StatisticAccumulator {
        &self.acc
    }

    /// Like [`SequentialStatistic::observe`] without the support check.
    #[inline]
    pub fn observe_unchecked(&mut self, x: &[f64]) -> f64 {
        self.acc.push(x);
        let linear: f64 = self.direction.iter().zip(&self.acc.sum).map(|(d, s)| d * s).sum();
        self.acc.value = linear - self.acc.n as f64 * self.cumulant_gap;
        self.acc.value
    }
}

impl SequentialStatistic for LlrStatistic {
    fn observe(&mut self, x: &[f64]) -> Result<f64> {
        self.spec.model.check_observation(x)?;
        Ok(self.observe_unchecked(x))
    }

    fn value(&self) -> f64 {
        self.acc.value
    }

    fn n(&self) -> u64 {
        self.acc.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bernoulli_natural_examples() {
        assert_eq!(bernoulli_natural(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(bernoulli_natural(0.4).unwrap(), (2.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(bernoulli_natural(0.4).unwrap(), -0.405465, epsilon = 1e-6);
        let psi = ExpFamilyModel::Bernoulli.cumulant(&[bernoulli_natural(0.4).unwrap()]);
        assert_abs_diff_eq!(psi, (1.0f64 / 0.6).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(psi, 0.510826, epsilon = 1e-6);
        assert!(bernoulli_natural(0.0).is_err());
        assert!(bernoulli_natural(1.0).is_err());
    }

    #[test]
    fn llr_bernoulli_matches_density_ratio() {
        let spec = SimpleTestSpec::bernoulli(0.4, 0.6).unwrap();
        assert_abs_diff_eq!(llr_increment(&spec, &[1.0]), (0.6f64 / 0.4).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(llr_increment(&spec, &[0.0]), (0.4f64 / 0.6).ln(), epsilon = 1e-15);
    }

    #[test]
    fn llr_normal_mean() {
        let spec = SimpleTestSpec::normal_mean(0.0, 1.0).unwrap();
        for x in [-1.3, 0.0, 0.5, 2.25] {
            assert_abs_diff_eq!(llr_increment(&spec, &[x]), x - 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn identical_hypotheses_rejected() {
        assert!(SimpleTestSpec::bernoulli(0.4, 0.4).is_err());
        // The increment formula itself is zero for eta = gamma.
        let spec = SimpleTestSpec {
            model: ExpFamilyModel::Bernoulli,
            eta: vec![0.3],
            gamma: vec![0.3],
        };
        assert_eq!(llr_increment(&spec, &[1.0]), 0.0);
        assert_eq!(llr_increment(&spec, &[0.0]), 0.0);
    }

    #[test]
    fn kl_examples() {
        let m = ExpFamilyModel::Bernoulli;
        let th = bernoulli_natural(0.6).unwrap();
        let la = bernoulli_natural(0.4).unwrap();
        let oracle = 0.6 * (0.6f64 / 0.4).ln() + 0.4 * (0.4f64 / 0.6).ln();
        assert_abs_diff_eq!(kl_info(&m, &[th], &[la]), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, 0.081093, epsilon = 1e-6);
        assert_abs_diff_eq!(kl_info(&m, &[th], &[th]), 0.0, epsilon = 1e-15);
        let n = ExpFamilyModel::UnitNormal { dim: 1 };
        assert_abs_diff_eq!(kl_info(&n, &[1.0], &[0.0]), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn kl_from_mean_matches_natural_form() {
        let m = ExpFamilyModel::TwoSampleBinomial { m1: 3, m2: 2 };
        let theta = [0.3, -1.1];
        let lambda = [-0.4, 0.8];
        let mean = m.gradient(&theta);
        assert_abs_diff_eq!(
            m.kl_from_mean(&mean, &lambda),
            kl_info(&m, &theta, &lambda),
            epsilon = 1e-12
        );
    }

    #[test]
    fn kl_at_boundary_mean_is_finite() {
        let m = ExpFamilyModel::Bernoulli;
        let lam = bernoulli_natural(0.4).unwrap();
        // p_hat = 1: KL = log(1/0.4).
        assert_abs_diff_eq!(m.kl_from_mean(&[1.0], &[lam]), (1.0f64 / 0.4).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(m.kl_from_mean(&[0.0], &[lam]), (1.0f64 / 0.6).ln(), epsilon = 1e-14);
    }

    #[test]
    fn gradient_inverse_round_trip() {
        let models = [
            ExpFamilyModel::Bernoulli,
            ExpFamilyModel::UnitNormal { dim: 2 },
            ExpFamilyModel::TwoSampleBinomial { m1: 4, m2: 7 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in models {
            for _ in 0..200 {
                let theta: Vec<f64> = (0..m.dim()).map(|_| rng.random_range(-4.0..4.0)).collect();
                let back = m.inverse_gradient(&m.gradient(&theta)).unwrap();
                for (a, b) in theta.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-8, "{m:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn observation_support() {
        let m = ExpFamilyModel::TwoSampleBinomial { m1: 2, m2: 3 };
        assert!(m.check_observation(&[2.0, 3.0]).is_ok());
        assert!(m.check_observation(&[2.5, 0.0]).is_err());
        assert!(m.check_observation(&[3.0, 0.0]).is_err());
        assert!(ExpFamilyModel::Bernoulli.check_observation(&[0.5]).is_err());
        assert!(ExpFamilyModel::Bernoulli.check_observation(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn llr_statistic_matches_product_of_density_ratios() {
        let spec = SimpleTestSpec::bernoulli(0.4, 0.6).unwrap();
        let mut stat = LlrStatistic::new(spec.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut direct = 0.0;
        for _ in 0..500 {
            let x = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
            let v = stat.observe(&[x]).unwrap();
            direct += if x == 1.0 { (0.6f64 / 0.4).ln() } else { (0.4f64 / 0.6).ln() };
            assert!((v - direct).abs() < 1e-10);
        }
        assert_eq!(stat.n(), 500);
    }

    proptest! {
        #[test]
        fn kl_nonnegative(a in -6.0f64..6.0, b in -6.0f64..6.0, c in -6.0f64..6.0, d in -6.0f64..6.0) {
            let m = ExpFamilyModel::TwoSampleBinomial { m1: 2, m2: 5 };
            prop_assert!(kl_info(&m, &[a, b], &[c, d]) >= -1e-12);
            prop_assert!(kl_info(&ExpFamilyModel::Bernoulli, &[a], &[c]) >= -1e-12);
        }

        #[test]
        fn normal_llr_sums(xs in prop::collection::vec(-5.0f64..5.0, 1..60), delta in 0.1f64..2.0) {
            let spec = SimpleTestSpec::normal_mean(0.0, delta).unwrap();
            let mut stat = LlrStatistic::new(spec);
            let mut direct = 0.0;
            for x in &xs {
                stat.observe(&[*x]).unwrap();
                // log phi(x - delta) - log phi(x)
                direct += -0.5 * (x - delta).powi(2) + 0.5 * x * x;
            }
            prop_assert!((stat.value() - direct).abs() < 1e-10);
        }

        #[test]
        fn success_increases_llr(succ in 0u32..50, fail in 0u32..50) {
            let spec = SimpleTestSpec::bernoulli(0.4, 0.6).unwrap();
            let mut a = LlrStatistic::new(spec.clone());
            let mut b = LlrStatistic::new(spec);
            for _ in 0..succ { a.observe(&[1.0]).unwrap(); b.observe(&[1.0]).unwrap(); }
            for _ in 0..fail { a.observe(&[0.0]).unwrap(); b.observe(&[0.0]).unwrap(); }
            // b has one more success among the same number of trials plus one.
            a.observe(&[0.0]).unwrap();
            b.observe(&[1.0]).unwrap();
            prop_assert!(b.value() > a.value());
        }
    }
}
