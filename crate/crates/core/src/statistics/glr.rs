//! Generalized likelihood ratio statistics for composite hypotheses
//! `u(theta) <= u0` against `u(theta) >= u1`, and their signed roots.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistics::expfam::{logit, ExpFamilyModel, SequentialStatistic, StatisticAccumulator};

/// The real-valued functional `u` defining the hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Functional {
    /// `u(theta) = theta` (one-dimensional models).
    Natural,
    /// `u(theta) = grad psi(theta)`, e.g. the success probability (one-dimensional models).
    Mean,
    /// `u(theta) = |theta - center|` for unit-variance normal models of dimension 1 or 2.
    Distance { center: Vec<f64> },
    /// `u(theta) = (p1 - p2)^2` for the two-sample binomial model.
    ProportionGapSquared,
}

impl Functional {
    fn check(&self, model: &ExpFamilyModel) -> Result<()> {
        let ok = match (self, model) {
            (Functional::Natural | Functional::Mean, m) => m.dim() == 1,
            (Functional::Distance { center }, ExpFamilyModel::UnitNormal { dim }) => {
                center.len() == *dim && *dim <= 2
            }
            (Functional::ProportionGapSquared, ExpFamilyModel::TwoSampleBinomial { .. }) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("functional {self:?} is not supported for {model:?}")))
        }
    }

    /// `u` evaluated at the parameter whose mean is `mean`. Boundary means
    /// map to infinite natural parameters where applicable.
    pub fn value_at_mean(&self, model: &ExpFamilyModel, mean: &[f64]) -> f64 {
        match self {
            Functional::Natural => match model {
                ExpFamilyModel::Bernoulli if mean[0] <= 0.0 => f64::NEG_INFINITY,
                ExpFamilyModel::Bernoulli if mean[0] >= 1.0 => f64::INFINITY,
                ExpFamilyModel::Bernoulli => logit(mean[0]),
                _ => mean[0],
            },
            Functional::Mean => mean[0],
            Functional::Distance { center } => mean
                .iter()
                .zip(center)
                .map(|(m, c)| (m - c) * (m - c))
                .sum::<f64>()
                .sqrt(),
            Functional::ProportionGapSquared => match model {
                ExpFamilyModel::TwoSampleBinomial { m1, m2 } => {
                    let gap = mean[0] / f64::from(*m1) - mean[1] / f64::from(*m2);
                    gap * gap
                }
                _ => f64::NAN,
            },
        }
    }
}

/// Test of `u(theta) <= u0` against `u(theta) >= u1` in an exponential family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlrSpec {
    pub model: ExpFamilyModel,
    pub functional: Functional,
    pub u0: f64,
    pub u1: f64,
}

impl GlrSpec {
    pub fn new(model: ExpFamilyModel, functional: Functional, u0: f64, u1: f64) -> Result<Self> {
        model.validate()?;
        functional.check(&model)?;
        if !(u0 < u1) {
            return Err(Error::Domain(format!("need u0 < u1, got u0 = {u0}, u1 = {u1}")));
        }
        Ok(GlrSpec {
            model,
            functional,
            u0,
            u1,
        })
    }
}

const GRID: usize = 256;
const GOLDEN_TOL: f64 = 1e-13;

/// Minimizes `f` over `[lo, hi]` by a coarse scan followed by golden-section
/// refinement inside the bracket around the best grid point. Endpoints are
/// never evaluated, so `f` may be singular there.
pub(crate) fn bracketed_minimum(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let width = hi - lo;
    let at = |i: usize| lo + width * (i as f64 + 0.5) / GRID as f64;
    let (best, _) = (0..GRID)
        .map(|i| (i, f(at(i))))
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Numerical("objective undefined on the whole constraint set".into()))?;
    let mut a = if best == 0 { lo } else { at(best - 1) };
    let mut b = if best + 1 == GRID { hi } else { at(best + 1) };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while (b - a) > GOLDEN_TOL * width.max(1.0) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Numerical("golden-section search did not converge".into()));
        }
    }
    let (t, v) = if fc <= fd { (c, fc) } else { (d, fd) };
    if !v.is_finite() {
        return Err(Error::Numerical(format!("constrained minimum is not finite ({v})")));
    }
    Ok((t, v))
}

/// `inf { I(theta_hat, lambda) : u(lambda) = level }` where `theta_hat` has mean `mean_hat`.
pub fn constrained_kl_infimum(
    model: &ExpFamilyModel,
    functional: &Functional,
    mean_hat: &[f64],
    level: f64,
) -> Result<f64> {
    functional.check(model)?;
    if !model.mean_in_closure(mean_hat) {
        return Err(Error::Domain(format!("mean {mean_hat:?} outside the model's mean domain")));
    }
    let kl = |lambda: &[f64]| model.kl_from_mean(mean_hat, lambda);
    match functional {
        Functional::Natural => Ok(kl(&[level])),
        Functional::Mean => {
            let lambda = model.inverse_gradient(&[level])?;
            Ok(kl(&lambda))
        }
        Functional::Distance { center } => {
            if level < 0.0 {
                return Err(Error::Domain(format!("distance level {level} is negative")));
            }
            match center.len() {
                1 => Ok(kl(&[center[0] - level]).min(kl(&[center[0] + level]))),
                _ => {
                    if level == 0.0 {
                        return Ok(kl(center));
                    }
                    let on_circle =
                        |t: f64| kl(&[center[0] + level * t.cos(), center[1] + level * t.sin()]);
                    Ok(bracketed_minimum(on_circle, 0.0, TAU)?.1)
                }
            }
        }
        Functional::ProportionGapSquared => {
            if level < 0.0 {
                return Err(Error::Domain(format!("gap level {level} is negative")));
            }
            let delta = level.sqrt();
            if delta >= 1.0 {
                return Err(Error::Domain(format!(
                    "no proportions differ by {delta}; need |p1 - p2| < 1"
                )));
            }
            let arc = |p1_offset: f64, p2_offset: f64| {
                move |p: f64| kl(&[logit(p + p1_offset), logit(p + p2_offset)])
            };
            if delta == 0.0 {
                return Ok(bracketed_minimum(arc(0.0, 0.0), 0.0, 1.0)?.1);
            }
            let upper = bracketed_minimum(arc(delta, 0.0), 0.0, 1.0 - delta)?.1;
            let lower = bracketed_minimum(arc(0.0, delta), 0.0, 1.0 - delta)?.1;
            Ok(upper.min(lower))
        }
    }
}

/// `(Lambda_H, Lambda_G) = n * inf I(theta_hat_n, .)` over `u = u0` and `u = u1`.
pub fn glr_statistics(spec: &GlrSpec, acc: &StatisticAccumulator) -> Result<(f64, f64)> {
    let mean = acc
        .mean()
        .ok_or_else(|| Error::Domain("GLR statistic needs at least one observation".into()))?;
    let n = acc.n as f64;
    let h = constrained_kl_infimum(&spec.model, &spec.functional, &mean, spec.u0)?;
    let g = constrained_kl_infimum(&spec.model, &spec.functional, &mean, spec.u1)?;
    Ok((n * h.max(0.0), n * g.max(0.0)))
}

/// `+sqrt(2 Lambda_H)` when `u_hat > u0` and `Lambda_H >= Lambda_G`, otherwise
/// `-sqrt(2 Lambda_G)`. Both inputs already carry the factor `n`.
pub fn signed_root(lambda_h: f64, lambda_g: f64, u_hat: f64, u0: f64) -> f64 {
    if u_hat > u0 && lambda_h >= lambda_g {
        (2.0 * lambda_h).sqrt()
    } else {
        -(2.0 * lambda_g).sqrt()
    }
}

/// Signed-root GLR statistic updated per observation.
#[derive(Debug, Clone)]
pub struct GlrStatistic {
    spec: GlrSpec,
    acc: StatisticAccumulator,
}

impl GlrStatistic {
    pub fn new(spec: GlrSpec) -> Self {
        let acc = StatisticAccumulator::new(spec.model.dim());
        GlrStatistic { spec, acc }
    }

    pub fn spec(&self) -> &GlrSpec {
        &self.spec
    }

    pub fn accumulator(&self) -> &StatisticAccumulator {
        &self.acc
    }
}

impl SequentialStatistic for GlrStatistic {
    fn observe(&mut self, x: &[f64]) -> Result<f64> {
        self.spec.model.check_observation(x)?;
        self.acc.push(x);
        let (h, g) = glr_statistics(&self.spec, &self.acc)?;
        let mean = self.acc.mean().expect("n >= 1 after push");
        let u_hat = self.spec.functional.value_at_mean(&self.spec.model, &mean);
        self.acc.value = signed_root(h, g, u_hat, self.spec.u0);
        Ok(self.acc.value)
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
    use crate::statistics::expfam::bernoulli_natural;
    use approx::assert_abs_diff_eq;

    fn acc(sum: Vec<f64>, n: u64) -> StatisticAccumulator {
        StatisticAccumulator { n, sum, value: 0.0 }
    }

    #[test]
    fn zero_when_mle_satisfies_constraint() {
        let spec = GlrSpec::new(ExpFamilyModel::UnitNormal { dim: 1 }, Functional::Natural, 0.3, 1.0)
            .unwrap();
        let (h, _) = glr_statistics(&spec, &acc(vec![3.0], 10)).unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn normal_closed_form() {
        let spec = GlrSpec::new(ExpFamilyModel::UnitNormal { dim: 1 }, Functional::Natural, 0.0, 1.0)
            .unwrap();
        let (h, g) = glr_statistics(&spec, &acc(vec![7.3], 10)).unwrap();
        assert_abs_diff_eq!(h, 10.0 * 0.73f64.powi(2) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g, 10.0 * 0.27f64.powi(2) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_mean_functional_with_boundary_mle() {
        let spec = GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::Mean, 0.4, 0.6).unwrap();
        // All successes: p_hat = 1, I(1, 0.4) = log(1/0.4).
        let (h, g) = glr_statistics(&spec, &acc(vec![5.0], 5)).unwrap();
        assert_abs_diff_eq!(h, 5.0 * (2.5f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(g, 5.0 * (1.0f64 / 0.6).ln(), epsilon = 1e-12);
        let nat = GlrSpec::new(
            ExpFamilyModel::Bernoulli,
            Functional::Natural,
            bernoulli_natural(0.4).unwrap(),
            bernoulli_natural(0.6).unwrap(),
        )
        .unwrap();
        let (h2, g2) = glr_statistics(&nat, &acc(vec![5.0], 5)).unwrap();
        assert_abs_diff_eq!(h, h2, epsilon = 1e-12);
        assert_abs_diff_eq!(g, g2, epsilon = 1e-12);
    }

    #[test]
    fn circle_constraint_closed_form() {
        let spec = GlrSpec::new(
            ExpFamilyModel::UnitNormal { dim: 2 },
            Functional::Distance {
                center: vec![0.0, 0.0],
            },
            0.0,
            1.0,
        )
        .unwrap();
        let mean = [0.6, -1.7];
        let d = (0.36f64 + 2.89).sqrt();
        let (h, g) = glr_statistics(&spec, &acc(mean.iter().map(|m| m * 4.0).collect(), 4)).unwrap();
        assert_abs_diff_eq!(h, 4.0 * d * d / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g, 4.0 * (d - 1.0).powi(2) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn pooled_constraint_matches_closed_form() {
        let model = ExpFamilyModel::TwoSampleBinomial { m1: 3, m2: 2 };
        let spec = GlrSpec::new(model, Functional::ProportionGapSquared, 0.0, 0.04).unwrap();
        // n = 6, sum Y1 = 11 of 18, sum Y2 = 3 of 12.
        let (h, _) = glr_statistics(&spec, &acc(vec![11.0, 3.0], 6)).unwrap();
        let (p1, p2, pi) = (11.0 / 18.0, 3.0 / 12.0, 14.0 / 30.0);
        let kl = |p: f64, q: f64| p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
        let closed = 6.0 * (3.0 * kl(p1, pi) + 2.0 * kl(p2, pi));
        assert_abs_diff_eq!(h, closed, epsilon = 1e-9);
    }

    #[test]
    fn signed_root_branches() {
        assert_eq!(signed_root(0.0, 0.0, 0.0, 0.0), -0.0);
        assert!(signed_root(0.0, 0.0, 0.0, 0.0).is_sign_negative());
        assert_abs_diff_eq!(signed_root(2.0, 1.0, 1.0, 0.0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(signed_root(8.0, 2.0, -1.0, 0.0), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(signed_root(1.0, 2.0, 1.0, 0.0), -2.0, epsilon = 1e-15);
    }

    #[test]
    fn unsupported_combinations() {
        assert!(GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::ProportionGapSquared, 0.0, 1.0)
            .is_err());
        assert!(GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::Mean, 0.6, 0.4).is_err());
        assert!(GlrSpec::new(
            ExpFamilyModel::UnitNormal { dim: 3 },
            Functional::Distance { center: vec![0.0; 3] },
            0.0,
            1.0
        )
        .is_err());
        let spec = GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::Mean, 0.4, 0.6).unwrap();
        assert!(glr_statistics(&spec, &acc(vec![0.0], 0)).is_err());
    }

    #[test]
    fn glr_statistic_tracks_direction() {
        let spec = GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::Mean, 0.4, 0.6).unwrap();
        let mut up = GlrStatistic::new(spec.clone());
        let mut down = GlrStatistic::new(spec);
        for _ in 0..20 {
            up.observe(&[1.0]).unwrap();
            down.observe(&[0.0]).unwrap();
        }
        assert!(up.value() > 3.0);
        assert!(down.value() < -3.0);
    }
}
