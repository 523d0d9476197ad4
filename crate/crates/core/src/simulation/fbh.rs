//! The fixed-sample Benjamini-Hochberg baseline.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF, Normal, ContinuousCDF};

use crate::error::{Error, Result};

/// Step-up BH at level `alpha`: rejects the `j` smallest p-values, where
/// `j = max { i : p_(i) <= i alpha / K }`. Returns stream indices in ascending order.
pub fn fixed_sample_bh(p_values: &[f64], alpha: f64) -> Result<Vec<usize>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if let Some(k) = p_values.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Domain(format!("p-value {k} = {} outside [0, 1]", p_values[k])));
    }
    let k = p_values.len() as f64;
    let mut order: Vec<usize> = (0..p_values.len()).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let cut = order
        .iter()
        .enumerate()
        .rev()
        .find(|(i, &s)| p_values[s] <= (i + 1) as f64 * alpha / k)
        .map_or(0, |(i, _)| i + 1);
    let mut rejected = order[..cut].to_vec();
    rejected.sort_unstable();
    Ok(rejected)
}

/// Data summarised for a one-sided fixed-sample p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PValueInput {
    /// `successes` in `n` Bernoulli trials, null `p <= p0`.
    Bernoulli { n: u64, successes: u64, p0: f64 },
    /// Sample `mean` of `n` unit-variance normals, null `theta <= theta0`.
    Normal { n: u64, mean: f64, theta0: f64 },
}

/// Exact binomial upper tail `P(X >= successes)` under `p0`, or the normal
/// upper tail of `sqrt(n) (mean - theta0)`.
pub fn fixed_sample_pvalue(input: PValueInput) -> Result<f64> {
    match input {
        PValueInput::Bernoulli { n, successes, p0 } => {
            if successes > n {
                return Err(Error::Domain(format!("{successes} successes in {n} trials")));
            }
            if successes == 0 {
                return Ok(1.0);
            }
            let dist = Binomial::new(p0, n).map_err(|e| Error::Domain(e.to_string()))?;
            Ok(dist.sf(successes - 1))
        }
        PValueInput::Normal { n, mean, theta0 } => {
            if n == 0 || !mean.is_finite() {
                return Err(Error::Domain("normal p-value needs n >= 1 and a finite mean".into()));
            }
            let z = (n as f64).sqrt() * (mean - theta0);
            Ok(Normal::standard().sf(z))
        }
    }
}

/// `Delta = sum_{k=1}^K 1/k`.
pub fn delta_factor(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bh_examples() {
        assert!(fixed_sample_bh(&[1.0, 1.0, 1.0], 0.05).unwrap().is_empty());
        assert_eq!(fixed_sample_bh(&[0.01, 0.03], 0.05).unwrap(), vec![0, 1]);
        assert!(fixed_sample_bh(&[0.02, 0.04, 0.9], 0.05).unwrap().is_empty());
        assert_eq!(fixed_sample_bh(&[0.9, 0.001, 0.04], 0.05).unwrap(), vec![1]);
        assert!(fixed_sample_bh(&[0.5, 1.2], 0.05).is_err());
        assert!(fixed_sample_bh(&[], 0.05).unwrap().is_empty());
    }

    #[test]
    fn step_up_not_step_down() {
        // p_(1) = .03 > .05/3 fails, but p_(3) = .05 <= .05 makes all three rejections valid.
        assert_eq!(fixed_sample_bh(&[0.03, 0.05, 0.04], 0.05).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn pvalue_examples() {
        let p = fixed_sample_pvalue(PValueInput::Bernoulli {
            n: 10,
            successes: 8,
            p0: 0.4,
        })
        .unwrap();
        assert_abs_diff_eq!(p, 0.0122945536, epsilon = 1e-10);
        let p = fixed_sample_pvalue(PValueInput::Bernoulli {
            n: 10,
            successes: 0,
            p0: 0.4,
        })
        .unwrap();
        assert_eq!(p, 1.0);
        let p = fixed_sample_pvalue(PValueInput::Normal {
            n: 16,
            mean: 0.5,
            theta0: 0.0,
        })
        .unwrap();
        assert_abs_diff_eq!(p, 0.022750131948179195, epsilon = 1e-11);
    }

    #[test]
    fn harmonic_sums() {
        assert_eq!(delta_factor(1), 1.0);
        assert_eq!(delta_factor(2), 1.5);
        assert_eq!(delta_factor(10), 2.9289682539682538);
    }
}
