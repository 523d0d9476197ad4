//! Monte Carlo calibration of critical-value ladders for statistics without
//! closed-form boundaries, such as signed-root GLRs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::procedure::{CriticalLadder, RejectiveLadder};
use crate::statistics::expfam::SequentialStatistic;
use crate::statistics::wald::WaldConfig;

/// Simulation budget: `reps` paths of length `horizon`, reproducible from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub reps: usize,
    pub horizon: u64,
    pub seed: u64,
}

impl Calibration {
    fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.horizon == 0 {
            return Err(Error::Domain("calibration needs reps >= 1 and horizon >= 1".into()));
        }
        Ok(())
    }
}

/// Runs `stat` on `len` observations drawn by `draw`, returning the path `Lambda_1..Lambda_len`.
pub fn simulate_statistic_path<S, D>(mut stat: S, mut draw: D, len: u64) -> Result<Vec<f64>>
where
    S: SequentialStatistic,
    D: FnMut() -> Vec<f64>,
{
    (0..len).map(|_| stat.observe(&draw())).collect()
}

fn simulate_paths<F>(cal: &Calibration, seed: u64, mut path: F) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&mut ChaCha8Rng, u64) -> Result<Vec<f64>>,
{
    (0..cal.reps)
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64);
            let p = path(&mut rng, cal.horizon)?;
            if p.iter().any(|v| v.is_nan()) {
                return Err(Error::Numerical(format!("statistic path {rep} contains NaN")));
            }
            Ok(p)
        })
        .collect()
}

/// Smallest `b` with at most `floor(q * len)` values `>= b`.
fn upper_quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(|a, b| b.total_cmp(a));
    let allowed = (q * values.len() as f64).floor() as usize;
    values.get(allowed).map_or(f64::NEG_INFINITY, |v| v.next_up())
}

/// Largest `a` with at most `floor(q * len)` values `<= a`.
fn lower_quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let allowed = (q * values.len() as f64).floor() as usize;
    values.get(allowed).map_or(f64::INFINITY, |v| v.next_down())
}

fn check_finite(which: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!(
            "{which} threshold is not finite; increase the replications or horizon"
        )))
    }
}

/// Rejective thresholds `B_s` with `P_null(max_{n <= horizon} Lambda_n >= B_s) <= s alpha / K`.
///
/// `null_path(rng, horizon)` must return the statistic path under the least
/// favourable null.
pub fn calibrate_rejective_ladder<F>(
    alpha: f64,
    k: usize,
    cal: &Calibration,
    null_path: F,
) -> Result<RejectiveLadder>
where
    F: FnMut(&mut ChaCha8Rng, u64) -> Result<Vec<f64>>,
{
    if !(alpha > 0.0 && alpha < 1.0) || k == 0 {
        return Err(Error::Domain(format!("need alpha in (0, 1) and K >= 1, got {alpha}, {k}")));
    }
    cal.validate()?;
    let paths = simulate_paths(cal, cal.seed, null_path)?;
    let maxima: Vec<f64> = paths
        .iter()
        .map(|p| p.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let upper = (1..=k)
        .map(|s| {
            let q = s as f64 * alpha / k as f64;
            check_finite("upper", upper_quantile(&mut maxima.clone(), q))
        })
        .collect::<Result<Vec<_>>>()?;
    RejectiveLadder::new(upper)
}

/// Extremes of each path before it leaves through the opposite outer boundary.
fn stopped_extremes(paths: &[Vec<f64>], stop: impl Fn(f64) -> bool, max: bool) -> Vec<f64> {
    paths
        .iter()
        .map(|p| {
            let mut ext = if max { f64::NEG_INFINITY } else { f64::INFINITY };
            for &v in p {
                ext = if max { ext.max(v) } else { ext.min(v) };
                if stop(v) {
                    break;
                }
            }
            ext
        })
        .collect()
}

/// Full ladder with `P_null(Lambda reaches B_s before A_1) <= s alpha / K` and
/// `P_alt(Lambda reaches A_s before B_1) <= s beta / K`, found by alternating
/// updates of the two sides on common simulated paths.
pub fn calibrate_full_ladder<F, G>(
    cfg: &WaldConfig,
    cal: &Calibration,
    iterations: usize,
    null_path: F,
    alt_path: G,
) -> Result<CriticalLadder>
where
    F: FnMut(&mut ChaCha8Rng, u64) -> Result<Vec<f64>>,
    G: FnMut(&mut ChaCha8Rng, u64) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    cal.validate()?;
    let null = simulate_paths(cal, cal.seed, null_path)?;
    let alt = simulate_paths(cal, cal.seed.wrapping_add(1), alt_path)?;
    let k = cfg.k as f64;
    let (mut lower, mut upper) = (vec![f64::NEG_INFINITY; cfg.k], vec![f64::INFINITY; cfg.k]);
    for _ in 0..iterations.max(1) {
        let a1 = lower[0];
        let maxima = stopped_extremes(&null, |v| v <= a1, true);
        for (s, b) in upper.iter_mut().enumerate() {
            *b = upper_quantile(&mut maxima.clone(), (s + 1) as f64 * cfg.alpha / k);
        }
        let b1 = upper[0];
        let minima = stopped_extremes(&alt, |v| v >= b1, false);
        for (s, a) in lower.iter_mut().enumerate() {
            *a = lower_quantile(&mut minima.clone(), (s + 1) as f64 * cfg.beta / k);
        }
    }
    for (a, b) in lower.iter().zip(&upper) {
        check_finite("lower", *a)?;
        check_finite("upper", *b)?;
    }
    if lower[cfg.k - 1] >= upper[cfg.k - 1] {
        return Err(Error::Numerical(format!(
            "calibrated A_K = {} is not below B_K = {}",
            lower[cfg.k - 1],
            upper[cfg.k - 1]
        )));
    }
    CriticalLadder::new(lower, upper)
}
