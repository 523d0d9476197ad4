//! Closed-form Wald boundaries and the per-fraction SBH ladders built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::procedure::{CriticalLadder, RejectiveLadder};

/// Overshoot correction commonly used for continuous observations.
pub const CONTINUOUS_RHO: f64 = 0.583;

/// Direction in which the overshoot correction `rho` moves the boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overshoot {
    /// `A - rho`, `B + rho`.
    #[default]
    Outward,
    /// `A + rho`, `B - rho`: compensates for the excess over the boundary
    /// of continuous statistics.
    Inward,
}

impl Overshoot {
    fn signed(self, rho: f64) -> f64 {
        match self {
            Overshoot::Outward => rho,
            Overshoot::Inward => -rho,
        }
    }
}

/// FDR level `alpha`, FNR level `beta`, number of streams `k`, overshoot `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaldConfig {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    #[serde(default)]
    pub rho: f64,
}

impl WaldConfig {
    pub fn new(alpha: f64, beta: f64, k: usize, rho: f64) -> Result<Self> {
        let cfg = WaldConfig { alpha, beta, k, rho };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_level("alpha", self.alpha)?;
        check_level("beta", self.beta)?;
        if self.alpha + self.beta > 1.0 {
            return Err(Error::Domain(format!(
                "alpha + beta = {} exceeds 1",
                self.alpha + self.beta
            )));
        }
        if self.k == 0 {
            return Err(Error::Domain("K must be at least 1".into()));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::Domain(format!("rho must be finite and >= 0, got {}", self.rho)));
        }
        Ok(())
    }
}

fn check_level(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Wald's approximate SPRT boundaries for type I level `a` and type II level `b`:
/// `A = log(b/(1-a)) - rho`, `B = log((1-b)/a) + rho`.
pub fn wald_ab(a: f64, b: f64, rho: f64) -> Result<(f64, f64)> {
    check_level("a", a)?;
    check_level("b", b)?;
    if a + b > 1.0 {
        return Err(Error::Domain(format!("a + b = {} exceeds 1", a + b)));
    }
    let lower = (b / (1.0 - a)).ln() - rho;
    let upper = ((1.0 - b) / a).ln() + rho;
    if lower >= upper {
        return Err(Error::Domain(format!(
            "degenerate boundaries: A = {lower} is not below B = {upper}"
        )));
    }
    Ok((lower, upper))
}

/// `alpha_s = alpha(K - s beta)/(K(K - beta))` and
/// `beta_s = beta(K - s alpha)/(K(K - alpha))`.
pub fn fractional_levels(cfg: &WaldConfig, s: usize) -> Result<(f64, f64)> {
    cfg.validate()?;
    if s == 0 || s > cfg.k {
        return Err(Error::Domain(format!("s = {s} outside 1..={}", cfg.k)));
    }
    let (k, s) = (cfg.k as f64, s as f64);
    let alpha_s = cfg.alpha * (k - s * cfg.beta) / (k * (k - cfg.beta));
    let beta_s = cfg.beta * (k - s * cfg.alpha) / (k * (k - cfg.alpha));
    Ok((alpha_s, beta_s))
}

/// One row of a Wald SBH ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderRow {
    pub s: usize,
    pub a: f64,
    pub b: f64,
    pub alpha_s: f64,
    pub beta_s: f64,
}

/// `A_s = log(s beta / ((1 - alpha_s) K)) - rho`, `B_s = log((1 - beta_s) K / (s alpha)) + rho`
/// for `s = 1..=K`.
pub fn sbh_wald_rows(cfg: &WaldConfig) -> Result<Vec<LadderRow>> {
    cfg.validate()?;
    let k = cfg.k as f64;
    (1..=cfg.k)
        .map(|s| {
            let (alpha_s, beta_s) = fractional_levels(cfg, s)?;
            let sf = s as f64;
            let a = (sf * cfg.beta / ((1.0 - alpha_s) * k)).ln() - cfg.rho;
            let b = ((1.0 - beta_s) * k / (sf * cfg.alpha)).ln() + cfg.rho;
            Ok(LadderRow {
                s,
                a,
                b,
                alpha_s,
                beta_s,
            })
        })
        .collect()
}

/// The Wald SBH ladder as a validated [`CriticalLadder`].
pub fn sbh_wald_ladder(cfg: &WaldConfig) -> Result<CriticalLadder> {
    sbh_wald_ladder_with(cfg, Overshoot::Outward)
}

/// [`sbh_wald_ladder`] with `rho` applied in the given direction.
pub fn sbh_wald_ladder_with(cfg: &WaldConfig, overshoot: Overshoot) -> Result<CriticalLadder> {
    let rows = sbh_wald_rows(&WaldConfig { rho: 0.0, ..*cfg })?;
    let shift = overshoot.signed(cfg.rho);
    let lower: Vec<f64> = rows.iter().map(|r| r.a - shift).collect();
    let upper: Vec<f64> = rows.iter().map(|r| r.b + shift).collect();
    let k = cfg.k;
    if lower[k - 1] >= upper[k - 1] {
        return Err(Error::Domain(format!(
            "degenerate ladder: A_{k} = {} is not below B_{k} = {}",
            lower[k - 1],
            upper[k - 1]
        )));
    }
    CriticalLadder::new(lower, upper)
        .map_err(|e| Error::Numerical(format!("Wald ladder lost its ordering: {e}")))
}

/// Upper thresholds `B_s = log(K/(s alpha)) + rho` for the rejective procedure.
pub fn rejective_wald_ladder(alpha: f64, k: usize, rho: f64) -> Result<RejectiveLadder> {
    rejective_wald_ladder_with(alpha, k, rho, Overshoot::Outward)
}

/// [`rejective_wald_ladder`] with `rho` applied in the given direction.
pub fn rejective_wald_ladder_with(
    alpha: f64,
    k: usize,
    rho: f64,
    overshoot: Overshoot,
) -> Result<RejectiveLadder> {
    check_level("alpha", alpha)?;
    if k == 0 {
        return Err(Error::Domain("K must be at least 1".into()));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    let kf = k as f64;
    RejectiveLadder::new(
        (1..=k)
            .map(|s| (kf / (s as f64 * alpha)).ln() + overshoot.signed(rho))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_half_levels_are_degenerate() {
        assert!(matches!(wald_ab(0.5, 0.5, 0.0), Err(Error::Domain(_))));
        assert!(wald_ab(0.6, 0.5, 0.0).is_err());
        assert!(wald_ab(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn classic_boundaries() {
        let (a, b) = wald_ab(0.05, 0.2, 0.0).unwrap();
        // log(0.2/0.95), log(16)
        assert_abs_diff_eq!(a, -1.5581446180465499, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 2.772588722239781, epsilon = 1e-14);
    }

    #[test]
    fn rho_shifts_outward() {
        let (a0, b0) = wald_ab(0.05, 0.2, 0.0).unwrap();
        let (a1, b1) = wald_ab(0.05, 0.2, 0.583).unwrap();
        assert_abs_diff_eq!(a0 - a1, 0.583, epsilon = 1e-14);
        assert_abs_diff_eq!(b1 - b0, 0.583, epsilon = 1e-14);
    }

    #[test]
    fn fractional_levels_examples() {
        let cfg = WaldConfig::new(0.05, 0.2, 1, 0.0).unwrap();
        let (a1, b1) = fractional_levels(&cfg, 1).unwrap();
        assert_abs_diff_eq!(a1, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(b1, 0.2, epsilon = 1e-15);

        let cfg = WaldConfig::new(0.05, 0.2, 2, 0.0).unwrap();
        let (a1, b1) = fractional_levels(&cfg, 1).unwrap();
        assert_abs_diff_eq!(a1, 0.05 * 1.8 / 3.6, epsilon = 1e-15);
        assert_abs_diff_eq!(a1, 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(b1, 0.2 * 1.95 / 3.9, epsilon = 1e-15);
        assert_abs_diff_eq!(b1, 0.1, epsilon = 1e-15);
        assert!(fractional_levels(&cfg, 3).is_err());
    }

    #[test]
    fn alpha_s_decreases_in_s() {
        let cfg = WaldConfig::new(0.05, 0.2, 10, 0.0).unwrap();
        let levels: Vec<f64> = (1..=10).map(|s| fractional_levels(&cfg, s).unwrap().0).collect();
        assert!(levels.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn k1_ladder_is_sprt() {
        let cfg = WaldConfig::new(0.05, 0.2, 1, 0.0).unwrap();
        let l = sbh_wald_ladder(&cfg).unwrap();
        let (a, b) = wald_ab(0.05, 0.2, 0.0).unwrap();
        assert_abs_diff_eq!(l.a(1), a, epsilon = 1e-14);
        assert_abs_diff_eq!(l.b(1), b, epsilon = 1e-14);
    }

    #[test]
    fn k2_ladder_values() {
        let cfg = WaldConfig::new(0.05, 0.2, 2, 0.0).unwrap();
        let l = sbh_wald_ladder(&cfg).unwrap();
        // alpha_1 = alpha / K, so A_1 = log(beta / (K - alpha)).
        assert_abs_diff_eq!(l.a(1), (0.2f64 / 1.95).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(l.a(1), -2.2772672850097555, epsilon = 1e-14);
        assert_abs_diff_eq!(l.b(1), 36f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(l.b(1), 3.5835, epsilon = 5e-5);
        let alpha2 = 0.05 * 1.6 / 3.6;
        assert_abs_diff_eq!(l.a(2), (0.4f64 / ((1.0 - alpha2) * 2.0)).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(l.a(2), -1.5869650565820417, epsilon = 1e-14);
        assert!(l.a(2) > l.a(1));
    }

    #[test]
    fn rejective_ladder_decreasing() {
        let l = rejective_wald_ladder(0.05, 4, 0.0).unwrap();
        assert_abs_diff_eq!(l.b(1), (4.0f64 / 0.05).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(l.b(4), (1.0f64 / 0.05).ln(), epsilon = 1e-14);
        assert!(rejective_wald_ladder(1.0, 4, 0.0).is_err());
    }

    #[test]
    fn inward_overshoot_narrows() {
        let cfg = WaldConfig::new(0.05, 0.2, 2, 0.583).unwrap();
        let out = sbh_wald_ladder(&cfg).unwrap();
        let inward = sbh_wald_ladder_with(&cfg, Overshoot::Inward).unwrap();
        for s in 1..=2 {
            assert_abs_diff_eq!(inward.a(s) - out.a(s), 2.0 * 0.583, epsilon = 1e-14);
            assert_abs_diff_eq!(out.b(s) - inward.b(s), 2.0 * 0.583, epsilon = 1e-14);
        }
        let cfg = WaldConfig::new(0.05, 0.2, 2, 5.0).unwrap();
        assert!(matches!(sbh_wald_ladder_with(&cfg, Overshoot::Inward), Err(Error::Domain(_))));
        let r = rejective_wald_ladder_with(0.05, 2, 0.5, Overshoot::Inward).unwrap();
        assert_abs_diff_eq!(r.b(2), 20f64.ln() - 0.5, epsilon = 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(WaldConfig::new(0.6, 0.5, 2, 0.0).is_err());
        assert!(WaldConfig::new(0.05, 0.2, 0, 0.0).is_err());
        assert!(WaldConfig::new(0.05, 0.2, 2, -1.0).is_err());
        assert!(WaldConfig::new(0.5, 0.5, 2, 0.0).is_ok());
    }
}
