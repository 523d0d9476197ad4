//! Monte Carlo critical values when no closed form is available, here for a
//! signed-root GLR statistic.
//!
//! ```bash
//! cargo run --release --example calibration
//! ```

use rand::Rng;
use seqbh::statistics::{
    calibrate_rejective_ladder, rejective_wald_ladder, simulate_statistic_path, Calibration,
    ExpFamilyModel, Functional, GlrSpec, GlrStatistic,
};

fn main() -> seqbh::Result<()> {
    let k = 4;
    let spec = GlrSpec::new(ExpFamilyModel::Bernoulli, Functional::Mean, 0.4, 0.6)?;
    let cal = Calibration {
        reps: 4_000,
        horizon: 200,
        seed: 17,
    };
    let ladder = calibrate_rejective_ladder(0.05, k, &cal, |rng, len| {
        let stat = GlrStatistic::new(spec.clone());
        simulate_statistic_path(stat, || vec![f64::from(u8::from(rng.random_bool(0.4)))], len)
    })?;
    let ville = rejective_wald_ladder(0.05, k, 0.0)?;
    for s in 1..=k {
        println!(
            "s = {s}: calibrated B_s = {:.3}, maximal-inequality B_s = {:.3}",
            ladder.b(s),
            ville.b(s)
        );
    }
    Ok(())
}
