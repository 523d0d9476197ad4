//! Closed-form critical values for a battery of K simple-vs-simple tests.
//!
//! ```bash
//! cargo run --example wald_ladder
//! ```

use seqbh::statistics::{sbh_wald_ladder_with, sbh_wald_rows, Overshoot, WaldConfig};

fn main() -> seqbh::Result<()> {
    let cfg = WaldConfig::new(0.05, 0.2, 5, 0.0)?;
    println!("{:>2} {:>10} {:>10} {:>10} {:>10}", "s", "A_s", "B_s", "alpha_s", "beta_s");
    for row in sbh_wald_rows(&cfg)? {
        println!(
            "{:>2} {:>10.5} {:>10.5} {:>10.6} {:>10.6}",
            row.s, row.a, row.b, row.alpha_s, row.beta_s
        );
    }

    // The overshoot correction moves every boundary by rho, away from zero or towards it.
    let rho = WaldConfig::new(0.05, 0.2, 5, 0.583)?;
    for overshoot in [Overshoot::Outward, Overshoot::Inward] {
        let ladder = sbh_wald_ladder_with(&rho, overshoot)?;
        println!("{overshoot:?}: A_1 = {:.4}, B_1 = {:.4}", ladder.a(1), ladder.b(1));
    }
    Ok(())
}
