//! The fixed-sample baseline: exact one-sided p-values and the BH step-up rule.
//!
//! ```bash
//! cargo run --example fixed_sample_bh
//! ```

use seqbh::simulation::{delta_factor, fixed_sample_bh, fixed_sample_pvalue, PValueInput};

fn main() -> seqbh::Result<()> {
    let successes = [34, 22, 41, 25, 38];
    let p: Vec<f64> = successes
        .iter()
        .map(|&s| {
            fixed_sample_pvalue(PValueInput::Bernoulli {
                n: 60,
                successes: s,
                p0: 0.4,
            })
        })
        .collect::<seqbh::Result<_>>()?;
    let rejected = fixed_sample_bh(&p, 0.05)?;
    for (k, pk) in p.iter().enumerate() {
        let mark = if rejected.contains(&k) { "reject" } else { "" };
        println!("stream {k}: {:>2}/60 successes, p = {pk:.5} {mark}", successes[k]);
    }
    println!(
        "under arbitrary dependence the FDR bound inflates by {:.3}",
        delta_factor(p.len())
    );
    Ok(())
}
