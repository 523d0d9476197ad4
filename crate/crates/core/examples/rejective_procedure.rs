//! The variant that only stops early to reject, accepting whatever survives
//! to the truncation point.
//!
//! ```bash
//! cargo run --example rejective_procedure
//! ```

use seqbh::procedure::{run_procedure, ProcedureSpec, Schedule, StatisticPath};
use seqbh::statistics::rejective_wald_ladder;

fn main() -> seqbh::Result<()> {
    let k = 4;
    let ladder = rejective_wald_ladder(0.05, k, 0.0)?;
    println!("B_s = {:.3?}", ladder.upper());

    // Deterministic log-likelihood paths with different drifts.
    let drifts = [0.6, 0.25, 0.0, -0.2];
    let mut feed: Vec<StatisticPath> = drifts
        .iter()
        .map(|d| StatisticPath::new((1..=40).map(|n| d * n as f64).collect()))
        .collect();
    let spec = ProcedureSpec::Rejective {
        ladders: vec![ladder; k],
        truncation: 40,
    };
    let out = run_procedure(&mut feed, &spec, &Schedule::Group { size: 5, groups: None })?;
    for d in &out.decisions {
        println!("stream {} {} at n = {} (stage {})", d.stream, d.verdict, d.sample_size, d.stage);
    }
    println!("total observations: {}", out.total_n);
    Ok(())
}
