//! Feeding observations as they arrive and reacting to decisions.
//!
//! ```bash
//! cargo run --example streaming_decisions
//! ```

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqbh::cli::{Event, RunConfig, RunEngine, StreamStatistic};
use seqbh::procedure::Schedule;
use seqbh::simulation::Variant;
use seqbh::statistics::Overshoot;

fn main() -> seqbh::Result<()> {
    let rates = [0.4, 0.6, 0.45, 0.65];
    let cfg = RunConfig {
        variant: Variant::Full,
        alpha: 0.05,
        beta: Some(0.2),
        rho: None,
        overshoot: Overshoot::Outward,
        truncation: None,
        schedule: Schedule::FullySequential,
        streams: vec![StreamStatistic::BernoulliLlr { p0: 0.4, p1: 0.6 }; rates.len()],
        ladders: None,
        rejective_ladders: None,
    };
    let mut engine = RunEngine::new(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    while !engine.is_terminal() {
        let step: BTreeMap<usize, Vec<f64>> = engine
            .active()
            .iter()
            .map(|&k| (k, vec![f64::from(u8::from(rng.random_bool(rates[k])))]))
            .collect();
        for event in engine.push(&step)? {
            if !matches!(event, Event::Sample { .. }) {
                println!("{event}");
            }
        }
    }
    Ok(())
}
