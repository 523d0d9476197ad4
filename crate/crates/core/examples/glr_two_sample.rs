//! Composite hypotheses: does a pair of read counts come from equal proportions?
//!
//! Each time step delivers `Y1 ~ Bin(m1, p1)` and `Y2 ~ Bin(m2, p2)`; the
//! signed-root GLR grows positive when `|p1 - p2| >= delta` looks more likely
//! than `p1 = p2`, and negative otherwise.
//!
//! ```bash
//! cargo run --example glr_two_sample
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use seqbh::statistics::{
    two_sample_binomial_glr, SequentialStatistic, TwoSampleBinomialSpec,
    TwoSampleBinomialStatistic,
};

fn main() -> seqbh::Result<()> {
    let spec = TwoSampleBinomialSpec::new(20, 20, 0.1)?;
    println!("log-GLR of 12 vs 4 reads out of 20: {:.4}", two_sample_binomial_glr(&spec, (12.0, 4.0), 1)?);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p1, p2) in [(0.5, 0.5), (0.6, 0.4)] {
        let mut stat = TwoSampleBinomialStatistic::new(spec)?;
        let d1 = Binomial::new(20, p1).unwrap();
        let d2 = Binomial::new(20, p2).unwrap();
        let path: Vec<f64> = (0..30)
            .map(|_| stat.observe(&[d1.sample(&mut rng) as f64, d2.sample(&mut rng) as f64]))
            .collect::<seqbh::Result<_>>()?;
        println!(
            "p = ({p1}, {p2}): statistic after 10, 20, 30 steps = {:.2}, {:.2}, {:.2}",
            path[9], path[19], path[29]
        );
    }
    Ok(())
}
