//! Putting statistics with different critical values on a common scale.
//!
//! Each stream's ladder is mapped so that `A_s -> -(K-s+1)` and `B_s -> K-s+1`,
//! after which raw statistics from unrelated tests can be ranked together.
//!
//! ```bash
//! cargo run --example standardizer
//! ```

use seqbh::procedure::build_full_standardizer;
use seqbh::statistics::{sbh_wald_ladder, WaldConfig};

fn main() -> seqbh::Result<()> {
    let k = 3;
    let tight = sbh_wald_ladder(&WaldConfig::new(0.05, 0.2, k, 0.0)?)?;
    let loose = sbh_wald_ladder(&WaldConfig::new(0.01, 0.05, k, 0.583)?)?;

    for (name, ladder) in [("alpha=.05", &tight), ("alpha=.01", &loose)] {
        let phi = build_full_standardizer(ladder, k)?;
        println!("{name}");
        for s in 1..=k {
            println!(
                "  A_{s} = {:>7.4} -> {:>5.2}   B_{s} = {:>6.4} -> {:>4.2}",
                ladder.a(s),
                phi.apply(ladder.a(s)),
                ladder.b(s),
                phi.apply(ladder.b(s))
            );
        }
    }

    let raw = 3.0;
    let a = build_full_standardizer(&tight, k)?.apply(raw);
    let b = build_full_standardizer(&loose, k)?.apply(raw);
    println!("raw statistic {raw}: standardized {a:.3} under the first ladder, {b:.3} under the second");
    Ok(())
}
