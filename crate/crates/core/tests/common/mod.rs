//! Reference implementations written directly from the defining rules,
//! deliberately naive so they can serve as oracles.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use seqbh::procedure::Verdict;

/// Active `(stream, value)` pairs ranked ascending, ties by stream index.
pub fn ranked(stats: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut r = stats.to_vec();
    r.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    r
}

/// Expected `(continue, accepted, rejected)` for one stage of the full procedure,
/// by scanning every `m` against the defining inequalities.
pub fn brute_sbh(
    k: usize,
    a: usize,
    r: usize,
    stats: &[(usize, f64)],
) -> (bool, Vec<usize>, Vec<usize>) {
    let ranked = ranked(stats);
    let size = ranked.len();
    let (kf, af, rf) = (k as f64, a as f64, r as f64);
    let inside = (1..=size).all(|l| {
        let v = ranked[l - 1].1;
        let lf = l as f64;
        v > -(kf - af - lf + 1.0) && v < af + lf
    });
    let mut m_acc = 0;
    let mut m_rej = 0;
    for m in 1..=size {
        let mf = m as f64;
        if ranked[m - 1].1 <= -(kf - af - mf + 1.0) {
            m_acc = m;
        }
        if ranked[size - m].1 >= kf - rf - mf + 1.0 {
            m_rej = m;
        }
    }
    let accepted = ranked[..m_acc].iter().map(|p| p.0).collect();
    let rejected = ranked[size - m_rej..].iter().map(|p| p.0).collect();
    (inside, accepted, rejected)
}

/// Expected rejections for one pre-truncation stage of the rejective procedure.
pub fn brute_rejective(stats: &[(usize, f64)]) -> Vec<usize> {
    let ranked = ranked(stats);
    let first = (1..=ranked.len()).find(|&l| ranked[l - 1].1 >= l as f64);
    match first {
        None => Vec::new(),
        Some(l) => ranked[l - 1..].iter().map(|p| p.0).collect(),
    }
}

/// A random bookkeeping state `(K, a, r, active)` and standardized statistics
/// that hit integer boundaries and ties often.
pub fn random_stage<R: Rng>(rng: &mut R, max_k: usize) -> (usize, usize, usize, Vec<(usize, f64)>) {
    let k = rng.random_range(1..=max_k);
    let undecided = rng.random_range(1..=k);
    let a = rng.random_range(0..=k - undecided);
    let r = k - undecided - a;
    let mut streams: Vec<usize> = (0..k).collect();
    streams.shuffle(rng);
    let bound = k as f64 + 1.5;
    let stats = streams[..undecided]
        .iter()
        .map(|&s| {
            let v = if rng.random_bool(0.5) {
                f64::from(rng.random_range(-2 * k as i32 - 2..=2 * k as i32 + 2)) / 2.0
            } else {
                rng.random_range(-bound..bound)
            };
            (s, v)
        })
        .collect();
    (k, a, r, stats)
}

/// A standalone SPRT: the first `n` with `Lambda_n <= A` (accept) or `>= B` (reject).
pub fn sprt(path: &[f64], a: f64, b: f64) -> Option<(Verdict, u64)> {
    path.iter().enumerate().find_map(|(i, &v)| {
        if v <= a {
            Some((Verdict::Accept, i as u64 + 1))
        } else if v >= b {
            Some((Verdict::Reject, i as u64 + 1))
        } else {
            None
        }
    })
}

/// The largest set `R` with every member's p-value at most `|R| alpha / K`,
/// found by enumerating all subsets.
pub fn bh_exhaustive(p: &[f64], alpha: f64) -> Vec<usize> {
    let k = p.len();
    let mut best: u32 = 0;
    for mask in 0u32..(1 << k) {
        let size = mask.count_ones() as usize;
        let valid = (0..k)
            .filter(|&i| mask & (1 << i) != 0)
            .all(|i| p[i] <= size as f64 * alpha / k as f64);
        if valid && size > best.count_ones() as usize {
            best = mask;
        }
    }
    (0..k).filter(|&i| best & (1 << i) != 0).collect()
}

/// Maximum of `f` on `(lo, hi)` by a coarse grid followed by a fine grid
/// around the best coarse cell.
pub fn grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const N: usize = 20_000;
    let scan = |lo: f64, hi: f64| {
        let h = (hi - lo) / N as f64;
        (0..N)
            .map(|i| {
                let t = lo + (i as f64 + 0.5) * h;
                (t, f(t))
            })
            .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
    };
    let h = (hi - lo) / N as f64;
    let (t, v) = scan(lo, hi);
    let (_, fine) = scan((t - 2.0 * h).max(lo), (t + 2.0 * h).min(hi));
    v.max(fine)
}

/// Binomial log-likelihood kernel `y log p + (t - y) log(1 - p)`, `0 log 0 = 0`.
pub fn binomial_loglik(y: f64, trials: f64, p: f64) -> f64 {
    let term = |c: f64, q: f64| if c == 0.0 { 0.0 } else { c * q.ln() };
    term(y, p) + term(trials - y, 1.0 - p)
}
