mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqbh::cli::SimulationConfig;
use seqbh::procedure::{
    build_full_standardizer, build_rejective_standardizer, run_procedure, CriticalLadder,
    Decision, ProcedureSpec, ProcedureState, RejectiveLadder, Schedule, StatisticPath,
};
use seqbh::simulation::{Experiment, ExperimentConfig};
use seqbh::statistics::{sbh_wald_ladder, ExpFamilyModel, WaldConfig};
use seqbh::Error;

/// Strictly ordered `A_1 < .. < A_K < B_K < .. < B_1` built from positive gaps.
fn ladder_strategy(max_k: usize) -> impl Strategy<Value = CriticalLadder> {
    (1..=max_k).prop_flat_map(|k| {
        (
            -5.0f64..0.0,
            prop::collection::vec(0.01f64..2.0, k - 1),
            0.01f64..3.0,
            prop::collection::vec(0.01f64..2.0, k - 1),
        )
            .prop_map(|(a1, lower_gaps, middle, upper_gaps)| {
                let mut lower = vec![a1];
                for g in lower_gaps {
                    lower.push(lower.last().unwrap() + g);
                }
                let mut upper_rev = vec![lower.last().unwrap() + middle];
                for g in upper_gaps {
                    upper_rev.push(upper_rev.last().unwrap() + g);
                }
                upper_rev.reverse();
                CriticalLadder::new(lower, upper_rev).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn standardizer_is_increasing_and_pinned(ladder in ladder_strategy(8), x in -20.0f64..20.0, dx in 1e-6f64..5.0) {
        let k = ladder.len();
        let phi = build_full_standardizer(&ladder, k).unwrap();
        prop_assert!(phi.apply(x) < phi.apply(x + dx));
        for s in 1..=k {
            let level = (k - s + 1) as f64;
            prop_assert!((phi.apply(ladder.a(s)) + level).abs() < 1e-12);
            prop_assert!((phi.apply(ladder.b(s)) - level).abs() < 1e-12);
        }
    }

    #[test]
    fn rejective_standardizer_is_increasing_and_pinned(ladder in ladder_strategy(8), x in -20.0f64..20.0, dx in 1e-6f64..5.0) {
        let k = ladder.len();
        let rej = RejectiveLadder::new(ladder.upper().to_vec()).unwrap();
        let phi = build_rejective_standardizer(&rej, k).unwrap();
        prop_assert!(phi.apply(x) < phi.apply(x + dx));
        for s in 1..=k {
            prop_assert!((phi.apply(rej.b(s)) - (k - s + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn step_matches_oracle_and_conserves(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, a, r, stats) = common::random_stage(&mut rng, 12);
        let active = stats.iter().map(|p| p.0).collect();
        let mut st = ProcedureState::from_parts(k, active, a, r, 1, 0).unwrap();
        let out = st.sbh_step(1, &stats).unwrap();
        let (_, acc, rej) = common::brute_sbh(k, a, r, &stats);
        prop_assert_eq!(&out.accepted, &acc);
        prop_assert_eq!(&out.rejected, &rej);
        prop_assert!(out.accepted.iter().all(|s| !out.rejected.contains(s)));
        prop_assert_eq!(st.accepted_count() + st.rejected_count() + st.active().len(), k);
    }

    #[test]
    fn gradient_inverts(p in 0.001f64..0.999, mu in -5.0f64..5.0) {
        let bern = ExpFamilyModel::Bernoulli;
        let theta = bern.inverse_gradient(&[p]).unwrap();
        prop_assert!((bern.gradient(&theta)[0] - p).abs() < 1e-8);
        let normal = ExpFamilyModel::UnitNormal { dim: 1 };
        let theta = normal.inverse_gradient(&[mu]).unwrap();
        prop_assert!((normal.gradient(&theta)[0] - mu).abs() < 1e-8);
    }
}

fn random_walks(rng: &mut ChaCha8Rng, k: usize, len: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            let drift = rng.random_range(-0.5..0.5);
            let mut x = 0.0;
            (0..len)
                .map(|_| {
                    x += drift + rng.random_range(-1.0..1.0);
                    x
                })
                .collect()
        })
        .collect()
}

fn run_paths(paths: &[Vec<f64>], ladders: &[CriticalLadder]) -> Vec<Decision> {
    let mut feed: Vec<StatisticPath> = paths.iter().cloned().map(StatisticPath::new).collect();
    let spec = ProcedureSpec::Full {
        ladders: ladders.to_vec(),
    };
    run_procedure(&mut feed, &spec, &Schedule::FullySequential).unwrap().decisions
}

fn key(d: &Decision) -> (u32, usize, bool, u64) {
    (d.stage, d.stream, d.verdict == seqbh::procedure::Verdict::Reject, d.sample_size)
}

#[test]
fn relabelling_streams_relabels_decisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let k = rng.random_range(2..=8);
        let paths = random_walks(&mut rng, k, 5_000);
        let ladders: Vec<CriticalLadder> = (0..k)
            .map(|_| {
                let rho = rng.random_range(0.0..1.0);
                sbh_wald_ladder(&WaldConfig::new(0.05, 0.2, k, rho).unwrap()).unwrap()
            })
            .collect();
        let mut perm: Vec<usize> = (0..k).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let mut permuted_paths = vec![Vec::new(); k];
        let mut permuted_ladders = ladders.clone();
        for (i, &p) in perm.iter().enumerate() {
            permuted_paths[p] = paths[i].clone();
            permuted_ladders[p] = ladders[i].clone();
        }
        let mut expected: Vec<_> = run_paths(&paths, &ladders)
            .iter()
            .map(|d| {
                let mut d = *d;
                d.stream = perm[d.stream];
                key(&d)
            })
            .collect();
        let mut got: Vec<_> = run_paths(&permuted_paths, &permuted_ladders).iter().map(key).collect();
        expected.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expected);
    }
}

#[test]
fn runs_decide_every_stream_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let k = rng.random_range(1..=10);
        let paths = random_walks(&mut rng, k, 5_000);
        let ladder = sbh_wald_ladder(&WaldConfig::new(0.05, 0.2, k, 0.0).unwrap()).unwrap();
        let decisions = run_paths(&paths, &vec![ladder; k]);
        let mut streams: Vec<usize> = decisions.iter().map(|d| d.stream).collect();
        streams.sort_unstable();
        assert_eq!(streams, (0..k).collect::<Vec<_>>());
        assert!(decisions.windows(2).all(|w| w[0].stage <= w[1].stage && w[0].sample_size <= w[1].sample_size));
    }
}

fn base_scenario() -> ExperimentConfig {
    let text = include_str!("../configs/table1.json");
    SimulationConfig::parse("table1.json", text).unwrap().scenarios[1].clone()
}

#[test]
fn identical_seeds_give_identical_reports() {
    let mut cfg = base_scenario();
    cfg.replications = 500;
    let a = Experiment::new(&cfg).unwrap().run(Some(1)).unwrap();
    let b = Experiment::new(&cfg).unwrap().run(Some(2)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    cfg.seed += 1;
    let c = Experiment::new(&cfg).unwrap().run(Some(1)).unwrap();
    assert_ne!(a, c);
}

/// One invalid edit to a valid scenario and the field its diagnostic must name.
#[derive(Debug, Clone)]
enum Mutation {
    Alpha(f64),
    Beta(f64),
    Replications,
    Rho(f64),
    P(usize, f64),
    Truncation,
    Fbh,
    Cap,
    Schedule,
}

fn mutation_strategy() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        prop_oneof![Just(0.0), Just(1.0), 1.0f64..5.0, -5.0f64..0.0].prop_map(Mutation::Alpha),
        prop_oneof![Just(0.0), Just(1.0), 1.0f64..5.0, -5.0f64..0.0].prop_map(Mutation::Beta),
        Just(Mutation::Replications),
        (-5.0f64..-1e-6).prop_map(Mutation::Rho),
        (0usize..5, prop_oneof![-1.0f64..-1e-9, 1.000001f64..3.0]).prop_map(|(i, p)| Mutation::P(i, p)),
        Just(Mutation::Truncation),
        Just(Mutation::Fbh),
        Just(Mutation::Cap),
        Just(Mutation::Schedule),
    ]
}

fn apply(m: &Mutation) -> (serde_json::Value, String) {
    let mut v = serde_json::to_value(base_scenario()).unwrap();
    let path = match m {
        Mutation::Alpha(a) => {
            v["alpha"] = (*a).into();
            "alpha".to_string()
        }
        Mutation::Beta(b) => {
            v["beta"] = (*b).into();
            "beta".to_string()
        }
        Mutation::Replications => {
            v["replications"] = 0.into();
            "replications".to_string()
        }
        Mutation::Rho(r) => {
            v["rho"] = (*r).into();
            "rho".to_string()
        }
        Mutation::P(i, p) => {
            v["model"]["p"][*i] = (*p).into();
            format!("model.p[{i}]")
        }
        Mutation::Truncation => {
            v["truncation"] = 10.into();
            "truncation".to_string()
        }
        Mutation::Fbh => {
            v["fbh_total_n"] = 3.into();
            "fbh_total_n".to_string()
        }
        Mutation::Cap => {
            v["cap"] = 0.into();
            "cap".to_string()
        }
        Mutation::Schedule => {
            v["schedule"] = serde_json::json!({"kind": "explicit", "points": [3, 2]});
            "schedule".to_string()
        }
    };
    (serde_json::json!({ "scenarios": [base_scenario(), v] }), format!("scenarios[1].{path}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mutated_configs_name_the_field(m in mutation_strategy()) {
        let (doc, expected) = apply(&m);
        match SimulationConfig::parse("mutated.json", &doc.to_string()) {
            Err(Error::Config { path, .. }) => prop_assert_eq!(path, expected),
            other => prop_assert!(false, "{:?} accepted or misreported: {:?}", m, other),
        }
    }
}
