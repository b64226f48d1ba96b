use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qneat::analysis::{calls_vs_energy, success_histogram};
use qneat::evolution::{mutate, run_evolution, EvolutionConfig, MutationConfig};
use qneat::hamiltonian::{BenchmarkKind, HamiltonianSpec};
use qneat::quantum::{Circuit, EvalMode};
use qneat::runlog::RunLog;

fn small_run(kind: BenchmarkKind, n: usize, seed: u64, generations: usize) -> RunLog {
    let mut cfg = EvolutionConfig::new(HamiltonianSpec::new(kind, n), seed);
    cfg.max_generations = generations;
    run_evolution(&cfg, &cfg.evaluator().unwrap()).unwrap()
}

#[test]
fn action_count_is_geometric() {
    const N: usize = 100_000;
    let cfg = MutationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let parent = Circuit::empty(3).unwrap();
    let mut counts = [0usize; 4];
    let mut total_actions = 0usize;
    for _ in 0..N {
        let (_, outcome) = mutate(&parent, &cfg, &mut rng);
        let k = outcome.actions().len();
        total_actions += k;
        counts[(k - 1).min(3)] += 1;
    }
    for k in 1..=3 {
        let p = 0.9 * 0.1f64.powi(k as i32 - 1);
        let sigma = (p * (1.0 - p) / N as f64).sqrt();
        let freq = counts[k - 1] as f64 / N as f64;
        assert!((freq - p).abs() <= 3.0 * sigma, "k={k}: {freq} vs {p}");
    }
    let mean = total_actions as f64 / N as f64;
    assert!((mean - 10.0 / 9.0).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_elitist_and_conserve_tallies(seed in any::<u64>(), tfi in any::<bool>()) {
        let kind = if tfi { BenchmarkKind::Tfi } else { BenchmarkKind::LocalX };
        let log = small_run(kind, 4, seed, 30);
        let parents = log.parent_energies();
        prop_assert!(parents.windows(2).all(|w| w[1] <= w[0]));
        for r in &log.records {
            prop_assert!(!r.accepted || r.best_offspring_energy < r.parent_energy);
            prop_assert_eq!(r.offspring.len(), 4);
        }
        let tallies: u64 = log.success_tallies.iter().map(|t| t.count).sum();
        prop_assert_eq!(tallies as usize, log.accepted_generations());
        let hist: u64 = success_histogram([&log]).iter().map(|r| r.count).sum();
        prop_assert_eq!(hist as usize, log.accepted_generations());
        let curve = calls_vs_energy(&log);
        prop_assert_eq!(curve.last().unwrap().0, 4 * 30 + 1);
        prop_assert!(curve.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 <= w[0].1));
    }
}

#[test]
fn identical_seeds_give_identical_logs() {
    let a = small_run(BenchmarkKind::Tfi, 5, 7, 25)
        .to_jsonl_string()
        .unwrap();
    let b = small_run(BenchmarkKind::Tfi, 5, 7, 25)
        .to_jsonl_string()
        .unwrap();
    assert_eq!(a, b);
    let c = small_run(BenchmarkKind::Tfi, 5, 8, 25)
        .to_jsonl_string()
        .unwrap();
    assert_ne!(a, c);
}

#[test]
fn sampled_runs_are_reproducible_and_logs_round_trip() {
    let mut cfg = EvolutionConfig::new(HamiltonianSpec::new(BenchmarkKind::Tfi, 4), 3);
    cfg.max_generations = 10;
    cfg.mode = EvalMode::Sampled {
        shots: 256,
        noise: 0.02,
    };
    let eval = cfg.evaluator().unwrap();
    let a = run_evolution(&cfg, &eval).unwrap();
    let b = run_evolution(&cfg, &eval).unwrap();
    assert_eq!(a, b);
    // two measurement groups per TFI evaluation
    assert_eq!(a.records.last().unwrap().cumulative_calls, 2 + 10 * 4 * 2);
    let text = a.to_jsonl_string().unwrap();
    assert_eq!(RunLog::read_jsonl(text.as_bytes()).unwrap(), a);
}
