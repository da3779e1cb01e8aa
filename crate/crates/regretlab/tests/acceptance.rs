//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use regretlab::montecarlo::monte_carlo_regret_parallel;
use regretlab::report::{leader_set_preset, tie_exploiter_preset};
use regretlab_core::adversaries::{Adversary, AdversarySpec};
use regretlab_core::bounds::{
    asymmetric_horizon_ok, asymmetric_regret_bound, leader_set_reference, oblivious_regret_bound,
    q_alpha,
};
use regretlab_core::harness::{run_episode_observed, ExperimentConfig};
use regretlab_core::learners::{
    perturbed_leader_sets, sfp_action_distribution, single_stream_action_distribution,
    single_stream_scores, LearnerConfig, LearnerKind,
};
use regretlab_core::smallball::{
    corollary_bound, erdos_bound, exact_expected_regret, exact_small_ball, regret2switches_rhs,
    SignedSumInstance,
};
use regretlab_core::{EpisodeRng, PayoffVector, Sign};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn threads() -> usize {
    regretlab::montecarlo::thread_count_from_env().expect("REGRETLAB_THREADS parses")
}

fn experiment(
    kind: LearnerKind,
    alpha: f64,
    adversary: AdversarySpec,
    reps: u32,
) -> ExperimentConfig {
    ExperimentConfig {
        learner: LearnerConfig::new(kind, alpha, adversary.n).unwrap(),
        horizon: adversary.horizon,
        adversary,
        replications: reps,
        master_seed: SEED,
    }
}

fn dyadic_rows(rng: &mut EpisodeRng, n: usize, t: usize, denom: i32) -> Vec<PayoffVector> {
    (0..t)
        .map(|_| {
            let row = (0..n)
                .map(|_| f64::from(rng.random_range(-denom..=denom)) / f64::from(denom))
                .collect();
            PayoffVector::new(row).unwrap()
        })
        .collect()
}

fn tie_exploiter_linear_regret() -> Outcome {
    let cfg = tie_exploiter_preset(200, 1000, SEED).unwrap().config;
    let s = monte_carlo_regret_parallel(&cfg, threads()).unwrap();
    outcome(
        s.mean_regret >= 40.0,
        format!(
            "mean regret {:.3} (se {:.3}) >= 40; reference 0.225T - 2 = 43",
            s.mean_regret, s.std_error
        ),
    )
}

fn leader_set_linear_in_n() -> Outcome {
    let reference = leader_set_reference(32);
    let cfg = leader_set_preset(32, Some(64), 2000, SEED).unwrap().config;
    let s = monte_carlo_regret_parallel(&cfg, threads()).unwrap();
    outcome(
        s.mean_regret >= 10.0,
        format!(
            "mean regret {:.3} (se {:.3}) >= 10; reference N/2 - H_N = {reference:.3}",
            s.mean_regret, s.std_error
        ),
    )
}

fn sublinear_regret_direction() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut last = f64::INFINITY;
    for t in [256usize, 1024, 4096] {
        let cfg = experiment(
            LearnerKind::SfpFresh,
            0.5,
            AdversarySpec::iid_uniform(4, t),
            200,
        );
        let s = monte_carlo_regret_parallel(&cfg, threads()).unwrap();
        let avg = s.mean_regret / t as f64;
        let bound = oblivious_regret_bound(4, t as u64).unwrap();
        pass &= avg < last && s.mean_regret <= bound;
        last = avg;
        parts.push(format!(
            "T={t}: R/T {avg:.5}, R {:.2} <= {bound:.0}",
            s.mean_regret
        ));
    }
    outcome(pass, parts.join("; "))
}

fn regret_to_switching() -> Outcome {
    let mut rng = EpisodeRng::seed_from_u64(SEED ^ 4);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for _ in 0..100 {
        let t = rng.random_range(1..=12);
        let rows = dyadic_rows(&mut rng, 2, t, 8);
        for alpha in [0.25, 0.5, 0.75] {
            let gap = exact_expected_regret(&rows, alpha).unwrap()
                - regret2switches_rhs(&rows, alpha).unwrap();
            worst = worst.max(gap);
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{checked} instances, max(lhs - rhs) = {worst:.4}"),
    )
}

fn small_ball_sandwich() -> Outcome {
    let mut rng = EpisodeRng::seed_from_u64(SEED ^ 5);
    let mut violations = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=14);
        let weights = (0..n)
            .map(|_| {
                let m: f64 = rng.random_range(1.0..4.0);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        let radius = rng.random_range(0.0..4.0);
        let inst = SignedSumInstance::new(weights, rng.random_range(-10.0..10.0), radius).unwrap();
        let p = exact_small_ball(&inst).unwrap();
        let (e, c) = (erdos_bound(n, radius), corollary_bound(n, radius));
        if p > e + 1e-12 || e > c + 1e-12 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("500 instances, {violations} violations"),
    )
}

/// Largest binomial pmf, scanning every k with the ratio recurrence in log space.
fn max_binomial_pmf(t: u64, alpha: f64) -> f64 {
    let mut ln_p = t as f64 * (1.0 - alpha).ln();
    let mut best = ln_p;
    for k in 0..t {
        ln_p += (alpha * (t - k) as f64 / ((1.0 - alpha) * (k + 1) as f64)).ln();
        best = best.max(ln_p);
    }
    best.exp()
}

fn binomial_pmf_bound() -> Outcome {
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    for tenth in 1..=9 {
        let alpha = f64::from(tenth) / 10.0;
        let q = q_alpha(alpha).unwrap();
        for t in (1..=2000u64).filter(|&t| asymmetric_horizon_ok(t, alpha)) {
            worst = worst.max(max_binomial_pmf(t, alpha) - q / (t as f64).sqrt());
            checked += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{checked} (t, alpha) pairs, max(pmf - bound) = {worst:.4}"),
    )
}

fn asymmetric_ceiling() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        let cfg = experiment(
            LearnerKind::SfpFresh,
            alpha,
            AdversarySpec::iid_ternary(3, 400),
            500,
        );
        let s = monte_carlo_regret_parallel(&cfg, threads()).unwrap();
        let bound = asymmetric_regret_bound(3, 400, alpha).unwrap();
        pass &= s.mean_regret <= bound;
        parts.push(format!("alpha {alpha}: {:.2} <= {bound:.0}", s.mean_regret));
    }
    outcome(pass, parts.join("; "))
}

fn variant_equivalence() -> Outcome {
    let mut rng = EpisodeRng::seed_from_u64(SEED ^ 8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=4);
        let len = rng.random_range(0..=8);
        let rows = dyadic_rows(&mut rng, n, len, 4);
        let alpha = rng.random_range(0.05..0.95);
        let a = sfp_action_distribution(&rows, alpha, n).unwrap();
        let b = single_stream_action_distribution(&rows, alpha, n).unwrap();
        worst = worst.max(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0);
    }
    outcome(worst <= 1e-12, format!("50 prefixes, max TV {worst:.3e}"))
}

fn be_the_leader() -> Outcome {
    let mut rng = EpisodeRng::seed_from_u64(SEED ^ 9);
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(1..=50);
        let rows = dyadic_rows(&mut rng, n, len, 16);
        let eps: Vec<Sign> = (0..len)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            })
            .collect();
        let leaders = perturbed_leader_sets(&rows, &eps, n).unwrap();
        let mut hindsight = 0.0;
        for (t, (g, e)) in rows.iter().zip(&eps).enumerate() {
            let set = &leaders[t + 1];
            hindsight += e.weight() * g.get(set[rng.random_range(0..set.len())]);
        }
        let best = single_stream_scores(&rows, &eps, n)
            .unwrap()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        if hindsight < best {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("1000 triples, {violations} violations"),
    )
}

fn simulate_is_deterministic() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.toml");
    std::fs::write(
        &config,
        "horizon = 128\nreplications = 300\nseed = 11\n\n[learner]\nkind = \"sfp-fresh\"\nalpha = 0.5\n\n\
         [adversary]\nkind = \"iid-uniform\"\nn = 3\n",
    )
    .unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_regretlab"))
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("REGRETLAB_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        (
            std::fs::read(out.join("trace.csv")).unwrap(),
            std::fs::read(out.join("summary.toml")).unwrap(),
        )
    };
    let first = run("a", "0");
    let same = first == run("b", "0") && first == run("c", "1") && first == run("d", "3");
    outcome(
        same,
        format!(
            "4 runs ({} trace bytes) byte-identical: {same}",
            first.0.len()
        ),
    )
}

fn empty_sample_law() -> Outcome {
    const DRAWS: u32 = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.25, 0.5] {
        let cfg = ExperimentConfig {
            master_seed: SEED ^ 11,
            ..experiment(
                LearnerKind::SfpFresh,
                alpha,
                AdversarySpec::iid_uniform(2, 9),
                DRAWS,
            )
        };
        let adversary = Adversary::new(cfg.adversary.clone()).unwrap();
        let mut empty = [0u32; 10];
        for rep in 0..u64::from(DRAWS) {
            run_episode_observed(&cfg, &adversary, rep, |t, learner| {
                if learner.last_sample_size() == Some(0) {
                    empty[t] += 1;
                }
            })
            .unwrap();
        }
        for t in [2usize, 5, 9] {
            let p = (1.0 - alpha).powi(t as i32 - 1);
            let se = (p * (1.0 - p) / f64::from(DRAWS)).sqrt();
            let z = (f64::from(empty[t]) / f64::from(DRAWS) - p) / se;
            pass &= z.abs() <= 3.0;
            parts.push(format!("a={alpha},t={t}: z={z:+.2}"));
        }
    }
    outcome(pass, parts.join(" "))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "tie exploiter forces linear regret",
            Duration::from_secs(10),
            tie_exploiter_linear_regret,
        ),
        (
            "leader set forces regret linear in N",
            Duration::from_secs(30),
            leader_set_linear_in_n,
        ),
        (
            "average regret falls against iid payoffs",
            Duration::from_secs(120),
            sublinear_regret_direction,
        ),
        (
            "expected regret below switching bound",
            Duration::from_secs(60),
            regret_to_switching,
        ),
        (
            "small-ball sandwich",
            Duration::from_secs(30),
            small_ball_sandwich,
        ),
        (
            "binomial pmf maximum bound",
            Duration::from_secs(30),
            binomial_pmf_bound,
        ),
        (
            "asymmetric-rate regret ceiling",
            Duration::from_secs(60),
            asymmetric_ceiling,
        ),
        (
            "fresh and single-stream distributions agree",
            Duration::from_secs(60),
            variant_equivalence,
        ),
        ("be-the-leader", Duration::from_secs(5), be_the_leader),
        (
            "simulate is byte-for-byte deterministic",
            Duration::from_secs(60),
            simulate_is_deterministic,
        ),
        (
            "empty-sample law",
            Duration::from_secs(60),
            empty_sample_law,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s, limit {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
