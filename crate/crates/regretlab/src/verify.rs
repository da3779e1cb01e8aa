//! Named randomized checks of the learner and anti-concentration
//! invariants, run by `regretlab verify`.
//!
//! Every check draws its instances from a generator seeded by the master
//! seed and the check's position in [`PROPERTIES`], so a failure is
//! reproducible from the report alone.

use rand::{Rng, SeedableRng};
use regretlab_core::bounds::{asymmetric_horizon_ok, c_lo};
use regretlab_core::harness::{derive_seed, StreamLabel};
use regretlab_core::learners::{
    argmax_set, fp_scores, perturbed_leader_sets, sfp_action_distribution, sfp_sample_subset,
    single_stream_action_distribution, single_stream_scores,
};
use regretlab_core::smallball::{
    binomial_pmf_max, binomial_pmf_max_bound, corollary_bound, erdos_bound, exact_expected_regret,
    exact_small_ball, exact_switch_probability, regret2switches_rhs, switch_probabilities,
    switching_sum, SignedSumInstance,
};
use regretlab_core::{EpisodeRng, PayoffVector, Sign};
use serde::Serialize;

/// A violated instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub detail: String,
}

type Check = fn(&mut EpisodeRng) -> Result<usize, Failure>;

pub struct Property {
    pub name: &'static str,
    pub summary: &'static str,
    check: Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub cases: usize,
    pub failure: Option<Failure>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub const PROPERTIES: &[Property] = &[
    Property {
        name: "small-ball-sandwich",
        summary: "exact small-ball probability <= Erdos bound <= corollary bound",
        check: small_ball_sandwich,
    },
    Property {
        name: "small-ball-closed",
        summary: "balls are closed intervals",
        check: small_ball_closed,
    },
    Property {
        name: "binomial-pmf-max",
        summary: "max binomial pmf <= Q_alpha / sqrt(t) for every valid t <= 2000",
        check: binomial_pmf_max_sweep,
    },
    Property {
        name: "regret-to-switching",
        summary: "exact expected regret <= regret-to-switching right-hand side",
        check: regret_to_switching,
    },
    Property {
        name: "switching-ceiling",
        summary: "sum |d_t| P(switch at t) <= 20 C_LO sqrt(T log2(4 log2 T)) at alpha = 1/2",
        check: switching_ceiling,
    },
    Property {
        name: "switch-scale-invariance",
        summary: "switch probabilities are unchanged by positive scaling",
        check: switch_scale_invariance,
    },
    Property {
        name: "switch-routes-agree",
        summary: "tree walk and per-round enumeration give the same switch probabilities",
        check: switch_routes_agree,
    },
    Property {
        name: "variant-equivalence",
        summary: "fresh and single-stream action distributions agree (TV <= 1e-12)",
        check: variant_equivalence,
    },
    Property {
        name: "distribution-normalized",
        summary: "exact action distributions are probability vectors",
        check: distribution_normalized,
    },
    Property {
        name: "perturbed-leader-identity",
        summary: "argmax of sum (1 + eps) g equals argmax of G + sum eps g",
        check: perturbed_leader_identity,
    },
    Property {
        name: "all-plus-is-fp",
        summary: "an all-plus sign stream reproduces fictitious play",
        check: all_plus_is_fp,
    },
    Property {
        name: "be-the-leader",
        summary: "the hindsight leader sequence beats every fixed strategy on perturbed payoffs",
        check: be_the_leader,
    },
    Property {
        name: "empty-sample-law",
        summary: "empirical P(empty sample at round t) within 3 SE of (1 - alpha)^(t-1)",
        check: empty_sample_law,
    },
];

/// Runs every property whose name contains `filter`.
pub fn run(filter: Option<&str>, seed: u64) -> Vec<PropertyReport> {
    PROPERTIES
        .iter()
        .enumerate()
        .filter(|(_, p)| filter.is_none_or(|f| p.name.contains(f)))
        .map(|(i, p)| {
            let mut rng =
                EpisodeRng::seed_from_u64(derive_seed(seed, i as u64, StreamLabel::Sampling));
            match (p.check)(&mut rng) {
                Ok(cases) => PropertyReport {
                    name: p.name,
                    cases,
                    failure: None,
                },
                Err(f) => PropertyReport {
                    name: p.name,
                    cases: 0,
                    failure: Some(f),
                },
            }
        })
        .collect()
}

/// One `PASS`/`FAIL` line per property, then each counterexample as TOML.
pub fn format_report(reports: &[PropertyReport], seed: u64) -> String {
    #[derive(Serialize)]
    struct Entry<'a> {
        property: &'a str,
        instance: &'a str,
        detail: &'a str,
    }
    #[derive(Serialize)]
    struct Counterexamples<'a> {
        #[serde(with = "crate::io::seed_repr")]
        seed: u64,
        counterexample: Vec<Entry<'a>>,
    }
    let mut out = String::new();
    for r in reports {
        match &r.failure {
            None => out.push_str(&format!("PASS {} ({} cases)\n", r.name, r.cases)),
            Some(_) => out.push_str(&format!("FAIL {}\n", r.name)),
        }
    }
    let failures: Vec<Entry> = reports
        .iter()
        .filter_map(|r| {
            r.failure.as_ref().map(|f| Entry {
                property: r.name,
                instance: &f.instance,
                detail: &f.detail,
            })
        })
        .collect();
    if !failures.is_empty() {
        out.push('\n');
        out.push_str(
            &toml::to_string(&Counterexamples {
                seed,
                counterexample: failures,
            })
            .expect("report serializes"),
        );
    }
    out
}

fn fail(instance: impl std::fmt::Debug, detail: String) -> Failure {
    Failure {
        instance: format!("{instance:?}"),
        detail,
    }
}

fn dyadic(rng: &mut EpisodeRng, denom: i32) -> f64 {
    f64::from(rng.random_range(-denom..=denom)) / f64::from(denom)
}

fn payoff_rows(rng: &mut EpisodeRng, n: usize, t: usize, denom: i32) -> Vec<PayoffVector> {
    (0..t)
        .map(|_| {
            PayoffVector::new((0..n).map(|_| dyadic(rng, denom)).collect())
                .expect("dyadic payoffs are in range")
        })
        .collect()
}

fn signs(rng: &mut EpisodeRng, len: usize) -> Vec<Sign> {
    (0..len)
        .map(|_| {
            if rng.random_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect()
}

fn small_ball_sandwich(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 500;
    for _ in 0..CASES {
        let n = rng.random_range(1..=14);
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                let m = rng.random_range(1.0..4.0);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        let center = rng.random_range(-10.0..10.0);
        let radius = rng.random_range(0.0..4.0);
        let inst = SignedSumInstance::new(weights, center, radius).expect("valid instance");
        let p = exact_small_ball(&inst).expect("within guard");
        let (e, c) = (erdos_bound(n, radius), corollary_bound(n, radius));
        if p > e + 1e-12 || e > c + 1e-12 {
            return Err(fail(&inst, format!("exact {p}, erdos {e}, corollary {c}")));
        }
    }
    Ok(CASES)
}

fn small_ball_closed(_: &mut EpisodeRng) -> Result<usize, Failure> {
    let cases = [
        (2.0, 0.0, 0.25),
        (2.0, 0.5, 0.25),
        (2.5, 0.5, 0.25),
        (2.5, 0.5 - 1e-9, 0.0),
    ];
    for (center, radius, want) in cases {
        let inst = SignedSumInstance::new(vec![1.0, 1.0], center, radius).expect("valid instance");
        let got = exact_small_ball(&inst).expect("within guard");
        if got != want {
            return Err(fail(&inst, format!("probability {got}, expected {want}")));
        }
    }
    Ok(cases.len())
}

fn binomial_pmf_max_sweep(_: &mut EpisodeRng) -> Result<usize, Failure> {
    let mut cases = 0;
    for tenth in 1..=9 {
        let alpha = f64::from(tenth) / 10.0;
        for t in (1..=2000u64).filter(|&t| asymmetric_horizon_ok(t, alpha)) {
            let exact = binomial_pmf_max(t, alpha).expect("valid alpha");
            let bound = binomial_pmf_max_bound(t, alpha).expect("valid t");
            if exact > bound + 1e-12 {
                return Err(fail((t, alpha), format!("max pmf {exact} > bound {bound}")));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

fn regret_to_switching(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 100;
    for i in 0..CASES {
        let t = rng.random_range(1..=12);
        let rows = payoff_rows(rng, 2, t, 8);
        let alpha = [0.25, 0.5, 0.75][i % 3];
        let lhs = exact_expected_regret(&rows, alpha).expect("within guard");
        let rhs = regret2switches_rhs(&rows, alpha).expect("within guard");
        if lhs > rhs + 1e-9 {
            return Err(fail(
                (&rows, alpha),
                format!("expected regret {lhs} > rhs {rhs}"),
            ));
        }
    }
    Ok(CASES)
}

fn diff_sequence(rng: &mut EpisodeRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| 2.0 * dyadic(rng, 8)).collect()
}

fn switching_ceiling(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 100;
    for _ in 0..CASES {
        let len = rng.random_range(4..=12);
        let diffs = diff_sequence(rng, len);
        let t = diffs.len() as f64;
        let ceiling = 20.0 * c_lo() * (t * (4.0 * t.log2()).log2()).sqrt();
        let sum = switching_sum(&diffs, 0.5).expect("within guard");
        if sum > ceiling {
            return Err(fail(&diffs, format!("switching sum {sum} > {ceiling}")));
        }
    }
    Ok(CASES)
}

fn switch_scale_invariance(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 100;
    for _ in 0..CASES {
        let len = rng.random_range(1..=10);
        let diffs = diff_sequence(rng, len);
        let scaled: Vec<f64> = diffs.iter().map(|d| 2.0 * d).collect();
        let alpha = rng.random_range(0.05..0.95);
        for t in 1..=diffs.len() {
            let a = exact_switch_probability(&diffs, t, alpha).expect("within guard");
            let b = exact_switch_probability(&scaled, t, alpha).expect("within guard");
            if a != b {
                return Err(fail(
                    (&diffs, t, alpha),
                    format!("{a} before scaling, {b} after"),
                ));
            }
        }
    }
    Ok(CASES)
}

fn switch_routes_agree(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 100;
    for _ in 0..CASES {
        let len = rng.random_range(1..=10);
        let diffs = diff_sequence(rng, len);
        let alpha = rng.random_range(0.05..0.95);
        let all = switch_probabilities(&diffs, alpha).expect("within guard");
        for t in 1..=diffs.len() {
            let one = exact_switch_probability(&diffs, t, alpha).expect("within guard");
            if (all[t - 1] - one).abs() > 1e-12 {
                return Err(fail(
                    (&diffs, t, alpha),
                    format!("tree {} vs counter {one}", all[t - 1]),
                ));
            }
        }
    }
    Ok(CASES)
}

fn variant_equivalence(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 50;
    for _ in 0..CASES {
        let n = rng.random_range(2..=4);
        let len = rng.random_range(0..=8);
        let rows = payoff_rows(rng, n, len, 4);
        let alpha = rng.random_range(0.05..0.95);
        let a = sfp_action_distribution(&rows, alpha, n).expect("within guard");
        let b = single_stream_action_distribution(&rows, alpha, n).expect("within guard");
        let tv = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        if tv > 1e-12 {
            return Err(fail((&rows, alpha), format!("total variation {tv}")));
        }
    }
    Ok(CASES)
}

fn distribution_normalized(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 100;
    for _ in 0..CASES {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(0..=10);
        let rows = payoff_rows(rng, n, len, 4);
        let alpha = rng.random_range(0.05..0.95);
        let d = sfp_action_distribution(&rows, alpha, n).expect("within guard");
        let total: f64 = d.iter().sum();
        if d.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(fail((&rows, alpha), format!("distribution {d:?}")));
        }
    }
    Ok(CASES)
}

fn perturbed_leader_identity(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 200;
    for _ in 0..CASES {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(0..=30);
        let rows = payoff_rows(rng, n, len, 16);
        let eps = signs(rng, rows.len());
        let weighted = single_stream_scores(&rows, &eps, n).expect("stream covers history");
        let mut shifted = fp_scores(&rows, n);
        for (g, e) in rows.iter().zip(&eps) {
            for (acc, &x) in shifted.iter_mut().zip(g.as_slice()) {
                *acc += e.value() * x;
            }
        }
        if argmax_set(&weighted) != argmax_set(&shifted) {
            return Err(fail((&rows, &eps), format!("{weighted:?} vs {shifted:?}")));
        }
    }
    Ok(CASES)
}

fn all_plus_is_fp(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 200;
    for _ in 0..CASES {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(0..=30);
        let rows = payoff_rows(rng, n, len, 16);
        let plus = vec![Sign::Plus; rows.len()];
        let sfp = single_stream_scores(&rows, &plus, n).expect("stream covers history");
        let fp = fp_scores(&rows, n);
        if argmax_set(&sfp) != argmax_set(&fp) {
            return Err(fail(&rows, format!("{sfp:?} vs {fp:?}")));
        }
    }
    Ok(CASES)
}

fn be_the_leader(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const CASES: usize = 1000;
    for _ in 0..CASES {
        let n = rng.random_range(1..=4);
        let len = rng.random_range(1..=50);
        let rows = payoff_rows(rng, n, len, 16);
        let eps = signs(rng, rows.len());
        let leaders = perturbed_leader_sets(&rows, &eps, n).expect("matching lengths");
        let mut hindsight = 0.0;
        for (t, (g, e)) in rows.iter().zip(&eps).enumerate() {
            let set = &leaders[t + 1];
            hindsight += e.weight() * g.get(set[rng.random_range(0..set.len())]);
        }
        let scores = single_stream_scores(&rows, &eps, n).expect("stream covers history");
        let best = scores.into_iter().fold(f64::NEG_INFINITY, f64::max);
        if hindsight < best {
            return Err(fail(
                (&rows, &eps),
                format!("hindsight {hindsight} < best fixed {best}"),
            ));
        }
    }
    Ok(CASES)
}

fn empty_sample_law(rng: &mut EpisodeRng) -> Result<usize, Failure> {
    const DRAWS: u32 = 100_000;
    let mut cases = 0;
    for alpha in [0.25, 0.5] {
        for t in [2usize, 5, 9] {
            let empty = (0..DRAWS)
                .filter(|_| sfp_sample_subset(rng, t, alpha).is_empty())
                .count();
            let p = (1.0 - alpha).powi(t as i32 - 1);
            let se = (p * (1.0 - p) / f64::from(DRAWS)).sqrt();
            let freq = empty as f64 / f64::from(DRAWS);
            if (freq - p).abs() > 3.0 * se {
                return Err(fail(
                    (alpha, t),
                    format!("frequency {freq}, expected {p} (se {se})"),
                ));
            }
            cases += 1;
        }
    }
    Ok(cases)
}
