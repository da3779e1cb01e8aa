//! Bound tables, counterexample presets and plot data.

use std::fmt::Write as _;

use regretlab_core::adversaries::AdversarySpec;
use regretlab_core::bounds::{
    asymmetric_regret_bound, c_lo, high_prob_regret_bound, leader_set_reference,
    oblivious_regret_bound, q_alpha, scale_count, tie_exploiter_reference,
};
use regretlab_core::harness::ExperimentConfig;
use regretlab_core::learners::{LearnerConfig, LearnerKind};
use regretlab_core::smallball::binomial_pmf_max_bound;

use crate::error::AppResult;
use crate::io::{AdversarySection, ExperimentFile, LearnerSection, ResolvedExperiment, TraceTable};

/// One row of the bounds table; `Err` carries why the quantity is undefined.
pub type BoundRow = (&'static str, Result<f64, String>);

pub fn bounds_table(n: usize, horizon: u64, alpha: f64, delta: f64) -> Vec<BoundRow> {
    let s = |r: regretlab_core::Result<f64>| r.map_err(|e| e.to_string());
    vec![
        ("c_lo", Ok(c_lo())),
        ("q_alpha", s(q_alpha(alpha))),
        ("scale_count", s(scale_count(horizon).map(f64::from))),
        (
            "oblivious_regret_bound",
            s(oblivious_regret_bound(n, horizon)),
        ),
        (
            "high_prob_regret_bound",
            s(high_prob_regret_bound(n, horizon, delta)),
        ),
        (
            "asymmetric_regret_bound",
            s(asymmetric_regret_bound(n, horizon, alpha)),
        ),
        (
            "binomial_pmf_max_bound",
            s(binomial_pmf_max_bound(horizon, alpha)),
        ),
        (
            "tie_exploiter_reference",
            Ok(tie_exploiter_reference(horizon)),
        ),
        ("leader_set_reference", Ok(leader_set_reference(n))),
    ]
}

pub fn format_bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("quantity,value\n");
    for (name, value) in rows {
        match value {
            Ok(v) => writeln!(out, "{name},{v:.16e}"),
            Err(_) => writeln!(out, "{name},"),
        }
        .expect("writing to a String");
    }
    out
}

pub fn format_bounds_text(rows: &[BoundRow]) -> String {
    let width = rows.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (name, value) in rows {
        match value {
            Ok(v) => writeln!(out, "{name:<width$}  {v:.6}"),
            Err(why) => writeln!(out, "{name:<width$}  undefined ({why})"),
        }
        .expect("writing to a String");
    }
    out
}

/// Default sizes of the tie-exploiter demonstration.
pub const TIE_EXPLOITER_HORIZON: usize = 200;
pub const TIE_EXPLOITER_REPS: u32 = 1000;
/// Default sizes of the leader-set demonstration.
pub const LEADER_SET_N: usize = 32;
pub const LEADER_SET_REPS: u32 = 2000;

fn preset(
    learner: LearnerKind,
    adversary: AdversarySpec,
    replications: u32,
    seed: u64,
) -> AppResult<ResolvedExperiment> {
    let config = ExperimentConfig {
        learner: LearnerConfig::new(learner, 0.5, adversary.n)?,
        horizon: adversary.horizon,
        adversary,
        replications,
        master_seed: seed,
    };
    config.validate()?;
    let file = ExperimentFile {
        horizon: config.horizon,
        replications,
        seed,
        learner: LearnerSection {
            kind: learner.as_str().to_string(),
            alpha: 0.5,
        },
        adversary: AdversarySection {
            kind: config.adversary.kind.as_str().to_string(),
            n: Some(config.adversary.n),
            horizon: Some(config.horizon),
            seed: None,
            file: None,
        },
    };
    Ok(ResolvedExperiment { config, file })
}

/// Single-stream learner against the tie exploiter (`N = 2`).
pub fn tie_exploiter_preset(
    horizon: usize,
    replications: u32,
    seed: u64,
) -> AppResult<ResolvedExperiment> {
    preset(
        LearnerKind::SfpSingleStream,
        AdversarySpec::tie_exploiter(horizon),
        replications,
        seed,
    )
}

/// Fresh learner against the leader-set matrix; `horizon` must equal `2n`.
pub fn leader_set_preset(
    n: usize,
    horizon: Option<usize>,
    replications: u32,
    seed: u64,
) -> AppResult<ResolvedExperiment> {
    let spec = AdversarySpec {
        horizon: horizon.unwrap_or(2 * n),
        ..AdversarySpec::leader_set(n)
    };
    preset(LearnerKind::SfpFresh, spec, replications, seed)
}

/// Whitespace-separated `t mean_avg_regret [bound_over_t]` rows.
pub fn plot_data(trace: &TraceTable, bound: Option<f64>) -> String {
    let mut out = String::from(if bound.is_some() {
        "t mean_avg_regret bound_over_t\n"
    } else {
        "t mean_avg_regret\n"
    });
    for (i, a) in trace.mean_avg_regret.iter().enumerate() {
        let t = i + 1;
        match bound {
            Some(b) => writeln!(out, "{t} {a:.16e} {:.16e}", b / t as f64),
            None => writeln!(out, "{t} {a:.16e}"),
        }
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_marks_undefined_rows() {
        let rows = bounds_table(2, 3, 0.5, 0.05);
        let undefined: Vec<_> = rows
            .iter()
            .filter(|(_, v)| v.is_err())
            .map(|(n, _)| *n)
            .collect();
        assert_eq!(
            undefined,
            [
                "scale_count",
                "oblivious_regret_bound",
                "high_prob_regret_bound",
                "asymmetric_regret_bound",
                "binomial_pmf_max_bound"
            ]
        );
        assert!(format_bounds_csv(&rows).contains("\nscale_count,\n"));
        assert!(format_bounds_text(&rows).contains("undefined"));
    }

    #[test]
    fn presets_validate() {
        assert!(tie_exploiter_preset(200, 10, 0).is_ok());
        assert!(tie_exploiter_preset(301, 10, 0).is_err());
        assert!(leader_set_preset(32, None, 10, 0).is_ok());
        assert!(leader_set_preset(32, Some(63), 10, 0).is_err());
    }

    #[test]
    fn plot_rows() {
        let trace = TraceTable {
            mean_regret: vec![1.0, 1.0, 1.5],
            mean_avg_regret: vec![1.0, 0.5, 0.5],
        };
        let plain = plot_data(&trace, None);
        assert_eq!(plain.lines().count(), 4);
        let ts: Vec<usize> = plain
            .lines()
            .skip(1)
            .map(|l| l.split(' ').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(ts, [1, 2, 3]);
        let overlay = plot_data(&trace, Some(6.0));
        assert!(overlay
            .lines()
            .nth(2)
            .unwrap()
            .ends_with(&format!("{:.16e}", 3.0)));
    }
}
