//! Learner-versus-adversary episodes and Monte Carlo aggregation.
//!
//! Every random stream in an episode is seeded by [`derive_seed`], so an
//! episode is a pure function of `(config, replication)`. Aggregation always
//! folds replications in index order, which makes serial and parallel
//! drivers produce bit-identical summaries.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;

use crate::adversaries::{Adversary, AdversarySpec};
use crate::bounds::{asymmetric_horizon_ok, asymmetric_regret_bound, oblivious_regret_bound};
use crate::learners::{Learner, LearnerConfig};
use crate::{EpisodeRng, Error, RegretTrace, Result};

/// Independent random streams within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamLabel {
    Sampling,
    TieBreak,
    Adversary,
}

impl StreamLabel {
    fn code(self) -> u64 {
        match self {
            StreamLabel::Sampling => 0,
            StreamLabel::TieBreak => 1,
            StreamLabel::Adversary => 2,
        }
    }
}

/// MurmurHash3 64-bit finalizer; a bijection on `u64`.
fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Seed for one stream of one replication:
/// `fmix64(fmix64(master) ^ fmix64(4 * replication + label))`.
///
/// Both mixing steps are bijections, so for a fixed master seed distinct
/// `(replication, label)` pairs (with `replication < 2^62`) get distinct seeds.
pub fn derive_seed(master_seed: u64, replication: u64, label: StreamLabel) -> u64 {
    let slot = (replication << 2) | label.code();
    fmix64(fmix64(master_seed) ^ fmix64(slot))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub learner: LearnerConfig,
    pub adversary: AdversarySpec,
    pub horizon: usize,
    pub replications: u32,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad =
            |field, reason: alloc::string::String| Err(Error::InvalidConfig { field, reason });
        if self.replications == 0 {
            return bad("replications", "must be at least 1".into());
        }
        if self.horizon == 0 {
            return bad("horizon", "must be at least 1".into());
        }
        LearnerConfig::new(
            self.learner.kind,
            self.learner.alpha,
            self.learner.num_strategies,
        )?;
        self.adversary.validate()?;
        if self.adversary.horizon != self.horizon {
            return bad(
                "horizon",
                alloc::format!(
                    "experiment horizon {} but adversary horizon {}",
                    self.horizon,
                    self.adversary.horizon
                ),
            );
        }
        if self.adversary.n != self.learner.num_strategies {
            return bad(
                "n",
                alloc::format!(
                    "adversary has {} strategies but the learner has {}",
                    self.adversary.n,
                    self.learner.num_strategies
                ),
            );
        }
        Ok(())
    }
}

/// Which theoretical ceiling a summary was matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Oblivious,
    Asymmetric,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Oblivious => "oblivious",
            BoundKind::Asymmetric => "asymmetric",
        }
    }
}

/// The bound that applies to a configuration, if any.
///
/// Sampled learners at `alpha = 1/2` get the oblivious bound; other rates get
/// the asymmetric bound when every payoff is in {-1, 0, 1} and the horizon
/// is long enough.
pub fn matching_bound(config: &ExperimentConfig) -> Option<(BoundKind, f64)> {
    let learner = &config.learner;
    if !learner.kind.is_sampled() {
        return None;
    }
    let (n, t) = (learner.num_strategies, config.horizon as u64);
    if learner.alpha == 0.5 {
        oblivious_regret_bound(n, t)
            .ok()
            .map(|b| (BoundKind::Oblivious, b))
    } else if config.adversary.is_ternary() && asymmetric_horizon_ok(t, learner.alpha) {
        asymmetric_regret_bound(n, t, learner.alpha)
            .ok()
            .map(|b| (BoundKind::Asymmetric, b))
    } else {
        None
    }
}

/// One episode against an already built adversary, calling `observe` after
/// every round with the round number and the learner's state.
pub fn run_episode_observed<F>(
    config: &ExperimentConfig,
    adversary: &Adversary,
    replication: u64,
    mut observe: F,
) -> Result<RegretTrace>
where
    F: FnMut(usize, &Learner),
{
    let seed = config.master_seed;
    let mut learner = Learner::new(
        config.learner,
        derive_seed(seed, replication, StreamLabel::Sampling),
        derive_seed(seed, replication, StreamLabel::TieBreak),
    )?;
    let adversary_seed = config
        .adversary
        .seed
        .unwrap_or_else(|| derive_seed(seed, replication, StreamLabel::Adversary));
    let mut adversary_rng = EpisodeRng::seed_from_u64(adversary_seed);

    let t_max = config.horizon;
    let mut payoffs = Vec::with_capacity(t_max);
    let mut choices = Vec::with_capacity(t_max);
    let mut regret_curve = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        // The adversary commits to round t having seen moves 1..t-1 only.
        let g = adversary.next_payoff(t, &choices, &mut adversary_rng)?;
        let k = learner.choose();
        learner.observe(&g, k);
        observe(t, &learner);
        payoffs.push(g);
        choices.push(k);
        regret_curve.push(learner.state().regret());
    }
    Ok(RegretTrace {
        horizon: t_max,
        payoffs,
        choices,
        regret_curve,
    })
}

/// One replication of an experiment.
pub fn run_episode(config: &ExperimentConfig, replication: u64) -> Result<RegretTrace> {
    config.validate()?;
    let adversary = Adversary::new(config.adversary.clone())?;
    run_episode_observed(config, &adversary, replication, |_, _| {})
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub mean_regret: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    /// Pointwise mean of `R_t`, `t = 1..=T`.
    pub mean_regret_curve: Vec<f64>,
    /// Pointwise mean of `R_t / t`.
    pub mean_avg_regret_curve: Vec<f64>,
    pub bound_value: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    pub replications: u32,
}

/// Order-fixed accumulator over replication regret curves.
///
/// Curves must be pushed in replication order; the result is then
/// independent of how the episodes themselves were scheduled.
#[derive(Debug, Clone)]
pub struct CurveAccumulator {
    curve_sum: Vec<f64>,
    finals: Vec<f64>,
}

impl CurveAccumulator {
    pub fn new(horizon: usize) -> Self {
        CurveAccumulator {
            curve_sum: vec![0.0; horizon],
            finals: Vec::new(),
        }
    }

    pub fn push(&mut self, regret_curve: &[f64]) {
        debug_assert_eq!(regret_curve.len(), self.curve_sum.len());
        for (acc, &r) in self.curve_sum.iter_mut().zip(regret_curve) {
            *acc += r;
        }
        self.finals
            .push(regret_curve.last().copied().unwrap_or(0.0));
    }

    pub fn finish(self, bound: Option<(BoundKind, f64)>) -> RunSummary {
        let reps = self.finals.len();
        let count = reps.max(1) as f64;
        let mean = self.finals.iter().sum::<f64>() / count;
        let std_error = if reps >= 2 {
            let ss: f64 = self.finals.iter().map(|x| (x - mean) * (x - mean)).sum();
            libm::sqrt(ss / (count - 1.0) / count)
        } else {
            0.0
        };
        let mean_regret_curve: Vec<f64> = self.curve_sum.iter().map(|s| s / count).collect();
        let mean_avg_regret_curve = mean_regret_curve
            .iter()
            .enumerate()
            .map(|(i, r)| r / (i + 1) as f64)
            .collect();
        RunSummary {
            mean_regret: mean,
            std_error,
            ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
            mean_regret_curve,
            mean_avg_regret_curve,
            bound_value: bound.map(|b| b.1),
            bound_kind: bound.map(|b| b.0),
            replications: reps as u32,
        }
    }
}

/// Serial Monte Carlo estimate of expected regret over `config.replications` episodes.
pub fn monte_carlo_regret(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let adversary = Adversary::new(config.adversary.clone())?;
    let mut acc = CurveAccumulator::new(config.horizon);
    for rep in 0..u64::from(config.replications) {
        let trace = run_episode_observed(config, &adversary, rep, |_, _| {})?;
        acc.push(&trace.regret_curve);
    }
    Ok(acc.finish(matching_bound(config)))
}
