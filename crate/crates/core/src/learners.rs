//! Fictitious play and sampled fictitious play.
//!
//! Sampled fictitious play best-responds to the payoff vectors of a random
//! subset of past rounds, each round kept independently with probability
//! `alpha`. Two randomization variants are provided:
//!
//! * **fresh**: a new subset is drawn every round;
//! * **single stream**: one sign stream `eps_1, eps_2, ...` is fixed for the
//!   whole episode and round `t` keeps `{τ < t : eps_τ = +1}`.
//!
//! Against oblivious payoff sequences the two are identical in distribution;
//! against adaptive ones they are not (see `adversaries::tie_exploiter_payoff`).
//!
//! Ties are detected with exact floating-point equality and broken uniformly
//! with a generator separate from the sampling one. An empty sample ties all
//! `N` strategies.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};

use crate::game::{CumulativeState, PayoffVector, Sign, Strategy};
use crate::{EpisodeRng, Error, Result, ENUMERATION_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    FictitiousPlay,
    SfpFresh,
    SfpSingleStream,
    UniformRandom,
}

impl LearnerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::FictitiousPlay => "fp",
            LearnerKind::SfpFresh => "sfp-fresh",
            LearnerKind::SfpSingleStream => "sfp-single",
            LearnerKind::UniformRandom => "uniform",
        }
    }

    pub fn is_sampled(self) -> bool {
        matches!(self, LearnerKind::SfpFresh | LearnerKind::SfpSingleStream)
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fp" => Ok(LearnerKind::FictitiousPlay),
            "sfp-fresh" => Ok(LearnerKind::SfpFresh),
            "sfp-single" => Ok(LearnerKind::SfpSingleStream),
            "uniform" => Ok(LearnerKind::UniformRandom),
            _ => Err(Error::InvalidConfig {
                field: "kind",
                reason: alloc::format!(
                    "unknown learner kind `{s}` (expected fp, sfp-fresh, sfp-single or uniform)"
                ),
            }),
        }
    }
}

pub fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    /// Probability that a past round enters the sample.
    pub alpha: f64,
    pub num_strategies: usize,
}

impl LearnerConfig {
    pub fn new(kind: LearnerKind, alpha: f64, num_strategies: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if num_strategies == 0 {
            return Err(Error::InvalidConfig {
                field: "n",
                reason: "need at least one strategy".into(),
            });
        }
        Ok(LearnerConfig {
            kind,
            alpha,
            num_strategies,
        })
    }
}

/// Draws Bernoulli(alpha) inclusion flags.
///
/// At `alpha = 1/2` each flag is one bit of a 64-bit word, otherwise one
/// `random_bool` call per flag.
#[derive(Debug, Clone)]
struct BernoulliSource {
    alpha: f64,
    bits: u64,
    remaining: u32,
}

impl BernoulliSource {
    fn new(alpha: f64) -> Self {
        BernoulliSource {
            alpha,
            bits: 0,
            remaining: 0,
        }
    }

    fn draw<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.alpha == 0.5 {
            if self.remaining == 0 {
                self.bits = rng.next_u64();
                self.remaining = 64;
            }
            let bit = self.bits & 1 == 1;
            self.bits >>= 1;
            self.remaining -= 1;
            bit
        } else {
            rng.random_bool(self.alpha)
        }
    }
}

/// A single realized sign stream; entries never change once drawn.
#[derive(Debug, Clone)]
pub struct RademacherStream {
    seed: u64,
    rng: EpisodeRng,
    source: BernoulliSource,
    realized: Vec<Sign>,
}

impl RademacherStream {
    /// `P(eps = +1) = alpha`.
    pub fn seeded(seed: u64, alpha: f64) -> Result<Self> {
        Ok(RademacherStream {
            seed,
            rng: EpisodeRng::seed_from_u64(seed),
            source: BernoulliSource::new(check_alpha(alpha)?),
            realized: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Realizes entries until at least `len` are available.
    pub fn extend_to(&mut self, len: usize) {
        while self.realized.len() < len {
            let sign = if self.source.draw(&mut self.rng) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            self.realized.push(sign);
        }
    }

    pub fn realized(&self) -> &[Sign] {
        &self.realized
    }
}

/// Every strategy attaining the maximum score, compared with `==`.
pub fn argmax_set(scores: &[f64]) -> Vec<Strategy> {
    let mut best = f64::NEG_INFINITY;
    let mut set = Vec::new();
    for (i, &x) in scores.iter().enumerate() {
        if x > best {
            best = x;
            set.clear();
            set.push(Strategy::from_index(i));
        } else if x == best {
            set.push(Strategy::from_index(i));
        }
    }
    set
}

/// Uniform pick among `candidates`; draws nothing when there is one candidate.
pub fn tie_break<R: Rng + ?Sized>(candidates: &[Strategy], rng: &mut R) -> Result<Strategy> {
    match candidates {
        [] => Err(Error::EmptyCandidates),
        [only] => Ok(*only),
        _ => Ok(candidates[rng.random_range(0..candidates.len())]),
    }
}

/// Cumulative payoffs `G_{t-1}`; the zero vector for an empty history.
pub fn fp_scores(history: &[PayoffVector], n: usize) -> Vec<f64> {
    let mut scores = vec![0.0; n];
    for g in history {
        for (acc, &x) in scores.iter_mut().zip(g.as_slice()) {
            *acc += x;
        }
    }
    scores
}

/// Bernoulli sample of the past rounds `{1, ..., t-1}` at round `t`.
pub fn sfp_sample_subset<R: RngCore + ?Sized>(rng: &mut R, t: usize, alpha: f64) -> Vec<usize> {
    let mut source = BernoulliSource::new(alpha);
    (1..t).filter(|_| source.draw(rng)).collect()
}

fn subset_scores(history: &[PayoffVector], subset: &[usize], n: usize) -> Vec<f64> {
    let mut scores = vec![0.0; n];
    for &tau in subset {
        for (acc, &x) in scores.iter_mut().zip(history[tau - 1].as_slice()) {
            *acc += x;
        }
    }
    scores
}

/// One fresh-variant decision at round `t = history.len() + 1`.
pub fn sfp_step_fresh<R: Rng + ?Sized>(
    history: &[PayoffVector],
    n: usize,
    alpha: f64,
    sampling: &mut R,
    tie: &mut R,
) -> Result<Strategy> {
    check_alpha(alpha)?;
    let subset = sfp_sample_subset(sampling, history.len() + 1, alpha);
    tie_break(&argmax_set(&subset_scores(history, &subset, n)), tie)
}

/// `Σ_{τ<t} (1 + eps_τ) g_τ`, accumulated in round order.
pub fn single_stream_scores(
    history: &[PayoffVector],
    signs: &[Sign],
    n: usize,
) -> Result<Vec<f64>> {
    if signs.len() < history.len() {
        return Err(Error::StreamTooShort {
            needed: history.len(),
            available: signs.len(),
        });
    }
    let mut scores = vec![0.0; n];
    for (g, eps) in history.iter().zip(signs) {
        let w = eps.weight();
        for (acc, &x) in scores.iter_mut().zip(g.as_slice()) {
            *acc += w * x;
        }
    }
    Ok(scores)
}

/// One single-stream decision at round `t = history.len() + 1`.
pub fn sfp_step_single_stream<R: Rng + ?Sized>(
    history: &[PayoffVector],
    stream: &RademacherStream,
    n: usize,
    tie: &mut R,
) -> Result<Strategy> {
    let scores = single_stream_scores(history, stream.realized(), n)?;
    tie_break(&argmax_set(&scores), tie)
}

fn check_guard(len: usize) -> Result<()> {
    if len > ENUMERATION_GUARD {
        Err(Error::EnumerationGuard {
            len,
            max: ENUMERATION_GUARD,
        })
    } else {
        Ok(())
    }
}

fn history_width(history: &[PayoffVector], n: usize) -> Result<()> {
    match history.iter().find(|g| g.len() != n) {
        Some(g) => Err(Error::LengthMismatch {
            expected: n,
            found: g.len(),
        }),
        None => Ok(()),
    }
}

/// Probability of each subset size `k` of an `m`-round history: `alpha^k (1-alpha)^(m-k)`.
fn subset_weights(m: usize, alpha: f64) -> Vec<f64> {
    let (mut up, mut down) = (vec![1.0; m + 1], vec![1.0; m + 1]);
    for k in 1..=m {
        up[k] = up[k - 1] * alpha;
        down[k] = down[k - 1] * (1.0 - alpha);
    }
    (0..=m).map(|k| up[k] * down[m - k]).collect()
}

fn enumerate_distribution(
    history: &[PayoffVector],
    alpha: f64,
    n: usize,
    mut scores_for: impl FnMut(u32, &mut [f64]),
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    check_guard(history.len())?;
    history_width(history, n)?;
    let m = history.len();
    let weights = subset_weights(m, alpha);
    let mut dist = vec![0.0; n];
    let mut scores = vec![0.0; n];
    for mask in 0..(1u32 << m) {
        scores.fill(0.0);
        scores_for(mask, &mut scores);
        let leaders = argmax_set(&scores);
        let share = weights[mask.count_ones() as usize] / leaders.len() as f64;
        for k in leaders {
            dist[k.index()] += share;
        }
    }
    Ok(dist)
}

/// Exact distribution of the fresh-variant choice after `history`.
///
/// Enumerates all `2^(t-1)` subsets (subset form `Σ_{τ∈S} g_τ`) and splits
/// each subset's mass uniformly over its argmax set.
pub fn sfp_action_distribution(history: &[PayoffVector], alpha: f64, n: usize) -> Result<Vec<f64>> {
    enumerate_distribution(history, alpha, n, |mask, scores| {
        for (tau, g) in history.iter().enumerate() {
            if mask >> tau & 1 == 1 {
                for (acc, &x) in scores.iter_mut().zip(g.as_slice()) {
                    *acc += x;
                }
            }
        }
    })
}

/// Exact distribution of the single-stream choice after `history`, via the
/// perturbation form `Σ (1 + eps_τ) g_τ` over all sign vectors.
pub fn single_stream_action_distribution(
    history: &[PayoffVector],
    alpha: f64,
    n: usize,
) -> Result<Vec<f64>> {
    enumerate_distribution(history, alpha, n, |mask, scores| {
        for (tau, g) in history.iter().enumerate() {
            let eps = if mask >> tau & 1 == 1 {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let w = eps.weight();
            for (acc, &x) in scores.iter_mut().zip(g.as_slice()) {
                *acc += w * x;
            }
        }
    })
}

/// Argmax sets of the perturbed totals `G̃_t` for `t = 0, ..., T`.
///
/// Entry `t` is the leader set from which `k_{t+1}` is drawn.
pub fn perturbed_leader_sets(
    payoffs: &[PayoffVector],
    signs: &[Sign],
    n: usize,
) -> Result<Vec<Vec<Strategy>>> {
    if signs.len() != payoffs.len() {
        return Err(Error::LengthMismatch {
            expected: payoffs.len(),
            found: signs.len(),
        });
    }
    history_width(payoffs, n)?;
    let mut state = CumulativeState::new(n);
    let mut sets = Vec::with_capacity(payoffs.len() + 1);
    sets.push(argmax_set(&state.perturbed_cumulative));
    for (g, &eps) in payoffs.iter().zip(signs) {
        state.append(g, Some(eps), Strategy::new(1));
        sets.push(argmax_set(&state.perturbed_cumulative));
    }
    Ok(sets)
}

/// A learner bound to one episode: it owns its sampling and tie-break
/// generators and its running totals.
#[derive(Debug, Clone)]
pub struct Learner {
    config: LearnerConfig,
    state: CumulativeState,
    history: Vec<f64>,
    sampling: EpisodeRng,
    tie: EpisodeRng,
    stream: Option<RademacherStream>,
    last_sample_size: Option<usize>,
}

impl Learner {
    pub fn new(config: LearnerConfig, sampling_seed: u64, tie_seed: u64) -> Result<Self> {
        let stream = match config.kind {
            LearnerKind::SfpSingleStream => {
                Some(RademacherStream::seeded(sampling_seed, config.alpha)?)
            }
            _ => None,
        };
        Ok(Learner {
            config,
            state: CumulativeState::new(config.num_strategies),
            history: Vec::new(),
            sampling: EpisodeRng::seed_from_u64(sampling_seed),
            tie: EpisodeRng::seed_from_u64(tie_seed),
            stream,
            last_sample_size: None,
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn state(&self) -> &CumulativeState {
        &self.state
    }

    /// Number of past rounds in the most recent sample; `None` for unsampled kinds.
    pub fn last_sample_size(&self) -> Option<usize> {
        self.last_sample_size
    }

    pub fn stream(&self) -> Option<&RademacherStream> {
        self.stream.as_ref()
    }

    /// Chooses the move for round `t = rounds observed + 1`.
    pub fn choose(&mut self) -> Strategy {
        let n = self.config.num_strategies;
        let scores = match self.config.kind {
            LearnerKind::FictitiousPlay => self.state.cumulative.clone(),
            LearnerKind::UniformRandom => vec![0.0; n],
            LearnerKind::SfpFresh => {
                let mut source = BernoulliSource::new(self.config.alpha);
                let mut scores = vec![0.0; n];
                let mut size = 0;
                for g in self.history.chunks_exact(n) {
                    if source.draw(&mut self.sampling) {
                        size += 1;
                        for (acc, &x) in scores.iter_mut().zip(g) {
                            *acc += x;
                        }
                    }
                }
                self.last_sample_size = Some(size);
                scores
            }
            LearnerKind::SfpSingleStream => {
                let stream = self
                    .stream
                    .as_mut()
                    .expect("single-stream learner owns a stream");
                stream.extend_to(self.state.round);
                let size = stream.realized()[..self.state.round]
                    .iter()
                    .filter(|&&e| e == Sign::Plus)
                    .count();
                self.last_sample_size = Some(size);
                self.state.perturbed_cumulative.clone()
            }
        };
        tie_break(&argmax_set(&scores), &mut self.tie).expect("argmax of a nonempty score vector")
    }

    /// Records the round's payoff vector and the move that was played.
    pub fn observe(&mut self, g: &PayoffVector, chosen: Strategy) {
        let eps = match &mut self.stream {
            Some(stream) => {
                stream.extend_to(self.state.round + 1);
                Some(stream.realized()[self.state.round])
            }
            None => None,
        };
        if self.config.kind == LearnerKind::SfpFresh {
            self.history.extend_from_slice(g.as_slice());
        }
        self.state.append(g, eps, chosen);
    }
}
