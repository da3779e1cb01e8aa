//! Exact anti-concentration oracles.
//!
//! Every probability here is computed by exhaustive enumeration of sign
//! vectors. At `alpha = 1/2` each weight is a power of two and every partial
//! sum is exact in `f64` for the lengths accepted, so those results are
//! exact dyadic rationals.
//!
//! A *switch* of the pair `(i, j)` at round `t` is the event
//! `G̃_{t-1, i⊖j} >= 0` and `G̃_{t, i⊖j} <= 0`, both inequalities
//! non-strict, where `G̃_{t, i⊖j} = Σ_{τ<=t} (1 + eps_τ) d_τ`.

use alloc::vec;
use alloc::vec::Vec;

use libm::{floor, log, sqrt};

use crate::bounds::{c_lo, q_alpha};
use crate::game::PayoffVector;
use crate::learners::{check_alpha, sfp_action_distribution};
use crate::{Error, Result, ENUMERATION_GUARD};

/// Longest difference sequence accepted by the switch-probability oracles.
pub const SWITCH_GUARD: usize = 20;
/// Largest strategy count accepted by [`regret2switches_rhs`].
pub const PAIR_GUARD: usize = 4;

fn guard(len: usize, max: usize) -> Result<()> {
    if len > max {
        Err(Error::EnumerationGuard { len, max })
    } else {
        Ok(())
    }
}

/// A Rademacher sum `Σ eps_i x_i` and a closed ball `[center - radius, center + radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSumInstance {
    pub weights: Vec<f64>,
    pub center: f64,
    pub radius: f64,
}

impl SignedSumInstance {
    pub fn new(weights: Vec<f64>, center: f64, radius: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "a signed sum needs at least one weight",
            ));
        }
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidArgument("ball radius must be nonnegative"));
        }
        Ok(SignedSumInstance {
            weights,
            center,
            radius,
        })
    }

    /// All weights have magnitude at least 1, as the Erdős bound requires.
    pub fn is_erdos_mode(&self) -> bool {
        self.weights.iter().all(|x| x.abs() >= 1.0)
    }
}

/// `P(Σ eps_i x_i ∈ [c - Δ, c + Δ])` under symmetric signs, by enumeration.
pub fn exact_small_ball(instance: &SignedSumInstance) -> Result<f64> {
    let n = instance.weights.len();
    guard(n, ENUMERATION_GUARD)?;
    let (lo, hi) = (
        instance.center - instance.radius,
        instance.center + instance.radius,
    );
    let hits = (0..1u32 << n)
        .filter(|&mask| {
            let sum: f64 = instance
                .weights
                .iter()
                .enumerate()
                .map(|(i, &x)| if mask >> i & 1 == 1 { x } else { -x })
                .sum();
            lo <= sum && sum <= hi
        })
        .count();
    Ok(hits as f64 / (1u64 << n) as f64)
}

/// `S(n) / 2^n` with `S(n) = C(n, floor(n/2))`.
///
/// Uses `r_n = r_{n-1}` for even `n` and `r_n = r_{n-1} n / (n + 1)` for odd `n`.
pub fn central_binomial_ratio(n: usize) -> f64 {
    let mut r = 1.0;
    for m in 1..=n {
        if m % 2 == 1 {
            r *= m as f64 / (m + 1) as f64;
        }
    }
    r
}

/// Erdős' Littlewood-Offord bound `S(n)/2^n (floor(Δ) + 1)`.
pub fn erdos_bound(n: usize, radius: f64) -> f64 {
    central_binomial_ratio(n) * (floor(radius) + 1.0)
}

/// `C_LO (floor(Δ) + 1) / sqrt(n)`; exceeds 1 (and is vacuous) for `n <= 4`.
pub fn corollary_bound(n: usize, radius: f64) -> f64 {
    c_lo() * (floor(radius) + 1.0) / sqrt(n as f64)
}

/// `Q_alpha t^(-1/2)`, valid for `t > max(2/(1-alpha), 2/alpha)`.
pub fn binomial_pmf_max_bound(t: u64, alpha: f64) -> Result<f64> {
    let q = q_alpha(alpha)?;
    if !crate::bounds::asymmetric_horizon_ok(t, alpha) {
        return Err(Error::HorizonTooSmall {
            horizon: t,
            requirement: "need t > max(2/(1-alpha), 2/alpha)",
        });
    }
    Ok(q / sqrt(t as f64))
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `max_k P(Binomial(t, alpha) = k)`, evaluated at the mode `floor((t+1) alpha)`.
pub fn binomial_pmf_max(t: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let mode = (floor((t + 1) as f64 * alpha) as u64).min(t);
    let ln = ln_factorial(t) - ln_factorial(mode) - ln_factorial(t - mode)
        + mode as f64 * log(alpha)
        + (t - mode) as f64 * log(1.0 - alpha);
    Ok(libm::exp(ln))
}

/// `(1 + eps)` weight and probability of each sign at inclusion rate `alpha`.
fn sign_branches(alpha: f64) -> [(f64, f64); 2] {
    [(2.0, alpha), (0.0, 1.0 - alpha)]
}

/// Probability of a switch at round `t` (1-based) for the difference
/// sequence `diffs`, by enumerating all `2^t` sign vectors.
pub fn exact_switch_probability(diffs: &[f64], t: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    guard(t, SWITCH_GUARD)?;
    if t == 0 || t > diffs.len() {
        return Err(Error::RoundOutOfRange {
            round: t,
            horizon: diffs.len(),
        });
    }
    let mut total = 0.0;
    for mask in 0..1u32 << t {
        let mut prefix = 0.0;
        let mut weight = 1.0;
        for (tau, &d) in diffs[..t - 1].iter().enumerate() {
            let (w, p) = sign_branches(alpha)[(mask >> tau & 1) as usize];
            prefix += w * d;
            weight *= p;
        }
        let (w, p) = sign_branches(alpha)[(mask >> (t - 1) & 1) as usize];
        let full = prefix + w * diffs[t - 1];
        if prefix >= 0.0 && full <= 0.0 {
            total += weight * p;
        }
    }
    Ok(total)
}

/// Switch probabilities for every round `t = 1..=T` at once, by a depth-first
/// walk of the sign tree (signs after round `t` never matter for round `t`).
pub fn switch_probabilities(diffs: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    guard(diffs.len(), SWITCH_GUARD)?;
    let mut probs = vec![0.0; diffs.len()];
    // (rounds assigned, prefix sum, probability of the prefix)
    let mut stack = vec![(0usize, 0.0f64, 1.0f64)];
    while let Some((depth, prefix, weight)) = stack.pop() {
        if depth == diffs.len() {
            continue;
        }
        for (w, p) in sign_branches(alpha) {
            let next = prefix + w * diffs[depth];
            if prefix >= 0.0 && next <= 0.0 {
                probs[depth] += weight * p;
            }
            stack.push((depth + 1, next, weight * p));
        }
    }
    Ok(probs)
}

/// `Σ_t |d_t| P(switch at t)`.
pub fn switching_sum(diffs: &[f64], alpha: f64) -> Result<f64> {
    let probs = switch_probabilities(diffs, alpha)?;
    Ok(diffs.iter().zip(&probs).map(|(d, p)| d.abs() * p).sum())
}

fn pair_diffs(payoffs: &[PayoffVector], i: usize, j: usize) -> Vec<f64> {
    payoffs
        .iter()
        .map(|g| g.as_slice()[i] - g.as_slice()[j])
        .collect()
}

fn width(payoffs: &[PayoffVector]) -> Result<usize> {
    let n = payoffs.first().map(PayoffVector::len).unwrap_or(0);
    match payoffs.iter().find(|g| g.len() != n) {
        Some(g) => Err(Error::LengthMismatch {
            expected: n,
            found: g.len(),
        }),
        None => Ok(n),
    }
}

/// Right-hand side of the regret-to-switching inequality:
/// `(N^2 / alpha) max_{i != j} Σ_t |g_{t,i⊖j}| P(switch of (i, j) at t)`.
///
/// The maximum runs over ordered pairs; it is 0 when `N = 1`.
pub fn regret2switches_rhs(payoffs: &[PayoffVector], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    guard(payoffs.len(), SWITCH_GUARD)?;
    let n = width(payoffs)?;
    guard(n, PAIR_GUARD)?;
    let mut best = 0.0f64;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            best = best.max(switching_sum(&pair_diffs(payoffs, i, j), alpha)?);
        }
    }
    Ok((n * n) as f64 / alpha * best)
}

/// Exact expected regret of the fresh variant against an oblivious sequence:
/// `max_k Σ_t g_{t,k} - Σ_t <p_t, g_t>` with `p_t` the exact action
/// distribution after the first `t - 1` rounds.
pub fn exact_expected_regret(payoffs: &[PayoffVector], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    guard(payoffs.len(), SWITCH_GUARD)?;
    let n = width(payoffs)?;
    if n == 0 {
        return Ok(0.0);
    }
    let mut totals = vec![0.0; n];
    let mut expected = 0.0;
    for (t, g) in payoffs.iter().enumerate() {
        let dist = sfp_action_distribution(&payoffs[..t], alpha, n)?;
        expected += dist
            .iter()
            .zip(g.as_slice())
            .map(|(p, x)| p * x)
            .sum::<f64>();
        for (acc, &x) in totals.iter_mut().zip(g.as_slice()) {
            *acc += x;
        }
    }
    let best = totals.into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(best - expected)
}
