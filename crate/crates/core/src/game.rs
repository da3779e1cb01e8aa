//! Repeated-game data model: strategies, payoff vectors, cumulative payoff
//! bookkeeping and external regret.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A pure strategy, 1-based: `S_i = {1, ..., N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy(usize);

impl Strategy {
    /// Builds a strategy from its 1-based label.
    ///
    /// Panics on 0; use [`Strategy::try_new`] for untrusted input.
    pub fn new(label: usize) -> Self {
        assert!(label >= 1, "strategies are 1-based");
        Strategy(label)
    }

    pub fn try_new(label: usize, n: usize) -> Result<Self> {
        if label == 0 || label > n {
            return Err(Error::StrategyOutOfRange { strategy: label, n });
        }
        Ok(Strategy(label))
    }

    /// Strategy at a 0-based array position.
    pub fn from_index(index: usize) -> Self {
        Strategy(index + 1)
    }

    /// The 1-based label.
    pub fn get(self) -> usize {
        self.0
    }

    /// The 0-based array position.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A Rademacher sign. `(1 + eps)` is 2 for `Plus` and 0 for `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    /// `1 + eps`, either 0 or 2.
    pub fn weight(self) -> f64 {
        match self {
            Sign::Minus => 0.0,
            Sign::Plus => 2.0,
        }
    }
}

pub(crate) fn check_payoff(value: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::PayoffOutOfRange { value })
    }
}

/// Per-round payoff of each of the `N` strategies, every entry in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffVector(Vec<f64>);

impl PayoffVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "a payoff vector needs at least one strategy",
            ));
        }
        for &value in &entries {
            check_payoff(value)?;
        }
        Ok(PayoffVector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        PayoffVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: Strategy) -> f64 {
        self.0[k.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// True when every entry is one of -1, 0, 1.
    pub fn is_ternary(&self) -> bool {
        self.0.iter().all(|&x| x == -1.0 || x == 0.0 || x == 1.0)
    }

    fn checked(&self, k: Strategy) -> Result<f64> {
        self.0
            .get(k.index())
            .copied()
            .ok_or(Error::StrategyOutOfRange {
                strategy: k.get(),
                n: self.len(),
            })
    }
}

impl From<PayoffVector> for Vec<f64> {
    fn from(g: PayoffVector) -> Self {
        g.0
    }
}

/// `g_{i ⊖ j} = g_i - g_j`, always within `[-2, 2]`.
pub fn pairwise_diff(g: &PayoffVector, i: Strategy, j: Strategy) -> Result<f64> {
    Ok(g.checked(i)? - g.checked(j)?)
}

/// `max_k Σ_t g_{t,k} - Σ_t g_{t,k_t}`.
///
/// The comparator is the best *constant* strategy, so the value may be
/// negative. Empty sequences have regret 0.
pub fn external_regret(payoffs: &[PayoffVector], choices: &[Strategy]) -> Result<f64> {
    if payoffs.len() != choices.len() {
        return Err(Error::LengthMismatch {
            expected: payoffs.len(),
            found: choices.len(),
        });
    }
    let Some(first) = payoffs.first() else {
        return Ok(0.0);
    };
    let mut state = CumulativeState::new(first.len());
    for (g, &k) in payoffs.iter().zip(choices) {
        if g.len() != first.len() {
            return Err(Error::LengthMismatch {
                expected: first.len(),
                found: g.len(),
            });
        }
        g.checked(k)?;
        state.append(g, None, k);
    }
    Ok(state.regret())
}

/// Running totals of one learner: `G_t`, the perturbed `G̃_t` and the realized payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeState {
    pub round: usize,
    pub cumulative: Vec<f64>,
    /// `Σ (1 + eps_τ) g_τ`; stays zero unless signs are supplied.
    pub perturbed_cumulative: Vec<f64>,
    pub realized_payoff_sum: f64,
}

impl CumulativeState {
    pub fn new(n: usize) -> Self {
        CumulativeState {
            round: 0,
            cumulative: vec![0.0; n],
            perturbed_cumulative: vec![0.0; n],
            realized_payoff_sum: 0.0,
        }
    }

    pub fn num_strategies(&self) -> usize {
        self.cumulative.len()
    }

    /// Folds round `t = round + 1` into the totals.
    ///
    /// `eps` is given only in single-stream mode.
    pub fn append(&mut self, g: &PayoffVector, eps: Option<Sign>, chosen: Strategy) {
        debug_assert_eq!(g.len(), self.num_strategies());
        for (acc, &x) in self.cumulative.iter_mut().zip(g.as_slice()) {
            *acc += x;
        }
        if let Some(eps) = eps {
            let w = eps.weight();
            for (acc, &x) in self.perturbed_cumulative.iter_mut().zip(g.as_slice()) {
                *acc += w * x;
            }
        }
        self.realized_payoff_sum += g.get(chosen);
        self.round += 1;
    }

    pub fn best_constant_payoff(&self) -> f64 {
        self.cumulative
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Regret so far; 0 before the first round.
    pub fn regret(&self) -> f64 {
        if self.round == 0 {
            return 0.0;
        }
        self.best_constant_payoff() - self.realized_payoff_sum
    }
}

/// Everything observed in one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub horizon: usize,
    pub payoffs: Vec<PayoffVector>,
    pub choices: Vec<Strategy>,
    /// `R_1, ..., R_T`, maintained incrementally.
    pub regret_curve: Vec<f64>,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.regret_curve.last().copied().unwrap_or(0.0)
    }

    /// Recomputes every `R_t` from scratch.
    pub fn recompute_regret_curve(&self) -> Result<Vec<f64>> {
        (1..=self.horizon)
            .map(|t| external_regret(&self.payoffs[..t], &self.choices[..t]))
            .collect()
    }
}

/// A strategic-form game in which every player has the same `N` strategies.
///
/// Payoffs are stored per player as a flattened tensor over profiles in
/// row-major order (player 1 varies slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct StrategicGame {
    num_players: usize,
    num_strategies: usize,
    payoffs: Vec<Vec<f64>>,
}

impl StrategicGame {
    pub fn new(num_players: usize, num_strategies: usize, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if num_players == 0 || num_strategies == 0 {
            return Err(Error::InvalidArgument(
                "games need at least one player and one strategy",
            ));
        }
        let profiles = u32::try_from(num_players)
            .ok()
            .and_then(|m| num_strategies.checked_pow(m))
            .ok_or(Error::InvalidArgument("payoff tensor is too large"))?;
        if payoffs.len() != num_players {
            return Err(Error::LengthMismatch {
                expected: num_players,
                found: payoffs.len(),
            });
        }
        for table in &payoffs {
            if table.len() != profiles {
                return Err(Error::LengthMismatch {
                    expected: profiles,
                    found: table.len(),
                });
            }
            for &value in table {
                check_payoff(value)?;
            }
        }
        Ok(StrategicGame {
            num_players,
            num_strategies,
            payoffs,
        })
    }

    /// Builds a game by evaluating `u(player, profile)` over every profile.
    pub fn from_fn(
        num_players: usize,
        num_strategies: usize,
        mut u: impl FnMut(usize, &[Strategy]) -> f64,
    ) -> Result<Self> {
        let profiles = num_strategies.pow(num_players as u32);
        let mut payoffs = vec![Vec::with_capacity(profiles); num_players];
        let mut profile = vec![Strategy::new(1); num_players];
        for flat in 0..profiles {
            let mut rest = flat;
            for slot in profile.iter_mut().rev() {
                *slot = Strategy::from_index(rest % num_strategies);
                rest /= num_strategies;
            }
            for (player, table) in payoffs.iter_mut().enumerate() {
                table.push(u(player + 1, &profile));
            }
        }
        Self::new(num_players, num_strategies, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn num_strategies(&self) -> usize {
        self.num_strategies
    }

    pub fn payoff_tables(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    /// `u_player(profile)` for a full profile.
    pub fn payoff(&self, player: usize, profile: &[Strategy]) -> Result<f64> {
        if player == 0 || player > self.num_players {
            return Err(Error::PlayerOutOfRange {
                player,
                players: self.num_players,
            });
        }
        if profile.len() != self.num_players {
            return Err(Error::ProfileArity {
                expected: self.num_players,
                found: profile.len(),
            });
        }
        let mut flat = 0;
        for &s in profile {
            if s.get() > self.num_strategies {
                return Err(Error::StrategyOutOfRange {
                    strategy: s.get(),
                    n: self.num_strategies,
                });
            }
            flat = flat * self.num_strategies + s.index();
        }
        Ok(self.payoffs[player - 1][flat])
    }
}

/// `g_k = u_player(k, s_{-player})` for every own strategy `k`.
pub fn opponent_payoff_vector(
    game: &StrategicGame,
    player: usize,
    opp_profile: &[Strategy],
) -> Result<PayoffVector> {
    let m = game.num_players();
    if player == 0 || player > m {
        return Err(Error::PlayerOutOfRange { player, players: m });
    }
    if opp_profile.len() != m - 1 {
        return Err(Error::ProfileArity {
            expected: m - 1,
            found: opp_profile.len(),
        });
    }
    let mut profile = Vec::with_capacity(m);
    profile.extend_from_slice(&opp_profile[..player - 1]);
    profile.push(Strategy::new(1));
    profile.extend_from_slice(&opp_profile[player - 1..]);
    let entries = (1..=game.num_strategies())
        .map(|k| {
            profile[player - 1] = Strategy::new(k);
            game.payoff(player, &profile)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PayoffVector(entries))
}
