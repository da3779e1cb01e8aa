//! Payoff-generating environments.
//!
//! Oblivious kinds (fixed sequence, i.i.d. draws, the leader-set matrix)
//! ignore the player's moves. The tie exploiter is adaptive: on even rounds
//! it pays the strategy the player did *not* use in the previous round.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::game::{PayoffVector, Strategy};
use crate::{Error, Result};

/// Longest horizon accepted for the tie exploiter.
pub const TIE_EXPLOITER_MAX_HORIZON: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdversaryKind {
    FixedSequence,
    IidUniform,
    /// I.i.d. entries drawn uniformly from {-1, 0, 1}.
    IidTernary,
    LeaderSet,
    TieExploiter,
}

impl AdversaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryKind::FixedSequence => "fixed",
            AdversaryKind::IidUniform => "iid-uniform",
            AdversaryKind::IidTernary => "iid-ternary",
            AdversaryKind::LeaderSet => "leader-set",
            AdversaryKind::TieExploiter => "tie-exploiter",
        }
    }

    pub fn is_oblivious(self) -> bool {
        self != AdversaryKind::TieExploiter
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(AdversaryKind::FixedSequence),
            "iid-uniform" => Ok(AdversaryKind::IidUniform),
            "iid-ternary" => Ok(AdversaryKind::IidTernary),
            "leader-set" => Ok(AdversaryKind::LeaderSet),
            "tie-exploiter" => Ok(AdversaryKind::TieExploiter),
            _ => Err(Error::InvalidConfig {
                field: "kind",
                reason: alloc::format!(
                    "unknown adversary kind `{s}` (expected fixed, iid-uniform, iid-ternary, leader-set or tie-exploiter)"
                ),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub n: usize,
    pub horizon: usize,
    /// Payoff rows, fixed sequences only.
    pub sequence: Option<Vec<PayoffVector>>,
    /// Pins the random kinds to one sequence shared by every replication.
    pub seed: Option<u64>,
}

impl AdversarySpec {
    pub fn fixed(sequence: Vec<PayoffVector>) -> Result<Self> {
        let n = sequence.first().map(PayoffVector::len).unwrap_or(0);
        let spec = AdversarySpec {
            kind: AdversaryKind::FixedSequence,
            n,
            horizon: sequence.len(),
            sequence: Some(sequence),
            seed: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn iid_uniform(n: usize, horizon: usize) -> Self {
        AdversarySpec {
            kind: AdversaryKind::IidUniform,
            n,
            horizon,
            sequence: None,
            seed: None,
        }
    }

    pub fn iid_ternary(n: usize, horizon: usize) -> Self {
        AdversarySpec {
            kind: AdversaryKind::IidTernary,
            n,
            horizon,
            sequence: None,
            seed: None,
        }
    }

    pub fn leader_set(n: usize) -> Self {
        AdversarySpec {
            kind: AdversaryKind::LeaderSet,
            n,
            horizon: 2 * n,
            sequence: None,
            seed: None,
        }
    }

    pub fn tie_exploiter(horizon: usize) -> Self {
        AdversarySpec {
            kind: AdversaryKind::TieExploiter,
            n: 2,
            horizon,
            sequence: None,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidConfig {
                field,
                reason: reason.into(),
            })
        };
        if self.n == 0 {
            return bad("n", "need at least one strategy");
        }
        if self.horizon == 0 {
            return bad("horizon", "must be at least 1");
        }
        match self.kind {
            AdversaryKind::FixedSequence => {
                let Some(seq) = &self.sequence else {
                    return bad("file", "fixed sequences need payoff rows");
                };
                if seq.len() != self.horizon {
                    return Err(Error::InvalidConfig {
                        field: "horizon",
                        reason: alloc::format!(
                            "sequence has {} rows, horizon is {}",
                            seq.len(),
                            self.horizon
                        ),
                    });
                }
                if let Some(g) = seq.iter().find(|g| g.len() != self.n) {
                    return Err(Error::InvalidConfig {
                        field: "n",
                        reason: alloc::format!(
                            "row of length {} in a game with n = {}",
                            g.len(),
                            self.n
                        ),
                    });
                }
            }
            AdversaryKind::LeaderSet => {
                if self.n < 2 {
                    return bad("n", "leader-set needs n >= 2");
                }
                if self.horizon != 2 * self.n {
                    return bad("horizon", "leader-set needs horizon = 2n");
                }
            }
            AdversaryKind::TieExploiter => {
                if self.n != 2 {
                    return bad("n", "tie-exploiter needs n = 2");
                }
                if self.horizon > TIE_EXPLOITER_MAX_HORIZON {
                    return bad("horizon", "tie-exploiter horizons are capped at 300");
                }
            }
            AdversaryKind::IidUniform | AdversaryKind::IidTernary => {}
        }
        Ok(())
    }

    /// True when every payoff the adversary can emit is in {-1, 0, 1}.
    pub fn is_ternary(&self) -> bool {
        match self.kind {
            AdversaryKind::IidTernary | AdversaryKind::LeaderSet => true,
            AdversaryKind::FixedSequence => self
                .sequence
                .as_ref()
                .is_some_and(|s| s.iter().all(PayoffVector::is_ternary)),
            AdversaryKind::IidUniform | AdversaryKind::TieExploiter => false,
        }
    }
}

/// Round `t` of the tie exploiter: `(0, 0)` on odd rounds; on even rounds
/// `1 - 0.1^t` goes to the strategy not played at round `t - 1`.
pub fn tie_exploiter_payoff(t: usize, prev_move: Option<Strategy>) -> Result<PayoffVector> {
    if t == 0 {
        return Err(Error::RoundOutOfRange {
            round: t,
            horizon: TIE_EXPLOITER_MAX_HORIZON,
        });
    }
    if t % 2 == 1 {
        return Ok(PayoffVector::zeros(2));
    }
    let prize = 1.0 - libm::pow(0.1, t as f64);
    let entries = match prev_move.map(Strategy::get) {
        Some(1) => vec![0.0, prize],
        Some(2) => vec![prize, 0.0],
        Some(k) => return Err(Error::StrategyOutOfRange { strategy: k, n: 2 }),
        None => return Err(Error::MissingPreviousMove { round: t }),
    };
    PayoffVector::new(entries)
}

/// The `N x 2N` leader-set matrix, returned column by column (one payoff
/// vector per round).
///
/// Round `2m - 1` pays 0 to strategy `m` and -1 to the rest; round `2m`
/// pays -1 to strategies `1..=m` and 0 to the rest.
pub fn leader_set_matrix(n: usize) -> Result<Vec<PayoffVector>> {
    if n < 2 {
        return Err(Error::InvalidConfig {
            field: "n",
            reason: "leader-set needs n >= 2".into(),
        });
    }
    let mut columns = Vec::with_capacity(2 * n);
    for m in 1..=n {
        let odd = (1..=n).map(|k| if k == m { 0.0 } else { -1.0 }).collect();
        let even = (1..=n).map(|k| if k <= m { -1.0 } else { 0.0 }).collect();
        columns.push(PayoffVector::new(odd)?);
        columns.push(PayoffVector::new(even)?);
    }
    Ok(columns)
}

fn iid_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, ternary: bool) -> PayoffVector {
    let entries = (0..n)
        .map(|_| {
            if ternary {
                rng.random_range(-1i32..=1) as f64
            } else {
                rng.random_range(-1.0..=1.0)
            }
        })
        .collect();
    PayoffVector::new(entries).expect("draws lie in [-1, 1]")
}

/// `horizon` payoff vectors with i.i.d. uniform entries on `[-1, 1]`.
pub fn iid_uniform_payoffs<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    horizon: usize,
) -> Vec<PayoffVector> {
    (0..horizon).map(|_| iid_vector(rng, n, false)).collect()
}

/// `horizon` payoff vectors with i.i.d. entries uniform on {-1, 0, 1}.
pub fn iid_ternary_payoffs<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    horizon: usize,
) -> Vec<PayoffVector> {
    (0..horizon).map(|_| iid_vector(rng, n, true)).collect()
}

/// An adversary instantiated for one episode.
#[derive(Debug, Clone)]
pub struct Adversary {
    spec: AdversarySpec,
    columns: Option<Vec<PayoffVector>>,
}

impl Adversary {
    pub fn new(spec: AdversarySpec) -> Result<Self> {
        spec.validate()?;
        let columns = match spec.kind {
            AdversaryKind::LeaderSet => Some(leader_set_matrix(spec.n)?),
            _ => None,
        };
        Ok(Adversary { spec, columns })
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    /// Payoff vector for round `t`, given the player's moves in rounds `1..t`.
    pub fn next_payoff<R: Rng + ?Sized>(
        &self,
        t: usize,
        player_history: &[Strategy],
        rng: &mut R,
    ) -> Result<PayoffVector> {
        if t == 0 || t > self.spec.horizon {
            return Err(Error::RoundOutOfRange {
                round: t,
                horizon: self.spec.horizon,
            });
        }
        match self.spec.kind {
            AdversaryKind::FixedSequence => {
                Ok(self.spec.sequence.as_ref().expect("validated")[t - 1].clone())
            }
            AdversaryKind::LeaderSet => {
                Ok(self.columns.as_ref().expect("built in new")[t - 1].clone())
            }
            AdversaryKind::IidUniform => Ok(iid_vector(rng, self.spec.n, false)),
            AdversaryKind::IidTernary => Ok(iid_vector(rng, self.spec.n, true)),
            AdversaryKind::TieExploiter => {
                let prev = if t >= 2 {
                    player_history.get(t - 2).copied()
                } else {
                    None
                };
                tie_exploiter_payoff(t, prev)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::EpisodeRng;
    use rand::SeedableRng;

    fn s(k: usize) -> Strategy {
        Strategy::new(k)
    }

    #[test]
    fn fixed_sequence_lookup() {
        let rows = vec![
            PayoffVector::new(vec![0.0, 0.0]).unwrap(),
            PayoffVector::new(vec![1.0, 0.0]).unwrap(),
            PayoffVector::new(vec![0.5, -0.5]).unwrap(),
        ];
        let adv = Adversary::new(AdversarySpec::fixed(rows).unwrap()).unwrap();
        let mut rng = EpisodeRng::seed_from_u64(0);
        assert_eq!(
            adv.next_payoff(3, &[s(1), s(2)], &mut rng)
                .unwrap()
                .as_slice(),
            &[0.5, -0.5]
        );
        assert!(adv.next_payoff(4, &[], &mut rng).is_err());
        assert!(adv.next_payoff(0, &[], &mut rng).is_err());
    }

    #[test]
    fn tie_exploiter_examples() {
        assert_eq!(
            tie_exploiter_payoff(1, None).unwrap().as_slice(),
            &[0.0, 0.0]
        );
        let g = tie_exploiter_payoff(2, Some(s(1))).unwrap();
        assert_eq!(g.as_slice()[0], 0.0);
        assert!((g.as_slice()[1] - 0.99).abs() < 1e-15);
        let g = tie_exploiter_payoff(4, Some(s(2))).unwrap();
        assert!((g.as_slice()[0] - 0.9999).abs() < 1e-15);
        assert_eq!(g.as_slice()[1], 0.0);
        assert_eq!(
            tie_exploiter_payoff(6, None),
            Err(Error::MissingPreviousMove { round: 6 })
        );
    }

    #[test]
    fn tie_exploiter_via_adversary() {
        let adv = Adversary::new(AdversarySpec::tie_exploiter(10)).unwrap();
        let mut rng = EpisodeRng::seed_from_u64(0);
        assert_eq!(
            adv.next_payoff(1, &[], &mut rng).unwrap().as_slice(),
            &[0.0, 0.0]
        );
        let g = adv.next_payoff(2, &[s(2)], &mut rng).unwrap();
        assert!(g.as_slice()[0] > 0.98 && g.as_slice()[1] == 0.0);
        assert!(Adversary::new(AdversarySpec::tie_exploiter(301)).is_err());
        let mut three = AdversarySpec::tie_exploiter(10);
        three.n = 3;
        assert!(Adversary::new(three).is_err());
    }

    #[test]
    fn tie_exploiter_prizes_are_positive() {
        for t in (2..=TIE_EXPLOITER_MAX_HORIZON).step_by(2) {
            let prize = tie_exploiter_payoff(t, Some(s(1))).unwrap().as_slice()[1];
            assert!(prize > 0.0 && prize <= 1.0);
            // 0.1^t drops below half an ulp of 1 from t = 18 on.
            assert_eq!(prize < 1.0, t < 18, "t = {t}");
        }
    }

    #[test]
    fn tie_exploiter_total_payoff_is_linear() {
        for horizon in (2..=TIE_EXPLOITER_MAX_HORIZON).step_by(2) {
            let total: f64 = (2..=horizon)
                .step_by(2)
                .map(|t| 1.0 - 0.1f64.powi(t as i32))
                .sum();
            assert!(total >= 0.45 * horizon as f64, "T = {horizon}: {total}");
        }
    }

    #[test]
    fn leader_set_small() {
        let cols = leader_set_matrix(2).unwrap();
        let cols: Vec<&[f64]> = cols.iter().map(PayoffVector::as_slice).collect();
        assert_eq!(
            cols,
            vec![&[0.0, -1.0][..], &[-1.0, 0.0], &[-1.0, 0.0], &[-1.0, -1.0]]
        );
        assert_eq!(
            leader_set_matrix(3).unwrap()[0].as_slice(),
            &[0.0, -1.0, -1.0]
        );
        assert!(leader_set_matrix(1).is_err());
    }

    #[test]
    fn leader_set_structure() {
        for n in 2..=40 {
            let cols = leader_set_matrix(n).unwrap();
            assert_eq!(cols.len(), 2 * n);
            let mut totals = vec![0.0; n];
            for (c, g) in cols.iter().enumerate() {
                assert!(g.as_slice().iter().all(|&x| x == 0.0 || x == -1.0));
                let zeros = g.as_slice().iter().filter(|&&x| x == 0.0).count();
                let m = c / 2 + 1;
                if c % 2 == 0 {
                    assert_eq!(zeros, 1);
                } else {
                    assert_eq!(zeros, n - m);
                }
                for (acc, &x) in totals.iter_mut().zip(g.as_slice()) {
                    *acc += x;
                }
            }
            assert_eq!(totals[n - 1], -(n as f64));
            assert!(totals[..n - 1].iter().all(|&x| x < -(n as f64)));
        }
    }

    #[test]
    fn leader_set_needs_matching_horizon() {
        let mut spec = AdversarySpec::leader_set(4);
        spec.horizon = 7;
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidConfig {
                field: "horizon",
                ..
            })
        ));
    }

    #[test]
    fn iid_payoffs_are_deterministic_and_centered() {
        let a = iid_uniform_payoffs(&mut EpisodeRng::seed_from_u64(5), 3, 100);
        let b = iid_uniform_payoffs(&mut EpisodeRng::seed_from_u64(5), 3, 100);
        assert_eq!(a, b);
        let big = iid_uniform_payoffs(&mut EpisodeRng::seed_from_u64(6), 3, 10_000);
        let entries: Vec<f64> = big
            .iter()
            .flat_map(|g| g.as_slice().iter().copied())
            .collect();
        assert!(entries.iter().all(|x| (-1.0..=1.0).contains(x)));
        let mean = entries.iter().sum::<f64>() / entries.len() as f64;
        assert!(mean.abs() <= 3.0 * (2.0 / 12f64.sqrt()) / 100.0, "{mean}");
        let tern = iid_ternary_payoffs(&mut EpisodeRng::seed_from_u64(6), 3, 200);
        assert!(tern.iter().all(PayoffVector::is_ternary));
    }

    #[test]
    fn oblivious_kinds_ignore_history() {
        let specs = [
            AdversarySpec::fixed(vec![PayoffVector::new(vec![0.25, -1.0]).unwrap(); 4]).unwrap(),
            AdversarySpec::iid_uniform(2, 4),
            AdversarySpec::iid_ternary(2, 4),
            AdversarySpec::leader_set(2),
        ];
        for spec in specs {
            let adv = Adversary::new(spec).unwrap();
            for t in 1..=4 {
                let a = adv
                    .next_payoff(
                        t,
                        &vec![s(1); t - 1],
                        &mut EpisodeRng::seed_from_u64(t as u64),
                    )
                    .unwrap();
                let b = adv
                    .next_payoff(
                        t,
                        &vec![s(2); t - 1],
                        &mut EpisodeRng::seed_from_u64(t as u64),
                    )
                    .unwrap();
                assert_eq!(a, b);
            }
        }
    }
}
