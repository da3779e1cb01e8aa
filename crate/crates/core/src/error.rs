use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("payoff {value} is outside [-1, 1]")]
    PayoffOutOfRange { value: f64 },
    #[error("expected length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("strategy {strategy} is outside 1..={n}")]
    StrategyOutOfRange { strategy: usize, n: usize },
    #[error("player {player} is outside 1..={players}")]
    PlayerOutOfRange { player: usize, players: usize },
    #[error("opponent profile has {found} entries, expected {expected}")]
    ProfileArity { expected: usize, found: usize },
    #[error("alpha = {0} must lie strictly inside (0, 1)")]
    InvalidAlpha(f64),
    #[error("delta = {0} must lie in (0, 1]")]
    InvalidDelta(f64),
    #[error("horizon {horizon} is too small: {requirement}")]
    HorizonTooSmall {
        horizon: u64,
        requirement: &'static str,
    },
    #[error("{len} rounds exceeds the exact enumeration guard of {max}; use Monte Carlo instead")]
    EnumerationGuard { len: usize, max: usize },
    #[error("cannot break a tie over an empty candidate set")]
    EmptyCandidates,
    #[error("round {round} is even and needs the player's previous move")]
    MissingPreviousMove { round: usize },
    #[error("round {round} is outside 1..={horizon}")]
    RoundOutOfRange { round: usize, horizon: usize },
    #[error("sign stream holds {available} entries, {needed} needed")]
    StreamTooShort { needed: usize, available: usize },
    #[error("{field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
