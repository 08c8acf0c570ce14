use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cost c[{index}] = {value} must be positive and finite")]
    InvalidCost { index: usize, value: f64 },

    #[error("the game needs at least 2 players, got {0}")]
    TooFewPlayers(usize),

    #[error("player index {index} out of range for {n} players")]
    PlayerOutOfRange { index: usize, n: usize },

    #[error("profile has {actual} entries but the game has {expected} players")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("probability p[{index}] = {value} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },

    #[error("support must not be empty")]
    EmptySupport,

    #[error("a mixed equilibrium needs a support of at least 2 players, got {0}")]
    SupportTooSmall(usize),

    #[error("support lists player {0} more than once")]
    DuplicateSupportIndex(usize),

    #[error("support enumeration is limited to {limit} players, got {n}")]
    TooManyPlayers { n: usize, limit: usize },

    #[error("invalid example-family parameters: {0}")]
    InvalidExampleFamily(String),

    #[error("invalid cost sequence parameters: {0}")]
    InvalidSequence(String),

    #[error("explicit cost list has {available} entries, cannot build {requested} players")]
    ExplicitTooShort { available: usize, requested: usize },

    #[error("Poisson mean {0} must be nonnegative and finite")]
    InvalidLambda(f64),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("{name} = {value} must be positive")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("n grid must be nonempty, strictly increasing and start at n >= 2")]
    InvalidGrid,

    #[error("no fully-mixed equilibrium exists at n = {0}")]
    FmneMissing(usize),

    #[error("estimated Poisson mean {0} is negative; the cost sequence is inconsistent at this n")]
    NegativeLambda(f64),

    #[error("number of trials must be at least 1")]
    ZeroTrials,
}
