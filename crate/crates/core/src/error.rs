use thiserror::Error;

use crate::matching::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: expected n = {expected}, found n = {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid ordinal profile: {0}")]
    InvalidProfile(String),

    #[error("invalid utility profile: {0}")]
    InvalidUtility(String),

    #[error("agent {agent} assigns equal utility to alternatives {first} and {second}")]
    Tie {
        agent: usize,
        first: usize,
        second: usize,
    },

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("the two profiles are identical")]
    IdenticalProfiles,

    #[error("perturbation factor {value} at ({agent}, {alternative}) is below 1")]
    FactorBelowOne {
        agent: usize,
        alternative: usize,
        value: f64,
    },

    #[error(
        "zero utility in a ratio denominator ({side:?} side, agent {agent}, alternative {alternative}, profile {profile:?})"
    )]
    DivisionByZeroUtility {
        side: Side,
        profile: Vec<Vec<usize>>,
        agent: usize,
        alternative: usize,
    },

    #[error("market profile has no utilities for ordinal profile {0:?}")]
    MissingProfile(Vec<Vec<usize>>),

    #[error("market profile is inconsistent: U[R] does not rank like R for {0:?}")]
    InconsistentMarket(Vec<Vec<usize>>),

    #[error(
        "utility profile is not polarized: a = {}, a' = {}, x = {}, x' = {}",
        .0[0], .0[1], .0[2], .0[3]
    )]
    NotPolarized([usize; 4]),

    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("metric space is disconnected")]
    Disconnected,

    #[error("vertices {0} and {1} are at positive distance but embedded at the same point")]
    CoincidentPoints(usize, usize),

    #[error("placement does not realize the Condorcet profile: {0}")]
    NotCondorcet(String),

    #[error("space and placement do not represent the given profile")]
    RepresentationMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
