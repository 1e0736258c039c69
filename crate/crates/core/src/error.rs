use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("belief has no particles")]
    EmptyBelief,
    #[error("belief weights are invalid: {0}")]
    InvalidWeights(&'static str),
    #[error("state {0} lies outside the state box")]
    StateOutOfBox(f64),
    #[error("index {index} out of range for {what} (size {size})")]
    InvalidIndex {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("bonus requested at depth {depth} which is not above the horizon {horizon}")]
    BonusBelowLeaf { depth: usize, horizon: usize },
    #[error("partition has no cells")]
    NoCells,
    #[error("invalid parameter ladder at level {level}: {reason}")]
    InvalidLadder { level: usize, reason: &'static str },
    #[error("invalid cell counts: {0}")]
    InvalidCounts(&'static str),
    #[error("observation has zero probability under the given belief and action")]
    ImpossibleObservation,
    #[error("exhaustive expansion needs {nodes} nodes, above the cap of {cap}")]
    OracleTooLarge { nodes: f64, cap: f64 },
    #[error("invalid tabular model: {0}")]
    InvalidModel(&'static str),
}

impl Error {
    /// Stable class name, used for CLI exit reporting.
    pub fn class(&self) -> &'static str {
        match self {
            Error::EmptyBelief => "EmptyBelief",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::StateOutOfBox(_) => "StateOutOfBox",
            Error::InvalidIndex { .. } => "InvalidIndex",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::BonusBelowLeaf { .. } => "BonusBelowLeaf",
            Error::NoCells => "NoCells",
            Error::InvalidLadder { .. } => "InvalidLadder",
            Error::InvalidCounts(_) => "InvalidCounts",
            Error::ImpossibleObservation => "ImpossibleObservation",
            Error::OracleTooLarge { .. } => "OracleTooLarge",
            Error::InvalidModel(_) => "InvalidModel",
        }
    }
}
