use thiserror::Error;

use crate::cost::{CostClass, Strategy};

/// Crate-wide error type. Messages are prefixed with the subsystem that
/// rejected the input so CLI users can locate the offending key or file.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph: {0}")]
    Graph(String),

    #[error("graph: node {to} is unreachable from node {from}")]
    Disconnected { from: usize, to: usize },

    #[error("graph: no edges present, average weight undefined")]
    NoEdges,

    #[error("mobility: {0}")]
    Mobility(String),

    #[error("mobility: MAP {0} has zero outgoing handover rate (absorbing state)")]
    AbsorbingMap(usize),

    #[error("mobility: MAP-restricted chain is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("mobility: MAP-restricted chain is periodic (period {0}), power iteration cannot converge")]
    PeriodicChain(usize),

    #[error("mobility: power iteration did not reach residual {residual:e} within {iterations} iterations")]
    NonConvergent { iterations: usize, residual: f64 },

    #[error("mobility: lambda and mu are both zero, mobility ratio undefined")]
    UndefinedMobilityRatio,

    #[error("params: {0}")]
    Params(String),

    #[error("paging: {0}")]
    Paging(String),

    #[error("cost: {strategy} {component} term `{term}` = {value} is negative; violated structural assumption: {assumption}")]
    NegativeIntermediate {
        strategy: Strategy,
        component: CostClass,
        term: &'static str,
        value: f64,
        assumption: &'static str,
    },

    #[error("cost: strategy {strategy} requires input `{field}` which was not supplied")]
    MissingInput {
        strategy: Strategy,
        field: &'static str,
    },

    #[error("cost: unknown sweep parameter `{0}`")]
    UnknownSweepParameter(String),

    #[error("tracking: {0}")]
    Tracking(String),

    #[error("vho: {0}")]
    Vho(String),

    #[error("sim: {0}")]
    Sim(String),

    #[error("config: key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("config: {0}")]
    ConfigGeneral(String),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
