use thiserror::Error;

use crate::flux::RationalFlux;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator must be nonzero")]
    ZeroDenominator,

    #[error("{p} and {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },

    #[error("expected positive integers, got ({p}, {q})")]
    NonPositive { p: i64, q: i64 },

    #[error("gap index {j} outside 1..{q} for flux with denominator {q}")]
    GapIndex { j: i64, q: i64 },

    #[error("gap {j} of flux {flux} is closed and carries no label")]
    ClosedGap { flux: RationalFlux, j: i64 },

    #[error("zero flux has no Diophantine label and no dual model")]
    ZeroFlux,

    #[error("eigensolver did not converge at k = ({k1}, {k2})")]
    NoConvergence { k1: f64, k2: f64 },

    #[error("band {band} of flux {flux} is degenerate with a neighbour at k = ({k1}, {k2})")]
    DegenerateBand {
        flux: RationalFlux,
        band: usize,
        k1: f64,
        k2: f64,
    },

    #[error("Chern sum {value} is {residual} away from an integer; mesh too coarse")]
    MeshTooCoarse { value: f64, residual: f64 },

    #[error("gap not tracked: {0}")]
    GapNotTracked(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
