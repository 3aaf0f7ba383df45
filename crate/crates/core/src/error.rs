// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown point label `{0}`")]
    UnknownPoint(String),

    #[error("point index {index} out of range for a space with {len} points")]
    PointOutOfRange { index: usize, len: usize },

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid net: {0}")]
    InvalidNet(String),

    #[error("size overflow: {points} points exceeds the cap of {cap}")]
    SizeOverflow { points: usize, cap: usize },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("base space is not csb; cauchy structures need a csb-space")]
    NotCsb,

    #[error("halving condition unmet for radius {radius}")]
    HalvingUnmet { radius: usize },

    #[error("entourage axiom violated: {0}")]
    EntourageAxiom(String),

    #[error("oracle precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("modulus violation: {0}")]
    ModulusViolation(String),

    #[error("encoding mismatch: {0}")]
    EncodingMismatch(String),

    #[error("convergence not established: {0}")]
    ConvergenceNotEstablished(String),

    #[error("measure error: {0}")]
    Measure(String),

    #[error("tag {tag} lies outside its block")]
    TagOutsideBlock { tag: String },

    #[error("block {0} is not measurable in the atom algebra")]
    NonMeasurable(String),

    #[error("refinement rule not defined for block {0}")]
    NoRefinementRule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
