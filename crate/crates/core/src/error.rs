//! Error contract. Classification refuses rather than guesses: a rank triple
//! outside the nine-row table surfaces as `Ambiguous`, and a mismatch between
//! the two independent classifiers surfaces as `Disagreement`, both carrying
//! the numbers needed to see how close the call was.

use crate::classify::{ClassificationReport, DecisionMargin};

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An input contained NaN or infinite entries.
    #[error("invalid input: non-finite entry")]
    InvalidInput,

    /// Dimensions do not line up (wrong amplitude count, non-square matrix, ...).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A structurally invalid state, e.g. the zero vector.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A rejection sampler ran out of attempts.
    #[error("sampling failed: {0}")]
    Sampling(String),

    /// The measured rank triple matches no class. The margins list every rank
    /// decision with its distance from the threshold.
    #[error("ambiguous classification: rank triple (rank R = {rank_r}, rank R^T R = {rank_rtr}, r1 = {r1}) matches no class")]
    Ambiguous {
        rank_r: usize,
        rank_rtr: usize,
        r1: usize,
        margins: Vec<DecisionMargin>,
    },

    /// The two classifiers produced different labels; both full reports are
    /// attached so the conflicting decisions can be inspected.
    #[error("classifier disagreement: rank table says {}, hyperdeterminant recursion says {}", by_ranks.class, by_hyperdets.class)]
    Disagreement {
        by_ranks: Box<ClassificationReport>,
        by_hyperdets: Box<ClassificationReport>,
    },
}
