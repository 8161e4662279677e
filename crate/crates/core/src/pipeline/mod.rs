//! Dense pairs, `l`-sequences, `m`-sequences, galaxy embedding, and the
//! find-a-copy-or-a-transitive-set loop built on them.

mod dense_pair;
mod embed;
mod find;
mod lseq;
mod mseq;
mod params;
mod sequences;
mod trace;

use num_bigint::BigInt;
use thiserror::Error;

use crate::orderings::OrderingError;
use crate::structure::{Embedding, StructureError};

pub use dense_pair::{dense_pair_or_h, dense_pair_bound, DensePair};
pub use embed::{embed_galaxy_or_transitive, EmbedConfig, Layout, LayoutBlock, DEFAULT_TUPLE_BUDGET};
pub use find::{
    color_tournament, default_threshold, find_transitive, Coloring, FindConfig, FindResult,
    Outcome, DEFAULT_COLOR_GUARD,
};
pub use lseq::{find_l_sequence, find_l_sequence_traced, lseq_constant};
pub use mseq::{l_to_m_sequence, Extractor};
pub use params::{params_for, PipelineParams};
pub use sequences::{
    check_l_sequence, check_m_sequence, is_smooth, smooth_filter, LSequence, MSequence,
    SequenceViolation,
};
pub use trace::{Trace, TraceRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("pattern is not a galaxy")]
    NotAGalaxy,
    #[error("pattern is not prime")]
    NotPrime,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("tournament has {n} vertices, needs at least {need}")]
    TooSmall { n: usize, need: BigInt },
    #[error("found a copy of the pattern")]
    FoundH(Embedding),
    #[error("extractor returned {got} vertices where {need} are needed")]
    ExtractorTooWeak { got: usize, need: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("construction fell short: {0}")]
    Shortfall(String),
    #[error("more than {0} center tuples")]
    BudgetExceeded(usize),
    #[error("output failed verification: {0}")]
    Verification(#[from] SequenceViolation),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Ordering(#[from] OrderingError),
}
