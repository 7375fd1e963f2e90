//! Succinct storage: rank/select bit vectors and compressed Γ sequences.

mod codec;
mod rank_select;

use thiserror::Error;

use crate::gamma::GammaError;

pub use codec::{access, decode, encode, CompressedGamma};
pub use rank_select::{BitVector, BitView, RankSelect};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuccinctError {
    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("select({requested}) on a bit string with {ones} ones")]
    NotEnoughOnes { requested: usize, ones: usize },
    #[error("cannot encode: {0}")]
    InvalidSequence(#[source] GammaError),
    #[error("malformed encoding near bit {position}")]
    MalformedEncoding { position: usize },
    #[error("V has {0} bits but U has {1}")]
    LengthMismatch(usize, usize),
}
