//! Arc-preserving subsequence matching for nested arc-annotated strings.
//!
//! [`engine::naps`] decides whether a pattern embeds in a text in
//! `O(nm)` time while holding `O(log n)` Γ sequences at once, optionally in
//! compressed form ([`succinct`]).

pub mod arcstr;
pub mod arctree;
pub mod engine;
pub mod fuzz;
pub mod gamma;
pub mod gen;
pub mod oracle;
pub mod records;
pub mod succinct;

pub use arcstr::{ArcAnnotatedString, ArcError, View, SENTINEL};
pub use arctree::{ArcTree, NodeId, TreeError};
pub use engine::{
    longest_prefix, naps, naps_observed, EngineConfig, EngineError, EngineStats, Mode, NapsResult,
    Observer,
};
pub use gamma::{GammaError, GammaRead, GammaSeq, Interval};
