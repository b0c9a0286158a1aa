//! Framed Kontsevich integral of q-tangles over a rational even associator.
//!
//! The crate evaluates tangles presented as words of elementary slices —
//! crossings, local maxima (caps), local minima (cups) — into exact rational
//! chord-diagram series:
//!
//! * [`word`] — the tangle-word grammar, validation, built-in link fixtures,
//!   and word-level surgery (closure, component unlinking, reversal,
//!   doubling, pure-braid generators).
//! * [`cable`] — strand cabling, deletion, permutation, and embedding of
//!   diagram series, the coalgebra maps every slice composition needs.
//! * [`assoc`] — a rational even Drinfeld associator through degree 4,
//!   solved from the pentagon and hexagon equations and pinned degree by
//!   degree; cached to a fixture file with a content digest.
//! * [`engine`] — the slice-by-slice evaluator: crossings contribute
//!   exponentials of single chords conjugated into left-normed bracketing by
//!   associator cables, extrema contribute the per-maximum correction factor
//!   solved from the zigzag identity, and framing is restored from the
//!   blackboard writhe. Produces the framed invariant `zhat`, its
//!   normalization `z_check` (one correction factor per closed component),
//!   and the pure-braid evaluator.
//! * [`checks`] — quotient-level predicates used by tests and acceptance:
//!   filtration membership and group-likeness.
//!
//! All values are chord combinations: internal vertices are eliminated at
//! the source (associator, braid commutators) through the STU rewriting of
//! `ft-relations`, which every slice operation descends through.

pub mod assoc;
pub mod cable;
pub mod checks;
pub(crate) mod dk;
pub mod engine;
pub mod word;

pub use assoc::{solve_associator, Associator};
pub use cable::{cable_strands, delete_strand, inflate, permute_strands};
pub use checks::{group_like_raw, i_filter_at_least};
pub use engine::{stack_tangle_values, unknot_series, z_check, zhat, zhat_braid};
pub use word::{Gen, TangleWord};

/// Errors from parsing, validation, and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed tangle word text.
    Parse { line: usize, message: String },
    /// A word fails structural validation (position out of range, cup over
    /// mismatched symbols, conflicting labels, open strands where a link is
    /// required, ...).
    Word(String),
    /// The underlying diagram algebra failed (budget, unreducible term, ...).
    Algebra(ft_relations::Error),
    /// A fixture or cache file is unusable.
    Cache(String),
    /// A mathematical identity that must hold failed to verify.
    Check(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Parse { line, message } => write!(f, "line {line}: {message}"),
            Error::Word(s) => write!(f, "invalid tangle word: {s}"),
            Error::Algebra(e) => write!(f, "{e}"),
            Error::Cache(s) => write!(f, "cache error: {s}"),
            Error::Check(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<ft_relations::Error> for Error {
    fn from(e: ft_relations::Error) -> Self {
        Error::Algebra(e)
    }
}
