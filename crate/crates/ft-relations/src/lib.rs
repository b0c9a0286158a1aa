//! Diagram-space enumeration, relation rows, and exact rational quotients.
//!
//! This crate turns the diagram combinatorics of `ft-diagrams` into linear
//! algebra: it enumerates every diagram of a given degree on a support
//! ([`enumerate_diagrams`], with an independent second algorithm in
//! [`enumerate_diagrams_alt`] used as a cross-check oracle), generates the
//! local relation rows (IHX, STU, and the three surgery-calculus relations:
//! under-legged annihilation, cut-and-repair pairing sums, and the free-loop
//! factor), and reduces them by exact sparse Gaussian elimination into a
//! [`QuotientSpace`] whose projection is idempotent and kills every relation.
//!
//! Antisymmetry is never materialized as rows: canonical forms already fold
//! it into signs, and diagrams with an odd self-symmetry are zero.
//!
//! On top of the quotient machinery sit two rewriting maps:
//! [`stu_eliminate`], which slides every internal vertex onto the support and
//! returns an STU-equivalent pure chord combination, and [`chi_inverse`],
//! which inverts the symmetrization map χ from marked characters to strand
//! diagrams degree by degree.
//!
//! Everything is exact over arbitrary-precision rationals; combinatorial
//! searches carry explicit budgets and fail with a resource error instead of
//! degrading.

pub mod chi;
pub mod quotient;
pub mod rows;
pub mod saturate;
pub mod solve;
pub mod span;
pub mod stu;
pub mod tower;

pub use chi::chi_inverse;
pub use quotient::QuotientSpace;
pub use rows::{generate_relations, generate_relations_with, RelationKind, RelationSet, RowOptions};
pub use saturate::saturated_span;
pub use solve::{dense_rref, Eliminator, Projector, SparseRow};
pub use span::{
    enumerate_diagrams, enumerate_diagrams_alt, enumerate_full, enumerate_with_vertices,
    DiagramSpan, SpanOptions,
};
pub use stu::stu_eliminate;
pub use tower::{chordal_quotient, chordal_span, InternalFilter, QuotientTower};

/// Errors surfaced by enumeration, relation generation, and solving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A combinatorial search exceeded its configured ceiling.
    Budget(String),
    /// A relation row or projection input used a diagram outside the span.
    MissingKey { key: String, context: String },
    /// A term cannot be rewritten to chords (dashed part off the support).
    Unreducible(String),
    /// A linear system was inconsistent or rank-deficient where it must not be.
    Solve(String),
    /// Cache file errors (I/O or unparsable content).
    Cache(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Budget(s) => write!(f, "budget exceeded: {s}"),
            Error::MissingKey { key, context } => {
                write!(f, "diagram not in span ({context}): {key}")
            }
            Error::Unreducible(s) => write!(f, "not reducible to chords: {s}"),
            Error::Solve(s) => write!(f, "linear solve failed: {s}"),
            Error::Cache(s) => write!(f, "cache error: {s}"),
        }
    }
}

impl std::error::Error for Error {}
