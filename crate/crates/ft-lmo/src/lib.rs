//! The LMO invariant of closed oriented 3-manifolds from surgery
//! presentations.
//!
//! A closed framed tangle word presents a 3-manifold by surgery on its
//! closure. This crate evaluates the framed Kontsevich integral of the
//! presentation and pushes it through the maps `ι_n`, which quotient the
//! diagram space on circles by the low-leg, re-pairing, and loop-value
//! relations and read the result off as a combination of closed trivalent
//! graphs. Normalizing by the inertia of the linking matrix yields the
//! degree-`n` invariant `Ω_n`, the assembled series `Ω`, and the variant
//! `Ω′` rescaled by the order of the first homology group.
//!
//! Everything is exact rational arithmetic. The committed working window
//! is `n = 1` on presentations with at most three components and `n = 2`
//! on knots; requests beyond it are refused rather than attempted.

pub mod iota;
pub mod omega;

pub use iota::{iota_n, iota_n_oracle, iota_substitute_component};
pub use omega::{
    distant_union, omega_n, omega_n_combination, omega_prime, omega_series, FormalCombination,
    LinkingData, OmegaValue, SurgeryPresentation,
};

/// Errors from presentations, the diagram algebra, and the invariant maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input is unusable: open components, a non-circle support, a leg
    /// count the substitution cannot eat, zero determinant where a rational
    /// homology sphere is required, or sizes beyond the committed window.
    Input(String),
    /// Evaluating the presentation's tangle word failed.
    Tangle(ft_kontsevich::Error),
    /// Span enumeration, relation generation, or projection failed.
    Algebra(ft_relations::Error),
    /// A structural identity that must hold failed to verify (module
    /// read-off inconsistent, unit normalization off, series unstable).
    Check(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::Input(s) => write!(f, "invalid input: {s}"),
            Error::Tangle(e) => write!(f, "{e}"),
            Error::Algebra(e) => write!(f, "{e}"),
            Error::Check(s) => write!(f, "verification failed: {s}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<ft_kontsevich::Error> for Error {
    fn from(e: ft_kontsevich::Error) -> Self {
        Error::Tangle(e)
    }
}

impl From<ft_relations::Error> for Error {
    fn from(e: ft_relations::Error) -> Self {
        Error::Algebra(e)
    }
}
