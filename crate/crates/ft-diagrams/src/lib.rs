//! Exact linear algebra of unitrivalent diagrams.
//!
//! A *diagram* is a dashed graph drawn on a support (oriented circles,
//! anchored arcs, or unordered marks): univalent ends attach to support
//! components as *legs*, internal vertices are trivalent with a cyclic
//! ordering, and vertex-free dashed loops are counted separately. The
//! *degree* of a diagram is half its total number of dashed-graph vertices.
//!
//! This crate provides the combinatorial core used by everything else:
//!
//! * [`Diagram`] / [`DiagramBuilder`] — the graphs themselves, with
//!   structural validation;
//! * [`canonical_form`] — a canonical key and antisymmetry sign for each
//!   isomorphism class, so sums never store two copies of one diagram (and
//!   diagrams that are antisymmetrically isomorphic to themselves are zero);
//! * [`GradedSum`] — finite rational sums of diagrams truncated at a degree
//!   cap, with the bialgebra operations ([`ops`]): disjoint and stacking
//!   products, connected sum, coproduct, doubling, orientation reversal, and
//!   the symmetrization map χ;
//! * [`text`] — a stable text form for diagrams, used by caches, fixtures
//!   and the command-line tools.
//!
//! Everything is exact: coefficients are arbitrary-precision rationals.

pub mod canon;
pub mod coeff;
pub mod diagram;
pub mod ops;
pub mod support;
pub mod sum;
pub mod text;

pub use canon::{canonical_form, Key};
pub use coeff::{format_frac, parse_frac, q, qr, Q};
pub use diagram::{Diagram, DiagramBuilder, EndId};
pub use ops::{
    chi_symmetrize, connected_sum, coproduct, delete_component, disjoint_product,
    double_component, is_group_like, is_i_near, relabel_component, reverse_orientation,
    stack_product,
};
pub use support::{Component, End, Kind, Support};
pub use sum::{series_exp, series_inverse, series_log, GradedSum, PairSum};
pub use text::{diagram_to_text, parse_diagram, parse_diagram_on};
