//! Structural predicates on diagram series: group-likeness up to the
//! truncation cap, and membership in the internal filtration.

use ft_diagrams::{coproduct, GradedSum, PairSum};
use ft_relations::InternalFilter;

use crate::Error;

/// Keep only the tensor terms of total degree ≤ cap.
fn truncate_pairs(p: &PairSum, cap: u32) -> PairSum {
    let mut out = PairSum::zero();
    for ((l, r), c) in &p.terms {
        if l.diagram().degree() + r.diagram().degree() <= cap {
            out.add(l.clone(), r.clone(), c.clone());
        }
    }
    out
}

/// Δz = z ⊗ z, compared on tensor terms of total degree within the cap.
///
/// A series truncated at degree n determines z ⊗ z only through total
/// degree n, so the raw comparison is restricted to where both sides are
/// fully known.
pub fn group_like_raw(z: &GradedSum) -> bool {
    truncate_pairs(&coproduct(z), z.cap) == truncate_pairs(&PairSum::tensor(z, z), z.cap)
}

/// Does `z` lie in the span of diagrams with at least `min_verts` internal
/// vertices, modulo AS, IHX, and STU?
pub fn i_filter_at_least(z: &GradedSum, min_verts: usize) -> Result<bool, Error> {
    let filter = InternalFilter::build(&z.support, z.cap, min_verts)?;
    Ok(filter.contains(z)?)
}
