//! Degree towers of quotient spaces over chordal spans.
//!
//! On a strand (or circle) support, every internal vertex of a diagram can
//! be traded for a commutator of legs, so the quotient by IHX and STU is
//! already presented on the span of diagrams with **at most one** internal
//! vertex: the solitary-vertex keys are pivoted out by their own STU rows,
//! and what remains of those rows is exactly the induced four-term relations
//! among chord-only diagrams. (That this loses nothing against the full span
//! is the classical elimination argument for diagram algebras on 1-manifold
//! supports; the dual-route dimension tests exercise it.) Chordal spans are
//! much smaller than full vertex spans, which is what makes the degree-4
//! four-strand quotient tractable.
//!
//! A [`QuotientTower`] bundles one such quotient per degree `0..=cap`, so a
//! mixed-degree [`GradedSum`] or a coproduct [`PairSum`] can be projected in
//! one call. Towers are the workhorse behind series identities: two raw
//! sums represent the same class exactly when their towers of coordinates
//! agree.

use std::collections::BTreeMap;
use std::path::Path;

use ft_diagrams::{GradedSum, Key, PairSum, Q, Support};

use crate::quotient::QuotientSpace;
use crate::rows::{RelationKind, RowOptions};
use crate::span::{enumerate_with_vertices, DiagramSpan, SpanOptions};
use crate::Error;

/// The span of loop-free keys with at most one internal vertex.
pub fn chordal_span(support: &Support, degree: u32) -> Result<DiagramSpan, Error> {
    let opts = SpanOptions::default();
    let mut keys = enumerate_with_vertices(support, degree, 0, &opts)?;
    keys.extend(enumerate_with_vertices(support, degree, 1, &opts)?);
    keys.sort();
    Ok(DiagramSpan::from_keys(support.clone(), degree, false, keys))
}

/// The IHX+STU quotient presented on the chordal span, through the cache
/// directory when one is given.
pub fn chordal_quotient(
    support: &Support,
    degree: u32,
    cache_dir: Option<&Path>,
) -> Result<QuotientSpace, Error> {
    let span = chordal_span(support, degree)?;
    let kinds = [RelationKind::Ihx, RelationKind::Stu];
    match cache_dir {
        Some(dir) => {
            let (space, _) =
                QuotientSpace::build_cached(span, &kinds, &RowOptions::default(), dir)?;
            Ok(space)
        }
        None => QuotientSpace::build(span, &kinds),
    }
}

/// One quotient space per degree `0..=cap` on a fixed support.
#[derive(Debug, Clone)]
pub struct QuotientTower {
    pub support: Support,
    pub cap: u32,
    spaces: Vec<QuotientSpace>,
}

impl QuotientTower {
    /// Builds the chordal IHX+STU tower, reusing cache files when a
    /// directory is given.
    pub fn build(support: &Support, cap: u32, cache_dir: Option<&Path>) -> Result<Self, Error> {
        let spaces = (0..=cap)
            .map(|d| chordal_quotient(support, d, cache_dir))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QuotientTower { support: support.clone(), cap, spaces })
    }

    /// The degree-`d` floor.
    pub fn space(&self, d: u32) -> &QuotientSpace {
        &self.spaces[d as usize]
    }

    /// Projects every degree of `x` onto its quotient basis.
    pub fn project(&self, x: &GradedSum) -> Result<GradedSum, Error> {
        let mut out = GradedSum::zero(x.support.clone(), x.cap);
        for d in 0..=self.cap.min(x.cap) {
            let part = x.grade(d);
            if part.is_zero() {
                continue;
            }
            out = out.add(&self.spaces[d as usize].project(&part)?);
        }
        Ok(out)
    }

    /// True when every degree of `x` through the cap is the zero class.
    pub fn is_zero_class(&self, x: &GradedSum) -> Result<bool, Error> {
        for d in 0..=self.cap.min(x.cap) {
            let part = x.grade(d);
            if part.is_zero() {
                continue;
            }
            if !self.spaces[d as usize].is_zero_class(&part)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether two raw sums represent the same class degree-by-degree.
    pub fn classes_equal(&self, x: &GradedSum, y: &GradedSum) -> Result<bool, Error> {
        self.is_zero_class(&x.clone().sub(y))
    }

    /// Coordinates of one key in its degree's quotient basis, tagged by
    /// degree so pair projections can mix degrees.
    fn key_coords(&self, key: &Key) -> Result<(u32, Vec<Q>), Error> {
        let d = key.diagram().degree();
        if d > self.cap {
            return Err(Error::Solve(format!("degree {d} exceeds the tower cap {}", self.cap)));
        }
        let mut one = GradedSum::zero(self.support.clone(), self.cap);
        one.add_canonical(key.clone(), Q::from_integer(1.into()));
        Ok((d, self.spaces[d as usize].coords(&one)?))
    }

    /// Projects a coproduct-style pair sum to coordinates over
    /// (degree, basis index) ⊗ (degree, basis index), dropping terms whose
    /// total degree exceeds `total_cap` (a tensor square of a truncated
    /// series is only meaningful up to the truncation). Both tensor factors
    /// are reduced through this tower; the result is canonical, so two pair
    /// sums represent the same element of the quotient tensor square exactly
    /// when their maps agree.
    pub fn pair_coords(
        &self,
        x: &PairSum,
        total_cap: u32,
    ) -> Result<BTreeMap<(u32, usize, u32, usize), Q>, Error> {
        use num_traits::Zero;
        let mut out: BTreeMap<(u32, usize, u32, usize), Q> = BTreeMap::new();
        for ((l, r), c) in &x.terms {
            if l.diagram().degree() + r.diagram().degree() > total_cap {
                continue;
            }
            let (dl, ul) = self.key_coords(l)?;
            let (dr, ur) = self.key_coords(r)?;
            for (i, a) in ul.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in ur.iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let e = out.entry((dl, i, dr, j)).or_insert_with(Q::zero);
                    *e += c.clone() * a.clone() * b.clone();
                    if e.is_zero() {
                        out.remove(&(dl, i, dr, j));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Group-likeness in the quotient: coproduct(x) = x ⊗ x compared through
    /// [`Self::pair_coords`] up to the series cap.
    pub fn is_group_like_class(&self, x: &GradedSum) -> Result<bool, Error> {
        let cap = self.cap.min(x.cap);
        let cop = ft_diagrams::coproduct(x);
        let square = PairSum::tensor(x, x);
        Ok(self.pair_coords(&cop, cap)? == self.pair_coords(&square, cap)?)
    }
}

/// Degree tower of quotients by IHX, STU, *and* every diagram with at least
/// `min_verts` internal vertices — the zero classes are exactly the sums
/// whose IHX/STU class lies in the span of diagrams that deep in the
/// internal-vertex filtration. Spans are full (all vertex counts), loop-free.
#[derive(Debug, Clone)]
pub struct InternalFilter {
    pub support: Support,
    pub cap: u32,
    pub min_verts: usize,
    spaces: Vec<QuotientSpace>,
}

impl InternalFilter {
    pub fn build(support: &Support, cap: u32, min_verts: usize) -> Result<Self, Error> {
        use num_traits::One;
        let spaces = (0..=cap)
            .map(|d| {
                let span = crate::span::enumerate_diagrams(support, d, false, None)?;
                let extra: Vec<crate::solve::SparseRow> = span
                    .keys
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| k.diagram().internal_count() >= min_verts)
                    .map(|(i, _)| vec![(i as u32, Q::one())])
                    .collect();
                QuotientSpace::build_with_extra_rows(
                    span,
                    &[RelationKind::Ihx, RelationKind::Stu],
                    &RowOptions::default(),
                    extra,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InternalFilter { support: support.clone(), cap, min_verts, spaces })
    }

    /// True when `x`'s IHX/STU class has internal-vertex filtration at least
    /// `min_verts` in every degree through the cap.
    pub fn contains(&self, x: &GradedSum) -> Result<bool, Error> {
        for d in 0..=self.cap.min(x.cap) {
            let part = x.grade(d);
            if part.is_zero() {
                continue;
            }
            if !self.spaces[d as usize].is_zero_class(&part)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::{q, series_exp, stack_product, DiagramBuilder};

    fn chord(m: usize, a: usize, b: usize) -> GradedSum {
        let mut bld = DiagramBuilder::new(Support::strands(m));
        let (x, y) = bld.edge();
        bld.leg(a, x);
        bld.leg(b, y);
        GradedSum::from_diagram(&bld.finish(), 4)
    }

    #[test]
    fn two_strand_low_degrees_have_the_expected_dimensions() {
        // degree 0: the empty diagram. degree 1: the cross chord plus one
        // self-chord per strand (self-chords are nonzero here — no framing
        // relation is imposed). No relations exist below degree 2, so both
        // counts are plain enumerations.
        let tower = QuotientTower::build(&Support::strands(2), 1, None).unwrap();
        assert_eq!(tower.space(0).dim(), 1);
        assert_eq!(tower.space(1).dim(), 3);
    }

    #[test]
    fn four_term_relation_holds_and_distinct_commutators_survive() {
        let tower = QuotientTower::build(&Support::strands(3), 2, None).unwrap();
        let t12 = chord(3, 0, 1);
        let t23 = chord(3, 1, 2);
        let t13 = chord(3, 0, 2);
        let comm = stack_product(&t12, &t23).sub(&stack_product(&t23, &t12));
        assert!(!tower.is_zero_class(&comm).unwrap());
        // four-term relation: [t12, t13 + t23] = 0
        let sum = t13.clone().add(&t23);
        let ft = stack_product(&t12, &sum).sub(&stack_product(&sum, &t12));
        assert!(tower.is_zero_class(&ft).unwrap());
    }

    #[test]
    fn exponentials_of_chords_are_group_like_in_the_quotient() {
        let support = Support::strands(2);
        let one = GradedSum::one(support.clone(), 4);
        let z = series_exp(&chord(2, 0, 1).scale(&q(3)), &stack_product, one);
        let tower = QuotientTower::build(&support, 4, None).unwrap();
        assert!(tower.is_group_like_class(&z).unwrap());
        // and a non-group-like sum is rejected
        let bad = GradedSum::one(support.clone(), 4).add(&chord(2, 0, 1)).add(&chord(2, 0, 1));
        assert!(!tower.is_group_like_class(&bad).unwrap());
    }

    #[test]
    fn internal_filtration_membership_separates_chords_from_commutators() {
        let support = Support::strands(3);
        let filter = InternalFilter::build(&support, 2, 1).unwrap();

        // t23*t13 - t13*t23 is the class of a one-vertex diagram, so it lies
        // in the first internal filtration step; a bare chord does not.
        let t13 = chord(3, 0, 2);
        let t23 = chord(3, 1, 2);
        let comm = stack_product(&t23, &t13).sub(&stack_product(&t13, &t23));
        assert!(filter.contains(&comm).unwrap());
        assert!(!filter.contains(&t13).unwrap());

        // One internal vertex is all it has: it is not two vertices deep.
        let deeper = InternalFilter::build(&support, 2, 2).unwrap();
        assert!(!deeper.contains(&comm).unwrap());
    }

    #[test]
    fn commutator_of_chords_is_the_resolved_triple_point() {
        // the degree-2 class t23·t13 − t13·t23 equals the one-vertex key it
        // came from — the chordal quotient keeps solitary-vertex keys
        // expressible even though they are pivoted out of the basis
        let support = Support::strands(3);
        let t13 = chord(3, 0, 2);
        let t23 = chord(3, 1, 2);
        let comm = stack_product(&t23, &t13).sub(&stack_product(&t13, &t23));
        let mut b = DiagramBuilder::new(support.clone());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.leg(0, a0);
        b.leg(1, b0);
        b.leg(2, c0);
        b.vertex([a1, c1, b1]);
        let y = GradedSum::from_diagram(&b.finish(), 4);
        let tower = QuotientTower::build(&support, 2, None).unwrap();
        assert!(tower.classes_equal(&comm, &y).unwrap());
    }
}
