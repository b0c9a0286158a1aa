//! Coalgebra operations on strand-supported diagram series.
//!
//! Cabling replaces each strand by a bundle of parallel copies and sums over
//! all lifts of each leg to one of the copies; legs landing on the same copy
//! keep their order along the source strand. Multiplicity zero is the counit
//! on that strand: terms touching it die and the strand disappears. These
//! are the maps that let an associator solved once on three strands act on
//! any bracketed bundle of tangle strands.

use ft_diagrams::{Diagram, DiagramBuilder, EndId, GradedSum, Support};

/// The single chord joining strands `a` and `b` of `m` (a self-chord with
/// its two legs in order when `a == b`), truncated at `cap`.
pub fn chord(m: usize, a: usize, b: usize, cap: u32) -> GradedSum {
    let mut bld = DiagramBuilder::new(Support::strands(m));
    let (x, y) = bld.edge();
    bld.leg(a, x);
    bld.leg(b, y);
    GradedSum::from_diagram(&bld.finish(), cap)
}

/// Replaces strand `i` by `mult[i]` parallel copies for every `i`, keeping
/// copy bundles in strand order.
pub fn cable_strands(z: &GradedSum, mult: &[usize]) -> GradedSum {
    let m = z.support.len();
    assert_eq!(mult.len(), m, "one multiplicity per strand");
    assert!(z.support.all_paths(), "cabling acts on strand supports");
    let total: usize = mult.iter().sum();
    let target = Support::strands(total);
    let mut offset = vec![0usize; m];
    for i in 1..m {
        offset[i] = offset[i - 1] + mult[i - 1];
    }
    let mut out = GradedSum::zero(target.clone(), z.cap);
    for (key, coeff) in z.iter() {
        let d = key.diagram();
        if (0..m).any(|i| mult[i] == 0 && !d.legs[i].is_empty()) {
            continue;
        }
        let flat: Vec<(usize, EndId)> = (0..m)
            .flat_map(|i| d.legs[i].iter().map(move |&e| (i, e)))
            .collect();
        let count: usize = flat.iter().map(|&(i, _)| mult[i]).product();
        for assignment in 0..count {
            let mut idx = assignment;
            let mut legs = vec![Vec::new(); total];
            for &(comp, end) in &flat {
                legs[offset[comp] + idx % mult[comp]].push(end);
                idx /= mult[comp];
            }
            let lifted = Diagram {
                support: target.clone(),
                legs,
                verts: d.verts.clone(),
                mate: d.mate.clone(),
                loops: d.loops,
            };
            out.add_term(&lifted, coeff.clone());
        }
    }
    out
}

/// Relabels strand positions: the legs of strand `i` move to strand
/// `perm[i]`.
pub fn permute_strands(z: &GradedSum, perm: &[usize]) -> GradedSum {
    let m = z.support.len();
    assert_eq!(perm.len(), m, "one image per strand");
    assert!(z.support.all_paths(), "permutation acts on strand supports");
    let mut seen = vec![false; m];
    for &p in perm {
        assert!(p < m && !seen[p], "not a permutation");
        seen[p] = true;
    }
    let mut out = GradedSum::zero(z.support.clone(), z.cap);
    for (key, coeff) in z.iter() {
        let d = key.diagram();
        let mut legs = vec![Vec::new(); m];
        for i in 0..m {
            legs[perm[i]] = d.legs[i].clone();
        }
        let moved = Diagram {
            support: z.support.clone(),
            legs,
            verts: d.verts.clone(),
            mate: d.mate.clone(),
            loops: d.loops,
        };
        out.add_term(&moved, coeff.clone());
    }
    out
}

/// Embeds a series on `k` strands into `m` strands at position `offset`;
/// the added strands carry no legs.
pub fn inflate(z: &GradedSum, m: usize, offset: usize) -> GradedSum {
    let k = z.support.len();
    assert!(z.support.all_paths(), "inflation acts on strand supports");
    assert!(offset + k <= m, "embedded strands must fit");
    let target = Support::strands(m);
    let mut out = GradedSum::zero(target.clone(), z.cap);
    for (key, coeff) in z.iter() {
        let d = key.diagram();
        let mut legs = vec![Vec::new(); m];
        for i in 0..k {
            legs[offset + i] = d.legs[i].clone();
        }
        let wide = Diagram {
            support: target.clone(),
            legs,
            verts: d.verts.clone(),
            mate: d.mate.clone(),
            loops: d.loops,
        };
        out.add_term(&wide, coeff.clone());
    }
    out
}

/// The counit on strand `i`: terms with legs there die, the strand is
/// removed, and the rest renumber down.
pub fn delete_strand(z: &GradedSum, i: usize) -> GradedSum {
    let m = z.support.len();
    assert!(i < m, "no strand {i}");
    let mut mult = vec![1usize; m];
    mult[i] = 0;
    cable_strands(z, &mult)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::{q, qr, series_exp, stack_product};

    fn exp(x: &GradedSum) -> GradedSum {
        let one = GradedSum::one(x.support.clone(), x.cap);
        series_exp(x, &stack_product, one)
    }

    #[test]
    fn cabling_a_chord_distributes_its_legs() {
        let t = chord(2, 0, 1, 4);
        let doubled = cable_strands(&t, &[2, 1]);
        let want = chord(3, 0, 2, 4).add(&chord(3, 1, 2, 4));
        assert!(doubled.sub(&want).is_zero());
    }

    #[test]
    fn zero_multiplicity_is_the_counit() {
        let t = chord(2, 0, 1, 4);
        assert!(cable_strands(&t, &[0, 1]).is_zero());
        let s = chord(2, 1, 1, 4);
        let dropped = cable_strands(&s, &[0, 1]);
        assert!(dropped.sub(&chord(1, 0, 0, 4)).is_zero());
        let one = GradedSum::one(Support::strands(2), 4);
        let counit = cable_strands(&one, &[0, 1]);
        assert!(counit.sub(&GradedSum::one(Support::strands(1), 4)).is_zero());
    }

    #[test]
    fn deleting_an_untouched_strand_shrinks_the_support() {
        let t = chord(3, 0, 1, 4);
        let smaller = delete_strand(&t, 2);
        assert!(smaller.sub(&chord(2, 0, 1, 4)).is_zero());
        // round-trip through an embedding
        let back = delete_strand(&inflate(&chord(2, 0, 1, 4), 3, 0), 2);
        assert!(back.sub(&chord(2, 0, 1, 4)).is_zero());
    }

    #[test]
    fn permutation_relabels_chord_endpoints() {
        let t = chord(3, 0, 1, 4);
        let moved = permute_strands(&t, &[2, 0, 1]);
        assert!(moved.sub(&chord(3, 0, 2, 4)).is_zero());
    }

    #[test]
    fn cabling_is_an_algebra_homomorphism() {
        // on products of non-commuting factors ...
        let t = chord(2, 0, 1, 4);
        let s = chord(2, 0, 0, 4);
        let prod = cable_strands(&stack_product(&t, &s), &[2, 1]);
        let split = stack_product(&cable_strands(&t, &[2, 1]), &cable_strands(&s, &[2, 1]));
        assert!(prod.sub(&split).is_zero());

        // ... hence on exponentials: the cabled chord exponential is the
        // exponential of the distributed chord sum
        let z = exp(&chord(2, 0, 1, 4).scale(&qr(1, 2)));
        let cabled = cable_strands(&z, &[2, 1]);
        let spread = chord(3, 0, 2, 4).add(&chord(3, 1, 2, 4)).scale(&qr(1, 2));
        assert!(cabled.sub(&exp(&spread)).is_zero());
    }

    #[test]
    fn doubling_a_self_chord_counts_all_four_lifts() {
        // each of the two legs picks a copy independently: one self-chord
        // per copy plus the cross chord from both mixed lifts
        let doubled = cable_strands(&chord(1, 0, 0, 4), &[2]);
        let want = chord(2, 0, 0, 4)
            .add(&chord(2, 1, 1, 4))
            .add(&chord(2, 0, 1, 4).scale(&q(2)));
        assert!(doubled.sub(&want).is_zero());
    }
}
