//! Iterated STU resolution: rewriting a sum on circles and arcs into chord
//! diagrams (no internal vertices).
//!
//! Each step removes one vertex: a term `c·D` with a vertex adjacent to a
//! leg becomes `c·T − c·U`, the two ways of sliding that vertex onto its
//! component. The vertex-count multiset strictly decreases (both new terms
//! carry one vertex fewer), so the rewrite terminates; a step budget guards
//! against pathological inputs anyway.
//!
//! The result is one specific chord representative of the input's class:
//! deterministic because terms are visited in canonical key order and the
//! resolution site is always the vertex hanging off the *last* leg (highest
//! component position, then highest leg position).

use ft_diagrams::{diagram_to_text, Diagram, GradedSum, Kind};

use crate::rows::{leg_position, owner_map, stu_resolve, stu_sites};
use crate::Error;

const STEP_BUDGET: u64 = 4_000_000;

/// Rewrites `x` into chord diagrams by resolving every internal vertex.
///
/// Fails with [`Error::Unreducible`] when a term has a dashed component
/// carrying vertices but no leg on a circle or arc (marks admit no STU
/// moves, and detached closed graphs have no legs at all).
pub fn stu_eliminate(x: &GradedSum) -> Result<GradedSum, Error> {
    for (k, _) in x.iter() {
        if let Some(term) = stuck_term(k.diagram()) {
            return Err(Error::Unreducible(term));
        }
    }
    let mut work = x.clone();
    let mut steps = 0u64;
    loop {
        let Some((key, coef)) = work
            .iter()
            .find(|(k, _)| k.diagram().internal_count() > 0)
            .map(|(k, c)| (k.clone(), c.clone()))
        else {
            return Ok(work);
        };
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(Error::Budget(format!(
                "STU resolution exceeded {STEP_BUDGET} steps"
            )));
        }
        let d = key.diagram();
        let (u, s) = stu_sites(d)
            .into_iter()
            .max_by_key(|&(u, s)| leg_position(d, d.mate[d.verts[u][s] as usize]))
            .expect("reducible term with no resolution site");
        let t = stu_resolve(d, u, s, false);
        let uu = stu_resolve(d, u, s, true);
        work.add_canonical(key, -coef.clone());
        work.add_term(&t, coef.clone());
        work.add_term(&uu, -coef);
    }
}

/// Fully chordal already?
pub fn is_chordal(x: &GradedSum) -> bool {
    x.iter().all(|(k, _)| k.diagram().internal_count() == 0)
}

/// If `d` has a dashed component with vertices but no leg on a circle or
/// arc, renders `d` for the error message.
fn stuck_term(d: &Diagram) -> Option<String> {
    let n = d.mate.len();
    if n == 0 {
        return None;
    }
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let union = |uf: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra != rb {
            uf[ra] = rb;
        }
    };
    for e in 0..n {
        union(&mut uf, e, d.mate[e] as usize);
    }
    for v in &d.verts {
        union(&mut uf, v[0] as usize, v[1] as usize);
        union(&mut uf, v[0] as usize, v[2] as usize);
    }
    let owner = owner_map(d);
    let mut has_vertex = vec![false; n];
    let mut touches = vec![false; n];
    for e in 0..n {
        let r = find(&mut uf, e);
        if owner[e].is_some() {
            has_vertex[r] = true;
        } else {
            let (c, _) = leg_position(d, e as u32);
            if matches!(d.support.components[c].kind, Kind::Circle | Kind::Path { .. }) {
                touches[r] = true;
            }
        }
    }
    (0..n)
        .any(|e| {
            let r = find(&mut uf, e);
            has_vertex[r] && !touches[r]
        })
        .then(|| diagram_to_text(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::{q, stack_product, DiagramBuilder, GradedSum, Support};

    fn chord(i: usize, j: usize) -> GradedSum {
        let mut b = DiagramBuilder::new(Support::strands(3));
        let (x, y) = b.edge();
        b.leg(i, x);
        b.leg(j, y);
        GradedSum::from_diagram(&b.finish(), 2)
    }

    /// the triple-point character: Y with one leg per strand, cyclic (1,3,2)
    fn r123() -> GradedSum {
        let mut b = DiagramBuilder::new(Support::strands(3));
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.leg(0, a0);
        b.leg(1, b0);
        b.leg(2, c0);
        b.vertex([a1, c1, b1]);
        GradedSum::from_diagram(&b.finish(), 2)
    }

    #[test]
    fn chordal_sums_pass_through() {
        let x = chord(0, 1).scale(&q(7)).add(&chord(1, 2).neg());
        assert!(is_chordal(&x));
        let out = stu_eliminate(&x).unwrap();
        assert!(out.sub(&x).is_zero());
    }

    #[test]
    fn triple_point_resolves_to_commutator_of_chords() {
        // r₁₂₃ ↦ r₂₃r₁₃ − r₁₃r₂₃ exactly (first stacking factor on top)
        let out = stu_eliminate(&r123()).unwrap();
        let expected = stack_product(&chord(1, 2), &chord(0, 2))
            .sub(&stack_product(&chord(0, 2), &chord(1, 2)));
        assert!(!out.is_zero());
        assert!(out.sub(&expected).is_zero());
        // linear: coefficients ride along
        let scaled = stu_eliminate(&r123().scale(&q(-5))).unwrap();
        assert!(scaled.sub(&expected.scale(&q(-5))).is_zero());
    }

    #[test]
    fn y_on_one_strand_gives_two_chord_terms() {
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        let (z0, z1) = b.edge();
        b.leg(0, x0);
        b.leg(0, y0);
        b.leg(0, z0);
        b.vertex([x1, y1, z1]);
        let out = stu_eliminate(&GradedSum::from_diagram(&b.finish(), 2)).unwrap();
        assert!(is_chordal(&out));
        assert_eq!(out.len(), 2);
        let coefs: Vec<_> = out.iter().map(|(_, c)| c.clone()).collect();
        assert!(coefs.contains(&q(1)) && coefs.contains(&q(-1)));
    }

    #[test]
    fn detached_closed_graph_is_unreducible() {
        // θ next to a bare circle: vertices but no legs anywhere
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        let theta = GradedSum::from_diagram(&b.finish(), 3);
        match stu_eliminate(&theta) {
            Err(Error::Unreducible(term)) => assert!(!term.is_empty()),
            other => panic!("expected an unreducible error, got {other:?}"),
        }
    }

    #[test]
    fn mark_legs_admit_no_resolution() {
        // one leg per mark — all three legs on one mark would already be
        // zero by antisymmetry (swapping two legs of the vertex)
        let mut b = DiagramBuilder::new(Support::marks(3));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        let (z0, z1) = b.edge();
        b.leg(0, x0);
        b.leg(1, y0);
        b.leg(2, z0);
        b.vertex([x1, y1, z1]);
        let y = GradedSum::from_diagram(&b.finish(), 2);
        assert!(!y.is_zero());
        assert!(matches!(stu_eliminate(&y), Err(Error::Unreducible(_))));
    }
}
