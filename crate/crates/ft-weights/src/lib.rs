//! The sl₂ weight system on unitrivalent diagrams.
//!
//! A diagram with empty or circle support evaluates to an exact rational by
//! tensor contraction: internal vertices become structure constants
//! f(a,b,c) = ⟨[x_a,x_b], x_c⟩, dashed edges become the inverse of the
//! bilinear form, and the legs on each circle are traced in the fundamental
//! representation in cyclic order.
//!
//! **Normalization** (all golden values below are relative to this): the
//! bilinear form is the trace form of the fundamental (2-dimensional)
//! representation, ⟨x,y⟩ = tr(ρ(x)ρ(y)) on the basis H, E, F. Its inverse
//! is ½·H⊗H + E⊗F + F⊗E, so a single chord on one circle evaluates to the
//! fundamental trace of the quadratic Casimir, which is exactly **3**, and
//! a free dashed loop contributes a factor dim sl₂ = 3.
//!
//! The weight system kills AS and IHX relation vectors (antisymmetry and
//! Jacobi identity of the bracket), which makes it an independent oracle
//! for the sign conventions used by the relation generators.

use ft_diagrams::coeff::{q, qr, Q};
use ft_diagrams::{Diagram, EndId, GradedSum, Kind};
use num_traits::{One, Zero};

/// Basis indices: 0 = H, 1 = E, 2 = F.
const H: u8 = 0;
const E: u8 = 1;
const F: u8 = 2;

/// Fundamental representation, 2×2 rational matrices (row major).
fn rho(a: u8) -> [[i64; 2]; 2] {
    match a {
        H => [[1, 0], [0, -1]],
        E => [[0, 1], [0, 0]],
        F => [[0, 0], [1, 0]],
        _ => unreachable!(),
    }
}

/// [x_a, x_b] expanded in the basis: [H,E] = 2E, [H,F] = −2F, [E,F] = H.
fn bracket(a: u8, b: u8) -> [i64; 3] {
    let mut out = [0i64; 3];
    match (a, b) {
        (H, E) => out[E as usize] = 2,
        (E, H) => out[E as usize] = -2,
        (H, F) => out[F as usize] = -2,
        (F, H) => out[F as usize] = 2,
        (E, F) => out[H as usize] = 1,
        (F, E) => out[H as usize] = -1,
        _ => {}
    }
    out
}

/// Trace form ⟨x_a, x_b⟩ = tr(ρ(x_a)ρ(x_b)): ⟨H,H⟩ = 2, ⟨E,F⟩ = 1.
fn trace_form(a: u8, b: u8) -> i64 {
    match (a, b) {
        (H, H) => 2,
        (E, F) | (F, E) => 1,
        _ => 0,
    }
}

/// Structure constant f(a,b,c) = ⟨[x_a,x_b], x_c⟩ (cyclically invariant,
/// totally antisymmetric).
fn f(a: u8, b: u8, c: u8) -> i64 {
    let br = bracket(a, b);
    (0..3).map(|d| br[d as usize] * trace_form(d, c)).sum()
}

/// The inverse-form edge tensor as a list of (color at end 0, color at
/// end 1, coefficient): ½·H⊗H + E⊗F + F⊗E.
const EDGE_CHOICES: [(u8, u8); 3] = [(H, H), (E, F), (F, E)];
fn edge_coeff(choice: usize) -> Q {
    if choice == 0 {
        qr(1, 2)
    } else {
        Q::one()
    }
}

/// Evaluates the sl₂ weight of one diagram with empty or circle support.
pub fn weight_sl2(d: &Diagram) -> Result<Q, String> {
    for c in &d.support.components {
        if !matches!(c.kind, Kind::Circle) {
            return Err("sl2 weight is defined for empty or circle supports".into());
        }
    }
    let n_ends = d.mate.len();
    // Owner of each end: vertex index, or the circle leg it is.
    let mut vertex_of: Vec<Option<usize>> = vec![None; n_ends];
    for (vi, v) in d.verts.iter().enumerate() {
        for &e in v {
            vertex_of[e as usize] = Some(vi);
        }
    }
    // Edge list, ordered to complete vertices as early as possible:
    // vertex-vertex edges first (by lowest vertex), then leg edges.
    let mut edges: Vec<(EndId, EndId)> = (0..n_ends as EndId)
        .filter(|&e| e < d.mate[e as usize])
        .map(|e| (e, d.mate[e as usize]))
        .collect();
    edges.sort_by_key(|&(a, b)| {
        let va = vertex_of[a as usize];
        let vb = vertex_of[b as usize];
        match (va, vb) {
            (Some(x), Some(y)) => (0, x.min(y), x.max(y)),
            (Some(x), None) | (None, Some(x)) => (1, x, 0),
            (None, None) => (2, a as usize, b as usize),
        }
    });

    let mut color: Vec<u8> = vec![u8::MAX; n_ends];
    let mut total = Q::zero();
    contract(d, &edges, 0, &mut color, &vertex_of, Q::one(), &mut total);
    // Each free dashed loop is a closed inverse-form trace: dim sl₂ = 3.
    for _ in 0..d.loops {
        total *= q(3);
    }
    Ok(total)
}

fn contract(
    d: &Diagram,
    edges: &[(EndId, EndId)],
    at: usize,
    color: &mut Vec<u8>,
    vertex_of: &[Option<usize>],
    partial: Q,
    total: &mut Q,
) {
    if at == edges.len() {
        *total += partial * circle_traces(d, color);
        return;
    }
    let (x, y) = edges[at];
    // Distinct vertices touched by this edge (an edge may close one vertex
    // with both of its ends).
    let mut touched: [Option<usize>; 2] = [None, None];
    for end in [x, y] {
        if let Some(vi) = vertex_of[end as usize] {
            if touched[0] != Some(vi) {
                if touched[0].is_none() {
                    touched[0] = Some(vi);
                } else {
                    touched[1] = Some(vi);
                }
            }
        }
    }
    for (choice, &(a, b)) in EDGE_CHOICES.iter().enumerate() {
        color[x as usize] = a;
        color[y as usize] = b;
        let mut factor = edge_coeff(choice);
        let mut dead = false;
        for vi in touched.iter().flatten() {
            let v = d.verts[*vi];
            let cols = v.map(|e| color[e as usize]);
            if cols.iter().all(|&c| c != u8::MAX) {
                // fully colored: emit the structure-constant factor once
                let fv = f(cols[0], cols[1], cols[2]);
                if fv == 0 {
                    dead = true;
                    break;
                }
                factor *= q(fv);
            } else {
                // partially colored: duplicate colors already force f = 0
                let mut seen = [false; 3];
                for &c in cols.iter().filter(|&&c| c != u8::MAX) {
                    if seen[c as usize] {
                        dead = true;
                    }
                    seen[c as usize] = true;
                }
                if dead {
                    break;
                }
            }
        }
        if !dead {
            contract(d, edges, at + 1, color, vertex_of, partial.clone() * factor, total);
        }
    }
    color[x as usize] = u8::MAX;
    color[y as usize] = u8::MAX;
}

/// Product over circles of tr(ρ(c₁)⋯ρ(c_k)) in stored (flow) order; a bare
/// circle contributes tr(𝟙) = 2.
fn circle_traces(d: &Diagram, color: &[u8]) -> Q {
    let mut out = Q::one();
    for ends in &d.legs {
        let mut m = [[1i64, 0], [0, 1]];
        for &e in ends {
            let r = rho(color[e as usize]);
            let mut nm = [[0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    nm[i][j] = m[i][0] * r[0][j] + m[i][1] * r[1][j];
                }
            }
            m = nm;
        }
        out *= q(m[0][0] + m[1][1]);
    }
    out
}

/// Linear extension: degree-indexed vector of weights, length cap+1.
pub fn weight_graded(x: &GradedSum) -> Result<Vec<Q>, String> {
    let mut out = vec![Q::zero(); x.cap as usize + 1];
    for (k, c) in x.iter() {
        let d = k.diagram();
        out[d.degree() as usize] += c.clone() * weight_sl2(d)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::{DiagramBuilder, Support};

    fn theta() -> Diagram {
        let mut b = DiagramBuilder::new(Support::empty());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        b.finish()
    }

    #[test]
    fn structure_constants() {
        assert_eq!(f(H, E, F), 2);
        assert_eq!(f(E, F, H), 2); // cyclic
        assert_eq!(f(F, H, E), 2);
        assert_eq!(f(E, H, F), -2); // antisymmetric
        assert_eq!(f(H, H, E), 0);
        assert_eq!(f(E, E, F), 0);
    }

    #[test]
    fn empty_diagram_is_one() {
        let d = Diagram::empty(Support::empty());
        assert_eq!(weight_sl2(&d).unwrap(), q(1));
    }

    #[test]
    fn bare_circle_is_two() {
        let d = Diagram::empty(Support::circles(1));
        assert_eq!(weight_sl2(&d).unwrap(), q(2));
    }

    #[test]
    fn chord_is_casimir_trace_three() {
        // single chord on a circle = tr_fund(quadratic Casimir) = 3
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        assert_eq!(weight_sl2(&b.finish()).unwrap(), q(3));
    }

    #[test]
    fn theta_golden_value() {
        // Hand check: colorings are the 6 assignments of {H,E,F} to one
        // vertex (the other is forced by the edge tensor, swapping E↔F);
        // each contributes ½·f·(−f) = ½·(−4): total 6·(−2) = −12.
        assert_eq!(weight_sl2(&theta()).unwrap(), q(-12));
    }

    #[test]
    fn antisymmetry_flips_sign() {
        let mut b = DiagramBuilder::new(Support::empty());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, c1, b1]); // one vertex cyclically reflected
        assert_eq!(weight_sl2(&b.finish()).unwrap(), q(12));
    }

    #[test]
    fn multiplicative_on_disjoint_vacuum() {
        let t = theta();
        let offset = t.mate.len() as EndId;
        let mut verts = t.verts.clone();
        verts.extend(t.verts.iter().map(|v| v.map(|e| e + offset)));
        let mut mate = t.mate.clone();
        mate.extend(t.mate.iter().map(|&m| m + offset));
        let tt = Diagram { support: Support::empty(), legs: vec![], verts, mate, loops: 0 };
        assert_eq!(weight_sl2(&tt).unwrap(), q(144));
    }

    #[test]
    fn free_loop_factor_three() {
        let mut d = Diagram::empty(Support::circles(1));
        d.loops = 2;
        assert_eq!(weight_sl2(&d).unwrap(), q(2 * 9));
    }

    #[test]
    fn nested_and_crossed_double_chords() {
        // adjacent chords (legs a a b b): tr(C²)-type = (3/2)²·tr(𝟙) = 9/2
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        let (p, q_) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        b.leg(0, p);
        b.leg(0, q_);
        assert_eq!(weight_sl2(&b.finish()).unwrap(), qr(9, 2));

        // crossed chords (legs a b a b)
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        let (p, q_) = b.edge();
        b.leg(0, x);
        b.leg(0, p);
        b.leg(0, y);
        b.leg(0, q_);
        let crossed = weight_sl2(&b.finish()).unwrap();
        assert_ne!(crossed, qr(9, 2));
        assert!(!crossed.is_zero());
    }

    #[test]
    fn y_diagram_on_circle() {
        // 3 legs joined at one internal vertex: nonzero, degree 2
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        let (z0, z1) = b.edge();
        b.leg(0, x0);
        b.leg(0, y0);
        b.leg(0, z0);
        b.vertex([x1, y1, z1]);
        let w = weight_sl2(&b.finish()).unwrap();
        assert!(!w.is_zero());
    }

    #[test]
    fn strand_support_rejected() {
        let d = Diagram::empty(Support::strands(1));
        assert!(weight_sl2(&d).is_err());
    }

    #[test]
    fn graded_extension() {
        let one = GradedSum::one(Support::empty(), 3);
        let w = weight_graded(&one).unwrap();
        assert_eq!(w[0], q(1));
        assert!(w[1].is_zero());
        let th = GradedSum::from_diagram(&theta(), 3).scale(&q(5));
        let w = weight_graded(&th).unwrap();
        assert_eq!(w[1], q(-60));
    }
}
