//! Structural maps on diagrams and their linear extensions: orientation
//! reversal, component doubling, coproduct, products, connected sum,
//! symmetrization, and support surgery helpers.

use num_traits::One;

use crate::coeff::{neg_one_pow, Q};
use crate::diagram::{Diagram, EndId};
use crate::support::{Component, End, Kind, Support};
use crate::sum::{GradedSum, PairSum};

/// Reverses the orientation of component `c`: flips the support flag,
/// rewrites stored leg order to follow the new flow, and multiplies every
/// term by (−1)^(legs on c).
pub fn reverse_orientation(x: &GradedSum, c: usize) -> GradedSum {
    assert!(c < x.support.len(), "no component {c}");
    let mut support = x.support.clone();
    support.components[c].reversed = !support.components[c].reversed;
    x.map_terms(support.clone(), x.cap, |d, coef, out| {
        let mut nd = d.clone();
        nd.support = support.clone();
        if matches!(nd.support.components[c].kind, Kind::Circle) {
            nd.legs[c].reverse();
        }
        // Paths keep geometric storage order; only the flow flag moves.
        let sign = neg_one_pow(d.legs[c].len() as u32);
        out.add_term(&nd, coef.clone() * sign);
    })
}

/// Doubles component `c` into two parallel copies (the copy is inserted
/// directly after `c`); every term with m legs on `c` expands into the 2^m
/// ways of lifting each leg to one of the copies, preserving leg order.
///
/// Supports: circles (copy gets a fresh label), standard strand supports and
/// marks (all components renumbered to position order, strand anchors
/// renumbered to stay contiguous).
pub fn double_component(x: &GradedSum, c: usize) -> GradedSum {
    assert!(c < x.support.len(), "no component {c}");
    let support = doubled_support(&x.support, c);
    x.map_terms(support.clone(), x.cap, |d, coef, out| {
        let m = d.legs[c].len();
        for mask in 0u64..(1 << m) {
            let mut legs: Vec<Vec<EndId>> = Vec::with_capacity(d.legs.len() + 1);
            for (ci, ends) in d.legs.iter().enumerate() {
                if ci == c {
                    let mut first = Vec::new();
                    let mut second = Vec::new();
                    for (j, &e) in ends.iter().enumerate() {
                        if mask >> j & 1 == 0 {
                            first.push(e);
                        } else {
                            second.push(e);
                        }
                    }
                    legs.push(first);
                    legs.push(second);
                } else {
                    legs.push(ends.clone());
                }
            }
            let nd = Diagram {
                support: support.clone(),
                legs,
                verts: d.verts.clone(),
                mate: d.mate.clone(),
                loops: d.loops,
            };
            out.add_term(&nd, coef.clone());
        }
    })
}

fn doubled_support(s: &Support, c: usize) -> Support {
    let mut components = Vec::with_capacity(s.len() + 1);
    match s.components[c].kind {
        Kind::Circle => {
            let fresh = s.components.iter().map(|x| x.label).max().unwrap_or(0) + 1;
            for (i, comp) in s.components.iter().enumerate() {
                components.push(*comp);
                if i == c {
                    components.push(Component { label: fresh, ..*comp });
                }
            }
        }
        Kind::Mark => {
            for (i, comp) in s.components.iter().enumerate() {
                components.push(*comp);
                if i == c {
                    components.push(*comp);
                }
            }
            for (i, comp) in components.iter_mut().enumerate() {
                comp.label = i as u32 + 1;
            }
        }
        Kind::Path { .. } => {
            // Standard strand support: Top(i) → Bot(i) in order.
            for (i, comp) in s.components.iter().enumerate() {
                assert!(
                    matches!(comp.kind, Kind::Path { from: End::Top(a), to: End::Bot(b) }
                        if a as usize == i && b as usize == i),
                    "doubling of non-standard arc supports is context-specific"
                );
            }
            for i in 0..=s.len() {
                // position i in the doubled support copies the original at
                // src(i): positions ≤ c map to themselves, c+1 is the copy.
                let src = if i <= c { i } else { i - 1 };
                components.push(Component {
                    kind: Kind::Path { from: End::Top(i as u16), to: End::Bot(i as u16) },
                    reversed: s.components[src].reversed,
                    label: i as u32 + 1,
                });
            }
        }
    }
    Support { components }
}

/// Restriction of a term to a subset of its dashed components (given by
/// vertex/edge membership), with loops assigned separately.
fn restrict(d: &Diagram, keep_end: &[bool], keep_vert: &[bool], loops: u32) -> Diagram {
    let mut map: Vec<u32> = vec![u32::MAX; d.mate.len()];
    let mut mate: Vec<u32> = Vec::new();
    for e in 0..d.mate.len() as EndId {
        let m = d.mate[e as usize];
        if e < m && keep_end[e as usize] {
            debug_assert!(keep_end[m as usize]);
            let a = mate.len() as u32;
            map[e as usize] = a;
            map[m as usize] = a + 1;
            mate.push(a + 1);
            mate.push(a);
        }
    }
    Diagram {
        support: d.support.clone(),
        legs: d
            .legs
            .iter()
            .map(|ends| {
                ends.iter().filter(|&&e| keep_end[e as usize]).map(|&e| map[e as usize]).collect()
            })
            .collect(),
        verts: d
            .verts
            .iter()
            .enumerate()
            .filter(|&(vi, _)| keep_vert[vi])
            .map(|(_, v)| [map[v[0] as usize], map[v[1] as usize], map[v[2] as usize]])
            .collect(),
        mate,
        loops,
    }
}

/// Coproduct: for each term, sum over subsets of connected dashed components
/// (loops distributed binomially); the left factor keeps the subset, the
/// right factor its complement, both on the original support.
pub fn coproduct(x: &GradedSum) -> PairSum {
    let mut out = PairSum::zero();
    for (k, c) in x.iter() {
        let d = k.diagram();
        let comps = d.dashed_components();
        let r = comps.len();
        assert!(r < 63, "too many dashed components");
        for mask in 0u64..(1 << r) {
            let mut keep_end_l = vec![false; d.mate.len()];
            let mut keep_vert_l = vec![false; d.verts.len()];
            let mut keep_end_r = vec![false; d.mate.len()];
            let mut keep_vert_r = vec![false; d.verts.len()];
            for (i, comp) in comps.iter().enumerate() {
                let (ke, kv) = if mask >> i & 1 == 1 {
                    (&mut keep_end_l, &mut keep_vert_l)
                } else {
                    (&mut keep_end_r, &mut keep_vert_r)
                };
                for &e in &comp.ends {
                    ke[e as usize] = true;
                }
                for &v in &comp.verts {
                    kv[v as usize] = true;
                }
            }
            for j in 0..=d.loops {
                let mult = binomial(d.loops, j);
                let left = restrict(d, &keep_end_l, &keep_vert_l, j);
                let right = restrict(d, &keep_end_r, &keep_vert_r, d.loops - j);
                let (kl, sl) = crate::canon::canonical_form(&left);
                let (kr, sr) = crate::canon::canonical_form(&right);
                if sl == 0 || sr == 0 {
                    continue;
                }
                let sign = Q::from_integer(((sl * sr) as i64).into());
                out.add(kl, kr, c.clone() * sign * mult);
            }
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> Q {
    let mut num = Q::one();
    for i in 0..k {
        num *= crate::coeff::qr((n - i) as i64, (i + 1) as i64);
    }
    num
}

/// Connected sum `x # y`: `y` (on a single circle) is transplanted into
/// component `c` of `x` immediately after `c`'s base point. Location
/// independence holds only modulo the quotient relations and is verified
/// there, not here.
pub fn connected_sum(x: &GradedSum, c: usize, y: &GradedSum) -> GradedSum {
    assert!(
        y.support.len() == 1 && matches!(y.support.components[0].kind, Kind::Circle),
        "connected sum takes a one-circle argument"
    );
    assert!(
        matches!(x.support.components[c].kind, Kind::Circle),
        "target component must be a circle"
    );
    let mut out = GradedSum::zero(x.support.clone(), x.cap);
    for (kx, cx) in x.iter() {
        for (ky, cy) in y.iter() {
            let dx = kx.diagram();
            let dy = ky.diagram();
            let offset = dx.mate.len() as EndId;
            let mut legs = dx.legs.clone();
            let mut yc0: Vec<EndId> = dy.legs[0].iter().map(|&e| e + offset).collect();
            yc0.extend_from_slice(&legs[c]);
            legs[c] = yc0;
            let mut verts = dx.verts.clone();
            verts.extend(dy.verts.iter().map(|v| [v[0] + offset, v[1] + offset, v[2] + offset]));
            let mut mate = dx.mate.clone();
            mate.extend(dy.mate.iter().map(|&m| m + offset));
            let nd = Diagram {
                support: x.support.clone(),
                legs,
                verts,
                mate,
                loops: dx.loops + dy.loops,
            };
            out.add_term(&nd, cx.clone() * cy.clone());
        }
    }
    out
}

/// Disjoint union of supports and values: `x ⊗ y`. Component labels of `y`
/// are shifted above `x`'s, and path anchors are shifted past `x`'s width.
pub fn disjoint_product(x: &GradedSum, y: &GradedSum) -> GradedSum {
    assert_eq!(x.cap, y.cap, "mismatched caps");
    let (top_w, bot_w) = boundary_width(&x.support);
    let label_shift = x.support.components.iter().map(|c| c.label).max().unwrap_or(0);
    let mut support = x.support.clone();
    for comp in &y.support.components {
        let mut comp = *comp;
        comp.label += label_shift;
        if let Kind::Path { from, to } = comp.kind {
            comp.kind = Kind::Path { from: shift_end(from, top_w, bot_w), to: shift_end(to, top_w, bot_w) };
        }
        support.components.push(comp);
    }
    let mut out = GradedSum::zero(support.clone(), x.cap);
    for (kx, cx) in x.iter() {
        for (ky, cy) in y.iter() {
            let dx = kx.diagram();
            let dy = ky.diagram();
            let offset = dx.mate.len() as EndId;
            let mut legs = dx.legs.clone();
            legs.extend(dy.legs.iter().map(|ends| ends.iter().map(|&e| e + offset).collect()));
            let mut verts = dx.verts.clone();
            verts.extend(dy.verts.iter().map(|v| [v[0] + offset, v[1] + offset, v[2] + offset]));
            let mut mate = dx.mate.clone();
            mate.extend(dy.mate.iter().map(|&m| m + offset));
            let nd =
                Diagram { support: support.clone(), legs, verts, mate, loops: dx.loops + dy.loops };
            out.add_term(&nd, cx.clone() * cy.clone());
        }
    }
    out
}

fn boundary_width(s: &Support) -> (u16, u16) {
    let mut top = 0;
    let mut bot = 0;
    for c in &s.components {
        if let Kind::Path { from, to } = c.kind {
            for e in [from, to] {
                match e {
                    End::Top(i) => top = top.max(i + 1),
                    End::Bot(i) => bot = bot.max(i + 1),
                }
            }
        }
    }
    (top, bot)
}

fn shift_end(e: End, top_w: u16, bot_w: u16) -> End {
    match e {
        End::Top(i) => End::Top(i + top_w),
        End::Bot(i) => End::Bot(i + bot_w),
    }
}

/// Stacking product on a common strand support: `x` placed on top of `y`;
/// legs of `x` precede legs of `y` on every strand.
pub fn stack_product(x: &GradedSum, y: &GradedSum) -> GradedSum {
    assert_eq!(x.support, y.support, "stacking needs identical strand supports");
    assert_eq!(x.cap, y.cap, "mismatched caps");
    assert!(x.support.all_paths(), "stacking is defined on strand supports");
    let cap = x.cap;
    let mut out = GradedSum::zero(x.support.clone(), cap);
    for (kx, cx) in x.iter() {
        let dx = kx.diagram();
        for (ky, cy) in y.iter() {
            let dy = ky.diagram();
            if dx.degree() + dy.degree() > cap {
                continue;
            }
            let offset = dx.mate.len() as EndId;
            let legs = dx
                .legs
                .iter()
                .zip(&dy.legs)
                .map(|(a, b)| {
                    let mut v = a.clone();
                    v.extend(b.iter().map(|&e| e + offset));
                    v
                })
                .collect();
            let mut verts = dx.verts.clone();
            verts.extend(dy.verts.iter().map(|v| [v[0] + offset, v[1] + offset, v[2] + offset]));
            let mut mate = dx.mate.clone();
            mate.extend(dy.mate.iter().map(|&m| m + offset));
            let nd = Diagram {
                support: x.support.clone(),
                legs,
                verts,
                mate,
                loops: dx.loops + dy.loops,
            };
            out.add_term(&nd, cx.clone() * cy.clone());
        }
    }
    out
}

/// Symmetrization χ: a character on m marks maps to the sum over all
/// k₁!⋯k_m! ways of ordering each mark's legs along the corresponding strand.
pub fn chi_symmetrize(x: &GradedSum) -> GradedSum {
    assert!(x.support.all_marks(), "χ takes marked characters");
    let m = x.support.len();
    let support = Support::strands(m);
    x.map_terms(support.clone(), x.cap, |d, coef, out| {
        use itertools::Itertools;
        let per_mark: Vec<Vec<Vec<EndId>>> = d
            .legs
            .iter()
            .map(|ends| {
                if ends.len() <= 1 {
                    vec![ends.clone()]
                } else {
                    ends.iter().copied().permutations(ends.len()).collect()
                }
            })
            .collect();
        let mut idx = vec![0usize; m];
        loop {
            let legs: Vec<Vec<EndId>> =
                (0..m).map(|i| per_mark[i][idx[i]].clone()).collect();
            let nd = Diagram {
                support: support.clone(),
                legs,
                verts: d.verts.clone(),
                mate: d.mate.clone(),
                loops: d.loops,
            };
            out.add_term(&nd, coef.clone());
            let mut pos = 0;
            loop {
                if pos == m {
                    return;
                }
                idx[pos] += 1;
                if idx[pos] < per_mark[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    })
}

/// True when every term has an internal vertex joined by a dashed edge to a
/// leg on component `c` (vacuously true for the zero sum).
pub fn is_i_near(x: &GradedSum, c: usize) -> bool {
    x.iter().all(|(k, _)| k.diagram().has_vertex_near(c))
}

/// Deletes component `c`: terms with legs on it are annihilated, the rest
/// keep their dashed graph on the smaller support.
pub fn delete_component(x: &GradedSum, c: usize) -> GradedSum {
    let mut support = x.support.clone();
    support.components.remove(c);
    let mut out = GradedSum::zero(support.clone(), x.cap);
    for (k, coef) in x.iter() {
        let d = k.diagram();
        if !d.legs[c].is_empty() {
            continue;
        }
        let mut legs = d.legs.clone();
        legs.remove(c);
        let nd = Diagram {
            support: support.clone(),
            legs,
            verts: d.verts.clone(),
            mate: d.mate.clone(),
            loops: d.loops,
        };
        out.add_term(&nd, coef.clone());
    }
    out
}

/// Rewrites component labels (support surgery helper).
pub fn relabel_component(x: &GradedSum, c: usize, label: u32) -> GradedSum {
    let mut support = x.support.clone();
    support.components[c].label = label;
    x.map_terms(support.clone(), x.cap, |d, coef, out| {
        let mut nd = d.clone();
        nd.support = support.clone();
        out.add_term(&nd, coef.clone());
    })
}

/// Group-likeness check: coproduct(x) = x ⊗ x.
pub fn is_group_like(x: &GradedSum) -> bool {
    coproduct(x) == PairSum::tensor(x, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;
    use crate::diagram::DiagramBuilder;

    fn one_leg_chord_to_second_circle() -> GradedSum {
        let mut b = DiagramBuilder::new(Support::circles(2));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        GradedSum::from_diagram(&b.finish(), 4)
    }

    #[test]
    fn reversal_sign_and_involution() {
        let s = one_leg_chord_to_second_circle();
        let r = reverse_orientation(&s, 0);
        assert_eq!(r.iter().next().unwrap().1, &q(-1));
        let rr = reverse_orientation(&r, 0);
        assert_eq!(rr, s);
    }

    #[test]
    fn reversal_of_legless_component_is_trivial() {
        let s = GradedSum::one(Support::circles(1), 4);
        let r = reverse_orientation(&s, 0);
        assert_eq!(r.iter().next().unwrap().1, &q(1));
    }

    #[test]
    fn doubling_counts() {
        let s = one_leg_chord_to_second_circle();
        assert_eq!(double_component(&s, 0).len(), 2);
        // 0 legs on the doubled component:
        assert_eq!(double_component(&s, 1).support.len(), 3);
        let no_legs = GradedSum::one(Support::circles(1), 4);
        assert_eq!(double_component(&no_legs, 0).len(), 1);
    }

    #[test]
    fn doubling_three_legs_gives_eight() {
        let mut b = DiagramBuilder::new(Support::circles(2));
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.leg(0, a0);
        b.leg(0, b0);
        b.leg(0, c0);
        b.leg(1, a1);
        b.leg(1, b1);
        b.leg(1, c1);
        let s = GradedSum::from_diagram(&b.finish(), 4);
        let doubled = double_component(&s, 0);
        let total: Q = doubled.iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, q(8)); // 2^3 lifts (some terms may merge)
    }

    #[test]
    fn coproduct_of_connected_graph() {
        // chord on a circle: Δ(ξ) = ξ⊗1 + 1⊗ξ
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        let s = GradedSum::from_diagram(&b.finish(), 4);
        let cop = coproduct(&s);
        assert_eq!(cop.terms.len(), 2);
        assert_eq!(cop, cop.swapped()); // cocommutative here
    }

    #[test]
    fn coproduct_two_components_four_terms() {
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        let (p, q_) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        b.leg(0, p);
        b.leg(0, q_);
        let s = GradedSum::from_diagram(&b.finish(), 4);
        // two side-by-side chords: D⊗1 + 1⊗D + 2·(chord⊗chord)
        let cop = coproduct(&s);
        assert_eq!(cop.terms.len(), 3);
        assert!(cop.terms.values().any(|c| *c == q(2)));
    }

    #[test]
    fn connected_sum_with_unit() {
        let s = one_leg_chord_to_second_circle();
        let unit = GradedSum::one(Support::circles(1), 4);
        assert_eq!(connected_sum(&s, 0, &unit), s);
        // 1 # ξ′ transplants ξ′
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        let xi = GradedSum::from_diagram(&b.finish(), 4);
        let ambient = GradedSum::one(Support::circles(2), 4);
        let glued = connected_sum(&ambient, 1, &xi);
        assert_eq!(glued.len(), 1);
        assert_eq!(glued.iter().next().unwrap().0.diagram().legs[1].len(), 2);
    }

    #[test]
    fn disjoint_product_commutative_on_closed_graphs() {
        let theta = {
            let mut b = DiagramBuilder::new(Support::empty());
            let (a0, a1) = b.edge();
            let (b0, b1) = b.edge();
            let (c0, c1) = b.edge();
            b.vertex([a0, b0, c0]);
            b.vertex([a1, b1, c1]);
            GradedSum::from_diagram(&b.finish(), 4)
        };
        let one = GradedSum::one(Support::empty(), 4);
        assert_eq!(disjoint_product(&theta, &one), theta);
        let t2 = disjoint_product(&theta, &theta);
        assert_eq!(t2.len(), 1);
        assert_eq!(t2.iter().next().unwrap().0.diagram().internal_count(), 4);
        assert_eq!(disjoint_product(&theta, &t2), disjoint_product(&t2, &theta));
    }

    #[test]
    fn stack_product_unit_and_degree() {
        let mut b = DiagramBuilder::new(Support::strands(2));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        let chord = GradedSum::from_diagram(&b.finish(), 4);
        let one = GradedSum::one(Support::strands(2), 4);
        assert_eq!(stack_product(&one, &chord), chord);
        assert_eq!(stack_product(&chord, &one), chord);
        let sq = stack_product(&chord, &chord);
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.iter().next().unwrap().0.diagram().degree(), 2);
    }

    #[test]
    fn stacking_order_matters_for_mixed_chords() {
        // chord(1,2) stacked on chord(1,3) differs from the reverse order
        let chord = |a: usize, b_: usize| {
            let mut b = DiagramBuilder::new(Support::strands(3));
            let (x, y) = b.edge();
            b.leg(a, x);
            b.leg(b_, y);
            GradedSum::from_diagram(&b.finish(), 4)
        };
        let ab = stack_product(&chord(0, 1), &chord(0, 2));
        let ba = stack_product(&chord(0, 2), &chord(0, 1));
        assert_ne!(ab, ba);
    }

    #[test]
    fn chi_counts() {
        // k1 = 1: single placement
        let mut b = DiagramBuilder::new(Support::marks(2));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        let one_leg = GradedSum::from_diagram(&b.finish(), 4);
        assert_eq!(chi_symmetrize(&one_leg).len(), 1);

        // k1 = 2 with structurally distinct legs: 2 distinct terms
        let mut b = DiagramBuilder::new(Support::marks(3));
        let (x, y) = b.edge();
        let (p, q_) = b.edge();
        b.leg(0, x);
        b.leg(0, p);
        b.leg(1, y);
        b.leg(2, q_);
        let two_legs = GradedSum::from_diagram(&b.finish(), 4);
        let sym = chi_symmetrize(&two_legs);
        assert_eq!(sym.len(), 2);

        // empty character -> 1
        let empty = GradedSum::one(Support::marks(1), 4);
        let sym = chi_symmetrize(&empty);
        assert_eq!(sym.len(), 1);
        assert_eq!(sym.iter().next().unwrap().0.diagram().degree(), 0);
    }

    #[test]
    fn i_near() {
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.leg(0, a0);
        b.leg(0, b0);
        b.leg(0, c0);
        b.vertex([a1, b1, c1]);
        let y = GradedSum::from_diagram(&b.finish(), 4);
        assert!(is_i_near(&y, 0));
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (x, y_) = b.edge();
        b.leg(0, x);
        b.leg(0, y_);
        let chord = GradedSum::from_diagram(&b.finish(), 4);
        assert!(!is_i_near(&chord, 0));
        assert!(is_i_near(&GradedSum::zero(Support::strands(1), 4), 0));
    }

    #[test]
    fn deletion() {
        let s = one_leg_chord_to_second_circle();
        assert!(delete_component(&s, 0).is_zero());
        let unit2 = GradedSum::one(Support::circles(2), 4);
        let dropped = delete_component(&unit2, 0);
        assert_eq!(dropped.support.len(), 1);
        assert!(!dropped.is_zero());
    }
}
