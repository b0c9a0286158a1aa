//! Relation-row generation.
//!
//! Every relation is materialized as a sparse rational combination of span
//! keys that is zero in the quotient. Antisymmetry never appears as a row:
//! canonical forms fold it into term signs and drop AS-zero diagrams, so all
//! other generators may freely discard terms whose canonical sign vanishes
//! (they are zero modulo AS, which every quotient includes).
//!
//! Sign conventions, pinned by the sl₂ weight-system oracle (weights kill
//! every IHX and STU row) and by the chord fixtures:
//!
//! * **IHX** at an internal edge e = (u, v): rotate each vertex so the shared
//!   edge comes first, u = (e, a, b), v = (ē, c, d). The row is
//!   `[u=(e,a,b), v=(ē,c,d)] + [u=(e,a,c), v=(ē,d,b)] + [u=(e,a,d), v=(ē,b,c)]`
//!   — the Jacobi identity ⟨[[a,b],c],d⟩ + ⟨[a,c],[d,b]⟩ + ⟨[a,d],[b,c]⟩ = 0
//!   written on cyclically-ordered vertices.
//! * **STU** at a vertex u = (e, a, b) whose edge e ends in a leg ℓ on a
//!   circle or arc: `[D] − [T] + [U]` where T replaces ℓ by the legs (a, b)
//!   in that order *along the component's flow* and U uses (b, a).
//! * **Under-legged** (`FewLegs(n)`): a key with a circle carrying fewer
//!   than 2n legs is itself a row (the key is zero).
//! * **Cut-and-repair** (`Pairings(k)`): choose k distinct dashed edges
//!   incident to one component's legs, cut each once, and re-join the 2k cut
//!   ends in all (2k−1)!! ways; the sum of the results (original included)
//!   is a row. Re-joining never creates a free loop (each cut half keeps its
//!   original attachment); tadpole terms drop as antisymmetry zeros.
//! * **Free-loop factor** (`LoopFactor(n)`): a key with a free dashed loop
//!   equals −2n times the key with the loop removed:
//!   `[key] + 2n·[key minus one loop]`.

use std::collections::BTreeSet;

use ft_diagrams::{q, Diagram, EndId, GradedSum, Kind};
use num_traits::One;

use crate::solve::{integer_normalize, SparseRow};
use crate::span::DiagramSpan;
use crate::Error;
use ft_diagrams::Q;

/// The relation families a quotient can be built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Ihx,
    Stu,
    /// Keys with a circle component carrying fewer than `2n` legs vanish.
    FewLegs(u32),
    /// Cut `k` leg-incident dashed edges and re-join all (2k−1)!! ways.
    Pairings(u32),
    /// A free dashed loop multiplies its diagram by `−2n`.
    LoopFactor(u32),
}

impl std::fmt::Display for RelationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelationKind::Ihx => write!(f, "ihx"),
            RelationKind::Stu => write!(f, "stu"),
            RelationKind::FewLegs(n) => write!(f, "fewlegs({n})"),
            RelationKind::Pairings(k) => write!(f, "pairings({k})"),
            RelationKind::LoopFactor(n) => write!(f, "loopfactor({n})"),
        }
    }
}

/// Knobs for row generation.
#[derive(Debug, Clone)]
pub struct RowOptions {
    /// Per-diagram ceiling on cut-and-repair windows; windows beyond it are
    /// dropped (the stabilization certificate doubles this and checks the
    /// quotient dimension is unchanged).
    pub window_budget: usize,
    /// Escalation: also cut arbitrary dashed edges, not only leg-incident
    /// ones (used by the stabilization certificate).
    pub arbitrary_windows: bool,
}

impl Default for RowOptions {
    fn default() -> Self {
        RowOptions { window_budget: 200_000, arbitrary_windows: false }
    }
}

/// Generated relation rows over a span's key indices.
#[derive(Debug, Clone)]
pub struct RelationSet {
    pub kinds: Vec<RelationKind>,
    pub rows: Vec<SparseRow>,
}

pub fn generate_relations(span: &DiagramSpan, kinds: &[RelationKind]) -> Result<RelationSet, Error> {
    generate_relations_with(span, kinds, &RowOptions::default())
}

pub fn generate_relations_with(
    span: &DiagramSpan,
    kinds: &[RelationKind],
    opts: &RowOptions,
) -> Result<RelationSet, Error> {
    let mut seen: BTreeSet<SparseRow> = BTreeSet::new();
    let mut rows: Vec<SparseRow> = Vec::new();
    for key in &span.keys {
        for kind in kinds {
            for sum in key_rows(key.diagram(), kind, opts) {
                let mut row: SparseRow = Vec::with_capacity(sum.len());
                for (k, c) in sum.iter() {
                    let col = span.index_of(k).ok_or_else(|| Error::MissingKey {
                        key: ft_diagrams::diagram_to_text(k.diagram()),
                        context: format!("{kind} row generated from a span key"),
                    })?;
                    row.push((col as u32, c.clone()));
                }
                row.sort_by_key(|e| e.0);
                integer_normalize(&mut row);
                if !row.is_empty() && seen.insert(row.clone()) {
                    rows.push(row);
                }
            }
        }
    }
    Ok(RelationSet { kinds: kinds.to_vec(), rows })
}

/// All relation rows of one family local to one diagram, as canonical sums.
pub fn key_rows(d: &Diagram, kind: &RelationKind, opts: &RowOptions) -> Vec<GradedSum> {
    match kind {
        RelationKind::Ihx => ihx_rows(d),
        RelationKind::Stu => stu_rows(d),
        RelationKind::FewLegs(n) => fewlegs_row(d, *n).into_iter().collect(),
        RelationKind::Pairings(k) => pairings_rows(d, *k as usize, opts),
        RelationKind::LoopFactor(n) => loopfactor_row(d, *n).into_iter().collect(),
    }
}

/// end → owning internal vertex, None for legs.
pub(crate) fn owner_map(d: &Diagram) -> Vec<Option<usize>> {
    let mut owner = vec![None; d.mate.len()];
    for (vi, v) in d.verts.iter().enumerate() {
        for &e in v {
            owner[e as usize] = Some(vi);
        }
    }
    owner
}

/// Rotates a cyclic slot triple so `e` comes first.
pub(crate) fn rotate3(v: [EndId; 3], e: EndId) -> [EndId; 3] {
    let p = v.iter().position(|&x| x == e).expect("end not in vertex");
    [v[p], v[(p + 1) % 3], v[(p + 2) % 3]]
}

fn ihx_rows(d: &Diagram) -> Vec<GradedSum> {
    let owner = owner_map(d);
    let degree = d.degree();
    let mut out = Vec::new();
    for e in 0..d.mate.len() as EndId {
        let f = d.mate[e as usize];
        if e >= f {
            continue;
        }
        let (Some(u), Some(v)) = (owner[e as usize], owner[f as usize]) else {
            continue;
        };
        if u == v {
            continue; // tadpole edge: the key is antisymmetry-zero anyway
        }
        let [_, a, b] = rotate3(d.verts[u], e);
        let [_, c, dd] = rotate3(d.verts[v], f);
        let mut h = d.clone();
        h.verts[u] = [e, a, c];
        h.verts[v] = [f, dd, b];
        let mut x = d.clone();
        x.verts[u] = [e, a, dd];
        x.verts[v] = [f, b, c];
        let mut row = GradedSum::zero(d.support.clone(), degree);
        row.add_term(d, Q::one());
        row.add_term(&h, Q::one());
        row.add_term(&x, Q::one());
        if !row.is_zero() {
            out.push(row);
        }
    }
    out
}

/// STU application sites: (vertex, slot) pairs whose slot-edge ends in a leg
/// on a circle or arc component.
pub(crate) fn stu_sites(d: &Diagram) -> Vec<(usize, usize)> {
    let owner = owner_map(d);
    let mut sites = Vec::new();
    for (vi, v) in d.verts.iter().enumerate() {
        for (si, &e) in v.iter().enumerate() {
            let m = d.mate[e as usize];
            if owner[m as usize].is_some() {
                continue;
            }
            let (c, _) = leg_position(d, m);
            if matches!(d.support.components[c].kind, Kind::Circle | Kind::Path { .. }) {
                sites.push((vi, si));
            }
        }
    }
    sites
}

/// (component, position) of a leg end.
pub(crate) fn leg_position(d: &Diagram, end: EndId) -> (usize, usize) {
    for (c, ends) in d.legs.iter().enumerate() {
        if let Some(p) = ends.iter().position(|&x| x == end) {
            return (c, p);
        }
    }
    panic!("end {end} is not a leg");
}

/// Resolves the STU site (u, slot): removes the vertex's edge to its leg and
/// attaches the two remaining edges as legs in its place — in flow order for
/// `swap = false` (the T term), reversed for `swap = true` (the U term).
pub(crate) fn stu_resolve(d: &Diagram, u: usize, slot: usize, swap: bool) -> Diagram {
    let e = d.verts[u][slot];
    let l = d.mate[e as usize];
    let (c, p) = leg_position(d, l);
    let [_, a, b] = rotate3(d.verts[u], e);
    debug_assert!(
        d.mate[a as usize] != b,
        "resolving a vertex whose other edges form a tadpole"
    );
    // stored leg order equals flow order except on reversed arcs
    let comp = d.support.components[c];
    let reversed_arc = matches!(comp.kind, Kind::Path { .. }) && comp.reversed;
    let (first, second) = if swap ^ reversed_arc { (b, a) } else { (a, b) };

    // drop ends e and l, renumber the rest
    let gone = [e.min(l), e.max(l)];
    let renum = |x: EndId| -> EndId { x - gone.iter().filter(|&&g| g < x).count() as EndId };
    let mut legs = d.legs.clone();
    legs[c].splice(p..=p, [first, second]);
    let legs: Vec<Vec<EndId>> =
        legs.into_iter().map(|ends| ends.into_iter().map(renum).collect()).collect();
    let verts: Vec<[EndId; 3]> = d
        .verts
        .iter()
        .enumerate()
        .filter(|&(vi, _)| vi != u)
        .map(|(_, v)| v.map(renum))
        .collect();
    let mut mate = vec![0 as EndId; d.mate.len() - 2];
    for x in 0..d.mate.len() as EndId {
        if x == e || x == l {
            continue;
        }
        mate[renum(x) as usize] = renum(d.mate[x as usize]);
    }
    let out = Diagram { support: d.support.clone(), legs, verts, mate, loops: d.loops };
    debug_assert!(out.check().is_ok(), "{:?}", out.check());
    out
}

fn stu_rows(d: &Diagram) -> Vec<GradedSum> {
    let degree = d.degree();
    stu_sites(d)
        .into_iter()
        .map(|(u, s)| {
            let t = stu_resolve(d, u, s, false);
            let uu = stu_resolve(d, u, s, true);
            let mut row = GradedSum::zero(d.support.clone(), degree);
            row.add_term(d, Q::one());
            row.add_term(&t, -Q::one());
            row.add_term(&uu, Q::one());
            row
        })
        .filter(|r| !r.is_zero())
        .collect()
}

fn fewlegs_row(d: &Diagram, n: u32) -> Option<GradedSum> {
    let under = d
        .support
        .components
        .iter()
        .zip(&d.legs)
        .any(|(c, ends)| matches!(c.kind, Kind::Circle) && ends.len() < 2 * n as usize);
    if !under {
        return None;
    }
    let mut row = GradedSum::zero(d.support.clone(), d.degree());
    row.add_term(d, Q::one());
    Some(row)
}

fn loopfactor_row(d: &Diagram, n: u32) -> Option<GradedSum> {
    if d.loops == 0 {
        return None;
    }
    let mut fewer = d.clone();
    fewer.loops -= 1;
    let mut row = GradedSum::zero(d.support.clone(), d.degree());
    row.add_term(d, Q::one());
    row.add_term(&fewer, q(2 * n as i64));
    Some(row)
}

fn pairings_rows(d: &Diagram, cuts: usize, opts: &RowOptions) -> Vec<GradedSum> {
    if cuts == 0 {
        return Vec::new();
    }
    let owner = owner_map(d);
    // dashed edges as (low end, high end)
    let edges: Vec<(EndId, EndId)> = (0..d.mate.len() as EndId)
        .filter(|&e| e < d.mate[e as usize])
        .map(|e| (e, d.mate[e as usize]))
        .collect();
    let is_leg = |e: EndId| owner[e as usize].is_none();
    // candidate windows: k-subsets of the edges incident to one component's
    // legs (optionally of all edges), deduplicated, in lexicographic order
    let mut windows: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut pools: Vec<Vec<usize>> = Vec::new();
    for ends in &d.legs {
        let leg_set: BTreeSet<EndId> = ends.iter().copied().collect();
        let pool: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, &(x, y))| {
                (is_leg(x) && leg_set.contains(&x)) || (is_leg(y) && leg_set.contains(&y))
            })
            .map(|(i, _)| i)
            .collect();
        pools.push(pool);
    }
    if opts.arbitrary_windows {
        pools.push((0..edges.len()).collect());
    }
    for pool in pools {
        let mut subset = Vec::new();
        k_subsets(&pool, cuts, 0, &mut subset, &mut |s| {
            windows.insert(s.to_vec());
        });
    }
    let mut out = Vec::new();
    for window in windows.into_iter().take(opts.window_budget) {
        let points: Vec<EndId> =
            window.iter().flat_map(|&i| [edges[i].0, edges[i].1]).collect();
        let mut row = GradedSum::zero(d.support.clone(), d.degree());
        let mut pairing = Vec::new();
        all_pairings(&points, &mut vec![false; points.len()], &mut pairing, &mut |pairs| {
            let mut rewired = d.clone();
            for &(x, y) in pairs {
                rewired.mate[x as usize] = y;
                rewired.mate[y as usize] = x;
            }
            row.add_term(&rewired, Q::one());
        });
        if !row.is_zero() {
            out.push(row);
        }
    }
    out
}

fn k_subsets(pool: &[usize], k: usize, from: usize, acc: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if acc.len() == k {
        emit(acc);
        return;
    }
    let need = k - acc.len();
    for i in from..pool.len() {
        if pool.len() - i < need {
            break;
        }
        acc.push(pool[i]);
        k_subsets(pool, k, i + 1, acc, emit);
        acc.pop();
    }
}

fn all_pairings(
    points: &[EndId],
    used: &mut Vec<bool>,
    acc: &mut Vec<(EndId, EndId)>,
    emit: &mut dyn FnMut(&[(EndId, EndId)]),
) {
    let Some(first) = used.iter().position(|&u| !u) else {
        emit(acc);
        return;
    };
    used[first] = true;
    for j in (first + 1)..points.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        acc.push((points[first], points[j]));
        all_pairings(points, used, acc, emit);
        acc.pop();
        used[j] = false;
    }
    used[first] = false;
}

/// The sum of all (2n−1)!! ways of pairing 2n marked points — the building
/// block of the cut-and-repair relation, exposed for the substitution-based
/// oracle (which replaces a circle's legs by all pairings directly).
pub fn pairing_count(points: usize) -> u64 {
    if points % 2 != 0 {
        return 0;
    }
    let mut out = 1u64;
    let mut k = points as u64;
    while k > 1 {
        out *= k - 1;
        k -= 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{enumerate_full, SpanOptions};
    use ft_diagrams::{DiagramBuilder, Support};
    use num_traits::Zero;

    /// weights kill every IHX and STU row: the sl₂ oracle that pins signs
    #[test]
    fn sl2_weights_kill_ihx_and_stu_rows() {
        let opts = RowOptions::default();
        let cases: Vec<(Support, u32)> = vec![
            (Support::empty(), 2),
            (Support::empty(), 3),
            (Support::circles(1), 2),
            (Support::circles(1), 3),
            (Support::circles(2), 2),
        ];
        let mut checked = 0;
        for (support, degree) in cases {
            let span = enumerate_full(&support, degree, false, &SpanOptions::default()).unwrap();
            for key in &span.keys {
                for kind in [RelationKind::Ihx, RelationKind::Stu] {
                    for row in key_rows(key.diagram(), &kind, &opts) {
                        let w = ft_weights::weight_graded(&row).unwrap();
                        assert!(
                            w.iter().all(|v| v.is_zero()),
                            "sl2 weight fails to kill a {kind} row of {}",
                            ft_diagrams::diagram_to_text(key.diagram())
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 50, "oracle exercised only {checked} rows");
    }

    #[test]
    fn stu_row_on_y_diagram_is_three_terms() {
        // Y on one strand: one vertex, three legs → 3 sites; each row is
        // [Y] − [chords T] + [chords U]
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        let (z0, z1) = b.edge();
        b.leg(0, x0);
        b.leg(0, y0);
        b.leg(0, z0);
        b.vertex([x1, y1, z1]);
        let y = b.finish();
        let rows = key_rows(&y, &RelationKind::Stu, &RowOptions::default());
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.len(), 3);
            let (vertex_terms, chord_terms): (Vec<_>, Vec<_>) =
                row.iter().partition(|(k, _)| k.diagram().verts.len() == 1);
            assert_eq!(vertex_terms.len(), 1);
            assert_eq!(chord_terms.len(), 2);
        }
    }

    #[test]
    fn fewlegs_rows_flag_underlegged_circles() {
        let span = enumerate_full(&Support::circles(1), 1, false, &SpanOptions::default())
            .unwrap();
        // degree 1 on a circle: chord (2 legs) survives FewLegs(1); the
        // detached θ (0 legs on the circle) does not
        let mut flagged = 0;
        for key in &span.keys {
            if let Some(row) = fewlegs_row(key.diagram(), 1) {
                assert_eq!(row.len(), 1);
                flagged += 1;
            }
        }
        assert_eq!(flagged, 1);
        // on marks nothing is flagged (the relation reads circles only)
        let mspan = enumerate_full(&Support::marks(1), 1, false, &SpanOptions::default())
            .unwrap();
        for key in &mspan.keys {
            assert!(fewlegs_row(key.diagram(), 1).is_none());
        }
    }

    #[test]
    fn loopfactor_row_matches_minus_two_n() {
        // key with one free loop: [key] + 2·[key without the loop]  (n = 1)
        let mut d = Diagram::empty(Support::circles(1));
        d.loops = 1;
        let row = loopfactor_row(&d, 1).unwrap();
        assert_eq!(row.len(), 2);
        let mut plain = d.clone();
        plain.loops = 0;
        assert_eq!(row.coefficient_of(&d), Q::one());
        assert_eq!(row.coefficient_of(&plain), q(2));
    }

    #[test]
    fn two_cut_repair_rows_have_three_raw_terms() {
        assert_eq!(pairing_count(4), 3);
        assert_eq!(pairing_count(6), 15);
        // two chords on one circle, cut both: 3 re-joinings
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        b.leg(0, x0);
        b.leg(0, x1);
        b.leg(0, y0);
        b.leg(0, y1);
        let d = b.finish();
        let rows = key_rows(&d, &RelationKind::Pairings(2), &RowOptions::default());
        // one window (the only 2-subset of the 2 edges)
        assert_eq!(rows.len(), 1);
        // identity + two genuine re-joinings; all legs so no tadpoles drop
        let total: Q = rows[0].iter().map(|(_, c)| c.clone()).sum();
        assert_eq!(total, q(3));
        assert!(rows[0].coefficient_of(&d) >= Q::one());
    }

    #[test]
    fn repair_windows_are_leg_incident_until_escalated() {
        // θ next to a single chord on a circle: the chord edge is the only
        // leg-incident edge, so no 2-edge window exists without escalation
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x0, x1) = b.edge();
        b.leg(0, x0);
        b.leg(0, x1);
        let chord = b.finish();
        let mut b = DiagramBuilder::new(Support::empty());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        let theta = b.finish();
        let offset = chord.mate.len() as EndId;
        let mut d = chord.clone();
        d.verts.extend(theta.verts.iter().map(|v| v.map(|e| e + offset)));
        d.mate.extend(theta.mate.iter().map(|&m| m + offset));
        let none = key_rows(&d, &RelationKind::Pairings(2), &RowOptions::default());
        assert!(none.is_empty());
        let escalated = key_rows(
            &d,
            &RelationKind::Pairings(2),
            &RowOptions { arbitrary_windows: true, ..RowOptions::default() },
        );
        assert!(!escalated.is_empty());
    }

    #[test]
    fn ihx_row_terms_share_degree_and_support() {
        let span = enumerate_full(&Support::empty(), 2, false, &SpanOptions::default()).unwrap();
        let mut rows_seen = 0;
        for key in &span.keys {
            for row in key_rows(key.diagram(), &RelationKind::Ihx, &RowOptions::default()) {
                rows_seen += 1;
                for (k, _) in row.iter() {
                    assert_eq!(k.diagram().degree(), 2);
                }
            }
        }
        assert!(rows_seen > 0);
    }

    #[test]
    fn relation_sets_deduplicate_and_index_into_the_span() {
        let span = enumerate_full(&Support::circles(1), 2, false, &SpanOptions::default())
            .unwrap();
        let rels = generate_relations(&span, &[RelationKind::Ihx, RelationKind::Stu]).unwrap();
        let distinct: BTreeSet<_> = rels.rows.iter().cloned().collect();
        assert_eq!(distinct.len(), rels.rows.len());
        for row in &rels.rows {
            assert!(!row.is_empty());
            for (c, _) in row {
                assert!((*c as usize) < span.len());
            }
        }
    }
}
