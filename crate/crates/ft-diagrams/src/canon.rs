//! Canonical forms of diagrams.
//!
//! Two diagrams are the same term when a support-preserving isomorphism of
//! the dashed graph matches them up respecting leg order (cyclically for
//! circles, up to permutation for marks) and vertex orientations up to an
//! even number of cyclic-order reversals. An odd number of reversals flips
//! the sign (antisymmetry); a diagram isomorphic to itself through an odd
//! reversal count is zero.
//!
//! The canonical form is the lexicographically minimal byte encoding over
//! all choices of circle rotation, mark leg order, vertex order, and
//! per-vertex slot arrangement. The search is a straightforward
//! branch-and-bound: candidate vertex placements are emitted best-first and
//! pruned against the incumbent encoding.

use std::collections::HashMap;
use std::sync::Arc;

use crate::diagram::{Diagram, EndId};
use crate::support::{End, Kind};

/// Entry code for "this end is paired into the dashed graph" in the chord
/// sweep (distinguishes leg→vertex edges from leg→leg chords).
const TO_VERTEX: u32 = u32::MAX - 1;
/// Entry code for "mate not yet placed" during the search.
const UNKNOWN: u32 = u32::MAX;

/// Hard ceiling on the number of outer (rotation × mark-permutation) combos.
const COMBO_BUDGET: u64 = 2_000_000;

/// Canonical representative plus its identity bytes. Equality, ordering and
/// hashing all go through `bytes`.
#[derive(Debug)]
pub struct KeyData {
    pub bytes: Vec<u8>,
    pub diagram: Diagram,
}

/// Shared handle to a canonical diagram.
#[derive(Clone, Debug)]
pub struct Key(pub Arc<KeyData>);

impl Key {
    pub fn diagram(&self) -> &Diagram {
        &self.0.diagram
    }
    pub fn bytes(&self) -> &[u8] {
        &self.0.bytes
    }
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.0.bytes == other.0.bytes
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.bytes.cmp(&other.0.bytes)
    }
}
impl std::hash::Hash for Key {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.bytes.hash(state);
    }
}

/// Canonical form: key plus sign. The sign is −1 when normalization needs an
/// odd number of cyclic-order reversals, 0 when the diagram is annihilated by
/// antisymmetry (tadpole, or an odd self-isomorphism), +1 otherwise.
pub fn canonical_form(d: &Diagram) -> (Key, i8) {
    debug_assert!(d.check().is_ok(), "{:?}", d.check());
    let raw = raw_bytes(d);
    if let Some(hit) = cache_get(&raw) {
        return hit;
    }
    let result = canonicalize_uncached(d);
    cache_put(raw, result.clone());
    result
}

thread_local! {
    static CACHE: std::cell::RefCell<HashMap<Vec<u8>, (Key, i8)>> =
        std::cell::RefCell::new(HashMap::new());
}

fn cache_get(raw: &[u8]) -> Option<(Key, i8)> {
    CACHE.with(|c| c.borrow().get(raw).cloned())
}

fn cache_put(raw: Vec<u8>, val: (Key, i8)) {
    CACHE.with(|c| {
        let mut m = c.borrow_mut();
        if m.len() > 4_000_000 {
            m.clear(); // crude bound; correctness does not depend on retention
        }
        m.insert(raw, val);
    });
}

/// Deterministic serialization of the diagram exactly as stored (memo key).
fn raw_bytes(d: &Diagram) -> Vec<u8> {
    let mut out = Vec::with_capacity(64);
    header_bytes(d, &mut out);
    for ends in &d.legs {
        for &e in ends {
            out.extend_from_slice(&e.to_le_bytes());
        }
    }
    for v in &d.verts {
        for &e in v {
            out.extend_from_slice(&e.to_le_bytes());
        }
    }
    for &m in &d.mate {
        out.extend_from_slice(&m.to_le_bytes());
    }
    out
}

/// Support + loop + size data shared by raw and canonical encodings.
fn header_bytes(d: &Diagram, out: &mut Vec<u8>) {
    out.push(1); // encoding version
    out.push(d.support.len() as u8);
    for (c, comp) in d.support.components.iter().enumerate() {
        match comp.kind {
            Kind::Circle => out.push(0),
            Kind::Path { from, to } => {
                out.push(1);
                for end in [from, to] {
                    match end {
                        End::Top(i) => {
                            out.push(0);
                            out.extend_from_slice(&i.to_le_bytes());
                        }
                        End::Bot(i) => {
                            out.push(1);
                            out.extend_from_slice(&i.to_le_bytes());
                        }
                    }
                }
            }
            Kind::Mark => out.push(2),
        }
        out.push(comp.reversed as u8);
        out.extend_from_slice(&comp.label.to_le_bytes());
        out.extend_from_slice(&(d.legs[c].len() as u32).to_le_bytes());
    }
    out.extend_from_slice(&d.loops.to_le_bytes());
    out.extend_from_slice(&(d.verts.len() as u32).to_le_bytes());
}

fn canonicalize_uncached(d: &Diagram) -> (Key, i8) {
    let forced_zero = d.has_tadpole();
    let nverts = d.verts.len();
    let nlegs = d.total_legs();
    let vbase = nlegs as u32;

    // Owner map: end → Some(vertex index) or None (leg).
    let mut owner: Vec<Option<u32>> = vec![None; d.mate.len()];
    for (vi, v) in d.verts.iter().enumerate() {
        for &e in v {
            owner[e as usize] = Some(vi as u32);
        }
    }

    // Per-component lists of admissible leg orderings.
    let mut orderings: Vec<Vec<Vec<EndId>>> = Vec::with_capacity(d.support.len());
    let mut combos: u64 = 1;
    for (c, comp) in d.support.components.iter().enumerate() {
        let legs = &d.legs[c];
        let k = legs.len();
        let choices: Vec<Vec<EndId>> = match comp.kind {
            Kind::Circle => (0..k.max(1))
                .map(|r| (0..k).map(|j| legs[(r + j) % k.max(1)]).collect())
                .collect(),
            Kind::Path { .. } => vec![legs.clone()],
            Kind::Mark => {
                use itertools::Itertools;
                if k <= 1 {
                    vec![legs.clone()]
                } else {
                    legs.iter().copied().permutations(k).collect()
                }
            }
        };
        combos = combos.saturating_mul(choices.len() as u64);
        orderings.push(choices);
    }
    assert!(
        combos <= COMBO_BUDGET,
        "canonicalization budget exceeded: {combos} leg-order combinations"
    );

    // Global best across outer combos.
    let mut best: Option<GlobalBest> = None;

    // Odometer over leg-order choices.
    let mut idx = vec![0usize; orderings.len()];
    loop {
        run_combo(d, &owner, &orderings, &idx, vbase, nverts, &mut best);
        // advance odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                break;
            }
            idx[pos] += 1;
            if idx[pos] < orderings[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == idx.len() {
            break;
        }
    }

    let win = best.expect("canonical search always yields a candidate");
    let sign = if forced_zero || win.parities == 0b11 {
        0
    } else if win.parities == 0b01 {
        1
    } else {
        -1
    };
    let canon = rebuild(d, &win);
    debug_assert!(canon.check().is_ok());
    let mut bytes = Vec::with_capacity(64);
    header_bytes(&canon, &mut bytes);
    for u in &win.enc {
        bytes.extend_from_slice(&u.to_le_bytes());
    }
    (Key(Arc::new(KeyData { bytes, diagram: canon })), sign)
}

struct GlobalBest {
    /// chord sweep followed by vertex rows (all concrete).
    enc: Vec<u32>,
    /// bit 0: a minimal completion with even reversal parity exists;
    /// bit 1: one with odd parity exists.
    parities: u8,
    /// leg order chosen per component (indices into `orderings`).
    leg_choice: Vec<usize>,
    /// placement: (vertex, arrangement) per canonical position.
    placement: Vec<(u32, u8)>,
}

/// The six slot arrangements of a trivalent vertex: rotations preserve the
/// cyclic orientation, reflections reverse it (parity 1 = sign flip).
const ARRANGEMENTS: [([usize; 3], u8); 6] = [
    ([0, 1, 2], 0),
    ([1, 2, 0], 0),
    ([2, 0, 1], 0),
    ([2, 1, 0], 1),
    ([1, 0, 2], 1),
    ([0, 2, 1], 1),
];

fn run_combo(
    d: &Diagram,
    owner: &[Option<u32>],
    orderings: &[Vec<Vec<EndId>>],
    idx: &[usize],
    vbase: u32,
    nverts: usize,
    best: &mut Option<GlobalBest>,
) {
    // Assign leg ports.
    let mut port_of: Vec<u32> = vec![UNKNOWN; d.mate.len()];
    let mut p = 0u32;
    for (c, choice) in idx.iter().enumerate() {
        for &e in &orderings[c][*choice] {
            port_of[e as usize] = p;
            p += 1;
        }
    }

    // Chord sweep.
    let nlegs = vbase as usize;
    let mut chord = Vec::with_capacity(nlegs);
    for (c, choice) in idx.iter().enumerate() {
        for &e in &orderings[c][*choice] {
            let m = d.mate[e as usize];
            chord.push(match owner[m as usize] {
                Some(_) => TO_VERTEX,
                None => port_of[m as usize],
            });
        }
    }

    // Compare the chord part against the incumbent before searching vertices.
    let mut inner_best: Option<Vec<u32>> = None;
    if let Some(g) = best.as_ref() {
        match chord.as_slice().cmp(&g.enc[..nlegs]) {
            std::cmp::Ordering::Greater => return,
            std::cmp::Ordering::Equal => inner_best = Some(g.enc[nlegs..].to_vec()),
            std::cmp::Ordering::Less => {}
        }
    }

    let mut search = Search {
        d,
        owner,
        port_of,
        vbase,
        nverts,
        placed_of_vertex: vec![false; nverts],
        rows: Vec::with_capacity(3 * nverts),
        pending: Vec::new(),
        placement: Vec::with_capacity(nverts),
        flip_parity: 0,
        best_rows: inner_best,
        best_parities: 0,
        best_placement: Vec::new(),
    };
    search.dfs();

    let Search { best_rows, best_parities, best_placement, .. } = search;
    let Some(rows) = best_rows else { return };
    if best_parities == 0 {
        // The incumbent rows came from an earlier combo and were never
        // matched here; nothing to merge.
        return;
    }
    let mut enc = chord;
    enc.extend_from_slice(&rows);
    match best.as_mut() {
        None => {
            *best = Some(GlobalBest {
                enc,
                parities: best_parities,
                leg_choice: idx.to_vec(),
                placement: best_placement,
            });
        }
        Some(g) => match enc.cmp(&g.enc) {
            std::cmp::Ordering::Less => {
                *best = Some(GlobalBest {
                    enc,
                    parities: best_parities,
                    leg_choice: idx.to_vec(),
                    placement: best_placement,
                });
            }
            std::cmp::Ordering::Equal => g.parities |= best_parities,
            std::cmp::Ordering::Greater => {}
        },
    }
}

struct Search<'a> {
    d: &'a Diagram,
    owner: &'a [Option<u32>],
    /// end → port; legs preassigned, vertex slots filled during placement.
    port_of: Vec<u32>,
    vbase: u32,
    nverts: usize,
    placed_of_vertex: Vec<bool>,
    rows: Vec<u32>,
    /// back-patch list: (row position, waiting-on end).
    pending: Vec<(usize, EndId)>,
    placement: Vec<(u32, u8)>,
    flip_parity: u8,
    best_rows: Option<Vec<u32>>,
    /// parity bits of completions matching best_rows *found in this combo*.
    best_parities: u8,
    best_placement: Vec<(u32, u8)>,
}

impl Search<'_> {
    fn dfs(&mut self) {
        let placed = self.placement.len();
        if placed == self.nverts {
            debug_assert!(self.rows.iter().all(|&r| r != UNKNOWN));
            let bit = 1u8 << (self.flip_parity & 1);
            match self.best_rows.as_ref() {
                None => {
                    self.best_rows = Some(self.rows.clone());
                    self.best_parities = bit;
                    self.best_placement = self.placement.clone();
                }
                Some(b) => match self.rows.cmp(b) {
                    std::cmp::Ordering::Less => {
                        self.best_rows = Some(self.rows.clone());
                        self.best_parities = bit;
                        self.best_placement = self.placement.clone();
                    }
                    std::cmp::Ordering::Equal => {
                        self.best_parities |= bit;
                        if self.best_placement.is_empty() {
                            // incumbent came from another combo's enc
                            self.best_placement = self.placement.clone();
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
            }
            return;
        }

        // Candidate moves, best-first by their immediate row.
        let mut moves: Vec<([u32; 3], u32, u8)> = Vec::new();
        for v in 0..self.nverts {
            if self.placed_of_vertex[v] {
                continue;
            }
            for (a, (perm, _parity)) in ARRANGEMENTS.iter().enumerate() {
                let slots = self.d.verts[v];
                let mut row = [0u32; 3];
                for (j, &pi) in perm.iter().enumerate() {
                    let m = self.d.mate[slots[pi] as usize];
                    row[j] = self.port_of[m as usize];
                }
                moves.push((row, v as u32, a as u8));
            }
        }
        moves.sort_unstable();

        for (_, v, a) in moves {
            self.apply(v as usize, a);
            if self.viable() {
                self.dfs();
            }
            self.undo(v as usize, a);
        }
    }

    /// Places vertex `v` with arrangement `a` at the next canonical position.
    fn apply(&mut self, v: usize, a: u8) {
        let i = self.placement.len();
        let base = self.vbase + 3 * i as u32;
        let (perm, parity) = ARRANGEMENTS[a as usize];
        let slots = self.d.verts[v];
        for (j, &pi) in perm.iter().enumerate() {
            self.port_of[slots[pi] as usize] = base + j as u32;
        }
        // Back-patch earlier unknowns that waited on this vertex.
        for t in 0..self.pending.len() {
            let (pos, end) = self.pending[t];
            if self.owner[end as usize] == Some(v as u32) {
                self.rows[pos] = self.port_of[end as usize];
            }
        }
        // Emit this vertex's row.
        for &pi in perm.iter() {
            let m = self.d.mate[slots[pi] as usize];
            let code = self.port_of[m as usize];
            if code == UNKNOWN {
                self.pending.push((self.rows.len(), m));
            }
            self.rows.push(code);
        }
        self.placement.push((v as u32, a));
        self.placed_of_vertex[v] = true;
        self.flip_parity ^= parity;
    }

    fn undo(&mut self, v: usize, a: u8) {
        let (perm, parity) = ARRANGEMENTS[a as usize];
        self.flip_parity ^= parity;
        self.placed_of_vertex[v] = false;
        self.placement.pop();
        self.rows.truncate(self.rows.len() - 3);
        self.pending.retain(|&(pos, _)| pos < self.rows.len());
        // Restore unknowns for entries that had been patched to this vertex.
        let slots = self.d.verts[v];
        for (pos, end) in self.pending.iter().copied() {
            if self.owner[end as usize] == Some(v as u32) {
                self.rows[pos] = UNKNOWN;
            }
        }
        for &pi in perm.iter() {
            self.port_of[slots[pi] as usize] = UNKNOWN;
        }
    }

    /// Conservative bound: can the current partial stream still reach ≤ best?
    fn viable(&self) -> bool {
        let Some(best) = self.best_rows.as_ref() else { return true };
        // A still-unknown entry resolves to a port of a vertex placed later,
        // hence ≥ this bound.
        let bound = self.vbase + 3 * self.placement.len() as u32;
        for (t, &a) in self.rows.iter().enumerate() {
            let b = best[t];
            if a == UNKNOWN {
                return b >= bound;
            }
            match a.cmp(&b) {
                std::cmp::Ordering::Less => return true,
                std::cmp::Ordering::Greater => return false,
                std::cmp::Ordering::Equal => {}
            }
        }
        true
    }
}

/// Materializes the canonical representative from the winning choices.
fn rebuild(d: &Diagram, win: &GlobalBest) -> Diagram {
    // Site list in canonical order: legs (per chosen orderings), then placed
    // vertices' slots in arranged order.
    let mut sites: Vec<EndId> = Vec::with_capacity(d.mate.len());
    let mut new_legs: Vec<Vec<EndId>> = Vec::with_capacity(d.support.len());
    // Leg orderings were not retained; recompute from choices.
    for (c, &choice) in win.leg_choice.iter().enumerate() {
        let legs = &d.legs[c];
        let k = legs.len();
        let order: Vec<EndId> = match d.support.components[c].kind {
            Kind::Circle => (0..k).map(|j| legs[(choice + j) % k.max(1)]).collect(),
            Kind::Path { .. } => legs.clone(),
            Kind::Mark => {
                use itertools::Itertools;
                if k <= 1 {
                    legs.clone()
                } else {
                    legs.iter().copied().permutations(k).nth(choice).expect("choice in range")
                }
            }
        };
        sites.extend_from_slice(&order);
        new_legs.push(order); // placeholder: rewritten with new ids below
    }
    for &(v, a) in &win.placement {
        let (perm, _) = ARRANGEMENTS[a as usize];
        let slots = d.verts[v as usize];
        for &pi in perm.iter() {
            sites.push(slots[pi]);
        }
    }

    // Renumber ends in site order, pairing edges as encountered.
    let mut new_id: Vec<u32> = vec![u32::MAX; d.mate.len()];
    let mut mate: Vec<u32> = Vec::with_capacity(d.mate.len());
    let mut next = 0u32;
    for &e in &sites {
        if new_id[e as usize] == u32::MAX {
            let m = d.mate[e as usize];
            new_id[e as usize] = next;
            new_id[m as usize] = next + 1;
            mate.push(next + 1);
            mate.push(next);
            next += 2;
        }
    }
    // mate vector is indexed by new id: entries pushed in allocation order,
    // but ends were allocated pairwise so the vector above is already correct.

    let legs = new_legs
        .into_iter()
        .map(|ends| ends.into_iter().map(|e| new_id[e as usize]).collect())
        .collect();
    let verts = win
        .placement
        .iter()
        .map(|&(v, a)| {
            let (perm, _) = ARRANGEMENTS[a as usize];
            let slots = d.verts[v as usize];
            [
                new_id[slots[perm[0]] as usize],
                new_id[slots[perm[1]] as usize],
                new_id[slots[perm[2]] as usize],
            ]
        })
        .collect();

    Diagram { support: d.support.clone(), legs, verts, mate, loops: d.loops }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DiagramBuilder;
    use crate::support::Support;

    fn theta_with(first: [usize; 3], second: [usize; 3]) -> Diagram {
        let mut b = DiagramBuilder::new(Support::empty());
        let e: Vec<(EndId, EndId)> = (0..3).map(|_| b.edge()).collect();
        b.vertex([e[first[0]].0, e[first[1]].0, e[first[2]].0]);
        b.vertex([e[second[0]].1, e[second[1]].1, e[second[2]].1]);
        b.finish()
    }

    #[test]
    fn theta_reversal_flips_sign() {
        let (k1, s1) = canonical_form(&theta_with([0, 1, 2], [0, 1, 2]));
        let (k2, s2) = canonical_form(&theta_with([0, 1, 2], [0, 2, 1]));
        assert_eq!(k1, k2);
        // θ has an automorphism exchanging the two vertices, but every
        // self-map preserves reversal parity, so both signs are nonzero and
        // opposite.
        assert_eq!(s1, -s2);
        assert_ne!(s1, 0);
    }

    #[test]
    fn tadpole_is_zero() {
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        let (p, q) = b.edge();
        b.leg(0, p);
        b.vertex([x, y, q]);
        let (_, s) = canonical_form(&b.finish());
        assert_eq!(s, 0);
    }

    #[test]
    fn isomorphic_relabelings_agree() {
        // Tetrahedron built with two different edge numberings.
        let build = |shuffle: bool| {
            let mut b = DiagramBuilder::new(Support::empty());
            let mut e: Vec<(EndId, EndId)> = (0..6).map(|_| b.edge()).collect();
            if shuffle {
                e.swap(0, 3);
                e.swap(2, 5);
            }
            // vertices of K4: edges (01)(02)(03), (01)(12)(13), ...
            b.vertex([e[0].0, e[1].0, e[2].0]);
            b.vertex([e[0].1, e[3].0, e[4].0]);
            b.vertex([e[1].1, e[3].1, e[5].0]);
            b.vertex([e[2].1, e[4].1, e[5].1]);
            b.finish()
        };
        let (k1, s1) = canonical_form(&build(false));
        let (k2, s2) = canonical_form(&build(true));
        assert_eq!(k1, k2);
        assert_eq!(s1.abs(), 1);
        assert_eq!(s2.abs(), 1);
    }

    #[test]
    fn circle_rotation_same_key() {
        // Two chords on one circle interleaved: legs (a b a b); rotating the
        // base point must not change the key.
        let build = |rot: usize| {
            let mut b = DiagramBuilder::new(Support::circles(1));
            let (a0, a1) = b.edge();
            let (b0, b1) = b.edge();
            let legs = [a0, b0, a1, b1];
            for j in 0..4 {
                b.leg(0, legs[(rot + j) % 4]);
            }
            b.finish()
        };
        for rot in 1..4 {
            assert_eq!(canonical_form(&build(0)), canonical_form(&build(rot)));
        }
    }

    #[test]
    fn interval_order_is_rigid() {
        // On a strand, chord endpoints in different linear positions are
        // different diagrams.
        let build = |swapped: bool| {
            let mut b = DiagramBuilder::new(Support::strands(2));
            let (x, y) = b.edge();
            let (p, q) = b.edge();
            if swapped {
                b.leg(0, p);
                b.leg(0, x);
            } else {
                b.leg(0, x);
                b.leg(0, p);
            }
            b.leg(1, y);
            b.leg(1, q);
            b.finish()
        };
        assert_ne!(canonical_form(&build(false)).0, canonical_form(&build(true)).0);
    }

    #[test]
    fn mark_legs_unordered() {
        let build = |swapped: bool| {
            let mut b = DiagramBuilder::new(Support::marks(2));
            let (x, y) = b.edge();
            let (p, q) = b.edge();
            if swapped {
                b.leg(0, p);
                b.leg(0, x);
            } else {
                b.leg(0, x);
                b.leg(0, p);
            }
            b.leg(1, y);
            b.leg(1, q);
            b.finish()
        };
        assert_eq!(canonical_form(&build(false)).0, canonical_form(&build(true)).0);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let mut b = DiagramBuilder::new(Support::circles(2));
        let (x, y) = b.edge();
        let (p, q) = b.edge();
        let (u, v) = b.edge();
        b.leg(0, x);
        b.leg(0, p);
        b.leg(1, y);
        b.leg(1, u);
        let (w, z) = b.edge();
        b.leg(1, z);
        b.vertex([q, v, w]);
        let d = b.finish();
        let (k, s) = canonical_form(&d);
        assert_eq!(s.abs(), 1);
        let (k2, s2) = canonical_form(k.diagram());
        assert_eq!(k, k2);
        assert_eq!(s2, 1);
    }

    #[test]
    fn loop_count_distinguishes() {
        let mut d1 = Diagram::empty(Support::circles(1));
        d1.loops = 1;
        let d0 = Diagram::empty(Support::circles(1));
        assert_ne!(canonical_form(&d1).0, canonical_form(&d0).0);
    }
}
