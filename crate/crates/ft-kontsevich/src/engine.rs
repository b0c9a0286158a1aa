//! Slice-by-slice evaluation of tangle words into chord-diagram series.
//!
//! The evaluator walks a word top to bottom, maintaining the value as a
//! [`GradedSum`] on a bookkeeping support with one path per connected piece
//! built so far (plus circles for the pieces that closed). Each slice
//! contributes a factor on the all-downward strand support of the current
//! boundary width, spliced in position by position:
//!
//! * a crossing at position i contributes `F · exp(±t/2) · σ(F⁻¹)` where
//!   `F = Φ⁻¹(first i strands grouped, i, i+1)` moves the left-normed
//!   bracketing to expose the crossing pair, and `σ` pre-permutes the lower
//!   rebracketing onto the strands as they sit *above* the crossing; the
//!   sign of the exponent is the crossing's sign *after* rectifying both
//!   arcs downward;
//! * a local maximum inserts a fresh piece carrying the zigzag correction
//!   `u`, then rebrackets with `Φ(block, i, i+1)` on the widened boundary;
//! * a local minimum rebrackets with `Φ⁻¹(block, i, i+1)` first and then
//!   merges the two arcs (no factor of its own).
//!
//! The orientation of Φ against the turns is pinned by invariance: with it,
//! a kinked closure corrected by its framing matches the round unknot, and
//! the mirrored zigzag straightens modulo the relations.
//!
//! A factor leg landing on an upward-oriented arc is prepended in reverse
//! order and weighted by (−1) per leg on that arc — rectifying the
//! all-downward convention the factors are computed in. The correction `u`
//! is solved once per truncation degree from the requirement that the
//! S-shaped zigzag straightens to the bare strand *exactly*; the closed
//! unknot series ν is `u` on a circle. Framing is restored at the end:
//! each component is multiplied by `exp((f−w)·θ/2)` for its declared
//! framing f and blackboard writhe w.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use ft_diagrams::{
    connected_sum, q, qr, series_exp, stack_product, Component, Diagram, End, EndId, GradedSum,
    Kind, Q, Support,
};
use num_traits::One;

use crate::assoc::Associator;
use crate::cable::{cable_strands, chord, inflate, permute_strands};
use crate::word::{Gen, TangleWord};
use crate::Error;

// ---------------------------------------------------------------------------
// shared factor caches

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum FactorKey {
    Crossing { i: usize, positive: bool, m: usize, cap: u32 },
    CapTurn { i: usize, m: usize, cap: u32 },
    CupTurn { i: usize, m: usize, cap: u32 },
    MaxFix { cap: u32 },
    ClosedUnknot { cap: u32 },
}

static FACTORS: OnceLock<Mutex<BTreeMap<FactorKey, Arc<GradedSum>>>> = OnceLock::new();
static ASSOCIATORS: OnceLock<Mutex<BTreeMap<u32, Arc<Associator>>>> = OnceLock::new();

fn cached_factor(
    key: FactorKey,
    compute: impl FnOnce() -> Result<GradedSum, Error>,
) -> Result<Arc<GradedSum>, Error> {
    let store = FACTORS.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(v) = store.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(compute()?);
    Ok(store.lock().unwrap().entry(key).or_insert(v).clone())
}

fn associator(cap: u32) -> Result<Arc<Associator>, Error> {
    let store = ASSOCIATORS.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(a) = store.lock().unwrap().get(&cap) {
        return Ok(a.clone());
    }
    let a = Arc::new(Associator::solve(cap)?);
    Ok(store.lock().unwrap().entry(cap).or_insert(a).clone())
}

/// The associator with its first argument cabled to the `i` strands left of
/// the rebracketing site, embedded into width `m`.
fn block_assoc(i: usize, m: usize, cap: u32, inverse: bool) -> Result<GradedSum, Error> {
    let a = associator(cap)?;
    let src = if inverse { &a.inverse } else { &a.series };
    Ok(inflate(&cable_strands(src, &[i, 1, 1]), m, 0))
}

fn crossing_factor(
    i: usize,
    positive: bool,
    m: usize,
    cap: u32,
) -> Result<Arc<GradedSum>, Error> {
    cached_factor(FactorKey::Crossing { i, positive, m, cap }, || {
        let f = block_assoc(i, m, cap, true)?;
        let f_inv = block_assoc(i, m, cap, false)?;
        let half = chord(m, i, i + 1, cap).scale(&qr(if positive { 1 } else { -1 }, 2));
        let e = series_exp(
            &half,
            &|x, y| stack_product(x, y),
            GradedSum::one(Support::strands(m), cap),
        );
        let mut perm: Vec<usize> = (0..m).collect();
        perm.swap(i, i + 1);
        Ok(stack_product(&f, &stack_product(&e, &permute_strands(&f_inv, &perm))))
    })
}

fn cap_rebracket(i: usize, m: usize, cap: u32) -> Result<Arc<GradedSum>, Error> {
    cached_factor(FactorKey::CapTurn { i, m, cap }, || block_assoc(i, m, cap, false))
}

fn cup_rebracket(i: usize, m: usize, cap: u32) -> Result<Arc<GradedSum>, Error> {
    cached_factor(FactorKey::CupTurn { i, m, cap }, || block_assoc(i, m, cap, true))
}

/// `exp(delta·θ/2)` on a single strand or circle: k side-by-side self-chords
/// at order k.
fn framing_twist(delta: i64, circle: bool, cap: u32) -> GradedSum {
    let support = if circle { Support::circles(1) } else { Support::strands(1) };
    let mut out = GradedSum::zero(support.clone(), cap);
    let a = qr(delta, 2);
    let mut coeff = Q::one();
    for k in 0..=cap {
        if k > 0 {
            coeff = coeff * a.clone() / q(k as i64);
        }
        let legs = vec![(0..2 * k).map(|e| e as EndId).collect::<Vec<_>>()];
        let mate: Vec<EndId> = (0..2 * k).map(|e| (e ^ 1) as EndId).collect();
        let d = Diagram { support: support.clone(), legs, verts: Vec::new(), mate, loops: 0 };
        out.add_term(&d, coeff.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// the positioned splice

/// Multiplies `factor` (on all-downward strands, one per target) into `z`:
/// the factor's legs on strand p are transplanted onto component
/// `targets[p].0` of `z` — appended in order on a downward arc
/// (`targets[p].1` true), prepended in reverse order with a (−1)-per-leg
/// weight on an upward arc.
fn splice_value(z: &GradedSum, factor: &GradedSum, targets: &[(usize, bool)]) -> GradedSum {
    assert_eq!(factor.support.len(), targets.len(), "factor width mismatch");
    let mut out = GradedSum::zero(z.support.clone(), z.cap);
    for (zk, zc) in z.iter() {
        let zd = zk.diagram();
        let shift = zd.mate.len() as EndId;
        for (fk, fc) in factor.iter() {
            let fd = fk.diagram();
            if zd.degree() + fd.degree() > z.cap {
                continue;
            }
            let mut legs = zd.legs.clone();
            let mut flip = false;
            for (p, &(comp, plus)) in targets.iter().enumerate() {
                let batch = &fd.legs[p];
                if batch.is_empty() {
                    continue;
                }
                if plus {
                    legs[comp].extend(batch.iter().map(|&e| e + shift));
                } else {
                    if batch.len() % 2 == 1 {
                        flip = !flip;
                    }
                    let mut nl: Vec<EndId> = batch.iter().rev().map(|&e| e + shift).collect();
                    nl.extend_from_slice(&legs[comp]);
                    legs[comp] = nl;
                }
            }
            let mut verts = zd.verts.clone();
            verts.extend(fd.verts.iter().map(|v| [v[0] + shift, v[1] + shift, v[2] + shift]));
            let mut mate = zd.mate.clone();
            mate.extend(fd.mate.iter().map(|&e| e + shift));
            let nd = Diagram {
                support: z.support.clone(),
                legs,
                verts,
                mate,
                loops: zd.loops + fd.loops,
            };
            let mut coeff = zc.clone() * fc.clone();
            if flip {
                coeff = -coeff;
            }
            out.add_term(&nd, coeff);
        }
    }
    out
}

/// Composes two braid-style values vertically: every component of `x` ends
/// on a bottom anchor that continues into the component of `y` starting at
/// the matching top anchor. This is the algebra product behind stacking
/// tangle words; on identical string-link supports it agrees with
/// [`stack_product`].
pub fn stack_tangle_values(x: &GradedSum, y: &GradedSum) -> GradedSum {
    assert_eq!(x.cap, y.cap, "mismatched caps");
    assert!(x.support.all_paths() && y.support.all_paths(), "stacking needs open tangles");
    assert!(
        x.support.components.iter().chain(&y.support.components).all(|c| !c.reversed),
        "stacking needs all-downward tangles"
    );
    // x component with to = Bot(q) continues into the y component with
    // from = Top(q)
    let mut targets = Vec::with_capacity(y.support.len());
    let mut support = x.support.clone();
    for (j, comp) in y.support.components.iter().enumerate() {
        let Kind::Path { from: End::Top(q), to } = comp.kind else {
            panic!("lower tangle must hang from top anchors");
        };
        let c = x
            .support
            .components
            .iter()
            .position(|xc| matches!(xc.kind, Kind::Path { to: End::Bot(b), .. } if b == q))
            .expect("misaligned boundary anchors");
        targets.push((c, true));
        let Kind::Path { from, .. } = support.components[c].kind else { unreachable!() };
        support.components[c].kind = Kind::Path { from, to };
        let _ = j;
    }
    let glued = splice_value(x, y, &targets);
    // same leg data, final anchors
    let mut out = GradedSum::zero(support.clone(), x.cap);
    for (k, c) in glued.iter() {
        let d = k.diagram();
        let nd = Diagram {
            support: support.clone(),
            legs: d.legs.clone(),
            verts: d.verts.clone(),
            mate: d.mate.clone(),
            loops: d.loops,
        };
        out.add_term(&nd, c.clone());
    }
    out
}

// ---------------------------------------------------------------------------
// the evaluator

#[derive(Clone, Copy)]
struct Piece {
    serial: u32,
    start: Option<End>,
    end: Option<End>,
    closed: bool,
}

struct Eval {
    cap: u32,
    value: GradedSum,
    comps: Vec<Piece>,
    /// Boundary positions, left to right: (component index, downward?).
    slots: Vec<(usize, bool)>,
    next_serial: u32,
}

fn piece_component(serial: u32) -> Component {
    Component {
        kind: Kind::Path { from: End::Top(serial as u16), to: End::Bot(serial as u16) },
        reversed: false,
        label: serial + 1,
    }
}

impl Eval {
    fn new(top: usize, cap: u32) -> Self {
        let mut support = Support::empty();
        let mut comps = Vec::new();
        let mut slots = Vec::new();
        for p in 0..top {
            support.components.push(piece_component(p as u32));
            comps.push(Piece {
                serial: p as u32,
                start: Some(End::Top(p as u16)),
                end: None,
                closed: false,
            });
            slots.push((p, true));
        }
        Eval {
            cap,
            value: GradedSum::one(support, cap),
            comps,
            slots,
            next_serial: top as u32,
        }
    }

    /// Rewrites every term onto a new support with restructured leg lists.
    fn remap(&mut self, support: Support, f: impl Fn(&[Vec<EndId>]) -> Vec<Vec<EndId>>) {
        let mut out = GradedSum::zero(support.clone(), self.cap);
        for (k, c) in self.value.iter() {
            let d = k.diagram();
            let nd = Diagram {
                support: support.clone(),
                legs: f(&d.legs),
                verts: d.verts.clone(),
                mate: d.mate.clone(),
                loops: d.loops,
            };
            out.add_term(&nd, c.clone());
        }
        self.value = out;
    }

    fn crossing(&mut self, i: usize, positive: bool) -> Result<(), Error> {
        let m = self.slots.len();
        if i + 1 >= m {
            return Err(Error::Word(format!("crossing position {} exceeds width {m}", i + 1)));
        }
        // the crossing symbol encodes the picture for the arcs as oriented;
        // the factor lives in the all-downward world, and rectifying exactly
        // one of the two arcs flips the sign of the crossing it depicts
        let rectified = positive ^ (self.slots[i].1 != self.slots[i + 1].1);
        let factor = crossing_factor(i, rectified, m, self.cap)?;
        let targets = self.slots.clone();
        self.value = splice_value(&self.value, &factor, &targets);
        self.slots.swap(i, i + 1);
        Ok(())
    }

    fn cap(&mut self, i: usize, cw: bool, u: &GradedSum) -> Result<(), Error> {
        if i > self.slots.len() {
            return Err(Error::Word(format!(
                "cap position {} exceeds width {} + 1",
                i + 1,
                self.slots.len()
            )));
        }
        let serial = self.next_serial;
        if serial > u16::MAX as u32 {
            return Err(Error::Word("word exceeds the supported component count".into()));
        }
        self.next_serial += 1;
        let idx = self.comps.len();
        self.comps.push(Piece { serial, start: None, end: None, closed: false });
        let mut support = self.value.support.clone();
        support.components.push(piece_component(serial));
        self.remap(support, |legs| {
            let mut out = legs.to_vec();
            out.push(Vec::new());
            out
        });
        let (l, r) = if cw { (true, false) } else { (false, true) };
        self.slots.insert(i, (idx, r));
        self.slots.insert(i, (idx, l));
        // the per-maximum correction sits at the turn, before the
        // rebracketing legs arrive below it
        self.value = splice_value(&self.value, u, &[(idx, true)]);
        let g = cap_rebracket(i, self.slots.len(), self.cap)?;
        let targets = self.slots.clone();
        self.value = splice_value(&self.value, &g, &targets);
        Ok(())
    }

    fn cup(&mut self, i: usize, cw: bool) -> Result<(), Error> {
        let m = self.slots.len();
        if i + 1 >= m {
            return Err(Error::Word(format!("cup position {} exceeds width {m}", i + 1)));
        }
        let f = cup_rebracket(i, m, self.cap)?;
        let targets = self.slots.clone();
        self.value = splice_value(&self.value, &f, &targets);
        let (a, b) = (self.slots[i], self.slots[i + 1]);
        let ok = if cw { a.1 && !b.1 } else { !a.1 && b.1 };
        if !ok {
            return Err(Error::Word(format!("cup at position {} over mismatched symbols", i + 1)));
        }
        // flow runs down the + arc, through the minimum, up the − arc
        let (pi, mi) = if a.1 { (a.0, b.0) } else { (b.0, a.0) };
        self.slots.drain(i..=i + 1);
        if pi == mi {
            // the piece closes into a circle; its leg list becomes cyclic
            self.comps[pi].closed = true;
            let mut support = self.value.support.clone();
            let label = support.components[pi].label;
            support.components[pi] = Component { kind: Kind::Circle, reversed: false, label };
            self.remap(support, |legs| legs.to_vec());
        } else {
            let keep = pi.min(mi);
            let dropped = pi.max(mi);
            let merged = Piece {
                serial: self.comps[pi].serial.min(self.comps[mi].serial),
                start: self.comps[pi].start,
                end: self.comps[mi].end,
                closed: false,
            };
            let mut support = self.value.support.clone();
            support.components[keep] = piece_component(merged.serial);
            support.components.remove(dropped);
            self.comps[keep] = merged;
            self.comps.remove(dropped);
            for slot in &mut self.slots {
                if slot.0 == dropped {
                    slot.0 = keep;
                } else if slot.0 > dropped {
                    slot.0 -= 1;
                }
            }
            self.remap(support, |legs| {
                let mut out = Vec::with_capacity(legs.len() - 1);
                for (j, l) in legs.iter().enumerate() {
                    if j == dropped {
                        continue;
                    }
                    if j == keep {
                        let mut nl = legs[pi].clone();
                        nl.extend_from_slice(&legs[mi]);
                        out.push(nl);
                    } else {
                        out.push(l.clone());
                    }
                }
                out
            });
        }
        Ok(())
    }

    /// Resolves the remaining arcs to bottom anchors and reorders the
    /// support: open components by birth rank, then circles by birth rank,
    /// labeled 1..=n. String links land exactly on [`Support::strands`].
    fn finish(mut self) -> Result<(GradedSum, Vec<u32>), Error> {
        for (pos, &(c, plus)) in self.slots.iter().enumerate() {
            let piece = &mut self.comps[c];
            let anchor = Some(End::Bot(pos as u16));
            if plus {
                piece.end = anchor;
            } else {
                piece.start = anchor;
            }
        }
        let mut order: Vec<usize> = (0..self.comps.len()).collect();
        order.sort_by_key(|&j| (self.comps[j].closed, self.comps[j].serial));
        let mut support = Support::empty();
        let mut serials = Vec::new();
        for (rank, &j) in order.iter().enumerate() {
            let p = &self.comps[j];
            serials.push(p.serial);
            let kind = if p.closed {
                Kind::Circle
            } else {
                let (Some(from), Some(to)) = (p.start, p.end) else {
                    return Err(Error::Word("open piece with an unresolved anchor".into()));
                };
                Kind::Path { from, to }
            };
            support.components.push(Component { kind, reversed: false, label: rank as u32 + 1 });
        }
        self.remap(support, |legs| order.iter().map(|&j| legs[j].clone()).collect());
        Ok((self.value, serials))
    }
}

fn evaluate(word: &TangleWord, cap: u32, u: &GradedSum) -> Result<GradedSum, Error> {
    let shape = word.shape()?;
    let mut ev = Eval::new(word.top, cap);
    for g in &word.gens {
        match g {
            Gen::Id(_) => {}
            Gen::Crossing { pos, positive } => ev.crossing(pos - 1, *positive)?,
            Gen::Cap { pos, cw } => ev.cap(pos - 1, *cw, u)?,
            Gen::Cup { pos, cw } => ev.cup(pos - 1, *cw)?,
        }
    }
    let (mut value, serials) = ev.finish()?;
    // framing: each component was evaluated with its blackboard writhe w,
    // the declared framing is f — multiply by exp((f−w)·θ/2)
    let mut ranked = serials.clone();
    ranked.sort_unstable();
    for (c, s) in serials.iter().enumerate() {
        let rank = ranked.binary_search(s).expect("serial is ranked");
        let comp = &shape.components[rank];
        let delta = comp.framing - comp.writhe;
        if delta == 0 {
            continue;
        }
        let twist = framing_twist(delta, comp.closed, cap);
        value = if comp.closed {
            connected_sum(&value, c, &twist)
        } else {
            splice_value(&value, &twist, &[(c, true)])
        };
    }
    Ok(value)
}

// ---------------------------------------------------------------------------
// the public integrals

/// The correction spliced at every local maximum, solved degree by degree so
/// that the S-shaped zigzag word evaluates to the bare strand exactly.
fn max_correction(cap: u32) -> Result<Arc<GradedSum>, Error> {
    cached_factor(FactorKey::MaxFix { cap }, || {
        let word = TangleWord {
            top: 1,
            gens: vec![
                Gen::Id(vec![true]),
                Gen::Cap { pos: 2, cw: false },
                Gen::Cup { pos: 1, cw: true },
            ],
            ..Default::default()
        };
        let one = GradedSum::one(Support::strands(1), cap);
        let mut u = one.clone();
        for k in 1..=cap {
            let v = evaluate(&word, cap, &u)?;
            u = u.sub(&v.grade(k));
        }
        if !evaluate(&word, cap, &u)?.sub(&one).is_zero() {
            return Err(Error::Check("zigzag correction did not straighten the strand".into()));
        }
        Ok(u)
    })
}

/// The unknot series ν: the value of a single maximum closed by a single
/// minimum — the zigzag correction placed on a circle.
pub fn unknot_series(cap: u32) -> Result<GradedSum, Error> {
    let nu = cached_factor(FactorKey::ClosedUnknot { cap }, || {
        let word = TangleWord {
            gens: vec![Gen::Cap { pos: 1, cw: true }, Gen::Cup { pos: 1, cw: true }],
            ..Default::default()
        };
        zhat(&word, cap)
    })?;
    Ok((*nu).clone())
}

/// The framed invariant of a tangle word, truncated at total degree `cap`.
///
/// The value lives on the word's final support: open components first in
/// birth order (string links land on [`Support::strands`]), then circles in
/// birth order, matching the component order of the word's shape.
pub fn zhat(word: &TangleWord, cap: u32) -> Result<GradedSum, Error> {
    let u = max_correction(cap)?;
    evaluate(word, cap, &u)
}

/// [`zhat`] of an open braid word on `m` strands.
pub fn zhat_braid(m: usize, xs: &[(usize, bool)], cap: u32) -> Result<GradedSum, Error> {
    zhat(&crate::word::braid(m, xs), cap)
}

/// The normalized invariant: one unknot series ν multiplied into every
/// closed component of [`zhat`].
pub fn z_check(word: &TangleWord, cap: u32) -> Result<GradedSum, Error> {
    let mut z = zhat(word, cap)?;
    let nu = unknot_series(cap)?;
    for c in 0..z.support.len() {
        if matches!(z.support.components[c].kind, Kind::Circle) {
            z = connected_sum(&z, c, &nu);
        }
    }
    Ok(z)
}
