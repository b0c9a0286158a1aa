//! The horizontal-chord algebra on `n` vertical strands: noncommutative
//! polynomials in generators t_ij (one per unordered strand pair) modulo
//! the infinitesimal braid relations
//!
//! ```text
//! [t_ij, t_ik + t_jk] = 0,        [t_ij, t_kl] = 0  ({i,j} ∩ {k,l} = ∅),
//! ```
//!
//! truncated by total degree. Monomials are words in the generators; a
//! per-degree sparse elimination of the relation ideal reduces any word
//! combination to canonical coordinates, so zero tests and linear solves
//! are exact. The associator equations are solved here — the degree-4
//! spaces on three and four strands have dimensions 31 and 301, a few
//! hundred instead of the tens of thousands a full diagram span carries —
//! and the solution maps to chordal diagram series by [`to_diagrams`],
//! which sends a word to its stack of chords.

use std::collections::BTreeMap;

use ft_diagrams::{q, qr, DiagramBuilder, GradedSum, Q, Support};
use ft_relations::{Eliminator, Projector, SparseRow};
use num_traits::Zero;

/// Unordered strand pairs in lexicographic order — the generator list.
pub(crate) fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

/// Generator index of the chord joining strands `i` and `j`.
pub(crate) fn gen_index(n: usize, i: usize, j: usize) -> u8 {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    assert!(i < j && j < n, "chord needs two distinct strands below {n}");
    let before: usize = (0..i).map(|r| n - 1 - r).sum();
    (before + (j - i - 1)) as u8
}

/// A degree-truncated combination of generator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DkSum {
    pub n: usize,
    pub cap: u32,
    pub terms: BTreeMap<Vec<u8>, Q>,
}

impl DkSum {
    pub fn zero(n: usize, cap: u32) -> Self {
        DkSum { n, cap, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, cap: u32) -> Self {
        let mut s = Self::zero(n, cap);
        s.add_word(Vec::new(), q(1));
        s
    }

    pub fn gen(n: usize, cap: u32, i: usize, j: usize) -> Self {
        let mut s = Self::zero(n, cap);
        s.add_word(vec![gen_index(n, i, j)], q(1));
        s
    }

    pub fn add_word(&mut self, w: Vec<u8>, c: Q) {
        if c.is_zero() || w.len() as u32 > self.cap {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(mut self, other: &DkSum) -> Self {
        assert_eq!((self.n, self.cap), (other.n, other.cap), "mismatched algebras");
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c.clone());
        }
        self
    }

    pub fn sub(self, other: &DkSum) -> Self {
        self.add(&other.clone().neg())
    }

    pub fn neg(self) -> Self {
        self.scale(&q(-1))
    }

    pub fn scale(mut self, c: &Q) -> Self {
        if c.is_zero() {
            self.terms.clear();
        } else {
            for v in self.terms.values_mut() {
                *v *= c;
            }
        }
        self
    }

    pub fn mul(&self, other: &DkSum) -> DkSum {
        assert_eq!((self.n, self.cap), (other.n, other.cap), "mismatched algebras");
        let mut out = DkSum::zero(self.n, self.cap);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if (w1.len() + w2.len()) as u32 > self.cap {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_word(w, c1 * c2);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|w| w.len() as u32).min()
    }
}

/// `a·b − b·a`.
pub(crate) fn dk_commutator(a: &DkSum, b: &DkSum) -> DkSum {
    a.mul(b).sub(&b.mul(a))
}

/// The truncated exponential of a positive-degree element.
pub(crate) fn dk_exp(x: &DkSum) -> DkSum {
    assert!(x.min_degree().map_or(true, |d| d > 0), "exponent needs positive degree");
    let mut out = DkSum::one(x.n, x.cap);
    let mut pow = DkSum::one(x.n, x.cap);
    let mut factorial = 1i64;
    for k in 1..=i64::from(x.cap) {
        pow = pow.mul(x);
        if pow.is_zero() {
            break;
        }
        factorial *= k;
        out = out.add(&pow.clone().scale(&qr(1, factorial)));
    }
    out
}

/// Pushes words through an injective strand relabeling into `target_n`
/// strands: letter t_ij becomes t_{map[i], map[j]}.
pub(crate) fn dk_relabel(x: &DkSum, target_n: usize, map: &[usize]) -> DkSum {
    assert_eq!(map.len(), x.n, "one image per strand");
    let prs = pairs(x.n);
    let mut out = DkSum::zero(target_n, x.cap);
    for (w, c) in &x.terms {
        let moved: Vec<u8> = w
            .iter()
            .map(|&l| {
                let (i, j) = prs[l as usize];
                gen_index(target_n, map[i], map[j])
            })
            .collect();
        out.add_word(moved, c.clone());
    }
    out
}

/// Replaces strand `i` by `mult[i]` parallel copies: each letter t_ij
/// becomes the sum of chords between the copy bundles, so a word expands
/// multiplicatively. Zero copies kill every word touching the strand.
pub(crate) fn dk_cable(x: &DkSum, mult: &[usize]) -> DkSum {
    assert_eq!(mult.len(), x.n, "one multiplicity per strand");
    let prs = pairs(x.n);
    let total: usize = mult.iter().sum();
    let mut offset = vec![0usize; x.n];
    for i in 1..x.n {
        offset[i] = offset[i - 1] + mult[i - 1];
    }
    let mut out = DkSum::zero(total, x.cap);
    for (w, c) in &x.terms {
        // per-letter image lists
        let images: Vec<Vec<u8>> = w
            .iter()
            .map(|&l| {
                let (i, j) = prs[l as usize];
                let mut v = Vec::new();
                for a in 0..mult[i] {
                    for b in 0..mult[j] {
                        v.push(gen_index(total, offset[i] + a, offset[j] + b));
                    }
                }
                v
            })
            .collect();
        if images.iter().any(|v| v.is_empty()) {
            continue;
        }
        let count: usize = images.iter().map(|v| v.len()).product();
        for pick in 0..count {
            let mut idx = pick;
            let mut word = Vec::with_capacity(w.len());
            for v in &images {
                word.push(v[idx % v.len()]);
                idx /= v.len();
            }
            out.add_word(word, c.clone());
        }
    }
    out
}

/// The chordal diagram series of a word combination: each word becomes its
/// stack of chords, read top to bottom.
pub(crate) fn to_diagrams(x: &DkSum) -> GradedSum {
    let support = Support::strands(x.n);
    let prs = pairs(x.n);
    let mut out = GradedSum::zero(support.clone(), x.cap);
    for (w, c) in &x.terms {
        let mut bld = DiagramBuilder::new(support.clone());
        for &l in w {
            let (i, j) = prs[l as usize];
            let (e1, e2) = bld.edge();
            bld.leg(i, e1);
            bld.leg(j, e2);
        }
        out.add_term(&bld.finish(), c.clone());
    }
    out
}

/// Per-degree reducers for the relation ideal of one algebra.
pub(crate) struct DkAlgebra {
    pub n: usize,
    pub cap: u32,
    gens: usize,
    projectors: Vec<Projector>,
    #[cfg_attr(not(test), allow(dead_code))]
    dims: Vec<usize>,
}

impl DkAlgebra {
    pub fn new(n: usize, cap: u32) -> Self {
        let prs = pairs(n);
        let g = prs.len();
        assert!((g as u64).pow(cap) < u64::from(u32::MAX), "degree cap too deep");

        // quadratic relators as sparse word combinations
        let mut relators: Vec<Vec<(Vec<u8>, Q)>> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = gen_index(n, i, j);
                for k in (0..n).filter(|&k| k != i && k != j) {
                    let a = gen_index(n, i, k);
                    let b = gen_index(n, j, k);
                    relators.push(vec![
                        (vec![p, a], q(1)),
                        (vec![p, b], q(1)),
                        (vec![a, p], q(-1)),
                        (vec![b, p], q(-1)),
                    ]);
                }
            }
        }
        for a in 0..g {
            for b in a + 1..g {
                let (i, j) = prs[a];
                let (k, l) = prs[b];
                if i != k && i != l && j != k && j != l {
                    let (a, b) = (a as u8, b as u8);
                    relators.push(vec![(vec![a, b], q(1)), (vec![b, a], q(-1))]);
                }
            }
        }

        let mut projectors = Vec::new();
        let mut dims = Vec::new();
        for d in 0..=cap {
            let mut elim = Eliminator::new();
            if d >= 2 {
                for rel in &relators {
                    for left in 0..=(d - 2) {
                        let right = d - 2 - left;
                        for m1 in words(g, left as usize) {
                            for m2 in words(g, right as usize) {
                                let mut row: BTreeMap<u32, Q> = BTreeMap::new();
                                for (w, c) in rel {
                                    let mut full = m1.clone();
                                    full.extend_from_slice(w);
                                    full.extend_from_slice(&m2);
                                    *row.entry(word_index(g, &full)).or_insert_with(Q::zero) +=
                                        c.clone();
                                }
                                row.retain(|_, v| !v.is_zero());
                                elim.add_row(row.into_iter().collect());
                            }
                        }
                    }
                }
            }
            dims.push(g.pow(d) - elim.rank());
            projectors.push(elim.finish());
        }
        DkAlgebra { n, cap, gens: g, projectors, dims }
    }

    #[cfg(test)]
    pub fn dim(&self, d: u32) -> usize {
        self.dims[d as usize]
    }

    #[cfg(test)]
    pub fn is_zero(&self, x: &DkSum) -> bool {
        self.coords(x).iter().all(|r| r.is_empty())
    }

    /// Canonical per-degree coordinates of a word combination.
    pub fn coords(&self, x: &DkSum) -> Vec<SparseRow> {
        assert_eq!(x.n, self.n, "wrong strand count");
        assert!(x.cap <= self.cap, "sum exceeds algebra cap");
        let mut rows: Vec<BTreeMap<u32, Q>> = vec![BTreeMap::new(); self.cap as usize + 1];
        for (w, c) in &x.terms {
            rows[w.len()].insert(word_index(self.gens, w), c.clone());
        }
        rows.into_iter()
            .enumerate()
            .map(|(d, m)| self.projectors[d].project(&m.into_iter().collect()))
            .collect()
    }

}

fn word_index(g: usize, w: &[u8]) -> u32 {
    let mut idx = 0u32;
    for &l in w {
        idx = idx * g as u32 + u32::from(l);
    }
    idx
}

fn words(g: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(g.pow(len as u32));
    let mut w = vec![0u8; len];
    loop {
        out.push(w.clone());
        let mut at = len;
        loop {
            if at == 0 {
                return out;
            }
            at -= 1;
            w[at] += 1;
            if (w[at] as usize) < g {
                break;
            }
            w[at] = 0;
        }
    }
}
