//! Finite formal sums of canonical diagrams with exact rational
//! coefficients, truncated at a degree cap.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::canon::{canonical_form, Key};
use crate::coeff::Q;
use crate::diagram::Diagram;
use crate::support::Support;

/// A degree-truncated linear combination of diagrams on one fixed support.
#[derive(Clone, Debug)]
pub struct GradedSum {
    pub support: Support,
    pub cap: u32,
    terms: BTreeMap<Key, Q>,
}

impl GradedSum {
    /// The zero sum.
    pub fn zero(support: Support, cap: u32) -> Self {
        GradedSum { support, cap, terms: BTreeMap::new() }
    }

    /// The unit: the empty diagram on `support` with coefficient 1.
    pub fn one(support: Support, cap: u32) -> Self {
        let mut s = GradedSum::zero(support.clone(), cap);
        s.add_term(&Diagram::empty(support), Q::one());
        s
    }

    /// Single-diagram sum.
    pub fn from_diagram(d: &Diagram, cap: u32) -> Self {
        let mut s = GradedSum::zero(d.support.clone(), cap);
        s.add_term(d, Q::one());
        s
    }

    /// Adds `c · d`, canonicalizing `d` (antisymmetry signs applied; terms
    /// over the cap or annihilated by antisymmetry are dropped).
    pub fn add_term(&mut self, d: &Diagram, c: Q) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(d.support, self.support, "term support mismatch");
        let (key, sign) = canonical_form(d);
        if sign == 0 {
            return;
        }
        let c = if sign < 0 { -c } else { c };
        self.add_canonical(key, c);
    }

    /// Adds `c · key` where `key` is already canonical.
    pub fn add_canonical(&mut self, key: Key, c: Q) {
        if c.is_zero() || key.diagram().degree() > self.cap {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Deterministic (byte-ordered) iteration over terms.
    pub fn iter(&self) -> impl Iterator<Item = (&Key, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &Key) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of the diagram `d` (after canonicalization).
    pub fn coefficient_of(&self, d: &Diagram) -> Q {
        let (key, sign) = canonical_form(d);
        if sign == 0 {
            return Q::zero();
        }
        let c = self.coefficient(&key);
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    pub fn scale(mut self, c: &Q) -> Self {
        if c.is_zero() {
            self.terms.clear();
            return self;
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    pub fn neg(self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn add(mut self, other: &GradedSum) -> Self {
        debug_assert_eq!(self.support, other.support);
        for (k, c) in other.iter() {
            self.add_canonical(k.clone(), c.clone());
        }
        self
    }

    pub fn sub(self, other: &GradedSum) -> Self {
        self.add(&other.clone().neg())
    }

    /// Restricts to degrees ≤ `cap`.
    pub fn truncate(mut self, cap: u32) -> Self {
        self.cap = cap;
        self.terms.retain(|k, _| k.diagram().degree() <= cap);
        self
    }

    /// The degree-`n` homogeneous part.
    pub fn grade(&self, n: u32) -> Self {
        let mut out = GradedSum::zero(self.support.clone(), self.cap);
        for (k, c) in self.iter() {
            if k.diagram().degree() == n {
                out.add_canonical(k.clone(), c.clone());
            }
        }
        out
    }

    /// Keeps only terms the predicate accepts.
    pub fn filter(&self, mut pred: impl FnMut(&Diagram) -> bool) -> Self {
        let mut out = GradedSum::zero(self.support.clone(), self.cap);
        for (k, c) in self.iter() {
            if pred(k.diagram()) {
                out.add_canonical(k.clone(), c.clone());
            }
        }
        out
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.diagram().degree()).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.diagram().degree()).max()
    }

    /// Minimum internal-vertex count over terms; `None` for the zero sum
    /// (conventionally +∞).
    pub fn i_filter(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.diagram().internal_count()).min()
    }

    /// Applies a linear map given per-term: `f(diagram, coef, &mut out)`.
    pub fn map_terms(
        &self,
        support: Support,
        cap: u32,
        mut f: impl FnMut(&Diagram, &Q, &mut GradedSum),
    ) -> GradedSum {
        let mut out = GradedSum::zero(support, cap);
        for (k, c) in self.iter() {
            f(k.diagram(), c, &mut out);
        }
        out
    }
}

impl PartialEq for GradedSum {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support && self.terms == other.terms
    }
}
impl Eq for GradedSum {}

impl std::fmt::Display for GradedSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, "  +  ")?;
            }
            write!(f, "({}) {}", c, crate::text::diagram_to_text(k.diagram()))?;
        }
        Ok(())
    }
}

/// A sum of diagram pairs — the target of the coproduct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSum {
    pub terms: BTreeMap<(Key, Key), Q>,
}

impl PairSum {
    pub fn zero() -> Self {
        PairSum { terms: BTreeMap::new() }
    }

    pub fn add(&mut self, left: Key, right: Key, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((left, right)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `x ⊗ y`: all pairwise products of terms.
    pub fn tensor(x: &GradedSum, y: &GradedSum) -> Self {
        let mut out = PairSum::zero();
        for (kx, cx) in x.iter() {
            for (ky, cy) in y.iter() {
                out.add(kx.clone(), ky.clone(), cx.clone() * cy.clone());
            }
        }
        out
    }

    /// Swaps the two factors of every term.
    pub fn swapped(&self) -> Self {
        let mut out = PairSum::zero();
        for ((a, b), c) in &self.terms {
            out.add(b.clone(), a.clone(), c.clone());
        }
        out
    }
}

/// `exp(x) = Σ xᵏ/k!` truncated by the cap, for any bilinear product under
/// which `x` has positive minimum degree.
pub fn series_exp(
    x: &GradedSum,
    mul: &dyn Fn(&GradedSum, &GradedSum) -> GradedSum,
    one: GradedSum,
) -> GradedSum {
    assert!(x.min_degree().map_or(true, |d| d > 0), "exp needs positive degree");
    let mut acc = one.clone();
    let mut power = one;
    let mut k = 0i64;
    loop {
        k += 1;
        power = mul(&power, x);
        if power.is_zero() {
            break;
        }
        power = power.scale(&crate::coeff::qr(1, k));
        acc = acc.add(&power);
    }
    acc
}

/// Inverse of `u = 1 + n` (unit leading term, `n` of positive degree) by the
/// geometric series `Σ (−n)ᵏ`, exact under truncation.
pub fn series_inverse(
    u: &GradedSum,
    mul: &dyn Fn(&GradedSum, &GradedSum) -> GradedSum,
    one: GradedSum,
) -> GradedSum {
    let n = u.clone().sub(&one);
    assert!(
        n.min_degree().map_or(true, |d| d > 0),
        "inverse needs unit leading term, got {u}"
    );
    let neg = n.neg();
    let mut acc = one.clone();
    let mut power = one;
    loop {
        power = mul(&power, &neg);
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power);
    }
    acc
}

/// `log(u)` for `u = 1 + n`: `Σ (−1)^{k+1} nᵏ/k`, truncated by the cap.
pub fn series_log(
    u: &GradedSum,
    mul: &dyn Fn(&GradedSum, &GradedSum) -> GradedSum,
    one: GradedSum,
) -> GradedSum {
    let n = u.clone().sub(&one);
    assert!(n.min_degree().map_or(true, |d| d > 0), "log needs unit leading term");
    let mut acc = GradedSum::zero(u.support.clone(), u.cap);
    let mut power = one;
    let mut k = 0i64;
    loop {
        k += 1;
        power = mul(&power, &n);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&power.clone().scale(&crate::coeff::qr(sign, k)));
    }
    acc
}
