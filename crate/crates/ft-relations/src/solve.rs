//! Exact sparse Gaussian elimination over the rationals.
//!
//! Rows are sparse vectors sorted by column. Forward elimination keeps every
//! stored row integer (content 1, leading coefficient positive) and
//! eliminates by cross-multiplication followed by a gcd cleanup, which is
//! division-free up to the final normalization; pivots are the leading
//! (smallest) columns, and callers feed rows shortest-first to keep fill-in
//! down. [`Eliminator::finish`] back-substitutes into fully reduced form and
//! produces a [`Projector`]: an idempotent map that rewrites any vector on
//! the non-pivot columns.
//!
//! [`dense_rref`] is a deliberately naive dense mirror of the same reduction
//! used to cross-check dimensions and projections at tiny sizes.

use std::collections::BTreeMap;

use ft_diagrams::Q;
use num::BigInt;
use num::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse row: strictly increasing columns, nonzero coefficients.
pub type SparseRow = Vec<(u32, Q)>;

/// `out = a·x + b·y` on sorted sparse rows, dropping zeros.
pub fn axpy(a: &Q, x: &SparseRow, b: &Q, y: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let pick_x = match (x.get(i), y.get(j)) {
            (Some((cx, _)), Some((cy, _))) => {
                if cx == cy {
                    let v = a * &x[i].1 + b * &y[j].1;
                    if !v.is_zero() {
                        out.push((*cx, v));
                    }
                    i += 1;
                    j += 1;
                    continue;
                }
                cx < cy
            }
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        if pick_x {
            let v = a * &x[i].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
        } else {
            let v = b * &y[j].1;
            if !v.is_zero() {
                out.push((y[j].0, v));
            }
            j += 1;
        }
    }
    out
}

/// Scales a row to integer entries with content 1 and positive leading
/// coefficient. Empty rows pass through.
pub fn integer_normalize(row: &mut SparseRow) {
    if row.is_empty() {
        return;
    }
    let mut denom_lcm: BigInt = BigInt::one();
    for (_, c) in row.iter() {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let mut numer_gcd = BigInt::zero();
    let scaled: Vec<BigInt> =
        row.iter().map(|(_, c)| c.numer() * (&denom_lcm / c.denom())).collect();
    for n in &scaled {
        numer_gcd = numer_gcd.gcd(n);
    }
    let negate = scaled[0].is_negative();
    for ((_, c), mut n) in row.iter_mut().zip(scaled) {
        n /= &numer_gcd;
        if negate {
            n = -n;
        }
        *c = Q::from_integer(n);
    }
}

/// Incremental sparse row-echelon elimination.
#[derive(Default)]
pub struct Eliminator {
    /// pivot column → stored row (leading entry at that column).
    pivots: BTreeMap<u32, SparseRow>,
}

impl Eliminator {
    pub fn new() -> Self {
        Eliminator { pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = u32> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Eliminates every pivot column from `row` (cross-multiplication with
    /// gcd cleanup).
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut at = 0;
        while at < row.len() {
            let col = row[at].0;
            match self.pivots.get(&col) {
                None => at += 1,
                Some(p) => {
                    // p = (col, a, tail…), row = (…, col, b, …):  a·row − b·p
                    let a = p[0].1.clone();
                    let b = row[at].1.clone();
                    row = axpy(&a, &row, &-b, p);
                    integer_normalize(&mut row);
                    // entries before `at` had non-pivot columns < col and are
                    // only rescaled, never removed; the merge may insert new
                    // columns > col, so rescanning from `at` is safe.
                }
            }
        }
        row
    }

    /// Reduces and, if anything is left, stores the row as a new pivot.
    /// Returns whether the rank grew.
    pub fn add_row(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        if row.is_empty() {
            return false;
        }
        integer_normalize(&mut row);
        let col = row[0].0;
        self.pivots.insert(col, row);
        true
    }

    /// Back-substitutes into reduced row-echelon form and returns the
    /// substitution map.
    pub fn finish(self) -> Projector {
        let mut subst: BTreeMap<u32, SparseRow> = BTreeMap::new();
        // Largest pivot first: its tail columns are never pivots afterwards.
        for (&col, row) in self.pivots.iter().rev() {
            // row = (col, a, tail…) meaning a·key_col + tail = 0, so
            // key_col = −tail/a; rewrite tail entries that are pivots.
            let a = row[0].1.clone();
            let mut tail: SparseRow =
                row[1..].iter().map(|(c, v)| (*c, -(v / &a))).collect();
            let mut at = 0;
            while at < tail.len() {
                let c = tail[at].0;
                match subst.get(&c) {
                    None => at += 1,
                    Some(s) => {
                        let b = tail[at].1.clone();
                        tail.remove(at);
                        tail = axpy(&Q::one(), &tail, &b, s);
                        // merged entries at columns ≥ c; rescan from `at`
                    }
                }
            }
            subst.insert(col, tail);
        }
        Projector { subst }
    }
}

/// Idempotent projection onto the non-pivot columns of a reduced system.
#[derive(Debug, Clone)]
pub struct Projector {
    /// pivot column → its expression over non-pivot columns.
    subst: BTreeMap<u32, SparseRow>,
}

impl Projector {
    pub fn from_substitutions(subst: BTreeMap<u32, SparseRow>) -> Self {
        Projector { subst }
    }

    pub fn rank(&self) -> usize {
        self.subst.len()
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.subst.contains_key(&col)
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = u32> + '_ {
        self.subst.keys().copied()
    }

    /// The substitution row for a pivot column.
    pub fn substitution(&self, col: u32) -> Option<&SparseRow> {
        self.subst.get(&col)
    }

    /// Rewrites `v` with every pivot column substituted out. One pass
    /// suffices: substitutions are supported on non-pivot columns only.
    pub fn project(&self, v: &SparseRow) -> SparseRow {
        let mut out: BTreeMap<u32, Q> = BTreeMap::new();
        let mut acc = |col: u32, val: Q| {
            if val.is_zero() {
                return;
            }
            let e = out.entry(col).or_insert_with(Q::zero);
            *e += val;
            if e.is_zero() {
                out.remove(&col);
            }
        };
        for (col, a) in v {
            match self.subst.get(col) {
                None => acc(*col, a.clone()),
                Some(s) => {
                    for (c2, b) in s {
                        acc(*c2, a * b);
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Textbook dense reduced row echelon form; returns (pivot columns, rows).
/// For cross-checking the sparse path at small sizes only.
pub fn dense_rref(rows: &[SparseRow], ncols: usize) -> (Vec<u32>, Vec<Vec<Q>>) {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut dense = vec![Q::zero(); ncols];
            for (c, v) in r {
                dense[*c as usize] = v.clone();
            }
            dense
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, sel);
        let inv = m[rank][col].clone();
        for v in m[rank].iter_mut() {
            *v /= &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c2 in 0..ncols {
                    let delta = &f * &m[rank][c2];
                    m[r][c2] -= delta;
                }
            }
        }
        pivots.push(col as u32);
        rank += 1;
    }
    m.truncate(rank);
    (pivots, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::{q, qr};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(entries: &[(u32, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, q(v))).collect()
    }

    #[test]
    fn axpy_merges_and_cancels() {
        let x = row(&[(0, 1), (2, 3)]);
        let y = row(&[(0, 1), (1, 5)]);
        assert_eq!(axpy(&q(1), &x, &q(-1), &y), row(&[(1, -5), (2, 3)]));
    }

    #[test]
    fn normalization_clears_denominators() {
        let mut r = vec![(0u32, qr(-2, 3)), (4u32, qr(4, 9))];
        integer_normalize(&mut r);
        assert_eq!(r, row(&[(0, 3), (4, -2)]));
    }

    #[test]
    fn elimination_and_projection() {
        let mut e = Eliminator::new();
        assert!(e.add_row(row(&[(0, 1), (1, 1)])));
        assert!(e.add_row(row(&[(1, 2), (2, 2)])));
        assert!(!e.add_row(row(&[(0, 1), (2, -1)]))); // dependent
        assert_eq!(e.rank(), 2);
        let p = e.finish();
        // key0 = key2, key1 = −key2
        assert_eq!(p.project(&row(&[(0, 1)])), row(&[(2, 1)]));
        assert_eq!(p.project(&row(&[(1, 1)])), row(&[(2, -1)]));
        // projection kills the rows and is idempotent
        assert!(p.project(&row(&[(0, 1), (1, 1)])).is_empty());
        let v = row(&[(0, 7), (1, 5), (2, 1)]);
        let once = p.project(&v);
        assert_eq!(p.project(&once), once);
    }

    #[test]
    fn matches_dense_mirror_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for ncols in [4usize, 7, 10] {
            for _ in 0..20 {
                let nrows = rng.gen_range(1..=ncols + 2);
                let rows: Vec<SparseRow> = (0..nrows)
                    .map(|_| {
                        let mut r: SparseRow = Vec::new();
                        for c in 0..ncols {
                            if rng.gen_bool(0.4) {
                                let v = q(rng.gen_range(-3i64..=3));
                                if !v.is_zero() {
                                    r.push((c as u32, v));
                                }
                            }
                        }
                        r.sort_by_key(|e| e.0);
                        r
                    })
                    .collect();
                let mut e = Eliminator::new();
                for r in &rows {
                    e.add_row(r.clone());
                }
                let sparse_pivots: Vec<u32> = e.pivot_columns().collect();
                let p = e.finish();
                let (dense_pivots, dense_rows) = dense_rref(&rows, ncols);
                assert_eq!(sparse_pivots, dense_pivots);
                // dense RREF rows are relations too; projection kills them
                for dr in &dense_rows {
                    let sr: SparseRow = dr
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(c, v)| (c as u32, v.clone()))
                        .collect();
                    assert!(p.project(&sr).is_empty());
                }
                // and every input row as well
                for r in &rows {
                    assert!(p.project(r).is_empty());
                }
            }
        }
    }
}
