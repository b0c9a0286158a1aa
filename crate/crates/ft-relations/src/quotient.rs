//! Quotient spaces: a degree-pure span of canonical keys modulo the rows of
//! chosen relation families, reduced once into an idempotent projector.
//!
//! Building a quotient runs exact sparse elimination over all generated
//! rows; the surviving (non-pivot) keys form a basis, and every key of the
//! span rewrites into it. Because elimination can dominate run time on
//! large spans, finished projectors can be persisted to a versioned text
//! cache keyed by every input that determines them (support, degree, loop
//! flag, relation kinds, and a hash of the exact span keys); a cache file
//! that is missing, stale, or damaged in any way is ignored and rebuilt.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ft_diagrams::{format_frac, parse_frac, GradedSum, Q};
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::rows::{generate_relations_with, RelationKind, RowOptions};
use crate::solve::{Eliminator, Projector, SparseRow};
use crate::span::DiagramSpan;
use crate::Error;

/// A span together with the projector onto its quotient basis.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub span: DiagramSpan,
    pub kinds: Vec<RelationKind>,
    proj: Projector,
    /// Span indices of the basis (non-pivot) keys, ascending.
    basis: Vec<usize>,
}

impl QuotientSpace {
    pub fn build(span: DiagramSpan, kinds: &[RelationKind]) -> Result<Self, Error> {
        Self::build_with(span, kinds, &RowOptions::default())
    }

    pub fn build_with(
        span: DiagramSpan,
        kinds: &[RelationKind],
        opts: &RowOptions,
    ) -> Result<Self, Error> {
        Self::build_with_extra_rows(span, kinds, opts, Vec::new())
    }

    /// Builds with additional ad-hoc rows joined to the generated relation
    /// rows (columns index the span). Quotients with extra rows are not
    /// cacheable — the cache key covers relation kinds only.
    pub fn build_with_extra_rows(
        span: DiagramSpan,
        kinds: &[RelationKind],
        opts: &RowOptions,
        extra: Vec<SparseRow>,
    ) -> Result<Self, Error> {
        let rels = generate_relations_with(&span, kinds, opts)?;
        let mut rows = rels.rows;
        rows.extend(extra);
        // short rows first keeps fill-in down
        rows.sort_by_key(|r| r.len());
        let mut elim = Eliminator::new();
        for row in rows {
            elim.add_row(row);
        }
        let proj = elim.finish();
        Ok(Self::assemble(span, kinds.to_vec(), proj))
    }

    /// Builds through the cache directory: loads a valid matching cache
    /// file if one exists, otherwise builds and writes one. The returned
    /// flag is true on a cache hit.
    pub fn build_cached(
        span: DiagramSpan,
        kinds: &[RelationKind],
        opts: &RowOptions,
        dir: &Path,
    ) -> Result<(Self, bool), Error> {
        let path = cache_path(dir, &span, kinds);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Some(loaded) = load_cache(&text, &span, kinds) {
                return Ok((Self::assemble(span, kinds.to_vec(), loaded), true));
            }
        }
        let built = Self::build_with(span, kinds, opts)?;
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Cache(format!("creating {}: {e}", dir.display())))?;
        let body = render_cache(&built);
        let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
        std::fs::write(&tmp, body)
            .map_err(|e| Error::Cache(format!("writing {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| Error::Cache(format!("renaming into {}: {e}", path.display())))?;
        Ok((built, false))
    }

    fn assemble(span: DiagramSpan, kinds: Vec<RelationKind>, proj: Projector) -> Self {
        let basis: Vec<usize> =
            (0..span.len()).filter(|&i| !proj.is_pivot(i as u32)).collect();
        QuotientSpace { span, kinds, proj, basis }
    }

    /// Quotient dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Span indices of the basis keys, ascending.
    pub fn basis_indices(&self) -> &[usize] {
        &self.basis
    }

    pub fn basis_keys(&self) -> impl Iterator<Item = &ft_diagrams::Key> {
        self.basis.iter().map(|&i| self.span.key(i))
    }

    /// `x` as a sparse vector over span columns. Every term must be a span
    /// key (same support, the span's degree, loop decorations within its
    /// policy) — anything else cannot be reduced by this quotient.
    pub fn span_vector(&self, x: &GradedSum) -> Result<SparseRow, Error> {
        if x.support != self.span.support {
            return Err(Error::Solve(format!(
                "support mismatch: sum on [{}], quotient on [{}]",
                x.support, self.span.support
            )));
        }
        let mut v: SparseRow = Vec::with_capacity(x.len());
        for (k, c) in x.iter() {
            let col = self.span.index_of(k).ok_or_else(|| Error::MissingKey {
                key: ft_diagrams::diagram_to_text(k.diagram()),
                context: format!(
                    "projecting onto the degree-{} quotient",
                    self.span.degree
                ),
            })?;
            v.push((col as u32, c.clone()));
        }
        v.sort_by_key(|e| e.0);
        Ok(v)
    }

    /// The class of `x`, rewritten over basis keys.
    pub fn project(&self, x: &GradedSum) -> Result<GradedSum, Error> {
        let reduced = self.proj.project(&self.span_vector(x)?);
        let mut out = GradedSum::zero(self.span.support.clone(), x.cap);
        for (col, c) in reduced {
            out.add_canonical(self.span.key(col as usize).clone(), c);
        }
        Ok(out)
    }

    /// Dense coordinates of `x`'s class in basis order.
    pub fn coords(&self, x: &GradedSum) -> Result<Vec<Q>, Error> {
        let reduced = self.proj.project(&self.span_vector(x)?);
        let mut out = vec![Q::zero(); self.basis.len()];
        for (col, c) in reduced {
            let pos = self
                .basis
                .binary_search(&(col as usize))
                .expect("projection produced a pivot column");
            out[pos] = c;
        }
        Ok(out)
    }

    pub fn is_zero_class(&self, x: &GradedSum) -> Result<bool, Error> {
        Ok(self.proj.project(&self.span_vector(x)?).is_empty())
    }

    pub fn projector(&self) -> &Projector {
        &self.proj
    }
}

/// Hash of the exact span keys (canonical bytes, length-prefixed).
fn span_digest(span: &DiagramSpan) -> String {
    let mut h = Sha256::new();
    for k in &span.keys {
        let b = k.bytes();
        h.update((b.len() as u32).to_le_bytes());
        h.update(b);
    }
    hex(&h.finalize())
}

fn kinds_line(kinds: &[RelationKind]) -> String {
    kinds.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn cache_path(dir: &Path, span: &DiagramSpan, kinds: &[RelationKind]) -> PathBuf {
    let mut h = Sha256::new();
    h.update(header_lines(span, kinds).join("\n"));
    dir.join(format!("q-{}.txt", &hex(&h.finalize())[..16]))
}

fn header_lines(span: &DiagramSpan, kinds: &[RelationKind]) -> Vec<String> {
    vec![
        "ft-quotient-cache v1".to_string(),
        format!("support {:?}", span.support),
        format!("degree {}", span.degree),
        format!("loops {}", span.allow_loops as u8),
        format!("kinds {}", kinds_line(kinds)),
        format!("span {} {}", span.len(), span_digest(span)),
    ]
}

fn render_cache(qs: &QuotientSpace) -> String {
    let mut out = header_lines(&qs.span, &qs.kinds).join("\n");
    out.push('\n');
    let basis: Vec<String> = qs.basis.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(out, "basis {}", basis.join(" "));
    let _ = writeln!(out, "subs {}", qs.proj.rank());
    for col in qs.proj.pivot_columns() {
        let row = qs.proj.substitution(col).expect("pivot without substitution");
        let _ = write!(out, "{col} :");
        for (c, v) in row {
            let _ = write!(out, " {c} {}", format_frac(v));
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

/// A parsed quotient cache file (syntax only; the loader checks it against
/// the span it is meant for).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientCacheFile {
    pub support: String,
    pub degree: u32,
    pub loops: bool,
    pub kinds: String,
    pub span_len: usize,
    pub span_hash: String,
    pub basis: Vec<u32>,
    pub subs: Vec<(u32, SparseRow)>,
}

/// Strict line-oriented parse of the cache format; any deviation is `None`.
/// Exposed so the fuzzer can drive it directly.
pub fn parse_quotient_cache(text: &str) -> Option<QuotientCacheFile> {
    let mut lines = text.lines();
    if lines.next()? != "ft-quotient-cache v1" {
        return None;
    }
    let support = lines.next()?.strip_prefix("support ")?.to_string();
    let degree: u32 = lines.next()?.strip_prefix("degree ")?.parse().ok()?;
    let loops = match lines.next()?.strip_prefix("loops ")? {
        "0" => false,
        "1" => true,
        _ => return None,
    };
    let kinds = lines.next()?.strip_prefix("kinds ")?.to_string();
    let mut span_parts = lines.next()?.strip_prefix("span ")?.split_whitespace();
    let span_len: usize = span_parts.next()?.parse().ok()?;
    let span_hash = span_parts.next()?.to_string();
    if span_parts.next().is_some()
        || span_hash.len() != 64
        || !span_hash.bytes().all(|b| b.is_ascii_hexdigit())
    {
        return None;
    }
    let basis_line = lines.next()?.strip_prefix("basis")?;
    let mut basis: Vec<u32> = Vec::new();
    for tok in basis_line.split_whitespace() {
        basis.push(tok.parse().ok()?);
    }
    if !basis.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    let nsubs: usize = lines.next()?.strip_prefix("subs ")?.parse().ok()?;
    // cap reserves before trusting the declared count
    let mut subs: Vec<(u32, SparseRow)> = Vec::with_capacity(nsubs.min(1 << 20));
    for _ in 0..nsubs {
        let line = lines.next()?;
        let (head, tail) = line.split_once(" :")?;
        let pivot: u32 = head.parse().ok()?;
        let mut row: SparseRow = Vec::new();
        let mut toks = tail.split_whitespace();
        while let Some(col) = toks.next() {
            let col: u32 = col.parse().ok()?;
            let val = parse_frac(toks.next()?).ok()?;
            if val.is_zero() {
                return None;
            }
            if let Some(&(prev, _)) = row.last() {
                if prev >= col {
                    return None;
                }
            }
            row.push((col, val));
        }
        if let Some(&(last, _)) = subs.last() {
            if last >= pivot {
                return None;
            }
        }
        subs.push((pivot, row));
    }
    if lines.next()? != "end" || lines.next().is_some() {
        return None;
    }
    Some(QuotientCacheFile {
        support,
        degree,
        loops,
        kinds,
        span_len,
        span_hash,
        basis,
        subs,
    })
}

/// Parses and validates a cache file against the span and kinds it must
/// serve; `None` on any mismatch (the caller rebuilds).
fn load_cache(text: &str, span: &DiagramSpan, kinds: &[RelationKind]) -> Option<Projector> {
    let f = parse_quotient_cache(text)?;
    if f.support != format!("{:?}", span.support)
        || f.degree != span.degree
        || f.loops != span.allow_loops
        || f.kinds != kinds_line(kinds)
        || f.span_len != span.len()
        || f.span_hash != span_digest(span)
    {
        return None;
    }
    let n = span.len() as u32;
    let pivots: std::collections::BTreeSet<u32> = f.subs.iter().map(|&(p, _)| p).collect();
    let mut subst: BTreeMap<u32, SparseRow> = BTreeMap::new();
    for (pivot, row) in f.subs {
        if pivot >= n {
            return None;
        }
        for &(c, _) in &row {
            if c >= n || pivots.contains(&c) {
                return None;
            }
        }
        subst.insert(pivot, row);
    }
    // the stored basis must be exactly the complement of the pivots
    let complement: Vec<u32> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if f.basis != complement {
        return None;
    }
    Some(Projector::from_substitutions(subst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rows::{key_rows, RelationKind as K};
    use crate::span::{
        enumerate_diagrams, enumerate_diagrams_alt, enumerate_full, SpanOptions,
    };
    use crate::stu::stu_eliminate;
    use ft_diagrams::{DiagramBuilder, Support};

    fn vacuum_quotient(degree: u32) -> QuotientSpace {
        let span = enumerate_diagrams(&Support::empty(), degree, false, None).unwrap();
        QuotientSpace::build(span, &[K::Ihx]).unwrap()
    }

    #[test]
    fn closed_graph_dimensions_match_on_both_enumeration_routes() {
        for (degree, expect) in [(1u32, 1usize), (2, 2), (3, 3)] {
            let a = vacuum_quotient(degree);
            assert_eq!(a.dim(), expect, "degree {degree}");
            let alt =
                enumerate_diagrams_alt(&Support::empty(), degree, false, &SpanOptions::default())
                    .unwrap();
            let b = QuotientSpace::build(alt, &[K::Ihx]).unwrap();
            assert_eq!(b.dim(), expect, "degree {degree}, alternate enumeration");
        }
    }

    #[test]
    fn projection_commutes_with_the_weight_system() {
        // the sl₂ weight kills every relation row, so it must be constant on
        // classes: W(project(k)) = W(k) for every span key
        for degree in 1..=2u32 {
            let qs = vacuum_quotient(degree);
            for i in 0..qs.span.len() {
                let x = GradedSum::from_diagram(qs.span.key(i).diagram(), degree);
                let p = qs.project(&x).unwrap();
                let wx = ft_weights::weight_graded(&x).unwrap();
                let wp = ft_weights::weight_graded(&p).unwrap();
                assert_eq!(wx, wp);
            }
        }
        // and the θ class itself is certified nonzero by a nonzero weight
        let qs = vacuum_quotient(1);
        let theta = GradedSum::from_diagram(qs.span.key(0).diagram(), 1);
        assert!(!qs.is_zero_class(&theta).unwrap());
        assert!(!ft_weights::weight_graded(&theta).unwrap()[1].is_zero());
    }

    #[test]
    fn projection_is_idempotent_and_kills_every_generated_row() {
        let span =
            enumerate_full(&Support::circles(1), 2, false, &SpanOptions::default()).unwrap();
        let kinds = [K::Ihx, K::Stu];
        let qs = QuotientSpace::build(span, &kinds).unwrap();
        let opts = RowOptions::default();
        for i in 0..qs.span.len() {
            let d = qs.span.key(i).diagram();
            for kind in &kinds {
                for row in key_rows(d, kind, &opts) {
                    assert!(qs.is_zero_class(&row).unwrap(), "row of kind {kind} survives");
                }
            }
            let x = GradedSum::from_diagram(d, 2);
            let once = qs.project(&x).unwrap();
            let twice = qs.project(&once).unwrap();
            assert!(once.sub(&twice).is_zero());
        }
        for k in qs.basis_keys() {
            let x = GradedSum::from_diagram(k.diagram(), 2);
            assert!(qs.project(&x).unwrap().sub(&x).is_zero());
        }
    }

    #[test]
    fn sparse_elimination_matches_the_dense_mirror() {
        let span =
            enumerate_full(&Support::circles(1), 2, false, &SpanOptions::default()).unwrap();
        let rels =
            crate::rows::generate_relations(&span, &[K::Ihx, K::Stu]).unwrap();
        let (dense_pivots, _) = crate::solve::dense_rref(&rels.rows, span.len());
        let qs = QuotientSpace::build(span, &[K::Ihx, K::Stu]).unwrap();
        let sparse_pivots: Vec<u32> = qs.projector().pivot_columns().collect();
        assert_eq!(dense_pivots, sparse_pivots);
    }

    #[test]
    fn stu_elimination_lands_in_the_same_class() {
        // Y on a strand versus its chord resolution
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (x0, x1) = b.edge();
        let (y0, y1) = b.edge();
        let (z0, z1) = b.edge();
        b.leg(0, x0);
        b.leg(0, y0);
        b.leg(0, z0);
        b.vertex([x1, y1, z1]);
        let y = GradedSum::from_diagram(&b.finish(), 2);
        let resolved = stu_eliminate(&y).unwrap();
        let span =
            enumerate_full(&Support::strands(1), 2, false, &SpanOptions::default()).unwrap();
        let qs = QuotientSpace::build(span, &[K::Ihx, K::Stu]).unwrap();
        assert!(qs.is_zero_class(&y.clone().sub(&resolved)).unwrap());
        assert!(!qs.is_zero_class(&y).unwrap());
    }

    /// one circle, relations for the first invariant step: graded dimensions
    /// (0, 1, 1) in degrees 0, 1, 2 — generators the single chord and the
    /// chord next to a detached θ
    #[test]
    fn one_circle_low_degree_quotient_dimensions() {
        let kinds =
            [K::Ihx, K::Stu, K::FewLegs(1), K::Pairings(2), K::LoopFactor(1)];
        let mut dims = Vec::new();
        for degree in 0..=2u32 {
            let span =
                enumerate_full(&Support::circles(1), degree, true, &SpanOptions::default())
                    .unwrap();
            let qs = QuotientSpace::build(span, &kinds).unwrap();
            if degree == 1 {
                let mut b = DiagramBuilder::new(Support::circles(1));
                let (x, y) = b.edge();
                b.leg(0, x);
                b.leg(0, y);
                let chord = GradedSum::from_diagram(&b.finish(), 1);
                assert!(!qs.is_zero_class(&chord).unwrap());
            }
            dims.push(qs.dim());
        }
        assert_eq!(dims, vec![0, 1, 1]);
    }

    /// two circles: degrees 0, 1, 2 give (0, 0, 1) — nothing survives until
    /// both circles carry a chord
    #[test]
    fn two_circle_low_degree_quotient_dimensions() {
        let kinds =
            [K::Ihx, K::Stu, K::FewLegs(1), K::Pairings(2), K::LoopFactor(1)];
        let mut dims = Vec::new();
        for degree in 0..=2u32 {
            let span =
                enumerate_full(&Support::circles(2), degree, true, &SpanOptions::default())
                    .unwrap();
            let qs = QuotientSpace::build(span, &kinds).unwrap();
            dims.push(qs.dim());
        }
        assert_eq!(dims, vec![0, 0, 1]);
        // the surviving class is chord ⊔ chord
        let span =
            enumerate_full(&Support::circles(2), 2, true, &SpanOptions::default()).unwrap();
        let qs = QuotientSpace::build(span, &kinds).unwrap();
        let mut b = DiagramBuilder::new(Support::circles(2));
        let (x, y) = b.edge();
        let (u, v) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        b.leg(1, u);
        b.leg(1, v);
        let pair = GradedSum::from_diagram(&b.finish(), 2);
        assert!(!qs.is_zero_class(&pair).unwrap());
    }

    #[test]
    fn cache_round_trip_and_damage_recovery() {
        let dir = tempfile::tempdir().unwrap();
        let kinds = [K::Ihx, K::Stu];
        let fresh_span =
            || enumerate_full(&Support::circles(1), 2, false, &SpanOptions::default()).unwrap();
        let opts = RowOptions::default();
        let (built, hit1) =
            QuotientSpace::build_cached(fresh_span(), &kinds, &opts, dir.path()).unwrap();
        assert!(!hit1);
        let (loaded, hit2) =
            QuotientSpace::build_cached(fresh_span(), &kinds, &opts, dir.path()).unwrap();
        assert!(hit2);
        assert_eq!(built.dim(), loaded.dim());
        assert_eq!(built.basis_indices(), loaded.basis_indices());
        for i in 0..built.span.len() {
            let x = GradedSum::from_diagram(built.span.key(i).diagram(), 2);
            assert!(built.project(&x).unwrap().sub(&loaded.project(&x).unwrap()).is_zero());
        }
        // different kinds hash to a different file
        let (_, hit3) =
            QuotientSpace::build_cached(fresh_span(), &[K::Ihx], &opts, dir.path()).unwrap();
        assert!(!hit3);
        // damage every cache file; the loader must rebuild, then re-hit
        for entry in std::fs::read_dir(dir.path()).unwrap() {
            let p = entry.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            std::fs::write(&p, &text[..text.len() / 2]).unwrap();
        }
        let (rebuilt, hit4) =
            QuotientSpace::build_cached(fresh_span(), &kinds, &opts, dir.path()).unwrap();
        assert!(!hit4);
        assert_eq!(rebuilt.dim(), built.dim());
        let (_, hit5) =
            QuotientSpace::build_cached(fresh_span(), &kinds, &opts, dir.path()).unwrap();
        assert!(hit5);
    }

    #[test]
    fn cache_parser_rejects_malformed_inputs() {
        let qs = vacuum_quotient(2);
        let good = render_cache(&qs);
        assert!(parse_quotient_cache(&good).is_some());
        let mutations = [
            good.replace("v1", "v2"),
            good.replace("end\n", ""),
            format!("{good}extra\n"),
            good.replace("degree", "degre"),
            good.replacen("0", "x", 1),
        ];
        for (i, bad) in mutations.iter().enumerate() {
            if bad == &good {
                continue;
            }
            assert!(parse_quotient_cache(bad).is_none(), "mutation {i} accepted");
        }
    }

    #[test]
    fn rejects_sums_outside_the_span() {
        let qs = vacuum_quotient(1);
        // wrong support
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        let chord = GradedSum::from_diagram(&b.finish(), 1);
        assert!(matches!(qs.project(&chord), Err(Error::Solve(_))));
        // right support, wrong degree
        let span = enumerate_diagrams(&Support::empty(), 2, false, None).unwrap();
        let theta2 = GradedSum::from_diagram(span.key(0).diagram(), 2);
        assert!(matches!(qs.project(&theta2), Err(Error::MissingKey { .. })));
        let one = GradedSum::one(Support::empty(), 1);
        assert!(matches!(qs.project(&one), Err(Error::MissingKey { .. })));
    }
}
