//! Inverting the symmetrization map χ.
//!
//! χ sends a character on m marks to the sum over all orderings of each
//! mark's legs along the corresponding strand; it is a graded isomorphism
//! onto the strand space. The inverse is computed degree by degree as a
//! linear solve: express the target's class in the strand quotient
//! (IHX + STU) as a combination of the χ-images of the mark-quotient basis
//! (IHX only — marks admit no STU sites), then read the combination back as
//! a character. Uniqueness of the solution is exactly χ's injectivity, so a
//! rank-deficient or inconsistent system is reported as an error rather
//! than patched over.

use ft_diagrams::{chi_symmetrize, GradedSum, Q, Support};
use num_traits::Zero;

use crate::quotient::QuotientSpace;
use crate::rows::RelationKind;
use crate::solve::{dense_rref, SparseRow};
use crate::span::{enumerate_full, SpanOptions};
use crate::Error;

/// The character on `m` marks whose symmetrization is `x` (up to the strand
/// relations), written over the mark-quotient basis.
pub fn chi_inverse(x: &GradedSum) -> Result<GradedSum, Error> {
    let m = x.support.len();
    if x.support != Support::strands(m) {
        return Err(Error::Solve(format!(
            "chi_inverse needs a standard strand support, got [{}]",
            x.support
        )));
    }
    let marks = Support::marks(m);
    let mut out = GradedSum::zero(marks.clone(), x.cap);
    let Some(top) = x.max_degree() else {
        return Ok(out); // zero sum
    };
    let span_opts = SpanOptions::default();
    for degree in 0..=top {
        let xd = x.grade(degree);
        if xd.is_zero() {
            continue;
        }
        let strand_span = enumerate_full(&x.support, degree, false, &span_opts)?;
        let strand_q =
            QuotientSpace::build(strand_span, &[RelationKind::Ihx, RelationKind::Stu])?;
        let mark_span = enumerate_full(&marks, degree, false, &span_opts)?;
        let mark_q = QuotientSpace::build(mark_span, &[RelationKind::Ihx])?;

        let unknowns = mark_q.dim();
        let rhs_col = unknowns as u32;
        let rhs = strand_q.coords(&xd)?;
        // equations: Σ_j coords(χ(basis_j))_i · u_j = coords(x_d)_i
        let mut columns: Vec<Vec<Q>> = Vec::with_capacity(unknowns);
        for key in mark_q.basis_keys() {
            let image = chi_symmetrize(&GradedSum::from_diagram(key.diagram(), degree));
            columns.push(strand_q.coords(&image)?);
        }
        let mut rows: Vec<SparseRow> = Vec::new();
        for i in 0..strand_q.dim() {
            let mut row: SparseRow = Vec::new();
            for (j, col) in columns.iter().enumerate() {
                if !col[i].is_zero() {
                    row.push((j as u32, col[i].clone()));
                }
            }
            if !rhs[i].is_zero() {
                row.push((rhs_col, rhs[i].clone()));
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
        let (pivots, reduced) = dense_rref(&rows, unknowns + 1);
        if pivots.contains(&rhs_col) {
            return Err(Error::Solve(format!(
                "no character symmetrizes to the degree-{degree} part"
            )));
        }
        for j in 0..unknowns as u32 {
            if !pivots.contains(&j) {
                return Err(Error::Solve(format!(
                    "the degree-{degree} symmetrization system is rank-deficient"
                )));
            }
        }
        let basis: Vec<&ft_diagrams::Key> = mark_q.basis_keys().collect();
        for (row, &pivot) in reduced.iter().zip(&pivots) {
            let value = row[unknowns].clone();
            if !value.is_zero() {
                out.add_canonical(basis[pivot as usize].clone(), value);
            }
        }
    }
    Ok(out)
}
