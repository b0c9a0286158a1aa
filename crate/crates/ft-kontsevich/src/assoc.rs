//! A rational even Drinfeld associator, solved degree by degree.
//!
//! The associator is found as Φ = exp(ξ) with ξ a Lie series in the two
//! chords a = t₁₂, b = t₂₃, expressed over the Lyndon bracket basis. The
//! pentagon equation (on four strands) and both hexagon equations (on
//! three) are evaluated in the horizontal-chord algebra of [`crate::dk`];
//! at each even degree the unknown Lyndon coefficients enter the residual
//! linearly — one slot-insertion per Φ occurrence, negated for Φ⁻¹ — so a
//! small exact linear solve pins them, with free coordinates set to zero.
//! Odd degrees take no correction: the solver demands the residual already
//! vanish there, which is what makes the associator even. A final pass
//! re-evaluates every equation from scratch and fails hard unless all
//! degrees reduce to zero.
//!
//! The solved series converts to chordal diagram form for the slice
//! evaluator, and round-trips through a small fixture file holding the
//! Lyndon coordinates of log Φ under a content digest.

use std::collections::BTreeMap;
use std::path::Path;

use ft_diagrams::{format_frac, parse_frac, qr, GradedSum, Q, Support};
use ft_relations::{dense_rref, SparseRow};
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::cable::cable_strands;
use crate::dk::{dk_cable, dk_commutator, dk_exp, dk_relabel, to_diagrams, DkAlgebra, DkSum};
use crate::Error;

/// A solved associator: the chordal series on three strands, its inverse,
/// and the Lyndon coordinates of its logarithm.
#[derive(Debug, Clone)]
pub struct Associator {
    pub cap: u32,
    /// Lyndon words over the letters `a` = t₁₂, `b` = t₂₃ with their
    /// coefficients in log Φ, sorted by degree then word.
    pub log: Vec<(String, Q)>,
    /// Φ as a chordal diagram series on three strands.
    pub series: GradedSum,
    /// Φ⁻¹ = exp(−log Φ), same form.
    pub inverse: GradedSum,
    /// Content digest of the fixture body for this solution.
    pub digest: String,
}

/// Solves the pentagon and hexagon equations through degree `cap`.
pub fn solve_associator(cap: u32) -> Result<Associator, Error> {
    Associator::solve(cap)
}

struct Equations {
    alg3: DkAlgebra,
    alg4: DkAlgebra,
}

impl Equations {
    fn new(cap: u32) -> Self {
        Equations { alg3: DkAlgebra::new(3, cap), alg4: DkAlgebra::new(4, cap) }
    }

    /// Φ₁₂₃ · (1⊗Δ)Φ · Φ₂₃₄  −  (Δ⊗1)Φ · (1⊗1⊗Δ)Φ on four strands.
    fn pentagon(&self, phi: &DkSum) -> DkSum {
        let f123 = dk_relabel(phi, 4, &[0, 1, 2]);
        let f234 = dk_relabel(phi, 4, &[1, 2, 3]);
        let mid = dk_cable(phi, &[1, 2, 1]);
        let left = dk_cable(phi, &[2, 1, 1]);
        let right = dk_cable(phi, &[1, 1, 2]);
        f234.mul(&mid).mul(&f123).sub(&right.mul(&left))
    }

    /// Both hexagons for R = exp(t/2), as LHS − RHS.
    fn hexagons(&self, phi: &DkSum, phi_inv: &DkSum) -> (DkSum, DkSum) {
        let (n, cap) = (3, phi.cap);
        let g01 = DkSum::gen(n, cap, 0, 1);
        let g02 = DkSum::gen(n, cap, 0, 2);
        let g12 = DkSum::gen(n, cap, 1, 2);
        let r = |x: &DkSum| dk_exp(&x.clone().scale(&qr(1, 2)));
        let h1 = r(&g02.clone().add(&g12)).sub(
            &dk_relabel(phi, 3, &[2, 0, 1])
                .mul(&r(&g02))
                .mul(&dk_relabel(phi_inv, 3, &[0, 2, 1]))
                .mul(&r(&g12))
                .mul(phi),
        );
        let h2 = r(&g01.clone().add(&g02)).sub(
            &dk_relabel(phi_inv, 3, &[1, 2, 0])
                .mul(&r(&g02))
                .mul(&dk_relabel(phi, 3, &[1, 0, 2]))
                .mul(&r(&g01))
                .mul(phi_inv),
        );
        (h1, h2)
    }

    /// Derivative of the pentagon residual in the top-degree unknown: one
    /// insertion per Φ slot, positive for Φ, negative for Φ⁻¹.
    fn pentagon_linear(&self, x: &DkSum) -> DkSum {
        dk_relabel(x, 4, &[0, 1, 2])
            .add(&dk_cable(x, &[1, 2, 1]))
            .add(&dk_relabel(x, 4, &[1, 2, 3]))
            .sub(&dk_cable(x, &[2, 1, 1]))
            .sub(&dk_cable(x, &[1, 1, 2]))
    }

    fn hexagons_linear(&self, x: &DkSum) -> (DkSum, DkSum) {
        let l1 = dk_relabel(x, 3, &[2, 0, 1])
            .sub(&dk_relabel(x, 3, &[0, 2, 1]))
            .add(x)
            .neg();
        let l2 = dk_relabel(x, 3, &[1, 2, 0]).sub(&dk_relabel(x, 3, &[1, 0, 2])).add(x);
        (l1, l2)
    }

    /// Residual coordinates at one degree, stacked over the three spaces.
    fn coords_at(&self, p: &DkSum, h1: &DkSum, h2: &DkSum, d: u32) -> Vec<(u8, u32, Q)> {
        let mut out = Vec::new();
        for (s, row) in [
            (0u8, &self.alg4.coords(p)[d as usize]),
            (1, &self.alg3.coords(h1)[d as usize]),
            (2, &self.alg3.coords(h2)[d as usize]),
        ] {
            out.extend(row.iter().map(|(c, v)| (s, *c, v.clone())));
        }
        out
    }
}

/// All Lyndon words of length `len` over the two letters `{0, 1}`, in
/// lexicographic order (Duval's generation).
fn lyndon_words(len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w = vec![0u8];
    loop {
        if w.len() == len {
            out.push(w.clone());
        }
        let mut t: Vec<u8> = (0..len).map(|i| w[i % w.len()]).collect();
        while t.last() == Some(&1) {
            t.pop();
        }
        if t.is_empty() {
            return out;
        }
        *t.last_mut().unwrap() += 1;
        w = t;
    }
}

/// The bracketing of a Lyndon word through its standard factorization,
/// expanded into the chord generators a = t₁₂, b = t₂₃.
fn bracket(w: &[u8], cap: u32) -> DkSum {
    if w.len() == 1 {
        return match w[0] {
            0 => DkSum::gen(3, cap, 0, 1),
            _ => DkSum::gen(3, cap, 1, 2),
        };
    }
    // the longest proper Lyndon suffix is the lexicographically least one
    let split = (1..w.len()).min_by_key(|&i| w[i..].to_vec()).unwrap();
    dk_commutator(&bracket(&w[..split], cap), &bracket(&w[split..], cap))
}

fn word_string(w: &[u8]) -> String {
    w.iter().map(|&l| if l == 0 { 'a' } else { 'b' }).collect()
}

fn parse_word(s: &str) -> Result<Vec<u8>, Error> {
    s.chars()
        .map(|ch| match ch {
            'a' => Ok(0),
            'b' => Ok(1),
            _ => Err(Error::Cache(format!("associator fixture: bad letter {ch:?}"))),
        })
        .collect()
}

impl Associator {
    /// Solves from scratch and verifies every equation.
    pub fn solve(cap: u32) -> Result<Self, Error> {
        let eqs = Equations::new(cap);
        let mut xi = DkSum::zero(3, cap);
        let mut log: BTreeMap<Vec<u8>, Q> = BTreeMap::new();

        for k in 2..=cap {
            let phi = dk_exp(&xi);
            let phi_inv = dk_exp(&xi.clone().neg());
            let p = eqs.pentagon(&phi);
            let (h1, h2) = eqs.hexagons(&phi, &phi_inv);
            for d in 0..k {
                if !eqs.coords_at(&p, &h1, &h2, d).is_empty() {
                    return Err(Error::Check(format!(
                        "associator residual survives at degree {d} before solving degree {k}"
                    )));
                }
            }
            let base = eqs.coords_at(&p, &h1, &h2, k);
            if k % 2 == 1 {
                if !base.is_empty() {
                    return Err(Error::Check(format!(
                        "odd degree {k} residual is nonzero; no even associator from here"
                    )));
                }
                continue;
            }

            let unknowns: Vec<Vec<u8>> = lyndon_words(k as usize);
            let columns: Vec<Vec<(u8, u32, Q)>> = unknowns
                .iter()
                .map(|w| {
                    let b = bracket(w, cap);
                    let lp = eqs.pentagon_linear(&b);
                    let (l1, l2) = eqs.hexagons_linear(&b);
                    eqs.coords_at(&lp, &l1, &l2, k)
                })
                .collect();

            // one row per coordinate appearing anywhere: Σ_j A_j x_j + base = 0
            let width = unknowns.len();
            let mut rows: BTreeMap<(u8, u32), SparseRow> = BTreeMap::new();
            for (j, col) in columns.iter().enumerate() {
                for (s, c, v) in col {
                    rows.entry((*s, *c)).or_default().push((j as u32, v.clone()));
                }
            }
            for (s, c, v) in &base {
                rows.entry((*s, *c)).or_default().push((width as u32, v.clone()));
            }
            let system: Vec<SparseRow> = rows.into_values().collect();
            let (pivots, reduced) = dense_rref(&system, width + 1);
            if pivots.contains(&(width as u32)) {
                return Err(Error::Check(format!(
                    "degree {k} associator equations are inconsistent"
                )));
            }
            for (i, &p) in pivots.iter().enumerate() {
                let value = -reduced[i][width].clone();
                if value.is_zero() {
                    continue;
                }
                let w = &unknowns[p as usize];
                xi = xi.add(&bracket(w, cap).scale(&value));
                log.insert(w.clone(), value);
            }
        }

        let phi = dk_exp(&xi);
        let phi_inv = dk_exp(&xi.clone().neg());
        let mut log: Vec<(String, Q)> =
            log.into_iter().map(|(w, c)| (word_string(&w), c)).collect();
        log.sort_by_key(|(w, _)| (w.len(), w.clone()));
        let body = fixture_body(cap, &log);
        let out = Associator {
            cap,
            log,
            series: to_diagrams(&phi),
            inverse: to_diagrams(&phi_inv),
            digest: format!("{:x}", Sha256::digest(body.as_bytes())),
        };
        out.verify()?;
        Ok(out)
    }

    /// Re-derives Φ from the stored logarithm and checks the pentagon, both
    /// hexagons, strand-deletion triviality, vanishing of odd degrees, and
    /// agreement of the stored series with the rebuilt one.
    pub fn verify(&self) -> Result<(), Error> {
        let cap = self.cap;
        let mut xi = DkSum::zero(3, cap);
        for (w, c) in &self.log {
            xi = xi.add(&bracket(&parse_word(w)?, cap).scale(c));
        }
        let phi = dk_exp(&xi);
        let phi_inv = dk_exp(&xi.clone().neg());

        let eqs = Equations::new(cap);
        let p = eqs.pentagon(&phi);
        let (h1, h2) = eqs.hexagons(&phi, &phi_inv);
        for d in 0..=cap {
            let left = eqs.coords_at(&p, &h1, &h2, d);
            if !left.is_empty() {
                return Err(Error::Check(format!(
                    "associator residual survives at degree {d}: {} coordinates",
                    left.len()
                )));
            }
        }

        if !self.series.clone().sub(&to_diagrams(&phi)).is_zero()
            || !self.inverse.clone().sub(&to_diagrams(&phi_inv)).is_zero()
        {
            return Err(Error::Check("stored series disagrees with its logarithm".into()));
        }
        for d in (1..=cap).step_by(2) {
            if !self.series.grade(d).is_zero() {
                return Err(Error::Check(format!("odd degree {d} of Φ is nonzero")));
            }
        }
        let one2 = GradedSum::one(Support::strands(2), cap);
        for i in 0..3 {
            let mut mult = [1usize; 3];
            mult[i] = 0;
            if !cable_strands(&self.series, &mult).sub(&one2).is_zero() {
                return Err(Error::Check(format!("deleting strand {i} of Φ is not 1")));
            }
        }
        Ok(())
    }

    /// Writes the fixture file for this solution.
    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let body = fixture_body(self.cap, &self.log);
        let text = format!("{body}digest {}\nend\n", self.digest);
        std::fs::write(path, text)
            .map_err(|e| Error::Cache(format!("associator fixture {}: {e}", path.display())))
    }

    /// Loads a fixture file, checking its digest byte-for-byte.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Cache(format!("associator fixture {}: {e}", path.display())))?;
        let lines: Vec<&str> = text.lines().collect();
        let bad = |m: &str| Error::Cache(format!("associator fixture {}: {m}", path.display()));
        if lines.len() < 4 || lines[0] != "ft-associator v1" {
            return Err(bad("missing header"));
        }
        if lines[lines.len() - 1] != "end" {
            return Err(bad("missing end marker"));
        }
        let digest_line = lines[lines.len() - 2]
            .strip_prefix("digest ")
            .ok_or_else(|| bad("missing digest"))?;
        let body_lines = &lines[..lines.len() - 2];
        let body = body_lines.join("\n") + "\n";
        let digest = format!("{:x}", Sha256::digest(body.as_bytes()));
        if digest != digest_line {
            return Err(bad("digest mismatch"));
        }
        let cap: u32 = lines[1]
            .strip_prefix("cap ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("missing cap"))?;
        let mut log = Vec::new();
        let mut xi = DkSum::zero(3, cap);
        for line in &body_lines[2..] {
            let (frac, word) = line.split_once(" : ").ok_or_else(|| bad("bad line"))?;
            let c = parse_frac(frac).map_err(|e| bad(&e))?;
            let w = parse_word(word)?;
            if w.is_empty() || w.len() as u32 > cap {
                return Err(bad("word outside degree range"));
            }
            xi = xi.add(&bracket(&w, cap).scale(&c));
            log.push((word.to_string(), c));
        }
        let phi = dk_exp(&xi);
        let phi_inv = dk_exp(&xi.clone().neg());
        Ok(Associator {
            cap,
            log,
            series: to_diagrams(&phi),
            inverse: to_diagrams(&phi_inv),
            digest,
        })
    }

    /// Loads when the fixture exists at the right cap, else solves and
    /// saves.
    pub fn load_or_solve(cap: u32, path: &Path) -> Result<Self, Error> {
        if path.exists() {
            let got = Self::load(path)?;
            if got.cap == cap {
                return Ok(got);
            }
        }
        let solved = Self::solve(cap)?;
        solved.save(path)?;
        Ok(solved)
    }
}

fn fixture_body(cap: u32, log: &[(String, Q)]) -> String {
    let mut sorted: Vec<&(String, Q)> = log.iter().collect();
    sorted.sort_by_key(|(w, _)| (w.len(), w.clone()));
    let mut body = format!("ft-associator v1\ncap {cap}\n");
    for (w, c) in sorted {
        body.push_str(&format!("{} : {w}\n", format_frac(c)));
    }
    body
}

#[cfg(test)]
mod tests {
    use super::*;
    use ft_diagrams::stack_product;

    fn chord(a: usize, b: usize, cap: u32) -> GradedSum {
        crate::cable::chord(3, a, b, cap)
    }

    #[test]
    fn hexagons_pin_the_classical_degree_two_term() {
        let phi = Associator::solve(2).unwrap();
        // Φ = 1 + [t₁₂, t₂₃]/24 through degree 2
        let t12 = chord(0, 1, 2);
        let t23 = chord(1, 2, 2);
        let comm = stack_product(&t12, &t23).sub(&stack_product(&t23, &t12));
        let want = GradedSum::one(Support::strands(3), 2).add(&comm.scale(&qr(1, 24)));
        assert!(phi.series.clone().sub(&want).is_zero());
        assert_eq!(phi.log, vec![("ab".to_string(), qr(1, 24))]);
    }

    #[test]
    fn the_degree_four_solve_passes_its_own_verification() {
        let phi = Associator::solve(4).unwrap();
        assert!(phi.verify().is_ok());
        // the logarithm stays even
        assert!(phi.log.iter().all(|(w, _)| w.len() % 2 == 0));
        // inverse really inverts, raw
        let prod = stack_product(&phi.series, &phi.inverse);
        assert!(prod.sub(&GradedSum::one(Support::strands(3), 4)).is_zero());
    }

    #[test]
    fn fixtures_roundtrip_and_reject_tampering() {
        let phi = Associator::solve(4).unwrap();
        let dir = std::env::temp_dir().join(format!("ft-assoc-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("associator-cap4.txt");
        phi.save(&path).unwrap();
        let back = Associator::load(&path).unwrap();
        assert_eq!(back.digest, phi.digest);
        assert_eq!(back.log, phi.log);
        assert!(back.series.clone().sub(&phi.series).is_zero());

        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen("1/24", "1/25", 1);
        std::fs::write(&path, text).unwrap();
        assert!(matches!(Associator::load(&path), Err(Error::Cache(_))));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn checked_in_fixture_matches_a_fresh_solve() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures/v1/associator-cap4.txt");
        let stored = Associator::load(&path).unwrap();
        let solved = Associator::solve(4).unwrap();
        assert_eq!(stored.digest, solved.digest);
        assert_eq!(stored.cap, 4);
        stored.verify().unwrap();
    }

    #[test]
    #[ignore = "writes the checked-in fixture; run once after changing the solver"]
    fn regenerate_checked_in_fixture() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures/v1/associator-cap4.txt");
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        Associator::solve(4).unwrap().save(&path).unwrap();
    }
}
