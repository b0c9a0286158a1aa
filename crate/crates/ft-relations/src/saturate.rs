//! Worklist closure of a seed set under relation rows.
//!
//! Starting from seed keys, every relation row sourced at a known key is
//! generated and all keys appearing in it are added, until nothing new
//! appears. All row families preserve degree, so the closure stays inside
//! one graded piece.
//!
//! Caveat spelled out because it matters: row adjacency is *directed* — a
//! row sourced at key `a` may involve key `b` while no row sourced at `b`
//! ever reaches `a` (STU rows, for instance, are sourced at the
//! vertex-bearing side). A closure can therefore miss relations that a full
//! enumeration would find, and quotients over saturated spans are upper
//! bounds on dimension. Callers certify completeness externally (dimension
//! checks against known values, budget doubling, or cross-routes through
//! full spans).

use std::collections::BTreeSet;

use ft_diagrams::{Key, Support};

use crate::rows::{key_rows, RelationKind, RowOptions};
use crate::span::DiagramSpan;
use crate::Error;

pub fn saturated_span(
    support: &Support,
    degree: u32,
    allow_loops: bool,
    seeds: &[Key],
    kinds: &[RelationKind],
    opts: &RowOptions,
    key_budget: u64,
) -> Result<DiagramSpan, Error> {
    for s in seeds {
        let d = s.diagram();
        if d.support != *support || d.degree() != degree {
            return Err(Error::Solve(format!(
                "seed {} does not live on the requested space",
                ft_diagrams::diagram_to_text(d)
            )));
        }
        if !allow_loops && d.loops > 0 {
            return Err(Error::Solve(
                "seed carries loop decorations in a loop-free span".to_string(),
            ));
        }
    }
    let mut done: BTreeSet<Key> = BTreeSet::new();
    let mut queue: Vec<Key> = seeds.to_vec();
    let mut processed = 0u64;
    while let Some(key) = queue.pop() {
        if !done.insert(key.clone()) {
            continue;
        }
        processed += 1;
        if processed > key_budget {
            return Err(Error::Budget(format!(
                "saturation exceeded {key_budget} keys"
            )));
        }
        for kind in kinds {
            for row in key_rows(key.diagram(), kind, opts) {
                for (k, _) in row.iter() {
                    if !done.contains(k) {
                        queue.push(k.clone());
                    }
                }
            }
        }
    }
    Ok(DiagramSpan::from_keys(
        support.clone(),
        degree,
        allow_loops,
        done.into_iter().collect(),
    ))
}
