//! Supports: ordered collections of oriented 1-manifold components (circles,
//! intervals/arcs, and unordered marks) that Jacobi diagrams live on.

use std::fmt;

/// A boundary anchor of an arc component. `Top(i)`/`Bot(i)` are the i-th
/// position (0-based) on the upper/lower boundary of a tangle; standalone
/// interval supports use `Top(i) → Bot(i)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum End {
    Top(u16),
    Bot(u16),
}

/// Component shapes.
///
/// * `Circle` — closed oriented component; legs are stored in cyclic order
///   along the orientation from an arbitrary base point (canonicalization
///   picks the rotation).
/// * `Path` — an arc with two boundary anchors; legs are stored in the
///   geometric order from `from` to `to`.
/// * `Mark` — a label carrying an *unordered* set of legs (the Θ-sets of
///   symmetrized characters).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Kind {
    Circle,
    Path { from: End, to: End },
    Mark,
}

/// One support component.
///
/// `reversed` flags the orientation relative to the component's original
/// sense. A circle's stored cyclic leg order *always* follows its flow
/// (reversing a circle reverses the stored list along with the flag); a
/// path keeps geometric `from → to` storage order, so its flow follows
/// storage exactly when `reversed` is `false` (for standard strands:
/// downward). Marks ignore the flag.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Component {
    pub kind: Kind,
    pub reversed: bool,
    /// Semantic identifier (link-component number, strand number, mark
    /// number). Independent of the component's position in the list.
    pub label: u32,
}

/// An ordered list of components. Positions are 0-based internally; the text
/// format uses 1-based `c1, c2, …`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Support {
    pub components: Vec<Component>,
}

impl Support {
    /// The empty support (closed dashed graphs live here).
    pub fn empty() -> Self {
        Support { components: Vec::new() }
    }

    /// `l` circles labeled `1..=l`.
    pub fn circles(l: usize) -> Self {
        Support {
            components: (0..l)
                .map(|i| Component { kind: Kind::Circle, reversed: false, label: i as u32 + 1 })
                .collect(),
        }
    }

    /// `m` downward strands labeled `1..=m` (the support of string-link
    /// values): strand `i` runs from top position `i` to bottom position `i`.
    pub fn strands(m: usize) -> Self {
        Support {
            components: (0..m)
                .map(|i| Component {
                    kind: Kind::Path { from: End::Top(i as u16), to: End::Bot(i as u16) },
                    reversed: false,
                    label: i as u32 + 1,
                })
                .collect(),
        }
    }

    /// `m` marks labeled `1..=m` (supports of marked characters).
    pub fn marks(m: usize) -> Self {
        Support {
            components: (0..m)
                .map(|i| Component { kind: Kind::Mark, reversed: false, label: i as u32 + 1 })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// True when every component is a circle.
    pub fn all_circles(&self) -> bool {
        self.components.iter().all(|c| matches!(c.kind, Kind::Circle))
    }

    /// True when every component is a path (string-link style support).
    pub fn all_paths(&self) -> bool {
        self.components.iter().all(|c| matches!(c.kind, Kind::Path { .. }))
    }

    /// True when every component is a mark.
    pub fn all_marks(&self) -> bool {
        self.components.iter().all(|c| matches!(c.kind, Kind::Mark))
    }

    /// Position of the component with semantic label `label`.
    pub fn position_of_label(&self, label: u32) -> Option<usize> {
        self.components.iter().position(|c| c.label == label)
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let orient = if c.reversed { "-" } else { "+" };
            match c.kind {
                Kind::Circle => write!(f, "c{}:circle{}", i + 1, orient)?,
                Kind::Path { .. } => write!(f, "c{}:interval{}", i + 1, orient)?,
                Kind::Mark => write!(f, "c{}:mark", i + 1)?,
            }
        }
        Ok(())
    }
}
