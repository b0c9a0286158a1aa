//! The diagram term object: a support together with a vertex-oriented
//! uni-trivalent dashed graph attached to it.
//!
//! Dashed edges are stored as a perfect matching (`mate`) on *edge-ends*.
//! Every edge-end occurs exactly once either as a leg (attached to a support
//! component) or as a slot of an internal trivalent vertex. Closed dashed
//! circles with no vertices at all are not representable that way and are
//! counted separately in `loops`.

use crate::support::Support;

/// Identifier of an edge-end. Edge `k` owns the ends `2k` and `2k+1`.
pub type EndId = u32;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Diagram {
    pub support: Support,
    /// Per component: the edge-ends attached to it, in storage order
    /// (cyclic for circles, `from → to` for paths, arbitrary for marks).
    pub legs: Vec<Vec<EndId>>,
    /// Internal trivalent vertices; the three slots are in cyclic order.
    pub verts: Vec<[EndId; 3]>,
    /// Fixed-point-free involution pairing edge-ends into edges.
    pub mate: Vec<EndId>,
    /// Number of dashed circle components with no vertices.
    pub loops: u32,
}

impl Diagram {
    /// The empty diagram on the given support.
    pub fn empty(support: Support) -> Self {
        let l = support.len();
        Diagram { support, legs: vec![Vec::new(); l], verts: Vec::new(), mate: Vec::new(), loops: 0 }
    }

    /// Total number of legs over all components.
    pub fn total_legs(&self) -> usize {
        self.legs.iter().map(Vec::len).sum()
    }

    /// Number of internal (trivalent) vertices.
    pub fn internal_count(&self) -> usize {
        self.verts.len()
    }

    /// Half the number of dashed-graph vertices (external and internal).
    /// Free loops contribute nothing.
    pub fn degree(&self) -> u32 {
        let v = self.total_legs() + self.verts.len();
        debug_assert!(v % 2 == 0, "odd vertex count");
        (v / 2) as u32
    }

    /// Structural validation; returns a description of the first problem.
    pub fn check(&self) -> Result<(), String> {
        if self.legs.len() != self.support.len() {
            return Err(format!(
                "legs lists ({}) do not match support components ({})",
                self.legs.len(),
                self.support.len()
            ));
        }
        let n = self.mate.len();
        if n % 2 != 0 {
            return Err("odd number of edge-ends".into());
        }
        let mut seen = vec![false; n];
        let mut mark = |e: EndId| -> Result<(), String> {
            let i = e as usize;
            if i >= n {
                return Err(format!("edge-end {e} out of range"));
            }
            if seen[i] {
                return Err(format!("edge-end {e} used twice"));
            }
            seen[i] = true;
            Ok(())
        };
        for ends in &self.legs {
            for &e in ends {
                mark(e)?;
            }
        }
        for v in &self.verts {
            for &e in v {
                mark(e)?;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(format!("edge-end {i} attached nowhere"));
        }
        for e in 0..n as EndId {
            let m = self.mate[e as usize];
            if m as usize >= n || m == e || self.mate[m as usize] != e {
                return Err(format!("mate is not a fixed-point-free involution at end {e}"));
            }
        }
        if (self.total_legs() + self.verts.len()) % 2 != 0 {
            return Err("odd total vertex count".into());
        }
        Ok(())
    }

    /// Which vertex (if any) an edge-end belongs to.
    fn vertex_of(&self) -> Vec<Option<u32>> {
        let mut owner = vec![None; self.mate.len()];
        for (vi, v) in self.verts.iter().enumerate() {
            for &e in v {
                owner[e as usize] = Some(vi as u32);
            }
        }
        owner
    }

    /// True when some edge joins two slots of one internal vertex (such a
    /// diagram is zero by antisymmetry).
    pub fn has_tadpole(&self) -> bool {
        let owner = self.vertex_of();
        (0..self.mate.len()).any(|e| {
            let m = self.mate[e] as usize;
            match (owner[e], owner[m]) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            }
        })
    }

    /// Partition of the dashed graph into connected components (legs included;
    /// connectivity runs through edges and internal vertices, not through the
    /// support). Returns, per dashed component, the sorted lists of its
    /// edge-ends and of its internal vertices. Free loops are *not* listed.
    pub fn dashed_components(&self) -> Vec<DashedComponent> {
        let n = self.mate.len();
        let mut uf = UnionFind::new(n);
        for e in 0..n {
            uf.union(e, self.mate[e] as usize);
        }
        for v in &self.verts {
            uf.union(v[0] as usize, v[1] as usize);
            uf.union(v[0] as usize, v[2] as usize);
        }
        let mut groups: std::collections::BTreeMap<usize, DashedComponent> = Default::default();
        for e in 0..n {
            let r = uf.find(e);
            groups.entry(r).or_default().ends.push(e as EndId);
        }
        for (vi, v) in self.verts.iter().enumerate() {
            let r = uf.find(v[0] as usize);
            groups.entry(r).or_default().verts.push(vi as u32);
        }
        groups.into_values().collect()
    }

    /// True when some internal vertex is joined by an edge to a leg on
    /// component `c`.
    pub fn has_vertex_near(&self, c: usize) -> bool {
        let owner = self.vertex_of();
        self.legs[c].iter().any(|&leg| owner[self.mate[leg as usize] as usize].is_some())
    }

    /// Degree-0 one: the empty diagram on the empty support.
    pub fn one() -> Self {
        Diagram::empty(Support::empty())
    }
}

/// A connected component of the dashed graph.
#[derive(Clone, Debug, Default)]
pub struct DashedComponent {
    pub ends: Vec<EndId>,
    pub verts: Vec<u32>,
}

/// Incremental construction of diagrams.
///
/// ```
/// use ft_diagrams::{DiagramBuilder, Support};
/// // one chord on a circle
/// let mut b = DiagramBuilder::new(Support::circles(1));
/// let (x, y) = b.edge();
/// b.leg(0, x);
/// b.leg(0, y);
/// let d = b.finish();
/// assert_eq!(d.degree(), 1);
/// ```
pub struct DiagramBuilder {
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new(support: Support) -> Self {
        DiagramBuilder { d: Diagram::empty(support) }
    }

    /// Allocates a fresh dashed edge and returns its two ends.
    pub fn edge(&mut self) -> (EndId, EndId) {
        let a = self.d.mate.len() as EndId;
        self.d.mate.push(a + 1);
        self.d.mate.push(a);
        (a, a + 1)
    }

    /// Appends an edge-end to component `c`'s leg list.
    pub fn leg(&mut self, c: usize, e: EndId) {
        self.d.legs[c].push(e);
    }

    /// Adds an internal vertex whose slots are in the given cyclic order.
    pub fn vertex(&mut self, slots: [EndId; 3]) {
        self.d.verts.push(slots);
    }

    /// Sets the free-loop count.
    pub fn loops(&mut self, k: u32) {
        self.d.loops = k;
    }

    /// Validates and returns the diagram.
    pub fn finish(self) -> Diagram {
        if let Err(e) = self.d.check() {
            panic!("malformed diagram: {e}");
        }
        self.d
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// θ: two vertices joined by three edges.
    pub fn theta() -> Diagram {
        let mut b = DiagramBuilder::new(Support::empty());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        b.finish()
    }

    #[test]
    fn degrees() {
        assert_eq!(theta().degree(), 1);
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        assert_eq!(b.finish().degree(), 1);
    }

    #[test]
    fn y_diagram_degree_two() {
        // 3 legs joined to one internal vertex: degree (3+1)/2 = 2.
        let mut b = DiagramBuilder::new(Support::strands(1));
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.leg(0, a0);
        b.leg(0, b0);
        b.leg(0, c0);
        b.vertex([a1, b1, c1]);
        let d = b.finish();
        assert_eq!(d.degree(), 2);
        assert_eq!(d.internal_count(), 1);
        assert!(d.has_vertex_near(0));
        assert!(!d.has_tadpole());
    }

    #[test]
    fn tadpole_detected() {
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        let (p, q) = b.edge();
        b.leg(0, p);
        b.vertex([x, y, q]);
        assert!(b.finish().has_tadpole());
    }

    #[test]
    fn dashed_components_split() {
        // Chord plus θ on one circle: 2 dashed components.
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        let d = b.finish();
        assert_eq!(d.dashed_components().len(), 2);
    }

    #[test]
    fn malformed_rejected() {
        let mut d = Diagram::empty(Support::circles(1));
        d.mate = vec![1, 0];
        // ends exist but are attached nowhere
        assert!(d.check().is_err());
    }
}
