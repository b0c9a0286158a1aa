//! Exhaustive enumeration of diagram spans.
//!
//! [`enumerate_diagrams`] lists every canonical key of one degree on a
//! support by factoring each diagram uniquely into its *vacuum* part (dashed
//! components not touching the support) and its *surface* part (every dashed
//! component has a leg): vacuum graphs come from a DFS over trivalent
//! adjacency matrices, surface diagrams from a DFS over perfect matchings of
//! edge-ends. [`enumerate_diagrams_alt`] enumerates the same set with the
//! matching DFS alone (no factorization, vacuum included), giving a second,
//! algorithmically independent route used by the dimension cross-checks.
//!
//! Free dashed loops carry no degree, so a span that allows them is listed
//! with loop multiplicities `0..=loop_cap` only; the surgery pipeline
//! normalizes loops away eagerly and uses loop-free spans, while loop-bearing
//! spans exist for relation oracles.
//!
//! All searches count nodes against an explicit budget and return
//! [`Error::Budget`] instead of running away.

use std::collections::{BTreeSet, HashMap};

use ft_diagrams::{canonical_form, Diagram, EndId, Key, Support};

use crate::Error;

/// An enumerated span: the ordered basis keys of one (support, degree).
#[derive(Debug, Clone)]
pub struct DiagramSpan {
    pub support: Support,
    pub degree: u32,
    pub allow_loops: bool,
    /// Informational floor used by some builders; spans built by full
    /// enumeration keep 0 (filtering by leg count is a *relation*, not a
    /// span restriction, except where rows preserve per-component leg
    /// counts — see `chi`).
    pub min_legs_per_component: usize,
    /// Distinct canonical keys of exactly `degree`, in canonical byte order.
    pub keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl DiagramSpan {
    pub fn from_keys(
        support: Support,
        degree: u32,
        allow_loops: bool,
        keys: Vec<Key>,
    ) -> DiagramSpan {
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        DiagramSpan { support, degree, allow_loops, min_legs_per_component: 0, keys, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, key: &Key) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn key(&self, i: usize) -> &Key {
        &self.keys[i]
    }
}

/// Tuning knobs for enumeration.
#[derive(Debug, Clone)]
pub struct SpanOptions {
    /// Maximum legs on any single component (`None` = unbounded).
    pub leg_cap: Option<usize>,
    /// Loop decorations listed per base key when loops are allowed.
    pub loop_cap: u32,
    /// Ceiling on DFS nodes across the whole call.
    pub node_budget: u64,
}

impl Default for SpanOptions {
    fn default() -> Self {
        SpanOptions { leg_cap: None, loop_cap: 2, node_budget: 50_000_000 }
    }
}

/// Enumerates canonical keys of exactly `degree` on `support`. On the empty
/// support this lists closed trivalent graphs; on a nonempty support it lists
/// the diagrams in which **every dashed component touches the support**.
/// Spaces that also house detached vacuum parts (the module structure over
/// closed graphs) are enumerated by [`enumerate_full`].
pub fn enumerate_diagrams(
    support: &Support,
    degree: u32,
    allow_loops: bool,
    leg_cap: Option<usize>,
) -> Result<DiagramSpan, Error> {
    let opts = SpanOptions { leg_cap, ..SpanOptions::default() };
    if support.is_empty() {
        return enumerate_full(support, degree, allow_loops, &opts);
    }
    let mut budget = opts.node_budget;
    let mut found: BTreeSet<Key> = BTreeSet::new();
    let mut sink = |d: &Diagram| collect(&mut found, d.clone(), allow_loops, opts.loop_cap);
    for verts in 0..=(2 * degree) as usize {
        matching_search(support, degree, verts, true, &opts, &mut budget, &mut sink)?;
    }
    Ok(DiagramSpan::from_keys(support.clone(), degree, allow_loops, found.into_iter().collect()))
}

/// Enumerates the full diagram space of one degree — detached closed graphs
/// included — as the convolution of a vacuum part (adjacency-matrix DFS)
/// with a surface part (matching DFS, every component touching the support)
/// over all degree splits. The splitting of a diagram into the two parts is
/// unique, so no cross-split deduplication is needed.
pub fn enumerate_full(
    support: &Support,
    degree: u32,
    allow_loops: bool,
    opts: &SpanOptions,
) -> Result<DiagramSpan, Error> {
    let mut budget = opts.node_budget;
    let mut found: BTreeSet<Key> = BTreeSet::new();
    for vacuum_degree in 0..=degree {
        let surface_degree = degree - vacuum_degree;
        let vacuum = if vacuum_degree == 0 {
            vec![Diagram::empty(Support::empty())]
        } else {
            vacuum_graphs(vacuum_degree, &mut budget)?
        };
        if vacuum.is_empty() {
            continue;
        }
        let mut surface: Vec<Diagram> = Vec::new();
        let mut sink = |d: &Diagram| surface.push(d.clone());
        for verts in 0..=(2 * surface_degree) as usize {
            matching_search(support, surface_degree, verts, true, opts, &mut budget, &mut sink)?;
        }
        for v in &vacuum {
            for s in &surface {
                collect(&mut found, merge_vacuum(s, v), allow_loops, opts.loop_cap);
            }
        }
    }
    Ok(DiagramSpan::from_keys(
        support.clone(),
        degree,
        allow_loops,
        found.into_iter().collect(),
    ))
}

/// Independent second route: one matching DFS over all vertex counts with no
/// vacuum/surface factorization. Must agree with [`enumerate_diagrams`].
pub fn enumerate_diagrams_alt(
    support: &Support,
    degree: u32,
    allow_loops: bool,
    opts: &SpanOptions,
) -> Result<DiagramSpan, Error> {
    let mut budget = opts.node_budget;
    let mut found: BTreeSet<Key> = BTreeSet::new();
    let mut sink =
        |d: &Diagram| collect(&mut found, d.clone(), allow_loops, opts.loop_cap);
    for verts in 0..=(2 * degree) as usize {
        matching_search(support, degree, verts, false, opts, &mut budget, &mut sink)?;
    }
    Ok(DiagramSpan::from_keys(
        support.clone(),
        degree,
        allow_loops,
        found.into_iter().collect(),
    ))
}

/// Keys of exactly `degree` with exactly `verts` internal vertices, every
/// dashed component touching the support (loop-free).
pub fn enumerate_with_vertices(
    support: &Support,
    degree: u32,
    verts: usize,
    opts: &SpanOptions,
) -> Result<Vec<Key>, Error> {
    let mut budget = opts.node_budget;
    let mut found: BTreeSet<Key> = BTreeSet::new();
    let mut sink = |d: &Diagram| collect(&mut found, d.clone(), false, 0);
    matching_search(support, degree, verts, true, opts, &mut budget, &mut sink)?;
    Ok(found.into_iter().collect())
}

fn collect(found: &mut BTreeSet<Key>, d: Diagram, allow_loops: bool, loop_cap: u32) {
    let top = if allow_loops { loop_cap } else { 0 };
    for loops in 0..=top {
        let mut dd = d.clone();
        dd.loops = loops;
        let (key, sign) = canonical_form(&dd);
        if sign != 0 {
            found.insert(key);
        }
    }
}

/// Disjoint union of a surface diagram with a closed vacuum graph.
fn merge_vacuum(surface: &Diagram, vacuum: &Diagram) -> Diagram {
    let offset = surface.mate.len() as EndId;
    let mut out = surface.clone();
    out.verts.extend(vacuum.verts.iter().map(|v| v.map(|e| e + offset)));
    out.mate.extend(vacuum.mate.iter().map(|&m| m + offset));
    out
}

fn spend(budget: &mut u64, what: &str) -> Result<(), Error> {
    if *budget == 0 {
        return Err(Error::Budget(format!("enumeration node budget exhausted in {what}")));
    }
    *budget -= 1;
    Ok(())
}

/// Closed trivalent graphs of the given degree (2·degree vertices) on the
/// empty support, via DFS over symmetric adjacency matrices with zero
/// diagonal (self-loops are antisymmetry-zero) and row sums 3.
fn vacuum_graphs(degree: u32, budget: &mut u64) -> Result<Vec<Diagram>, Error> {
    let n = 2 * degree as usize;
    let mut found: BTreeSet<Key> = BTreeSet::new();
    let mut adj = vec![vec![0u8; n]; n];
    let mut remaining = vec![3u8; n];
    fill_adjacency(&mut adj, &mut remaining, 0, 1, n, budget, &mut found)?;
    Ok(found.into_iter().map(|k| k.diagram().clone()).collect())
}

fn fill_adjacency(
    adj: &mut Vec<Vec<u8>>,
    remaining: &mut Vec<u8>,
    i: usize,
    j: usize,
    n: usize,
    budget: &mut u64,
    found: &mut BTreeSet<Key>,
) -> Result<(), Error> {
    spend(budget, "vacuum adjacency search")?;
    if i == n {
        if let Some(d) = adjacency_to_diagram(adj, n) {
            let (key, sign) = canonical_form(&d);
            if sign != 0 {
                found.insert(key);
            }
        }
        return Ok(());
    }
    if j == n {
        // row i is complete; all of vertex i's edges are placed
        if remaining[i] != 0 {
            return Ok(());
        }
        return fill_adjacency(adj, remaining, i + 1, i + 2, n, budget, found);
    }
    let top = remaining[i].min(remaining[j]);
    for m in 0..=top {
        adj[i][j] = m;
        adj[j][i] = m;
        remaining[i] -= m;
        remaining[j] -= m;
        fill_adjacency(adj, remaining, i, j + 1, n, budget, found)?;
        remaining[i] += m;
        remaining[j] += m;
    }
    adj[i][j] = 0;
    adj[j][i] = 0;
    Ok(())
}

fn adjacency_to_diagram(adj: &[Vec<u8>], n: usize) -> Option<Diagram> {
    let mut verts: Vec<Vec<EndId>> = vec![Vec::new(); n];
    let mut mate: Vec<EndId> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for _ in 0..adj[i][j] {
                let a = mate.len() as EndId;
                let b = a + 1;
                mate.push(b);
                mate.push(a);
                verts[i].push(a);
                verts[j].push(b);
            }
        }
    }
    let verts: Vec<[EndId; 3]> = verts
        .into_iter()
        .map(|v| <[EndId; 3]>::try_from(v).ok())
        .collect::<Option<_>>()?;
    let d = Diagram { support: Support::empty(), legs: Vec::new(), verts, mate, loops: 0 };
    debug_assert!(d.check().is_ok(), "{:?}", d.check());
    Some(d)
}

/// DFS over perfect matchings of edge-ends: `legs_total = 2·degree − verts`
/// leg ends distributed over the components in all ways, plus `3·verts`
/// vertex slots. Symmetry is quotiented by: smallest-unmatched-end-first,
/// first contact with a fresh vertex uses its slot 0, and fresh vertices are
/// taken in index order. Same-vertex pairs (tadpoles) are pruned.
#[allow(clippy::too_many_arguments)]
fn matching_search(
    support: &Support,
    degree: u32,
    verts: usize,
    require_contact: bool,
    opts: &SpanOptions,
    budget: &mut u64,
    sink: &mut dyn FnMut(&Diagram),
) -> Result<(), Error> {
    let total = 2 * degree as usize;
    if verts > total {
        return Ok(());
    }
    let legs_total = total - verts;
    let m = support.len();
    if m == 0 && legs_total > 0 {
        return Ok(());
    }
    if require_contact && verts > 0 && legs_total == 0 {
        // a vertex-bearing diagram with no legs cannot touch the support
        return Ok(());
    }
    let mut parts = vec![0usize; m.max(1)];
    distribute_legs(
        support, legs_total, 0, &mut parts, verts, require_contact, opts, budget, sink,
    )
}

#[allow(clippy::too_many_arguments)]
fn distribute_legs(
    support: &Support,
    left: usize,
    at: usize,
    parts: &mut Vec<usize>,
    verts: usize,
    require_contact: bool,
    opts: &SpanOptions,
    budget: &mut u64,
    sink: &mut dyn FnMut(&Diagram),
) -> Result<(), Error> {
    let m = support.len();
    if at == m {
        if left == 0 {
            return match_ends(support, parts, verts, require_contact, opts, budget, sink);
        }
        return Ok(());
    }
    let cap = opts.leg_cap.unwrap_or(left).min(left);
    for k in 0..=cap {
        parts[at] = k;
        distribute_legs(
            support, left - k, at + 1, parts, verts, require_contact, opts, budget, sink,
        )?;
    }
    parts[at] = 0;
    Ok(())
}

struct MatchState {
    /// end → vertex index (None for legs)
    owner: Vec<Option<usize>>,
    /// end → mate (EndId::MAX while unmatched)
    mate: Vec<EndId>,
    /// per vertex: how many of its slots are matched
    touched: Vec<u8>,
}

#[allow(clippy::too_many_arguments)]
fn match_ends(
    support: &Support,
    parts: &[usize],
    verts: usize,
    require_contact: bool,
    opts: &SpanOptions,
    budget: &mut u64,
    sink: &mut dyn FnMut(&Diagram),
) -> Result<(), Error> {
    let m = support.len();
    let legs_total: usize = parts.iter().take(m).sum();
    let n_ends = legs_total + 3 * verts;
    if n_ends % 2 != 0 {
        return Ok(());
    }
    let mut owner = vec![None; n_ends];
    for v in 0..verts {
        for s in 0..3 {
            owner[legs_total + 3 * v + s] = Some(v);
        }
    }
    let mut st = MatchState { owner, mate: vec![EndId::MAX; n_ends], touched: vec![0; verts] };
    let mut emit = |st: &MatchState| {
        let d = build_matched(support, parts, verts, legs_total, &st.mate);
        if !require_contact || all_components_touch(&d) {
            sink(&d);
        }
    };
    match_step(&mut st, n_ends, opts, budget, &mut emit)
}

fn match_step(
    st: &mut MatchState,
    n_ends: usize,
    opts: &SpanOptions,
    budget: &mut u64,
    emit: &mut dyn FnMut(&MatchState),
) -> Result<(), Error> {
    spend(budget, "matching search")?;
    let Some(e) = (0..n_ends).find(|&e| st.mate[e] == EndId::MAX) else {
        emit(st);
        return Ok(());
    };
    // `e` must pair with something to its right
    for f in (e + 1)..n_ends {
        if st.mate[f] != EndId::MAX {
            continue;
        }
        match (st.owner[e], st.owner[f]) {
            (Some(a), Some(b)) if a == b => continue, // tadpole: zero by antisymmetry
            _ => {}
        }
        if let Some(v) = st.owner[f] {
            if st.touched[v] == 0 {
                // fresh vertex: must be the lowest-indexed fresh vertex, and
                // first contact through its slot 0 (slots of a fresh vertex
                // are equivalent up to the cyclic rotation). When `e` itself
                // sits on a fresh vertex, that vertex doesn't count: it is
                // being touched by this very pairing (and it is necessarily
                // the lowest fresh one, since all its slots are unmatched
                // and `e` is the globally smallest unmatched end).
                let lowest_fresh = (0..st.touched.len())
                    .find(|&w| st.touched[w] == 0 && Some(w) != st.owner[e]);
                if lowest_fresh != Some(v) || !is_slot0(st, f) {
                    continue;
                }
            }
        }
        st.mate[e] = f as EndId;
        st.mate[f] = e as EndId;
        bump(st, e, 1);
        bump(st, f, 1);
        match_step(st, n_ends, opts, budget, emit)?;
        bump(st, e, -1);
        bump(st, f, -1);
        st.mate[e] = EndId::MAX;
        st.mate[f] = EndId::MAX;
    }
    Ok(())
}

fn is_slot0(st: &MatchState, end: usize) -> bool {
    // vertex slots were laid out consecutively after the legs
    match st.owner[end] {
        Some(_) => {
            let before = end.checked_sub(1).and_then(|p| st.owner[p]);
            before != st.owner[end]
        }
        None => false,
    }
}

fn bump(st: &mut MatchState, end: usize, delta: i8) {
    if let Some(v) = st.owner[end] {
        st.touched[v] = (st.touched[v] as i8 + delta) as u8;
    }
}

fn build_matched(
    support: &Support,
    parts: &[usize],
    verts: usize,
    legs_total: usize,
    mate: &[EndId],
) -> Diagram {
    let mut legs: Vec<Vec<EndId>> = Vec::with_capacity(support.len());
    let mut next = 0 as EndId;
    for c in 0..support.len() {
        legs.push((0..parts[c]).map(|k| next + k as EndId).collect());
        next += parts[c] as EndId;
    }
    let verts_list: Vec<[EndId; 3]> = (0..verts)
        .map(|v| {
            let b = (legs_total + 3 * v) as EndId;
            [b, b + 1, b + 2]
        })
        .collect();
    let d = Diagram {
        support: support.clone(),
        legs,
        verts: verts_list,
        mate: mate.to_vec(),
        loops: 0,
    };
    debug_assert!(d.check().is_ok(), "{:?}", d.check());
    d
}

/// Every connected dashed component contains at least one leg.
fn all_components_touch(d: &Diagram) -> bool {
    let n = d.mate.len();
    if n == 0 {
        return true;
    }
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut Vec<usize>, mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let union = |root: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(root, a), find(root, b));
        if ra != rb {
            root[ra] = rb;
        }
    };
    for e in 0..n {
        union(&mut root, e, d.mate[e] as usize);
    }
    for v in &d.verts {
        union(&mut root, v[0] as usize, v[1] as usize);
        union(&mut root, v[0] as usize, v[2] as usize);
    }
    let mut has_leg = vec![false; n];
    for ends in &d.legs {
        for &e in ends {
            let r = find(&mut root, e as usize);
            has_leg[r] = true;
        }
    }
    (0..n).all(|e| {
        let r = find(&mut root, e);
        has_leg[r]
    })
}
