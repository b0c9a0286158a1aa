//! Tangle words: the textual presentation of framed tangles and links.
//!
//! A word is a newline-separated list of elementary slices read top to
//! bottom. The running boundary is a string of orientation symbols, `+` for
//! a strand moving downward through the boundary and `-` for upward.
//! Positions are 1-based from the left.
//!
//! ```text
//! id + +          # optional: declares an open top boundary (all downward)
//! x+ 1            # positive crossing of positions 1,2
//! x- 2            # negative crossing of positions 2,3
//! cap 1 cw        # local maximum inserted at position 1, symbols "+-"
//! cap 1 ccw       # local maximum, symbols "-+"
//! cup 2 cw        # local minimum consuming "+-" at positions 2,3
//! frame c1 -1     # framing integer for the component named c1
//! label strand 2 = c7   # user name for the component through top position 2
//! ```
//!
//! Closed words (no `id`, starting from the empty boundary) present framed
//! links. Built-in fixtures expand from a single line: `unknot f`,
//! `hopf f1 f2`, `trefoil f` (right-handed), `borromean f1 f2 f3`.
//!
//! Component naming: connected components are numbered `c1, c2, …` by the
//! birth order of their earliest piece (top strands in position order first,
//! then cap-born arcs in creation order); `label` directives override the
//! default name. A `frame` directive refers to the final component name.
//!
//! Beyond parsing, this module computes the word's *shape* — the component
//! partition, self-writhes, pairwise signed crossing counts, closedness —
//! entirely combinatorially, and implements word-level surgery: closure of
//! a string link, component reversal, blackboard doubling, and the
//! over-strand replacement that unlinks one component.

use std::collections::BTreeMap;
use std::fmt;

use crate::Error;

/// One elementary slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gen {
    /// Identity slice asserting the boundary symbols (`true` = `+`).
    Id(Vec<bool>),
    /// Crossing of positions `pos, pos+1` with the given sign.
    Crossing { pos: usize, positive: bool },
    /// Local maximum inserted at `pos`: `cw` yields symbols `+-`, `ccw` `-+`.
    Cap { pos: usize, cw: bool },
    /// Local minimum consuming positions `pos, pos+1`: `cw` eats `+-`,
    /// `ccw` eats `-+`.
    Cup { pos: usize, cw: bool },
}

/// A parsed tangle word plus its framing and labeling directives.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TangleWord {
    /// Number of open strands at the top boundary (all oriented downward).
    pub top: usize,
    pub gens: Vec<Gen>,
    /// `frame NAME k` directives in order.
    pub frames: Vec<(String, i64)>,
    /// `label strand i = NAME` directives: top position (1-based) → name.
    pub labels: Vec<(usize, String)>,
}

/// What a crossing/cap/cup slice touches, resolved to final components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Touch {
    None,
    /// Crossing: final component index and boundary symbol of the left and
    /// right position at the time of the slice.
    Crossing { left: usize, right: usize, left_plus: bool, right_plus: bool },
    /// Cap or cup: the final component the arc belongs to.
    Extremum { comp: usize },
}

/// One final connected component of the presented tangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentShape {
    /// Final name (`label` override or default `cK` by birth rank).
    pub name: String,
    /// True when the component closed into a circle.
    pub closed: bool,
    /// Signed count of self-crossings (blackboard writhe).
    pub writhe: i64,
    /// Framing integer (`frame` directive; defaults to 0).
    pub framing: i64,
    /// For open components: the top-boundary position (0-based).
    pub top_position: Option<usize>,
}

/// The combinatorial analysis of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordShape {
    /// Final components ordered by birth rank (this is the component order
    /// of the evaluated value's support, strands before circles).
    pub components: Vec<ComponentShape>,
    /// Signed crossing count between distinct components, keyed by
    /// `(i, j)` with `i < j` component indices.
    pub cross_sum: BTreeMap<(usize, usize), i64>,
    /// Boundary symbols left at the bottom.
    pub bottom: Vec<bool>,
    /// Final component touched by each generator (same length as `gens`).
    pub touches: Vec<Touch>,
    /// Widest boundary reached.
    pub max_width: usize,
}

impl WordShape {
    /// Linking number of two distinct components (half the signed crossing
    /// count; integral for closed curves).
    pub fn linking(&self, i: usize, j: usize) -> Result<i64, Error> {
        let key = (i.min(j), i.max(j));
        let s = self.cross_sum.get(&key).copied().unwrap_or(0);
        if s % 2 != 0 {
            return Err(Error::Word(format!(
                "odd signed crossing count {s} between components {i} and {j}"
            )));
        }
        Ok(s / 2)
    }

    /// Index of the component with the given name.
    pub fn component_by_name(&self, name: &str) -> Result<usize, Error> {
        self.components
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Word(format!("no component named {name}")))
    }

    /// True when every component is closed.
    pub fn all_closed(&self) -> bool {
        self.bottom.is_empty() && self.components.iter().all(|c| c.closed)
    }
}

// ---------------------------------------------------------------------------
// parsing and printing

fn parse_pos(tok: &str, line: usize) -> Result<usize, Error> {
    tok.parse::<usize>()
        .ok()
        .filter(|&p| p >= 1)
        .ok_or_else(|| Error::Parse { line, message: format!("bad position `{tok}`") })
}

fn parse_turn(tok: &str, line: usize) -> Result<bool, Error> {
    match tok {
        "cw" => Ok(true),
        "ccw" => Ok(false),
        _ => Err(Error::Parse { line, message: format!("expected cw|ccw, got `{tok}`") }),
    }
}

fn parse_int(tok: &str, line: usize) -> Result<i64, Error> {
    tok.parse::<i64>()
        .map_err(|_| Error::Parse { line, message: format!("bad integer `{tok}`") })
}

fn valid_name(tok: &str) -> bool {
    !tok.is_empty()
        && tok.len() <= 32
        && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

impl TangleWord {
    /// Parses the newline grammar. `#` starts a comment; blank lines are
    /// skipped. A single-line built-in fixture name expands to its word.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut word = TangleWord::default();
        let mut saw_any = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            match toks[0] {
                "unknot" | "hopf" | "trefoil" | "borromean" => {
                    if saw_any {
                        return Err(Error::Parse {
                            line,
                            message: "built-in fixture must be the only generator".into(),
                        });
                    }
                    let args = toks[1..]
                        .iter()
                        .map(|t| parse_int(t, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    let b = builtin(toks[0], &args).map_err(|e| match e {
                        Error::Word(m) => Error::Parse { line, message: m },
                        other => other,
                    })?;
                    return Ok(b);
                }
                "id" => {
                    let mut syms = Vec::new();
                    for t in &toks[1..] {
                        match *t {
                            "+" => syms.push(true),
                            "-" => syms.push(false),
                            other => {
                                return Err(Error::Parse {
                                    line,
                                    message: format!("expected +|-, got `{other}`"),
                                })
                            }
                        }
                    }
                    if !saw_any {
                        if syms.iter().any(|s| !s) {
                            return Err(Error::Parse {
                                line,
                                message: "top boundary must be all downward (+)".into(),
                            });
                        }
                        word.top = syms.len();
                    }
                    word.gens.push(Gen::Id(syms));
                }
                "x+" | "x-" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line, message: "usage: x+ POS".into() });
                    }
                    word.gens.push(Gen::Crossing {
                        pos: parse_pos(toks[1], line)?,
                        positive: toks[0] == "x+",
                    });
                }
                "cap" | "cup" => {
                    if toks.len() != 3 {
                        return Err(Error::Parse {
                            line,
                            message: format!("usage: {} POS cw|ccw", toks[0]),
                        });
                    }
                    let pos = parse_pos(toks[1], line)?;
                    let cw = parse_turn(toks[2], line)?;
                    word.gens.push(if toks[0] == "cap" {
                        Gen::Cap { pos, cw }
                    } else {
                        Gen::Cup { pos, cw }
                    });
                }
                "frame" => {
                    if toks.len() != 3 || !valid_name(toks[1]) {
                        return Err(Error::Parse { line, message: "usage: frame NAME INT".into() });
                    }
                    word.frames.push((toks[1].to_string(), parse_int(toks[2], line)?));
                }
                "label" => {
                    if toks.len() != 5 || toks[1] != "strand" || toks[3] != "=" || !valid_name(toks[4])
                    {
                        return Err(Error::Parse {
                            line,
                            message: "usage: label strand POS = NAME".into(),
                        });
                    }
                    word.labels.push((parse_pos(toks[2], line)?, toks[4].to_string()));
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown generator `{other}`"),
                    })
                }
            }
            saw_any = true;
        }
        Ok(word)
    }

    /// Number of boundary symbols after every generator has acted.
    pub fn bottom_width(&self) -> usize {
        let mut w = self.top;
        for g in &self.gens {
            match g {
                Gen::Cap { .. } => w += 2,
                Gen::Cup { .. } => w -= 2,
                _ => {}
            }
        }
        w
    }
}

impl fmt::Display for TangleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut started = false;
        if self.top > 0
            && !matches!(self.gens.first(), Some(Gen::Id(s)) if s.len() == self.top)
        {
            write!(f, "id")?;
            for _ in 0..self.top {
                write!(f, " +")?;
            }
            writeln!(f)?;
            started = true;
        }
        let _ = started;
        for g in &self.gens {
            match g {
                Gen::Id(syms) => {
                    write!(f, "id")?;
                    for s in syms {
                        write!(f, " {}", if *s { "+" } else { "-" })?;
                    }
                    writeln!(f)?;
                }
                Gen::Crossing { pos, positive } => {
                    writeln!(f, "x{} {pos}", if *positive { "+" } else { "-" })?
                }
                Gen::Cap { pos, cw } => writeln!(f, "cap {pos} {}", turn(*cw))?,
                Gen::Cup { pos, cw } => writeln!(f, "cup {pos} {}", turn(*cw))?,
            }
        }
        for (pos, name) in &self.labels {
            writeln!(f, "label strand {pos} = {name}")?;
        }
        for (name, k) in &self.frames {
            writeln!(f, "frame {name} {k}")?;
        }
        Ok(())
    }
}

fn turn(cw: bool) -> &'static str {
    if cw {
        "cw"
    } else {
        "ccw"
    }
}

// ---------------------------------------------------------------------------
// shape analysis

#[derive(Clone, Copy)]
struct Slot {
    arc: u32,
    plus: bool,
}

struct Uf {
    parent: Vec<u32>,
}

impl Uf {
    fn new() -> Self {
        Uf { parent: Vec::new() }
    }
    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }
    fn find(&mut self, a: u32) -> u32 {
        let p = self.parent[a as usize];
        if p == a {
            return a;
        }
        let r = self.find(p);
        self.parent[a as usize] = r;
        r
    }
    fn union(&mut self, a: u32, b: u32) {
        // min-root union keeps the earliest birth as the representative
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi as usize] = lo;
    }
}

impl TangleWord {
    /// Validates the word and computes its component analysis.
    pub fn shape(&self) -> Result<WordShape, Error> {
        let mut uf = Uf::new();
        let mut slots: Vec<Slot> = Vec::new();
        for _ in 0..self.top {
            let s = uf.fresh();
            slots.push(Slot { arc: s, plus: true });
        }
        let mut closed: Vec<u32> = Vec::new(); // roots at closing time, in closing order
        let mut log: Vec<(u32, u32, i64)> = Vec::new();
        let mut touches_raw: Vec<Touch> = Vec::new();
        let mut max_width = slots.len();

        for (gi, g) in self.gens.iter().enumerate() {
            match g {
                Gen::Id(syms) => {
                    let cur: Vec<bool> = slots.iter().map(|s| s.plus).collect();
                    if *syms != cur {
                        return Err(Error::Word(format!(
                            "generator {}: id boundary mismatch (word has {})",
                            gi + 1,
                            cur.iter().map(|s| if *s { '+' } else { '-' }).collect::<String>()
                        )));
                    }
                    touches_raw.push(Touch::None);
                }
                Gen::Crossing { pos, positive } => {
                    let i = pos - 1;
                    if i + 1 >= slots.len() {
                        return Err(Error::Word(format!(
                            "generator {}: crossing position {pos} exceeds width {}",
                            gi + 1,
                            slots.len()
                        )));
                    }
                    let (a, b) = (slots[i], slots[i + 1]);
                    log.push((a.arc, b.arc, if *positive { 1 } else { -1 }));
                    touches_raw.push(Touch::Crossing {
                        left: a.arc as usize,
                        right: b.arc as usize,
                        left_plus: a.plus,
                        right_plus: b.plus,
                    });
                    slots.swap(i, i + 1);
                }
                Gen::Cap { pos, cw } => {
                    let i = pos - 1;
                    if i > slots.len() {
                        return Err(Error::Word(format!(
                            "generator {}: cap position {pos} exceeds width {} + 1",
                            gi + 1,
                            slots.len()
                        )));
                    }
                    let s = uf.fresh();
                    let (l, r) = if *cw { (true, false) } else { (false, true) };
                    slots.insert(i, Slot { arc: s, plus: r });
                    slots.insert(i, Slot { arc: s, plus: l });
                    touches_raw.push(Touch::Extremum { comp: s as usize });
                    max_width = max_width.max(slots.len());
                }
                Gen::Cup { pos, cw } => {
                    let i = pos - 1;
                    if i + 1 >= slots.len() {
                        return Err(Error::Word(format!(
                            "generator {}: cup position {pos} exceeds width {}",
                            gi + 1,
                            slots.len()
                        )));
                    }
                    let (a, b) = (slots[i], slots[i + 1]);
                    let want = if *cw { (true, false) } else { (false, true) };
                    if (a.plus, b.plus) != want {
                        return Err(Error::Word(format!(
                            "generator {}: cup {} expects {}{} but boundary has {}{}",
                            gi + 1,
                            turn(*cw),
                            sym(want.0),
                            sym(want.1),
                            sym(a.plus),
                            sym(b.plus),
                        )));
                    }
                    touches_raw.push(Touch::Extremum { comp: a.arc as usize });
                    if uf.find(a.arc) == uf.find(b.arc) {
                        closed.push(uf.find(a.arc));
                    } else {
                        uf.union(a.arc, b.arc);
                    }
                    slots.drain(i..=i + 1);
                }
            }
        }

        // birth-ranked final components
        let total = uf.parent.len() as u32;
        let roots: Vec<u32> = (0..total).map(|a| uf.find(a)).collect();
        let mut ranked: Vec<u32> = {
            let mut r = roots.clone();
            r.sort_unstable();
            r.dedup();
            r
        };
        ranked.sort_unstable();
        let rank_of = |root: u32, ranked: &[u32]| ranked.binary_search(&root).unwrap();

        // names: defaults, then label overrides (top strand i ↔ serial i-1)
        let mut names: Vec<Option<String>> = vec![None; ranked.len()];
        for (pos, name) in &self.labels {
            if *pos > self.top {
                return Err(Error::Word(format!(
                    "label strand {pos}: word has only {} top strands",
                    self.top
                )));
            }
            let k = rank_of(roots[*pos - 1], &ranked);
            match &names[k] {
                Some(prev) if prev != name => {
                    return Err(Error::Word(format!(
                        "conflicting labels {prev} and {name} on one component"
                    )))
                }
                _ => names[k] = Some(name.clone()),
            }
        }
        let names: Vec<String> = names
            .into_iter()
            .enumerate()
            .map(|(k, n)| n.unwrap_or_else(|| format!("c{}", k + 1)))
            .collect();
        {
            let mut seen = names.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != names.len() {
                return Err(Error::Word("duplicate component names".into()));
            }
        }

        // crossing log → writhes and pairwise sums
        let mut writhe = vec![0i64; ranked.len()];
        let mut cross_sum: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (a, b, sgn) in log {
            let (ra, rb) = (rank_of(uf.find(a), &ranked), rank_of(uf.find(b), &ranked));
            if ra == rb {
                writhe[ra] += sgn;
            } else {
                *cross_sum.entry((ra.min(rb), ra.max(rb))).or_insert(0) += sgn;
            }
        }

        // closedness and top anchors
        let mut is_closed = vec![false; ranked.len()];
        for root in &closed {
            is_closed[rank_of(*root, &ranked)] = true;
        }
        let mut top_position = vec![None; ranked.len()];
        for p in (0..self.top).rev() {
            top_position[rank_of(roots[p], &ranked)] = Some(p);
        }

        // framings by final name
        let mut framing = vec![0i64; ranked.len()];
        for (name, k) in &self.frames {
            match names.iter().position(|n| n == name) {
                Some(i) => framing[i] = *k,
                None => {
                    return Err(Error::Word(format!("frame directive for unknown component {name}")))
                }
            }
        }

        // resolve raw touches (arc serials) to component ranks
        let touches = touches_raw
            .into_iter()
            .map(|t| match t {
                Touch::None => Touch::None,
                Touch::Crossing { left, right, left_plus, right_plus } => Touch::Crossing {
                    left: rank_of(uf.find(left as u32), &ranked),
                    right: rank_of(uf.find(right as u32), &ranked),
                    left_plus,
                    right_plus,
                },
                Touch::Extremum { comp } => {
                    Touch::Extremum { comp: rank_of(uf.find(comp as u32), &ranked) }
                }
            })
            .collect();

        let components = (0..ranked.len())
            .map(|k| ComponentShape {
                name: names[k].clone(),
                closed: is_closed[k],
                writhe: writhe[k],
                framing: framing[k],
                top_position: top_position[k],
            })
            .collect();

        let bottom: Vec<bool> = slots.iter().map(|s| s.plus).collect();
        Ok(WordShape { components, cross_sum, bottom, touches, max_width })
    }

    /// Checks that the word is an honest string link: every component open,
    /// anchored at one top and one bottom position, all oriented downward.
    pub fn require_string_link(&self) -> Result<WordShape, Error> {
        let shape = self.shape()?;
        if shape.bottom.len() != self.top || shape.bottom.iter().any(|s| !s) {
            return Err(Error::Word(
                "string link must end on all-downward boundary of the same width".into(),
            ));
        }
        if shape.components.iter().any(|c| c.closed || c.top_position.is_none()) {
            return Err(Error::Word("string link must have no closed components".into()));
        }
        Ok(shape)
    }
}

fn sym(plus: bool) -> char {
    if plus {
        '+'
    } else {
        '-'
    }
}

// ---------------------------------------------------------------------------
// builders

/// An open braid word on `m` strands: crossings `(position, positive)`.
pub fn braid(m: usize, xs: &[(usize, bool)]) -> TangleWord {
    let mut w = TangleWord { top: m, ..Default::default() };
    w.gens.push(Gen::Id(vec![true; m]));
    for &(pos, positive) in xs {
        w.gens.push(Gen::Crossing { pos, positive });
    }
    w
}

/// The inverse braid: reversed order, flipped signs.
pub fn inverse_braid(xs: &[(usize, bool)]) -> Vec<(usize, bool)> {
    xs.iter().rev().map(|&(p, s)| (p, !s)).collect()
}

/// The pure-braid generator γ_{ij} (1 ≤ i < j ≤ m) as a crossing list: the
/// full twist of strands i and j routed in front of the strands between
/// them: σ_{j-1} … σ_{i+1} σ_i² σ_{i+1}⁻¹ … σ_{j-1}⁻¹.
pub fn gamma(i: usize, j: usize) -> Vec<(usize, bool)> {
    assert!(1 <= i && i < j, "need 1 <= i < j");
    let mut xs = Vec::new();
    for p in (i + 1..j).rev() {
        xs.push((p, true));
    }
    xs.push((i, true));
    xs.push((i, true));
    for p in i + 1..j {
        xs.push((p, false));
    }
    xs
}

/// Closure of a string-link word: caps above, the word unchanged in the
/// middle (its positions already match), cups below. Adds no crossings.
/// Framing directives carry over to the closed components; labels are
/// re-derived from strand names.
pub fn close_string_link(word: &TangleWord) -> Result<TangleWord, Error> {
    let shape = word.require_string_link()?;
    let m = word.top;
    let mut out = TangleWord::default();
    for i in 1..=m {
        out.gens.push(Gen::Cap { pos: i, cw: true });
    }
    for g in &word.gens {
        match g {
            Gen::Id(syms) => {
                let mut want = syms.clone();
                want.extend(std::iter::repeat(false).take(m));
                out.gens.push(Gen::Id(want));
            }
            other => out.gens.push(other.clone()),
        }
    }
    for i in (1..=m).rev() {
        out.gens.push(Gen::Cup { pos: i, cw: true });
    }
    // framings carry over: strand at top position p closes into the
    // component of cap p+1, which is generator index p (an Extremum touch)
    let closed_shape = out.shape()?;
    for comp in &shape.components {
        if comp.framing != 0 {
            let pos = comp.top_position.expect("string link");
            let comp_idx = match &closed_shape.touches[pos] {
                Touch::Extremum { comp } => *comp,
                _ => unreachable!("caps lead the closure word"),
            };
            let name = closed_shape.components[comp_idx].name.clone();
            if let Some((_, existing)) = out.frames.iter_mut().find(|(n, _)| *n == name) {
                if *existing != comp.framing {
                    return Err(Error::Word(format!(
                        "strands with framings {existing} and {} close into one component",
                        comp.framing
                    )));
                }
            } else {
                out.frames.push((name, comp.framing));
            }
        }
    }
    Ok(out)
}

/// Reverses the orientation of one component: its caps and cups flip their
/// turning sense, and every crossing between it and a *different* component
/// flips sign (a crossing inside the component, or between two other
/// components, keeps its sign).
pub fn reverse_component(word: &TangleWord, name: &str) -> Result<TangleWord, Error> {
    let shape = word.shape()?;
    let c = shape.component_by_name(name)?;
    if shape.components[c].top_position.is_some() {
        return Err(Error::Word(
            "reversal of open strands would flip boundary symbols; reverse closed components".into(),
        ));
    }
    let mut out = word.clone();
    for (g, t) in out.gens.iter_mut().zip(&shape.touches) {
        match (g, t) {
            (Gen::Crossing { positive, .. }, Touch::Crossing { left, right, .. }) => {
                if (*left == c) != (*right == c) {
                    *positive = !*positive;
                }
            }
            (Gen::Cap { cw, .. }, Touch::Extremum { comp })
            | (Gen::Cup { cw, .. }, Touch::Extremum { comp }) => {
                if *comp == c {
                    *cw = !*cw;
                }
            }
            (Gen::Id(_), _) => {}
            _ => {}
        }
    }
    // boundary symbols on the reversed component flip inside id assertions —
    // closed components never appear at the top, but they do appear at
    // intermediate boundaries; recompute id lines wholesale.
    refresh_id_lines(&mut out)?;
    Ok(out)
}

/// Replaces every crossing between `name` and any other component so that
/// `name` passes over: the over strand at a crossing is determined by the
/// sign and the two orientation symbols. Self-crossings of `name` and
/// crossings not involving it are untouched.
pub fn unlink_component(word: &TangleWord, name: &str) -> Result<TangleWord, Error> {
    let shape = word.shape()?;
    let c = shape.component_by_name(name)?;
    let mut out = word.clone();
    for (g, t) in out.gens.iter_mut().zip(&shape.touches) {
        if let (
            Gen::Crossing { positive, .. },
            Touch::Crossing { left, right, left_plus, right_plus },
        ) = (g, t)
        {
            if (*left == c) != (*right == c) {
                // with both strands downward, a positive crossing runs the
                // left strand over; each upward orientation flips the sign
                // convention but not the geometry, so:
                //   over_left ⇔ positive == (number of upward strands even)
                let ups_even = *left_plus == *right_plus;
                let want_left_over = *left == c;
                *positive = if want_left_over { ups_even } else { !ups_even };
            }
        }
    }
    Ok(out)
}

/// Doubles component `name` into two blackboard-parallel copies: every slice
/// it passes through is duplicated (nested caps/cups, doubled crossings).
/// Returns the doubled word; the copy is born immediately after its parent
/// piece, so the two parallel components sit at adjacent birth ranks.
pub fn double_component(word: &TangleWord, name: &str) -> Result<TangleWord, Error> {
    let shape = word.shape()?;
    let c = shape.component_by_name(name)?;
    if shape.components[c].top_position.is_some() {
        return Err(Error::Word("doubling is implemented for closed components".into()));
    }

    // simulate slot occupancy to know which positions belong to c, mapping
    // old positions to new ones (each c-position widens to two)
    let mut in_c: Vec<bool> = Vec::new(); // per old boundary position
    let mut out = TangleWord { top: word.top, ..Default::default() };
    // the word was validated; closed components have no top strands
    let new_pos = |in_c: &[bool], old: usize| -> usize {
        // 1-based old position -> 1-based new position
        old + in_c[..old - 1].iter().filter(|&&b| b).count()
    };

    // track arc serial per slot to know c-membership as arcs appear
    let mut uf = Uf::new();
    let mut slots: Vec<u32> = Vec::new();
    for _ in 0..word.top {
        let s = uf.fresh();
        slots.push(s);
        in_c.push(false);
    }
    // recompute which serials belong to c by replaying cups
    // (shape.touches already ranks them, but membership changes as the word
    // plays; we resolve serial → final rank through a second union-find
    // replay identical to shape())
    let mut final_uf = Uf::new();
    for _ in 0..word.top {
        final_uf.fresh();
    }
    {
        // pre-build the full union-find over the whole word
        let mut tmp_slots: Vec<u32> = (0..word.top as u32).collect();
        for g in &word.gens {
            match g {
                Gen::Cap { pos, .. } => {
                    let s = final_uf.fresh();
                    tmp_slots.insert(pos - 1, s);
                    tmp_slots.insert(pos - 1, s);
                }
                Gen::Cup { pos, .. } => {
                    let (a, b) = (tmp_slots[pos - 1], tmp_slots[*pos]);
                    final_uf.union(a, b);
                    tmp_slots.drain(pos - 1..=*pos);
                }
                Gen::Crossing { pos, .. } => tmp_slots.swap(pos - 1, *pos),
                Gen::Id(_) => {}
            }
        }
    }
    let ranked: Vec<u32> = {
        let total = final_uf.parent.len() as u32;
        let mut r: Vec<u32> = (0..total).map(|a| final_uf.find(a)).collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let belongs = |serial: u32, final_uf: &mut Uf| -> bool {
        ranked.binary_search(&final_uf.find(serial)).unwrap() == c
    };

    for g in &word.gens {
        match g {
            // id assertions are regenerated at the end
            Gen::Id(_) => {}
            Gen::Crossing { pos, positive } => {
                let i = *pos;
                let (la, lb) = (in_c[i - 1], in_c[i]);
                let p = new_pos(&in_c, i);
                match (la, lb) {
                    (false, false) => out.gens.push(Gen::Crossing { pos: p, positive: *positive }),
                    (true, false) => {
                        // the pair at (p, p+1) crosses the single at p+2
                        out.gens.push(Gen::Crossing { pos: p + 1, positive: *positive });
                        out.gens.push(Gen::Crossing { pos: p, positive: *positive });
                    }
                    (false, true) => {
                        out.gens.push(Gen::Crossing { pos: p, positive: *positive });
                        out.gens.push(Gen::Crossing { pos: p + 1, positive: *positive });
                    }
                    (true, true) => {
                        // pair past pair
                        out.gens.push(Gen::Crossing { pos: p + 1, positive: *positive });
                        out.gens.push(Gen::Crossing { pos: p, positive: *positive });
                        out.gens.push(Gen::Crossing { pos: p + 2, positive: *positive });
                        out.gens.push(Gen::Crossing { pos: p + 1, positive: *positive });
                    }
                }
                slots.swap(i - 1, i);
                in_c.swap(i - 1, i);
            }
            Gen::Cap { pos, cw } => {
                let s = uf.fresh();
                let _ = final_uf.fresh();
                let mine = belongs(s, &mut final_uf);
                let p = new_pos(&in_c, *pos);
                out.gens.push(Gen::Cap { pos: p, cw: *cw });
                if mine {
                    out.gens.push(Gen::Cap { pos: p + 1, cw: *cw });
                }
                slots.insert(pos - 1, s);
                slots.insert(pos - 1, s);
                in_c.insert(pos - 1, mine);
                in_c.insert(pos - 1, mine);
            }
            Gen::Cup { pos, cw } => {
                let i = *pos;
                let mine = in_c[i - 1];
                debug_assert_eq!(mine, in_c[i], "cup joins one component");
                let p = new_pos(&in_c, i);
                if mine {
                    // the doubled picture has [a1 a2 b2 b1] for the old
                    // [a b]: inner cup first, then outer
                    out.gens.push(Gen::Cup { pos: p + 1, cw: *cw });
                    out.gens.push(Gen::Cup { pos: p, cw: *cw });
                } else {
                    out.gens.push(Gen::Cup { pos: p, cw: *cw });
                }
                uf.union(slots[i - 1], slots[i]);
                slots.drain(i - 1..=i);
                in_c.drain(i - 1..=i);
            }
        }
    }

    // framings: the copy sits at birth rank c+1 and inherits its parent's
    // framing (a framed parallel push-off has the same framing); components
    // after it shift one rank up
    out.labels = word.labels.clone();
    refresh_id_lines(&mut out)?;
    let new_shape = out.shape()?;
    let mut frames = Vec::new();
    for (name, f) in &word.frames {
        let k = shape.component_by_name(name)?;
        let k_new = if k <= c { k } else { k + 1 };
        frames.push((new_shape.components[k_new].name.clone(), *f));
    }
    let parent_framing = shape.components[c].framing;
    if parent_framing != 0 {
        frames.push((new_shape.components[c + 1].name.clone(), parent_framing));
    }
    out.frames = frames;
    Ok(out)
}

/// Rebuilds `Id` assertions to match the actual boundary (used after word
/// surgery that changes orientations or widths). Existing id lines are
/// dropped; one is kept at the very top for open words.
fn refresh_id_lines(word: &mut TangleWord) -> Result<(), Error> {
    word.gens.retain(|g| !matches!(g, Gen::Id(_)));
    if word.top > 0 {
        word.gens.insert(0, Gen::Id(vec![true; word.top]));
    }
    word.shape().map(|_| ())
}

// ---------------------------------------------------------------------------
// built-in fixtures

/// Expands a built-in fixture: `unknot f`, `hopf f1 f2`, `trefoil f`
/// (right-handed, writhe +3), `borromean f1 f2 f3`.
pub fn builtin(name: &str, framings: &[i64]) -> Result<TangleWord, Error> {
    let (m, xs): (usize, Vec<(usize, bool)>) = match (name, framings.len()) {
        ("unknot", 1) => (1, vec![]),
        ("hopf", 2) => (2, vec![(1, true), (1, true)]),
        ("trefoil", 1) => (2, vec![(1, true), (1, true), (1, true)]),
        ("borromean", 3) => (
            3,
            vec![(1, true), (2, false), (1, true), (2, false), (1, true), (2, false)],
        ),
        _ => {
            return Err(Error::Word(format!(
                "unknown fixture `{name}` with {} framing(s)",
                framings.len()
            )))
        }
    };
    let open = braid(m, &xs);
    let mut closed = close_string_link(&open)?;
    let shape = closed.shape()?;
    if shape.components.len() != framings.len() {
        return Err(Error::Word(format!(
            "fixture `{name}` closes into {} component(s), got {} framings",
            shape.components.len(),
            framings.len()
        )));
    }
    closed.frames = shape
        .components
        .iter()
        .zip(framings)
        .map(|(c, f)| (c.name.clone(), *f))
        .collect();
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip_through_display() {
        let text = "id + +\nx+ 1\ncap 2 ccw\nx- 3\ncup 2 ccw\nlabel strand 1 = k1\nframe k1 -2\n";
        let w = TangleWord::parse(text).unwrap();
        let again = TangleWord::parse(&w.to_string()).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(TangleWord::parse("x* 1"), Err(Error::Parse { .. })));
        assert!(matches!(TangleWord::parse("cap 0 cw"), Err(Error::Parse { .. })));
        assert!(matches!(TangleWord::parse("cup 1"), Err(Error::Parse { .. })));
        assert!(matches!(TangleWord::parse("frame 1x 2"), Err(Error::Parse { .. })));
        // structural errors surface in shape(), not parse()
        let w = TangleWord::parse("cap 1 cw\ncup 1 ccw").unwrap();
        assert!(matches!(w.shape(), Err(Error::Word(_))));
        let w = TangleWord::parse("id +\nx+ 1").unwrap();
        assert!(matches!(w.shape(), Err(Error::Word(_))));
    }

    #[test]
    fn unknot_is_one_closed_zero_writhe_component() {
        let w = builtin("unknot", &[3]).unwrap();
        let s = w.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].writhe, 0);
        assert_eq!(s.components[0].framing, 3);
        assert_eq!(s.components[0].name, "c1");
    }

    #[test]
    fn hopf_linking_number_is_one() {
        let w = builtin("hopf", &[0, 0]).unwrap();
        let s = w.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.linking(0, 1).unwrap(), 1);
        assert_eq!(s.components[0].writhe, 0);
        assert_eq!(s.components[1].writhe, 0);
    }

    #[test]
    fn trefoil_is_one_component_with_writhe_three() {
        let w = builtin("trefoil", &[0]).unwrap();
        let s = w.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].writhe, 3);
    }

    #[test]
    fn borromean_components_are_pairwise_unlinked() {
        let w = builtin("borromean", &[1, 1, 1]).unwrap();
        let s = w.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 3);
        for i in 0..3 {
            assert_eq!(s.components[i].writhe, 0, "component {i}");
            for j in i + 1..3 {
                assert_eq!(s.linking(i, j).unwrap(), 0, "pair {i},{j}");
            }
        }
    }

    #[test]
    fn gamma_generators_are_pure() {
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let w = braid(3, &gamma(i, j));
            let s = w.require_string_link().unwrap();
            assert_eq!(s.components.len(), 3);
            assert_eq!(s.linking(i - 1, j - 1).unwrap(), 1, "γ_{i}{j} links its pair once");
        }
    }

    #[test]
    fn closure_of_identity_is_a_zero_framed_unknot_word() {
        let closed = close_string_link(&braid(1, &[])).unwrap();
        let s = closed.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].writhe, 0);
        assert_eq!(s.components[0].framing, 0);
    }

    #[test]
    fn closure_preserves_linking_and_framing() {
        let mut open = braid(2, &[(1, true), (1, true)]);
        open.frames.push(("c2".into(), 5));
        let closed = close_string_link(&open).unwrap();
        let s = closed.shape().unwrap();
        assert_eq!(s.linking(0, 1).unwrap(), 1);
        assert_eq!(s.components[1].framing, 5);
        assert_eq!(s.components[0].framing, 0);
    }

    #[test]
    fn reversal_flips_mixed_crossings_only() {
        let w = builtin("hopf", &[0, 0]).unwrap();
        let r = reverse_component(&w, "c2").unwrap();
        let s = r.shape().unwrap();
        assert_eq!(s.linking(0, 1).unwrap(), -1);
        // reversing back restores the original linking
        let rr = reverse_component(&r, "c2").unwrap();
        assert_eq!(rr.shape().unwrap().linking(0, 1).unwrap(), 1);
    }

    #[test]
    fn reversal_keeps_self_writhe() {
        let w = builtin("trefoil", &[0]).unwrap();
        let r = reverse_component(&w, "c1").unwrap();
        assert_eq!(r.shape().unwrap().components[0].writhe, 3);
    }

    #[test]
    fn unlinking_hopf_kills_the_linking_number() {
        let w = builtin("hopf", &[0, 0]).unwrap();
        let u = unlink_component(&w, "c2").unwrap();
        let s = u.shape().unwrap();
        // both crossings now carry the sign that puts c2 over; at one of the
        // two crossings c2 sat left, at the other right, so the signs differ
        assert_eq!(s.linking(0, 1).unwrap(), 0);
    }

    #[test]
    fn unlinking_is_idempotent() {
        let w = builtin("borromean", &[0, 0, 0]).unwrap();
        let u = unlink_component(&w, "c1").unwrap();
        let uu = unlink_component(&u, "c1").unwrap();
        assert_eq!(u, uu);
    }

    #[test]
    fn doubling_the_unknot_gives_two_parallel_circles() {
        let w = builtin("unknot", &[0]).unwrap();
        let d = double_component(&w, "c1").unwrap();
        let s = d.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.linking(0, 1).unwrap(), 0, "0-writhe parallel copies do not link");
    }

    #[test]
    fn doubling_the_trefoil_links_copies_by_the_writhe() {
        let w = builtin("trefoil", &[3]).unwrap();
        let d = double_component(&w, "c1").unwrap();
        let s = d.shape().unwrap();
        assert!(s.all_closed());
        assert_eq!(s.components.len(), 2);
        assert_eq!(s.components[0].writhe, 3);
        assert_eq!(s.components[1].writhe, 3);
        assert_eq!(s.linking(0, 1).unwrap(), 3, "blackboard parallel links by the writhe");
    }

    #[test]
    fn doubling_one_hopf_component_doubles_its_linking() {
        let w = builtin("hopf", &[0, 0]).unwrap();
        let d = double_component(&w, "c2").unwrap();
        let s = d.shape().unwrap();
        assert_eq!(s.components.len(), 3);
        // copies of c2 sit at birth ranks 1 and 2; c1 keeps rank 0
        assert_eq!(s.linking(0, 1).unwrap(), 1);
        assert_eq!(s.linking(0, 2).unwrap(), 1);
        assert_eq!(s.linking(1, 2).unwrap(), 0);
    }
}
