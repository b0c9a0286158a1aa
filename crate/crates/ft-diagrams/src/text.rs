//! Text form of diagrams.
//!
//! A record is `empty` or up to five sections joined by ` ; `:
//!
//! ```text
//! support c1:circle+ c2:circle+ ; legs c1:[a,b] c2:[c] ; ivert v1:(a,c,e) ; edges (b-e) ; loops: 2
//! ```
//!
//! * `support` — components in order, `name:kind` with kind one of
//!   `circle+`, `circle-`, `interval+`, `interval-`, `mark`.
//! * `legs` — per component, attached edge-end names in stored order.
//! * `ivert` — internal trivalent vertices, end names in cyclic order.
//! * `edges` — pairs up end names that appear only once elsewhere.
//! * `loops: k` — number of free dashed loops.
//!
//! End names label edge-ends: a name used twice denotes the two ends of one
//! dashed edge; names used once must be matched in `edges`. The printer uses
//! the doubled-name style (no `edges` section). Interval components parse as
//! standard strands (the i-th interval runs from the i-th top boundary point
//! to the i-th bottom one); richer arc anchors are carried by the support
//! object itself, not by this text form (see [`parse_diagram_on`]).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::diagram::{Diagram, EndId};
use crate::support::{Component, End, Kind, Support};

/// Name for edge index `i`: `a`…`z`, `a1`…`z1`, `a2`…
fn edge_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

fn component_name(c: &Component) -> String {
    match c.kind {
        Kind::Circle => format!("c{}", c.label),
        Kind::Path { .. } => format!("s{}", c.label),
        Kind::Mark => format!("m{}", c.label),
    }
}

fn kind_text(c: &Component) -> &'static str {
    match (c.kind, c.reversed) {
        (Kind::Circle, false) => "circle+",
        (Kind::Circle, true) => "circle-",
        (Kind::Path { .. }, false) => "interval+",
        (Kind::Path { .. }, true) => "interval-",
        (Kind::Mark, _) => "mark",
    }
}

/// Prints a diagram in doubled-name style (deterministic; canonical input
/// gives the canonical text).
pub fn diagram_to_text(d: &Diagram) -> String {
    let mut sections: Vec<String> = Vec::new();
    if !d.support.is_empty() {
        let mut s = String::from("support");
        for c in &d.support.components {
            let _ = write!(s, " {}:{}", component_name(c), kind_text(c));
        }
        sections.push(s);
    }
    // Name edges in first-encounter order over legs then vertex slots.
    let mut names: HashMap<EndId, String> = HashMap::new();
    let mut next = 0usize;
    let mut name_of = |e: EndId, mate: &[EndId], names: &mut HashMap<EndId, String>| -> String {
        if let Some(n) = names.get(&e) {
            return n.clone();
        }
        let n = edge_name(next);
        next += 1;
        names.insert(e, n.clone());
        names.insert(mate[e as usize], n.clone());
        n
    };
    if d.total_legs() > 0 {
        let mut s = String::from("legs");
        for (ci, ends) in d.legs.iter().enumerate() {
            if ends.is_empty() {
                continue;
            }
            let _ = write!(s, " {}:[", component_name(&d.support.components[ci]));
            for (i, &e) in ends.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&name_of(e, &d.mate, &mut names));
            }
            s.push(']');
        }
        sections.push(s);
    }
    if !d.verts.is_empty() {
        let mut s = String::from("ivert");
        for (vi, v) in d.verts.iter().enumerate() {
            let _ = write!(s, " v{}:(", vi + 1);
            for (i, &e) in v.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&name_of(e, &d.mate, &mut names));
            }
            s.push(')');
        }
        sections.push(s);
    }
    if d.loops > 0 {
        sections.push(format!("loops: {}", d.loops));
    }
    if sections.is_empty() {
        return "empty".to_string();
    }
    sections.join(" ; ")
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

const MAX_ENDS: usize = 1 << 16;
const MAX_COMPONENTS: usize = 4096;

/// Parses a diagram record. Never panics on malformed input.
pub fn parse_diagram(text: &str) -> Result<Diagram, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty input".into());
    }
    if t == "empty" {
        return Ok(Diagram::empty(Support::empty()));
    }
    let mut support: Option<Support> = None;
    let mut comp_names: Vec<String> = Vec::new();
    let mut legs_entries: Vec<(String, Vec<String>)> = Vec::new();
    let mut vert_entries: Vec<[String; 3]> = Vec::new();
    let mut edge_pairs: Vec<(String, String)> = Vec::new();
    let mut loops: u32 = 0;
    let mut seen_sections: Vec<&str> = Vec::new();

    for section in t.split(';') {
        let section = section.trim();
        if section.is_empty() {
            return Err("empty section".into());
        }
        let (keyword, rest) = match section.split_once(|c: char| c.is_whitespace() || c == ':') {
            Some((k, r)) => (k, r.trim()),
            None => (section, ""),
        };
        let keyword = if section.starts_with("loops") { "loops" } else { keyword };
        if seen_sections.contains(&keyword) {
            return Err(format!("duplicate section `{keyword}`"));
        }
        match keyword {
            "support" => {
                let mut comps = Vec::new();
                for entry in rest.split_whitespace() {
                    let (name, kind) = entry
                        .split_once(':')
                        .ok_or_else(|| format!("bad support entry `{entry}`"))?;
                    if !valid_name(name) {
                        return Err(format!("bad component name `{name}`"));
                    }
                    if comp_names.iter().any(|n| n == name) {
                        return Err(format!("duplicate component name `{name}`"));
                    }
                    let strand_index = comps
                        .iter()
                        .filter(|c: &&Component| matches!(c.kind, Kind::Path { .. }))
                        .count() as u16;
                    let (kind, reversed) = match kind {
                        "circle+" => (Kind::Circle, false),
                        "circle-" => (Kind::Circle, true),
                        "interval+" => (
                            Kind::Path { from: End::Top(strand_index), to: End::Bot(strand_index) },
                            false,
                        ),
                        "interval-" => (
                            Kind::Path { from: End::Top(strand_index), to: End::Bot(strand_index) },
                            true,
                        ),
                        "mark" => (Kind::Mark, false),
                        other => return Err(format!("unknown component kind `{other}`")),
                    };
                    comps.push(Component { kind, reversed, label: comps.len() as u32 + 1 });
                    comp_names.push(name.to_string());
                    if comps.len() > MAX_COMPONENTS {
                        return Err("too many components".into());
                    }
                }
                support = Some(Support { components: comps });
            }
            "legs" => {
                for entry in rest.split_whitespace() {
                    let (name, list) = entry
                        .split_once(":[")
                        .ok_or_else(|| format!("bad legs entry `{entry}`"))?;
                    let list = list
                        .strip_suffix(']')
                        .ok_or_else(|| format!("unterminated leg list for `{name}`"))?;
                    let ends: Vec<String> = if list.trim().is_empty() {
                        Vec::new()
                    } else {
                        list.split(',').map(|x| x.trim().to_string()).collect()
                    };
                    for e in &ends {
                        if !valid_name(e) {
                            return Err(format!("bad end name `{e}`"));
                        }
                    }
                    if legs_entries.iter().any(|(n, _)| n == name) {
                        return Err(format!("duplicate legs entry for `{name}`"));
                    }
                    legs_entries.push((name.to_string(), ends));
                }
            }
            "ivert" => {
                for entry in rest.split_whitespace() {
                    let (name, list) = entry
                        .split_once(":(")
                        .ok_or_else(|| format!("bad ivert entry `{entry}`"))?;
                    if !valid_name(name) {
                        return Err(format!("bad vertex name `{name}`"));
                    }
                    let list = list
                        .strip_suffix(')')
                        .ok_or_else(|| format!("unterminated vertex for `{name}`"))?;
                    let slots: Vec<&str> = list.split(',').map(|x| x.trim()).collect();
                    if slots.len() != 3 {
                        return Err(format!("vertex `{name}` needs exactly 3 ends"));
                    }
                    for e in &slots {
                        if !valid_name(e) {
                            return Err(format!("bad end name `{e}`"));
                        }
                    }
                    vert_entries.push([
                        slots[0].to_string(),
                        slots[1].to_string(),
                        slots[2].to_string(),
                    ]);
                }
            }
            "edges" => {
                for entry in rest.split_whitespace() {
                    let inner = entry
                        .strip_prefix('(')
                        .and_then(|x| x.strip_suffix(')'))
                        .ok_or_else(|| format!("bad edges entry `{entry}`"))?;
                    let (a, b) = inner
                        .split_once('-')
                        .ok_or_else(|| format!("bad edge pair `{entry}`"))?;
                    if !valid_name(a) || !valid_name(b) {
                        return Err(format!("bad end name in `{entry}`"));
                    }
                    edge_pairs.push((a.to_string(), b.to_string()));
                }
            }
            "loops" => {
                loops = rest
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| format!("bad loop count `{rest}`"))?;
                if loops > 1_000_000 {
                    return Err("loop count too large".into());
                }
            }
            other => return Err(format!("unknown section `{other}`")),
        }
        seen_sections.push(match keyword {
            "support" => "support",
            "legs" => "legs",
            "ivert" => "ivert",
            "edges" => "edges",
            _ => "loops",
        });
    }

    let support = support.unwrap_or_else(Support::empty);
    // Collect end-name occurrences in scan order; occurrence index = end id.
    let mut occurrences: Vec<String> = Vec::new();
    let mut legs: Vec<Vec<EndId>> = vec![Vec::new(); support.len()];
    for (cname, ends) in &legs_entries {
        let ci = comp_names
            .iter()
            .position(|n| n == cname)
            .ok_or_else(|| format!("legs refer to unknown component `{cname}`"))?;
        for e in ends {
            legs[ci].push(occurrences.len() as EndId);
            occurrences.push(e.clone());
            if occurrences.len() > MAX_ENDS {
                return Err("too many edge-ends".into());
            }
        }
    }
    let mut verts: Vec<[EndId; 3]> = Vec::new();
    for slots in &vert_entries {
        let base = occurrences.len() as EndId;
        if occurrences.len() + 3 > MAX_ENDS {
            return Err("too many edge-ends".into());
        }
        for e in slots {
            occurrences.push(e.clone());
        }
        verts.push([base, base + 1, base + 2]);
    }

    // Match names: twice = edge, once = needs an `edges` pairing.
    let mut by_name: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, name) in occurrences.iter().enumerate() {
        by_name.entry(name).or_default().push(i);
    }
    let mut mate: Vec<EndId> = vec![EndId::MAX; occurrences.len()];
    for (name, occs) in &by_name {
        match occs.len() {
            1 => {}
            2 => {
                mate[occs[0]] = occs[1] as EndId;
                mate[occs[1]] = occs[0] as EndId;
            }
            k => return Err(format!("end name `{name}` used {k} times (max 2)")),
        }
    }
    for (a, b) in &edge_pairs {
        if a == b {
            return Err(format!("edge pair ({a}-{b}) repeats a name; write the name twice instead"));
        }
        let ia = single_occurrence(&by_name, a)?;
        let ib = single_occurrence(&by_name, b)?;
        if mate[ia] != EndId::MAX || mate[ib] != EndId::MAX {
            return Err(format!("edge pair ({a}-{b}) re-pairs an already matched name"));
        }
        mate[ia] = ib as EndId;
        mate[ib] = ia as EndId;
    }
    if let Some(i) = mate.iter().position(|&m| m == EndId::MAX) {
        return Err(format!("end name `{}` is unmatched", occurrences[i]));
    }

    let d = Diagram { support, legs, verts, mate, loops };
    d.check()?;
    Ok(d)
}

fn single_occurrence(by_name: &HashMap<&str, Vec<usize>>, name: &str) -> Result<usize, String> {
    match by_name.get(name) {
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(format!("`{name}` appears twice and again in edges")),
        None => Err(format!("edges refer to unknown end name `{name}`")),
    }
}

/// Parses a record whose support is pinned externally (e.g. by a cache-file
/// header): kinds and orientations must agree with `support`, whose anchor
/// and label data then replace the parsed placeholders.
pub fn parse_diagram_on(support: &Support, text: &str) -> Result<Diagram, String> {
    let mut d = parse_diagram(text)?;
    if d.support.len() != support.len() {
        return Err(format!(
            "support mismatch: text has {} components, expected {}",
            d.support.len(),
            support.len()
        ));
    }
    for (a, b) in d.support.components.iter().zip(&support.components) {
        let same_kind = matches!(
            (a.kind, b.kind),
            (Kind::Circle, Kind::Circle) | (Kind::Path { .. }, Kind::Path { .. }) | (Kind::Mark, Kind::Mark)
        );
        if !same_kind || a.reversed != b.reversed {
            return Err("support mismatch: component kinds differ".into());
        }
    }
    d.support = support.clone();
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DiagramBuilder;

    fn round_trip(d: &Diagram) {
        use crate::canon::canonical_form;
        let text = diagram_to_text(d);
        let back = parse_diagram(&text).unwrap_or_else(|e| panic!("reparse `{text}`: {e}"));
        // Reparsing renumbers edge-ends; isomorphism (same key, same sign)
        // is the round-trip guarantee.
        assert_eq!(canonical_form(&back), canonical_form(d), "round trip through `{text}`");
    }

    #[test]
    fn empty_round_trip() {
        let d = Diagram::empty(Support::empty());
        assert_eq!(diagram_to_text(&d), "empty");
        round_trip(&d);
    }

    #[test]
    fn chord_round_trip() {
        let mut b = DiagramBuilder::new(Support::circles(1));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(0, y);
        let d = b.finish();
        assert_eq!(diagram_to_text(&d), "support c1:circle+ ; legs c1:[a,a]");
        round_trip(&d);
    }

    #[test]
    fn theta_round_trip() {
        let mut b = DiagramBuilder::new(Support::empty());
        let (a0, a1) = b.edge();
        let (b0, b1) = b.edge();
        let (c0, c1) = b.edge();
        b.vertex([a0, b0, c0]);
        b.vertex([a1, b1, c1]);
        let d = b.finish();
        assert_eq!(diagram_to_text(&d), "ivert v1:(a,b,c) v2:(a,b,c)");
        round_trip(&d);
    }

    #[test]
    fn loops_and_mixed_support_round_trip() {
        let mut b = DiagramBuilder::new(Support::strands(2));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        b.loops(3);
        round_trip(&b.finish());

        let mut support = Support::circles(1);
        support.components.extend(Support::marks(1).components);
        support.components[0].reversed = true;
        support.components[1].label = 2; // standalone parse numbers labels by position
        let mut b = DiagramBuilder::new(support);
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        round_trip(&b.finish());
    }

    #[test]
    fn explicit_edges_section() {
        let d = parse_diagram(
            "support c1:circle+ c2:circle+ ; legs c1:[a,b] c2:[c] ; ivert v1:(a,c,e) ; edges (b-e)",
        )
        .unwrap();
        assert_eq!(d.degree(), 2);
        assert_eq!(d.legs[0].len(), 2);
        assert_eq!(d.legs[1].len(), 1);
        assert_eq!(d.internal_count(), 1);
        // a: leg0 of c1 to vertex slot 0; b: leg1 of c1 to vertex slot 2.
        assert_eq!(d.mate[d.legs[0][0] as usize], d.verts[0][0]);
        assert_eq!(d.mate[d.legs[0][1] as usize], d.verts[0][2]);
    }

    #[test]
    fn loops_only() {
        let d = parse_diagram("loops: 2").unwrap();
        assert!(d.support.is_empty());
        assert_eq!(d.loops, 2);
        assert_eq!(d.degree(), 0);
        round_trip(&d);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "supprt c1:circle+",
            "support c1:circle",
            "support c1:circle+ c1:circle+",
            "support c1:circle+ ; legs c1:[a]",          // unmatched end
            "support c1:circle+ ; legs c1:[a,a,a]",      // name used 3 times
            "support c1:circle+ ; legs c2:[a,a]",        // unknown component
            "support c1:circle+ ; legs c1:[a,b] ; edges (a-b) (a-b)",
            "support c1:circle+ ; legs c1:[a,a] ; legs c1:[a,a]",
            "ivert v1:(a,b)",
            "ivert v1:(a,b,c,d)",
            "loops: -1",
            "loops: 99999999999",
            "support c1:circle+ ; legs c1:[A,A]",
            "edges (a-a)",
        ] {
            assert!(parse_diagram(bad).is_err(), "should reject `{bad}`");
        }
    }

    #[test]
    fn canonical_text_is_stable_under_relabeling() {
        use crate::canon::canonical_form;
        // same chord diagram built with different edge allocation order
        let build = |swap: bool| {
            let mut b = DiagramBuilder::new(Support::circles(1));
            let (x0, y0) = b.edge();
            let (x1, y1) = b.edge();
            if swap {
                b.leg(0, x1);
                b.leg(0, x0);
                b.leg(0, y1);
                b.leg(0, y0);
            } else {
                b.leg(0, x0);
                b.leg(0, x1);
                b.leg(0, y0);
                b.leg(0, y1);
            }
            b.finish()
        };
        let (k1, _) = canonical_form(&build(false));
        let (k2, _) = canonical_form(&build(true));
        assert_eq!(diagram_to_text(k1.diagram()), diagram_to_text(k2.diagram()));
    }

    #[test]
    fn parse_on_pinned_support() {
        let mut b = DiagramBuilder::new(Support::strands(2));
        let (x, y) = b.edge();
        b.leg(0, x);
        b.leg(1, y);
        let d = b.finish();
        let text = diagram_to_text(&d);
        let mut pinned = Support::strands(2);
        pinned.components[0].label = 7;
        let back = parse_diagram_on(&pinned, &text).unwrap();
        assert_eq!(back.support.components[0].label, 7);
        assert!(parse_diagram_on(&Support::circles(2), &text).is_err());
        assert!(parse_diagram_on(&Support::strands(3), &text).is_err());
    }
}
