//! Reference tables of intersection-graph nodes and their comparison with the
//! computed graph.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::itypes::{sign_canonical, FourteenTile, IntersectionGraph, NeighborSubset, SignClass};
use crate::lattice::TileParams;
use crate::surface::Topology;

const TABLE_DATA: &str = include_str!("../data/intersection_tables.txt");

/// The two parameter families with `A = 1` and 14 neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `A = 1, B = 2, C >= 4`.
    C1,
    /// `A = 1, B >= 3, C >= 2B`.
    C2,
}

impl Family {
    pub fn of(p: TileParams) -> Result<Family> {
        let (a, b, c) = (p.a(), p.b(), p.c());
        match (a, b) {
            (1, 2) if c >= 4 => Ok(Family::C1),
            (1, b) if b >= 3 && c >= 2 * b => Ok(Family::C2),
            _ => Err(Error::UnsupportedParams(format!(
                "{p} is outside A=1, B=2, C>=4 and A=1, B>=3, C>=2B"
            ))),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Family::C1 => 55,
            Family::C2 => 57,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    Always,
    C1,
    C2,
    CGreater2B,
    CEquals2B,
}

impl Condition {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "-" => Condition::Always,
            "C1" => Condition::C1,
            "C2" => Condition::C2,
            "C>2B" => Condition::CGreater2B,
            "C=2B" => Condition::CEquals2B,
            _ => return Err(Error::Parse(format!("unknown condition {s}"))),
        })
    }

    pub fn holds(&self, p: TileParams, f: Family) -> bool {
        match self {
            Condition::Always => true,
            Condition::C1 => f == Family::C1,
            Condition::C2 => f == Family::C2,
            Condition::CGreater2B => p.c() > 2 * p.b(),
            Condition::CEquals2B => p.c() == 2 * p.b(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Always => "-",
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::CGreater2B => "C>2B",
            Condition::CEquals2B => "C=2B",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub table: usize,
    pub name: String,
    pub condition: Condition,
    pub topology: Topology,
    pub expression: String,
    pub subset: NeighborSubset,
}

/// Parses a set expression over neighbor names.
///
/// Grammar: `expr := term (('|' | '\') term)*` evaluated left to right;
/// `term := 'S' | 'S1' | '-S1' | '{' elem (',' elem)* '}' | '(' expr ')'`;
/// `elem` is a signed combination of `P`, `Q`, `N` naming one neighbor.
pub fn parse_subset(expr: &str) -> Result<NeighborSubset> {
    let chars: Vec<char> = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let r = parse_expr(&chars, &mut pos)?;
    if pos != chars.len() {
        return Err(Error::Parse(format!("trailing input in {expr:?} at {pos}")));
    }
    Ok(r)
}

fn parse_expr(s: &[char], pos: &mut usize) -> Result<NeighborSubset> {
    let mut acc = parse_term(s, pos)?;
    while let Some(&op) = s.get(*pos) {
        match op {
            '|' => {
                *pos += 1;
                acc = acc.union(parse_term(s, pos)?);
            }
            '\\' => {
                *pos += 1;
                acc = acc.minus(parse_term(s, pos)?);
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_term(s: &[char], pos: &mut usize) -> Result<NeighborSubset> {
    let rest: String = s[*pos..].iter().collect();
    if rest.starts_with("-S1") {
        *pos += 3;
        return Ok(-NeighborSubset::S1);
    }
    if rest.starts_with("S1") {
        *pos += 2;
        return Ok(NeighborSubset::S1);
    }
    if rest.starts_with('S') {
        *pos += 1;
        return Ok(NeighborSubset::FULL);
    }
    match s.get(*pos) {
        Some('(') => {
            *pos += 1;
            let r = parse_expr(s, pos)?;
            if s.get(*pos) != Some(&')') {
                return Err(Error::Parse(format!("expected ')' at {pos}")));
            }
            *pos += 1;
            Ok(r)
        }
        Some('{') => {
            *pos += 1;
            let mut r = NeighborSubset::EMPTY;
            loop {
                let start = *pos;
                while *pos < s.len() && !matches!(s[*pos], ',' | '}') {
                    *pos += 1;
                }
                let elem: String = s[start..*pos].iter().collect();
                r = r.union(NeighborSubset::singleton(parse_element(&elem)?));
                match s.get(*pos) {
                    Some(',') => *pos += 1,
                    Some('}') => {
                        *pos += 1;
                        return Ok(r);
                    }
                    _ => return Err(Error::Parse("unterminated set".into())),
                }
            }
        }
        _ => Err(Error::Parse(format!("unexpected input at {pos}"))),
    }
}

/// Canonical index of a combination like `Q-N-P`.
fn parse_element(elem: &str) -> Result<usize> {
    let mut coef = [0i64; 3];
    let mut sign = 1;
    let mut seen = false;
    for ch in elem.chars() {
        match ch {
            '+' => sign = 1,
            '-' => sign = -1,
            'P' | 'Q' | 'N' => {
                let k = "PQN".find(ch).unwrap();
                coef[k] += sign;
                sign = 1;
                seen = true;
            }
            _ => return Err(Error::Parse(format!("bad element {elem:?}"))),
        }
    }
    if !seen {
        return Err(Error::Parse(format!("empty element {elem:?}")));
    }
    const BASIS: [[i64; 3]; 7] = [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [-1, 1, 0],
        [-1, 0, 1],
        [0, -1, 1],
        [1, -1, 1],
    ];
    for (i, b) in BASIS.iter().enumerate() {
        if *b == coef {
            return Ok(i);
        }
        if [-b[0], -b[1], -b[2]] == coef {
            return Ok(i + 7);
        }
    }
    Err(Error::Parse(format!("{elem:?} is not a neighbor")))
}

pub fn parse_tables(data: &str) -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for (n, line) in data.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!("line {}: expected 5 fields", n + 1)));
        }
        let table = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad table number", n + 1)))?;
        let topology = Topology::from_token(fields[3])
            .ok_or_else(|| Error::Parse(format!("line {}: bad topology {}", n + 1, fields[3])))?;
        out.push(TableEntry {
            table,
            name: fields[1].to_string(),
            condition: Condition::parse(fields[2])?,
            topology,
            expression: fields[4].to_string(),
            subset: parse_subset(fields[4])?,
        });
    }
    Ok(out)
}

/// The embedded reference tables.
pub fn reference_tables() -> Vec<TableEntry> {
    parse_tables(TABLE_DATA).expect("embedded tables parse")
}

#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub name: String,
    pub table: usize,
    pub condition: Condition,
    pub applies: bool,
    pub class: SignClass,
    pub present: bool,
    pub first_iteration: Option<usize>,
    pub expected_topology: Topology,
    pub topology: Option<Topology>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub params: TileParams,
    pub family: Family,
    pub node_count: usize,
    pub expected_node_count: usize,
    pub rows: Vec<RowCheck>,
    /// Computed nodes matched by no applicable table row.
    pub unmatched_nodes: Vec<String>,
    pub empty_successor_events: usize,
    pub pass: bool,
}

impl TableReport {
    pub fn failures(&self) -> impl Iterator<Item = &RowCheck> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

pub fn verify_tables(t: &FourteenTile, g: &IntersectionGraph) -> Result<TableReport> {
    let p = t.ds.params();
    let family = Family::of(p)?;
    let entries = reference_tables();
    let mut matched: BTreeMap<usize, String> = BTreeMap::new();
    let mut rows = Vec::new();
    for e in entries {
        let applies = e.condition.holds(p, family);
        let class = sign_canonical(e.subset);
        let node = g.node_of(class);
        let first_iteration = node.map(|n| g.nodes[n].first_iteration);
        let topology = t.classify(e.subset).ok().map(|d| d.topology());
        let pass = if applies {
            first_iteration == Some(e.table) && topology == Some(e.topology)
        } else {
            // Rows for the other family or case must not appear at that step.
            first_iteration != Some(e.table)
        };
        if applies {
            if let Some(n) = node {
                matched.insert(n, e.name.clone());
            }
        }
        rows.push(RowCheck {
            name: e.name,
            table: e.table,
            condition: e.condition,
            applies,
            class,
            present: node.is_some(),
            first_iteration,
            expected_topology: e.topology,
            topology,
            pass,
        });
    }
    let unmatched_nodes: Vec<String> = (0..g.len())
        .filter(|n| !matched.contains_key(n))
        .map(|n| g.nodes[n].class.to_string())
        .collect();
    let pass = rows.iter().all(|r| r.pass)
        && unmatched_nodes.is_empty()
        && g.len() == family.node_count();
    Ok(TableReport {
        params: p,
        family,
        node_count: g.len(),
        expected_node_count: family.node_count(),
        rows,
        unmatched_nodes,
        empty_successor_events: g.empty_successors.len(),
        pass,
    })
}

/// Table name of a node under the given parameters, if any.
pub fn node_name(p: TileParams, class: SignClass) -> Option<String> {
    let family = Family::of(p).ok()?;
    reference_tables()
        .into_iter()
        .find(|e| e.condition.holds(p, family) && sign_canonical(e.subset) == class)
        .map(|e| e.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::itypes::build_intersection_graph;
    use crate::lattice::DigitSystem;

    #[test]
    fn parser() {
        assert_eq!(parse_subset("S").unwrap(), NeighborSubset::FULL);
        assert_eq!(parse_subset("{Q-N-P}").unwrap(), NeighborSubset::singleton(13));
        assert_eq!(parse_subset("{P-N}").unwrap(), NeighborSubset::singleton(11));
        assert_eq!(parse_subset("S1\\{P}").unwrap(), NeighborSubset(0b111_1110));
        assert_eq!(
            parse_subset("(S1\\{P})|{-N}").unwrap(),
            NeighborSubset(0b111_1110 | 1 << 9)
        );
        assert_eq!(parse_subset("-S1").unwrap(), -NeighborSubset::S1);
        assert!(parse_subset("{2P}").is_err());
        assert!(parse_subset("{P+Q}").is_err());
    }

    #[test]
    fn fixture_is_well_formed() {
        let t = reference_tables();
        assert_eq!(t.len(), 63);
        assert!(t.iter().all(|e| !e.subset.is_empty()));
    }

    #[test]
    fn families() {
        let p = |a, b, c| TileParams::new(a, b, c).unwrap();
        assert_eq!(Family::of(p(1, 2, 4)).unwrap(), Family::C1);
        assert_eq!(Family::of(p(1, 3, 6)).unwrap(), Family::C2);
        assert!(Family::of(p(1, 3, 5)).is_err());
        assert!(matches!(Family::of(p(2, 3, 5)), Err(Error::UnsupportedParams(_))));
    }

    #[test]
    fn tables_match_124() {
        let t = FourteenTile::new(&DigitSystem::new(1, 2, 4).unwrap()).unwrap();
        let g = build_intersection_graph(&t).unwrap();
        let r = verify_tables(&t, &g).unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert!(r.unmatched_nodes.is_empty(), "{:?}", r.unmatched_nodes);
        assert!(r.pass);
        let c4 = r.rows.iter().find(|x| x.name == "c4").unwrap();
        assert!(!c4.present);
    }
}
