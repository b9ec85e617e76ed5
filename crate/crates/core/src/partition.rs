//! Partitionings of the tile into subtiles, their refinements, and ordering
//! certificates for the subtiles of an atom.
//!
//! Atoms are handled purely through addresses: the finite atom with address
//! `a` of depth `k` is the interior of `M^{-k}(T + (a)_M)`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itypes::{
    intersection_type, sign_canonical, successor_set, FourteenTile, NeighborSubset, Subtile,
};
use crate::lattice::{addr_cmp, Address, DigitSystem, LatticeVector};
use crate::neighbors::fourteen_neighbors;
use crate::surface::{SurfaceClass, Topology, TopologyDescriptor};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    Cell(Address),
    Exterior,
}

impl Atom {
    pub fn level(&self) -> Option<usize> {
        match self {
            Atom::Exterior => None,
            Atom::Cell(a) => Some(a.depth()),
        }
    }

    pub fn subtile(&self) -> Subtile {
        match self {
            Atom::Exterior => Subtile::Infinity,
            Atom::Cell(a) => Subtile::Cell(a.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Exterior => f.write_str("g_inf"),
            Atom::Cell(a) => write!(f, "{a}"),
        }
    }
}

/// How the boundary of a finite atom meets the boundary of the tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundaryClass {
    Interior,
    OneDisk,
    TwoDisks,
}

/// Refinement schedule `n_1 < n_2 < ...`; after the listed marks it either
/// stops (all later marks infinite) or continues with a fixed step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    marks: Vec<usize>,
    step: Option<usize>,
}

impl Schedule {
    pub fn new(marks: Vec<usize>, step: Option<usize>) -> Result<Self> {
        if let Some(&first) = marks.first() {
            if first < 3 {
                return Err(Error::BadSequence(format!("first mark {first} is below 3")));
            }
        } else if step.is_some() {
            return Err(Error::BadSequence("a step needs a first mark".into()));
        }
        for w in marks.windows(2) {
            if w[1] < w[0] + 3 {
                return Err(Error::BadSequence(format!("marks {} and {} are closer than 3", w[0], w[1])));
            }
        }
        if let Some(s) = step {
            if s < 3 {
                return Err(Error::BadSequence(format!("step {s} is below 3")));
            }
        }
        Ok(Schedule { marks, step })
    }

    /// All marks infinite: the plain sequence `Q_i`.
    pub fn infinite() -> Self {
        Schedule {
            marks: Vec::new(),
            step: None,
        }
    }

    /// `3, 6, 9, ...`
    pub fn every_third() -> Self {
        Schedule {
            marks: vec![3],
            step: Some(3),
        }
    }

    /// Parses `"3,6,9"`, `"3,7,..."` (continue with the last gap) or `"inf"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "inf" {
            return Ok(Schedule::infinite());
        }
        let mut parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let repeat = parts.last() == Some(&"...");
        if repeat {
            parts.pop();
        }
        let mut marks = Vec::new();
        for p in parts {
            if p == "inf" {
                break;
            }
            marks.push(
                p.parse::<usize>()
                    .map_err(|_| Error::BadSequence(format!("not a number: {p}")))?,
            );
        }
        let step = if repeat {
            match marks.as_slice() {
                [.., a, b] => Some(b - a),
                [a] => Some(*a),
                [] => return Err(Error::BadSequence("nothing to repeat".into())),
            }
        } else {
            None
        };
        Schedule::new(marks, step)
    }

    /// Marks not exceeding `limit`, increasing.
    pub fn marks_up_to(&self, limit: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.marks.iter().copied().filter(|&m| m <= limit).collect();
        if let (Some(step), Some(&last)) = (self.step, self.marks.last()) {
            let mut m = last + step;
            while m <= limit {
                out.push(m);
                m += step;
            }
        }
        out
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.marks.iter().map(|m| m.to_string()).collect();
        if let (Some(step), Some(last)) = (self.step, self.marks.last()) {
            parts.push((last + step).to_string());
            parts.push("...".into());
        } else if !parts.is_empty() {
            parts.push("inf".into());
        }
        if parts.is_empty() {
            f.write_str("inf")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    P,
    Q,
    Qn(Schedule),
}

/// A partitioning of `S^3`: finite atoms plus the exterior atom.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Partitioning {
    pub index: usize,
    pub kind: PartitionKind,
    /// Addresses of the finite atoms, sorted.
    pub cells: Vec<Address>,
    /// Boundary class of each finite atom, when computed.
    pub classes: Option<Vec<BoundaryClass>>,
}

impl Partitioning {
    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self.cells.iter().cloned().map(Atom::Cell).collect();
        v.push(Atom::Exterior);
        v
    }

    pub fn len(&self) -> usize {
        self.cells.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn levels(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.cells.iter().map(|a| a.depth()).collect();
        l.sort();
        l.dedup();
        l
    }

    /// `(interior, one disk, two disks)` counts.
    pub fn census(&self) -> Option<(usize, usize, usize)> {
        let classes = self.classes.as_ref()?;
        let count = |b| classes.iter().filter(|&&c| c == b).count();
        Some((
            count(BoundaryClass::Interior),
            count(BoundaryClass::OneDisk),
            count(BoundaryClass::TwoDisks),
        ))
    }
}

fn class_of(desc: &TopologyDescriptor) -> Option<BoundaryClass> {
    match desc.topology() {
        Topology::Ball => Some(BoundaryClass::OneDisk),
        Topology::TwoBalls => Some(BoundaryClass::TwoDisks),
        _ => None,
    }
}

/// Classifies finite atoms against `∂T` through the type of `t_∞ ∩ atom`.
pub struct BoundaryClassifier<'a> {
    tile: &'a FourteenTile,
    cache: HashMap<NeighborSubset, std::result::Result<BoundaryClass, String>>,
}

impl<'a> BoundaryClassifier<'a> {
    pub fn new(tile: &'a FourteenTile) -> Self {
        BoundaryClassifier {
            tile,
            cache: HashMap::new(),
        }
    }

    pub fn classify(&mut self, a: &Address) -> Result<BoundaryClass> {
        let ty = intersection_type(self.tile, &Subtile::Infinity, &Subtile::Cell(a.clone()))?;
        let Some(cls) = ty else {
            return Ok(BoundaryClass::Interior);
        };
        self.classify_type(cls.canonical())
            .map_err(|s| Error::ClassificationImpossible(a.to_string(), s))
    }

    fn classify_type(&mut self, r: NeighborSubset) -> std::result::Result<BoundaryClass, String> {
        if let Some(v) = self.cache.get(&r) {
            return v.clone();
        }
        let v = match self.tile.classify(r) {
            Ok(d) => class_of(&d).ok_or(d.summary),
            Err(e) => Err(e.to_string()),
        };
        self.cache.insert(r, v.clone());
        v
    }
}

/// `P_i`: all `C^i` subtiles of depth `i`, classified against `∂T` when `i >= 2`.
pub fn enumerate_partition(tile: &FourteenTile, i: usize) -> Result<Partitioning> {
    let ds = &tile.ds;
    let cells: Vec<Address> = ds.addresses(i).collect();
    let classes = if i >= 2 {
        // Walk the address tree once, carrying n_{d_k} ∘ ... ∘ n_{d_1}(S).
        let mut classifier = BoundaryClassifier::new(tile);
        let mut out = Vec::with_capacity(cells.len());
        let mut stack: Vec<(Address, NeighborSubset)> = vec![(Address::empty(), NeighborSubset::FULL)];
        let mut found: BTreeMap<Address, BoundaryClass> = BTreeMap::new();
        while let Some((a, r)) = stack.pop() {
            if a.depth() == i {
                let class = if r.is_empty() {
                    BoundaryClass::Interior
                } else {
                    classifier
                        .classify_type(sign_canonical(r).canonical())
                        .map_err(|s| Error::ClassificationImpossible(a.to_string(), s))?
                };
                found.insert(a, class);
                continue;
            }
            for e in 0..ds.c() {
                let next = if r.is_empty() { r } else { successor_set(tile, r, e) };
                stack.push((a.child(e), next));
            }
        }
        for c in &cells {
            out.push(found[c]);
        }
        Some(out)
    } else {
        None
    };
    Ok(Partitioning {
        index: i,
        kind: PartitionKind::P,
        cells,
        classes,
    })
}

/// Finite atoms of `Q'_i`.
pub fn q_prime_cells(tile: &FourteenTile, i: usize) -> Result<Vec<Address>> {
    if i == 0 {
        return Err(Error::BadSequence("Q'_i is defined for i >= 1".into()));
    }
    if i == 1 {
        return Ok(vec![Address::empty()]);
    }
    let p = enumerate_partition(tile, i)?;
    let classes = p.classes.expect("classified for i >= 2");
    let mut out = Vec::new();
    for (a, class) in p.cells.into_iter().zip(classes) {
        if class == BoundaryClass::TwoDisks {
            out.extend((0..tile.c()).map(|e| a.child(e)));
        } else {
            out.push(a);
        }
    }
    out.sort();
    Ok(out)
}

pub fn build_q(tile: &FourteenTile, i: usize) -> Result<Partitioning> {
    Ok(Partitioning {
        index: i,
        kind: PartitionKind::Q,
        cells: q_prime_cells(tile, i)?,
        classes: None,
    })
}

/// Builder for `Q'_i(n)` with memoized `Q'_k`.
pub struct QnBuilder<'a> {
    tile: &'a FourteenTile,
    schedule: Schedule,
    plain: HashMap<usize, Vec<Address>>,
}

impl<'a> QnBuilder<'a> {
    pub fn new(tile: &'a FourteenTile, schedule: Schedule) -> Self {
        QnBuilder {
            tile,
            schedule,
            plain: HashMap::new(),
        }
    }

    fn plain(&mut self, k: usize) -> Result<&Vec<Address>> {
        if !self.plain.contains_key(&k) {
            let cells = q_prime_cells(self.tile, k)?;
            self.plain.insert(k, cells);
        }
        Ok(&self.plain[&k])
    }

    pub fn cells(&mut self, i: usize) -> Result<Vec<Address>> {
        if i == 0 {
            return Err(Error::BadSequence("Q'_i(n) is defined for i >= 1".into()));
        }
        let marks = self.schedule.marks_up_to(i);
        let Some(&nj) = marks.last() else {
            return Ok(self.plain(i)?.clone());
        };
        if nj == i {
            return self.cells(i - 1);
        }
        let base = self.cells(nj)?;
        let mut out = Vec::new();
        for g in base {
            let inner = self.plain(i - g.depth())?.clone();
            out.extend(inner.iter().map(|h| g.concat(h)));
        }
        out.sort();
        Ok(out)
    }

    pub fn partitioning(&mut self, i: usize) -> Result<Partitioning> {
        Ok(Partitioning {
            index: i,
            kind: PartitionKind::Qn(self.schedule.clone()),
            cells: self.cells(i)?,
            classes: None,
        })
    }
}

pub fn build_qn(tile: &FourteenTile, schedule: &Schedule, i: usize) -> Result<Partitioning> {
    QnBuilder::new(tile, schedule.clone()).partitioning(i)
}

/// Whether the cells are prefix-free and their refinements cover `D_k`
/// exactly once at the maximal depth `k`.
pub fn is_regular(cells: &[Address], c: u32) -> bool {
    let max = cells.iter().map(|a| a.depth()).max().unwrap_or(0);
    let mut total: u128 = 0;
    for a in cells {
        total += (c as u128).pow((max - a.depth()) as u32);
    }
    if total != (c as u128).pow(max as u32) {
        return false;
    }
    let set: HashSet<&Address> = cells.iter().collect();
    cells.iter().all(|a| {
        (0..a.depth()).all(|k| !set.contains(&a.split_at(k).0))
    })
}

/// Whether each cell of `finer` lies in exactly one cell of `coarser`.
pub fn refines(finer: &[Address], coarser: &[Address]) -> bool {
    let set: HashSet<&Address> = coarser.iter().collect();
    finer.iter().all(|a| {
        (0..=a.depth())
            .filter(|&k| set.contains(&a.split_at(k).0))
            .count()
            == 1
    })
}

/// Canonical index of `alpha` among the 14 closed-form neighbors.
fn neighbor_index(ds: &DigitSystem, alpha: &LatticeVector) -> Result<usize> {
    let v = alpha.to_i64().ok_or_else(|| Error::AlphaNotNeighbor(alpha.to_string()))?;
    fourteen_neighbors(ds.params())
        .iter()
        .position(|&n| n == v)
        .ok_or_else(|| Error::AlphaNotNeighbor(alpha.to_string()))
}

/// Closed form for `z + α ∈ D_3` and `z ≺ z + α`, valid for `A = 1`.
pub fn later_neighbor_closed_form(ds: &DigitSystem, z: &Address, alpha: &LatticeVector) -> Result<bool> {
    let p = ds.params();
    if p.a() != 1 {
        return Err(Error::UnsupportedParams(format!("{p}: closed form needs A = 1")));
    }
    if z.depth() != 3 {
        return Err(Error::DepthMismatch(z.depth(), 3));
    }
    let i = neighbor_index(ds, alpha)?;
    let (c, b) = (p.c(), p.b());
    let [e2, e1, e0] = [z.letters()[0], z.letters()[1], z.letters()[2]];
    Ok(match i {
        0 => e0 < c - 1,
        1 => e0 < c - 1 && e1 < c - 1,
        2 => e0 < c - b && e1 < c - 1 && e2 < c - 1,
        3 => e1 < c - 1,
        4 => e0 < c - b + 1 && e1 < c - 1 && e2 < c - 1,
        5 => e0 < c - b + 1 && e2 < c - 1,
        6 => e0 < c - b && e2 < c - 1,
        _ => false,
    })
}

/// Direct evaluation: `z + α ∈ D_k` and `z ≺ z + α`.
pub fn later_neighbor(ds: &DigitSystem, z: &Address, alpha: [i64; 3]) -> bool {
    let v = &ds.address_to_vector(z) + &LatticeVector::from(alpha);
    match ds.vector_to_address_exact(&v, z.depth()) {
        Some(w) => addr_cmp(z, &w).map(|o| o.is_lt()).unwrap_or(false),
        None => false,
    }
}

/// `S' = {α : z + α ∈ D_k, z ≺ z + α}` by direct evaluation.
pub fn later_set(tile: &FourteenTile, z: &Address) -> NeighborSubset {
    NeighborSubset::from_indices((0..14).filter(|&i| later_neighbor(&tile.ds, z, tile.vector(i))))
}

/// The twelve cases for depth-3 addresses: `(case number, S', topology of U(S \ S'))`.
pub fn depth3_case(c: u32, b: u32, z: &Address) -> (u8, NeighborSubset, Topology) {
    let [e2, e1, e0] = [z.letters()[0], z.letters()[1], z.letters()[2]];
    let top = c - 1;
    let set = |names: &[&str]| {
        NeighborSubset::from_indices(names.iter().map(|n| NeighborSubset::index_of_name(n).unwrap()))
    };
    if e2 < top {
        if e1 < top {
            if e0 + b < c {
                (1, NeighborSubset::S1, Topology::Ball)
            } else if e0 + b == c {
                (2, set(&["P", "Q", "Q-P", "N-P", "N-Q"]), Topology::Ball)
            } else if e0 < top {
                (3, set(&["P", "Q", "Q-P"]), Topology::Ball)
            } else {
                (4, set(&["Q-P"]), Topology::Ball)
            }
        } else if e0 + b < c {
            (5, set(&["P", "N-Q", "N-Q+P"]), Topology::Ball)
        } else if e0 + b == c {
            (6, set(&["P", "N-Q"]), Topology::Ribbon)
        } else if e0 < top {
            (7, set(&["P"]), Topology::Ball)
        } else {
            (8, NeighborSubset::EMPTY, Topology::Sphere)
        }
    } else if e1 < top {
        if e0 < top {
            (9, set(&["P", "Q", "Q-P"]), Topology::Ball)
        } else {
            (10, set(&["Q-P"]), Topology::Ball)
        }
    } else if e0 < top {
        (11, set(&["P"]), Topology::Ball)
    } else {
        (12, NeighborSubset::EMPTY, Topology::Sphere)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixCheck {
    pub z: Address,
    pub later: NeighborSubset,
    pub remaining: NeighborSubset,
    pub topology: TopologyDescriptor,
    pub connected: bool,
    /// Case number and whether set and topology match it (depth 3, `A = 1`).
    pub case: Option<(u8, bool)>,
    /// Closed form agrees with direct evaluation (depth 3, `A = 1`).
    pub closed_form_agrees: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixReport {
    pub depth: usize,
    /// `A = 1`, where the connectivity statement is proven.
    pub proven_territory: bool,
    pub checks: Vec<PrefixCheck>,
}

impl PrefixReport {
    pub fn all_connected(&self) -> bool {
        self.checks.iter().all(|c| c.connected)
    }

    pub fn cases_match(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.case.is_none_or(|(_, ok)| ok) && c.closed_form_agrees != Some(false))
    }
}

fn is_connected(d: &TopologyDescriptor) -> bool {
    d.components.len() == 1
}

/// Connectivity of `U_{z,j} = (T+z) ∩ (∂(M^j T) ∪ ⋃_{y ≺ z} (T+y))` for all `z ∈ D_j`.
pub fn prefix_connectivity(tile: &FourteenTile, j: usize) -> Result<PrefixReport> {
    if !(1..=3).contains(&j) {
        return Err(Error::DepthMismatch(j, 3));
    }
    let p = tile.ds.params();
    let proven = p.a() == 1;
    let mut checks = Vec::new();
    for z in tile.ds.addresses(j) {
        let later = later_set(tile, &z);
        let remaining = NeighborSubset::FULL.minus(later);
        let topology = tile.classify(remaining)?;
        let connected = is_connected(&topology);
        let (case, closed_form_agrees) = if j == 3 && proven {
            let (n, expect_set, expect_top) = depth3_case(p.c(), p.b(), &z);
            let closed = NeighborSubset::from_indices((0..14).filter(|&i| {
                later_neighbor_closed_form(&tile.ds, &z, &LatticeVector::from(tile.vector(i))).unwrap_or(false)
            }));
            (
                Some((n, expect_set == later && expect_top == topology.topology())),
                Some(closed == later),
            )
        } else {
            (None, None)
        };
        if !connected {
            return Err(Error::ConnectivityFailure(z.to_string()));
        }
        checks.push(PrefixCheck {
            z,
            later,
            remaining,
            topology,
            connected,
            case,
            closed_form_agrees,
        });
    }
    Ok(PrefixReport {
        depth: j,
        proven_territory: proven,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderStep {
    pub child: Atom,
    /// Address relative to the parent.
    pub relative: Address,
    pub remaining: NeighborSubset,
    pub topology: TopologyDescriptor,
    pub connected: bool,
    /// The neighbor cells of the child are each entirely earlier or entirely
    /// not earlier, and this agrees with `S'`.
    pub direct_agrees: bool,
    /// Some neighbor cell is split between earlier and later children.
    pub mixed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderCertificate {
    pub parent: Atom,
    pub steps: Vec<OrderStep>,
    pub certified: bool,
}

/// Orders the children of `parent` by their smallest depth-3 subtile and
/// certifies that each child meets `∂parent ∪` (earlier children) in a
/// connected set.
pub fn order_subtiles(tile: &FourteenTile, parent: &Atom, children: &[Atom]) -> Result<OrderCertificate> {
    if children.len() == 1 {
        let child = children[0].clone();
        let relative = match (parent, &child) {
            (Atom::Cell(p), Atom::Cell(c)) if p.is_prefix_of(c) => c.split_at(p.depth()).1,
            _ => Address::empty(),
        };
        return Ok(OrderCertificate {
            parent: parent.clone(),
            steps: vec![OrderStep {
                child,
                relative,
                remaining: NeighborSubset::FULL,
                topology: tile.classify(NeighborSubset::FULL)?,
                connected: true,
                direct_agrees: true,
                mixed: false,
            }],
            certified: true,
        });
    }
    let Atom::Cell(pa) = parent else {
        return Err(Error::CertificateFailure("the exterior atom has a single child".into()));
    };
    let mut rel: Vec<(Address, Atom)> = Vec::new();
    for ch in children {
        match ch {
            Atom::Cell(c) if pa.is_prefix_of(c) && (1..=3).contains(&(c.depth() - pa.depth())) => {
                rel.push((c.split_at(pa.depth()).1, ch.clone()));
            }
            _ => {
                return Err(Error::CertificateFailure(format!(
                    "{ch} is not a child of {parent} at relative depth 1..3"
                )))
            }
        }
    }
    rel.sort_by_key(|r| r.0.min_extension(3));
    let rels: Vec<Address> = rel.iter().map(|r| r.0.clone()).collect();
    if !is_regular(&rels, tile.c()) {
        return Err(Error::CertificateFailure(format!("children do not tile {parent}")));
    }
    let owner = |w: &Address| -> usize {
        rels.iter()
            .position(|r| r.is_prefix_of(w))
            .expect("children cover the parent")
    };

    let mut steps = Vec::new();
    for (j, (y, child)) in rel.iter().enumerate() {
        let later = later_set(tile, y);
        let remaining = NeighborSubset::FULL.minus(later);
        let mut direct = NeighborSubset::EMPTY;
        let mut mixed = false;
        for i in 0..14 {
            let z = &tile.ds.address_to_vector(y) + &LatticeVector::from(tile.vector(i));
            match tile.ds.vector_to_address_exact(&z, y.depth()) {
                None => direct = direct.union(NeighborSubset::singleton(i)),
                Some(za) => {
                    let owners: Vec<usize> = tile
                        .ds
                        .addresses(3 - y.depth())
                        .map(|t| owner(&za.concat(&t)))
                        .collect();
                    let earlier = owners.iter().filter(|&&o| o < j).count();
                    if earlier == owners.len() {
                        direct = direct.union(NeighborSubset::singleton(i));
                    } else if earlier > 0 {
                        mixed = true;
                    }
                }
            }
        }
        let direct_agrees = !mixed && direct == remaining;
        if remaining.is_empty() {
            return Err(Error::CertificateFailure(format!("prefix ending at {y}: empty intersection")));
        }
        let topology = tile.classify(remaining)?;
        let connected = is_connected(&topology);
        if !connected || !direct_agrees {
            return Err(Error::CertificateFailure(format!(
                "prefix ending at {y} (relative depth {}): {}{}",
                y.depth(),
                topology.summary,
                if direct_agrees { "" } else { ", direct check disagrees" }
            )));
        }
        steps.push(OrderStep {
            child: child.clone(),
            relative: y.clone(),
            remaining,
            topology,
            connected,
            direct_agrees,
            mixed,
        });
    }
    Ok(OrderCertificate {
        parent: parent.clone(),
        steps,
        certified: true,
    })
}

/// Certificates for every atom of `Q_i(n)` with its children in `Q_{i+1}(n)`.
pub fn certify_orders(builder: &mut QnBuilder, i: usize) -> Result<Vec<OrderCertificate>> {
    let coarse = builder.cells(i)?;
    let fine = builder.cells(i + 1)?;
    let tile = builder.tile;
    let mut by_parent: BTreeMap<Address, Vec<Atom>> = coarse.iter().map(|c| (c.clone(), Vec::new())).collect();
    for f in fine {
        let parent = coarse
            .iter()
            .find(|c| c.is_prefix_of(&f))
            .ok_or_else(|| Error::CertificateFailure(format!("{f} has no parent")))?;
        by_parent.get_mut(parent).unwrap().push(Atom::Cell(f));
    }
    let mut out = Vec::new();
    for (p, kids) in by_parent {
        out.push(order_subtiles(tile, &Atom::Cell(p), &kids)?);
    }
    out.push(order_subtiles(tile, &Atom::Exterior, &[Atom::Exterior])?);
    Ok(out)
}

pub fn is_disk(d: &TopologyDescriptor) -> bool {
    d.components.len() == 1 && d.components[0].class == SurfaceClass::Disk
}
