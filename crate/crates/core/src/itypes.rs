//! Successor sets `n_d(R)`, sign classes, the intersection graph and the
//! types of intersections of subtiles.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Address, DigitSystem};
use crate::neighbors::{
    build_neighbor_graph, compute_neighbor_set, fourteen_neighbors, hata_graph, NeighborGraph,
    NeighborSet,
};
use crate::surface::{classify_subsurface, surface_complex, SphereComplex, TopologyDescriptor};

/// Names of the 14 neighbors in canonical bit order.
pub const NEIGHBOR_NAMES: [&str; 14] = [
    "P", "Q", "N", "Q-P", "N-P", "N-Q", "N-Q+P", "-P", "-Q", "-N", "P-Q", "P-N", "Q-N", "Q-N-P",
];

/// A subset of the 14 neighbors; bit `i` is the `i`-th name of [`NEIGHBOR_NAMES`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NeighborSubset(pub u16);

impl NeighborSubset {
    pub const FULL: NeighborSubset = NeighborSubset((1 << 14) - 1);
    pub const EMPTY: NeighborSubset = NeighborSubset(0);
    /// `S_1`, the first seven neighbors.
    pub const S1: NeighborSubset = NeighborSubset((1 << 7) - 1);

    pub fn singleton(i: usize) -> Self {
        NeighborSubset(1 << i)
    }

    pub fn from_indices(ix: impl IntoIterator<Item = usize>) -> Self {
        NeighborSubset(ix.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..14).filter(|&i| self.contains(i))
    }

    pub fn union(self, o: Self) -> Self {
        NeighborSubset(self.0 | o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        NeighborSubset(self.0 & !o.0)
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn index_of_name(name: &str) -> Option<usize> {
        NEIGHBOR_NAMES.iter().position(|&n| n == name)
    }
}

/// `-R`: swaps each neighbor with its negative.
impl std::ops::Neg for NeighborSubset {
    type Output = NeighborSubset;
    fn neg(self) -> Self {
        NeighborSubset((self.0 & 0x7f) << 7 | (self.0 >> 7) & 0x7f)
    }
}

impl fmt::Display for NeighborSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.indices().map(|i| NEIGHBOR_NAMES[i]).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// The class `R̄ = {R, -R}`, represented by the smaller mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignClass(NeighborSubset);

impl SignClass {
    pub fn canonical(&self) -> NeighborSubset {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{}", self.0)
    }
}

pub fn sign_canonical(r: NeighborSubset) -> SignClass {
    SignClass(r.min(-r))
}

/// A 14-neighbor tile with its neighbor graph, successor table and boundary
/// complex.
#[derive(Clone, Debug)]
pub struct FourteenTile {
    pub ds: DigitSystem,
    pub set: NeighborSet,
    pub graph: NeighborGraph,
    pub complex: SphereComplex,
    /// Canonical bit index to neighbor-set index.
    canon_to_set: [usize; 14],
    set_to_canon: [usize; 14],
    /// `succ[d][i]`: targets of edges out of neighbor `i` with label `d`.
    succ: Vec<[u16; 14]>,
}

impl FourteenTile {
    pub fn new(ds: &DigitSystem) -> Result<Self> {
        let set = compute_neighbor_set(ds);
        if !set.is_fourteen() {
            return Err(Error::NotFourteenNeighbors(format!(
                "{} has {} neighbors",
                ds.params(),
                set.len()
            )));
        }
        let graph = build_neighbor_graph(ds, &set);
        let complex = surface_complex(&hata_graph(&set))?;
        let named = fourteen_neighbors(ds.params());
        let canon_to_set: [usize; 14] = std::array::from_fn(|i| set.index_of(named[i]).unwrap());
        let mut set_to_canon = [0; 14];
        for (i, &s) in canon_to_set.iter().enumerate() {
            set_to_canon[s] = i;
        }
        let mut succ = vec![[0u16; 14]; ds.c() as usize];
        for e in &graph.edges {
            succ[e.d as usize][set_to_canon[e.source]] |= 1 << set_to_canon[e.target];
        }
        Ok(FourteenTile {
            ds: ds.clone(),
            set,
            graph,
            complex,
            canon_to_set,
            set_to_canon,
            succ,
        })
    }

    pub fn c(&self) -> u32 {
        self.ds.c()
    }

    pub fn vector(&self, i: usize) -> [i64; 3] {
        self.set.get(self.canon_to_set[i])
    }

    pub fn canonical_index(&self, v: [i64; 3]) -> Option<usize> {
        self.set.index_of(v).map(|s| self.set_to_canon[s])
    }

    pub fn set_indices(&self, r: NeighborSubset) -> Vec<usize> {
        r.indices().map(|i| self.canon_to_set[i]).collect()
    }

    pub fn classify(&self, r: NeighborSubset) -> Result<TopologyDescriptor> {
        classify_subsurface(&self.complex, &self.set_indices(r))
    }
}

/// `n_d(R)`: targets of `d`-labeled edges leaving `R`.
pub fn successor_set(t: &FourteenTile, r: NeighborSubset, d: u32) -> NeighborSubset {
    let row = &t.succ[d as usize];
    NeighborSubset(r.indices().fold(0, |m, i| m | row[i]))
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionNode {
    pub class: SignClass,
    /// Iteration `k` in which the class first enters `N_k`.
    pub first_iteration: usize,
    pub topology: TopologyDescriptor,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionGraph {
    pub nodes: Vec<IntersectionNode>,
    /// `(from, d, to)` with `to` the class of `n_d(from)`.
    pub edges: Vec<(usize, u32, usize)>,
    /// `(node, d)` with `n_d(node) = ∅`; the empty class is not a node.
    pub empty_successors: Vec<(usize, u32)>,
    /// `#N_k` for `k = 0, 1, ...` up to and including the first repeat.
    pub accumulated: Vec<usize>,
    pub start: usize,
    #[serde(skip)]
    index: BTreeMap<SignClass, usize>,
}

impl IntersectionGraph {
    pub fn node_of(&self, c: SignClass) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The iteration after which nothing new appears.
    pub fn stable_from(&self) -> usize {
        self.accumulated.len() - 2
    }

    pub fn successors(&self, n: usize) -> impl Iterator<Item = &(usize, u32, usize)> {
        self.edges.iter().filter(move |e| e.0 == n)
    }
}

pub fn build_intersection_graph(t: &FourteenTile) -> Result<IntersectionGraph> {
    let start = sign_canonical(NeighborSubset::FULL);
    let mut order: Vec<(SignClass, usize)> = vec![(start, 0)];
    let mut index: BTreeMap<SignClass, usize> = BTreeMap::new();
    index.insert(start, 0);
    let mut accumulated = vec![1];
    let mut frontier = vec![start];
    let mut k = 0;
    while !frontier.is_empty() {
        k += 1;
        let mut fresh = Vec::new();
        for cls in &frontier {
            for d in 0..t.c() {
                let next = successor_set(t, cls.canonical(), d);
                if next.is_empty() {
                    continue;
                }
                let nc = sign_canonical(next);
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry(nc) {
                    e.insert(order.len());
                    order.push((nc, k));
                    fresh.push(nc);
                }
            }
        }
        accumulated.push(order.len());
        frontier = fresh;
    }

    let mut edges = Vec::new();
    let mut empty_successors = Vec::new();
    for (n, (cls, _)) in order.iter().enumerate() {
        for d in 0..t.c() {
            let next = successor_set(t, cls.canonical(), d);
            if next.is_empty() {
                empty_successors.push((n, d));
            } else {
                edges.push((n, d, index[&sign_canonical(next)]));
            }
        }
    }
    let nodes = order
        .into_iter()
        .map(|(class, first_iteration)| {
            Ok(IntersectionNode {
                class,
                first_iteration,
                topology: t.classify(class.canonical())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntersectionGraph {
        nodes,
        edges,
        empty_successors,
        accumulated,
        start: 0,
        index,
    })
}

/// A subtile `t_∞` (closure of the complement of `T`) or a cell
/// `M^{-k}(T + (address)_M)` of depth `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subtile {
    Infinity,
    Cell(Address),
}

impl Subtile {
    /// Depth of a cell; `None` stands for the level of `t_∞`, below all depths.
    pub fn level(&self) -> Option<usize> {
        match self {
            Subtile::Infinity => None,
            Subtile::Cell(a) => Some(a.depth()),
        }
    }
}

/// Type of `t1 ∩ t2`; `Ok(None)` when the intersection is empty.
pub fn intersection_type(t: &FourteenTile, t1: &Subtile, t2: &Subtile) -> Result<Option<SignClass>> {
    if t1.level() > t2.level() {
        return Err(Error::LevelOrder);
    }
    let (start, tail) = match (t1, t2) {
        (Subtile::Infinity, Subtile::Infinity) => return Err(Error::NotDisjoint),
        (Subtile::Cell(_), Subtile::Infinity) => return Err(Error::LevelOrder),
        (Subtile::Infinity, Subtile::Cell(a)) => (NeighborSubset::FULL, a.clone()),
        (Subtile::Cell(a1), Subtile::Cell(a2)) => {
            if a1.is_prefix_of(a2) {
                return Err(Error::NotDisjoint);
            }
            let (head, tail) = a2.split_at(a1.depth());
            let alpha = &t.ds.address_to_vector(a1) - &t.ds.address_to_vector(&head);
            let Some(i) = alpha.to_i64().and_then(|v| t.canonical_index(v)) else {
                return Ok(None);
            };
            (NeighborSubset::singleton(i), tail)
        }
    };
    let mut r = start;
    for &d in tail.letters() {
        r = successor_set(t, r, d);
        if r.is_empty() {
            return Ok(None);
        }
    }
    Ok(Some(sign_canonical(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tile(a: i64, b: i64, c: i64) -> FourteenTile {
        FourteenTile::new(&DigitSystem::new(a, b, c).unwrap()).unwrap()
    }

    fn named(names: &[&str]) -> NeighborSubset {
        NeighborSubset::from_indices(names.iter().map(|n| NeighborSubset::index_of_name(n).unwrap()))
    }

    #[test]
    fn names_match_vectors() {
        let t = tile(1, 2, 4);
        assert_eq!(t.vector(0), [1, 0, 0]);
        assert_eq!(t.vector(10), [0, -1, 0]);
        assert_eq!(t.vector(13), [-2, 0, -1]);
        for i in 0..7 {
            let v = t.vector(i);
            assert_eq!(t.vector(i + 7), [-v[0], -v[1], -v[2]]);
        }
    }

    #[test]
    fn successor_examples() {
        let t = tile(1, 2, 4);
        let s = NeighborSubset::FULL;
        assert_eq!(successor_set(&t, s, 0), s.minus(named(&["P"])));
        assert_eq!(successor_set(&t, s, 1), s.minus(named(&["P", "-P"])));
        for d in 0..4 {
            assert!(successor_set(&t, NeighborSubset::EMPTY, d).is_empty());
        }
    }

    #[test]
    fn sign_classes() {
        assert_eq!(sign_canonical(named(&["P"])), sign_canonical(named(&["-P"])));
        let s = NeighborSubset::FULL;
        assert_eq!(
            sign_canonical(s.minus(named(&["P"]))),
            sign_canonical(s.minus(named(&["-P"])))
        );
        assert!(sign_canonical(NeighborSubset::EMPTY).is_empty());
        assert_eq!(-named(&["P", "Q-N"]), named(&["-P", "N-Q"]));
    }

    #[test]
    fn symmetry_law_exhaustive() {
        for t in [tile(1, 2, 4), tile(1, 3, 6)] {
            let c = t.c();
            for m in 0..(1u16 << 14) {
                let r = NeighborSubset(m);
                for d in 0..c {
                    assert_eq!(successor_set(&t, r, d), -successor_set(&t, -r, c - 1 - d));
                }
            }
        }
    }

    #[test]
    fn graph_sizes() {
        assert_eq!(build_intersection_graph(&tile(1, 2, 4)).unwrap().len(), 55);
        assert_eq!(build_intersection_graph(&tile(1, 3, 6)).unwrap().len(), 57);
    }

    #[test]
    fn type_examples() {
        let t = tile(1, 2, 4);
        let cell = |w: &[u32]| Subtile::Cell(Address::new(w.to_vec()));
        assert_eq!(
            intersection_type(&t, &Subtile::Infinity, &cell(&[])).unwrap(),
            Some(sign_canonical(NeighborSubset::FULL))
        );
        assert_eq!(
            intersection_type(&t, &cell(&[0]), &cell(&[1])).unwrap(),
            Some(sign_canonical(named(&["P"])))
        );
        assert_eq!(
            intersection_type(&t, &cell(&[1]), &cell(&[0, 0])).unwrap(),
            Some(sign_canonical(named(&["Q", "Q-P"])))
        );
        assert!(matches!(
            intersection_type(&t, &cell(&[1]), &cell(&[1, 3])),
            Err(Error::NotDisjoint)
        ));
        assert!(matches!(
            intersection_type(&t, &cell(&[1, 2]), &cell(&[0])),
            Err(Error::LevelOrder)
        ));
        assert!(matches!(
            intersection_type(&t, &Subtile::Infinity, &Subtile::Infinity),
            Err(Error::NotDisjoint)
        ));
    }

    #[test]
    fn requires_fourteen_neighbors() {
        let ds = DigitSystem::new(1, 2, 3).unwrap();
        assert!(matches!(FourteenTile::new(&ds), Err(Error::NotFourteenNeighbors(_))));
    }
}
