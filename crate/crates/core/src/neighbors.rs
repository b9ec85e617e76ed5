//! Neighbor set, neighbor graph and Hata graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{DigitSystem, LatticeVector, TileParams};

/// Names of the seven neighbors `S_1`, in canonical order.
pub const S1_NAMES: [&str; 7] = ["P", "Q", "N", "Q-P", "N-P", "N-Q", "N-Q+P"];

/// Closed-form criterion for `#S = 14`.
pub fn has_14_neighbors(p: TileParams) -> bool {
    let (a, b, c) = (p.a() as i64, p.b() as i64, p.c() as i64);
    if !(1 <= a && a < b && b < c) {
        return false;
    }
    if b >= 2 * a - 1 {
        c >= 2 * (b - a) + 2
    } else {
        c >= a + b - 2
    }
}

/// `P = (1,0,0)`, `Q = (A,1,0)`, `N = (B,A,1)`.
pub fn pqn(p: TileParams) -> [[i64; 3]; 3] {
    let (a, b) = (p.a() as i64, p.b() as i64);
    [[1, 0, 0], [a, 1, 0], [b, a, 1]]
}

/// The 14 vectors `S_1 ∪ -S_1` in canonical order: the seven elements of
/// [`S1_NAMES`] followed by their negatives.
pub fn fourteen_neighbors(p: TileParams) -> [[i64; 3]; 14] {
    let [pp, q, n] = pqn(p);
    let sub = |u: [i64; 3], v: [i64; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let add = |u: [i64; 3], v: [i64; 3]| [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
    let s1 = [
        pp,
        q,
        n,
        sub(q, pp),
        sub(n, pp),
        sub(n, q),
        add(sub(n, q), pp),
    ];
    let mut out = [[0; 3]; 14];
    for i in 0..7 {
        out[i] = s1[i];
        out[i + 7] = [-s1[i][0], -s1[i][1], -s1[i][2]];
    }
    out
}

/// The set `S = {α ≠ 0 : T ∩ (T + α) ≠ ∅}`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborSet {
    params: TileParams,
    members: Vec<[i64; 3]>,
    index: HashMap<[i64; 3], usize>,
}

impl NeighborSet {
    pub fn from_members(params: TileParams, mut members: Vec<[i64; 3]>) -> Self {
        members.sort();
        members.dedup();
        let index = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        NeighborSet {
            params,
            members,
            index,
        }
    }

    pub fn params(&self) -> TileParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn raw(&self) -> &[[i64; 3]] {
        &self.members
    }

    pub fn members(&self) -> Vec<LatticeVector> {
        self.members.iter().map(|&v| v.into()).collect()
    }

    pub fn get(&self, i: usize) -> [i64; 3] {
        self.members[i]
    }

    pub fn index_of(&self, v: [i64; 3]) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn index_of_vector(&self, v: &LatticeVector) -> Option<usize> {
        self.index_of(v.to_i64()?)
    }

    pub fn contains(&self, v: [i64; 3]) -> bool {
        self.index.contains_key(&v)
    }

    /// Whether the set equals the 14-element closed form.
    pub fn is_fourteen(&self) -> bool {
        self.len() == 14 && fourteen_neighbors(self.params).iter().all(|&v| self.contains(v))
    }
}

/// Per-coordinate bounds `W_j` with `|x_j| <= W_j` on `T - T`.
///
/// With `u_i = M^{-i} e_1`, `T - T = {Σ k_i u_i : |k_i| <= C-1}`, so
/// `W_j = (C-1) Σ_i |u_ij|`. The series is summed exactly for `n` terms and
/// the tail bounded by `s / (1 - q)` where `q = ||M^{-K}||_∞`.
pub fn difference_bounds(ds: &DigitSystem) -> [BigRational; 3] {
    let c = BigInt::from(ds.c());
    let inv = ds.scaled_inverse();
    let mul = |m: &[[BigInt; 3]; 3], v: &[BigInt; 3]| -> [BigInt; 3] {
        std::array::from_fn(|r| &m[r][0] * &v[0] + &m[r][1] * &v[1] + &m[r][2] * &v[2])
    };
    let inv_big: [[BigInt; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|s| BigInt::from(inv[r][s])));

    // Smallest K with ||M^{-K}||_∞ <= 1/2.
    let mut power = inv_big.clone();
    let mut denom = c.clone();
    let mut k = 1usize;
    let q = loop {
        let rowsum = power
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap();
        let q = BigRational::new(rowsum, denom.clone());
        if q <= BigRational::new(1.into(), 2.into()) {
            break q;
        }
        assert!(k < 4096, "matrix is not expanding");
        power = std::array::from_fn(|r| {
            std::array::from_fn(|s| (0..3).map(|t| &power[r][t] * &inv_big[t][s]).sum())
        });
        denom *= &c;
        k += 1;
    };

    let n = 4 * k + 16;
    let mut w: [BigInt; 3] = [BigInt::one(), BigInt::zero(), BigInt::zero()];
    let mut den = BigInt::one();
    let mut sums: [BigRational; 3] = std::array::from_fn(|_| BigRational::zero());
    let mut tail = BigRational::zero();
    for i in 1..=(n + k) {
        w = mul(&inv_big, &w);
        den *= &c;
        if i <= n {
            for j in 0..3 {
                sums[j] += BigRational::new(w[j].abs(), den.clone());
            }
        } else {
            let norm = w.iter().map(|x| x.abs()).max().unwrap();
            tail += BigRational::new(norm, den.clone());
        }
    }
    let tail = tail / (BigRational::one() - q);
    let cm1 = BigRational::from_integer(BigInt::from(ds.c() - 1));
    std::array::from_fn(|j| (&sums[j] + &tail) * &cm1)
}

/// Exact neighbor set by pruning the candidate graph on the box bounded by
/// [`difference_bounds`].
pub fn compute_neighbor_set(ds: &DigitSystem) -> NeighborSet {
    let bounds = difference_bounds(ds);
    let w: [i64; 3] = std::array::from_fn(|j| bounds[j].floor().to_integer().to_i64().expect("small bound"));
    let dims: [i64; 3] = std::array::from_fn(|j| 2 * w[j] + 1);
    let total = (dims[0] * dims[1] * dims[2]) as usize;
    let idx = |v: [i64; 3]| -> Option<usize> {
        for j in 0..3 {
            if v[j].abs() > w[j] {
                return None;
            }
        }
        Some((((v[0] + w[0]) * dims[1] + (v[1] + w[1])) * dims[2] + (v[2] + w[2])) as usize)
    };
    let vec_of = |i: usize| -> [i64; 3] {
        let i = i as i64;
        let z = i % dims[2];
        let y = (i / dims[2]) % dims[1];
        let x = i / (dims[1] * dims[2]);
        [x - w[0], y - w[1], z - w[2]]
    };
    let p = ds.params();
    let (a, b, c) = (p.a() as i64, p.b() as i64, p.c() as i64);
    let apply = |v: [i64; 3]| [-c * v[2], v[0] - b * v[2], v[1] - a * v[2]];
    let origin = idx([0, 0, 0]).unwrap();

    let mut alive = vec![true; total];
    alive[origin] = false;
    let mut outdeg = vec![0u32; total];
    for (i, deg) in outdeg.iter_mut().enumerate() {
        if i == origin {
            continue;
        }
        let m = apply(vec_of(i));
        for k in -(c - 1)..c {
            if let Some(t) = idx([m[0] + k, m[1], m[2]]) {
                if t != origin {
                    *deg += 1;
                }
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..total).filter(|&i| alive[i] && outdeg[i] == 0).collect();
    for &i in &queue {
        alive[i] = false;
    }
    while let Some(t) = queue.pop_front() {
        let v = vec_of(t);
        // Predecessors α with M α + (k,0,0) = v.
        for k in -(c - 1)..c {
            let x = v[0] - k;
            if x.rem_euclid(c) != 0 {
                continue;
            }
            let a3 = -x / c;
            let pred = [v[1] + b * a3, v[2] + a * a3, a3];
            if let Some(s) = idx(pred) {
                if alive[s] {
                    outdeg[s] -= 1;
                    if outdeg[s] == 0 {
                        alive[s] = false;
                        queue.push_back(s);
                    }
                }
            }
        }
    }
    let members = (0..total).filter(|&i| alive[i]).map(vec_of).collect();
    NeighborSet::from_members(p, members)
}

/// A labeled edge `α --d--> α'` with `M α + d' - d = α'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NeighborEdge {
    pub source: usize,
    pub target: usize,
    pub d: u32,
    pub d_prime: u32,
}

/// The neighbor graph `G(S)`; node indices refer to the [`NeighborSet`].
#[derive(Clone, Debug)]
pub struct NeighborGraph {
    pub set: NeighborSet,
    pub edges: Vec<NeighborEdge>,
}

pub fn build_neighbor_graph(ds: &DigitSystem, s: &NeighborSet) -> NeighborGraph {
    let p = ds.params();
    let (a, b, c) = (p.a() as i64, p.b() as i64, p.c() as i64);
    let mut edges = Vec::new();
    for (i, &v) in s.raw().iter().enumerate() {
        let m = [-c * v[2], v[0] - b * v[2], v[1] - a * v[2]];
        for d in 0..c {
            for dp in 0..c {
                if let Some(j) = s.index_of([m[0] + dp - d, m[1], m[2]]) {
                    edges.push(NeighborEdge {
                        source: i,
                        target: j,
                        d: d as u32,
                        d_prime: dp as u32,
                    });
                }
            }
        }
    }
    edges.sort();
    NeighborGraph {
        set: s.clone(),
        edges,
    }
}

impl NeighborGraph {
    pub fn out_edges(&self, i: usize) -> impl Iterator<Item = &NeighborEdge> {
        let lo = self.edges.partition_point(|e| e.source < i);
        let hi = self.edges.partition_point(|e| e.source <= i);
        self.edges[lo..hi].iter()
    }
}

/// The Hata graph `H(S)`: `α_1 -- α_2` iff `α_2 - α_1 ∈ S`.
#[derive(Clone, Debug)]
pub struct HataGraph {
    pub set: NeighborSet,
    pub adjacency: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl HataGraph {
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }
}

pub fn hata_graph(s: &NeighborSet) -> HataGraph {
    let n = s.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (u, v) = (s.get(i), s.get(j));
            if s.contains([v[0] - u[0], v[1] - u[1], v[2] - u[2]]) {
                adjacency[i].push(j);
                adjacency[j].push(i);
                edges.push((i, j));
            }
        }
    }
    HataGraph {
        set: s.clone(),
        adjacency,
        edges,
    }
}

/// All 3-cycles of `h` as sorted index triples, in lexicographic order.
pub fn hata_triangles(h: &HataGraph) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &(i, j) in &h.edges {
        let (ai, aj) = (&h.adjacency[i], &h.adjacency[j]);
        let (mut x, mut y) = (0, 0);
        while x < ai.len() && y < aj.len() {
            match ai[x].cmp(&aj[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    if ai[x] > j {
                        out.push([i, j, ai[x]]);
                    }
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    out.sort();
    out
}

/// 4-cliques of `h`. A set of four pairwise touching translates would give a
/// point in five tiles, so this is expected to be empty.
pub fn hata_four_cliques(h: &HataGraph) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for [i, j, k] in hata_triangles(h) {
        for &l in &h.adjacency[k] {
            if l > k && h.adjacent(i, l) && h.adjacent(j, l) {
                out.push([i, j, k, l]);
            }
        }
    }
    out
}

/// `H_α`: nodes are the pieces `M^{-1}(B_{α'} + d)` of `B_α`, edges join
/// pieces that meet.
#[derive(Clone, Debug)]
pub struct SubdivisionHataGraph {
    pub alpha: [i64; 3],
    /// `(α', d)` pairs, sorted.
    pub nodes: Vec<([i64; 3], u32)>,
    pub edges: Vec<(usize, usize)>,
}

impl SubdivisionHataGraph {
    /// Path or single node.
    pub fn is_line(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 || self.edges.len() != n - 1 {
            return false;
        }
        let mut deg = vec![0usize; n];
        let mut adj = vec![Vec::new(); n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
            adj[i].push(j);
            adj[j].push(i);
        }
        if deg.iter().any(|&d| d > 2) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Whether `T ∩ ⋂_{β ∈ set} (T + β)` is nonempty, for sets of at most three
/// nonzero vectors: the set must be a node, edge or triangle of `H(S)`.
pub fn touches_jointly(s: &NeighborSet, set: &[[i64; 3]]) -> bool {
    let set: BTreeSet<[i64; 3]> = set.iter().copied().filter(|v| *v != [0, 0, 0]).collect();
    if set.len() > 3 || !set.iter().all(|&v| s.contains(v)) {
        return false;
    }
    let v: Vec<_> = set.into_iter().collect();
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if !s.contains([v[j][0] - v[i][0], v[j][1] - v[i][1], v[j][2] - v[i][2]]) {
                return false;
            }
        }
    }
    true
}

pub fn subdivision_hata(g: &NeighborGraph, alpha: &LatticeVector) -> Result<SubdivisionHataGraph> {
    let s = &g.set;
    let i = s
        .index_of_vector(alpha)
        .ok_or_else(|| Error::AlphaNotNeighbor(alpha.to_string()))?;
    let mut nodes: Vec<([i64; 3], u32)> = g.out_edges(i).map(|e| (s.get(e.target), e.d)).collect();
    nodes.sort();
    nodes.dedup();
    let mut edges = Vec::new();
    for x in 0..nodes.len() {
        for y in (x + 1)..nodes.len() {
            let (a1, d1) = nodes[x];
            let (a2, d2) = nodes[y];
            let dd = d2 as i64 - d1 as i64;
            let set = [a1, [dd, 0, 0], [a2[0] + dd, a2[1], a2[2]]];
            if touches_jointly(s, &set) {
                edges.push((x, y));
            }
        }
    }
    Ok(SubdivisionHataGraph {
        alpha: s.get(i),
        nodes,
        edges,
    })
}
