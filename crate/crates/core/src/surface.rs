//! The abstract CW structure of the tile boundary and classification of
//! boundary patches `U(R)`.
//!
//! Faces are the 14 neighbors, edges the 36 Hata edges and vertices the 24
//! Hata triangles. A patch `U(R)` is the union of the closed faces in `R`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighbors::{hata_triangles, HataGraph, NeighborSet};

/// The boundary sphere of a 14-neighbor tile as an abstract 2-complex.
#[derive(Clone, Debug)]
pub struct SphereComplex {
    pub set: NeighborSet,
    /// Hata edges as sorted face pairs.
    pub edges: Vec<(usize, usize)>,
    /// Hata triangles as sorted face triples.
    pub vertices: Vec<[usize; 3]>,
    /// For each face, the neighboring faces in cyclic order around it.
    pub face_cycles: Vec<Vec<usize>>,
    edge_index: BTreeMap<(usize, usize), usize>,
    adjacency: Vec<Vec<usize>>,
}

impl SphereComplex {
    pub fn face_count(&self) -> usize {
        self.set.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.face_count() as i64
    }

    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edge_id(i, j).is_some()
    }

    pub fn neighbors_of(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Index of the face labeled `-α` for the face labeled `α`.
    pub fn opposite(&self, i: usize) -> usize {
        let v = self.set.get(i);
        self.set
            .index_of([-v[0], -v[1], -v[2]])
            .expect("neighbor set is symmetric")
    }
}

pub fn build_surface_complex(h: &HataGraph, triangles: &[[usize; 3]]) -> Result<SphereComplex> {
    let n = h.set.len();
    if n != 14 {
        return Err(Error::NotASphere(format!("{n} faces instead of 14")));
    }
    let edges = h.edges.clone();
    let edge_index: BTreeMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut per_edge = vec![0usize; edges.len()];
    for t in triangles {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let k = edge_index
                .get(&(a, b))
                .ok_or_else(|| Error::NotASphere(format!("triangle side {a}-{b} is not an edge")))?;
            per_edge[*k] += 1;
        }
    }
    if let Some(k) = per_edge.iter().position(|&c| c != 2) {
        return Err(Error::NotASphere(format!(
            "edge {:?} lies in {} triangles",
            edges[k], per_edge[k]
        )));
    }
    let chi = triangles.len() as i64 - edges.len() as i64 + n as i64;
    if chi != 2 {
        return Err(Error::NotASphere(format!("Euler characteristic {chi}")));
    }

    let mut face_cycles = Vec::with_capacity(n);
    for f in 0..n {
        // Link of f: neighbors g, h joined when {f, g, h} is a triangle.
        let mut link: BTreeMap<usize, Vec<usize>> =
            h.adjacency[f].iter().map(|&g| (g, Vec::new())).collect();
        for t in triangles.iter().filter(|t| t.contains(&f)) {
            let others: Vec<usize> = t.iter().copied().filter(|&x| x != f).collect();
            link.get_mut(&others[0]).unwrap().push(others[1]);
            link.get_mut(&others[1]).unwrap().push(others[0]);
        }
        if link.values().any(|v| v.len() != 2) {
            return Err(Error::NotASphere(format!("link of face {f} is not a cycle")));
        }
        let start = *link.keys().next().ok_or_else(|| Error::NotASphere(format!("face {f} is isolated")))?;
        let mut cycle = vec![start];
        let mut prev = start;
        let mut cur = link[&start][0];
        while cur != start {
            cycle.push(cur);
            let next = if link[&cur][0] == prev { link[&cur][1] } else { link[&cur][0] };
            prev = cur;
            cur = next;
        }
        if cycle.len() != link.len() {
            return Err(Error::NotASphere(format!("link of face {f} is disconnected")));
        }
        face_cycles.push(cycle);
    }

    Ok(SphereComplex {
        set: h.set.clone(),
        edges,
        vertices: triangles.to_vec(),
        face_cycles,
        edge_index,
        adjacency: h.adjacency.clone(),
    })
}

/// Convenience: complex of a Hata graph with its own triangles.
pub fn surface_complex(h: &HataGraph) -> Result<SphereComplex> {
    build_surface_complex(h, &hata_triangles(h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceClass {
    Disk,
    Annulus,
    Sphere,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentTopology {
    pub euler: i64,
    pub boundary_circles: usize,
    pub class: SurfaceClass,
}

/// Coarse topology labels as they appear in the intersection tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Topology {
    Ball,
    TwoBalls,
    Ribbon,
    Sphere,
    Other,
}

impl Topology {
    pub fn label(&self) -> &'static str {
        match self {
            Topology::Ball => "2-ball",
            Topology::TwoBalls => "2 disjoint 2-balls",
            Topology::Ribbon => "ribbon (S^1 x [0,1])",
            Topology::Sphere => "2-sphere",
            Topology::Other => "other",
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            Topology::Ball => "ball",
            Topology::TwoBalls => "two-balls",
            Topology::Ribbon => "ribbon",
            Topology::Sphere => "sphere",
            Topology::Other => "other",
        }
    }

    pub fn from_token(s: &str) -> Option<Topology> {
        Some(match s {
            "ball" => Topology::Ball,
            "two-balls" => Topology::TwoBalls,
            "ribbon" => Topology::Ribbon,
            "sphere" => Topology::Sphere,
            "other" => Topology::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDescriptor {
    pub components: Vec<ComponentTopology>,
    pub summary: String,
}

impl TopologyDescriptor {
    pub fn topology(&self) -> Topology {
        let classes: Vec<SurfaceClass> = self.components.iter().map(|c| c.class).collect();
        match classes.as_slice() {
            [SurfaceClass::Disk] => Topology::Ball,
            [SurfaceClass::Disk, SurfaceClass::Disk] => Topology::TwoBalls,
            [SurfaceClass::Annulus] => Topology::Ribbon,
            [SurfaceClass::Sphere] => Topology::Sphere,
            _ => Topology::Other,
        }
    }

    pub fn disk_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.class == SurfaceClass::Disk)
            .count()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Topology of the union of the closed faces in `r` (face indices).
pub fn classify_subsurface(c: &SphereComplex, r: &[usize]) -> Result<TopologyDescriptor> {
    let n = c.face_count();
    let mut inside = vec![false; n];
    for &f in r {
        inside[f] = true;
    }
    if !inside.iter().any(|&b| b) {
        return Err(Error::EmptyInput);
    }

    let mut faces_uf = UnionFind::new(n);
    for &(a, b) in &c.edges {
        if inside[a] && inside[b] {
            faces_uf.union(a, b);
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&f| inside[f]).map(|f| faces_uf.find(f)).collect();
    roots.sort();
    roots.dedup();
    let comp_of = |uf: &mut UnionFind, f: usize| roots.binary_search(&uf.find(f)).unwrap();

    let mut faces = vec![0i64; roots.len()];
    let mut edges = vec![0i64; roots.len()];
    let mut verts = vec![0i64; roots.len()];
    for f in (0..n).filter(|&f| inside[f]) {
        faces[comp_of(&mut faces_uf, f)] += 1;
    }
    for &(a, b) in &c.edges {
        let owner = [a, b].into_iter().find(|&x| inside[x]);
        if let Some(x) = owner {
            edges[comp_of(&mut faces_uf, x)] += 1;
        }
    }
    for t in &c.vertices {
        if let Some(&x) = t.iter().find(|&&x| inside[x]) {
            verts[comp_of(&mut faces_uf, x)] += 1;
        }
    }

    // Boundary edges join the two vertices (triangles) on them; circles are
    // components of that graph.
    let mut vertex_of: BTreeMap<[usize; 3], usize> = BTreeMap::new();
    for (k, t) in c.vertices.iter().enumerate() {
        vertex_of.insert(*t, k);
    }
    let mut circ_uf = UnionFind::new(c.vertices.len());
    let mut circle_owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut boundary_vertices = Vec::new();
    for &(a, b) in &c.edges {
        if inside[a] == inside[b] {
            continue;
        }
        let owner = if inside[a] { a } else { b };
        let ends: Vec<usize> = c
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, t)| t.contains(&a) && t.contains(&b))
            .map(|(k, _)| k)
            .collect();
        circ_uf.union(ends[0], ends[1]);
        boundary_vertices.push((ends[0], owner));
    }
    for &(v, owner) in &boundary_vertices {
        let root = circ_uf.find(v);
        circle_owner.entry(root).or_insert(owner);
    }
    let mut circles = vec![0usize; roots.len()];
    for &owner in circle_owner.values() {
        circles[comp_of(&mut faces_uf, owner)] += 1;
    }

    let mut components: Vec<ComponentTopology> = (0..roots.len())
        .map(|k| {
            let euler = verts[k] - edges[k] + faces[k];
            let class = match (euler, circles[k]) {
                (1, 1) => SurfaceClass::Disk,
                (0, 2) => SurfaceClass::Annulus,
                (2, 0) => SurfaceClass::Sphere,
                _ => SurfaceClass::Other,
            };
            ComponentTopology {
                euler,
                boundary_circles: circles[k],
                class,
            }
        })
        .collect();
    components.sort();
    let mut d = TopologyDescriptor {
        components,
        summary: String::new(),
    };
    d.summary = match d.topology() {
        Topology::Other => {
            let parts: Vec<String> = d
                .components
                .iter()
                .map(|c| format!("{:?}(chi={}, circles={})", c.class, c.euler, c.boundary_circles))
                .collect();
            parts.join(" + ")
        }
        t => t.label().to_string(),
    };
    Ok(d)
}

/// Cell counts of the CW structure on the tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwCounts {
    pub cells0: usize,
    pub cells1: usize,
    pub cells2: usize,
    pub cells3: usize,
    pub edges_attach_two_vertices: bool,
    pub face_boundaries_are_circles: bool,
}

impl CwCounts {
    pub fn alternating_sum(&self) -> i64 {
        self.cells0 as i64 - self.cells1 as i64 + self.cells2 as i64 - self.cells3 as i64
    }
}

pub fn cw_certificate(c: &SphereComplex) -> Result<CwCounts> {
    let mut attach = true;
    for &(a, b) in &c.edges {
        let ends: Vec<&[usize; 3]> = c
            .vertices
            .iter()
            .filter(|t| t.contains(&a) && t.contains(&b))
            .collect();
        attach &= ends.len() == 2 && ends[0] != ends[1];
    }
    let circles = c
        .face_cycles
        .iter()
        .enumerate()
        .all(|(f, cyc)| cyc.len() == c.neighbors_of(f).len() && cyc.len() >= 3);
    let counts = CwCounts {
        cells0: c.vertices.len(),
        cells1: c.edges.len(),
        cells2: c.face_count(),
        cells3: 1,
        edges_attach_two_vertices: attach,
        face_boundaries_are_circles: circles,
    };
    if counts.cells0 != 24 {
        return Err(Error::CertificateFailure(format!("{} 0-cells, expected 24", counts.cells0)));
    }
    if counts.cells1 != 36 {
        return Err(Error::CertificateFailure(format!("{} 1-cells, expected 36", counts.cells1)));
    }
    if counts.cells2 != 14 {
        return Err(Error::CertificateFailure(format!("{} 2-cells, expected 14", counts.cells2)));
    }
    if !attach {
        return Err(Error::CertificateFailure("a 1-cell does not attach to two 0-cells".into()));
    }
    if !circles {
        return Err(Error::CertificateFailure("a 2-cell boundary is not a circle".into()));
    }
    Ok(counts)
}

/// The truncated octahedron with vertices at the permutations of
/// `(0, ±1, ±2)`, with faces labeled by neighbors.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub vertices: Vec<[i64; 3]>,
    /// `(face index in the neighbor set, vertex ids counterclockwise seen from outside)`.
    pub faces: Vec<(usize, Vec<usize>)>,
}

type FaceList = Vec<([i64; 3], Vec<usize>)>;

fn octahedron_geometry() -> (Vec<[i64; 3]>, FaceList) {
    let mut vertices = Vec::new();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in perms {
        for s1 in [-1, 1] {
            for s2 in [-1, 1] {
                let base = [0, s1, 2 * s2];
                let mut v = [0; 3];
                for k in 0..3 {
                    v[p[k]] = base[k];
                }
                vertices.push(v);
            }
        }
    }
    vertices.sort();
    vertices.dedup();

    let dot = |a: [i64; 3], b: [i64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut normals: Vec<([i64; 3], i64)> = Vec::new();
    for k in 0..3 {
        for s in [-1, 1] {
            let mut n = [0; 3];
            n[k] = s;
            normals.push((n, 2));
        }
    }
    for sx in [-1, 1] {
        for sy in [-1, 1] {
            for sz in [-1, 1] {
                normals.push(([sx, sy, sz], 3));
            }
        }
    }
    let mut faces = Vec::new();
    for (n, level) in normals {
        let ids: Vec<usize> = (0..vertices.len())
            .filter(|&i| dot(vertices[i], n) == level)
            .collect();
        // Order the polygon by walking along edges of squared length 2.
        let mut cyc = vec![ids[0]];
        while cyc.len() < ids.len() {
            let last = *cyc.last().unwrap();
            let next = ids
                .iter()
                .copied()
                .find(|&j| {
                    !cyc.contains(&j) && {
                        let d = [
                            vertices[j][0] - vertices[last][0],
                            vertices[j][1] - vertices[last][1],
                            vertices[j][2] - vertices[last][2],
                        ];
                        dot(d, d) == 2
                    }
                })
                .expect("polygon is a cycle");
            cyc.push(next);
        }
        let (a, b, c) = (vertices[cyc[0]], vertices[cyc[1]], vertices[cyc[2]]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - b[0], c[1] - b[1], c[2] - b[2]];
        let cross = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        if dot(cross, n) < 0 {
            cyc.reverse();
        }
        faces.push((n, cyc));
    }
    (vertices, faces)
}

/// Labels the faces of the reference truncated octahedron by neighbors so that
/// face adjacency matches the Hata graph and opposite faces carry `±α`. The
/// first such labeling in a fixed search order is used.
pub fn reference_embedding(c: &SphereComplex) -> Result<Embedding> {
    let (vertices, geo_faces) = octahedron_geometry();
    let m = geo_faces.len();
    let shares_edge = |i: usize, j: usize| {
        geo_faces[i]
            .1
            .iter()
            .filter(|v| geo_faces[j].1.contains(v))
            .count()
            == 2
    };
    let geo_adj: Vec<Vec<bool>> = (0..m)
        .map(|i| (0..m).map(|j| i != j && shares_edge(i, j)).collect())
        .collect();
    let geo_opp: Vec<usize> = (0..m)
        .map(|i| {
            let n = geo_faces[i].0;
            geo_faces
                .iter()
                .position(|f| f.0 == [-n[0], -n[1], -n[2]])
                .unwrap()
        })
        .collect();

    let mut assign: Vec<Option<usize>> = vec![None; m];
    let mut used = vec![false; c.face_count()];
    fn search(
        k: usize,
        c: &SphereComplex,
        geo_adj: &[Vec<bool>],
        geo_opp: &[usize],
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let m = assign.len();
        if k == m {
            return true;
        }
        if assign[k].is_some() {
            return search(k + 1, c, geo_adj, geo_opp, assign, used);
        }
        let opp = geo_opp[k];
        for f in 0..c.face_count() {
            let g = c.opposite(f);
            if used[f] || used[g] || c.neighbors_of(f).len() != geo_adj[k].iter().filter(|&&b| b).count() {
                continue;
            }
            let fits = |slot: usize, label: usize, assign: &[Option<usize>]| {
                (0..m).all(|j| match assign[j] {
                    Some(l) => geo_adj[slot][j] == c.adjacent(label, l),
                    None => true,
                })
            };
            if !fits(k, f, assign) {
                continue;
            }
            assign[k] = Some(f);
            if fits(opp, g, assign) {
                assign[opp] = Some(g);
                used[f] = true;
                used[g] = true;
                if search(k + 1, c, geo_adj, geo_opp, assign, used) {
                    return true;
                }
                used[f] = false;
                used[g] = false;
                assign[opp] = None;
            }
            assign[k] = None;
        }
        false
    }
    if !search(0, c, &geo_adj, &geo_opp, &mut assign, &mut used) {
        return Err(Error::NotASphere("no labeling of the truncated octahedron matches the Hata graph".into()));
    }
    let faces = geo_faces
        .into_iter()
        .zip(assign)
        .map(|((_, cyc), label)| (label.unwrap(), cyc))
        .collect();
    Ok(Embedding { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DigitSystem;
    use crate::neighbors::{compute_neighbor_set, hata_graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complex(a: i64, b: i64, c: i64) -> SphereComplex {
        let ds = DigitSystem::new(a, b, c).unwrap();
        surface_complex(&hata_graph(&compute_neighbor_set(&ds))).unwrap()
    }

    fn faces(c: &SphereComplex, vs: &[[i64; 3]]) -> Vec<usize> {
        vs.iter().map(|&v| c.set.index_of(v).unwrap()).collect()
    }

    fn all_but(c: &SphereComplex, vs: &[[i64; 3]]) -> Vec<usize> {
        let out = faces(c, vs);
        (0..14).filter(|f| !out.contains(f)).collect()
    }

    #[test]
    fn counts_and_links() {
        let c = complex(1, 2, 4);
        assert_eq!((c.vertices.len(), c.edges.len(), c.face_count()), (24, 36, 14));
        assert_eq!(c.euler_characteristic(), 2);
        let p = c.set.index_of([1, 0, 0]).unwrap();
        assert_eq!(c.face_cycles[p].len(), c.neighbors_of(p).len());
        let cw = cw_certificate(&c).unwrap();
        assert_eq!((cw.cells0, cw.cells1, cw.cells2, cw.cells3), (24, 36, 14, 1));
        assert_eq!(cw.alternating_sum(), 1);
    }

    #[test]
    fn classification_examples() {
        let c = complex(1, 2, 4);
        let (p, q, n) = ([1, 0, 0], [1, 1, 0], [2, 1, 1]);
        let qp = [0, 1, 0];
        let nq = [1, 0, 1];
        let nqp = [2, 0, 1];
        let neg = |v: [i64; 3]| [-v[0], -v[1], -v[2]];
        let _ = n;
        assert_eq!(classify_subsurface(&c, &all_but(&c, &[p])).unwrap().topology(), Topology::Ball);
        assert_eq!(
            classify_subsurface(&c, &all_but(&c, &[p, neg(p)])).unwrap().topology(),
            Topology::Ribbon
        );
        let all: Vec<usize> = (0..14).collect();
        let d = classify_subsurface(&c, &all).unwrap();
        assert_eq!(d.topology(), Topology::Sphere);
        assert_eq!(d.summary, "2-sphere");
        assert_eq!(
            classify_subsurface(&c, &faces(&c, &[p, nq, nqp])).unwrap().topology(),
            Topology::Ball
        );
        let d = classify_subsurface(&c, &all_but(&c, &[p, q, qp, neg(p), neg(q), neg(qp)])).unwrap();
        assert_eq!(d.topology(), Topology::TwoBalls);
        assert_eq!(d.summary, "2 disjoint 2-balls");
        assert!(matches!(classify_subsurface(&c, &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn no_pinch_points_and_sign_symmetry() {
        let c = complex(1, 2, 4);
        for mask in 1u32..(1 << 14) {
            let r: Vec<usize> = (0..14).filter(|&f| mask >> f & 1 == 1).collect();
            for t in &c.vertices {
                let inn: Vec<usize> = t.iter().copied().filter(|f| r.contains(f)).collect();
                for x in 0..inn.len() {
                    for y in (x + 1)..inn.len() {
                        assert!(c.adjacent(inn[x], inn[y]));
                    }
                }
            }
            if mask % 7 == 0 {
                let neg: Vec<usize> = r.iter().map(|&f| c.opposite(f)).collect();
                assert_eq!(
                    classify_subsurface(&c, &r).unwrap(),
                    classify_subsurface(&c, &neg).unwrap()
                );
            }
        }
    }

    #[test]
    fn random_subsets_have_consistent_euler_counts() {
        let c = complex(1, 3, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let mask: u32 = rng.gen_range(1..(1 << 14));
            let r: Vec<usize> = (0..14).filter(|&f| mask >> f & 1 == 1).collect();
            let d = classify_subsurface(&c, &r).unwrap();
            for comp in &d.components {
                // Planar surfaces: chi = 2 - circles.
                assert_eq!(comp.euler, 2 - comp.boundary_circles as i64);
            }
        }
    }

    #[test]
    fn embedding_matches_hata_graph() {
        let c = complex(1, 2, 4);
        let e = reference_embedding(&c).unwrap();
        assert_eq!(e.vertices.len(), 24);
        assert_eq!(e.faces.len(), 14);
        let mut labels: Vec<usize> = e.faces.iter().map(|f| f.0).collect();
        labels.sort();
        assert_eq!(labels, (0..14).collect::<Vec<_>>());
        for (i, (li, vi)) in e.faces.iter().enumerate() {
            for (lj, vj) in e.faces.iter().skip(i + 1) {
                let shared = vi.iter().filter(|v| vj.contains(v)).count();
                assert_eq!(shared == 2, c.adjacent(*li, *lj));
            }
        }
        let again = reference_embedding(&c).unwrap();
        assert_eq!(again.faces, e.faces);
    }
}
