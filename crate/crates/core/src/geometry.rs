//! Exact point clouds of the tile and of its boundary pieces.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Result;
use crate::itypes::{intersection_type, FourteenTile, Subtile};
use crate::lattice::{Address, DigitSystem, LatticeVector, RationalPoint};
use crate::neighbors::NeighborGraph;

/// A set of exact points at a fixed subdivision depth, optionally tagged
/// with the neighbor whose boundary piece it samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCloud {
    pub points: Vec<RationalPoint>,
    pub depth: usize,
    pub label: Option<LatticeVector>,
}

impl PointCloud {
    pub fn new(points: impl IntoIterator<Item = RationalPoint>, depth: usize, label: Option<LatticeVector>) -> Self {
        let set: BTreeSet<RationalPoint> = points.into_iter().collect();
        PointCloud {
            points: set.into_iter().collect(),
            depth,
            label,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The point reflection `x -> center - x`.
    pub fn reflect(&self, center: &RationalPoint) -> PointCloud {
        PointCloud::new(
            self.points.iter().map(|p| center - p),
            self.depth,
            self.label.as_ref().map(|l| -l),
        )
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Solves `m x = rhs` exactly by Cramer's rule; `None` if `m` is singular.
fn solve3(m: [[i64; 3]; 3], rhs: [i64; 3]) -> Option<[BigRational; 3]> {
    let det = |m: &[[i64; 3]; 3]| -> BigInt {
        let m: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    };
    let d = det(&m);
    if d.is_zero() {
        return None;
    }
    Some(std::array::from_fn(|col| {
        let mut mc = m;
        for r in 0..3 {
            mc[r][col] = rhs[r];
        }
        BigRational::new(det(&mc), d.clone())
    }))
}

/// The center `x_C` of the point symmetry `T = x_C - T`, the solution of
/// `(M - I) x = (C - 1, 0, 0)`.
pub fn symmetry_center(ds: &DigitSystem) -> RationalPoint {
    let mut m = ds.matrix();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= 1;
    }
    // M - I is invertible: 1 is not a root of x^3 + A x^2 + B x + C.
    let [x, y, z] = solve3(m, [ds.c() as i64 - 1, 0, 0]).expect("M - I is invertible");
    RationalPoint::new(x, y, z)
}

/// Checks `(M - I) x_C = (C - 1, 0, 0)` exactly.
pub fn check_symmetry_center(ds: &DigitSystem, x: &RationalPoint) -> bool {
    let m = ds.matrix();
    let xs = x.coords();
    (0..3).all(|r| {
        let mut s = -xs[r].clone();
        for (col, &entry) in m[r].iter().enumerate() {
            s += xs[col] * rat(entry);
        }
        s == if r == 0 { rat(ds.c() as i64 - 1) } else { BigRational::zero() }
    })
}

/// `v -> M^{-k}(v + shift)` for lattice vectors `v`, with `M^{-k}` kept as
/// the integer matrix `(C M^{-1})^k` and a single division by `C^k`.
pub struct CellMap {
    mat: [[BigInt; 3]; 3],
    shift: RationalPoint,
    denom: BigInt,
}

impl CellMap {
    pub fn new(ds: &DigitSystem, k: usize, shift: &RationalPoint) -> Self {
        let inv = ds.scaled_inverse();
        let mut mat: [[BigInt; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| BigInt::from((r == c) as i64)));
        for _ in 0..k {
            mat = std::array::from_fn(|r| {
                std::array::from_fn(|c| (0..3).map(|j| &mat[r][j] * inv[j][c]).sum())
            });
        }
        CellMap {
            mat,
            shift: ds.apply_inverse_power(shift, k),
            denom: BigInt::from(ds.c()).pow(k as u32),
        }
    }

    pub fn apply(&self, v: &LatticeVector) -> RationalPoint {
        let [x, y, z] = v.coords();
        let row = |r: usize| {
            let n = &self.mat[r][0] * x + &self.mat[r][1] * y + &self.mat[r][2] * z;
            BigRational::new(n, self.denom.clone())
        };
        &RationalPoint::new(row(0), row(1), row(2)) + &self.shift
    }
}

fn origin() -> RationalPoint {
    RationalPoint::from_lattice(&LatticeVector::zero())
}

fn half(x: &RationalPoint) -> RationalPoint {
    x.scale(&BigRational::new(1.into(), 2.into()))
}

/// Zero corner `M^{-k} (a)_M` of the cell with address `a`.
pub fn cell_corner(ds: &DigitSystem, a: &Address) -> RationalPoint {
    CellMap::new(ds, a.depth(), &origin()).apply(&ds.address_to_vector(a))
}

/// Center `M^{-k}((a)_M + x_C / 2)` of the cell with address `a`; the
/// point symmetry of the tile maps cell centers to cell centers.
pub fn cell_center(ds: &DigitSystem, x_c: &RationalPoint, a: &Address) -> RationalPoint {
    CellMap::new(ds, a.depth(), &half(x_c)).apply(&ds.address_to_vector(a))
}

/// `{M^{-k} (d)_M : d ∈ D_k}`.
pub fn tile_points(ds: &DigitSystem, depth: usize) -> PointCloud {
    let map = CellMap::new(ds, depth, &origin());
    PointCloud::new(ds.addresses(depth).map(|a| map.apply(&ds.address_to_vector(&a))), depth, None)
}

/// Addresses of the depth-`k` cells carrying the subdivision of each piece
/// `B_α = T ∩ (T + α)`, indexed like the neighbor set.
pub fn boundary_addresses(g: &NeighborGraph, depth: usize) -> Vec<BTreeSet<Address>> {
    let n = g.set.len();
    (0..n)
        .map(|start| {
            // address -> nodes reached by the walks spelling it
            let mut level: BTreeMap<Address, BTreeSet<usize>> =
                BTreeMap::from([(Address::empty(), BTreeSet::from([start]))]);
            for _ in 0..depth {
                let mut next: BTreeMap<Address, BTreeSet<usize>> = BTreeMap::new();
                for (a, nodes) in &level {
                    for &v in nodes {
                        for e in g.out_edges(v) {
                            next.entry(a.child(e.d)).or_default().insert(e.target);
                        }
                    }
                }
                level = next;
            }
            level.into_keys().collect()
        })
        .collect()
}

/// Depth-`k` subdivision of every boundary piece, one labeled cloud per
/// neighbor, each cell represented by its center.
pub fn boundary_pieces(ds: &DigitSystem, g: &NeighborGraph, depth: usize) -> Vec<PointCloud> {
    let map = CellMap::new(ds, depth, &half(&symmetry_center(ds)));
    boundary_addresses(g, depth)
        .into_iter()
        .enumerate()
        .map(|(i, addrs)| {
            PointCloud::new(
                addrs.iter().map(|a| map.apply(&ds.address_to_vector(a))),
                depth,
                Some(LatticeVector::from(g.set.get(i))),
            )
        })
        .collect()
}

/// Depth-`k` cells that meet `∂T`, according to the intersection types.
pub fn boundary_census(tile: &FourteenTile, depth: usize) -> Result<BTreeSet<Address>> {
    let mut out = BTreeSet::new();
    for a in tile.ds.addresses(depth) {
        if intersection_type(tile, &Subtile::Infinity, &Subtile::Cell(a.clone()))?.is_some() {
            out.insert(a);
        }
    }
    Ok(out)
}

/// Result of comparing the boundary pieces with the type engine and with
/// the point symmetry.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GeometryReport {
    pub depth: usize,
    pub tile_points: usize,
    pub center_ok: bool,
    pub boundary_cells_gifs: usize,
    pub boundary_cells_types: usize,
    pub census_agrees: bool,
    pub symmetric: bool,
}

impl GeometryReport {
    pub fn pass(&self, c: u32) -> bool {
        self.tile_points == (c as usize).pow(self.depth as u32) && self.center_ok && self.census_agrees && self.symmetric
    }
}

pub fn geometry_report(tile: &FourteenTile, depth: usize) -> Result<GeometryReport> {
    let ds = &tile.ds;
    let x_c = symmetry_center(ds);
    let addrs = boundary_addresses(&tile.graph, depth);
    let union: BTreeSet<Address> = addrs.iter().flatten().cloned().collect();
    let census = boundary_census(tile, depth)?;
    let map = CellMap::new(ds, depth, &half(&x_c));
    let pieces: Vec<PointCloud> = addrs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            PointCloud::new(
                a.iter().map(|a| map.apply(&ds.address_to_vector(a))),
                depth,
                Some(LatticeVector::from(tile.set.get(i))),
            )
        })
        .collect();
    let symmetric = pieces.iter().all(|cloud| {
        let label = cloud.label.as_ref().expect("labeled");
        match tile.set.index_of_vector(&-label) {
            Some(j) => pieces[j].points == cloud.reflect(&x_c).points,
            None => false,
        }
    });
    Ok(GeometryReport {
        depth,
        tile_points: tile_points(ds, depth).len(),
        center_ok: check_symmetry_center(ds, &x_c),
        boundary_cells_gifs: union.len(),
        boundary_cells_types: census.len(),
        census_agrees: union == census,
        symmetric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{build_neighbor_graph, compute_neighbor_set};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn center_for_124() {
        let ds = DigitSystem::new(1, 2, 4).unwrap();
        let x = symmetry_center(&ds);
        assert_eq!(x, RationalPoint::new(r(-3, 2), r(-3, 4), r(-3, 8)));
        assert!(check_symmetry_center(&ds, &x));
        let shifted = &x - &RationalPoint::from_lattice(&LatticeVector::new(3, 0, 0));
        assert!(!check_symmetry_center(&ds, &shifted));
    }

    #[test]
    fn cell_map_matches_repeated_inverse() {
        let ds = DigitSystem::new(1, 3, 7).unwrap();
        let x_c = symmetry_center(&ds);
        for w in [vec![], vec![3], vec![6, 0, 2], vec![1, 2, 3, 4, 5]] {
            let a = Address::new(w);
            let v = &RationalPoint::from_lattice(&ds.address_to_vector(&a)) + &half(&x_c);
            assert_eq!(cell_center(&ds, &x_c, &a), ds.apply_inverse_power(&v, a.depth()));
        }
    }

    #[test]
    fn tile_point_counts() {
        let ds = DigitSystem::new(1, 3, 6).unwrap();
        assert_eq!(tile_points(&ds, 0).points, vec![RationalPoint::from_lattice(&LatticeVector::zero())]);
        for k in 1..=3 {
            let cloud = tile_points(&ds, k);
            assert_eq!(cloud.len(), 6usize.pow(k as u32));
            let den = BigInt::from(6i64.pow(k as u32));
            for p in &cloud.points {
                for c in p.coords() {
                    assert!((&den % c.denom()).is_zero());
                }
            }
        }
    }

    #[test]
    fn symmetric_pieces() {
        let ds = DigitSystem::new(1, 2, 4).unwrap();
        let s = compute_neighbor_set(&ds);
        let g = build_neighbor_graph(&ds, &s);
        let x_c = symmetry_center(&ds);
        let pieces = boundary_pieces(&ds, &g, 3);
        assert_eq!(pieces.len(), 14);
        for (i, p) in pieces.iter().enumerate() {
            let j = s.index_of_vector(&-LatticeVector::from(s.get(i))).unwrap();
            assert_eq!(pieces[j], p.reflect(&x_c));
        }
    }
}
