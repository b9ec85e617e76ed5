use std::collections::BTreeSet;

use abctile::export::{export, read_csv, DotGraph, ExportData, Format};
use abctile::geometry::*;
use abctile::itypes::{build_intersection_graph, FourteenTile};
use abctile::neighbors::{build_neighbor_graph, compute_neighbor_set, difference_bounds};
use abctile::{Address, DigitSystem, RationalPoint};
use num_rational::BigRational;
use num_traits::Signed;

fn tile(a: i64, b: i64, c: i64) -> FourteenTile {
    FourteenTile::new(&DigitSystem::new(a, b, c).unwrap()).unwrap()
}

#[test]
fn boundary_cells_have_boundary_children() {
    let t = tile(1, 2, 4);
    for k in 0..4 {
        let here = boundary_census(&t, k).unwrap();
        let next = boundary_census(&t, k + 1).unwrap();
        for a in t.ds.addresses(k) {
            let kids: BTreeSet<Address> = (0..4).map(|e| a.child(e)).filter(|c| next.contains(c)).collect();
            if here.contains(&a) {
                assert!(!kids.is_empty(), "{a}");
            } else {
                assert!(kids.is_empty(), "{a}");
            }
        }
    }
}

#[test]
fn union_of_pieces_is_boundary_cloud() {
    let t = tile(1, 3, 6);
    let x_c = symmetry_center(&t.ds);
    for k in 1..=4 {
        let pieces = boundary_pieces(&t.ds, &t.graph, k);
        assert_eq!(pieces.len(), 14);
        let union: BTreeSet<RationalPoint> = pieces.iter().flat_map(|p| p.points.iter().cloned()).collect();
        let census: BTreeSet<RationalPoint> = boundary_census(&t, k)
            .unwrap()
            .iter()
            .map(|a| cell_center(&t.ds, &x_c, a))
            .collect();
        assert_eq!(union, census);
    }
}

#[test]
fn tile_points_lie_within_difference_bounds() {
    for (a, b, c) in [(1, 2, 4), (1, 3, 7), (2, 3, 5)] {
        let ds = DigitSystem::new(a, b, c).unwrap();
        let w = difference_bounds(&ds);
        for p in tile_points(&ds, 4).points {
            for (x, bound) in p.coords().into_iter().zip(&w) {
                assert!(&x.abs() <= bound);
            }
        }
    }
}

#[test]
fn depth_one_points_are_digits_scaled() {
    let ds = DigitSystem::new(1, 2, 4).unwrap();
    let pts = tile_points(&ds, 1).points;
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    // M^{-1} (e,0,0) = (-B e / C, -A e / C, -e / C)
    let expect: BTreeSet<RationalPoint> =
        (0..4).map(|e| RationalPoint::new(r(-2 * e, 4), r(-e, 4), r(-e, 4))).collect();
    assert_eq!(pts.into_iter().collect::<BTreeSet<_>>(), expect);
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = DigitSystem::new(1, 2, 4).unwrap();
    let s = compute_neighbor_set(&ds);
    let g = build_neighbor_graph(&ds, &s);
    let pieces = boundary_pieces(&ds, &g, 3);
    let csv = dir.path().join("b.csv");
    export(&ExportData::Clouds(&pieces), Format::Csv, &csv).unwrap();
    let back = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(back.len(), 14);
    for (a, b) in pieces.iter().zip(&back) {
        assert_eq!(a.points, b.points);
        assert_eq!(a.label, b.label);
    }
    let ply = dir.path().join("b.ply");
    export(&ExportData::Clouds(&pieces), Format::PlyAscii, &ply).unwrap();
    let text = std::fs::read_to_string(&ply).unwrap();
    let total: usize = pieces.iter().map(|p| p.len()).sum();
    assert!(text.contains(&format!("element vertex {total}")));
    assert_eq!(text.lines().skip_while(|l| *l != "end_header").count() - 1, total);

    let t = tile(1, 2, 4);
    let ig = build_intersection_graph(&t).unwrap();
    let dot = dir.path().join("i.dot");
    export(&ExportData::Graph(&DotGraph::intersection_graph(t.ds.params(), &ig)), Format::Dot, &dot).unwrap();
    let text = std::fs::read_to_string(&dot).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count(), 55);
    assert!(text.contains("label=\"b1 "));
}
