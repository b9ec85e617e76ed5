//! The full verification suite for one parameter triple.
//!
//! Checks that rest on `A = 1` are still run for other inputs, but their
//! outcome is reported as unverified rather than as pass or fail.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{geometry_report, tile_points};
use crate::itypes::{build_intersection_graph, sign_canonical, FourteenTile, IntersectionGraph, NeighborSubset};
use crate::lattice::{DigitSystem, LatticeVector, TileParams};
use crate::neighbors::{compute_neighbor_set, fourteen_neighbors, hata_graph, hata_triangles};
use crate::partition::{
    certify_orders, enumerate_partition, later_neighbor_closed_form, prefix_connectivity, later_neighbor, q_prime_cells, QnBuilder,
    Schedule,
};
use crate::surface::{surface_complex, Topology};
use crate::tables::{reference_tables, verify_tables, Family};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unverified => "UNVERIFIED",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub params: String,
    /// `A = 1` and one of the two tabulated families.
    pub proven_territory: bool,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verification suite for {}", self.params)?;
        if !self.proven_territory {
            writeln!(f, "note: outside A = 1 families, dependent checks are unverified territory")?;
        }
        for c in &self.criteria {
            writeln!(f, "[{:>2}] {:<10} {} ({} ms): {}", c.id, c.status, c.name, c.elapsed_ms, c.detail)?;
        }
        write!(f, "overall: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

/// Limits are wall-clock budgets; exceeding one fails the criterion.
const LIMITS: [(u8, u64); 6] = [(1, 10), (2, 1), (3, 10), (7, 5), (9, 60), (10, 60)];

fn limit(id: u8) -> Option<Duration> {
    LIMITS.iter().find(|l| l.0 == id).map(|l| Duration::from_secs(l.1))
}

struct Suite {
    results: Vec<CriterionResult>,
    proven: bool,
}

impl Suite {
    /// Runs one criterion; `dependent` marks checks that only count with `A = 1`.
    fn run(&mut self, id: u8, name: &'static str, dependent: bool, f: impl FnOnce() -> Result<(bool, String)>) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (mut ok, mut detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(l) = limit(id) {
            if elapsed > l {
                ok = false;
                detail = format!("{detail}; exceeded {} s budget", l.as_secs());
            }
        }
        let status = match (ok, dependent && !self.proven) {
            (_, true) => Status::Unverified,
            (true, false) => Status::Pass,
            (false, false) => Status::Fail,
        };
        self.results.push(CriterionResult {
            id,
            name,
            status,
            detail,
            elapsed_ms: elapsed.as_millis(),
        });
    }
}

fn subset(names: &[&str]) -> NeighborSubset {
    NeighborSubset::from_indices(names.iter().map(|n| NeighborSubset::index_of_name(n).expect("known name")))
}

/// Walk laws of the intersection graph: later walks avoid the ribbon node and
/// the start, two-disk nodes lead to single disks, singletons are nodes.
pub fn walk_laws(g: &IntersectionGraph) -> (bool, bool, bool) {
    let b1 = g.node_of(sign_canonical(NeighborSubset::FULL.minus(subset(&["P", "-P"]))));
    let step = |from: &BTreeSet<usize>| -> BTreeSet<usize> {
        g.edges.iter().filter(|e| from.contains(&e.0)).map(|e| e.2).collect()
    };
    let mut level = step(&BTreeSet::from([g.start]));
    let mut seen = BTreeSet::new();
    let mut avoids = true;
    loop {
        level = step(&level);
        if b1.is_some_and(|b| level.contains(&b)) || level.contains(&g.start) {
            avoids = false;
        }
        if !seen.insert(level.clone()) {
            break;
        }
    }
    let collapse = g.nodes.iter().enumerate().all(|(n, node)| {
        node.topology.topology() != Topology::TwoBalls
            || g.successors(n).all(|e| g.nodes[e.2].topology.topology() == Topology::Ball)
    });
    let singletons = (0..14).all(|i| g.node_of(sign_canonical(NeighborSubset::singleton(i))).is_some());
    (avoids, collapse, singletons)
}

fn need<T>(r: &std::result::Result<T, String>) -> Result<&T> {
    r.as_ref().map_err(|e| Error::NotFourteenNeighbors(e.clone()))
}

pub fn run_verification(p: TileParams) -> VerifyReport {
    let ds = DigitSystem::from_params(p);
    let family = Family::of(p).ok();
    let mut suite = Suite {
        results: Vec::new(),
        proven: family.is_some(),
    };

    suite.run(1, "neighbor set", false, || {
        let s = compute_neighbor_set(&ds);
        let expected: BTreeSet<[i64; 3]> = fourteen_neighbors(p).into_iter().collect();
        let got: BTreeSet<[i64; 3]> = s.raw().iter().copied().collect();
        Ok((
            s.len() == 14 && got == expected,
            format!("{} neighbors{}", s.len(), if got == expected { ", closed form" } else { "" }),
        ))
    });

    suite.run(2, "Hata structure", false, || {
        let h = hata_graph(&compute_neighbor_set(&ds));
        let tri = hata_triangles(&h);
        let per_edge = h.edges.iter().all(|&(a, b)| tri.iter().filter(|t| t.contains(&a) && t.contains(&b)).count() == 2);
        let v = h.set.len() as i64;
        let euler = v - h.edges.len() as i64 + tri.len() as i64;
        let complex_ok = surface_complex(&h).map(|c| c.euler_characteristic() == 2).unwrap_or(false);
        Ok((
            v == 14 && h.edges.len() == 36 && tri.len() == 24 && euler == 2 && per_edge && complex_ok,
            format!("{} edges, {} triangles, Euler {euler}", h.edges.len(), tri.len()),
        ))
    });

    let tile = FourteenTile::new(&ds).map_err(|e| e.to_string());
    let graph = tile
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|t| build_intersection_graph(t).map_err(|e| e.to_string()));

    suite.run(3, "intersection graph counts", true, || {
        let g = need(&graph)?;
        let Some(f) = family else {
            return Ok((false, format!("I nodes: {}, accumulated {:?}", g.len(), g.accumulated)));
        };
        let acc = &g.accumulated;
        let wide = p.c() > 2 * p.b();
        let expected: Vec<usize> = match (f, wide) {
            (Family::C1, w) => vec![1, 3, 8, if w { 21 } else { 20 }, if w { 33 } else { 32 }, 44, 51, 55, 55],
            (Family::C2, w) => vec![1, 3, 8, if w { 21 } else { 20 }, if w { 37 } else { 36 }, 47, 54, 57, 57],
        };
        Ok((
            g.len() == f.node_count() && *acc == expected,
            format!("I nodes: {}, accumulated {:?}", g.len(), acc),
        ))
    });

    suite.run(4, "table fidelity", true, || {
        let t = need(&tile)?;
        let g = need(&graph)?;
        let r = verify_tables(t, g)?;
        let bad: Vec<String> = r.failures().map(|x| x.name.clone()).collect();
        Ok((
            r.pass,
            format!("{} rows, failures {:?}, unmatched {:?}", r.rows.len(), bad, r.unmatched_nodes),
        ))
    });

    suite.run(5, "classifier spot checks", false, || {
        let t = need(&tile)?;
        let full = NeighborSubset::FULL;
        let e2 = reference_tables()
            .into_iter()
            .find(|e| e.name == "e2")
            .map(|e| e.subset)
            .ok_or_else(|| Error::Parse("missing e2 row".into()))?;
        let checks = [
            ("S\\{P}", full.minus(subset(&["P"])), Topology::Ball),
            ("S\\{P,-P}", full.minus(subset(&["P", "-P"])), Topology::Ribbon),
            ("S", full, Topology::Sphere),
            ("{P,N-Q,N-Q+P}", subset(&["P", "N-Q", "N-Q+P"]), Topology::Ball),
            ("e2", e2, Topology::TwoBalls),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, r, want) in checks {
            let got = t.classify(r)?.topology();
            ok &= got == want;
            parts.push(format!("{name}: {got}"));
        }
        Ok((ok, parts.join(", ")))
    });

    suite.run(6, "walk laws", true, || {
        let g = need(&graph)?;
        let (a, b, c) = walk_laws(g);
        Ok((
            a && b && c,
            format!("avoids start and ribbon: {a}, two disks collapse: {b}, singletons: {c}"),
        ))
    });

    suite.run(7, "later-neighbor closed form", true, || {
        let t = need(&tile)?;
        let mut wrong = 0;
        for z in ds.addresses(3) {
            for i in 0..14 {
                let v = t.vector(i);
                if later_neighbor_closed_form(&ds, &z, &LatticeVector::from(v))? != later_neighbor(&ds, &z, v) {
                    wrong += 1;
                }
            }
        }
        Ok((wrong == 0, format!("{} pairs, {wrong} discrepancies", 14 * ds.c().pow(3))))
    });

    suite.run(8, "prefix connectivity", true, || {
        let t = need(&tile)?;
        let mut parts = Vec::new();
        let mut ok = true;
        for j in 1..=3 {
            let r = prefix_connectivity(t, j)?;
            ok &= r.all_connected() && r.cases_match();
            parts.push(format!("depth {j}: {} prefixes connected", r.checks.len()));
        }
        Ok((ok, format!("{}; twelve cases reproduced: {ok}", parts.join(", "))))
    });

    suite.run(9, "partition suites", true, || {
        let t = need(&tile)?;
        let c = ds.c() as usize;
        let mut ok = true;
        let mut notes = Vec::new();
        for i in 0..=4 {
            let part = enumerate_partition(t, i)?;
            ok &= part.len() == c.pow(i as u32) + 1;
        }
        notes.push("|P_i| = C^i + 1".to_string());
        for i in 2..=4 {
            let levels: Vec<usize> = {
                let mut l: Vec<usize> = q_prime_cells(t, i)?.iter().map(|a| a.depth()).collect();
                l.sort();
                l.dedup();
                l
            };
            ok &= levels == vec![i, i + 1];
        }
        let mut b = QnBuilder::new(t, Schedule::every_third());
        for i in 1..=6 {
            for l in b.partitioning(i)?.levels() {
                ok &= l != 1 && l + 1 >= i && l <= i + 1;
            }
        }
        let mut certs = 0;
        for i in 1..=4 {
            certs += certify_orders(&mut b, i)?.len();
        }
        notes.push(format!("{certs} order certificates"));
        Ok((ok, notes.join(", ")))
    });

    suite.run(10, "geometry", false, || {
        let t = need(&tile)?;
        let mut ok = true;
        for k in 0..=5 {
            ok &= tile_points(&ds, k).len() == (ds.c() as usize).pow(k as u32);
        }
        let mut detail = String::new();
        for k in 1..=5 {
            let r = geometry_report(t, k)?;
            ok &= r.pass(ds.c());
            if k == 5 {
                detail = format!(
                    "depth 5: {} boundary cells by subdivision, {} by types, symmetric: {}, center: {}",
                    r.boundary_cells_gifs, r.boundary_cells_types, r.symmetric, r.center_ok
                );
            }
        }
        Ok((ok, detail))
    });

    let pass = suite.results.iter().all(|r| r.status != Status::Fail);
    VerifyReport {
        params: p.to_string(),
        proven_territory: suite.proven,
        criteria: suite.results,
        pass,
    }
}
