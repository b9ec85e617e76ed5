use abctile::verify::{run_verification, Status, VerifyReport};
use abctile::TileParams;

const NAMES: [&str; 10] = [
    "neighbor sets equal the 14-element closed form",
    "Hata graph: 36 edges, 24 triangles, Euler 2, two triangles per edge",
    "intersection graph node and accumulated counts",
    "reference tables and topologies reproduced",
    "classifier spot checks",
    "walk laws of the intersection graph",
    "later-neighbor closed form equals direct evaluation",
    "prefix connectivity and the twelve depth-3 cases",
    "partition suites",
    "geometry: cardinality, point symmetry, boundary census",
];

/// Triples each criterion is checked on.
fn instances(id: u8) -> &'static [(i64, i64, i64)] {
    match id {
        1 => &[(1, 2, 4), (1, 2, 5), (1, 3, 6), (1, 3, 7), (2, 3, 5)],
        2 | 5 | 6 | 10 => &[(1, 2, 4), (1, 2, 5), (1, 3, 6), (1, 3, 7)],
        3 | 4 => &[(1, 2, 4), (1, 2, 5), (1, 3, 6), (1, 3, 7)],
        7 | 8 => &[(1, 2, 4), (1, 3, 6)],
        9 => &[(1, 2, 4)],
        _ => &[],
    }
}

fn main() {
    let triples = [(1, 2, 4), (1, 2, 5), (1, 3, 6), (1, 3, 7), (2, 3, 5)];
    let reports: Vec<((i64, i64, i64), VerifyReport)> = triples
        .iter()
        .map(|&(a, b, c)| ((a, b, c), run_verification(TileParams::new(a, b, c).unwrap())))
        .collect();
    for (_, r) in &reports {
        println!("{r}\n");
    }
    let mut failed = Vec::new();
    for id in 1..=10u8 {
        let mut ok = true;
        let mut notes = Vec::new();
        for t in instances(id) {
            let r = &reports.iter().find(|x| x.0 == *t).unwrap().1;
            let c = r.criteria.iter().find(|c| c.id == id).unwrap();
            ok &= c.status == Status::Pass;
            notes.push(format!("{:?}={}", t, c.status));
        }
        println!(
            "criterion {id:>2} {}: {} [{}]",
            if ok { "PASS" } else { "FAIL" },
            NAMES[id as usize - 1],
            notes.join(" ")
        );
        if !ok {
            failed.push(id);
        }
    }
    // A = 2 is reported, never counted as proven.
    let outside = &reports.iter().find(|x| x.0 == (2, 3, 5)).unwrap().1;
    let outside_ok = !outside.proven_territory
        && outside
            .criteria
            .iter()
            .filter(|c| (3..=9).contains(&c.id) && c.id != 5)
            .all(|c| c.status == Status::Unverified);
    println!(
        "outside A = 1 reported as unverified: {}",
        if outside_ok { "PASS" } else { "FAIL" }
    );
    if !failed.is_empty() || !outside_ok {
        println!("acceptance: FAILED {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
