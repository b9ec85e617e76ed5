use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use abctile::export::{self, clouds_json, DotGraph, ExportData, Format};
use abctile::geometry::{boundary_pieces, tile_points, PointCloud};
use abctile::itypes::{build_intersection_graph, FourteenTile};
use abctile::neighbors::{
    build_neighbor_graph, compute_neighbor_set, has_14_neighbors, hata_graph, hata_triangles,
};
use abctile::partition::{build_q, certify_orders, enumerate_partition, Partitioning, QnBuilder, Schedule};
use abctile::tables::{node_name, parse_subset};
use abctile::verify::run_verification;
use abctile::{DigitSystem, Error, TileParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const DEPTH_CAP: usize = 8;

// A closed stdout (e.g. piping into `head`) ends output quietly.
macro_rules! say {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "abctile", version, about = "Topology of three-dimensional ABC self-affine tiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Params {
    a: i64,
    b: i64,
    c: i64,
    /// Machine-readable JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct Output {
    /// Output format: ply, ply-binary, csv, json or dot.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DepthArg {
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Allow depths above the safety cap.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionKind {
    P,
    Q,
    Qn,
}

#[derive(Subcommand)]
enum Command {
    /// Neighbor set and neighbor graph.
    Neighbors {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        o: Output,
    },
    /// Hata graph, its triangles and Euler characteristic.
    Hata {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        o: Output,
    },
    /// Intersection graph with table names and topologies.
    Igraph {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        o: Output,
    },
    /// Topology of the boundary patch of a neighbor subset, e.g. "S\{P,-P}".
    Classify {
        #[command(flatten)]
        p: Params,
        set: String,
    },
    /// Atoms, levels and boundary census of a partitioning.
    Partition {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        d: DepthArg,
        #[arg(long, value_enum, default_value = "qn")]
        kind: PartitionKind,
        /// Refinement marks, e.g. "3,6,..." or "inf".
        #[arg(long, default_value = "3,6,...")]
        seq: String,
    },
    /// Ordering certificates for every atom of a partitioning.
    OrderCheck {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        d: DepthArg,
        #[arg(long, default_value = "3,6,...")]
        seq: String,
    },
    /// Point cloud of the tile or of its boundary pieces.
    Render {
        #[command(flatten)]
        p: Params,
        #[command(flatten)]
        d: DepthArg,
        #[command(flatten)]
        o: Output,
        /// Boundary pieces instead of the whole tile.
        #[arg(long)]
        boundary: bool,
    },
    /// The full verification suite.
    Verify {
        #[command(flatten)]
        p: Params,
    },
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.into())
    }
}

type Out = Result<ExitCode, Failure>;

fn params(p: &Params) -> Result<(TileParams, DigitSystem), Failure> {
    let tp = TileParams::new(p.a, p.b, p.c).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((tp, DigitSystem::from_params(tp)))
}

fn fourteen(ds: &DigitSystem) -> Result<FourteenTile, Failure> {
    Ok(FourteenTile::new(ds)?)
}

fn depth(d: &DepthArg) -> Result<usize, Failure> {
    if d.depth > DEPTH_CAP && !d.force {
        return Err(Failure::Usage(format!(
            "depth {} exceeds the cap {DEPTH_CAP}; pass --force to override",
            d.depth
        )));
    }
    Ok(d.depth)
}

fn format(o: &Output, default: Format) -> Result<Format, Failure> {
    match &o.format {
        None => Ok(default),
        Some(f) => f.parse().map_err(|e: Error| Failure::Usage(e.to_string())),
    }
}

fn emit(data: &ExportData, f: Format, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => export::export(data, f, path)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            export::write(data, f, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn print_json(v: &serde_json::Value) -> Result<(), Failure> {
    say!("{}", serde_json::to_string_pretty(v).map_err(Error::from)?);
    Ok(())
}

fn vec_str(v: [i64; 3]) -> String {
    format!("({},{},{})", v[0], v[1], v[2])
}

fn neighbors(p: &Params, o: &Output) -> Out {
    let (tp, ds) = params(p)?;
    let s = compute_neighbor_set(&ds);
    let fourteen = has_14_neighbors(tp) && s.is_fourteen();
    if !fourteen {
        eprintln!("warning: {tp} is not a 14-neighbor instance");
    }
    let g = build_neighbor_graph(&ds, &s);
    if o.format.is_some() {
        emit(&ExportData::Graph(&DotGraph::neighbor_graph(&g)), format(o, Format::Dot)?, &o.out)?;
        return Ok(ExitCode::SUCCESS);
    }
    if p.json {
        print_json(&json!({
            "params": tp.to_string(),
            "count": s.len(),
            "fourteen": fourteen,
            "neighbors": s.raw(),
            "edges": g.edges.len(),
        }))?;
    } else {
        say!("{tp}: {} neighbors, {} neighbor-graph edges", s.len(), g.edges.len());
        for v in s.raw() {
            say!("  {}", vec_str(*v));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn hata(p: &Params, o: &Output) -> Out {
    let (tp, ds) = params(p)?;
    let h = hata_graph(&compute_neighbor_set(&ds));
    if o.format.is_some() {
        emit(&ExportData::Graph(&DotGraph::hata_graph(&h)), format(o, Format::Dot)?, &o.out)?;
        return Ok(ExitCode::SUCCESS);
    }
    let tri = hata_triangles(&h);
    let euler = h.set.len() as i64 - h.edges.len() as i64 + tri.len() as i64;
    if p.json {
        print_json(&json!({
            "params": tp.to_string(),
            "vertices": h.set.len(),
            "edges": h.edges.len(),
            "triangles": tri.len(),
            "euler": euler,
        }))?;
    } else {
        say!(
            "{tp}: {} vertices, {} edges, {} triangles, Euler characteristic {euler}",
            h.set.len(),
            h.edges.len(),
            tri.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn igraph(p: &Params, o: &Output) -> Out {
    let (tp, ds) = params(p)?;
    let t = fourteen(&ds)?;
    let g = build_intersection_graph(&t)?;
    if o.format.is_some() {
        emit(&ExportData::Graph(&DotGraph::intersection_graph(tp, &g)), format(o, Format::Dot)?, &o.out)?;
        return Ok(ExitCode::SUCCESS);
    }
    if p.json {
        let nodes: Vec<_> = g
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "class": n.class.to_string(),
                    "name": node_name(tp, n.class),
                    "first_iteration": n.first_iteration,
                    "topology": n.topology.topology().token(),
                })
            })
            .collect();
        print_json(&json!({
            "params": tp.to_string(),
            "nodes": nodes,
            "edges": g.edges.len(),
            "accumulated": g.accumulated,
        }))?;
    } else {
        say!("{tp}: I nodes: {}, edges: {}", g.len(), g.edges.len());
        say!("accumulated counts: {:?}", g.accumulated);
        for n in &g.nodes {
            say!(
                "  {:<4} k={} {:<12} {}",
                node_name(tp, n.class).unwrap_or_else(|| "-".into()),
                n.first_iteration,
                n.topology.topology().token(),
                n.class
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn classify(p: &Params, set: &str) -> Out {
    let (tp, ds) = params(p)?;
    let t = fourteen(&ds)?;
    let r = parse_subset(set).map_err(|e| Failure::Usage(e.to_string()))?;
    let d = t.classify(r)?;
    if p.json {
        print_json(&json!({
            "params": tp.to_string(),
            "set": r.to_string(),
            "topology": d.topology().token(),
            "summary": d.summary,
        }))?;
    } else {
        say!("U({r}) : {}", d.summary);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_partition(tp: TileParams, part: &Partitioning, json_out: bool) -> Result<(), Failure> {
    if json_out {
        print_json(&json!({
            "params": tp.to_string(),
            "index": part.index,
            "atoms": part.len(),
            "levels": part.levels(),
            "census": part.census(),
            "cells": part.cells.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        }))?;
    } else {
        say!("{tp}: index {}, {} atoms (including the exterior)", part.index, part.len());
        say!("levels: {:?}", part.levels());
        if let Some((i, o, t)) = part.census() {
            say!("census: {i} interior, {o} one disk, {t} two disks");
        }
    }
    Ok(())
}

fn partition(p: &Params, d: &DepthArg, kind: PartitionKind, seq: &str) -> Out {
    let (tp, ds) = params(p)?;
    let i = depth(d)?;
    let sched = Schedule::parse(seq).map_err(|e| Failure::Usage(e.to_string()))?;
    let t = fourteen(&ds)?;
    let part = match kind {
        PartitionKind::P => enumerate_partition(&t, i)?,
        PartitionKind::Q => build_q(&t, i)?,
        PartitionKind::Qn => QnBuilder::new(&t, sched).partitioning(i)?,
    };
    print_partition(tp, &part, p.json)?;
    Ok(ExitCode::SUCCESS)
}

fn order_check(p: &Params, d: &DepthArg, seq: &str) -> Out {
    let (tp, ds) = params(p)?;
    let i = depth(d)?;
    let sched = Schedule::parse(seq).map_err(|e| Failure::Usage(e.to_string()))?;
    let t = fourteen(&ds)?;
    let mut b = QnBuilder::new(&t, sched);
    match certify_orders(&mut b, i) {
        Ok(certs) => {
            if p.json {
                print_json(&json!({"params": tp.to_string(), "index": i, "certified": certs.len(), "pass": true}))?;
            } else {
                say!("{tp}: {} atoms certified at index {i}", certs.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::CertificateFailure(msg)) => {
            if p.json {
                print_json(&json!({"params": tp.to_string(), "index": i, "pass": false, "failure": msg}))?;
            } else {
                say!("{tp}: certificate failure: {msg}");
            }
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn render(p: &Params, d: &DepthArg, o: &Output, boundary: bool) -> Out {
    let (_, ds) = params(p)?;
    let k = depth(d)?;
    let clouds: Vec<PointCloud> = if boundary {
        let s = compute_neighbor_set(&ds);
        boundary_pieces(&ds, &build_neighbor_graph(&ds, &s), k)
    } else {
        vec![tile_points(&ds, k)]
    };
    let default = if p.json { Format::Json } else { Format::PlyAscii };
    let f = format(o, default)?;
    if p.json && f != Format::Json {
        return Err(Failure::Usage("--json only combines with --format json".into()));
    }
    if f == Format::Json && o.out.is_none() {
        print_json(&clouds_json(&clouds))?;
        return Ok(ExitCode::SUCCESS);
    }
    emit(&ExportData::Clouds(&clouds), f, &o.out)?;
    if o.out.is_some() {
        let n: usize = clouds.iter().map(|c| c.len()).sum();
        eprintln!("wrote {n} points");
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(p: &Params) -> Out {
    let (tp, _) = params(p)?;
    let report = run_verification(tp);
    if p.json {
        print_json(&serde_json::to_value(&report).map_err(Error::from)?)?;
    } else {
        say!("{report}");
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Neighbors { p, o } => neighbors(p, o),
        Command::Hata { p, o } => hata(p, o),
        Command::Igraph { p, o } => igraph(p, o),
        Command::Classify { p, set } => classify(p, set),
        Command::Partition { p, d, kind, seq } => partition(p, d, *kind, seq),
        Command::OrderCheck { p, d, seq } => order_check(p, d, seq),
        Command::Render { p, d, o, boundary } => render(p, d, o, *boundary),
        Command::Verify { p } => verify(p),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `abctile --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
