//! Serialization of point clouds, graphs and reports.
//!
//! PLY stores coordinates as doubles; CSV and JSON keep exact `p/q` strings.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itypes::{IntersectionGraph, FourteenTile, NEIGHBOR_NAMES};
use crate::lattice::{LatticeVector, RationalPoint, TileParams};
use crate::geometry::PointCloud;
use crate::neighbors::{HataGraph, NeighborGraph, NeighborSet};
use crate::tables::node_name;

/// Colors for labeled clouds, indexed by the position of the label in the
/// neighbor ordering (wrapping for larger neighbor sets).
pub const PALETTE: [[u8; 3]; 14] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 190],
    [0, 128, 128],
    [170, 110, 40],
    [128, 0, 0],
    [0, 0, 128],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    PlyAscii,
    PlyBinary,
    Csv,
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ply" | "ply-ascii" => Ok(Format::PlyAscii),
            "ply-binary" => Ok(Format::PlyBinary),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(Error::Parse(format!("unknown format {s}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::PlyAscii => "ply",
            Format::PlyBinary => "ply-binary",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
        })
    }
}

/// A graph ready for DOT output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotGraph {
    pub name: String,
    pub directed: bool,
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, Option<String>)>,
}

impl DotGraph {
    pub fn neighbor_graph(g: &NeighborGraph) -> Self {
        DotGraph {
            name: "neighbor_graph".into(),
            directed: true,
            nodes: vertex_names(&g.set),
            edges: g
                .edges
                .iter()
                .map(|e| (e.source, e.target, Some(format!("{}|{}", e.d, e.d_prime))))
                .collect(),
        }
    }

    pub fn hata_graph(h: &HataGraph) -> Self {
        DotGraph {
            name: "hata_graph".into(),
            directed: false,
            nodes: vertex_names(&h.set),
            edges: h.edges.iter().map(|&(a, b)| (a, b, None)).collect(),
        }
    }

    /// Nodes are named after the reference tables when a row matches.
    pub fn intersection_graph(p: TileParams, g: &IntersectionGraph) -> Self {
        DotGraph {
            name: "intersection_graph".into(),
            directed: true,
            nodes: g
                .nodes
                .iter()
                .map(|n| match node_name(p, n.class) {
                    Some(name) => format!("{name} {}", n.class),
                    None => n.class.to_string(),
                })
                .collect(),
            edges: g.edges.iter().map(|&(a, d, b)| (a, b, Some(d.to_string()))).collect(),
        }
    }

    pub fn write(&self, w: &mut dyn Write) -> Result<()> {
        let (kw, arrow) = if self.directed { ("digraph", "->") } else { ("graph", "--") };
        writeln!(w, "{kw} {} {{", self.name)?;
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(w, "  n{i} [label=\"{}\"];", n.replace('"', "\\\""))?;
        }
        for (a, b, label) in &self.edges {
            match label {
                Some(l) => writeln!(w, "  n{a} {arrow} n{b} [label=\"{l}\"];")?,
                None => writeln!(w, "  n{a} {arrow} n{b};")?,
            }
        }
        writeln!(w, "}}")?;
        Ok(())
    }
}

fn vertex_names(s: &NeighborSet) -> Vec<String> {
    (0..s.len())
        .map(|i| {
            let v = s.get(i);
            format!("({},{},{})", v[0], v[1], v[2])
        })
        .collect()
}

/// Name of a 14-neighbor vector in the canonical ordering, if any.
pub fn neighbor_label(tile: Option<&FourteenTile>, v: &LatticeVector) -> String {
    if let (Some(t), Some(raw)) = (tile, v.to_i64()) {
        if let Some(i) = t.canonical_index(raw) {
            return NEIGHBOR_NAMES[i].to_string();
        }
    }
    v.to_string()
}

/// Anything [`export`] can write.
pub enum ExportData<'a> {
    Clouds(&'a [PointCloud]),
    Graph(&'a DotGraph),
    Report(&'a serde_json::Value),
}

impl ExportData<'_> {
    fn kind(&self) -> &'static str {
        match self {
            ExportData::Clouds(_) => "point cloud",
            ExportData::Graph(_) => "graph",
            ExportData::Report(_) => "report",
        }
    }
}

fn mismatch(format: Format, data: &ExportData) -> Error {
    Error::FormatMismatch {
        format: format.to_string(),
        data: data.kind().to_string(),
    }
}

fn label_index(clouds: &[PointCloud], c: &PointCloud) -> Option<usize> {
    let mut labels: Vec<&LatticeVector> = clouds.iter().filter_map(|c| c.label.as_ref()).collect();
    labels.sort();
    labels.dedup();
    c.label.as_ref().and_then(|l| labels.binary_search(&l).ok())
}

fn write_ply(clouds: &[PointCloud], binary: bool, w: &mut dyn Write) -> Result<()> {
    let total: usize = clouds.iter().map(|c| c.len()).sum();
    let colored = clouds.iter().any(|c| c.label.is_some());
    writeln!(w, "ply")?;
    writeln!(
        w,
        "format {} 1.0",
        if binary { "binary_little_endian" } else { "ascii" }
    )?;
    if colored {
        writeln!(w, "comment colors: fixed palette indexed by sorted neighbor label")?;
        for c in clouds {
            if let (Some(l), Some(i)) = (&c.label, label_index(clouds, c)) {
                let col = PALETTE[i % PALETTE.len()];
                writeln!(w, "comment label {l} color {} {} {}", col[0], col[1], col[2])?;
            }
        }
    }
    writeln!(w, "element vertex {total}")?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property double {axis}")?;
    }
    if colored {
        for ch in ["red", "green", "blue"] {
            writeln!(w, "property uchar {ch}")?;
        }
    }
    writeln!(w, "end_header")?;
    for c in clouds {
        let col = label_index(clouds, c).map(|i| PALETTE[i % PALETTE.len()]).unwrap_or([200, 200, 200]);
        for p in &c.points {
            let f = p.to_f64();
            if binary {
                for v in f {
                    w.write_all(&v.to_le_bytes())?;
                }
                if colored {
                    w.write_all(&col)?;
                }
            } else if colored {
                writeln!(w, "{} {} {} {} {} {}", f[0], f[1], f[2], col[0], col[1], col[2])?;
            } else {
                writeln!(w, "{} {} {}", f[0], f[1], f[2])?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    x_num: String,
    x_den: String,
    y_num: String,
    y_den: String,
    z_num: String,
    z_den: String,
    label: String,
}

fn label_string(l: &Option<LatticeVector>) -> String {
    l.as_ref()
        .map(|v| format!("{};{};{}", v.x, v.y, v.z))
        .unwrap_or_default()
}

fn parse_label(s: &str) -> Result<Option<LatticeVector>> {
    if s.is_empty() {
        return Ok(None);
    }
    let parts: Vec<&str> = s.split(';').collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(Error::Parse(format!("bad label {s}")));
    };
    let n = |t: &str| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad label {s}")));
    Ok(Some(LatticeVector::new(n(x)?, n(y)?, n(z)?)))
}

fn write_csv(clouds: &[PointCloud], w: &mut dyn Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for c in clouds {
        let label = label_string(&c.label);
        for p in &c.points {
            wr.serialize(CsvRow {
                x_num: p.x.numer().to_string(),
                x_den: p.x.denom().to_string(),
                y_num: p.y.numer().to_string(),
                y_den: p.y.denom().to_string(),
                z_num: p.z.numer().to_string(),
                z_den: p.z.denom().to_string(),
                label: label.clone(),
            })?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads a CSV written by [`export`]; rows are grouped by label in order
/// of first appearance. The depth is not stored and is set to 0.
pub fn read_csv(r: impl Read) -> Result<Vec<PointCloud>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut groups: Vec<(Option<LatticeVector>, Vec<RationalPoint>)> = Vec::new();
    for row in rd.deserialize() {
        let row: CsvRow = row?;
        let q = |n: &str, d: &str| -> Result<BigRational> {
            let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad numerator {n}")))?;
            let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad denominator {d}")))?;
            if d == BigInt::from(0) {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        };
        let p = RationalPoint::new(
            q(&row.x_num, &row.x_den)?,
            q(&row.y_num, &row.y_den)?,
            q(&row.z_num, &row.z_den)?,
        );
        let label = parse_label(&row.label)?;
        match groups.iter_mut().find(|g| g.0 == label) {
            Some(g) => g.1.push(p),
            None => groups.push((label, vec![p])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(l, pts)| PointCloud::new(pts, 0, l))
        .collect())
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// JSON form of clouds with exact `p/q` coordinates.
pub fn clouds_json(clouds: &[PointCloud]) -> serde_json::Value {
    serde_json::Value::Array(
        clouds
            .iter()
            .map(|c| {
                serde_json::json!({
                    "depth": c.depth,
                    "label": c.label.as_ref().map(|l| [l.x.to_string(), l.y.to_string(), l.z.to_string()]),
                    "points": c.points.iter().map(|p| {
                        [rational_string(&p.x), rational_string(&p.y), rational_string(&p.z)]
                    }).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

/// Writes `data` in `format` to any writer.
pub fn write(data: &ExportData, format: Format, w: &mut dyn Write) -> Result<()> {
    match (data, format) {
        (ExportData::Clouds(c), Format::PlyAscii) => write_ply(c, false, w),
        (ExportData::Clouds(c), Format::PlyBinary) => write_ply(c, true, w),
        (ExportData::Clouds(c), Format::Csv) => write_csv(c, w),
        (ExportData::Clouds(c), Format::Json) => {
            serde_json::to_writer_pretty(&mut *w, &clouds_json(c))?;
            writeln!(w)?;
            Ok(())
        }
        (ExportData::Report(v), Format::Json) => {
            serde_json::to_writer_pretty(&mut *w, v)?;
            writeln!(w)?;
            Ok(())
        }
        (ExportData::Graph(g), Format::Dot) => g.write(w),
        (d, f) => Err(mismatch(f, d)),
    }
}

/// Writes `data` in `format` to the file at `path`.
pub fn export(data: &ExportData, format: Format, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write(data, format, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tile_points;
    use crate::lattice::DigitSystem;
    use crate::neighbors::{compute_neighbor_set, hata_graph};

    #[test]
    fn hata_dot_counts() {
        let ds = DigitSystem::new(1, 2, 4).unwrap();
        let h = hata_graph(&compute_neighbor_set(&ds));
        let mut out = Vec::new();
        write(&ExportData::Graph(&DotGraph::hata_graph(&h)), Format::Dot, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 14);
        assert_eq!(text.lines().filter(|l| l.contains(" -- ")).count(), 36);
    }

    #[test]
    fn mismatches() {
        let ds = DigitSystem::new(1, 2, 4).unwrap();
        let c = [tile_points(&ds, 1)];
        let mut out = Vec::new();
        assert!(matches!(
            write(&ExportData::Clouds(&c), Format::Dot, &mut out),
            Err(Error::FormatMismatch { .. })
        ));
        let h = DotGraph::hata_graph(&hata_graph(&compute_neighbor_set(&ds)));
        assert!(matches!(
            write(&ExportData::Graph(&h), Format::Csv, &mut out),
            Err(Error::FormatMismatch { .. })
        ));
    }

    #[test]
    fn ply_vertex_count() {
        let ds = DigitSystem::new(1, 3, 6).unwrap();
        let c = [tile_points(&ds, 3)];
        for f in [Format::PlyAscii, Format::PlyBinary] {
            let mut out = Vec::new();
            write(&ExportData::Clouds(&c), f, &mut out).unwrap();
            let head = String::from_utf8_lossy(&out[..200]).to_string();
            assert!(head.contains("element vertex 216"));
            let body = out.len() - (out.windows(11).position(|w| w == b"end_header\n").unwrap() + 11);
            if f == Format::PlyBinary {
                assert_eq!(body, 216 * 24);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let ds = DigitSystem::new(1, 2, 5).unwrap();
        let mut c = tile_points(&ds, 3);
        c.label = Some(LatticeVector::new(1, 0, 0));
        c.depth = 0;
        let plain = PointCloud::new(tile_points(&ds, 1).points, 0, None);
        let clouds = [c, plain];
        let mut out = Vec::new();
        write(&ExportData::Clouds(&clouds), Format::Csv, &mut out).unwrap();
        assert!(out.starts_with(b"x_num,x_den,y_num,y_den,z_num,z_den,label\n"));
        assert_eq!(read_csv(out.as_slice()).unwrap(), clouds);
    }
}
