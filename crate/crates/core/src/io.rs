//! Text formats: point clouds, NUBG graphs, partitions and PACE-style tree
//! decompositions. Vertex and class ids are 1-based on disk.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::decomp::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hypgeo::{HPoint, Model};
use crate::nubg::{NubgInstance, Partition, PartitionKind};
use crate::tiling::TileId;

pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let p = path.as_ref();
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

pub fn write_file(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let p = path.as_ref();
    std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

/// Content lines with their 1-based line numbers; blank lines and `c` comment
/// lines are skipped unless `keep_c` is set.
fn lines(s: &str, keep_c: bool) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !l.starts_with('#') && (keep_c || !(l.starts_with("c ") || *l == "c")))
}

/// One point per line: `model,d,c1,...`.
pub fn write_points(points: &[HPoint], model: Model) -> Result<String> {
    let mut s = String::new();
    for p in points {
        let c = p.to_model(model)?;
        write!(s, "{model},{}", p.dim()).unwrap();
        for v in c {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn read_points(s: &str) -> Result<Vec<HPoint>> {
    let mut out: Vec<HPoint> = Vec::new();
    for (ln, l) in lines(s, false) {
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        if f.len() < 3 {
            return Err(perr(ln, "expected `model,d,c1,...`"));
        }
        let model: Model = f[0].parse().map_err(|_| perr(ln, format!("unknown model `{}`", f[0])))?;
        let d: usize = num(f[1], ln, "dimension")?;
        let want = if model == Model::Hyperboloid { d + 1 } else { d };
        if f.len() - 2 != want {
            return Err(perr(
                ln,
                format!("{model} point in dimension {d} needs {want} coordinates, got {}", f.len() - 2),
            ));
        }
        let c = f[2..].iter().map(|t| num::<f64>(t, ln, "coordinate")).collect::<Result<Vec<_>>>()?;
        let p = HPoint::from_model(model, &c).map_err(|e| perr(ln, e.to_string()))?;
        if let Some(q) = out.first() {
            if q.dim() != d {
                return Err(perr(ln, format!("dimension {d} differs from {}", q.dim())));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// `p nubg n m rho nu` followed by `e u v` lines.
pub fn write_graph(g: &Graph, rho: f64, nu: f64) -> String {
    let mut s = format!("p nubg {} {} {rho} {nu}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        writeln!(s, "e {} {}", u + 1, v + 1).unwrap();
    }
    s
}

pub fn read_graph(s: &str) -> Result<(Graph, f64, f64)> {
    let mut header: Option<(usize, usize, f64, f64)> = None;
    let mut edges = Vec::new();
    for (ln, l) in lines(s, false) {
        let f: Vec<&str> = l.split_whitespace().collect();
        match f[0] {
            "p" => {
                if f.len() != 6 || f[1] != "nubg" {
                    return Err(perr(ln, "expected `p nubg n m rho nu`"));
                }
                if header.is_some() {
                    return Err(perr(ln, "second header"));
                }
                header = Some((num(f[2], ln, "n")?, num(f[3], ln, "m")?, num(f[4], ln, "rho")?, num(f[5], ln, "nu")?));
            }
            "e" => {
                let (n, ..) = header.ok_or_else(|| perr(ln, "edge before header"))?;
                if f.len() != 3 {
                    return Err(perr(ln, "expected `e u v`"));
                }
                let (u, v): (usize, usize) = (num(f[1], ln, "vertex")?, num(f[2], ln, "vertex")?);
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(perr(ln, format!("vertex out of range 1..={n}")));
                }
                if u == v {
                    return Err(perr(ln, "self-loop"));
                }
                edges.push((u - 1, v - 1));
            }
            t => return Err(perr(ln, format!("unknown line type `{t}`"))),
        }
    }
    let (n, m, rho, nu) = header.ok_or_else(|| perr(0, "missing `p nubg` header"))?;
    let g = Graph::from_edges(n, &edges)?;
    if g.m() != m {
        return Err(perr(0, format!("header declares {m} edges, found {}", g.m())));
    }
    Ok((g, rho, nu))
}

pub fn read_instance(graph: &str, points: &str) -> Result<NubgInstance> {
    let (graph, rho, nu) = read_graph(graph)?;
    let points = read_points(points)?;
    if points.len() != graph.n() {
        return Err(Error::Invalid(format!("{} points for {} vertices", points.len(), graph.n())));
    }
    Ok(NubgInstance { points, rho, nu, graph })
}

fn kind_name(k: PartitionKind) -> &'static str {
    match k {
        PartitionKind::Clique => "clique",
        PartitionKind::Greedy => "greedy",
        PartitionKind::Kappa => "kappa",
    }
}

/// `p partition n classes kind kappa`, one `c id v1 v2 ...` line per class,
/// then optional `t id tile` and `r id center` lines.
pub fn write_partition(p: &Partition) -> String {
    let n: usize = p.classes.iter().map(Vec::len).sum();
    let mut s = format!("p partition {n} {} {} {}\n", p.len(), kind_name(p.kind), p.kappa);
    for (i, c) in p.classes.iter().enumerate() {
        write!(s, "c {}", i + 1).unwrap();
        for v in c {
            write!(s, " {}", v + 1).unwrap();
        }
        s.push('\n');
    }
    for (i, t) in p.tiles.iter().enumerate() {
        writeln!(s, "t {} {t}", i + 1).unwrap();
    }
    for (i, c) in p.centers.iter().enumerate() {
        writeln!(s, "r {} {}", i + 1, c + 1).unwrap();
    }
    s
}

pub fn read_partition(s: &str) -> Result<Partition> {
    let mut kind = PartitionKind::Clique;
    let mut kappa = None;
    let mut declared: Option<(usize, usize)> = None;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut tiles = Vec::new();
    let mut centers = Vec::new();
    for (ln, l) in lines(s, true) {
        let f: Vec<&str> = l.split_whitespace().collect();
        let id = |k: usize| -> Result<usize> {
            let id: usize = num(f.get(1).copied().unwrap_or(""), ln, "class id")?;
            if id != k + 1 {
                return Err(perr(ln, format!("class id {id} out of order, expected {}", k + 1)));
            }
            Ok(id)
        };
        match f[0] {
            "p" => {
                if f.len() != 6 || f[1] != "partition" {
                    return Err(perr(ln, "expected `p partition n classes kind kappa`"));
                }
                declared = Some((num(f[2], ln, "n")?, num(f[3], ln, "class count")?));
                kind = match f[4] {
                    "clique" => PartitionKind::Clique,
                    "greedy" => PartitionKind::Greedy,
                    "kappa" => PartitionKind::Kappa,
                    k => return Err(perr(ln, format!("unknown partition kind `{k}`"))),
                };
                kappa = Some(num(f[5], ln, "kappa")?);
            }
            "c" => {
                id(classes.len())?;
                let c = f[2..]
                    .iter()
                    .map(|t| {
                        num::<usize>(t, ln, "vertex").and_then(|v| v.checked_sub(1).ok_or_else(|| perr(ln, "vertex 0")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if c.is_empty() {
                    return Err(perr(ln, "empty class"));
                }
                classes.push(c);
            }
            "t" => {
                id(tiles.len())?;
                let t = f.get(2).ok_or_else(|| perr(ln, "missing tile"))?;
                tiles.push(TileId::from_str(t).map_err(|e| perr(ln, e.to_string()))?);
            }
            "r" => {
                id(centers.len())?;
                let v: usize = num(f.get(2).copied().unwrap_or(""), ln, "center")?;
                centers.push(v.checked_sub(1).ok_or_else(|| perr(ln, "vertex 0"))?);
            }
            t => return Err(perr(ln, format!("unknown line type `{t}`"))),
        }
    }
    let n: usize = classes.iter().map(Vec::len).sum();
    let mut seen = vec![false; n];
    for v in classes.iter().flatten() {
        if *v >= n || std::mem::replace(&mut seen[*v], true) {
            return Err(Error::Invalid(format!("classes do not partition 1..={n} (vertex {})", v + 1)));
        }
    }
    if let Some((dn, dc)) = declared {
        if dn != n || dc != classes.len() {
            return Err(perr(
                0,
                format!("header declares {dn} vertices in {dc} classes, found {n} in {}", classes.len()),
            ));
        }
    }
    if !tiles.is_empty() && tiles.len() != classes.len() || !centers.is_empty() && centers.len() != classes.len() {
        return Err(perr(0, "tile or center lines do not cover every class"));
    }
    let kappa = kappa.unwrap_or(1);
    Ok(Partition { classes, kind, kappa, tiles, centers })
}

/// PACE-2017 style: `s td bags max-bag n`, `b id v...` lines, tree edges as
/// `i j`, and one `w id weight` line per bag when `bag_weights` is given.
pub fn write_td(td: &TreeDecomposition, n: usize, bag_weights: Option<&[f64]>) -> String {
    let maxb = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = format!("s td {} {maxb} {n}\n", td.bags.len());
    for (i, b) in td.bags.iter().enumerate() {
        write!(s, "b {}", i + 1).unwrap();
        for v in b {
            write!(s, " {}", v + 1).unwrap();
        }
        s.push('\n');
    }
    for (i, j) in &td.edges {
        writeln!(s, "{} {}", i + 1, j + 1).unwrap();
    }
    if let Some(w) = bag_weights {
        for (i, x) in w.iter().enumerate() {
            writeln!(s, "w {} {x}", i + 1).unwrap();
        }
    }
    s
}

/// Returns the decomposition, the vertex count from the header and the bag
/// weights if present.
pub fn read_td(s: &str) -> Result<(TreeDecomposition, usize, Option<Vec<f64>>)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    let mut weights: Vec<Option<f64>> = Vec::new();
    for (ln, l) in lines(s, false) {
        let f: Vec<&str> = l.split_whitespace().collect();
        let bag_id = |t: &str, nb: usize| -> Result<usize> {
            let i: usize = num(t, ln, "bag id")?;
            if i == 0 || i > nb {
                return Err(perr(ln, format!("bag id {i} out of range 1..={nb}")));
            }
            Ok(i - 1)
        };
        match f[0] {
            "s" => {
                if f.len() != 5 || f[1] != "td" {
                    return Err(perr(ln, "expected `s td bags max-bag n`"));
                }
                let h = (num(f[2], ln, "bag count")?, num(f[3], ln, "bag size")?, num(f[4], ln, "n")?);
                bags = vec![None; h.0];
                weights = vec![None; h.0];
                header = Some(h);
            }
            "b" => {
                let (nb, _, n) = header.ok_or_else(|| perr(ln, "bag before header"))?;
                let i = bag_id(f.get(1).copied().unwrap_or(""), nb)?;
                let mut b = f[2..]
                    .iter()
                    .map(|t| {
                        let v: usize = num(t, ln, "vertex")?;
                        if v == 0 || v > n {
                            return Err(perr(ln, format!("vertex {v} out of range 1..={n}")));
                        }
                        Ok(v - 1)
                    })
                    .collect::<Result<Vec<_>>>()?;
                b.sort_unstable();
                b.dedup();
                if bags[i].replace(b).is_some() {
                    return Err(perr(ln, format!("bag {} given twice", i + 1)));
                }
            }
            "w" => {
                let (nb, ..) = header.ok_or_else(|| perr(ln, "weight before header"))?;
                if f.len() != 3 {
                    return Err(perr(ln, "expected `w id weight`"));
                }
                let i = bag_id(f[1], nb)?;
                weights[i] = Some(num(f[2], ln, "weight")?);
            }
            _ => {
                let (nb, ..) = header.ok_or_else(|| perr(ln, "edge before header"))?;
                if f.len() != 2 {
                    return Err(perr(ln, format!("unknown line `{l}`")));
                }
                edges.push((bag_id(f[0], nb)?, bag_id(f[1], nb)?));
            }
        }
    }
    let (_, maxb, n) = header.ok_or_else(|| perr(0, "missing `s td` header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| perr(0, format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    if bags.iter().map(Vec::len).max().unwrap_or(0) != maxb {
        return Err(perr(0, format!("header declares max bag size {maxb}")));
    }
    let weights = if weights.iter().all(Option::is_none) {
        None
    } else {
        Some(
            weights
                .into_iter()
                .enumerate()
                .map(|(i, w)| w.ok_or_else(|| perr(0, format!("bag {} has no weight", i + 1))))
                .collect::<Result<Vec<_>>>()?,
        )
    };
    Ok((TreeDecomposition { bags, edges }, n, weights))
}
