//! Noisy uniform ball graphs: construction, shallowness, partitions and contraction.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::graph::Graph;
use crate::hypgeo::{dist, minkowski, HPoint, Isometry};
use crate::tiling::{square_tiling, SquareTilingSpec, TileId};

/// How pairs at distance in `[2 rho, 2 rho nu]` are decided.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NoisePolicy {
    None,
    All,
    Bernoulli { p: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NubgInstance {
    pub points: Vec<HPoint>,
    pub rho: f64,
    pub nu: f64,
    pub graph: Graph,
}

impl NubgInstance {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, HPoint::dim)
    }

    /// First pair violating one of the two distance implications, if any.
    pub fn check_membership(&self) -> Option<(usize, usize)> {
        let n = self.n();
        for u in 0..n {
            for v in u + 1..n {
                let d = dist(&self.points[u], &self.points[v]);
                let e = self.graph.has_edge(u, v);
                if (d < 2.0 * self.rho && !e) || (d > 2.0 * self.rho * self.nu && e) {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

pub fn build_graph(points: &[HPoint], rho: f64, nu: f64, policy: NoisePolicy) -> Result<NubgInstance> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    if !(nu >= 1.0) {
        return Err(Error::InvalidArgument(format!("nu must be >= 1, got {nu}")));
    }
    if let NoisePolicy::Bernoulli { p, .. } = policy {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} outside [0,1]")));
        }
    }
    let n = points.len();
    if let Some(p) = points.iter().find(|p| p.dim() != points[0].dim()) {
        return Err(Error::DimensionMismatch(p.dim(), points[0].dim()));
    }
    let hi = (2.0 * rho * nu).cosh();
    let upper: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut rng = match policy {
                NoisePolicy::Bernoulli { seed, .. } => {
                    let mut r = ChaCha8Rng::seed_from_u64(seed);
                    r.set_stream(u as u64);
                    Some(r)
                }
                _ => None,
            };
            let mut out = Vec::new();
            for v in u + 1..n {
                let c = -minkowski(points[u].coords(), points[v].coords());
                let edge = if c > hi * (1.0 + 1e-12) {
                    false
                } else {
                    let d = dist(&points[u], &points[v]);
                    d < 2.0 * rho || gray(&policy, rng.as_mut(), d <= 2.0 * rho * nu)
                };
                if edge {
                    out.push(v);
                }
            }
            out
        })
        .collect();
    let mut adj = vec![Vec::new(); n];
    for (u, vs) in upper.iter().enumerate() {
        for &v in vs {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    Ok(NubgInstance { points: points.to_vec(), rho, nu, graph: Graph::from_sorted_adj(adj) })
}

fn gray(policy: &NoisePolicy, rng: Option<&mut ChaCha8Rng>, in_zone: bool) -> bool {
    if !in_zone {
        return false;
    }
    match policy {
        NoisePolicy::None => false,
        NoisePolicy::All => true,
        NoisePolicy::Bernoulli { p, .. } => rng.expect("seeded").random_bool(*p),
    }
}

/// Certified lower bound and upper bound on the largest number of points in a closed `rho`-ball.
pub fn shallowness(points: &[HPoint], rho: f64) -> Result<(usize, usize)> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty point set".into()));
    }
    let n = points.len();
    let tol = 1e-9;
    let near: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).filter(|&j| dist(&points[i], &points[j]) <= 2.0 * rho + tol).collect())
        .collect();
    let upper = near.iter().map(Vec::len).max().unwrap();
    let count = |c: &HPoint, pool: &[usize]| pool.iter().filter(|&&j| dist(c, &points[j]) <= rho + tol).count();
    let d2 = points[0].dim() == 2;
    let lower = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = count(&points[i], &near[i]);
            for &j in &near[i] {
                if j <= i {
                    continue;
                }
                let m = midpoint(&points[i], &points[j]);
                best = best.max(count(&m, &near[i]));
                if d2 {
                    for c in circle_centers(&points[i], &points[j], &m, rho) {
                        best = best.max(count(&c, &near[i]));
                    }
                }
            }
            best
        })
        .max()
        .unwrap();
    Ok((lower, upper))
}

fn midpoint(p: &HPoint, q: &HPoint) -> HPoint {
    let s: Vec<f64> = p.coords().iter().zip(q.coords()).map(|(a, b)| a + b).collect();
    let nrm = (-minkowski(&s, &s)).sqrt();
    HPoint::new(s.iter().map(|x| x / nrm).collect()).unwrap_or_else(|_| p.clone())
}

/// Centers of the two radius-`rho` circles through `p` and `q` in H^2.
fn circle_centers(p: &HPoint, q: &HPoint, m: &HPoint, rho: f64) -> Vec<HPoint> {
    let h = dist(p, q) / 2.0;
    if h > rho || h == 0.0 {
        return Vec::new();
    }
    let t = (rho.cosh() / h.cosh()).max(1.0).acosh();
    let b = Isometry::boost_to(m);
    let Ok(pp) = b.inverse().apply(p) else { return Vec::new() };
    let x = pp.spatial();
    let perp = [-x[1], x[0]];
    [1.0, -1.0]
        .iter()
        .filter_map(|sg| {
            let c = HPoint::from_polar(t, &[sg * perp[0], sg * perp[1]]).ok()?;
            b.apply(&c).ok()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    Clique,
    Greedy,
    Kappa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub classes: Vec<Vec<usize>>,
    pub kind: PartitionKind,
    pub kappa: usize,
    /// Tile of each class for tiling partitions, empty otherwise.
    pub tiles: Vec<TileId>,
    /// Center of each class for greedy partitions, empty otherwise.
    pub centers: Vec<usize>,
}

impl Partition {
    pub fn singletons(n: usize) -> Self {
        Partition {
            classes: (0..n).map(|v| vec![v]).collect(),
            kind: PartitionKind::Clique,
            kappa: 1,
            tiles: Vec::new(),
            centers: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of every vertex; errors unless the classes partition `0..n`.
    pub fn class_of(&self, n: usize) -> Result<Vec<usize>> {
        let mut of = vec![usize::MAX; n];
        for (c, cl) in self.classes.iter().enumerate() {
            for &v in cl {
                if v >= n {
                    return Err(Error::Invalid(format!("class {c} contains vertex {v} >= n={n}")));
                }
                if of[v] != usize::MAX {
                    return Err(Error::Invalid(format!("vertex {v} in classes {} and {c}", of[v])));
                }
                of[v] = c;
            }
        }
        if let Some(v) = of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Invalid(format!("vertex {v} not covered")));
        }
        Ok(of)
    }

    /// Checks coverage, per-kind structure and class connectivity.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        self.class_of(g.n())?;
        for (c, cl) in self.classes.iter().enumerate() {
            if self.kind == PartitionKind::Clique && !g.is_clique(cl) {
                return Err(Error::Invalid(format!("class {c} is not a clique")));
            }
            if !g.is_connected_subset(cl) {
                return Err(Error::Invalid(format!("class {c} is not connected")));
            }
        }
        if self.kind == PartitionKind::Greedy {
            for (i, &a) in self.centers.iter().enumerate() {
                if !self.classes[i].contains(&a) {
                    return Err(Error::Invalid(format!("center {a} outside its class")));
                }
                if self.classes[i].iter().any(|&v| v != a && !g.has_edge(a, v)) {
                    return Err(Error::Invalid(format!("class {i} is not a star around {a}")));
                }
                if self.centers[i + 1..].iter().any(|&b| g.has_edge(a, b)) {
                    return Err(Error::Invalid("centers not independent".into()));
                }
            }
            let mut is_c = vec![false; g.n()];
            for &a in &self.centers {
                is_c[a] = true;
            }
            if let Some(v) = (0..g.n()).find(|&v| !is_c[v] && !g.neighbors(v).iter().any(|&w| is_c[w])) {
                return Err(Error::Invalid(format!("centers not maximal at {v}")));
            }
        }
        Ok(())
    }

    pub fn weight(&self, class: usize) -> f64 {
        class_weight(self.classes[class].len())
    }
}

/// `log2(size + 1)`.
pub fn class_weight(size: usize) -> f64 {
    ((size + 1) as f64).log2()
}

/// Default tiling for partitioning an instance with radius `rho`: tile diameter `rho - rho/100`.
pub fn partition_spec(d: usize, rho: f64) -> Result<SquareTilingSpec> {
    square_tiling(d, rho - rho / 100.0)
}

/// Clique partition by tile membership; classes in tile order.
pub fn tiling_partition(inst: &NubgInstance, spec: &SquareTilingSpec) -> Result<Partition> {
    if spec.delta >= inst.rho {
        return Err(Error::InvalidArgument(format!("tile diameter {} must be below rho = {}", spec.delta, inst.rho)));
    }
    let mut by_tile: BTreeMap<TileId, Vec<usize>> = BTreeMap::new();
    for (v, p) in inst.points.iter().enumerate() {
        by_tile.entry(spec.locate(p)?).or_default().push(v);
    }
    let (tiles, classes) = by_tile.into_iter().unzip();
    Ok(Partition { classes, kind: PartitionKind::Clique, kappa: 1, tiles, centers: Vec::new() })
}

/// Greedy partition around a maximal independent set chosen in a seeded random order.
pub fn greedy_partition(g: &Graph, seed: u64) -> Partition {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut center = vec![false; n];
    let mut dominated = vec![false; n];
    for &v in &order {
        if !dominated[v] {
            center[v] = true;
            dominated[v] = true;
            for &w in g.neighbors(v) {
                dominated[w] = true;
            }
        }
    }
    let centers: Vec<usize> = (0..n).filter(|&v| center[v]).collect();
    let mut idx = vec![usize::MAX; n];
    for (i, &c) in centers.iter().enumerate() {
        idx[c] = i;
    }
    let mut classes: Vec<Vec<usize>> = centers.iter().map(|&c| vec![c]).collect();
    for v in 0..n {
        if !center[v] {
            let c = *g.neighbors(v).iter().find(|&&w| center[w]).expect("maximal independent set");
            classes[idx[c]].push(v);
        }
    }
    for c in &mut classes {
        c.sort_unstable();
    }
    let kappa = classes.iter().map(|c| kappa_cover(g, c).len()).max().unwrap_or(0);
    Partition { classes, kind: PartitionKind::Greedy, kappa, tiles: Vec::new(), centers }
}

/// Greedy clique cover of `class`; the number of cliques bounds kappa from above.
pub fn kappa_cover(g: &Graph, class: &[usize]) -> Vec<Vec<usize>> {
    let mut verts = class.to_vec();
    verts.sort_unstable();
    let mut covered = vec![false; verts.len()];
    let mut out = Vec::new();
    while let Some(s) = covered.iter().position(|c| !c) {
        let mut clique = vec![verts[s]];
        covered[s] = true;
        // uncovered vertices first, then covered ones to enlarge the clique
        for pass in 0..2 {
            for (i, &v) in verts.iter().enumerate() {
                if covered[i] != (pass == 1) || clique.contains(&v) {
                    continue;
                }
                if clique.iter().all(|&u| g.has_edge(u, v)) {
                    clique.push(v);
                    covered[i] = true;
                }
            }
        }
        clique.sort_unstable();
        out.push(clique);
    }
    out
}

/// Contraction of a graph along a partition, with class weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub graph: Graph,
    pub weights: Vec<f64>,
    pub sizes: Vec<usize>,
    pub class_of: Vec<usize>,
}

impl QuotientGraph {
    /// Total weight of a set of class nodes.
    pub fn gamma(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&c| self.weights[c]).sum()
    }
}

pub fn contract(g: &Graph, p: &Partition) -> Result<QuotientGraph> {
    let class_of = p.class_of(g.n())?;
    let mut edges = Vec::new();
    for (u, v) in g.edges() {
        let (a, b) = (class_of[u], class_of[v]);
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    let graph = Graph::from_edges(p.len(), &edges)?;
    let sizes: Vec<usize> = p.classes.iter().map(Vec::len).collect();
    Ok(QuotientGraph { graph, weights: sizes.iter().map(|&s| class_weight(s)).collect(), sizes, class_of })
}

/// `n` points uniform in the ball of radius `r` around the origin.
pub fn uniform_points<R: Rng + ?Sized>(d: usize, n: usize, r: f64, rng: &mut R) -> Result<Vec<HPoint>> {
    (0..n).map(|_| crate::hypgeo::sample_uniform_ball(d, r, rng)).collect()
}

/// Radius of the disk in H^2 whose area is `n`.
pub fn area_radius(n: usize) -> f64 {
    (1.0 + n as f64 / (2.0 * std::f64::consts::PI)).acosh()
}
