//! Tilings of hyperbolic space.
//!
//! [`SquareTilingSpec`] is the half-space tiling of H^d by images of a
//! Euclidean cube `S = [0,s]^{d-1} x [1, s+1]` under
//! `f_{a,b}(p) = (s+1)^b (p + (s a, 0))`. [`RegularTilingSpec`] holds the
//! constants of a regular {m,q} tiling of H^2, and [`RegularTiling`] builds
//! such a tiling lazily with explicit coordinates.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeo::{self, dist, HPoint, Hyperplane, Isometry};

const FACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareTilingSpec {
    pub dim: usize,
    pub delta: f64,
    pub s: f64,
    pub inradius: f64,
}

/// The tiling whose tiles have diameter `delta`.
pub fn square_tiling(d: usize, delta: f64) -> Result<SquareTilingSpec> {
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("tile diameter must be positive, got {delta}")));
    }
    let c = cosh_minus_one(delta);
    let df = d as f64;
    let s = (c + (c * c + 2.0 * df * c).sqrt()) / df;
    Ok(SquareTilingSpec { dim: d, delta, s, inradius: 0.5 * s.ln_1p() })
}

fn cosh_minus_one(x: f64) -> f64 {
    let h = (x / 2.0).sinh();
    2.0 * h * h
}

/// Index of the tile `f_{a,b}(S)`; printed as `b:a1,a2,...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileId {
    pub b: i64,
    pub a: Vec<i64>,
}

impl TileId {
    pub fn new(a: Vec<i64>, b: i64) -> Self {
        TileId { b, a }
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.b)?;
        for (i, x) in self.a.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for TileId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad tile id `{s}`"));
        let (b, a) = s.split_once(':').ok_or_else(bad)?;
        let b = b.trim().parse().map_err(|_| bad())?;
        let a = a.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<Vec<i64>>>()?;
        Ok(TileId { b, a })
    }
}

impl SquareTilingSpec {
    /// Tile diameter; used as the layer thickness of [`layer_census`].
    pub fn tau(&self) -> f64 {
        self.delta
    }

    fn base(&self) -> f64 {
        self.s + 1.0
    }

    /// Closed half-space box of a tile: lower and upper corners (height last).
    pub fn tile_box(&self, t: &TileId) -> (Vec<f64>, Vec<f64>) {
        let scale = self.base().powi(t.b as i32);
        let w = scale * self.s;
        let mut lo: Vec<f64> = t.a.iter().map(|&a| a as f64 * w).collect();
        let mut hi: Vec<f64> = t.a.iter().map(|&a| (a + 1) as f64 * w).collect();
        lo.push(scale);
        hi.push(scale * self.base());
        (lo, hi)
    }

    pub fn locate(&self, p: &HPoint) -> Result<TileId> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch(p.dim(), self.dim));
        }
        self.locate_halfspace(&p.to_halfspace())
    }

    /// Point location from half-space coordinates; boxes are half-open.
    pub fn locate_halfspace(&self, u: &[f64]) -> Result<TileId> {
        let d = self.dim;
        let h = u[d - 1];
        let base = self.base();
        let mut b = (h.ln() / base.ln()).floor() as i64;
        let mut fixed = false;
        for _ in 0..4 {
            let lo = base.powi(b as i32);
            if h < lo {
                b -= 1;
            } else if h >= lo * base {
                b += 1;
            } else {
                fixed = true;
                break;
            }
        }
        if !fixed {
            return Err(Error::Precision(format!("cannot resolve scale level of height {h}")));
        }
        let w = base.powi(b as i32) * self.s;
        let a = u[..d - 1]
            .iter()
            .map(|&x| {
                let mut ai = (x / w).floor() as i64;
                if (ai as f64) * w > x {
                    ai -= 1;
                } else if ((ai + 1) as f64) * w <= x {
                    ai += 1;
                }
                ai
            })
            .collect();
        Ok(TileId { a, b })
    }

    /// Isometry mapping the base cube onto tile `(a, b)`.
    pub fn tile_isometry(&self, a: &[i64], b: i64) -> Isometry {
        assert_eq!(a.len(), self.dim - 1);
        let shift: Vec<f64> = a.iter().map(|&x| x as f64 * self.s).collect();
        let t = Isometry::halfspace_translation(&shift);
        let h = Isometry::halfspace_scaling(self.dim, self.base().powi(b as i32));
        h.compose(&t)
    }

    /// A fixed interior point of the base cube.
    pub fn base_center(&self) -> HPoint {
        let mut u = vec![self.s / 2.0; self.dim - 1];
        u.push(self.base().sqrt());
        HPoint::from_halfspace(&u).expect("base cube center is valid")
    }

    pub fn tile_center(&self, t: &TileId) -> Result<HPoint> {
        self.tile_isometry(&t.a, t.b).apply(&self.base_center())
    }

    /// Corners of the closed tile box as points.
    pub fn corners(&self, t: &TileId) -> Result<Vec<HPoint>> {
        let (lo, hi) = self.tile_box(t);
        let d = self.dim;
        (0..1usize << d)
            .map(|mask| {
                let c: Vec<f64> = (0..d).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect();
                HPoint::from_halfspace(&c)
            })
            .collect()
    }

    /// Tiles whose boundary meets the boundary of `t` in more than one point.
    pub fn neighbors(&self, t: &TileId) -> Vec<TileId> {
        let d = self.dim;
        let base = self.base();
        let mut out = Vec::new();
        let (lo, hi) = self.tile_box(t);
        for db in -1i64..=1 {
            let b = t.b + db;
            let w = base.powi(b as i32) * self.s;
            let ranges: Vec<(i64, i64)> =
                (0..d - 1).map(|i| ((lo[i] / w).floor() as i64 - 1, (hi[i] / w).floor() as i64 + 1)).collect();
            let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            'outer: loop {
                let cand = TileId { a: cur.clone(), b };
                if cand != *t {
                    let (lo2, hi2) = self.tile_box(&cand);
                    if boxes_share_face_portion(&lo, &hi, &lo2, &hi2) {
                        out.push(cand);
                    }
                }
                for i in 0..d - 1 {
                    if cur[i] < ranges[i].1 {
                        cur[i] += 1;
                        continue 'outer;
                    }
                    cur[i] = ranges[i].0;
                }
                break;
            }
        }
        out.sort();
        out
    }

    /// Distance from `p` to the closed tile `t`.
    pub fn dist_to_tile(&self, p: &HPoint, t: &TileId) -> f64 {
        let (lo, hi) = self.tile_box(t);
        let u = p.to_halfspace();
        let d = self.dim;
        let h0 = u[d - 1];
        let mut lat = 0.0;
        for i in 0..d - 1 {
            let c = u[i].clamp(lo[i], hi[i]);
            lat += (c - u[i]) * (c - u[i]);
        }
        let h = (lat + h0 * h0).sqrt().clamp(lo[d - 1], hi[d - 1]);
        let e2 = lat + (h - h0) * (h - h0);
        2.0 * (e2.sqrt() / (2.0 * (h * h0).sqrt())).asinh()
    }

    /// Range of `<x, n>` over the closed tile.
    pub fn form_range(&self, t: &TileId, n: &[f64]) -> (f64, f64) {
        let (lo, hi) = self.tile_box(t);
        form_range_box(&lo, &hi, n)
    }

    /// Whether the tile meets the `delta`-neighborhood of the hyperplane.
    pub fn tile_meets_slab(&self, t: &TileId, h: &Hyperplane, delta: f64) -> bool {
        let (mn, mx) = self.form_range(t, &h.normal);
        let w = delta.sinh();
        mn <= w && mx >= -w
    }

    /// All tiles at distance `< r` from `center`, with their distances.
    pub fn tiles_within(&self, center: &HPoint, r: f64) -> Result<Vec<(TileId, f64)>> {
        let start = self.locate(center)?;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(t) = queue.pop_front() {
            let dt = self.dist_to_tile(center, &t);
            if dt >= r {
                continue;
            }
            out.push((t.clone(), dt));
            for nb in self.neighbors(&t) {
                if seen.insert(nb.clone()) {
                    queue.push_back(nb);
                }
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }
}

/// Closed boxes intersect in a set with positive extent in some direction.
fn boxes_share_face_portion(lo: &[f64], hi: &[f64], lo2: &[f64], hi2: &[f64]) -> bool {
    let mut positive = false;
    for i in 0..lo.len() {
        let scale = (hi[i] - lo[i]).min(hi2[i] - lo2[i]);
        let ov = hi[i].min(hi2[i]) - lo[i].max(lo2[i]);
        if ov < -FACE_TOL * scale {
            return false;
        }
        if ov > FACE_TOL * scale {
            positive = true;
        }
    }
    positive
}

/// Minimum and maximum of `<x, n>` over a half-space box.
fn form_range_box(lo: &[f64], hi: &[f64], n: &[f64]) -> (f64, f64) {
    // 2h<x,n> = A(|u|^2 + h^2) + 2 n.u - c, with A = n_d - n_0, c = n_0 + n_d
    let d = lo.len();
    let a = n[d] - n[0];
    let c = n[0] + n[d];
    let mut qmin = -c;
    let mut qmax = -c;
    for i in 0..d - 1 {
        let f = |u: f64| a * u * u + 2.0 * n[i + 1] * u;
        let (l, h) = (lo[i], hi[i]);
        let mut vals = vec![f(l), f(h)];
        if a != 0.0 {
            let v = -n[i + 1] / a;
            if v > l && v < h {
                vals.push(f(v));
            }
        }
        qmin += vals.iter().cloned().fold(f64::INFINITY, f64::min);
        qmax += vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    }
    let (hl, hh) = (lo[d - 1], hi[d - 1]);
    let phi = |k: f64, h: f64| (k + a * h * h) / (2.0 * h);
    let crit = |k: f64| -> Option<f64> {
        if a != 0.0 && k / a > 0.0 {
            let h = (k / a).sqrt();
            if h > hl && h < hh {
                return Some(h);
            }
        }
        None
    };
    let mut mn = phi(qmin, hl).min(phi(qmin, hh));
    if let Some(h) = crit(qmin) {
        mn = mn.min(phi(qmin, h));
    }
    let mut mx = phi(qmax, hl).max(phi(qmax, hh));
    if let Some(h) = crit(qmax) {
        mx = mx.max(phi(qmax, h));
    }
    (mn, mx)
}

/// Per-layer tile counts around an origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerCensus {
    pub tau: f64,
    /// `total[j-1]` = number of tiles at distance in `[(j-1)tau, j tau)`.
    pub total: Vec<usize>,
    /// `occupied[j-1]` = how many of those contain at least one point.
    pub occupied: Vec<usize>,
}

pub fn layer_census(spec: &SquareTilingSpec, origin: &HPoint, points: &[HPoint], j_max: usize) -> Result<LayerCensus> {
    let tau = spec.tau();
    let tiles = spec.tiles_within(origin, j_max as f64 * tau)?;
    let mut total = vec![0; j_max];
    let mut layer_of = BTreeMap::new();
    for (t, dt) in tiles {
        let j = ((dt / tau).floor() as usize).min(j_max - 1);
        total[j] += 1;
        layer_of.insert(t, j);
    }
    let mut occupied = vec![0; j_max];
    let mut hit = BTreeSet::new();
    for p in points {
        let t = spec.locate(p)?;
        if let Some(&j) = layer_of.get(&t) {
            if hit.insert(t) {
                occupied[j] += 1;
            }
        }
    }
    Ok(LayerCensus { tau, total, occupied })
}

/// Monte Carlo frequency with which the `nbhd`-neighborhood of a uniformly
/// random hyperplane through the origin meets a tile of layer `j`, averaged
/// over up to `per_layer` sampled tiles per layer. Entry `j-1` is `(j, freq)`.
pub fn hyperplane_hit_profile(
    spec: &SquareTilingSpec,
    j_max: usize,
    per_layer: usize,
    trials: usize,
    nbhd: f64,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let d = spec.dim;
    let tau = spec.tau();
    let o = HPoint::origin(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers: Vec<BTreeSet<TileId>> = vec![BTreeSet::new(); j_max];
    let mut attempts = 0;
    while layers.iter().any(|l| l.len() < per_layer) && attempts < 200 * per_layer * j_max {
        attempts += 1;
        let r = rng.random_range(0.0..j_max as f64 * tau);
        let dir = hypgeo::random_direction(d, &mut rng);
        let p = HPoint::from_polar(r, &dir)?;
        let t = spec.locate(&p)?;
        let j = (spec.dist_to_tile(&o, &t) / tau).floor() as usize;
        if j < j_max && layers[j].len() < per_layer {
            layers[j].insert(t);
        }
    }
    let boxes: Vec<Vec<(Vec<f64>, Vec<f64>)>> =
        layers.iter().map(|l| l.iter().map(|t| spec.tile_box(t)).collect()).collect();
    let mut hits = vec![0u64; j_max];
    let w = nbhd.sinh();
    for _ in 0..trials {
        let h = hypgeo::random_hyperplane_through(&o, &mut rng);
        for (j, bx) in boxes.iter().enumerate() {
            for (lo, hi) in bx {
                let (mn, mx) = form_range_box(lo, hi, &h.normal);
                if mn <= w && mx >= -w {
                    hits[j] += 1;
                }
            }
        }
    }
    Ok((0..j_max)
        .map(|j| {
            let denom = (trials * boxes[j].len().max(1)) as f64;
            (j + 1, hits[j] as f64 / denom)
        })
        .collect())
}

/// Constants of the regular tiling with Schlafli symbol {m, q}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularTilingSpec {
    pub delta: u32,
    pub gon: usize,
    pub meet: usize,
    pub side_len: f64,
    /// center to vertex
    pub ov: f64,
    /// half of a side
    pub vp: f64,
    /// center to edge midpoint
    pub po: f64,
    pub area: f64,
    pub perimeter: f64,
    pub sep_const: f64,
}

/// Regular tiling with `2^(delta+2)` sides per tile (or `gon_override`) and `q` tiles per vertex.
pub fn regular_tiling(delta: u32, q: usize, gon_override: Option<usize>) -> Result<RegularTilingSpec> {
    let m = match gon_override {
        Some(m) => m,
        None => {
            if delta > 40 {
                return Err(Error::InvalidArgument("delta too large".into()));
            }
            1usize << (delta + 2)
        }
    };
    if m < 3 || q < 3 || (m - 2) * (q - 2) <= 4 {
        return Err(Error::InvalidArgument(format!("{{{m},{q}}} is not a hyperbolic tiling")));
    }
    let (mf, qf) = (m as f64, q as f64);
    let ov = (1.0 / (PI / qf).tan() / (PI / mf).tan()).acosh();
    let vp = ((PI / mf).cos() / (PI / qf).sin()).acosh();
    let po = ((PI / qf).cos() / (PI / mf).sin()).acosh();
    let area = mf * 2.0 * (PI - (PI / 2.0 + PI / qf + PI / mf));
    Ok(RegularTilingSpec {
        delta,
        gon: m,
        meet: q,
        side_len: 2.0 * vp,
        ov,
        vp,
        po,
        area,
        perimeter: 2.0 * mf * vp,
        sep_const: 2.0 * vp * (1.0 - 1e-6),
    })
}

/// The {5,4} pentagon tiling.
pub fn pentagon_tiling() -> RegularTilingSpec {
    regular_tiling(0, 4, Some(5)).expect("{5,4} is hyperbolic")
}

/// Limit of area/perimeter of the {2^(delta+2),3} family.
pub fn regular_ratio_limit() -> f64 {
    (PI / 6.0) / (1.0 / (PI / 3.0).sin()).acosh()
}

/// Lazily generated regular tiling of H^2 with explicit coordinates.
///
/// Tile 0 is centered at the origin. Tiles are created on demand when a
/// neighbor is requested; tile `i` is the image of the base tile under
/// `iso(i)`, and edge `k` of every tile is shared with `neighbor(i, k)`.
#[derive(Clone, Debug)]
pub struct RegularTiling {
    spec: RegularTilingSpec,
    edge_refl: Vec<Isometry>,
    base_vertices: Vec<HPoint>,
    isos: Vec<Isometry>,
    centers: Vec<HPoint>,
    nbrs: Vec<Vec<Option<usize>>>,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

const CELL: f64 = 0.5;

fn cell_of(p: &HPoint) -> (i64, i64) {
    let x = p.spatial();
    ((x[0] / CELL).floor() as i64, (x[1] / CELL).floor() as i64)
}

impl RegularTiling {
    pub fn new(spec: RegularTilingSpec) -> Self {
        let m = spec.gon;
        let mf = m as f64;
        let edge_refl = (0..m)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / mf;
                let n = vec![spec.po.sinh(), spec.po.cosh() * th.cos(), spec.po.cosh() * th.sin()];
                let h = Hyperplane { normal: n, basepoint: HPoint::polar2(spec.po, th).unwrap() };
                Isometry::reflection(&h)
            })
            .collect();
        let base_vertices =
            (0..m).map(|j| HPoint::polar2(spec.ov, (2.0 * j as f64 - 1.0) * PI / mf).unwrap()).collect();
        let mut t = RegularTiling {
            spec,
            edge_refl,
            base_vertices,
            isos: Vec::new(),
            centers: Vec::new(),
            nbrs: Vec::new(),
            grid: HashMap::new(),
        };
        t.push_tile(Isometry::identity(2));
        t
    }

    pub fn spec(&self) -> &RegularTilingSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn push_tile(&mut self, iso: Isometry) -> usize {
        let c = iso.apply(&HPoint::origin(2)).expect("tile center within working radius");
        let id = self.centers.len();
        self.grid.entry(cell_of(&c)).or_default().push(id);
        self.centers.push(c);
        self.isos.push(iso);
        self.nbrs.push(vec![None; self.spec.gon]);
        id
    }

    fn find_near(&self, p: &HPoint, tol: f64) -> Option<usize> {
        let (cx, cy) = cell_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.grid.get(&(cx + dx, cy + dy)) {
                    for &i in v {
                        if dist(&self.centers[i], p) < tol {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    /// Tile across edge `k` of tile `t`.
    pub fn neighbor(&mut self, t: usize, k: usize) -> usize {
        if let Some(n) = self.nbrs[t][k] {
            return n;
        }
        let iso = self.isos[t].compose(&self.edge_refl[k]);
        let c = iso.apply(&HPoint::origin(2)).expect("tile center within working radius");
        let n = match self.find_near(&c, self.spec.po) {
            Some(n) => n,
            None => self.push_tile(iso),
        };
        self.nbrs[t][k] = Some(n);
        // the shared edge is edge k of both tiles only when created here
        if let Some(j) = (0..self.spec.gon).find(|&j| self.nbrs[n][j].is_none() && self.shares_edge(n, j, t)) {
            self.nbrs[n][j] = Some(t);
        }
        n
    }

    fn shares_edge(&self, n: usize, j: usize, t: usize) -> bool {
        // edge j of n is shared with t iff reflecting n's center in it gives t's center
        let iso = self.isos[n].compose(&self.edge_refl[j]);
        let c = iso.apply(&HPoint::origin(2)).expect("in range");
        dist(&c, &self.centers[t]) < self.spec.po
    }

    pub fn neighbors(&mut self, t: usize) -> Vec<usize> {
        (0..self.spec.gon).map(|k| self.neighbor(t, k)).collect()
    }

    pub fn center(&self, t: usize) -> &HPoint {
        &self.centers[t]
    }

    pub fn iso(&self, t: usize) -> &Isometry {
        &self.isos[t]
    }

    /// Vertices of tile `t` in boundary order; edge `k` joins vertices `k` and `k+1`.
    pub fn vertices(&self, t: usize) -> Vec<HPoint> {
        self.base_vertices.iter().map(|v| self.isos[t].apply(v).expect("in range")).collect()
    }

    /// Tile containing `p`, by greedy descent on center distance starting from `hint`.
    pub fn locate_from(&mut self, p: &HPoint, hint: usize) -> usize {
        let mut cur = hint;
        let mut dc = dist(p, &self.centers[cur]);
        loop {
            let mut best = cur;
            let mut bd = dc;
            for k in 0..self.spec.gon {
                let n = self.neighbor(cur, k);
                let dn = dist(p, &self.centers[n]);
                if dn < bd - 1e-12 {
                    best = n;
                    bd = dn;
                }
            }
            if best == cur {
                return cur;
            }
            cur = best;
            dc = bd;
        }
    }

    pub fn locate(&mut self, p: &HPoint) -> usize {
        self.locate_from(p, 0)
    }

    /// Tiles within `rings` edge-steps of tile 0, in breadth-first order.
    pub fn ring_patch(&mut self, rings: usize) -> Vec<usize> {
        let mut depth = HashMap::new();
        depth.insert(0usize, 0usize);
        let mut order = vec![0];
        let mut i = 0;
        while i < order.len() {
            let t = order[i];
            i += 1;
            let dt = depth[&t];
            if dt == rings {
                continue;
            }
            for n in self.neighbors(t) {
                if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(n) {
                    e.insert(dt + 1);
                    order.push(n);
                }
            }
        }
        order
    }

    /// Random connected patch of `size` tiles grown from tile 0. Frontier
    /// tiles join in order of their center distance from the origin plus a
    /// uniform offset in `[0, 2 ov)`, so patches are compact with ragged
    /// boundaries.
    pub fn random_patch<R: Rng + ?Sized>(&mut self, size: usize, rng: &mut R) -> Vec<usize> {
        let o = HPoint::origin(2);
        let jitter = 2.0 * self.spec.ov;
        let mut seen = BTreeSet::new();
        let mut heap = BinaryHeap::new();
        seen.insert(0usize);
        heap.push(Reverse((0u64, 0usize)));
        let mut order = Vec::with_capacity(size);
        while order.len() < size {
            let Some(Reverse((_, t))) = heap.pop() else { break };
            order.push(t);
            for n in self.neighbors(t) {
                if seen.insert(n) {
                    let key = dist(&o, &self.centers[n]) + rng.random_range(0.0..jitter);
                    heap.push(Reverse((key.to_bits(), n)));
                }
            }
        }
        order
    }
}
