//! Lower-bound constructions: (3,3)-SAT to Grid Tiling, Grid Tiling
//! instances and brute force, and the embedding of Grid Tiling with
//! inequalities into independent set on the {5,4} pentagon tiling.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hypgeo::{dist, HPoint, Isometry};
use crate::nubg::{NubgInstance, Partition, PartitionKind};
use crate::tiling::{pentagon_tiling, RegularTiling, RegularTilingSpec};

pub const GT_BRUTE_MAX_K: usize = 6;
pub const GT_BRUTE_BUDGET: u64 = 50_000_000;
pub const SAT_BRUTE_MAX_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GtMode {
    Eq,
    Leq,
}

/// A k x k Grid Tiling instance over the alphabet `[n] x [n]` (1-based).
///
/// `sets[(a-1)*k + (b-1)]` is `W_{a,b}`. Cells `(a,b)` and `(a+1,b)` are
/// constrained on the first coordinate, `(a,b)` and `(a,b+1)` on the second.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GtJson", into = "GtJson")]
pub struct GridTilingInstance {
    pub k: usize,
    pub n: u32,
    pub mode: GtMode,
    pub sets: Vec<Vec<(u32, u32)>>,
}

#[derive(Serialize, Deserialize)]
struct GtJson {
    k: usize,
    #[serde(rename = "N")]
    n: u32,
    mode: GtMode,
    sets: Vec<(usize, usize, Vec<(u32, u32)>)>,
}

impl From<GridTilingInstance> for GtJson {
    fn from(g: GridTilingInstance) -> Self {
        let k = g.k;
        let sets = g.sets.into_iter().enumerate().map(|(i, w)| (i / k + 1, i % k + 1, w)).collect();
        GtJson { k, n: g.n, mode: g.mode, sets }
    }
}

impl TryFrom<GtJson> for GridTilingInstance {
    type Error = Error;

    fn try_from(j: GtJson) -> Result<Self> {
        let mut sets = vec![None; j.k * j.k];
        for (a, b, w) in j.sets {
            if a == 0 || b == 0 || a > j.k || b > j.k {
                return Err(Error::Invalid(format!("cell ({a},{b}) outside the {0}x{0} grid", j.k)));
            }
            if sets[(a - 1) * j.k + b - 1].replace(w).is_some() {
                return Err(Error::Invalid(format!("cell ({a},{b}) given twice")));
            }
        }
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::Invalid(format!("cell ({},{}) missing", i / j.k + 1, i % j.k + 1))))
            .collect::<Result<Vec<_>>>()?;
        GridTilingInstance::new(j.k, j.n, j.mode, sets)
    }
}

impl GridTilingInstance {
    pub fn new(k: usize, n: u32, mode: GtMode, mut sets: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidArgument("k and N must be positive".into()));
        }
        if sets.len() != k * k {
            return Err(Error::InvalidArgument(format!("expected {} sets, got {}", k * k, sets.len())));
        }
        for (i, w) in sets.iter_mut().enumerate() {
            w.sort_unstable();
            w.dedup();
            if w.is_empty() {
                return Err(Error::Invalid(format!("W({},{}) is empty", i / k + 1, i % k + 1)));
            }
            if let Some(&(x, y)) = w.iter().find(|&&(x, y)| x == 0 || y == 0 || x > n || y > n) {
                return Err(Error::Invalid(format!("pair ({x},{y}) outside [{n}]x[{n}]")));
            }
        }
        Ok(GridTilingInstance { k, n, mode, sets })
    }

    /// `W_{a,b}` with 1-based indices.
    pub fn set(&self, a: usize, b: usize) -> &[(u32, u32)] {
        &self.sets[(a - 1) * self.k + b - 1]
    }

    fn related(&self, lo: u32, hi: u32) -> bool {
        match self.mode {
            GtMode::Eq => lo == hi,
            GtMode::Leq => lo <= hi,
        }
    }

    /// Whether `sol` (row-major, one pair per cell) solves the instance.
    pub fn is_solution(&self, sol: &[(u32, u32)]) -> bool {
        let k = self.k;
        if sol.len() != k * k {
            return false;
        }
        (0..k * k).all(|i| {
            let (a, b) = (i / k, i % k);
            self.sets[i].binary_search(&sol[i]).is_ok()
                && (a + 1 == k || self.related(sol[i].0, sol[i + k].0))
                && (b + 1 == k || self.related(sol[i].1, sol[i + 1].1))
        })
    }

    pub fn total_pairs(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }
}

/// Random instance where each pair enters each set with probability `density`
/// (every set receives at least one pair).
pub fn random_gt_instance<R: Rng + ?Sized>(
    k: usize,
    n: u32,
    mode: GtMode,
    density: f64,
    rng: &mut R,
) -> Result<GridTilingInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density {density} outside [0,1]")));
    }
    let sets = (0..k * k)
        .map(|_| {
            let mut w: Vec<(u32, u32)> =
                (1..=n).flat_map(|x| (1..=n).map(move |y| (x, y))).filter(|_| rng.random_bool(density)).collect();
            if w.is_empty() {
                w.push((rng.random_range(1..=n), rng.random_range(1..=n)));
            }
            w
        })
        .collect();
    GridTilingInstance::new(k, n, mode, sets)
}

/// Exhaustive backtracking in row-major order. Returns a solution or `None`.
pub fn gt_brute(inst: &GridTilingInstance) -> Result<Option<Vec<(u32, u32)>>> {
    gt_brute_with_budget(inst, GT_BRUTE_BUDGET)
}

pub fn gt_brute_with_budget(inst: &GridTilingInstance, budget: u64) -> Result<Option<Vec<(u32, u32)>>> {
    if inst.k > GT_BRUTE_MAX_K {
        return Err(Error::InvalidArgument(format!("gt_brute supports k <= {GT_BRUTE_MAX_K}, got {}", inst.k)));
    }
    let mut sol = Vec::with_capacity(inst.k * inst.k);
    let mut nodes = 0u64;
    if gt_search(inst, &mut sol, &mut nodes, budget)? {
        Ok(Some(sol))
    } else {
        Ok(None)
    }
}

fn gt_search(inst: &GridTilingInstance, sol: &mut Vec<(u32, u32)>, nodes: &mut u64, budget: u64) -> Result<bool> {
    let k = inst.k;
    let i = sol.len();
    if i == k * k {
        return Ok(true);
    }
    let (a, b) = (i / k, i % k);
    for &(x, y) in &inst.sets[i] {
        if a > 0 && !inst.related(sol[i - k].0, x) || b > 0 && !inst.related(sol[i - 1].1, y) {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::SearchLimit(format!("grid tiling search exceeded {budget} nodes")));
        }
        sol.push((x, y));
        if gt_search(inst, sol, nodes, budget)? {
            return Ok(true);
        }
        sol.pop();
    }
    Ok(false)
}

/// CNF formula over variables `1..=num_vars`; literals are signed variable ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::Invalid(format!("literal {l} outside 1..={num_vars}")));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn parse_dimacs(s: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            if line.starts_with('p') {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[1] != "cnf" {
                    return Err(perr("expected `p cnf <vars> <clauses>`".into()));
                }
                let v = f[2].parse().map_err(|_| perr(format!("bad variable count {}", f[2])))?;
                let c = f[3].parse().map_err(|_| perr(format!("bad clause count {}", f[3])))?;
                header = Some((v, c));
                continue;
            }
            let (nv, _) = header.ok_or_else(|| perr("clause before header".into()))?;
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| perr(format!("bad literal {tok}")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else if l.unsigned_abs() as usize > nv {
                    return Err(perr(format!("literal {l} exceeds {nv} variables")));
                } else {
                    cur.push(l);
                }
            }
        }
        let (nv, nc) = header.ok_or_else(|| Error::Parse { line: 0, msg: "missing header".into() })?;
        if !cur.is_empty() {
            clauses.push(cur);
        }
        if clauses.len() != nc {
            return Err(Error::Parse { line: 0, msg: format!("header says {nc} clauses, found {}", clauses.len()) });
        }
        CnfFormula::new(nv, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }

    /// `assign[v-1]` is the value of variable `v`.
    pub fn evaluate(&self, assign: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assign[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in &self.clauses {
            for l in c {
                occ[l.unsigned_abs() as usize - 1] += 1;
            }
        }
        occ
    }

    /// At most three literals per clause and three occurrences per variable.
    pub fn is_33(&self) -> bool {
        self.clauses.iter().all(|c| c.len() <= 3) && self.occurrences().iter().all(|&o| o <= 3)
    }
}

/// Equisatisfiable formula where every variable occurs at most three
/// times: a variable with more occurrences is replaced by one copy per
/// occurrence, and the copies are forced equal by a cycle of implications.
pub fn bound_occurrences(phi: &CnfFormula) -> CnfFormula {
    let occ = phi.occurrences();
    let mut next = phi.num_vars;
    let mut copies: Vec<Vec<i32>> = vec![Vec::new(); phi.num_vars];
    for (v, &o) in occ.iter().enumerate() {
        if o > 3 {
            copies[v].push(v as i32 + 1);
            for _ in 1..o {
                next += 1;
                copies[v].push(next as i32);
            }
        }
    }
    let mut seen = vec![0usize; phi.num_vars];
    let mut clauses: Vec<Vec<i32>> = phi
        .clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| {
                    let v = l.unsigned_abs() as usize - 1;
                    if copies[v].is_empty() {
                        return l;
                    }
                    let x = copies[v][seen[v]];
                    seen[v] += 1;
                    if l > 0 {
                        x
                    } else {
                        -x
                    }
                })
                .collect()
        })
        .collect();
    for cyc in copies.iter().filter(|c| !c.is_empty()) {
        for i in 0..cyc.len() {
            clauses.push(vec![-cyc[i], cyc[(i + 1) % cyc.len()]]);
        }
    }
    CnfFormula { num_vars: next, clauses }
}

pub fn brute_sat(phi: &CnfFormula) -> Result<Option<Vec<bool>>> {
    if phi.num_vars > SAT_BRUTE_MAX_VARS {
        return Err(Error::InvalidArgument(format!("brute_sat supports <= {SAT_BRUTE_MAX_VARS} variables")));
    }
    let mut assign = vec![false; phi.num_vars];
    for mask in 0u64..1 << phi.num_vars {
        for (v, a) in assign.iter_mut().enumerate() {
            *a = mask >> v & 1 == 1;
        }
        if phi.evaluate(&assign) {
            return Ok(Some(assign));
        }
    }
    Ok(None)
}

/// Random (3,3)-CNF over `num_vars` variables; a clause has width 1 with
/// probability `unit`, width 3 with probability `wide` and width 2 otherwise.
pub fn random_33_cnf<R: Rng + ?Sized>(
    num_vars: usize,
    num_clauses: usize,
    unit: f64,
    wide: f64,
    rng: &mut R,
) -> CnfFormula {
    let mut occ = vec![0usize; num_vars];
    let mut clauses = Vec::new();
    for _ in 0..num_clauses {
        let free: Vec<usize> = (0..num_vars).filter(|&v| occ[v] < 3).collect();
        if free.is_empty() {
            break;
        }
        let u: f64 = rng.random();
        let w = if u < unit {
            1
        } else if u < unit + wide {
            3
        } else {
            2
        }
        .min(free.len());
        let mut pick = BTreeSet::new();
        while pick.len() < w {
            pick.insert(free[rng.random_range(0..free.len())]);
        }
        let c = pick
            .into_iter()
            .map(|v| {
                occ[v] += 1;
                let l = v as i32 + 1;
                if rng.random_bool(0.5) {
                    l
                } else {
                    -l
                }
            })
            .collect();
        clauses.push(c);
    }
    CnfFormula { num_vars, clauses }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Simplified {
    Decided(bool),
    Reduced(CnfFormula),
}

/// Unit propagation and pure-literal elimination to a fixpoint.
///
/// Returns the simplified formula and the forced values. A reduced formula
/// has clauses of width at least 2 and every variable occurs in both signs.
pub fn preprocess(phi: &CnfFormula) -> (Simplified, Vec<Option<bool>>) {
    let mut fixed: Vec<Option<bool>> = vec![None; phi.num_vars];
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for c in &phi.clauses {
        let mut c = c.clone();
        c.sort_unstable_by_key(|l| (l.unsigned_abs(), *l));
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            continue;
        }
        clauses.push(c);
    }
    loop {
        if clauses.iter().any(Vec::is_empty) {
            return (Simplified::Decided(false), fixed);
        }
        let forced = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]).or_else(|| {
            let mut sign = vec![0u8; phi.num_vars];
            for l in clauses.iter().flatten() {
                sign[l.unsigned_abs() as usize - 1] |= if *l > 0 { 1 } else { 2 };
            }
            sign.iter().enumerate().find(|&(_, &s)| s == 1 || s == 2).map(|(v, &s)| {
                let l = v as i32 + 1;
                if s == 1 {
                    l
                } else {
                    -l
                }
            })
        });
        let Some(l) = forced else { break };
        fixed[l.unsigned_abs() as usize - 1] = Some(l > 0);
        clauses.retain(|c| !c.contains(&l));
        for c in &mut clauses {
            c.retain(|&m| m != -l);
        }
    }
    if clauses.is_empty() {
        return (Simplified::Decided(true), fixed);
    }
    (Simplified::Reduced(CnfFormula { num_vars: phi.num_vars, clauses }), fixed)
}

/// A Grid Tiling instance built from a formula, with the data needed to
/// read an assignment back from a solution.
#[derive(Clone, Debug)]
pub struct SatReduction {
    pub instance: GridTilingInstance,
    /// Variables of each clause group, in bit order of the assignment index.
    pub group_vars: Vec<Vec<usize>>,
    pub fixed: Vec<Option<bool>>,
    pub num_vars: usize,
}

impl SatReduction {
    /// Assignment encoded by a solution. Cell `(a,b)` holds `(x,y)` where `y`
    /// indexes an assignment of group `a` and `x` one of group `b`.
    pub fn assignment(&self, sol: &[(u32, u32)]) -> Vec<bool> {
        let mut out: Vec<bool> = self.fixed.iter().map(|f| f.unwrap_or(false)).collect();
        let k = self.instance.k;
        for (a, vars) in self.group_vars.iter().enumerate() {
            let y = sol[a * k].1 - 1;
            for (i, &v) in vars.iter().enumerate() {
                out[v] = y >> i & 1 == 1;
            }
        }
        out
    }
}

fn trivial_yes() -> GridTilingInstance {
    GridTilingInstance { k: 1, n: 1, mode: GtMode::Eq, sets: vec![vec![(1, 1)]] }
}

fn trivial_no() -> GridTilingInstance {
    GridTilingInstance {
        k: 2,
        n: 2,
        mode: GtMode::Eq,
        sets: vec![vec![(1, 1)], vec![(1, 1)], vec![(2, 2)], vec![(2, 2)]],
    }
}

pub fn sat_to_gridtiling(phi: &CnfFormula) -> Result<GridTilingInstance> {
    Ok(sat_reduction(phi)?.instance)
}

/// Clauses are grouped into `ceil(sqrt m)` groups after preprocessing; a
/// clause wider than three literals is rejected. Variable occurrences are
/// not bounded, the reduction is exact for any formula.
pub fn sat_reduction(phi: &CnfFormula) -> Result<SatReduction> {
    let (simp, fixed) = preprocess(phi);
    let red = match simp {
        Simplified::Decided(sat) => {
            return Ok(SatReduction {
                instance: if sat { trivial_yes() } else { trivial_no() },
                group_vars: if sat { vec![Vec::new()] } else { Vec::new() },
                fixed,
                num_vars: phi.num_vars,
            })
        }
        Simplified::Reduced(f) => f,
    };
    if let Some(c) = red.clauses.iter().find(|c| c.len() > 3) {
        return Err(Error::Invalid(format!("clause {c:?} has more than three literals")));
    }
    let m = red.clauses.len();
    let k = (m as f64).sqrt().ceil() as usize;
    let per = m.div_ceil(k);
    let groups: Vec<&[Vec<i32>]> = (0..k).map(|a| &red.clauses[(a * per).min(m)..((a + 1) * per).min(m)]).collect();
    let group_vars: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| {
            g.iter().flatten().map(|l| l.unsigned_abs() as usize - 1).collect::<BTreeSet<_>>().into_iter().collect()
        })
        .collect();
    if group_vars.iter().any(|v| v.len() > 31) {
        return Err(Error::InvalidArgument("clause group has more than 31 variables".into()));
    }
    let n = group_vars.iter().map(|v| 1u32 << v.len()).max().unwrap_or(1);
    // value of each variable under assignment index idx of a group, or None
    let value = |vars: &[usize], idx: u32, v: usize| vars.iter().position(|&u| u == v).map(|i| idx >> i & 1 == 1);
    let sat_group = |a: usize, idx: u32, b: usize, idy: u32| {
        let val = |v: usize| value(&group_vars[a], idx, v).or_else(|| value(&group_vars[b], idy, v)).unwrap_or(false);
        groups[a]
            .iter()
            .chain(groups[b].iter())
            .all(|c| c.iter().any(|&l| val(l.unsigned_abs() as usize - 1) == (l > 0)))
    };
    let mut sets = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            let (na, nb) = (1u32 << group_vars[a].len(), 1u32 << group_vars[b].len());
            let mut w = Vec::new();
            for x in 0..nb {
                for y in 0..na {
                    let consistent = group_vars[a]
                        .iter()
                        .all(|&v| value(&group_vars[b], x, v).is_none_or(|bx| Some(bx) == value(&group_vars[a], y, v)));
                    if consistent && sat_group(a, y, b, x) {
                        w.push((x + 1, y + 1));
                    }
                }
            }
            if w.is_empty() {
                return Ok(SatReduction {
                    instance: trivial_no(),
                    group_vars: Vec::new(),
                    fixed,
                    num_vars: phi.num_vars,
                });
            }
            sets.push(w);
        }
    }
    Ok(SatReduction {
        instance: GridTilingInstance::new(k, n, GtMode::Eq, sets)?,
        group_vars,
        fixed,
        num_vars: phi.num_vars,
    })
}

/// Largest vertex-to-vertex distance of a tile.
pub fn tile_diameter(spec: &RegularTilingSpec) -> f64 {
    let m = spec.gon as f64;
    let ang = 2.0 * PI * (spec.gon / 2) as f64 / m;
    let (c, s) = (spec.ov.cosh(), spec.ov.sinh());
    (c * c - s * s * ang.cos()).acosh()
}

/// `asinh(sinh(4 delta) n)`: radius at which neighboring half-lines `2 pi / n`
/// apart are more than `8 delta` apart.
pub fn separation_radius(delta: f64, n_param: f64) -> f64 {
    ((4.0 * delta).sinh() * n_param).asinh()
}

/// Distance between the starting points at radius `r0` of two half-lines
/// with angle `2 pi / n` between them, measured on the hyperboloid.
pub fn halfline_separation(r0: f64, n_param: f64) -> Result<f64> {
    let p = HPoint::polar2(r0, 0.0)?;
    let q = HPoint::polar2(r0, 2.0 * PI / n_param)?;
    Ok(dist(&p, &q))
}

pub fn halfline_separation_formula(r0: f64, n_param: f64) -> f64 {
    2.0 * ((PI / n_param).sin() * r0.sinh()).asinh()
}

/// Fermi coordinates around the geodesic through the origin along the
/// first axis: move `s` along it, then `t` perpendicular to it.
pub fn fermi_point(s: f64, t: f64) -> Result<HPoint> {
    HPoint::new(vec![t.cosh() * s.cosh(), t.cosh() * s.sinh(), t.sinh()])
}

/// Inverse of [`fermi_point`].
pub fn fermi_coords(p: &HPoint) -> (f64, f64) {
    let y = p.coords();
    let t = y[2].asinh();
    ((y[1] / t.cosh()).asinh(), t)
}

/// Placement of the grid points: row `a` runs along the equidistant curve
/// `t = t0 + (a - (k+1)/2) dr` and column `b` along the perpendicular
/// geodesic `s = s0 + (b - (k+1)/2) ds`; `f(a,b)` is the vertex nearest to
/// that point on the tile containing it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub dr: f64,
    pub ds: f64,
    pub s0: f64,
    pub t0: f64,
}

impl GridLayout {
    pub fn t(&self, k: usize, a: usize) -> f64 {
        self.t0 + (a as f64 - (k as f64 + 1.0) / 2.0) * self.dr
    }

    pub fn s(&self, k: usize, b: usize) -> f64 {
        self.s0 + (b as f64 - (k as f64 + 1.0) / 2.0) * self.ds
    }
}

impl Default for GridLayout {
    fn default() -> Self {
        GridLayout { dr: 3.0, ds: 3.0, s0: 0.07, t0: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPath {
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// `(a,b) -> (a+1,b)` when true, `(a,b) -> (a,b+1)` otherwise.
    pub radial: bool,
    /// Vertices of the tiling graph from `f(from)` to `f(to)`.
    pub vertices: Vec<usize>,
}

impl CanonicalPath {
    pub fn interior(&self) -> &[usize] {
        &self.vertices[1..self.vertices.len() - 1]
    }
}

/// A subdivision of the k x k grid inside the vertex graph of the {5,4} tiling.
#[derive(Clone, Debug)]
pub struct GridEmbedding {
    pub k: usize,
    pub n_param: f64,
    /// Tile diameter.
    pub delta: f64,
    /// Reference radius `asinh(sinh(4 delta) n)` and angle `2 pi / n`.
    pub r0: f64,
    pub beta: f64,
    /// Layout actually used, after jitter.
    pub layout: GridLayout,
    pub spec: RegularTilingSpec,
    /// Vertex positions and edges of the tiling graph on the generated patch.
    pub positions: Vec<HPoint>,
    pub gamma: Graph,
    /// `f(a,b)` at index `(a-1)*k + (b-1)`.
    pub grid_vertices: Vec<usize>,
    /// Tile hosting each grid point.
    pub grid_tiles: Vec<usize>,
    pub paths: Vec<CanonicalPath>,
}

impl GridEmbedding {
    pub fn f(&self, a: usize, b: usize) -> usize {
        self.grid_vertices[(a - 1) * self.k + b - 1]
    }

    /// Grid vertices followed by path interiors in path order.
    pub fn subdivision_vertices(&self) -> Vec<usize> {
        let mut v = self.grid_vertices.clone();
        for p in &self.paths {
            v.extend_from_slice(p.interior());
        }
        v
    }

    /// Checks that the paths form a subdivision of the grid: correct
    /// endpoints, edges of the tiling graph, and pairwise disjoint interiors
    /// avoiding the grid vertices.
    pub fn verify(&self) -> Result<()> {
        let k = self.k;
        let mut seen = BTreeSet::new();
        for &g in &self.grid_vertices {
            if !seen.insert(g) {
                return Err(Error::Invalid(format!("grid vertex {g} used twice")));
            }
        }
        let tiles: BTreeSet<usize> = self.grid_tiles.iter().copied().collect();
        if tiles.len() != k * k {
            return Err(Error::Invalid("two grid points share a tile".into()));
        }
        let expected = 2 * k * (k - 1);
        if self.paths.len() != expected {
            return Err(Error::Invalid(format!("{} paths, expected {expected}", self.paths.len())));
        }
        for p in &self.paths {
            let ((a, b), (c, d)) = (p.from, p.to);
            let ok_pair = if p.radial { c == a + 1 && d == b } else { c == a && d == b + 1 };
            if !ok_pair || c > k || d > k {
                return Err(Error::Invalid(format!("path {:?} -> {:?} is not a grid edge", p.from, p.to)));
            }
            if p.vertices.first() != Some(&self.f(a, b)) || p.vertices.last() != Some(&self.f(c, d)) {
                return Err(Error::Invalid(format!("path {:?} -> {:?} has wrong endpoints", p.from, p.to)));
            }
            if p.vertices.windows(2).any(|w| !self.gamma.has_edge(w[0], w[1])) {
                return Err(Error::Invalid(format!("path {:?} -> {:?} leaves the tiling graph", p.from, p.to)));
            }
            for &v in p.interior() {
                if !seen.insert(v) {
                    return Err(Error::Invalid(format!("vertex {v} shared by two paths")));
                }
            }
        }
        Ok(())
    }
}

pub fn build_grid_embedding(n_param: f64, k: usize) -> Result<GridEmbedding> {
    build_grid_embedding_with(n_param, k, GridLayout::default())
}

const OUT: usize = 0;
const PLUS: usize = 1;
const IN: usize = 2;
const MINUS: usize = 3;
const JITTER_TRIES: usize = 40;

fn angle_of(p: &HPoint) -> f64 {
    let x = p.spatial();
    x[1].atan2(x[0])
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Tile patch and vertex graph covering the grid region of `layout`.
struct Canvas {
    tiling: RegularTiling,
    in_patch: BTreeSet<usize>,
    positions: Vec<HPoint>,
    gamma: Graph,
    index: VertexIndex,
    fermi: Vec<(f64, f64)>,
}

pub fn build_grid_embedding_with(n_param: f64, k: usize, layout: GridLayout) -> Result<GridEmbedding> {
    if k == 0 {
        return Err(Error::InvalidArgument("grid side must be positive".into()));
    }
    if !(n_param > 2.0) {
        return Err(Error::InvalidArgument(format!("n must exceed 2, got {n_param}")));
    }
    if !(layout.dr > 0.0 && layout.ds > 0.0) {
        return Err(Error::InvalidArgument("layout spacings must be positive".into()));
    }
    let spec = pentagon_tiling();
    let delta = tile_diameter(&spec);
    let r0 = separation_radius(delta, n_param);
    let beta = 2.0 * PI / n_param;
    let t_max = layout.t(k, k).abs().max(layout.t(k, 1).abs()) + layout.dr;
    let s_max = (layout.s(k, k).abs().max(layout.s(k, 1).abs()) + layout.ds) * (1.0 + 1e-3 * JITTER_TRIES as f64);
    if (t_max.cosh() * s_max.cosh()).acosh() > crate::hypgeo::MAX_RADIUS - 8.0 {
        return Err(Error::OutOfRange((t_max.cosh() * s_max.cosh()).acosh()));
    }
    let mut tiling = RegularTiling::new(spec.clone());
    let keep = |c: &HPoint| {
        let (s, t) = fermi_coords(c);
        t.abs() <= t_max && s.abs() <= s_max
    };
    let mut patch = vec![0usize];
    let mut in_patch = BTreeSet::from([0usize]);
    let mut i = 0;
    while i < patch.len() {
        let t = patch[i];
        i += 1;
        for n in tiling.neighbors(t) {
            if !in_patch.contains(&n) && keep(tiling.center(n)) {
                in_patch.insert(n);
                patch.push(n);
            }
        }
    }
    let (positions, gamma) = vertex_graph(&tiling, &patch);
    let index = VertexIndex::new(&positions);
    let fermi = positions.iter().map(fermi_coords).collect();
    let mut canvas = Canvas { tiling, in_patch, positions, gamma, index, fermi };
    let mut last = Error::Invalid("no layout attempt".into());
    for j in 0..JITTER_TRIES {
        let lay = GridLayout { ds: layout.ds * (1.0 + 1e-3 * j as f64), ..layout };
        match embed_attempt(&mut canvas, k, lay) {
            Ok((grid_vertices, grid_tiles, paths)) => {
                let emb = GridEmbedding {
                    k,
                    n_param,
                    delta,
                    r0,
                    beta,
                    layout: lay,
                    spec,
                    positions: canvas.positions,
                    gamma: canvas.gamma,
                    grid_vertices,
                    grid_tiles,
                    paths,
                };
                emb.verify()?;
                return Ok(emb);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

type Attempt = (Vec<usize>, Vec<usize>, Vec<CanonicalPath>);

fn embed_attempt(cv: &mut Canvas, k: usize, lay: GridLayout) -> Result<Attempt> {
    let mut grid_vertices = Vec::with_capacity(k * k);
    let mut grid_tiles = Vec::with_capacity(k * k);
    for a in 1..=k {
        for b in 1..=k {
            let p = fermi_point(lay.s(k, b), lay.t(k, a))?;
            let t = cv.tiling.locate(&p);
            let dt = dist(&p, cv.tiling.center(t));
            let second =
                cv.tiling.neighbors(t).iter().map(|&n| dist(&p, cv.tiling.center(n))).fold(f64::INFINITY, f64::min);
            if second - dt < 1e-6 {
                return Err(Error::Invalid(format!("grid point ({a},{b}) lies on a tile boundary")));
            }
            if !cv.in_patch.contains(&t) {
                return Err(Error::Invalid(format!("grid point ({a},{b}) outside the patch")));
            }
            let v = cv
                .tiling
                .vertices(t)
                .iter()
                .filter_map(|q| cv.index.find(q, &cv.positions))
                .min_by(|&u, &w| dist(&cv.positions[u], &p).total_cmp(&dist(&cv.positions[w], &p)))
                .ok_or_else(|| Error::Invalid("tile vertex missing from the patch".into()))?;
            grid_vertices.push(v);
            grid_tiles.push(t);
        }
    }
    if grid_tiles.iter().collect::<BTreeSet<_>>().len() != k * k {
        return Err(Error::Invalid("two grid points fall in the same tile; increase the layout spacing".into()));
    }
    if grid_vertices.iter().collect::<BTreeSet<_>>().len() != k * k {
        return Err(Error::Invalid("two grid points share a tiling vertex".into()));
    }

    // ports: the neighbor of f(a,b) used toward each grid direction
    let gamma = &cv.gamma;
    let mut ports = vec![[usize::MAX; 4]; k * k];
    for (gi, &v) in grid_vertices.iter().enumerate() {
        let nb = gamma.neighbors(v);
        if nb.len() != 4 {
            return Err(Error::Invalid(format!("grid vertex {v} has degree {} in the patch", nb.len())));
        }
        let inv = Isometry::boost_to(&cv.positions[v]).inverse();
        let (s, t) = cv.fermi[v];
        let toward = |q: HPoint| angle_of(&inv.apply(&q).expect("in range"));
        let eps = 1e-4;
        let mut target = [0.0; 4];
        target[OUT] = toward(fermi_point(s, t + eps)?);
        target[IN] = toward(fermi_point(s, t - eps)?);
        target[PLUS] = toward(fermi_point(s + eps, t)?);
        target[MINUS] = toward(fermi_point(s - eps, t)?);
        let mut dirs: Vec<usize> = (0..4).collect();
        dirs.sort_by(|&x, &y| target[x].total_cmp(&target[y]));
        let mut ang: Vec<(f64, usize)> = nb.iter().map(|&u| (toward(cv.positions[u].clone()), u)).collect();
        ang.sort_by(|x, y| x.0.total_cmp(&y.0));
        let cost = |r: usize| (0..4).map(|i| wrap(ang[i].0 - target[dirs[(r + i) % 4]]).abs()).sum::<f64>();
        let best = (0..4).min_by(|&x, &y| cost(x).total_cmp(&cost(y))).expect("four rotations");
        for (i, &(_, u)) in ang.iter().enumerate() {
            ports[gi][dirs[(best + i) % 4]] = u;
        }
    }
    let needed = |a: usize, b: usize, d: usize| match d {
        OUT => a < k,
        IN => a > 1,
        PLUS => b < k,
        _ => b > 1,
    };
    let n = cv.positions.len();
    let mut blocked = vec![false; n];
    for &g in &grid_vertices {
        blocked[g] = true;
    }
    let mut reserved = vec![false; n];
    let mut owner: HashMap<usize, (usize, usize, usize)> = HashMap::new();
    for a in 1..=k {
        for b in 1..=k {
            for d in 0..4 {
                if !needed(a, b, d) {
                    continue;
                }
                let p = ports[(a - 1) * k + b - 1][d];
                if blocked[p] {
                    return Err(Error::Invalid(format!("port of grid point ({a},{b}) is another grid vertex")));
                }
                reserved[p] = true;
                if let Some(o) = owner.insert(p, (a, b, d)) {
                    let partner = match d {
                        OUT => (a + 1, b, IN),
                        IN => (a - 1, b, OUT),
                        PLUS => (a, b + 1, MINUS),
                        _ => (a, b - 1, PLUS),
                    };
                    if o != partner {
                        return Err(Error::Invalid(format!(
                            "grid points ({a},{b}) and ({},{}) share a port",
                            o.0, o.1
                        )));
                    }
                }
            }
        }
    }

    let w_ring = 0.45 * lay.dr;
    let w_line = (0.45 * lay.ds).sinh();
    let mut paths = Vec::with_capacity(2 * k * (k - 1));
    let mut used = vec![false; n];
    for a in 1..=k {
        for b in 1..=k {
            for radial in [true, false] {
                let (c, d) = if radial { (a + 1, b) } else { (a, b + 1) };
                if c > k || d > k {
                    continue;
                }
                let (s, t) = ((a - 1) * k + b - 1, (c - 1) * k + d - 1);
                let (ps, pt) = if radial { (ports[s][OUT], ports[t][IN]) } else { (ports[s][PLUS], ports[t][MINUS]) };
                let corridor = |v: usize| {
                    let (vs, vt) = cv.fermi[v];
                    if radial {
                        vt >= lay.t(k, a) - w_ring
                            && vt <= lay.t(k, c) + w_ring
                            && vt.cosh() * (vs - lay.s(k, b)).sinh().abs() <= w_line
                    } else {
                        (vt - lay.t(k, a)).abs() <= w_ring
                            && vs >= lay.s(k, b) - lay.ds / 2.0
                            && vs <= lay.s(k, d) + lay.ds / 2.0
                    }
                };
                let free = |v: usize| v == ps || v == pt || !(blocked[v] || used[v] || reserved[v]);
                let mid = if ps == pt {
                    vec![ps]
                } else {
                    bfs_path(gamma, ps, pt, |v| free(v) && corridor(v))
                        .or_else(|| bfs_path(gamma, ps, pt, free))
                        .ok_or_else(|| Error::Invalid(format!("no free route from ({a},{b}) to ({c},{d})")))?
                };
                let mut vertices = vec![grid_vertices[s]];
                vertices.extend_from_slice(&mid);
                vertices.push(grid_vertices[t]);
                for &v in &mid {
                    used[v] = true;
                }
                paths.push(CanonicalPath { from: (a, b), to: (c, d), radial, vertices });
            }
        }
    }
    Ok((grid_vertices, grid_tiles, paths))
}

/// Shortest path from `s` to `t` through vertices accepted by `ok`.
fn bfs_path(g: &Graph, s: usize, t: usize, ok: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    if s == t {
        return Some(vec![s]);
    }
    let mut prev = vec![usize::MAX; g.n()];
    prev[s] = s;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if prev[w] == usize::MAX && ok(w) {
                prev[w] = u;
                if w == t {
                    let mut path = vec![t];
                    let mut x = t;
                    while x != s {
                        x = prev[x];
                        path.push(x);
                    }
                    path.reverse();
                    return Some(path);
                }
                q.push_back(w);
            }
        }
    }
    None
}

const VCELL: f64 = 0.5;

struct VertexIndex {
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl VertexIndex {
    fn key(p: &HPoint) -> (i64, i64) {
        let x = p.spatial();
        ((x[0] / VCELL).floor() as i64, (x[1] / VCELL).floor() as i64)
    }

    fn new(points: &[HPoint]) -> Self {
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            grid.entry(Self::key(p)).or_default().push(i);
        }
        VertexIndex { grid }
    }

    fn find(&self, p: &HPoint, points: &[HPoint]) -> Option<usize> {
        let (cx, cy) = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.grid.get(&(cx + dx, cy + dy)) {
                    if let Some(&i) = v.iter().find(|&&i| dist(&points[i], p) < 0.1) {
                        return Some(i);
                    }
                }
            }
        }
        None
    }
}

/// Vertices and edges of the tiles in `patch`.
fn vertex_graph(tiling: &RegularTiling, patch: &[usize]) -> (Vec<HPoint>, Graph) {
    let mut pos: Vec<HPoint> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut edges = BTreeSet::new();
    for &t in patch {
        let ids: Vec<usize> = tiling
            .vertices(t)
            .into_iter()
            .map(|p| {
                let (cx, cy) = VertexIndex::key(&p);
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(v) = grid.get(&(cx + dx, cy + dy)) {
                            if let Some(&i) = v.iter().find(|&&i| dist(&pos[i], &p) < 0.1) {
                                return i;
                            }
                        }
                    }
                }
                grid.entry((cx, cy)).or_default().push(pos.len());
                pos.push(p);
                pos.len() - 1
            })
            .collect();
        for j in 0..ids.len() {
            let (u, v) = (ids[j], ids[(j + 1) % ids.len()]);
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let g = Graph::from_edges(pos.len(), &edges).expect("tile edges join distinct vertices");
    (pos, g)
}

/// Copy `v(x,y)` of subdivision vertex `gvertex` (index into
/// [`GridEmbedding::subdivision_vertices`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HLabel {
    pub gvertex: usize,
    pub x: u32,
    pub y: u32,
}

/// Independent set instance built from a Grid Tiling with inequalities instance.
#[derive(Clone, Debug)]
pub struct IsReduction {
    pub instance: NubgInstance,
    pub labels: Vec<HLabel>,
    /// Tiling-graph vertex of each subdivision vertex.
    pub gvertices: Vec<usize>,
    /// Copies placed at each subdivision vertex.
    pub classes: Vec<Vec<usize>>,
    /// `|V(G)|`: H has an independent set this large iff the instance is solvable.
    pub target: usize,
    k: usize,
    /// Subdivision-vertex ids of each path's interior with its direction flag.
    path_interiors: Vec<((usize, usize), bool, Vec<usize>)>,
}

/// `rho` for the pentagon construction: half the side of the {5,4} tile.
pub fn pentagon_rho() -> f64 {
    ((PI / 5.0).cos() / (PI / 4.0).sin()).acosh()
}

/// Number of vertices of the constructed H.
pub fn reduction_vertex_count(inst: &GridTilingInstance, emb: &GridEmbedding) -> usize {
    inst.total_pairs() + inst.n as usize * emb.paths.iter().map(|p| p.interior().len()).sum::<usize>()
}

pub fn gtleq_to_is(inst: &GridTilingInstance, emb: &GridEmbedding) -> Result<IsReduction> {
    if inst.mode != GtMode::Leq {
        return Err(Error::InvalidArgument("the independent set construction needs a leq instance".into()));
    }
    if inst.k != emb.k {
        return Err(Error::InvalidArgument(format!("instance has k={} but the embedding {}", inst.k, emb.k)));
    }
    let k = inst.k;
    let n = inst.n;
    let gvertices = emb.subdivision_vertices();
    let mut labels = Vec::new();
    let mut classes = Vec::with_capacity(gvertices.len());
    for (i, w) in inst.sets.iter().enumerate() {
        classes.push((labels.len()..labels.len() + w.len()).collect::<Vec<_>>());
        labels.extend(w.iter().map(|&(x, y)| HLabel { gvertex: i, x, y }));
    }
    let mut path_interiors = Vec::with_capacity(emb.paths.len());
    let mut next = k * k;
    // subdivision-vertex sequence of each path, endpoints included
    let mut seqs = Vec::with_capacity(emb.paths.len());
    for p in &emb.paths {
        let s = (p.from.0 - 1) * k + p.from.1 - 1;
        let t = (p.to.0 - 1) * k + p.to.1 - 1;
        let ids: Vec<usize> = (next..next + p.interior().len()).collect();
        next += ids.len();
        for &g in &ids {
            classes.push((labels.len()..labels.len() + n as usize).collect());
            labels.extend((1..=n).map(|z| {
                if p.radial {
                    HLabel { gvertex: g, x: z, y: 1 }
                } else {
                    HLabel { gvertex: g, x: 1, y: z }
                }
            }));
        }
        let mut seq = vec![s];
        seq.extend_from_slice(&ids);
        seq.push(t);
        seqs.push((p.radial, seq));
        path_interiors.push((p.from, p.radial, ids));
    }
    let mut edges = Vec::new();
    for c in &classes {
        for (i, &u) in c.iter().enumerate() {
            for &v in &c[i + 1..] {
                edges.push((u, v));
            }
        }
    }
    for (radial, seq) in &seqs {
        for w in seq.windows(2) {
            for &u in &classes[w[0]] {
                for &v in &classes[w[1]] {
                    let (lu, lv) = (labels[u], labels[v]);
                    if if *radial { lu.x > lv.x } else { lu.y > lv.y } {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    let graph = Graph::from_edges(labels.len(), &edges)?;
    let points = labels.iter().map(|l| emb.positions[gvertices[l.gvertex]].clone()).collect();
    let instance = NubgInstance { points, rho: pentagon_rho(), nu: 1.0, graph };
    Ok(IsReduction { instance, labels, target: gvertices.len(), gvertices, classes, k, path_interiors })
}

impl IsReduction {
    /// Partition of H into the cliques of copies at each subdivision vertex.
    pub fn partition(&self) -> Partition {
        Partition {
            classes: self.classes.clone(),
            kind: PartitionKind::Clique,
            kappa: 1,
            tiles: Vec::new(),
            centers: Vec::new(),
        }
    }

    /// Independent set of size `target` induced by a solution of the instance.
    pub fn independent_set_from_solution(&self, sol: &[(u32, u32)]) -> Result<Vec<usize>> {
        let k = self.k;
        if sol.len() != k * k {
            return Err(Error::InvalidArgument("solution has the wrong number of cells".into()));
        }
        let pick = |g: usize, x: u32, y: u32| {
            self.classes[g]
                .iter()
                .copied()
                .find(|&v| self.labels[v].x == x && self.labels[v].y == y)
                .ok_or_else(|| Error::Invalid(format!("pair ({x},{y}) not available at subdivision vertex {g}")))
        };
        let mut out = Vec::with_capacity(self.target);
        for (i, &(x, y)) in sol.iter().enumerate() {
            out.push(pick(i, x, y)?);
        }
        for ((a, b), radial, ids) in &self.path_interiors {
            let (x, y) = sol[(a - 1) * k + b - 1];
            for &g in ids {
                out.push(if *radial { pick(g, x, 1)? } else { pick(g, 1, y)? });
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Grid Tiling selection read from an independent set hitting every class.
    pub fn solution_from_independent_set(&self, set: &[usize]) -> Option<Vec<(u32, u32)>> {
        let mut sol = vec![None; self.k * self.k];
        for &v in set {
            let l = self.labels[v];
            if l.gvertex < sol.len() {
                sol[l.gvertex] = Some((l.x, l.y));
            }
        }
        sol.into_iter().collect()
    }

    /// Pairs breaking the distance rules with tolerance `tol`: closer than
    /// `2 rho - tol` but not adjacent, or farther than `2 rho + tol` but adjacent.
    pub fn legality_violations(&self, tol: f64) -> Vec<(usize, usize)> {
        let h = &self.instance;
        let two_rho = 2.0 * h.rho;
        let mut bad = Vec::new();
        for u in 0..h.n() {
            for v in u + 1..h.n() {
                let d = dist(&h.points[u], &h.points[v]);
                let e = h.graph.has_edge(u, v);
                if (d < two_rho - tol && !e) || (d > two_rho + tol && e) {
                    bad.push((u, v));
                }
            }
        }
        bad
    }
}

/// Maximum independent set by branch and bound with a greedy clique-cover bound.
pub fn max_independent_set(g: &Graph, budget: u64) -> Result<Vec<usize>> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut best = Vec::new();
    let mut cur = Vec::new();
    let mut nodes = 0u64;
    mis_search(g, &mut alive, &mut cur, &mut best, &mut nodes, budget)?;
    best.sort_unstable();
    Ok(best)
}

fn clique_cover_bound(g: &Graph, alive: &[bool]) -> usize {
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for v in (0..g.n()).filter(|&v| alive[v]) {
        match cliques.iter_mut().find(|c| c.iter().all(|&u| g.has_edge(u, v))) {
            Some(c) => c.push(v),
            None => cliques.push(vec![v]),
        }
    }
    cliques.len()
}

fn mis_search(
    g: &Graph,
    alive: &mut [bool],
    cur: &mut Vec<usize>,
    best: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::SearchLimit(format!("independent set search exceeded {budget} nodes")));
    }
    let deg = |v: usize, alive: &[bool]| g.neighbors(v).iter().filter(|&&u| alive[u]).count();
    let Some(v) = (0..g.n()).filter(|&v| alive[v]).min_by_key(|&v| (deg(v, alive), v)) else {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        return Ok(());
    };
    if cur.len() + clique_cover_bound(g, alive) <= best.len() {
        return Ok(());
    }
    // some maximum independent set contains v or one of its neighbors
    let mut choices = vec![v];
    if deg(v, alive) > 1 {
        choices.extend(g.neighbors(v).iter().copied().filter(|&u| alive[u]));
    }
    for u in choices {
        let removed: Vec<usize> =
            std::iter::once(u).chain(g.neighbors(u).iter().copied()).filter(|&w| alive[w]).collect();
        for &w in &removed {
            alive[w] = false;
        }
        cur.push(u);
        mis_search(g, alive, cur, best, nodes, budget)?;
        cur.pop();
        for &w in &removed {
            alive[w] = true;
        }
    }
    Ok(())
}
