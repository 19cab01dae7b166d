//! Tree decompositions: construction, transforms and validation.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hypgeo::{self, HPoint};
use crate::nubg::{contract, tiling_partition, NubgInstance, Partition, QuotientGraph};
use crate::separator::{separator_for_partition, SeparatorOptions};
use crate::tiling::{RegularTiling, RegularTilingSpec, SquareTilingSpec};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    /// Sorted bags.
    pub bags: Vec<Vec<usize>>,
    /// Tree edges between bag indices.
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn single(bag: Vec<usize>) -> Self {
        let mut bag = bag;
        bag.sort_unstable();
        bag.dedup();
        TreeDecomposition { bags: vec![bag], edges: Vec::new() }
    }

    /// Largest bag size minus one; `-1` for no bags or only empty bags.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64).max().unwrap_or(0) - 1
    }

    pub fn tree_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn normalize(&mut self) {
        for b in &mut self.bags {
            b.sort_unstable();
            b.dedup();
        }
    }

    /// Contracts tree edges whose one bag is contained in the other. Bags must be sorted.
    fn compact(&mut self) {
        let n = self.bags.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let subset = |x: &[usize], y: &[usize]| x.len() <= y.len() && x.iter().all(|v| y.binary_search(v).is_ok());
        let mut alive = vec![true; n];
        let mut stack: Vec<usize> = (0..n).rev().collect();
        while let Some(a) = stack.pop() {
            if !alive[a] {
                continue;
            }
            let Some(b) = adj[a]
                .iter()
                .copied()
                .find(|&b| subset(&self.bags[a], &self.bags[b]) || subset(&self.bags[b], &self.bags[a]))
            else {
                continue;
            };
            let (gone, keep) = if subset(&self.bags[a], &self.bags[b]) { (a, b) } else { (b, a) };
            for c in std::mem::take(&mut adj[gone]) {
                adj[c].remove(&gone);
                if c != keep {
                    adj[c].insert(keep);
                    adj[keep].insert(c);
                }
            }
            alive[gone] = false;
            stack.push(keep);
            stack.extend(adj[keep].iter().copied());
        }
        let mut idx = vec![usize::MAX; n];
        let mut bags = Vec::new();
        for i in 0..n {
            if alive[i] {
                idx[i] = bags.len();
                bags.push(std::mem::take(&mut self.bags[i]));
            }
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for &j in &adj[i] {
                if alive[i] && i < j {
                    edges.push((idx[i], idx[j]));
                }
            }
        }
        self.bags = bags;
        self.edges = edges;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TdViolation {
    NotATree,
    UnknownVertex(usize),
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    Disconnected(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdReport {
    pub valid: bool,
    pub width: i64,
    pub violation: Option<TdViolation>,
}

pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdReport {
    let violation = find_violation(g, td);
    TdReport { valid: violation.is_none(), width: td.width(), violation }
}

fn find_violation(g: &Graph, td: &TreeDecomposition) -> Option<TdViolation> {
    let nb = td.bags.len();
    let n = g.n();
    if nb == 0 {
        return if n == 0 { None } else { Some(TdViolation::VertexUncovered(0)) };
    }
    if td.edges.len() != nb - 1 || td.edges.iter().any(|&(a, b)| a >= nb || b >= nb || a == b) {
        return Some(TdViolation::NotATree);
    }
    let adj = td.tree_adjacency();
    let mut seen = vec![false; nb];
    let mut stack = vec![0];
    seen[0] = true;
    let mut cnt = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                cnt += 1;
                stack.push(y);
            }
        }
    }
    if cnt != nb {
        return Some(TdViolation::NotATree);
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, b) in td.bags.iter().enumerate() {
        for &v in b {
            if v >= n {
                return Some(TdViolation::UnknownVertex(v));
            }
            holders[v].push(i);
        }
    }
    if let Some(v) = holders.iter().position(Vec::is_empty) {
        return Some(TdViolation::VertexUncovered(v));
    }
    let bag_sets: Vec<HashSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for (u, v) in g.edges() {
        if !holders[u].iter().any(|&i| bag_sets[i].contains(&v)) {
            return Some(TdViolation::EdgeUncovered(u, v));
        }
    }
    let mut mark = vec![usize::MAX; nb];
    for (v, hs) in holders.iter().enumerate() {
        for &i in hs {
            mark[i] = v;
        }
        let mut stack = vec![hs[0]];
        let mut reached = 1;
        let mut vis = HashSet::from([hs[0]]);
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] == v && vis.insert(y) {
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != hs.len() {
            return Some(TdViolation::Disconnected(v));
        }
    }
    None
}

/// Decomposition over class ids with per-class weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTreeDecomposition {
    pub td: TreeDecomposition,
    pub weights: Vec<f64>,
}

impl WeightedTreeDecomposition {
    pub fn weighted_width(&self) -> f64 {
        self.td.bags.iter().map(|b| b.iter().map(|&c| self.weights[c]).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Weighted decomposition of the tiling-partition quotient by recursive separators.
pub fn decompose_by_separators(
    inst: &NubgInstance,
    spec: &SquareTilingSpec,
    min_size: usize,
    seed: u64,
) -> Result<(Partition, QuotientGraph, WeightedTreeDecomposition)> {
    let part = tiling_partition(inst, spec)?;
    let q = contract(&inst.graph, &part)?;
    let mut td = TreeDecomposition::default();
    let nc = part.len();
    let mut counter = 0u64;
    let mut work: Vec<(Vec<usize>, Vec<usize>, Option<usize>)> = Vec::new();
    for comp in q.graph.components() {
        work.push((comp, Vec::new(), None));
    }
    let mut roots = Vec::new();
    while let Some((classes, boundary, parent)) = work.pop() {
        let id = td.bags.len();
        match parent {
            Some(p) => td.edges.push((p, id)),
            None => roots.push(id),
        }
        if classes.len() <= min_size.max(1) {
            let mut bag = classes;
            bag.extend(boundary);
            td.bags.push(bag);
            continue;
        }
        counter += 1;
        let sep = sub_separator(inst, spec, &part, &classes, seed.wrapping_add(counter.wrapping_mul(0x9E37_79B9)))?;
        let mut in_sep = vec![false; nc];
        for &c in &sep {
            in_sep[c] = true;
        }
        let mut bag = sep.clone();
        bag.extend(boundary.iter().copied());
        let mut removed = vec![true; nc];
        for &c in &classes {
            if !in_sep[c] {
                removed[c] = false;
            }
        }
        let upper: Vec<usize> = bag.clone();
        td.bags.push(bag);
        for comp in q.graph.components_without(&removed) {
            let inc: BTreeSet<usize> = comp.iter().flat_map(|&c| q.graph.neighbors(c).iter().copied()).collect();
            let child_b: Vec<usize> = upper.iter().copied().filter(|c| inc.contains(c)).collect();
            work.push((comp, child_b, Some(id)));
        }
    }
    if td.bags.is_empty() {
        td.bags.push(Vec::new());
    }
    for w in roots.windows(2) {
        td.edges.push((w[0], w[1]));
    }
    td.normalize();
    Ok((part, q.clone(), WeightedTreeDecomposition { td, weights: q.weights }))
}

/// Separator classes for the sub-instance spanned by `classes`.
fn sub_separator(
    inst: &NubgInstance,
    spec: &SquareTilingSpec,
    part: &Partition,
    classes: &[usize],
    seed: u64,
) -> Result<Vec<usize>> {
    let verts: Vec<usize> = classes.iter().flat_map(|&c| part.classes[c].iter().copied()).collect();
    let mut idx = HashMap::new();
    for (i, &v) in verts.iter().enumerate() {
        idx.insert(v, i);
    }
    let sub = NubgInstance {
        points: verts.iter().map(|&v| inst.points[v].clone()).collect(),
        rho: inst.rho,
        nu: inst.nu,
        graph: inst.graph.induced(&verts),
    };
    let sub_part = Partition {
        classes: classes.iter().map(|&c| part.classes[c].iter().map(|v| idx[v]).collect()).collect(),
        kind: part.kind,
        kappa: part.kappa,
        tiles: classes.iter().map(|&c| part.tiles[c].clone()).collect(),
        centers: Vec::new(),
    };
    let opts = SeparatorOptions { seed, ..SeparatorOptions::default() };
    let sep = separator_for_partition(&sub, spec, &sub_part, &opts)?;
    Ok(sep.classes.iter().map(|&i| classes[i]).collect())
}

/// Replaces every class by its member vertices.
pub fn expand_weighted(wtd: &WeightedTreeDecomposition, part: &Partition) -> TreeDecomposition {
    let mut td = TreeDecomposition {
        bags: wtd.td.bags.iter().map(|b| b.iter().flat_map(|&c| part.classes[c].iter().copied()).collect()).collect(),
        edges: wtd.td.edges.clone(),
    };
    td.normalize();
    td
}

/// Decomposition of `G^k` with bags `N(B, ceil(k/2))`.
pub fn power_decomposition(td: &TreeDecomposition, g: &Graph, k: usize) -> Result<TreeDecomposition> {
    let rep = validate_td(g, td);
    if !rep.valid {
        return Err(Error::Invalid(format!("input decomposition invalid: {:?}", rep.violation)));
    }
    let r = k.div_ceil(2);
    Ok(TreeDecomposition { bags: td.bags.iter().map(|b| g.ball(b, r)).collect(), edges: td.edges.clone() })
}

/// Decomposition of the `k`-fold blowup, vertex `v` becoming `v*k .. v*k+k-1`.
pub fn blowup_decomposition(td: &TreeDecomposition, k: usize) -> TreeDecomposition {
    TreeDecomposition {
        bags: td.bags.iter().map(|b| b.iter().flat_map(|&v| (0..k).map(move |i| v * k + i)).collect()).collect(),
        edges: td.edges.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heuristic {
    MinDegree,
    MinFill,
}

/// Default leaf size, in classes, of [`decompose_by_separators`].
pub const MIN_SIZE: usize = 8;

/// Graphs above this size skip the min-fill ordering.
pub const MIN_FILL_MAX: usize = 600;

/// Better of the min-degree and min-fill elimination decompositions.
pub fn heuristic_decompose(g: &Graph) -> TreeDecomposition {
    let a = elimination_decompose(g, Heuristic::MinDegree);
    if g.n() > MIN_FILL_MAX {
        return a;
    }
    let b = elimination_decompose(g, Heuristic::MinFill);
    if b.width() < a.width() {
        b
    } else {
        a
    }
}

pub fn elimination_decompose(g: &Graph, h: Heuristic) -> TreeDecomposition {
    let order = elimination_order(g, h);
    decomposition_from_order(g, &order)
}

fn elimination_order(g: &Graph, h: Heuristic) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut gone = vec![false; n];
    let fill = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut f = 0;
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if !adj[nb[i]].contains(&nb[j]) {
                    f += 1;
                }
            }
        }
        f
    };
    let score = |adj: &[BTreeSet<usize>], v: usize| match h {
        Heuristic::MinDegree => adj[v].len(),
        Heuristic::MinFill => fill(adj, v),
    };
    let mut cur: Vec<usize> = (0..n).map(|v| score(&adj, v)).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize, usize)>> =
        (0..n).map(|v| Reverse((cur[v], adj[v].len(), v))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((s, deg, v))) = heap.pop() {
        if gone[v] || s != cur[v] || deg != adj[v].len() {
            continue;
        }
        gone[v] = true;
        order.push(v);
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
        }
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        }
        adj[v].clear();
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        if h == Heuristic::MinFill {
            for &a in &nb {
                touched.extend(adj[a].iter().copied());
            }
        }
        for u in touched {
            if !gone[u] {
                cur[u] = score(&adj, u);
                heap.push(Reverse((cur[u], adj[u].len(), u)));
            }
        }
    }
    order
}

/// Decomposition from an elimination order; forest roots are chained.
pub fn decomposition_from_order(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::single(Vec::new());
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        let higher: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > i).collect();
        for a in 0..higher.len() {
            for b in a + 1..higher.len() {
                adj[higher[a]].insert(higher[b]);
                adj[higher[b]].insert(higher[a]);
            }
        }
        if let Some(&p) = higher.iter().min_by_key(|&&u| pos[u]) {
            parent[i] = pos[p];
        }
        let mut bag = higher;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for i in 0..n {
        if parent[i] == usize::MAX {
            roots.push(i);
        } else {
            edges.push((i, parent[i]));
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, edges }
}

/// Exact treewidth by dynamic programming over vertex subsets; `n <= 20`.
pub fn exact_treewidth(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > 20 {
        return Err(Error::InvalidArgument(format!("exact treewidth limited to 20 vertices, got {n}")));
    }
    if n == 0 {
        return Ok(0);
    }
    let nbr: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    // q(s, v): vertices outside s + v reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut reach = 1u32 << v;
        let mut frontier = reach;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= nbr[x];
            }
            out |= next & !s & !(1 << v);
            next &= s & !reach;
            reach |= next;
            frontier = next;
        }
        out
    };
    let full = (1u64 << n) as usize;
    let mut tw = vec![u8::MAX; full];
    tw[0] = 0;
    for s in 1..full {
        let s32 = s as u32;
        let mut best = u8::MAX;
        let mut bits = s32;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s32 & !(1 << v);
            let cand = tw[rest as usize].max(q(rest, v).count_ones() as u8);
            best = best.min(cand);
        }
        tw[s] = best;
    }
    Ok(tw[full - 1] as usize)
}

/// Result of peeling a finite tile set from the outside in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelResult {
    pub layers: Vec<Vec<usize>>,
    pub outerplanarity: usize,
    /// `|layer_i| / |S_i|` for every step.
    pub fractions: Vec<f64>,
}

/// Layers of a patch: layer `i` holds the tiles whose cheapest route to infinity crosses `i` patch tiles.
pub fn layer_peel(tiling: &mut RegularTiling, patch: &[usize]) -> PeelResult {
    let set: HashSet<usize> = patch.iter().copied().collect();
    if set.is_empty() {
        return PeelResult { layers: Vec::new(), outerplanarity: 0, fractions: Vec::new() };
    }
    let o = HPoint::origin(2);
    let ov = tiling.spec().ov;
    let far = set.iter().map(|&t| hypgeo::dist(&o, tiling.center(t))).fold(0.0, f64::max) + 2.0 * ov;
    // flood the complement from around the patch, stopping once a far tile is reached
    let mut domain: HashSet<usize> = set.clone();
    let mut sources: Vec<usize> = Vec::new();
    let starts: Vec<usize> = {
        let mut v = Vec::new();
        for &t in patch {
            for nb in tiling.neighbors(t) {
                if !set.contains(&nb) {
                    v.push(nb);
                }
            }
        }
        v
    };
    for s in starts {
        if domain.contains(&s) {
            continue;
        }
        let mut heap = BinaryHeap::new();
        let key = |tl: &RegularTiling, t: usize| (hypgeo::dist(&o, tl.center(t)) * 1e9) as u64;
        heap.push((key(tiling, s), s));
        domain.insert(s);
        while let Some((k, t)) = heap.pop() {
            if k as f64 / 1e9 > far {
                sources.push(t);
                break;
            }
            for nb in tiling.neighbors(t) {
                if !set.contains(&nb) && domain.insert(nb) {
                    heap.push((key(tiling, nb), nb));
                }
            }
        }
    }
    // 0-1 search: entering a patch tile costs one
    let mut cost: HashMap<usize, usize> = HashMap::new();
    let mut dq = VecDeque::new();
    for &s in &sources {
        cost.insert(s, 0);
        dq.push_back(s);
    }
    while let Some(t) = dq.pop_front() {
        let c = cost[&t];
        for nb in tiling.neighbors(t) {
            if !domain.contains(&nb) {
                continue;
            }
            let w = usize::from(set.contains(&nb));
            if cost.get(&nb).is_none_or(|&x| x > c + w) {
                cost.insert(nb, c + w);
                if w == 0 {
                    dq.push_front(nb);
                } else {
                    dq.push_back(nb);
                }
            }
        }
    }
    let depth_max = patch.iter().map(|t| cost[t]).max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth_max];
    for &t in patch {
        layers[cost[&t] - 1].push(t);
    }
    for l in &mut layers {
        l.sort_unstable();
    }
    let mut remaining = set.len();
    let mut fractions = Vec::new();
    for l in &layers {
        fractions.push(l.len() as f64 / remaining as f64);
        remaining -= l.len();
    }
    PeelResult { outerplanarity: layers.len(), layers, fractions }
}

/// Neighborhood graph of a tile set; vertex `i` is `tiles[i]`.
pub fn neighborhood_graph(tiling: &mut RegularTiling, tiles: &[usize]) -> Graph {
    let idx: HashMap<usize, usize> = tiles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut edges = Vec::new();
    for (i, &t) in tiles.iter().enumerate() {
        for nb in tiling.neighbors(t) {
            if let Some(&j) = idx.get(&nb) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::from_edges(tiles.len(), &edges).expect("indices in range")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShallowReport {
    pub occupied_tiles: usize,
    pub expanded_tiles: usize,
    pub ell: usize,
    pub max_occupancy: usize,
    pub occupancy_bound: usize,
    pub nbg_width: i64,
    pub width: i64,
}

/// Decomposition of a shallow planar instance through a power of the tile neighborhood graph.
///
/// `k` is the shallowness of the point set; a tile holding more than
/// `k * floor(Vol(ov + rho/2) / Vol(rho/2))` points is rejected.
pub fn shallow_decompose(
    inst: &NubgInstance,
    spec: &RegularTilingSpec,
    k: usize,
) -> Result<(TreeDecomposition, ShallowReport)> {
    if inst.n() == 0 {
        return Err(Error::InvalidArgument("empty instance".into()));
    }
    if inst.dim() != 2 {
        return Err(Error::InvalidArgument("shallow decomposition needs d = 2".into()));
    }
    let mut tiling = RegularTiling::new(spec.clone());
    let mut tile_of = Vec::with_capacity(inst.n());
    let mut hint = 0;
    for p in &inst.points {
        hint = tiling.locate_from(p, hint);
        tile_of.push(hint);
    }
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for (v, &t) in tile_of.iter().enumerate() {
        members.entry(t).or_default().push(v);
    }
    let half = inst.rho / 2.0;
    let packing = (hypgeo::ball_volume(2, spec.ov + half)? / hypgeo::ball_volume(2, half)?).floor() as usize;
    let bound = k.max(1) * packing.max(1);
    let max_occ = members.values().map(Vec::len).max().unwrap_or(0);
    if max_occ > bound {
        return Err(Error::Invalid(format!("tile holds {max_occ} points, above the shallow bound {bound}")));
    }
    let ell = (2.0 * inst.rho * inst.nu / spec.sep_const).ceil() as usize + 1;
    let mut occupied: Vec<usize> = members.keys().copied().collect();
    occupied.sort_unstable();
    // S' = tiles within ell steps of the occupied tiles
    let mut dist: HashMap<usize, usize> = occupied.iter().map(|&t| (t, 0)).collect();
    let mut q: VecDeque<usize> = occupied.iter().copied().collect();
    while let Some(t) = q.pop_front() {
        let dt = dist[&t];
        if dt == ell {
            continue;
        }
        for nb in tiling.neighbors(t) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(nb) {
                e.insert(dt + 1);
                q.push_back(nb);
            }
        }
    }
    let mut expanded: Vec<usize> = dist.keys().copied().collect();
    expanded.sort_unstable();
    let nbg = neighborhood_graph(&mut tiling, &expanded);
    let base = heuristic_decompose(&nbg);
    let powered = power_decomposition(&base, &nbg, ell)?;
    let mut td = TreeDecomposition {
        bags: powered
            .bags
            .iter()
            .map(|b| b.iter().flat_map(|&i| members.get(&expanded[i]).into_iter().flatten().copied()).collect())
            .collect(),
        edges: powered.edges,
    };
    td.normalize();
    td.compact();
    let report = ShallowReport {
        occupied_tiles: occupied.len(),
        expanded_tiles: expanded.len(),
        ell,
        max_occupancy: max_occ,
        occupancy_bound: bound,
        nbg_width: base.width(),
        width: td.width(),
    };
    Ok((td, report))
}
