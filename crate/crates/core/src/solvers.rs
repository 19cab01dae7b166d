//! Exact solvers over tree decompositions and brute-force oracles.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use serde::{Deserialize, Serialize};

use crate::decomp::{expand_weighted, heuristic_decompose, validate_td, TreeDecomposition, WeightedTreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::nubg::{contract, Partition};

type DetState = BuildHasherDefault<DefaultHasher>;
type Table<W> = HashMap<Vec<u32>, (i64, W), DetState>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpBudget {
    pub max_states: usize,
    /// Cap on selected vertices per partition class; `None` uses the partition's kappa for
    /// independent set and no cap for dominating set.
    pub kappa: Option<usize>,
}

impl Default for DpBudget {
    fn default() -> Self {
        DpBudget { max_states: 1 << 22, kappa: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DpStats {
    pub nodes: usize,
    pub width: i64,
    /// Largest table over all nodes.
    pub max_states: usize,
    pub total_states: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub value: usize,
    pub witness: Vec<usize>,
    pub stats: DpStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug)]
struct NiceNode {
    kind: NiceKind,
    bag: Vec<usize>,
    children: Vec<usize>,
}

/// Nice decomposition in postorder; the last node is the root and has an empty bag.
struct NiceTd {
    nodes: Vec<NiceNode>,
    /// Number of distinct vertices appearing in each node's subtree.
    seen: Vec<usize>,
}

impl NiceTd {
    fn new(td: &TreeDecomposition) -> Self {
        let mut nodes: Vec<NiceNode> = Vec::new();
        let nb = td.bags.len();
        if nb == 0 {
            nodes.push(NiceNode { kind: NiceKind::Leaf, bag: Vec::new(), children: Vec::new() });
            return NiceTd { seen: vec![0], nodes };
        }
        let adj = td.tree_adjacency();
        let mut order = vec![0];
        let mut parent = vec![usize::MAX; nb];
        parent[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
        }
        let mut result = vec![usize::MAX; nb];
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for &x in order.iter().skip(1) {
            kids[parent[x]].push(x);
        }
        for &x in order.iter().rev() {
            let target = &td.bags[x];
            let mut ids: Vec<usize> = Vec::new();
            if kids[x].is_empty() {
                nodes.push(NiceNode { kind: NiceKind::Leaf, bag: Vec::new(), children: Vec::new() });
                let leaf = nodes.len() - 1;
                ids.push(chain(&mut nodes, leaf, target));
            }
            for &c in &kids[x] {
                ids.push(chain(&mut nodes, result[c], target));
            }
            let mut acc = ids[0];
            for &id in &ids[1..] {
                nodes.push(NiceNode { kind: NiceKind::Join, bag: target.clone(), children: vec![acc, id] });
                acc = nodes.len() - 1;
            }
            result[x] = acc;
        }
        chain(&mut nodes, result[0], &[]);
        let mut forgets = vec![0usize; nodes.len()];
        for x in 0..nodes.len() {
            let mut f = nodes[x].children.iter().map(|&c| forgets[c]).sum::<usize>();
            if let NiceKind::Forget(_) = nodes[x].kind {
                f += 1;
            }
            forgets[x] = f;
        }
        let seen = (0..nodes.len()).map(|x| forgets[x] + nodes[x].bag.len()).collect();
        NiceTd { nodes, seen }
    }
}

/// Forget then introduce until the bag equals `target`; returns the last node.
fn chain(nodes: &mut Vec<NiceNode>, from: usize, target: &[usize]) -> usize {
    let mut cur = from;
    let start = nodes[from].bag.clone();
    for &v in &start {
        if target.binary_search(&v).is_err() {
            let mut bag = nodes[cur].bag.clone();
            bag.retain(|&x| x != v);
            nodes.push(NiceNode { kind: NiceKind::Forget(v), bag, children: vec![cur] });
            cur = nodes.len() - 1;
        }
    }
    for &v in target {
        if start.binary_search(&v).is_err() {
            let mut bag = nodes[cur].bag.clone();
            let p = bag.binary_search(&v).unwrap_err();
            bag.insert(p, v);
            nodes.push(NiceNode { kind: NiceKind::Introduce(v), bag, children: vec![cur] });
            cur = nodes.len() - 1;
        }
    }
    cur
}

fn offer<W: Ord>(t: &mut Table<W>, key: Vec<u32>, val: i64, wit: W) {
    match t.get_mut(&key) {
        Some(e) => {
            if val > e.0 || (val == e.0 && wit < e.1) {
                *e = (val, wit);
            }
        }
        None => {
            t.insert(key, (val, wit));
        }
    }
}

fn merge_sorted<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn insert_sorted<T: Ord>(v: &mut Vec<T>, x: T) {
    let p = v.binary_search(&x).unwrap_or_else(|e| e);
    v.insert(p, x);
}

/// Runs a table-based dynamic program over the nice decomposition.
fn run_dp<W: Ord + Clone>(
    nice: &NiceTd,
    budget: &DpBudget,
    stats: &mut DpStats,
    mut step: impl FnMut(usize, &NiceNode, Vec<Table<W>>) -> Table<W>,
) -> Result<Table<W>> {
    let mut tables: Vec<Option<Table<W>>> = Vec::with_capacity(nice.nodes.len());
    stats.nodes = nice.nodes.len();
    for (x, node) in nice.nodes.iter().enumerate() {
        let kids: Vec<Table<W>> = node.children.iter().map(|&c| tables[c].take().expect("postorder")).collect();
        let t = step(x, node, kids);
        stats.max_states = stats.max_states.max(t.len());
        stats.total_states += t.len();
        if t.len() > budget.max_states {
            return Err(Error::Budget { states: t.len(), max: budget.max_states });
        }
        tables.push(Some(t));
    }
    Ok(tables.pop().flatten().expect("root table"))
}

fn check_td(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    let rep = validate_td(g, td);
    if !rep.valid {
        return Err(Error::Invalid(format!("decomposition invalid: {:?}", rep.violation)));
    }
    Ok(())
}

/// Maximum independent set over a plain decomposition, capping selections per class.
pub fn independent_set_td(
    g: &Graph,
    td: &TreeDecomposition,
    class_of: Option<&[usize]>,
    cap: usize,
    budget: &DpBudget,
) -> Result<Solution> {
    check_td(g, td)?;
    let nice = NiceTd::new(td);
    let mut stats = DpStats { width: td.width(), ..DpStats::default() };
    let root = run_dp::<Vec<u32>>(&nice, budget, &mut stats, |_, node, mut kids| {
        let mut t: Table<Vec<u32>> = Table::default();
        match node.kind {
            NiceKind::Leaf => offer(&mut t, Vec::new(), 0, Vec::new()),
            NiceKind::Introduce(v) => {
                for (s, (val, w)) in kids.pop().unwrap() {
                    let free = s.iter().all(|&u| !g.has_edge(u as usize, v));
                    let room = class_of.is_none_or(|cl| s.iter().filter(|&&u| cl[u as usize] == cl[v]).count() < cap);
                    if free && room {
                        let mut s2 = s.clone();
                        insert_sorted(&mut s2, v as u32);
                        offer(&mut t, s2, val, w.clone());
                    }
                    offer(&mut t, s, val, w);
                }
            }
            NiceKind::Forget(v) => {
                for (mut s, (val, mut w)) in kids.pop().unwrap() {
                    if let Ok(p) = s.binary_search(&(v as u32)) {
                        s.remove(p);
                        insert_sorted(&mut w, v as u32);
                        offer(&mut t, s, val + 1, w);
                    } else {
                        offer(&mut t, s, val, w);
                    }
                }
            }
            NiceKind::Join => {
                let r = kids.pop().unwrap();
                let l = kids.pop().unwrap();
                for (s, (a, wa)) in l {
                    if let Some((b, wb)) = r.get(&s) {
                        offer(&mut t, s, a + b, merge_sorted(&wa, wb));
                    }
                }
            }
        }
        t
    })?;
    let (val, wit) = root.get(&Vec::new()).cloned().expect("empty set always feasible");
    Ok(Solution { value: val as usize, witness: wit.into_iter().map(|x| x as usize).collect(), stats })
}

fn class_info(g: &Graph, p: &Partition) -> Result<Vec<usize>> {
    p.class_of(g.n())
}

/// Maximum independent set using the expansion of a weighted decomposition.
pub fn solve_is(g: &Graph, wtd: &WeightedTreeDecomposition, p: &Partition, budget: &DpBudget) -> Result<Solution> {
    let class_of = class_info(g, p)?;
    let td = expand_weighted(wtd, p);
    let cap = budget.kappa.unwrap_or(p.kappa.max(1));
    independent_set_td(g, &td, Some(&class_of), cap, budget)
}

/// Minimum vertex cover as the complement of a maximum independent set.
pub fn solve_vc(g: &Graph, wtd: &WeightedTreeDecomposition, p: &Partition, budget: &DpBudget) -> Result<Solution> {
    let is = solve_is(g, wtd, p, budget)?;
    let mut inside = vec![false; g.n()];
    for &v in &is.witness {
        inside[v] = true;
    }
    let witness: Vec<usize> = (0..g.n()).filter(|&v| !inside[v]).collect();
    Ok(Solution { value: witness.len(), witness, stats: is.stats })
}

const DS_IN: u32 = 0;
const DS_DOM: u32 = 1;
const DS_UNDOM: u32 = 2;

/// Minimum dominating set over a plain decomposition.
pub fn dominating_set_td(
    g: &Graph,
    td: &TreeDecomposition,
    class_of: Option<&[usize]>,
    cap: Option<usize>,
    budget: &DpBudget,
) -> Result<Solution> {
    check_td(g, td)?;
    let nice = NiceTd::new(td);
    let mut stats = DpStats { width: td.width(), ..DpStats::default() };
    let root = run_dp::<Vec<u32>>(&nice, budget, &mut stats, |_, node, mut kids| {
        let mut t: Table<Vec<u32>> = Table::default();
        match node.kind {
            NiceKind::Leaf => offer(&mut t, Vec::new(), 0, Vec::new()),
            NiceKind::Introduce(v) => {
                let p = node.bag.binary_search(&v).unwrap();
                for (s, (val, w)) in kids.pop().unwrap() {
                    let room = match (class_of, cap) {
                        (Some(cl), Some(c)) => {
                            let old: Vec<usize> = node.bag.iter().copied().filter(|&u| u != v).collect();
                            old.iter().zip(&s).filter(|(&u, &st)| st == DS_IN && cl[u] == cl[v]).count() < c
                        }
                        _ => true,
                    };
                    if room {
                        let mut s2 = s.clone();
                        s2.insert(p, DS_IN);
                        offer(&mut t, s2, val, w.clone());
                    }
                    let mut s3 = s;
                    s3.insert(p, DS_UNDOM);
                    offer(&mut t, s3, val, w);
                }
            }
            NiceKind::Forget(u) => {
                let child_bag: Vec<usize> = {
                    let mut b = node.bag.clone();
                    insert_sorted(&mut b, u);
                    b
                };
                let p = child_bag.binary_search(&u).unwrap();
                for (mut s, (val, mut w)) in kids.pop().unwrap() {
                    for (i, &x) in child_bag.iter().enumerate() {
                        if i != p && g.has_edge(u, x) {
                            if s[p] == DS_IN && s[i] == DS_UNDOM {
                                s[i] = DS_DOM;
                            }
                            if s[i] == DS_IN && s[p] == DS_UNDOM {
                                s[p] = DS_DOM;
                            }
                        }
                    }
                    let st = s.remove(p);
                    match st {
                        DS_UNDOM => {}
                        DS_IN => {
                            insert_sorted(&mut w, u as u32);
                            offer(&mut t, s, val - 1, w);
                        }
                        _ => offer(&mut t, s, val, w),
                    }
                }
            }
            NiceKind::Join => {
                let r = kids.pop().unwrap();
                let l = kids.pop().unwrap();
                let mut by_in: HashMap<Vec<bool>, Vec<(&Vec<u32>, &(i64, Vec<u32>))>, DetState> = HashMap::default();
                for (s, e) in &r {
                    by_in.entry(s.iter().map(|&x| x == DS_IN).collect()).or_default().push((s, e));
                }
                for (s, (a, wa)) in &l {
                    let key: Vec<bool> = s.iter().map(|&x| x == DS_IN).collect();
                    if let Some(list) = by_in.get(&key) {
                        for (rs, (b, wb)) in list {
                            let comb: Vec<u32> = s
                                .iter()
                                .zip(rs.iter())
                                .map(|(&x, &y)| {
                                    if x == DS_IN {
                                        DS_IN
                                    } else if x == DS_DOM || y == DS_DOM {
                                        DS_DOM
                                    } else {
                                        DS_UNDOM
                                    }
                                })
                                .collect();
                            offer(&mut t, comb, a + b, merge_sorted(wa, wb));
                        }
                    }
                }
            }
        }
        t
    })?;
    let (val, wit) = root.get(&Vec::new()).cloned().expect("full set always dominates");
    Ok(Solution { value: (-val) as usize, witness: wit.into_iter().map(|x| x as usize).collect(), stats })
}

/// Minimum dominating set using the expansion of a weighted decomposition.
pub fn solve_ds(g: &Graph, wtd: &WeightedTreeDecomposition, p: &Partition, budget: &DpBudget) -> Result<Solution> {
    let class_of = class_info(g, p)?;
    let td = expand_weighted(wtd, p);
    dominating_set_td(g, &td, Some(&class_of), budget.kappa, budget)
}

/// Proper `q`-coloring over a plain decomposition, if one exists.
pub fn coloring_td(
    g: &Graph,
    td: &TreeDecomposition,
    q: usize,
    budget: &DpBudget,
) -> Result<(Option<Vec<usize>>, DpStats)> {
    check_td(g, td)?;
    let nice = NiceTd::new(td);
    let mut stats = DpStats { width: td.width(), ..DpStats::default() };
    let root = run_dp::<Vec<(u32, u32)>>(&nice, budget, &mut stats, |_, node, mut kids| {
        let mut t: Table<Vec<(u32, u32)>> = Table::default();
        match node.kind {
            NiceKind::Leaf => offer(&mut t, Vec::new(), 0, Vec::new()),
            NiceKind::Introduce(v) => {
                let p = node.bag.binary_search(&v).unwrap();
                let old: Vec<usize> = node.bag.iter().copied().filter(|&u| u != v).collect();
                for (s, (val, w)) in kids.pop().unwrap() {
                    for c in 0..q as u32 {
                        if old.iter().zip(&s).all(|(&u, &cu)| cu != c || !g.has_edge(u, v)) {
                            let mut s2 = s.clone();
                            s2.insert(p, c);
                            offer(&mut t, s2, val, w.clone());
                        }
                    }
                }
            }
            NiceKind::Forget(u) => {
                let mut child_bag = node.bag.clone();
                insert_sorted(&mut child_bag, u);
                let p = child_bag.binary_search(&u).unwrap();
                for (mut s, (val, mut w)) in kids.pop().unwrap() {
                    let c = s.remove(p);
                    insert_sorted(&mut w, (u as u32, c));
                    offer(&mut t, s, val, w);
                }
            }
            NiceKind::Join => {
                let r = kids.pop().unwrap();
                let l = kids.pop().unwrap();
                for (s, (a, wa)) in l {
                    if let Some((b, wb)) = r.get(&s) {
                        offer(&mut t, s, a + b, merge_sorted(&wa, wb));
                    }
                }
            }
        }
        t
    })?;
    let col = root.get(&Vec::new()).map(|(_, w)| {
        let mut c = vec![0; g.n()];
        for &(v, x) in w {
            c[v as usize] = x as usize;
        }
        c
    });
    Ok((col, stats))
}

/// `q`-coloring with early rejection of classes larger than `kappa * q`.
pub fn solve_qcoloring(g: &Graph, q: usize, p: &Partition, budget: &DpBudget) -> Result<Option<Vec<usize>>> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    p.class_of(g.n())?;
    let kappa = p.kappa.max(1);
    if p.classes.iter().any(|c| c.len() > kappa * q) {
        return Ok(None);
    }
    let td = heuristic_decompose(g);
    Ok(coloring_td(g, &td, q, budget)?.0)
}

pub fn is_proper_coloring(g: &Graph, col: &[usize], q: usize) -> bool {
    col.len() == g.n() && col.iter().all(|&c| c < q) && g.edges().iter().all(|&(u, v)| col[u] != col[v])
}

const HC_DEG0: u32 = 0;
const HC_DEG2: u32 = 1;

fn hc_deg(e: u32) -> u32 {
    match e {
        HC_DEG0 => 0,
        HC_DEG2 => 2,
        _ => 1,
    }
}

/// Adds edge between bag positions `a` and `b`; `None` when infeasible.
fn hc_add(s: &mut [u32], bag: &[usize], a: usize, b: usize, closing_ok: bool, closed: &mut bool) -> Option<()> {
    let (ea, eb) = (s[a], s[b]);
    if ea == HC_DEG2 || eb == HC_DEG2 {
        return None;
    }
    match (ea, eb) {
        (HC_DEG0, HC_DEG0) => {
            s[a] = bag[b] as u32 + 2;
            s[b] = bag[a] as u32 + 2;
        }
        (HC_DEG0, _) | (_, HC_DEG0) => {
            let (z, o) = if ea == HC_DEG0 { (a, b) } else { (b, a) };
            let partner = s[o] - 2;
            let pp = bag.binary_search(&(partner as usize)).ok()?;
            s[pp] = bag[z] as u32 + 2;
            s[z] = partner + 2;
            s[o] = HC_DEG2;
        }
        _ => {
            if ea - 2 == bag[b] as u32 {
                if !closing_ok || *closed {
                    return None;
                }
                *closed = true;
                s[a] = HC_DEG2;
                s[b] = HC_DEG2;
            } else {
                let pa = bag.binary_search(&((ea - 2) as usize)).ok()?;
                let pb = bag.binary_search(&((eb - 2) as usize)).ok()?;
                s[pa] = eb;
                s[pb] = ea;
                s[a] = HC_DEG2;
                s[b] = HC_DEG2;
            }
        }
    }
    Some(())
}

/// Hamiltonian cycle over a plain decomposition, as a vertex sequence.
pub fn hamiltonian_td(g: &Graph, td: &TreeDecomposition, budget: &DpBudget) -> Result<(Option<Vec<usize>>, DpStats)> {
    check_td(g, td)?;
    let n = g.n();
    let mut stats = DpStats { width: td.width(), ..DpStats::default() };
    if n < 3 {
        return Ok((None, stats));
    }
    let nice = NiceTd::new(td);
    let root = run_dp::<Vec<(u32, u32)>>(&nice, budget, &mut stats, |x, node, mut kids| {
        let mut t: Table<Vec<(u32, u32)>> = Table::default();
        let final_ok = nice.seen[x] == n;
        match node.kind {
            NiceKind::Leaf => offer(&mut t, vec![0], 0, Vec::new()),
            NiceKind::Introduce(v) => {
                let p = node.bag.binary_search(&v).unwrap();
                for (mut s, (val, w)) in kids.pop().unwrap() {
                    if s[s.len() - 1] == 1 {
                        continue;
                    }
                    s.insert(p, HC_DEG0);
                    offer(&mut t, s, val, w);
                }
            }
            NiceKind::Forget(u) => {
                let mut cb = node.bag.clone();
                insert_sorted(&mut cb, u);
                let p = cb.binary_search(&u).unwrap();
                let nbrs: Vec<usize> = (0..cb.len()).filter(|&i| i != p && g.has_edge(u, cb[i])).collect();
                for (s, (val, w)) in kids.pop().unwrap() {
                    let closed0 = s[s.len() - 1] == 1;
                    let body = s[..s.len() - 1].to_vec();
                    let mut out = Vec::new();
                    hc_choose(&body, &cb, p, &nbrs, 0, closed0, final_ok, Vec::new(), &mut out);
                    for (mut b, closed, added) in out {
                        if b[p] != HC_DEG2 {
                            continue;
                        }
                        if closed && !closed0 && b.iter().any(|&e| e != HC_DEG2) {
                            continue;
                        }
                        b.remove(p);
                        b.push(u32::from(closed));
                        let mut w2 = w.clone();
                        for e in added {
                            insert_sorted(&mut w2, e);
                        }
                        offer(&mut t, b, val, w2);
                    }
                }
            }
            NiceKind::Join => {
                let r = kids.pop().unwrap();
                let l = kids.pop().unwrap();
                for (ls, (a, wa)) in &l {
                    for (rs, (b, wb)) in &r {
                        if let Some(s) = hc_join(ls, rs, &node.bag, final_ok) {
                            offer(&mut t, s, a + b, merge_sorted(wa, wb));
                        }
                    }
                }
            }
        }
        t
    })?;
    let cyc = root.get(&vec![1]).map(|(_, edges)| cycle_from_edges(n, edges));
    Ok((cyc.flatten(), stats))
}

#[allow(clippy::too_many_arguments)]
fn hc_choose(
    s: &[u32],
    bag: &[usize],
    p: usize,
    nbrs: &[usize],
    i: usize,
    closed: bool,
    final_ok: bool,
    added: Vec<(u32, u32)>,
    out: &mut Vec<(Vec<u32>, bool, Vec<(u32, u32)>)>,
) {
    if i == nbrs.len() || s[p] == HC_DEG2 || closed {
        out.push((s.to_vec(), closed, added));
        return;
    }
    hc_choose(s, bag, p, nbrs, i + 1, closed, final_ok, added.clone(), out);
    let mut s2 = s.to_vec();
    let mut c2 = closed;
    if hc_add(&mut s2, bag, p, nbrs[i], final_ok, &mut c2).is_some() {
        let (a, b) = (bag[p].min(bag[nbrs[i]]) as u32, bag[p].max(bag[nbrs[i]]) as u32);
        let mut ad = added;
        ad.push((a, b));
        hc_choose(&s2, bag, p, nbrs, i + 1, c2, final_ok, ad, out);
    }
}

fn hc_join(l: &[u32], r: &[u32], bag: &[usize], final_ok: bool) -> Option<Vec<u32>> {
    let k = bag.len();
    let (lc, rc) = (l[k] == 1, r[k] == 1);
    if lc || rc {
        if lc && rc {
            return None;
        }
        let other = if lc { r } else { l };
        if other[..k].iter().any(|&e| e != HC_DEG0) {
            return None;
        }
        return Some(if lc { l.to_vec() } else { r.to_vec() });
    }
    let mut deg = vec![0u32; k];
    for i in 0..k {
        deg[i] = hc_deg(l[i]) + hc_deg(r[i]);
        if deg[i] > 2 {
            return None;
        }
    }
    // abstract path edges from both sides
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for side in [l, r] {
        for i in 0..k {
            let e = side[i];
            if e >= 2 {
                let j = bag.binary_search(&((e - 2) as usize)).ok()?;
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (id, &(a, b)) in edges.iter().enumerate() {
        inc[a].push(id);
        inc[b].push(id);
    }
    let mut used = vec![false; edges.len()];
    let mut out: Vec<u32> = deg.iter().map(|&d| if d == 2 { HC_DEG2 } else { HC_DEG0 }).collect();
    for s in 0..k {
        if deg[s] != 1 || inc[s].is_empty() {
            continue;
        }
        if inc[s].iter().all(|&e| used[e]) {
            continue;
        }
        let mut cur = s;
        let mut prev = usize::MAX;
        loop {
            let next = inc[cur].iter().copied().find(|&e| e != prev && !used[e]);
            match next {
                Some(e) => {
                    used[e] = true;
                    prev = e;
                    let (a, b) = edges[e];
                    cur = if a == cur { b } else { a };
                }
                None => break,
            }
        }
        out[s] = bag[cur] as u32 + 2;
        out[cur] = bag[s] as u32 + 2;
    }
    let mut closed = false;
    if used.iter().any(|u| !u) {
        if !final_ok || deg.iter().any(|&d| d != 2) {
            return None;
        }
        // all remaining edges must form a single cycle through every bag vertex
        let start = used.iter().position(|u| !u)?;
        used[start] = true;
        let (first, mut cur) = edges[start];
        let mut prev = start;
        while let Some(e) = inc[cur].iter().copied().find(|&e| e != prev && !used[e]) {
            used[e] = true;
            prev = e;
            let (a, b) = edges[e];
            cur = if a == cur { b } else { a };
        }
        if cur != first || used.iter().any(|u| !u) {
            return None;
        }
        closed = true;
    }
    out.push(u32::from(closed));
    Some(out)
}

fn cycle_from_edges(n: usize, edges: &[(u32, u32)]) -> Option<Vec<usize>> {
    if edges.len() != n {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(b as usize);
        adj[b as usize].push(a as usize);
    }
    if adj.iter().any(|a| a.len() != 2) {
        return None;
    }
    let mut cyc = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    loop {
        let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
        if next == 0 {
            break;
        }
        prev = cur;
        cur = next;
        cyc.push(cur);
        if cyc.len() > n {
            return None;
        }
    }
    (cyc.len() == n).then_some(cyc)
}

pub fn is_hamiltonian_cycle(g: &Graph, cyc: &[usize]) -> bool {
    let n = g.n();
    if n < 3 || cyc.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cyc {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| g.has_edge(cyc[i], cyc[(i + 1) % n]))
}

/// Outcome of cross-edge pruning for Hamiltonian cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PruneResult {
    NotHamiltonian,
    Reduced(ReducedGraph),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedGraph {
    /// Class-internal edges plus the kept cross edges, on the kept vertices.
    pub graph: Graph,
    /// Original vertex of every reduced vertex.
    pub kept: Vec<usize>,
    /// Reduced representative of each class with dropped vertices, and those vertices.
    pub dropped: Vec<(usize, Vec<usize>)>,
    /// Largest number of kept vertices in one class.
    pub max_class_size: usize,
}

/// Keeps a bounded set of cross edges per pair of classes and drops vertices left without one.
///
/// For each adjacent pair of cliques with quotient degree bound `D`, either `4D+1` edges of a
/// maximum matching are kept, or, when the matching is smaller, up to `4D+1` edges at every
/// vertex of a minimum vertex cover of the cross edges.
pub fn prune_hamiltonian(g: &Graph, p: &Partition) -> Result<PruneResult> {
    let n = g.n();
    let class_of = p.class_of(n)?;
    for (i, c) in p.classes.iter().enumerate() {
        if !g.is_clique(c) {
            return Err(Error::InvalidArgument(format!("class {i} is not a clique")));
        }
    }
    if n < 3 {
        return Ok(PruneResult::NotHamiltonian);
    }
    let q = contract(g, p)?;
    if q.graph.components().len() > 1 {
        return Ok(PruneResult::NotHamiltonian);
    }
    let keep_per = 4 * q.graph.max_degree() + 1;
    let mut cross: HashMap<(usize, usize), Vec<(usize, usize)>, DetState> = HashMap::default();
    for (u, v) in g.edges() {
        let (a, b) = (class_of[u], class_of[v]);
        if a != b {
            let (key, e) = if a < b { ((a, b), (u, v)) } else { ((b, a), (v, u)) };
            cross.entry(key).or_default().push(e);
        }
    }
    let mut keys: Vec<(usize, usize)> = cross.keys().copied().collect();
    keys.sort_unstable();
    let mut kept_edges: Vec<(usize, usize)> = Vec::new();
    for key in keys {
        kept_edges.extend(select_cross(&cross[&key], keep_per));
    }
    let mut has_kept = vec![false; n];
    for &(u, v) in &kept_edges {
        has_kept[u] = true;
        has_kept[v] = true;
    }
    let mut keep = vec![false; n];
    let mut reps: Vec<(usize, Vec<usize>)> = Vec::new();
    for c in &p.classes {
        let rest: Vec<usize> = c.iter().copied().filter(|&v| !has_kept[v]).collect();
        for &v in c {
            keep[v] = has_kept[v];
        }
        if let Some((&r, others)) = rest.split_first() {
            keep[r] = true;
            if !others.is_empty() {
                reps.push((r, others.to_vec()));
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    let mut idx = vec![usize::MAX; n];
    for (i, &v) in kept.iter().enumerate() {
        idx[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = kept_edges.iter().map(|&(u, v)| (idx[u], idx[v])).collect();
    for c in &p.classes {
        let ks: Vec<usize> = c.iter().copied().filter(|&v| keep[v]).collect();
        for i in 0..ks.len() {
            for j in i + 1..ks.len() {
                edges.push((idx[ks[i]], idx[ks[j]]));
            }
        }
    }
    let graph = Graph::from_edges(kept.len(), &edges)?;
    let max_class_size = p.classes.iter().map(|c| c.iter().filter(|&&v| keep[v]).count()).max().unwrap_or(0);
    let dropped = reps.into_iter().map(|(r, d)| (idx[r], d)).collect();
    Ok(PruneResult::Reduced(ReducedGraph { graph, kept, dropped, max_class_size }))
}

/// Bounded edge subset of one bipartite cross-edge set; edges are (left, right).
fn select_cross(edges: &[(usize, usize)], keep: usize) -> Vec<(usize, usize)> {
    let mut left: Vec<usize> = edges.iter().map(|e| e.0).collect();
    let mut right: Vec<usize> = edges.iter().map(|e| e.1).collect();
    left.sort_unstable();
    left.dedup();
    right.sort_unstable();
    right.dedup();
    let li = |v: usize| left.binary_search(&v).unwrap();
    let ri = |v: usize| right.binary_search(&v).unwrap();
    let mut adj = vec![Vec::new(); left.len()];
    for &(u, v) in edges {
        adj[li(u)].push(ri(v));
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut match_r = vec![usize::MAX; right.len()];
    let mut match_l = vec![usize::MAX; left.len()];
    for u in 0..left.len() {
        let mut seen = vec![false; right.len()];
        augment(u, &adj, &mut match_l, &mut match_r, &mut seen);
    }
    let matching: Vec<(usize, usize)> =
        (0..left.len()).filter(|&u| match_l[u] != usize::MAX).map(|u| (left[u], right[match_l[u]])).collect();
    if matching.len() >= keep {
        return matching[..keep].to_vec();
    }
    // Koenig cover: unreached left vertices and reached right vertices
    let mut zl = vec![false; left.len()];
    let mut zr = vec![false; right.len()];
    let mut stack: Vec<usize> = (0..left.len()).filter(|&u| match_l[u] == usize::MAX).collect();
    for &u in &stack {
        zl[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !zr[v] && match_l[u] != v {
                zr[v] = true;
                let w = match_r[v];
                if w != usize::MAX && !zl[w] {
                    zl[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let mut out: Vec<(usize, usize)> = Vec::new();
    for u in 0..left.len() {
        if !zl[u] {
            out.extend(adj[u].iter().take(keep).map(|&v| (left[u], right[v])));
        }
    }
    for v in 0..right.len() {
        if zr[v] {
            let mut cnt = 0;
            for &(a, b) in edges {
                if b == right[v] && cnt < keep {
                    out.push((a, b));
                    cnt += 1;
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn augment(u: usize, adj: &[Vec<usize>], ml: &mut [usize], mr: &mut [usize], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if mr[v] == usize::MAX || augment(mr[v], adj, ml, mr, seen) {
            mr[v] = u;
            ml[u] = v;
            return true;
        }
    }
    false
}

/// Hamiltonian cycle of a graph with a clique partition, via pruning and a decomposition DP.
pub fn solve_hamiltonian(g: &Graph, p: &Partition, budget: &DpBudget) -> Result<(Option<Vec<usize>>, DpStats)> {
    let n = g.n();
    let red = match prune_hamiltonian(g, p)? {
        PruneResult::NotHamiltonian => return Ok((None, DpStats::default())),
        PruneResult::Reduced(r) => r,
    };
    if p.len() == 1 {
        return Ok((Some((0..n).collect()), DpStats::default()));
    }
    let td = heuristic_decompose(&red.graph);
    let (cyc, stats) = hamiltonian_td(&red.graph, &td, budget)?;
    let Some(cyc) = cyc else { return Ok((None, stats)) };
    let extra: HashMap<usize, &Vec<usize>> = red.dropped.iter().map(|(r, d)| (*r, d)).collect();
    let mut out = Vec::with_capacity(n);
    let m = cyc.len();
    for i in 0..m {
        let v = cyc[i];
        out.push(red.kept[v]);
        if let Some(d) = extra.get(&v) {
            // the representative's cycle neighbours lie in its own class
            let next = cyc[(i + 1) % m];
            debug_assert!(red.graph.has_edge(v, next));
            out.extend(d.iter().copied());
        }
    }
    if !is_hamiltonian_cycle(g, &out) {
        return Err(Error::Invalid("lifted cycle is not Hamiltonian".into()));
    }
    Ok((Some(out), stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    Is,
    Vc,
    Ds,
    QCol(usize),
    Hc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteAnswer {
    /// Optimum for is/vc/ds; number of colors or cycle length for feasible qcol/hc.
    pub value: Option<usize>,
    pub witness: Vec<usize>,
}

/// Exhaustive oracle: subsets for is/vc/ds (n <= 20), backtracking for qcol (n <= 20),
/// Held-Karp for hc (n <= 16).
pub fn brute_force(problem: Problem, g: &Graph) -> Result<BruteAnswer> {
    let n = g.n();
    let cap = if problem == Problem::Hc { 16 } else { 20 };
    if n > cap {
        return Err(Error::InvalidArgument(format!("brute force limited to n <= {cap}, got {n}")));
    }
    let nb: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let bits = |m: u32| (0..n).filter(|&v| m >> v & 1 == 1).collect::<Vec<usize>>();
    let full: u32 = if n == 0 { 0 } else { ((1u64 << n) - 1) as u32 };
    match problem {
        Problem::Is | Problem::Vc => {
            let mut best = 0u32;
            for m in 0..=full {
                if m.count_ones() > best.count_ones() && (0..n).all(|v| m >> v & 1 == 0 || nb[v] & m == 0) {
                    best = m;
                }
            }
            let m = if problem == Problem::Is { best } else { full & !best };
            Ok(BruteAnswer { value: Some(m.count_ones() as usize), witness: bits(m) })
        }
        Problem::Ds => {
            let mut best = full;
            for m in 0..=full {
                if m.count_ones() < best.count_ones() {
                    let dom = (0..n).fold(m, |acc, v| if m >> v & 1 == 1 { acc | nb[v] } else { acc });
                    if dom == full {
                        best = m;
                    }
                }
            }
            Ok(BruteAnswer { value: Some(best.count_ones() as usize), witness: bits(best) })
        }
        Problem::QCol(q) => {
            let mut col = vec![usize::MAX; n];
            let ok = color_bt(g, q, 0, &mut col);
            Ok(if ok {
                BruteAnswer { value: Some(q), witness: col }
            } else {
                BruteAnswer { value: None, witness: vec![] }
            })
        }
        Problem::Hc => Ok(match held_karp(&nb, n) {
            Some(c) => BruteAnswer { value: Some(n), witness: c },
            None => BruteAnswer { value: None, witness: vec![] },
        }),
    }
}

fn color_bt(g: &Graph, q: usize, v: usize, col: &mut [usize]) -> bool {
    if v == col.len() {
        return true;
    }
    for c in 0..q {
        if g.neighbors(v).iter().all(|&u| col[u] != c) {
            col[v] = c;
            if color_bt(g, q, v + 1, col) {
                return true;
            }
        }
    }
    col[v] = usize::MAX;
    false
}

fn held_karp(nb: &[u32], n: usize) -> Option<Vec<usize>> {
    if n < 3 {
        return None;
    }
    let full = 1usize << n;
    // reach[m] = set of end vertices of paths from 0 covering exactly m
    let mut reach = vec![0u32; full];
    reach[1] = 1;
    for m in 1..full {
        if m & 1 == 0 || reach[m] == 0 {
            continue;
        }
        let mut ends = reach[m];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut nx = nb[v] & !(m as u32);
            while nx != 0 {
                let w = nx.trailing_zeros() as usize;
                nx &= nx - 1;
                reach[m | 1 << w] |= 1 << w;
            }
        }
    }
    let last = full - 1;
    let v = (1..n).find(|&v| reach[last] >> v & 1 == 1 && nb[v] & 1 == 1)?;
    let mut path = vec![v];
    let mut m = last;
    let mut cur = v;
    while m != 1 {
        let pm = m & !(1 << cur);
        let prev = (0..n).find(|&u| reach[pm] >> u & 1 == 1 && nb[u] >> cur & 1 == 1).expect("consistent table");
        path.push(prev);
        m = pm;
        cur = prev;
    }
    path.reverse();
    Some(path)
}
