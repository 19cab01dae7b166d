//! Simple undirected graphs with sorted adjacency lists.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list; loops are rejected, duplicates merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Graph { adj })
    }

    pub(crate) fn from_sorted_adj(adj: Vec<Vec<usize>>) -> Self {
        Graph { adj }
    }

    pub fn complete(n: usize) -> Self {
        Graph { adj: (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect() }
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            e.push((n - 1, 0));
        }
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop at {u}");
        if let Err(i) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(i, v);
            let j = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(j, u);
        }
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, a) in self.adj.iter().enumerate() {
            for &v in a {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(i, &u)| vs[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_connected_subset(&self, vs: &[usize]) -> bool {
        if vs.is_empty() {
            return true;
        }
        let mut inside = vec![false; self.n()];
        for &v in vs {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![vs[0]];
        seen[vs[0]] = true;
        let mut cnt = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    cnt += 1;
                    stack.push(w);
                }
            }
        }
        cnt == vs.len()
    }

    /// Connected components of the graph minus the `removed` vertices, each sorted.
    pub fn components_without(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if removed[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut cur = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < cur.len() {
                let u = cur[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !removed[w] && comp[w] == usize::MAX {
                        comp[w] = id;
                        cur.push(w);
                    }
                }
            }
            cur.sort_unstable();
            out.push(cur);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_without(&vec![false; self.n()])
    }

    /// Subgraph induced by `vs`; vertex `i` of the result is `vs[i]`.
    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut idx = vec![usize::MAX; self.n()];
        for (i, &v) in vs.iter().enumerate() {
            idx[v] = i;
        }
        let adj = vs
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> =
                    self.adj[v].iter().filter(|&&w| idx[w] != usize::MAX).map(|&w| idx[w]).collect();
                a.sort_unstable();
                a
            })
            .collect();
        Graph { adj }
    }

    /// Hop distances from `s`, `usize::MAX` when unreachable, truncated beyond `limit`.
    pub fn bfs(&self, s: usize, limit: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.n()];
        d[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            if d[u] == limit {
                continue;
            }
            for &w in &self.adj[u] {
                if d[w] == usize::MAX {
                    d[w] = d[u] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    }

    /// Vertices within `r` hops of the set `s`, sorted.
    pub fn ball(&self, s: &[usize], r: usize) -> Vec<usize> {
        let mut d = vec![usize::MAX; self.n()];
        let mut q = VecDeque::new();
        for &v in s {
            if d[v] != 0 {
                d[v] = 0;
                q.push_back(v);
            }
        }
        while let Some(u) = q.pop_front() {
            if d[u] == r {
                continue;
            }
            for &w in &self.adj[u] {
                if d[w] == usize::MAX {
                    d[w] = d[u] + 1;
                    q.push_back(w);
                }
            }
        }
        (0..self.n()).filter(|&v| d[v] != usize::MAX).collect()
    }

    /// `G^k`: edges between vertices at hop distance `1..=k`.
    pub fn power(&self, k: usize) -> Graph {
        let adj = (0..self.n())
            .map(|v| {
                let d = self.bfs(v, k);
                (0..self.n()).filter(|&u| u != v && d[u] <= k).collect()
            })
            .collect();
        Graph { adj }
    }

    /// `k`-fold blowup: vertex `v` becomes the clique `v*k .. v*k+k-1`.
    pub fn blowup(&self, k: usize) -> Graph {
        let n = self.n() * k;
        let mut adj = vec![Vec::new(); n];
        for v in 0..self.n() {
            for i in 0..k {
                let a = &mut adj[v * k + i];
                let mut nb: Vec<usize> = Vec::new();
                for &w in self.adj[v].iter().chain(std::iter::once(&v)) {
                    for j in 0..k {
                        if w * k + j != v * k + i {
                            nb.push(w * k + j);
                        }
                    }
                }
                nb.sort_unstable();
                *a = nb;
            }
        }
        Graph { adj }
    }
}
