//! Loopless undirected multigraphs on dense vertex indices.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default vertex-count ceiling for [`MultiGraph::canonical_code`].
pub const CANONICAL_LIMIT: usize = 10;

/// Set of vertices of a host graph with `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_slice(n: usize, vs: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &v in vs {
            s.insert(v);
        }
        s
    }

    /// Builds a set from the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n.min(64) {
            if mask >> v & 1 == 1 {
                s.insert(v);
            }
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} outside universe {}", self.n);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        if v < self.n {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.contains(v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = Self::empty(self.n);
        for v in 0..self.n {
            if !self.contains(v) {
                s.insert(v);
            }
        }
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
        s
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }
}

/// Loopless multigraph. Edges are stored once per unordered pair with a
/// multiplicity; adjacency lists are sorted by neighbor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize, u32)>,
    adj: Vec<Vec<(usize, u32)>>,
    total: usize,
}

impl MultiGraph {
    /// Builds a graph; repeated pairs have their multiplicities summed and
    /// zero multiplicities are ignored.
    pub fn build(n: usize, edge_list: &[(usize, usize, u32)]) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for &(u, v, m) in edge_list {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, n });
                }
            }
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            if m > 0 {
                *map.entry((u.min(v), u.max(v))).or_insert(0) += m;
            }
        }
        Ok(Self::from_map(n, map))
    }

    fn from_map(n: usize, map: BTreeMap<(usize, usize), u32>) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(map.len());
        let mut total = 0;
        for ((u, v), m) in map {
            adj[u].push((v, m));
            adj[v].push((u, m));
            edges.push((u, v, m));
            total += m as usize;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        MultiGraph { n, edges, adj, total }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_map(n, BTreeMap::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.total
    }

    /// Distinct vertex pairs `(u, v, multiplicity)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().map(|&(_, m)| m as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        match self.adj.get(u) {
            Some(list) => list
                .binary_search_by_key(&v, |&(w, _)| w)
                .map(|i| list[i].1)
                .unwrap_or(0),
            None => 0,
        }
    }

    /// Edges with exactly one endpoint in `s`, counted with multiplicity.
    pub fn delta(&self, s: &VertexSet) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| s.contains(u) != s.contains(v))
            .map(|&(_, _, m)| m as usize)
            .sum()
    }

    /// Same as [`delta`](Self::delta) for a membership slice.
    pub fn delta_of(&self, inside: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| inside[u] != inside[v])
            .map(|&(_, _, m)| m as usize)
            .sum()
    }

    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = VertexSet::empty(self.n);
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &(w, _) in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> MultiGraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut map = BTreeMap::new();
        for &(u, v, m) in &self.edges {
            let (a, b) = (index[u], index[v]);
            if a != usize::MAX && b != usize::MAX {
                map.insert((a.min(b), a.max(b)), m);
            }
        }
        Self::from_map(vertices.len(), map)
    }

    pub fn disjoint_union(&self, other: &MultiGraph) -> MultiGraph {
        let mut map: BTreeMap<(usize, usize), u32> =
            self.edges.iter().map(|&(u, v, m)| ((u, v), m)).collect();
        for &(u, v, m) in &other.edges {
            map.insert((u + self.n, v + self.n), m);
        }
        Self::from_map(self.n + other.n, map)
    }

    /// Returns a copy with `m` more copies of the edge `uv`.
    pub fn with_edge(&self, u: usize, v: usize, m: u32) -> Result<MultiGraph> {
        let mut list = self.edges.clone();
        list.push((u, v, m));
        Self::build(self.n, &list)
    }

    /// Returns a copy with one copy of the edge `uv` removed.
    pub fn without_edge_copy(&self, u: usize, v: usize) -> Result<MultiGraph> {
        let key = (u.min(v), u.max(v));
        let mut map: BTreeMap<(usize, usize), u32> =
            self.edges.iter().map(|&(a, b, m)| ((a, b), m)).collect();
        match map.get_mut(&key) {
            Some(m) if *m > 1 => *m -= 1,
            Some(_) => {
                map.remove(&key);
            }
            None => return Err(Error::NoSuchEdge(u, v)),
        }
        Ok(Self::from_map(self.n, map))
    }

    /// Deletes `v` and its edges; higher indices shift down by one.
    pub fn without_vertex(&self, v: usize) -> MultiGraph {
        let keep: Vec<usize> = (0..self.n).filter(|&x| x != v).collect();
        self.induced(&keep)
    }

    /// Lifts the pair `uv`, `vw` to a single edge `uw` (requires `u != w`).
    pub fn lift(&self, u: usize, v: usize, w: usize) -> Result<MultiGraph> {
        if u == w {
            return Err(Error::LoopEdge(u));
        }
        self.without_edge_copy(u, v)?
            .without_edge_copy(v, w)?
            .with_edge(u, w, 1)
    }

    /// Replaces one copy of `uv` by a path through a fresh vertex `n`.
    pub fn subdivide(&self, u: usize, v: usize) -> Result<MultiGraph> {
        let g = self.without_edge_copy(u, v)?;
        let mut list = g.edges.clone();
        list.push((u, self.n, 1));
        list.push((v, self.n, 1));
        Self::build(self.n + 1, &list)
    }

    /// Exhaustively dissolves vertices of degree 2 with two distinct
    /// neighbors. The result is compacted; the trace maps it back.
    pub fn dissolve_degree2(&self) -> (MultiGraph, ReductionTrace) {
        let mut work = WorkGraph::from_graph(self);
        let mut events = Vec::new();
        // Dissolving never creates a new candidate: degrees are unchanged and
        // distinct-neighbor counts only drop. One pass in index order suffices.
        for v in 0..self.n {
            if let Some((a, b)) = work.dissolvable(v) {
                work.dissolve(v, a, b);
                events.push(TraceEvent::Dissolved { v, a, b });
            }
        }
        let (h, kept) = work.compact();
        (h, ReductionTrace { original_n: self.n, events, kept })
    }

    /// Canonical code with the default size limit.
    pub fn canonical_code(&self) -> Result<Vec<u8>> {
        self.canonical_code_with_limit(CANONICAL_LIMIT)
    }

    /// Byte string equal for two graphs iff they are isomorphic. Uses an
    /// ordered equitable partition plus individualization; twin cells are
    /// collapsed to one branch.
    pub fn canonical_code_with_limit(&self, limit: usize) -> Result<Vec<u8>> {
        if self.n > limit {
            return Err(Error::TooLarge { size: self.n, limit });
        }
        if self.edges.iter().any(|&(_, _, m)| m > u16::MAX as u32) {
            return Err(Error::TooLarge { size: self.total, limit: u16::MAX as usize });
        }
        let n = self.n;
        let mut w = vec![0u32; n * n];
        for &(u, v, m) in &self.edges {
            w[u * n + v] = m;
            w[v * n + u] = m;
        }
        let canon = Canon { n, w };
        let mut best: Option<Vec<u8>> = None;
        let start = if n == 0 { Vec::new() } else { vec![(0..n).collect::<Vec<_>>()] };
        canon.search(start, &mut best);
        Ok(best.unwrap_or_else(|| vec![0, 0]))
    }
}

struct Canon {
    n: usize,
    w: Vec<u32>,
}

impl Canon {
    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let n = self.n;
        loop {
            let mut cell_of = vec![0; n];
            for (c, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = c;
                }
            }
            let mut next = Vec::with_capacity(cells.len());
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut sig = vec![0u32; cells.len()];
                        for u in 0..n {
                            sig[cell_of[u]] += self.w[v * n + u];
                        }
                        (sig, v)
                    })
                    .collect();
                keyed.sort();
                let mut group = vec![keyed[0].1];
                for i in 1..keyed.len() {
                    if keyed[i].0 != keyed[i - 1].0 {
                        next.push(std::mem::take(&mut group));
                    }
                    group.push(keyed[i].1);
                }
                next.push(group);
            }
            if next.len() == cells.len() {
                return next;
            }
            cells = next;
        }
    }

    fn twins(&self, cell: &[usize]) -> bool {
        let n = self.n;
        let a = cell[0];
        cell[1..].iter().all(|&b| {
            (0..n).all(|x| x == a || x == b || self.w[a * n + x] == self.w[b * n + x])
        })
    }

    fn search(&self, cells: Vec<Vec<usize>>, best: &mut Option<Vec<u8>>) {
        let cells = self.refine(cells);
        let Some(c) = cells.iter().position(|cell| cell.len() > 1) else {
            let perm: Vec<usize> = cells.into_iter().flatten().collect();
            let code = self.code(&perm);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        };
        let cell = &cells[c];
        let choices: Vec<usize> = if self.twins(cell) { vec![cell[0]] } else { cell.clone() };
        for v in choices {
            let mut next = cells[..c].to_vec();
            next.push(vec![v]);
            next.push(cell.iter().copied().filter(|&x| x != v).collect());
            next.extend_from_slice(&cells[c + 1..]);
            self.search(next, best);
        }
    }

    fn code(&self, perm: &[usize]) -> Vec<u8> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 + n * n);
        out.extend_from_slice(&(n as u16).to_be_bytes());
        for i in 0..n {
            for j in i + 1..n {
                out.extend_from_slice(&(self.w[perm[i] * n + perm[j]] as u16).to_be_bytes());
            }
        }
        out
    }
}

/// Mutable adjacency used while performing surgeries on original indices.
#[derive(Clone, Debug)]
pub(crate) struct WorkGraph {
    pub(crate) adj: Vec<BTreeMap<usize, u32>>,
    pub(crate) alive: Vec<bool>,
}

impl WorkGraph {
    pub(crate) fn from_graph(g: &MultiGraph) -> Self {
        let mut adj = vec![BTreeMap::new(); g.n];
        for &(u, v, m) in &g.edges {
            adj[u].insert(v, m);
            adj[v].insert(u, m);
        }
        WorkGraph { adj, alive: vec![true; g.n] }
    }

    pub(crate) fn degree(&self, v: usize) -> usize {
        self.adj[v].values().map(|&m| m as usize).sum()
    }

    pub(crate) fn dissolvable(&self, v: usize) -> Option<(usize, usize)> {
        if !self.alive[v] || self.adj[v].len() != 2 || self.degree(v) != 2 {
            return None;
        }
        let mut it = self.adj[v].keys();
        Some((*it.next()?, *it.next()?))
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize, m: u32) {
        *self.adj[u].entry(v).or_insert(0) += m;
        *self.adj[v].entry(u).or_insert(0) += m;
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize, m: u32) {
        for (a, b) in [(u, v), (v, u)] {
            let e = self.adj[a].get_mut(&b).expect("edge present");
            *e -= m;
            if *e == 0 {
                self.adj[a].remove(&b);
            }
        }
    }

    pub(crate) fn remove_vertex(&mut self, v: usize) {
        let nbrs: Vec<(usize, u32)> = self.adj[v].iter().map(|(&u, &m)| (u, m)).collect();
        for (u, m) in nbrs {
            self.remove_edge(v, u, m);
        }
        self.alive[v] = false;
    }

    pub(crate) fn dissolve(&mut self, v: usize, a: usize, b: usize) {
        self.remove_vertex(v);
        self.add_edge(a, b, 1);
    }

    /// Compacts live vertices; returns the graph and the original index of
    /// each new vertex.
    pub(crate) fn compact(&self) -> (MultiGraph, Vec<usize>) {
        let kept: Vec<usize> = (0..self.alive.len()).filter(|&v| self.alive[v]).collect();
        let mut index = vec![usize::MAX; self.alive.len()];
        for (i, &v) in kept.iter().enumerate() {
            index[v] = i;
        }
        let mut map = BTreeMap::new();
        for &u in &kept {
            for (&v, &m) in &self.adj[u] {
                if u < v {
                    map.insert((index[u], index[v]), m);
                }
            }
        }
        (MultiGraph::from_map(kept.len(), map), kept)
    }
}

/// One surgery performed by a reduction step. All indices refer to the
/// original graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEvent {
    Dissolved { v: usize, a: usize, b: usize },
    DeletedLeaf { v: usize, attached_to: usize },
    RemovedCycleEdge { u: usize, v: usize, witness_path: Vec<usize> },
}

/// Log of surgeries plus the relabeling `kept[i] = original index of
/// reduced vertex i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub original_n: usize,
    pub events: Vec<TraceEvent>,
    pub kept: Vec<usize>,
}

impl ReductionTrace {
    pub fn identity(n: usize) -> Self {
        ReductionTrace { original_n: n, events: Vec::new(), kept: (0..n).collect() }
    }

    /// Replays the log backward on the reduced graph `h`, rebuilding the
    /// original graph on its original indices.
    pub fn replay(&self, h: &MultiGraph) -> Result<MultiGraph> {
        if h.n() != self.kept.len() {
            return Err(Error::TraceMismatch);
        }
        let mut work = WorkGraph {
            adj: vec![BTreeMap::new(); self.original_n],
            alive: vec![false; self.original_n],
        };
        for &v in &self.kept {
            work.alive[v] = true;
        }
        for &(u, v, m) in h.edges() {
            work.add_edge(self.kept[u], self.kept[v], m);
        }
        for event in self.events.iter().rev() {
            match *event {
                TraceEvent::RemovedCycleEdge { u, v, .. } => work.add_edge(u, v, 1),
                TraceEvent::DeletedLeaf { v, attached_to } => {
                    work.alive[v] = true;
                    work.add_edge(v, attached_to, 1);
                }
                TraceEvent::Dissolved { v, a, b } => {
                    if work.adj[a].get(&b).copied().unwrap_or(0) == 0 {
                        return Err(Error::TraceMismatch);
                    }
                    work.remove_edge(a, b, 1);
                    work.alive[v] = true;
                    work.add_edge(v, a, 1);
                    work.add_edge(v, b, 1);
                }
            }
        }
        if work.alive.iter().any(|&a| !a) {
            return Err(Error::TraceMismatch);
        }
        Ok(work.compact().0)
    }

    /// Appends the events of `later`, which was computed on the graph this
    /// trace reduces to.
    pub fn then(mut self, later: &ReductionTrace) -> ReductionTrace {
        let map = |x: usize| self.kept[x];
        for e in &later.events {
            self.events.push(match e {
                TraceEvent::Dissolved { v, a, b } => {
                    TraceEvent::Dissolved { v: map(*v), a: map(*a), b: map(*b) }
                }
                TraceEvent::DeletedLeaf { v, attached_to } => {
                    TraceEvent::DeletedLeaf { v: map(*v), attached_to: map(*attached_to) }
                }
                TraceEvent::RemovedCycleEdge { u, v, witness_path } => {
                    TraceEvent::RemovedCycleEdge {
                        u: map(*u),
                        v: map(*v),
                        witness_path: witness_path.iter().map(|&x| map(x)).collect(),
                    }
                }
            });
        }
        self.kept = later.kept.iter().map(|&x| self.kept[x]).collect();
        self
    }
}

/// Breadth-first distances from `source`, `usize::MAX` when unreachable.
pub fn bfs_distances(g: &MultiGraph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}
