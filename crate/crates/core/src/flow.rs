//! Augmenting-path max-flow on undirected multigraphs with unit edge
//! capacities (an edge of multiplicity m carries up to m units).

use std::collections::VecDeque;

use crate::multigraph::{MultiGraph, VertexSet};

struct Arc {
    to: usize,
    cap: u32,
}

/// Residual network: arcs `2i` and `2i+1` are the two directions of the
/// i-th distinct edge, each with capacity equal to the multiplicity.
struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    base: Vec<u32>,
}

impl Network {
    fn new(g: &MultiGraph) -> Self {
        let mut arcs = Vec::with_capacity(2 * g.edges().len());
        let mut out = vec![Vec::new(); g.n()];
        let mut base = Vec::with_capacity(2 * g.edges().len());
        for &(u, v, m) in g.edges() {
            out[u].push(arcs.len());
            arcs.push(Arc { to: v, cap: m });
            out[v].push(arcs.len());
            arcs.push(Arc { to: u, cap: m });
            base.push(m);
            base.push(m);
        }
        Network { arcs, out, base }
    }

    /// One BFS augmentation by a single unit. Returns false if the sink
    /// side is unreachable.
    fn augment(&mut self, s: &VertexSet, t: &VertexSet) -> bool {
        let n = self.out.len();
        let mut via = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for v in s.iter() {
            seen[v] = true;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            if t.contains(v) {
                let mut x = v;
                while via[x] != usize::MAX {
                    let a = via[x];
                    self.arcs[a].cap -= 1;
                    self.arcs[a ^ 1].cap += 1;
                    x = self.arcs[a ^ 1].to;
                }
                return true;
            }
            for &a in &self.out[v] {
                let w = self.arcs[a].to;
                if self.arcs[a].cap > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = a;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn reachable(&self, s: &VertexSet) -> VertexSet {
        let mut seen = s.clone();
        let mut stack: Vec<usize> = s.to_vec();
        while let Some(v) = stack.pop() {
            for &a in &self.out[v] {
                let w = self.arcs[a].to;
                if self.arcs[a].cap > 0 && !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Net flow along arc `a` (positive means along its direction).
    fn net(&self, a: usize) -> i64 {
        self.base[a] as i64 - self.arcs[a].cap as i64
    }
}

/// Result of a max-flow computation between two disjoint vertex sets.
#[derive(Clone, Debug)]
pub struct FlowResult {
    pub value: usize,
    /// Source side of a minimum cut: vertices reachable from `s` in the
    /// residual network. Only meaningful when the flow was not capped.
    pub source_side: VertexSet,
}

/// Maximum number of edge-disjoint paths from `s` to `t`, stopping early
/// once `cap` units have been routed.
pub fn max_flow(g: &MultiGraph, s: &VertexSet, t: &VertexSet, cap: Option<usize>) -> FlowResult {
    let (value, net) = run(g, s, t, cap);
    FlowResult { value, source_side: net.reachable(s) }
}

fn run(g: &MultiGraph, s: &VertexSet, t: &VertexSet, cap: Option<usize>) -> (usize, Network) {
    let mut net = Network::new(g);
    let mut value = 0;
    if s.is_empty() || t.is_empty() || !s.is_disjoint(t) {
        return (0, net);
    }
    while cap.is_none_or(|c| value < c) && net.augment(s, t) {
        value += 1;
    }
    (value, net)
}

/// Returns `k` pairwise edge-disjoint paths from `s` to `t` if the maximum
/// flow is at least `k`.
pub fn edge_disjoint_paths(
    g: &MultiGraph,
    s: &VertexSet,
    t: &VertexSet,
    k: usize,
) -> Option<Vec<Vec<usize>>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let (value, net) = run(g, s, t, Some(k));
    if value < k {
        return None;
    }
    // Remaining units of net flow on each arc; decompose greedily.
    let mut units: Vec<i64> = (0..net.arcs.len()).map(|a| net.net(a).max(0)).collect();
    let mut paths = Vec::with_capacity(k);
    for start in s.iter() {
        loop {
            if paths.len() == k {
                return Some(paths);
            }
            let Some(path) = walk(&net, &mut units, start, t) else { break };
            paths.push(path);
        }
    }
    (paths.len() == k).then_some(paths)
}

fn walk(net: &Network, units: &mut [i64], start: usize, t: &VertexSet) -> Option<Vec<usize>> {
    if !net.out[start].iter().any(|&a| units[a] > 0) {
        return None;
    }
    let mut path = vec![start];
    let mut v = start;
    while !t.contains(v) {
        let a = *net.out[v].iter().find(|&&a| units[a] > 0)?;
        units[a] -= 1;
        v = net.arcs[a].to;
        // Cut out a loop if we revisit a vertex; the loop's flow stays spent.
        if let Some(i) = path.iter().position(|&x| x == v) {
            path.truncate(i + 1);
        } else {
            path.push(v);
        }
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_edge_has_two_paths() {
        let g = MultiGraph::build(2, &[(0, 1, 2)]).unwrap();
        let s = VertexSet::from_slice(2, &[0]);
        let t = VertexSet::from_slice(2, &[1]);
        let paths = edge_disjoint_paths(&g, &s, &t, 2).unwrap();
        assert_eq!(paths, vec![vec![0, 1], vec![0, 1]]);
        assert!(edge_disjoint_paths(&g, &s, &t, 3).is_none());
    }

    #[test]
    fn path_ends_have_one_path() {
        let g = MultiGraph::build(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let s = VertexSet::from_slice(3, &[0]);
        let t = VertexSet::from_slice(3, &[2]);
        assert!(edge_disjoint_paths(&g, &s, &t, 2).is_none());
        assert_eq!(max_flow(&g, &s, &t, None).value, 1);
    }

    #[test]
    fn min_cut_side() {
        let g = MultiGraph::build(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 3)]).unwrap();
        let r = max_flow(&g, &VertexSet::from_slice(4, &[0]), &VertexSet::from_slice(4, &[3]), None);
        assert_eq!(r.value, 1);
        assert_eq!(r.source_side.to_vec(), vec![0, 1]);
    }
}
