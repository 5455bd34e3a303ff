//! One reduction step: dissolve degree-2 vertices, then either drop leaves
//! or break short disjoint cycles, shrinking the edge count by a fixed
//! fraction while at most doubling the width of any lifted ordering.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraph, ReductionTrace, TraceEvent, WorkGraph};
use crate::ordering::Ordering;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TooWideReason {
    /// A vertex is incident to more than `2k` edges.
    Degree { vertex: usize, degree: usize },
    /// The ball around `center` is acyclic and free of leaves, so it holds a
    /// perfect binary tree too wide for `k`.
    AcyclicBall { center: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReduceCase {
    Leaves,
    Cycles,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReduceOutcome {
    TooWide(TooWideReason),
    /// Nothing removable, or the guaranteed shrink fraction was missed.
    NoProgress,
    Reduced { graph: MultiGraph, trace: ReductionTrace, case: ReduceCase },
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

fn base_pow(k: usize, e: usize) -> BigUint {
    big(2 * k + 1).pow(e as u32)
}

/// `(2k+1)^(4(k+1)+3)`: the denominator of the guaranteed shrink.
pub fn shrink_denominator(k: usize) -> BigUint {
    base_pow(k, 4 * (k + 1) + 3)
}

/// Exact test of `after <= before * (1 - 1/(2k+1)^(4(k+1)+3))`.
pub fn meets_shrink(before: usize, after: usize, k: usize) -> bool {
    let d = shrink_denominator(k);
    big(after) * &d <= big(before) * (d - 1u32)
}

/// Greedy centers at pairwise distance above `4(k+1)` whose balls of that
/// radius cover the graph. A vertex is re-explored only when its distance
/// to the nearest center strictly drops.
pub fn pack_balls(g: &MultiGraph, k: usize) -> Vec<usize> {
    let radius = 4 * (k + 1);
    let mut dist = vec![usize::MAX; g.n()];
    let mut centers = Vec::new();
    for c in 0..g.n() {
        if dist[c] != usize::MAX {
            continue;
        }
        centers.push(c);
        dist[c] = 0;
        let mut queue = VecDeque::from([(c, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for &(w, _) in g.neighbors(v) {
                if d + 1 < dist[w] {
                    dist[w] = d + 1;
                    queue.push_back((w, d + 1));
                }
            }
        }
    }
    centers
}

/// Vertices within `radius` of `center`, in BFS order, with their depths.
fn ball(g: &MultiGraph, center: usize, radius: usize) -> (Vec<usize>, HashMap<usize, usize>) {
    let mut depth = HashMap::from([(center, 0)]);
    let mut order = vec![center];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        let d = depth[&v];
        if d == radius {
            continue;
        }
        for &(w, _) in g.neighbors(v) {
            if let Entry::Vacant(e) = depth.entry(w) {
                e.insert(d + 1);
                order.push(w);
            }
        }
    }
    (order, depth)
}

/// A cycle of the subgraph induced by the ball, as a vertex sequence
/// closing back to its first vertex; a doubled edge gives a 2-cycle.
pub fn find_ball_cycle(g: &MultiGraph, center: usize, radius: usize) -> Option<Vec<usize>> {
    let (mut order, depth) = ball(g, center, radius);
    let inner_edges = |order: &[usize]| {
        let mut e: Vec<(usize, usize, u32)> = order
            .iter()
            .flat_map(|&u| g.neighbors(u).iter().map(move |&(v, m)| (u, v, m)))
            .filter(|&(u, v, _)| u < v && depth.contains_key(&v))
            .collect();
        e.sort_unstable();
        e
    };
    order.sort_unstable();
    let edges = inner_edges(&order);
    if let Some(&(u, v, _)) = edges.iter().find(|e| e.2 >= 2) {
        return Some(vec![u, v]);
    }
    // BFS tree inside the ball; the first non-tree edge closes a cycle.
    let mut parent: HashMap<usize, usize> = HashMap::new();
    for &v in &order {
        if v == center {
            continue;
        }
        let p = g
            .neighbors(v)
            .iter()
            .map(|&(w, _)| w)
            .filter(|w| depth.get(w).is_some_and(|&d| d + 1 == depth[&v]))
            .min()
            .expect("bfs parent");
        parent.insert(v, p);
    }
    let is_tree = |u: usize, v: usize| parent.get(&u) == Some(&v) || parent.get(&v) == Some(&u);
    let &(u, v, _) = edges.iter().find(|&&(u, v, _)| !is_tree(u, v))?;
    let (mut a, mut b) = (u, v);
    let mut left = vec![a];
    let mut right = vec![b];
    while a != b {
        if depth[&a] >= depth[&b] {
            a = parent[&a];
            left.push(a);
        } else {
            b = parent[&b];
            right.push(b);
        }
    }
    right.pop();
    right.reverse();
    left.extend(right);
    Some(left)
}

/// One reduction step on a connected graph.
pub fn reduce_step(g: &MultiGraph, k: usize) -> ReduceOutcome {
    for v in 0..g.n() {
        if g.degree(v) > 2 * k {
            return ReduceOutcome::TooWide(TooWideReason::Degree { vertex: v, degree: g.degree(v) });
        }
    }
    if g.edge_count() == 0 {
        return ReduceOutcome::NoProgress;
    }
    let (gd, dissolved) = g.dissolve_degree2();
    let m = gd.edge_count();
    let leaves: Vec<usize> = (0..gd.n()).filter(|&v| gd.degree(v) == 1).collect();

    let mut work = WorkGraph::from_graph(&gd);
    let mut events = Vec::new();
    let case;
    if big(leaves.len()) * base_pow(k, 4 * (k + 1) + 2) >= big(m) {
        case = ReduceCase::Leaves;
        let mut edges_left = m;
        let mut attach: Vec<usize> = leaves.iter().map(|&v| gd.neighbors(v)[0].0).collect();
        attach.sort_unstable();
        attach.dedup();
        for a in attach {
            if !work.alive[a] || edges_left <= 1 {
                continue;
            }
            let leaf = work.adj[a].keys().copied().find(|&x| work.alive[x] && gd.degree(x) == 1);
            if let Some(v) = leaf {
                work.remove_vertex(v);
                edges_left -= 1;
                events.push(TraceEvent::DeletedLeaf { v, attached_to: a });
            }
        }
    } else {
        case = ReduceCase::Cycles;
        let is_leaf = {
            let mut f = vec![false; gd.n()];
            for &v in &leaves {
                f[v] = true;
            }
            f
        };
        let radius = 2 * (k + 1);
        for c in pack_balls(&gd, k) {
            let (members, _) = ball(&gd, c, radius);
            if members.iter().any(|&v| is_leaf[v]) {
                continue;
            }
            let Some(cycle) = find_ball_cycle(&gd, c, radius) else {
                return ReduceOutcome::TooWide(TooWideReason::AcyclicBall { center: dissolved.kept[c] });
            };
            let len = cycle.len();
            let (cut, _) = (0..len)
                .map(|i| {
                    let (x, y) = (cycle[i], cycle[(i + 1) % len]);
                    (i, (x.min(y), x.max(y)))
                })
                .min_by_key(|&(_, e)| e)
                .expect("nonempty cycle");
            let (x, y) = (cycle[cut], cycle[(cut + 1) % len]);
            // The rest of the cycle, walked from x the long way round to y.
            let witness: Vec<usize> = (0..len).map(|j| cycle[(cut + len - j) % len]).collect();
            debug_assert_eq!(*witness.last().unwrap(), y);
            work.remove_edge(x, y, 1);
            events.push(TraceEvent::RemovedCycleEdge { u: x, v: y, witness_path: witness });
        }
    }
    let (h, kept) = work.compact();
    let second = ReductionTrace { original_n: gd.n(), events, kept };
    let trace = dissolved.then(&second);
    if trace.events.is_empty() || !meets_shrink(g.edge_count(), h.edge_count(), k) {
        return ReduceOutcome::NoProgress;
    }
    ReduceOutcome::Reduced { graph: h, trace, case }
}

/// Linked list with monotone labels so "which comes first" is O(1);
/// labels are respread when a gap closes.
struct Sequence {
    next: Vec<usize>,
    label: Vec<u128>,
    present: Vec<bool>,
    head: usize,
}

const NIL: usize = usize::MAX;
const SPREAD: u128 = 1 << 64;

impl Sequence {
    fn new(n: usize, init: &[usize]) -> Self {
        let mut s = Sequence { next: vec![NIL; n], label: vec![0; n], present: vec![false; n], head: NIL };
        for w in init.windows(2) {
            s.next[w[0]] = w[1];
        }
        s.head = init.first().copied().unwrap_or(NIL);
        for &v in init {
            s.present[v] = true;
        }
        s.respread();
        s
    }

    fn respread(&mut self) {
        let mut x = self.head;
        let mut l = SPREAD;
        while x != NIL {
            self.label[x] = l;
            l += SPREAD;
            x = self.next[x];
        }
    }

    fn insert_after(&mut self, x: usize, v: usize) {
        loop {
            let nx = self.next[x];
            let hi = if nx == NIL { self.label[x] + 2 * SPREAD } else { self.label[nx] };
            if hi - self.label[x] >= 2 {
                self.label[v] = self.label[x] + (hi - self.label[x]) / 2;
                break;
            }
            self.respread();
        }
        self.next[v] = self.next[x];
        self.next[x] = v;
        self.present[v] = true;
    }

    fn into_vec(self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = self.head;
        while x != NIL {
            out.push(x);
            x = self.next[x];
        }
        out
    }
}

/// Lifts an ordering of the reduced graph to the original graph: leaves go
/// right after their attachment, dissolved vertices right after the earlier
/// of their two neighbours, removed edges change nothing.
pub fn lift_ordering(trace: &ReductionTrace, tau: &Ordering) -> Result<Ordering> {
    if tau.len() != trace.kept.len() {
        return Err(Error::TraceMismatch);
    }
    let n = trace.original_n;
    let init: Vec<usize> = tau.as_slice().iter().map(|&i| trace.kept[i]).collect();
    let mut seq = Sequence::new(n, &init);
    let check = |seq: &Sequence, x: usize| if x < n && seq.present[x] { Ok(x) } else { Err(Error::TraceMismatch) };
    for e in trace.events.iter().rev() {
        let (v, after) = match *e {
            TraceEvent::RemovedCycleEdge { .. } => continue,
            TraceEvent::DeletedLeaf { v, attached_to } => (v, check(&seq, attached_to)?),
            TraceEvent::Dissolved { v, a, b } => {
                let (a, b) = (check(&seq, a)?, check(&seq, b)?);
                (v, if seq.label[a] < seq.label[b] { a } else { b })
            }
        };
        if v >= n || seq.present[v] {
            return Err(Error::TraceMismatch);
        }
        seq.insert_after(after, v);
    }
    Ordering::new(seq.into_vec()).map_err(|_| Error::TraceMismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::width;

    fn path(n: usize) -> MultiGraph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i, 1)).collect();
        MultiGraph::build(n, &e).unwrap()
    }

    fn cycle(n: usize) -> MultiGraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        MultiGraph::build(n, &e).unwrap()
    }

    #[test]
    fn star_too_wide() {
        let star = MultiGraph::build(6, &(1..6).map(|i| (0, i, 1)).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            reduce_step(&star, 2),
            ReduceOutcome::TooWide(TooWideReason::Degree { vertex: 0, degree: 5 })
        );
    }

    #[test]
    fn long_path_dissolves() {
        let p = path(12);
        let ReduceOutcome::Reduced { graph, trace, .. } = reduce_step(&p, 1) else { panic!() };
        assert_eq!(graph.edge_count(), 1);
        assert_eq!(trace.replay(&graph).unwrap(), p);
        let lifted = lift_ordering(&trace, &Ordering::identity(graph.n())).unwrap();
        assert_eq!(width(&p, &lifted).unwrap(), 1);
    }

    #[test]
    fn nine_cycle_loses_one_edge() {
        let c9 = cycle(9);
        let ReduceOutcome::Reduced { graph, trace, case } = reduce_step(&c9, 1) else { panic!() };
        assert_eq!(case, ReduceCase::Cycles);
        assert_eq!(graph.edges().len(), 1);
        assert_eq!(graph.edge_count(), 1);
        let removed: Vec<_> =
            trace.events.iter().filter(|e| matches!(e, TraceEvent::RemovedCycleEdge { .. })).collect();
        assert_eq!(removed.len(), 1);
        let lifted = lift_ordering(&trace, &Ordering::identity(2)).unwrap();
        assert!(width(&c9, &lifted).unwrap() <= 2);
        assert_eq!(trace.replay(&graph).unwrap(), c9);
    }

    #[test]
    fn single_edge_makes_no_progress() {
        assert_eq!(reduce_step(&path(2), 1), ReduceOutcome::NoProgress);
        assert_eq!(reduce_step(&MultiGraph::empty(1), 1), ReduceOutcome::NoProgress);
    }

    #[test]
    fn balls_and_cycles() {
        assert_eq!(pack_balls(&MultiGraph::empty(1), 1), vec![0]);
        assert_eq!(pack_balls(&path(2), 1), vec![0]);
        assert_eq!(pack_balls(&path(20), 1), vec![0, 9, 18]);
        let d = MultiGraph::build(2, &[(0, 1, 2)]).unwrap();
        assert_eq!(find_ball_cycle(&d, 0, 1), Some(vec![0, 1]));
        assert_eq!(find_ball_cycle(&path(5), 2, 4), None);
        let mut c = find_ball_cycle(&cycle(5), 0, 3).unwrap();
        c.sort_unstable();
        assert_eq!(c, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn empty_trace_lift_is_identity() {
        let t = ReductionTrace::identity(3);
        let tau = Ordering::new(vec![2, 0, 1]).unwrap();
        assert_eq!(lift_ordering(&t, &tau).unwrap(), tau);
        assert_eq!(lift_ordering(&t, &Ordering::identity(2)), Err(Error::TraceMismatch));
    }

    #[test]
    fn shrink_arithmetic() {
        assert!(meets_shrink(9, 1, 1));
        assert!(!meets_shrink(9, 9, 1));
        assert_eq!(shrink_denominator(1), BigUint::from(3u32).pow(11));
    }
}
