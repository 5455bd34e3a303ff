//! Brute-force ground truth: subset DP for cutwidth, backtracking
//! immersion tests, obstruction certification and edge-deletion distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::ordering::Ordering;

/// Default vertex ceiling for the subset DP.
pub const EXACT_LIMIT: usize = 20;
/// Default vertex ceiling for immersion backtracking.
pub const IMMERSION_LIMIT: usize = 8;

/// Cut sizes `delta[S]` for every subset bitmask.
fn subset_deltas(g: &MultiGraph) -> Vec<u32> {
    let n = g.n();
    let nbr: Vec<Vec<(usize, u32)>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let deg: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();
    let mut delta = vec![0u32; 1 << n];
    for s in 1usize..1 << n {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let into: u32 = nbr[v].iter().filter(|&&(w, _)| rest >> w & 1 == 1).map(|&(_, m)| m).sum();
        delta[s] = delta[rest] + deg[v] - 2 * into;
    }
    delta
}

/// Exact cutwidth and an optimum ordering via
/// `f(S) = min over v in S of max(f(S - v), delta(S))`.
pub fn exact_cutwidth(g: &MultiGraph) -> Result<(usize, Ordering)> {
    exact_cutwidth_with_limit(g, EXACT_LIMIT)
}

pub fn exact_cutwidth_with_limit(g: &MultiGraph, limit: usize) -> Result<(usize, Ordering)> {
    let n = g.n();
    if n > limit || n > 30 {
        return Err(Error::TooLarge { size: n, limit: limit.min(30) });
    }
    if n == 0 {
        return Ok((0, Ordering::identity(0)));
    }
    let delta = subset_deltas(g);
    let full = (1usize << n) - 1;
    let mut f = vec![u32::MAX; 1 << n];
    let mut last = vec![0u8; 1 << n];
    f[0] = 0;
    for s in 1..=full {
        let mut best = u32::MAX;
        let mut arg = 0u8;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let val = f[s & !(1 << v)].max(delta[s]);
            if val < best {
                best = val;
                arg = v as u8;
            }
        }
        f[s] = best;
        last[s] = arg;
    }
    let mut perm = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s] as usize;
        perm.push(v);
        s &= !(1 << v);
    }
    perm.reverse();
    Ok((f[full] as usize, Ordering::new(perm)?))
}

/// Whether `cw(g) <= k`, by reachability over subsets whose cut is at
/// most `k`. Returns a witness ordering when true.
pub fn cutwidth_at_most(g: &MultiGraph, k: usize) -> Result<Option<Ordering>> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge { size: n, limit: EXACT_LIMIT });
    }
    if n == 0 {
        return Ok(Some(Ordering::identity(0)));
    }
    let delta = subset_deltas(g);
    let full = (1usize << n) - 1;
    let mut from = vec![u8::MAX; 1 << n];
    let mut ok = vec![false; 1 << n];
    ok[0] = true;
    for s in 0..full {
        if !ok[s] {
            continue;
        }
        for v in 0..n {
            let t = s | 1 << v;
            if t != s && !ok[t] && delta[t] as usize <= k {
                ok[t] = true;
                from[t] = v as u8;
            }
        }
    }
    if !ok[full] {
        return Ok(None);
    }
    let mut perm = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = from[s] as usize;
        perm.push(v);
        s &= !(1 << v);
    }
    perm.reverse();
    Ok(Some(Ordering::new(perm)?))
}

/// Branch map plus one path per edge copy of the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionModel {
    pub phi: Vec<usize>,
    /// `(u, v, path)` for every copy of every pattern edge `uv`.
    pub paths: Vec<(usize, usize, Vec<usize>)>,
}

struct Host {
    n: usize,
    cap: Vec<u32>,
}

impl Host {
    fn new(g: &MultiGraph) -> Self {
        let n = g.n();
        let mut cap = vec![0; n * n];
        for &(u, v, m) in g.edges() {
            cap[u * n + v] = m;
            cap[v * n + u] = m;
        }
        Host { n, cap }
    }

    fn take(&mut self, u: usize, v: usize) {
        self.cap[u * self.n + v] -= 1;
        self.cap[v * self.n + u] -= 1;
    }

    fn give(&mut self, u: usize, v: usize) {
        self.cap[u * self.n + v] += 1;
        self.cap[v * self.n + u] += 1;
    }
}

struct Search<'a> {
    h: &'a MultiGraph,
    g: &'a MultiGraph,
    strong: bool,
    copies: Vec<(usize, usize)>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn assign(&self, depth: usize, phi: &mut Vec<usize>, used: &mut Vec<bool>) -> Option<ImmersionModel> {
        if depth == self.order.len() {
            let mut host = Host::new(self.g);
            let mut branch = vec![false; self.g.n()];
            for &x in phi.iter() {
                branch[x] = true;
            }
            let mut paths = Vec::with_capacity(self.copies.len());
            if self.route(0, phi, &branch, &mut host, &mut paths) {
                return Some(ImmersionModel { phi: phi.clone(), paths });
            }
            return None;
        }
        let u = self.order[depth];
        for x in 0..self.g.n() {
            if used[x] || self.g.degree(x) < self.h.degree(u) {
                continue;
            }
            phi[u] = x;
            used[x] = true;
            if let Some(m) = self.assign(depth + 1, phi, used) {
                return Some(m);
            }
            used[x] = false;
        }
        phi[u] = usize::MAX;
        None
    }

    fn route(
        &self,
        i: usize,
        phi: &[usize],
        branch: &[bool],
        host: &mut Host,
        paths: &mut Vec<(usize, usize, Vec<usize>)>,
    ) -> bool {
        if i == self.copies.len() {
            return true;
        }
        let (u, v) = self.copies[i];
        let (s, t) = (phi[u], phi[v]);
        let mut path = vec![s];
        let mut on_path = vec![false; self.g.n()];
        on_path[s] = true;
        self.extend(i, t, branch, host, &mut path, &mut on_path, phi, paths)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        i: usize,
        t: usize,
        branch: &[bool],
        host: &mut Host,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        phi: &[usize],
        paths: &mut Vec<(usize, usize, Vec<usize>)>,
    ) -> bool {
        let x = *path.last().unwrap();
        for &(y, _) in self.g.neighbors(x) {
            if on_path[y] || host.cap[x * host.n + y] == 0 {
                continue;
            }
            if y != t && self.strong && branch[y] {
                continue;
            }
            host.take(x, y);
            path.push(y);
            if y == t {
                let (u, v) = self.copies[i];
                paths.push((u, v, path.clone()));
                if self.route(i + 1, phi, branch, host, paths) {
                    return true;
                }
                paths.pop();
            } else {
                on_path[y] = true;
                if self.extend(i, t, branch, host, path, on_path, phi, paths) {
                    return true;
                }
                on_path[y] = false;
            }
            path.pop();
            host.give(x, y);
        }
        false
    }
}

/// Searches for an immersion model of `h` in `g` (strong if requested).
pub fn is_immersion(h: &MultiGraph, g: &MultiGraph, strong: bool) -> Result<Option<ImmersionModel>> {
    is_immersion_with_limit(h, g, strong, IMMERSION_LIMIT)
}

pub fn is_immersion_with_limit(
    h: &MultiGraph,
    g: &MultiGraph,
    strong: bool,
    limit: usize,
) -> Result<Option<ImmersionModel>> {
    for x in [h.n(), g.n()] {
        if x > limit {
            return Err(Error::TooLarge { size: x, limit });
        }
    }
    if h.n() > g.n() || h.edge_count() > g.edge_count() {
        return Ok(None);
    }
    let mut hd: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut pd: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
    hd.sort_unstable_by(|a, b| b.cmp(a));
    pd.sort_unstable_by(|a, b| b.cmp(a));
    if pd.iter().zip(&hd).any(|(p, q)| p > q) {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
    let mut copies = Vec::with_capacity(h.edge_count());
    for &(u, v, m) in h.edges() {
        for _ in 0..m {
            copies.push((u, v));
        }
    }
    let search = Search { h, g, strong, copies, order };
    let mut phi = vec![usize::MAX; h.n()];
    let mut used = vec![false; g.n()];
    Ok(search.assign(0, &mut phi, &mut used))
}

/// One elementary immersion reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    DeleteEdge { u: usize, v: usize },
    DeleteVertex { v: usize },
    Lift { u: usize, v: usize, w: usize },
}

/// All graphs one elementary step below `g`: delete one edge copy, delete
/// one vertex, or lift a pair `uv`, `vw` with `u != w` to `uw`.
pub fn one_step_reductions(g: &MultiGraph) -> Vec<(Reduction, MultiGraph)> {
    let mut out = Vec::new();
    for &(u, v, _) in g.edges() {
        out.push((Reduction::DeleteEdge { u, v }, g.without_edge_copy(u, v).expect("edge")));
    }
    for v in 0..g.n() {
        out.push((Reduction::DeleteVertex { v }, g.without_vertex(v)));
    }
    for v in 0..g.n() {
        let nb = g.neighbors(v);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let (u, w) = (nb[i].0, nb[j].0);
                out.push((Reduction::Lift { u, v, w }, g.lift(u, v, w).expect("lift")));
            }
        }
    }
    out
}

/// Witnesses that `g` is a minimal graph of cutwidth `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub optimum: Vec<usize>,
    pub reductions: Vec<(Reduction, Vec<usize>)>,
}

/// Certificate if `g` has cutwidth exactly `k + 1` and every one-step
/// reduction has cutwidth at most `k`.
pub fn obstruction_certificate(g: &MultiGraph, k: usize) -> Result<Option<ObstructionCertificate>> {
    let (cw, opt) = exact_cutwidth(g)?;
    if cw != k + 1 {
        return Ok(None);
    }
    let mut reductions = Vec::new();
    for (op, h) in one_step_reductions(g) {
        match cutwidth_at_most(&h, k)? {
            Some(sigma) => reductions.push((op, sigma.into_vec())),
            None => return Ok(None),
        }
    }
    Ok(Some(ObstructionCertificate { optimum: opt.into_vec(), reductions }))
}

pub fn is_obstruction(g: &MultiGraph, k: usize) -> Result<bool> {
    Ok(obstruction_certificate(g, k)?.is_some())
}

/// Ceiling on the number of deletion patterns `dcw` may scan.
pub const DCW_PATTERN_LIMIT: u64 = 1 << 26;

/// Minimum number of edge copies whose removal leaves cutwidth at most
/// `k`, with a witness `(u, v, copies)` list.
pub fn dcw(g: &MultiGraph, k: usize) -> Result<(usize, Vec<(usize, usize, u32)>)> {
    dcw_inner(g, k, true)
}

/// [`dcw`] without splitting into components first; slower, but does not
/// assume additivity over components.
pub fn dcw_whole(g: &MultiGraph, k: usize) -> Result<(usize, Vec<(usize, usize, u32)>)> {
    dcw_inner(g, k, false)
}

fn dcw_inner(g: &MultiGraph, k: usize, split: bool) -> Result<(usize, Vec<(usize, usize, u32)>)> {
    if g.n() > EXACT_LIMIT {
        return Err(Error::TooLarge { size: g.n(), limit: EXACT_LIMIT });
    }
    let patterns = g
        .edges()
        .iter()
        .try_fold(1u64, |acc, &(_, _, m)| acc.checked_mul(m as u64 + 1))
        .unwrap_or(u64::MAX);
    if patterns > DCW_PATTERN_LIMIT {
        return Err(Error::TooLarge { size: patterns.min(usize::MAX as u64) as usize, limit: DCW_PATTERN_LIMIT as usize });
    }
    // Components are independent; summing their optima is exact.
    let comps = g.components();
    if comps.len() > 1 && split {
        let mut total = 0;
        let mut witness = Vec::new();
        for c in comps {
            let vs = c.to_vec();
            let (d, f) = dcw(&g.induced(&vs), k)?;
            total += d;
            witness.extend(f.into_iter().map(|(u, v, m)| (vs[u], vs[v], m)));
        }
        return Ok((total, witness));
    }
    let edges = g.edges().to_vec();
    for size in 0..=g.edge_count() {
        let mut take = vec![0u32; edges.len()];
        if let Some(f) = dcw_level(g, k, &edges, 0, size as u32, &mut take)? {
            return Ok((size, f));
        }
    }
    unreachable!("removing every edge gives cutwidth 0")
}

fn dcw_level(
    g: &MultiGraph,
    k: usize,
    edges: &[(usize, usize, u32)],
    i: usize,
    left: u32,
    take: &mut Vec<u32>,
) -> Result<Option<Vec<(usize, usize, u32)>>> {
    if i == edges.len() {
        if left > 0 {
            return Ok(None);
        }
        let kept: Vec<(usize, usize, u32)> = edges
            .iter()
            .zip(take.iter())
            .map(|(&(u, v, m), &t)| (u, v, m - t))
            .collect();
        let h = MultiGraph::build(g.n(), &kept)?;
        if cutwidth_at_most(&h, k)?.is_some() {
            let f = edges
                .iter()
                .zip(take.iter())
                .filter(|(_, &t)| t > 0)
                .map(|(&(u, v, _), &t)| (u, v, t))
                .collect();
            return Ok(Some(f));
        }
        return Ok(None);
    }
    let rest: u32 = edges[i..].iter().map(|e| e.2).sum();
    if rest < left {
        return Ok(None);
    }
    for t in 0..=edges[i].2.min(left) {
        take[i] = t;
        if let Some(f) = dcw_level(g, k, edges, i + 1, left - t, take)? {
            return Ok(Some(f));
        }
    }
    take[i] = 0;
    Ok(None)
}

/// Exhaustive permutation search; exponential, for cross-checks only.
pub fn cutwidth_by_permutations(g: &MultiGraph) -> usize {
    fn rec(g: &MultiGraph, perm: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut usize) {
        let n = g.n();
        if perm.len() == n {
            *best = (*best).min(crate::ordering::partial_width(g, perm));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                if crate::ordering::partial_width(g, perm) < *best {
                    rec(g, perm, used, best);
                }
                perm.pop();
                used[v] = false;
            }
        }
    }
    if g.n() == 0 {
        return 0;
    }
    let mut best = usize::MAX;
    rec(g, &mut Vec::new(), &mut vec![false; g.n()], &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> MultiGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v, 1));
            }
        }
        MultiGraph::build(n, &e).unwrap()
    }

    #[test]
    fn small_cutwidths() {
        assert_eq!(exact_cutwidth(&k(4)).unwrap().0, 4);
        let star = MultiGraph::build(5, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)]).unwrap();
        assert_eq!(exact_cutwidth(&star).unwrap().0, 2);
        assert!(exact_cutwidth(&MultiGraph::empty(21)).is_err());
    }

    #[test]
    fn immersion_examples() {
        let c = |n: usize| {
            let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
            MultiGraph::build(n, &e).unwrap()
        };
        assert!(is_immersion(&c(3), &c(5), true).unwrap().is_some());
        assert!(is_immersion(&k(4), &c(5), false).unwrap().is_none());
        let model = is_immersion(&c(3), &k(4), false).unwrap().unwrap();
        assert_eq!(model.paths.len(), 3);
    }

    #[test]
    fn obstruction_examples() {
        // Lifting two triangle edges leaves a doubled edge of cutwidth 2.
        assert!(!is_obstruction(&k(3), 1).unwrap());
        let doubled = MultiGraph::build(2, &[(0, 1, 2)]).unwrap();
        assert!(is_obstruction(&doubled, 1).unwrap());
        let claw = MultiGraph::build(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        assert!(is_obstruction(&claw, 1).unwrap());
        assert!(is_obstruction(&MultiGraph::build(2, &[(0, 1, 1)]).unwrap(), 0).unwrap());
        let p3 = MultiGraph::build(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(!is_obstruction(&p3, 0).unwrap());
        assert!(!is_obstruction(&MultiGraph::empty(3), 0).unwrap());
    }

    #[test]
    fn dcw_examples() {
        assert_eq!(dcw(&k(3), 1).unwrap().0, 1);
        assert_eq!(dcw(&k(3).disjoint_union(&k(3)), 1).unwrap().0, 2);
        assert_eq!(dcw(&k(3), 2).unwrap(), (0, vec![]));
    }
}
