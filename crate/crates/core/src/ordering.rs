//! Vertex orderings, their cut sequences, block structure, and the
//! submodular exchange that makes an ordering linked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, max_flow};
use crate::multigraph::{MultiGraph, VertexSet};

/// A permutation of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordering {
    perm: Vec<usize>,
}

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || seen[v] {
                return Err(Error::NotAPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Ordering { perm })
    }

    pub fn identity(n: usize) -> Self {
        Ordering { perm: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.perm
    }

    /// `positions()[v]` is the index of `v` in the ordering.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (i, &v) in self.perm.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        Ordering { perm: self.perm.iter().rev().copied().collect() }
    }

    /// Vertices of `x` in the order they appear.
    pub fn restrict(&self, x: &VertexSet) -> Vec<usize> {
        self.perm.iter().copied().filter(|&v| x.contains(v)).collect()
    }
}

/// `c[i]` is the size of the cut after the first `i + 1` vertices, for
/// every proper nonempty prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSequence(pub Vec<usize>);

impl CutSequence {
    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

fn check(g: &MultiGraph, sigma: &Ordering) -> Result<()> {
    if sigma.len() != g.n() {
        return Err(Error::NotAPermutation(g.n()));
    }
    Ok(())
}

/// Prefix cut sizes for all prefix lengths `0..=n` (both ends are 0).
pub fn prefix_cuts(g: &MultiGraph, perm: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; g.n()];
    let mut cuts = Vec::with_capacity(perm.len() + 1);
    let mut cur: isize = 0;
    cuts.push(0);
    for &v in perm {
        let mut into = 0isize;
        for &(w, m) in g.neighbors(v) {
            if inside[w] {
                into += m as isize;
            }
        }
        cur += g.degree(v) as isize - 2 * into;
        inside[v] = true;
        cuts.push(cur as usize);
    }
    cuts
}

pub fn cut_sequence(g: &MultiGraph, sigma: &Ordering) -> Result<CutSequence> {
    check(g, sigma)?;
    let cuts = prefix_cuts(g, sigma.as_slice());
    let n = g.n();
    Ok(CutSequence(if n <= 1 { Vec::new() } else { cuts[1..n].to_vec() }))
}

pub fn width(g: &MultiGraph, sigma: &Ordering) -> Result<usize> {
    Ok(cut_sequence(g, sigma)?.max())
}

/// Width of an arbitrary vertex sequence that may cover only part of the
/// graph (edges to vertices outside the sequence are ignored).
pub(crate) fn partial_width(g: &MultiGraph, perm: &[usize]) -> usize {
    prefix_cuts(g, perm).into_iter().max().unwrap_or(0)
}

/// Number of maximal runs of `x` vertices.
pub fn blocks(sigma: &Ordering, x: &VertexSet) -> usize {
    let mut count = 0;
    let mut prev = false;
    for &v in sigma.as_slice() {
        let here = x.contains(v);
        if here && !prev {
            count += 1;
        }
        prev = here;
    }
    count
}

/// Maximal runs of same-side vertices as half-open index ranges.
fn runs(perm: &[usize], a: &VertexSet) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=perm.len() {
        if i == perm.len() || a.contains(perm[i]) != a.contains(perm[start]) {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Swaps adjacent (A,B)-blocks, leftmost first, while a swap keeps the
/// width within the input width.
pub fn minimize_blocks(g: &MultiGraph, sigma: &Ordering, a: &VertexSet) -> Result<Ordering> {
    let budget = width(g, sigma)?;
    let mut perm = sigma.as_slice().to_vec();
    'outer: loop {
        let rs = runs(&perm, a);
        if rs.len() < 3 {
            break;
        }
        for j in 0..rs.len() - 1 {
            let (s0, e0) = rs[j];
            let (_, e1) = rs[j + 1];
            let mut cand = perm[..s0].to_vec();
            cand.extend_from_slice(&perm[e0..e1]);
            cand.extend_from_slice(&perm[s0..e0]);
            cand.extend_from_slice(&perm[e1..]);
            if partial_width(g, &cand) <= budget {
                perm = cand;
                continue 'outer;
            }
        }
        break;
    }
    Ok(Ordering { perm })
}

/// Block bound `(2d+1)(2w+3)+2d` for a cut of size `d` in a graph of
/// cutwidth `w`.
pub fn block_bound(cut: usize, cw: usize) -> usize {
    (2 * cut + 1) * (2 * cw + 3) + 2 * cut
}

/// Finds the first pair of prefix lengths `(i, j)` with `lo <= i <= j < n`,
/// scanned by increasing `j - i`, whose interval minimum cut exceeds the
/// edge-disjoint path count between the prefix of length `i` and the suffix
/// after position `j`. Returns the source side of a minimum cut.
fn violation(g: &MultiGraph, perm: &[usize], lo: usize) -> Option<(usize, usize, VertexSet)> {
    let n = perm.len();
    let cuts = prefix_cuts(g, perm);
    let lo = lo.max(1);
    for len in 1..n {
        for i in lo..n {
            let j = i + len;
            if j >= n {
                break;
            }
            let need = *cuts[i..=j].iter().min().unwrap();
            if need == 0 {
                continue;
            }
            let s = VertexSet::from_slice(n, &perm[..i]);
            let t = VertexSet::from_slice(n, &perm[j..]);
            let f = max_flow(g, &s, &t, None);
            if f.value < need {
                return Some((i, j, f.source_side));
            }
        }
    }
    None
}

/// Moves min-cut source-side vertices of the interval `(i, j]` ahead of the
/// sink-side ones, preserving relative order within each part.
fn exchange(perm: &[usize], i: usize, j: usize, a: &VertexSet) -> Vec<usize> {
    let mut out = perm[..i].to_vec();
    out.extend(perm[i..j].iter().copied().filter(|&v| a.contains(v)));
    out.extend(perm[i..j].iter().copied().filter(|&v| !a.contains(v)));
    out.extend_from_slice(&perm[j..]);
    out
}

fn refine_from(g: &MultiGraph, mut perm: Vec<usize>, lo: usize) -> Vec<usize> {
    while let Some((i, j, a)) = violation(g, &perm, lo) {
        perm = exchange(&perm, i, j, &a);
    }
    perm
}

/// Applies the exchange step until the ordering is linked. Every prefix cut
/// is non-increasing and the cut sum strictly drops with each exchange.
pub fn make_linked(g: &MultiGraph, sigma: &Ordering) -> Result<Ordering> {
    check(g, sigma)?;
    Ok(Ordering { perm: refine_from(g, sigma.as_slice().to_vec(), 1) })
}

/// [`make_linked`] with a check that the input is optimal.
pub fn make_linked_certified(g: &MultiGraph, sigma: &Ordering, optimum: usize) -> Result<Ordering> {
    let w = width(g, sigma)?;
    if w > optimum {
        return Err(Error::NotOptimal { width: w, optimum });
    }
    make_linked(g, sigma)
}

/// Puts `V \ X` first (index order) followed by `x_order`, then applies the
/// exchange step only to intervals inside the `X` suffix.
pub fn make_x_linked(g: &MultiGraph, x: &VertexSet, x_order: &[usize]) -> Result<Ordering> {
    let n = g.n();
    let mut perm: Vec<usize> = (0..n).filter(|&v| !x.contains(v)).collect();
    let lo = perm.len();
    perm.extend_from_slice(x_order);
    let sigma = Ordering::new(perm)?;
    if sigma.restrict(x) != x_order {
        return Err(Error::NotAPermutation(x.len()));
    }
    Ok(Ordering { perm: refine_from(g, sigma.into_vec(), lo) })
}

/// `delta(X) + width of the ordering restricted to G[X]`.
pub fn x_width(g: &MultiGraph, sigma: &Ordering, x: &VertexSet) -> usize {
    let inner = g.induced(&x.to_vec());
    let index: Vec<usize> = {
        let mut idx = vec![usize::MAX; g.n()];
        for (i, v) in x.iter().enumerate() {
            idx[v] = i;
        }
        idx
    };
    let order: Vec<usize> = sigma.restrict(x).into_iter().map(|v| index[v]).collect();
    g.delta(x) + partial_width(&inner, &order)
}

/// Linkedness: for all prefix lengths `1 <= i <= j < n`, the flow between
/// the first `i` vertices and the vertices after position `j` is at least
/// the smallest prefix cut with length in `[i, j]`.
pub fn verify_linked(g: &MultiGraph, sigma: &Ordering) -> bool {
    check(g, sigma).is_ok() && linked_pairs_hold(g, sigma.as_slice(), 1)
}

fn linked_pairs_hold(g: &MultiGraph, perm: &[usize], lo: usize) -> bool {
    let n = perm.len();
    let cuts = prefix_cuts(g, perm);
    for i in lo.max(1)..n {
        for j in i..n {
            let need = *cuts[i..=j].iter().min().unwrap();
            if need == 0 {
                continue;
            }
            let s = VertexSet::from_slice(n, &perm[..i]);
            let t = VertexSet::from_slice(n, &perm[j..]);
            if max_flow(g, &s, &t, Some(need)).value < need {
                return false;
            }
        }
    }
    true
}

/// X-linkedness: `X` is a suffix and for all `n-|X| <= i < j <= n` there
/// are as many edge-disjoint paths between the first `i` vertices and the
/// vertices from position `j` on (1-indexed) as the smallest prefix cut with
/// length in `[i, j]`.
pub fn verify_x_linked(g: &MultiGraph, sigma: &Ordering, x: &VertexSet) -> bool {
    if check(g, sigma).is_err() {
        return false;
    }
    let n = g.n();
    let lo = n - x.len();
    let perm = sigma.as_slice();
    if perm[lo..].iter().any(|&v| !x.contains(v)) {
        return false;
    }
    let cuts = prefix_cuts(g, perm);
    for i in lo..=n {
        for j in i + 1..=n {
            let need = *cuts[i..=j].iter().min().unwrap();
            if need == 0 {
                continue;
            }
            let s = VertexSet::from_slice(n, &perm[..i]);
            let t = VertexSet::from_slice(n, &perm[j - 1..]);
            if max_flow(g, &s, &t, Some(need)).value < need {
                return false;
            }
        }
    }
    true
}

/// Edge-disjoint `s`-`t` paths; see [`flow::edge_disjoint_paths`].
pub fn edge_disjoint_paths(
    g: &MultiGraph,
    s: &VertexSet,
    t: &VertexSet,
    k: usize,
) -> Option<Vec<Vec<usize>>> {
    flow::edge_disjoint_paths(g, s, t, k)
}

/// Sum of all prefix cuts; strictly decreases under each exchange.
pub fn cut_sum(g: &MultiGraph, sigma: &Ordering) -> usize {
    prefix_cuts(g, sigma.as_slice()).into_iter().sum()
}
