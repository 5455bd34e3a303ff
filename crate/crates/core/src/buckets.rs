//! Boundaried graphs, bucketings of orderings, and bucket interfaces.
//!
//! Buckets are numbered `1..=ell`. Conformance is decided by exhaustive
//! search over orderings of the extension and monotone bucketings, so
//! everything here is meant for graphs with a handful of vertices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{MultiGraph, VertexSet};
use crate::ordering::Ordering;

/// Largest extension handled by the exhaustive searches.
pub const CONFORM_VERTEX_LIMIT: usize = 8;
/// Ceiling on (orderings x bucketings) an exhaustive search may visit.
pub const CONFORM_WORK_LIMIT: u128 = 200_000_000;

/// A graph with an ordered tuple of boundary vertices (repeats allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundariedGraph {
    pub graph: MultiGraph,
    pub boundary: Vec<usize>,
}

impl BoundariedGraph {
    pub fn new(graph: MultiGraph, boundary: Vec<usize>) -> Result<Self> {
        let n = graph.n();
        if let Some(&index) = boundary.iter().find(|&&x| x >= n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(BoundariedGraph { graph, boundary })
    }

    pub fn arity(&self) -> usize {
        self.boundary.len()
    }

    /// The graph plus one pendant per boundary entry, pendants numbered
    /// after the original vertices.
    pub fn extension(&self) -> MultiGraph {
        extension(self)
    }
}

pub fn extension(bg: &BoundariedGraph) -> MultiGraph {
    let n = bg.graph.n();
    let mut edges = bg.graph.edges().to_vec();
    for (i, &x) in bg.boundary.iter().enumerate() {
        edges.push((x, n + i, 1));
    }
    MultiGraph::build(n + bg.arity(), &edges).expect("pendants are fresh vertices")
}

/// Disjoint union plus an edge between the i-th boundary vertices.
pub fn join(a: &BoundariedGraph, b: &BoundariedGraph) -> Result<MultiGraph> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch(a.arity(), b.arity()));
    }
    let shift = a.graph.n();
    let mut edges = a.graph.edges().to_vec();
    edges.extend(b.graph.edges().iter().map(|&(u, v, m)| (u + shift, v + shift, m)));
    for (&x, &y) in a.boundary.iter().zip(&b.boundary) {
        edges.push((x, y + shift, 1));
    }
    MultiGraph::build(shift + b.graph.n(), &edges)
}

/// Monotone assignment of vertices to buckets `1..=ell` along an ordering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucketing {
    ell: usize,
    assign: Vec<usize>,
}

impl Bucketing {
    /// `assign[v]` is the bucket of vertex `v`.
    pub fn new(sigma: &Ordering, assign: Vec<usize>, ell: usize) -> Result<Self> {
        if assign.len() != sigma.len() {
            return Err(Error::NotAPermutation(assign.len()));
        }
        if let Some(&index) = assign.iter().find(|&&b| b == 0 || b > ell) {
            return Err(Error::BadBucketIndex { index, ell });
        }
        let seq = sigma.as_slice();
        if seq.windows(2).any(|w| assign[w[0]] > assign[w[1]]) {
            return Err(Error::NotMonotone);
        }
        Ok(Bucketing { ell, assign })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn bucket(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assign
    }
}

/// Cut sizes after each prefix of `seq`, counting only edges whose both
/// ends are `active`. Entry 0 is the empty prefix.
fn running_cuts(g: &MultiGraph, seq: &[usize], active: &[bool]) -> Vec<usize> {
    let mut left = vec![false; g.n()];
    let mut cut = 0isize;
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(0);
    for &v in seq {
        for &(w, m) in g.neighbors(v) {
            if active[w] {
                cut += if left[w] { -(m as isize) } else { m as isize };
            }
        }
        left[v] = true;
        out.push(cut as usize);
    }
    out
}

/// Widths of all buckets at once for the subgraph induced by `active`.
/// Index 0 of the result is unused.
fn all_bucket_widths(g: &MultiGraph, order: &[usize], assign: &[usize], ell: usize, active: &[bool]) -> Vec<usize> {
    let seq: Vec<usize> = order.iter().copied().filter(|&v| active[v]).collect();
    let cuts = running_cuts(g, &seq, active);
    let mut widths = vec![0; ell + 1];
    let mut p = 0;
    for (i, w) in widths.iter_mut().enumerate().skip(1) {
        // cuts[p] is the cut with exactly the buckets before i on the left.
        let mut best = cuts[p];
        while p < seq.len() && assign[seq[p]] == i {
            p += 1;
            best = best.max(cuts[p]);
        }
        *w = best;
    }
    widths
}

/// Largest cut that puts the buckets before `i` and a prefix of bucket `i`
/// on the left.
pub fn bucket_width(g: &MultiGraph, sigma: &Ordering, t: &Bucketing, i: usize) -> Result<usize> {
    if i == 0 || i > t.ell {
        return Err(Error::BadBucketIndex { index: i, ell: t.ell });
    }
    let active = vec![true; g.n()];
    Ok(all_bucket_widths(g, sigma.as_slice(), &t.assign, t.ell, &active)[i])
}

/// Width of the `j`-th segment of bucket `i`, where the marked vertices of
/// the bucket cut it into segments `0..=p`. The cuts considered keep the
/// `j`-th marker (if any) on the left and the next one on the right.
pub fn segment_width(
    g: &MultiGraph,
    sigma: &Ordering,
    t: &Bucketing,
    markers: &VertexSet,
    i: usize,
    j: usize,
) -> Result<usize> {
    if i == 0 || i > t.ell {
        return Err(Error::BadBucketIndex { index: i, ell: t.ell });
    }
    let seq = sigma.as_slice();
    let active = vec![true; g.n()];
    let cuts = running_cuts(g, seq, &active);
    let start = seq.iter().take_while(|&&v| t.assign[v] < i).count();
    let end = start + seq[start..].iter().take_while(|&&v| t.assign[v] == i).count();
    // Prefix lengths (within the whole ordering) at which each marker sits.
    let marks: Vec<usize> = (start..end).filter(|&p| markers.contains(seq[p])).collect();
    if j > marks.len() {
        return Err(Error::BadIndex(j));
    }
    // Left side must contain marker j (1-based) and exclude marker j+1.
    let lo = if j == 0 { start } else { marks[j - 1] + 1 };
    let hi = if j == marks.len() { end } else { marks[j] };
    Ok((lo..=hi).map(|p| cuts[p]).max().unwrap_or(0))
}

/// Buckets of the boundary vertices and their pendants, and per-bucket
/// width ceilings for the graph and its extension. Vectors of widths are
/// indexed `0..ell` for buckets `1..=ell`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BucketInterface {
    pub b: Vec<usize>,
    pub b_ext: Vec<usize>,
    pub mu: Vec<usize>,
    pub mu_ext: Vec<usize>,
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn check_scale(n_ext: usize, ell: usize) -> Result<()> {
    if n_ext > CONFORM_VERTEX_LIMIT {
        return Err(Error::TooLarge { size: n_ext, limit: CONFORM_VERTEX_LIMIT });
    }
    let perms: u128 = (1..=n_ext as u128).product();
    let half = ell.div_ceil(2) as u128;
    let work = perms.saturating_mul(binomial(half + n_ext as u128, n_ext as u128));
    if work > CONFORM_WORK_LIMIT {
        return Err(Error::TooLarge { size: n_ext, limit: CONFORM_VERTEX_LIMIT });
    }
    Ok(())
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `visit` with every interface realized exactly (widths equal to
/// the measured ones) by an ordering and parity-respecting bucketing of
/// the extension. Stops early when `visit` returns true.
fn for_each_tight(bg: &BoundariedGraph, ell: usize, mut visit: impl FnMut(BucketInterface) -> bool) -> Result<bool> {
    let ext = bg.extension();
    let n = bg.graph.n();
    let n_ext = ext.n();
    check_scale(n_ext, ell)?;
    let inner: Vec<bool> = (0..n_ext).map(|v| v < n).collect();
    let everything = vec![true; n_ext];
    let mut order: Vec<usize> = (0..n_ext).collect();
    let mut assign = vec![0usize; n_ext];
    loop {
        if assign_rec(&ext, &order, 0, 1, ell, n, &inner, &everything, bg, &mut assign, &mut visit) {
            return Ok(true);
        }
        if !next_permutation(&mut order) {
            return Ok(false);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn assign_rec(
    ext: &MultiGraph,
    order: &[usize],
    pos: usize,
    floor: usize,
    ell: usize,
    n: usize,
    inner: &[bool],
    everything: &[bool],
    bg: &BoundariedGraph,
    assign: &mut [usize],
    visit: &mut impl FnMut(BucketInterface) -> bool,
) -> bool {
    if pos == order.len() {
        let mu = all_bucket_widths(ext, order, assign, ell, inner);
        let mu_ext = all_bucket_widths(ext, order, assign, ell, everything);
        let iface = BucketInterface {
            b: bg.boundary.iter().map(|&x| assign[x]).collect(),
            b_ext: (0..bg.arity()).map(|i| assign[n + i]).collect(),
            mu: mu[1..].to_vec(),
            mu_ext: mu_ext[1..].to_vec(),
        };
        return visit(iface);
    }
    let v = order[pos];
    // Original vertices go to odd buckets, pendants to even ones.
    let parity = if v < n { 1 } else { 0 };
    let mut bucket = floor;
    while bucket <= ell {
        if bucket % 2 == parity {
            assign[v] = bucket;
            if assign_rec(ext, order, pos + 1, bucket, ell, n, inner, everything, bg, assign, visit) {
                return true;
            }
        }
        bucket += 1;
    }
    false
}

fn dominated_by(tight: &BucketInterface, iface: &BucketInterface) -> bool {
    tight.b == iface.b
        && tight.b_ext == iface.b_ext
        && tight.mu.iter().zip(&iface.mu).all(|(a, b)| a <= b)
        && tight.mu_ext.iter().zip(&iface.mu_ext).all(|(a, b)| a <= b)
}

/// Whether some ordering of the extension and some `ell`-bucketing (odd
/// buckets for graph vertices, even for pendants) place the boundary as
/// `iface` says and keep every bucket within the stated widths.
pub fn conforms_interface(bg: &BoundariedGraph, iface: &BucketInterface, ell: usize) -> Result<bool> {
    let k = bg.arity();
    if iface.b.len() != k || iface.b_ext.len() != k {
        return Err(Error::ArityMismatch(k, iface.b.len()));
    }
    if iface.mu.len() != ell || iface.mu_ext.len() != ell {
        return Err(Error::BadBucketIndex { index: iface.mu.len(), ell });
    }
    for_each_tight(bg, ell, |t| dominated_by(&t, iface))
}

/// The minimal interfaces conformed to with every width at most `cap`.
/// The full conformance set is the upward closure of this list within the
/// cap, so two boundaried graphs are similar iff their signatures agree.
pub fn signature(bg: &BoundariedGraph, ell: usize, cap: usize) -> Result<Vec<BucketInterface>> {
    let mut by_place: BTreeMap<(Vec<usize>, Vec<usize>), BTreeSet<(Vec<usize>, Vec<usize>)>> = BTreeMap::new();
    for_each_tight(bg, ell, |t| {
        if t.mu.iter().chain(&t.mu_ext).all(|&w| w <= cap) {
            by_place.entry((t.b, t.b_ext)).or_default().insert((t.mu, t.mu_ext));
        }
        false
    })?;
    let mut out = Vec::new();
    for ((b, b_ext), widths) in by_place {
        let widths: Vec<_> = widths.into_iter().collect();
        for (i, (mu, mu_ext)) in widths.iter().enumerate() {
            let beaten = widths.iter().enumerate().any(|(j, (m2, e2))| {
                j != i
                    && m2.iter().zip(mu).all(|(a, b)| a <= b)
                    && e2.iter().zip(mu_ext).all(|(a, b)| a <= b)
            });
            if !beaten {
                out.push(BucketInterface { b: b.clone(), b_ext: b_ext.clone(), mu: mu.clone(), mu_ext: mu_ext.clone() });
            }
        }
    }
    Ok(out)
}

/// Equal conformance sets over interfaces with widths capped at the
/// boundary arity `k`.
pub fn similar(a: &BoundariedGraph, b: &BoundariedGraph, k: usize, ell: usize) -> Result<bool> {
    similar_with_cap(a, b, ell, k)
}

pub fn similar_with_cap(a: &BoundariedGraph, b: &BoundariedGraph, ell: usize, cap: usize) -> Result<bool> {
    if a.arity() != b.arity() {
        return Ok(false);
    }
    Ok(signature(a, ell, cap)? == signature(b, ell, cap)?)
}

/// `ell^(2k) * (k+1)^(2 ell)`, saturating.
pub fn interface_count_bound(k: usize, ell: usize) -> u128 {
    let mut r: u128 = 1;
    for _ in 0..2 * k {
        r = r.saturating_mul(ell as u128);
    }
    for _ in 0..2 * ell {
        r = r.saturating_mul(k as u128 + 1);
    }
    r
}

/// Every `(k, ell)` interface with widths in `0..=k`, refusing to build
/// more than `limit` of them.
pub fn enumerate_interfaces(k: usize, ell: usize, limit: usize) -> Result<Vec<BucketInterface>> {
    let total = interface_count_bound(k, ell);
    if total > limit as u128 || ell == 0 {
        return Err(Error::TooLarge { size: total.min(usize::MAX as u128) as usize, limit });
    }
    let digits: Vec<usize> = std::iter::repeat_n(ell, 2 * k).chain(std::iter::repeat_n(k + 1, 2 * ell)).collect();
    let mut cur = vec![0usize; digits.len()];
    let mut out = Vec::with_capacity(total as usize);
    loop {
        out.push(BucketInterface {
            b: cur[..k].iter().map(|d| d + 1).collect(),
            b_ext: cur[k..2 * k].iter().map(|d| d + 1).collect(),
            mu: cur[2 * k..2 * k + ell].to_vec(),
            mu_ext: cur[2 * k + ell..].to_vec(),
        });
        let mut i = 0;
        loop {
            if i == cur.len() {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] < digits[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}
