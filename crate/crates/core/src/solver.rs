//! Recursive reduction and compression, per connected component.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compress::{compress_with_stats, CompressOptions};
use crate::error::Result;
use crate::multigraph::MultiGraph;
use crate::ordering::{prefix_cuts, width, Ordering};
use crate::reduce::{lift_ordering, reduce_step, ReduceOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Fits(Ordering),
    TooWide,
}

/// Counters collected over one solver call.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub k_tried: Vec<usize>,
    pub components: usize,
    pub compress_calls: usize,
    pub states_visited: usize,
    pub max_layer_states: usize,
    pub reductions: usize,
    pub fallbacks: usize,
}

impl SolveReport {
    fn absorb(&mut self, other: &SolveReport) {
        self.compress_calls += other.compress_calls;
        self.states_visited += other.states_visited;
        self.max_layer_states = self.max_layer_states.max(other.max_layer_states);
        self.reductions += other.reductions;
        self.fallbacks += other.fallbacks;
    }
}

/// An ordering of width at most `k`, or `TooWide` if none exists.
pub fn cutwidth_decide(g: &MultiGraph, k: usize) -> Result<Decision> {
    let mut report = SolveReport::default();
    cutwidth_decide_with_report(g, k, &CompressOptions::default(), &mut report)
}

pub fn cutwidth_decide_with_report(
    g: &MultiGraph,
    k: usize,
    opts: &CompressOptions,
    report: &mut SolveReport,
) -> Result<Decision> {
    report.k_tried.push(k);
    let comps: Vec<Vec<usize>> = g.components().iter().map(|c| c.to_vec()).collect();
    report.components = comps.len();
    let solved: Vec<Result<(Decision, SolveReport)>> = comps
        .par_iter()
        .map(|vs| {
            let mut r = SolveReport::default();
            let d = decide_connected(&g.induced(vs), k, opts, &mut r)?;
            Ok((d, r))
        })
        .collect();
    let mut perm = Vec::with_capacity(g.n());
    let mut fits = true;
    for (vs, res) in comps.iter().zip(solved) {
        let (d, r) = res?;
        report.absorb(&r);
        match d {
            Decision::Fits(tau) => perm.extend(tau.as_slice().iter().map(|&i| vs[i])),
            Decision::TooWide => fits = false,
        }
    }
    if !fits {
        return Ok(Decision::TooWide);
    }
    Ok(Decision::Fits(Ordering::new(perm)?))
}

fn decide_connected(g: &MultiGraph, k: usize, opts: &CompressOptions, report: &mut SolveReport) -> Result<Decision> {
    let start = if g.edge_count() <= 2 * k + 1 {
        insertion_ordering(g)
    } else {
        match reduce_step(g, k) {
            ReduceOutcome::TooWide(_) => return Ok(Decision::TooWide),
            ReduceOutcome::Reduced { graph, trace, .. } => {
                report.reductions += 1;
                let mut inner = SolveReport::default();
                let sub = cutwidth_decide_with_report(&graph, k, opts, &mut inner)?;
                report.absorb(&inner);
                match sub {
                    Decision::TooWide => return Ok(Decision::TooWide),
                    Decision::Fits(tau) => lift_ordering(&trace, &tau)?,
                }
            }
            ReduceOutcome::NoProgress => {
                report.fallbacks += 1;
                insertion_ordering(g)
            }
        }
    };
    report.compress_calls += 1;
    let (found, stats) = compress_with_stats(g, &start, k, opts)?;
    report.states_visited += stats.total_states();
    report.max_layer_states = report.max_layer_states.max(stats.max_layer());
    Ok(match found {
        Some(tau) => Decision::Fits(tau),
        None => Decision::TooWide,
    })
}

/// Inserts vertices in BFS order, each at the position giving the smallest
/// width of the partial ordering (leftmost on ties).
pub fn insertion_ordering(g: &MultiGraph) -> Ordering {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut bfs = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        bfs.push(s);
        let mut i = bfs.len() - 1;
        while i < bfs.len() {
            let v = bfs[i];
            i += 1;
            for &(w, _) in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    bfs.push(w);
                }
            }
        }
    }
    let mut pos = vec![usize::MAX; n];
    let mut seq: Vec<usize> = Vec::with_capacity(n);
    // cuts[i] = edges among placed vertices crossing boundary i.
    let mut cuts: Vec<usize> = vec![0];
    for &v in &bfs {
        let len = seq.len();
        // to_left[i] = multiplicity from v into positions < i.
        let mut into = vec![0usize; len + 1];
        for &(w, m) in g.neighbors(v) {
            if pos[w] != usize::MAX {
                into[pos[w] + 1] += m as usize;
            }
        }
        let total: usize = into.iter().sum();
        let mut to_left = vec![0usize; len + 1];
        for i in 1..=len {
            to_left[i] = to_left[i - 1] + into[i];
        }
        // Placing v at p: boundary i <= p gains to_left[i], boundary i >= p
        // (after v) gains total - to_left[i].
        let mut pre = vec![0usize; len + 1];
        let mut run = 0;
        for i in 0..=len {
            run = run.max(cuts[i] + to_left[i]);
            pre[i] = run;
        }
        let mut suf = vec![0usize; len + 2];
        for i in (0..=len).rev() {
            suf[i] = suf[i + 1].max(cuts[i] + total - to_left[i]);
        }
        let p = (0..=len).min_by_key(|&p| pre[p].max(suf[p])).unwrap_or(0);
        seq.insert(p, v);
        for (i, &x) in seq.iter().enumerate().skip(p) {
            pos[x] = i;
        }
        let mut nc = Vec::with_capacity(len + 2);
        nc.extend((0..=p).map(|i| cuts[i] + to_left[i]));
        nc.extend((p..=len).map(|i| cuts[i] + total - to_left[i]));
        cuts = nc;
    }
    debug_assert_eq!(cuts, prefix_cuts(g, &seq));
    Ordering::new(seq).expect("insertion covers every vertex")
}

/// Smallest `k` admitting an ordering, with a witness.
pub fn cutwidth_exact(g: &MultiGraph) -> Result<(usize, Ordering)> {
    let (k, tau, _) = cutwidth_exact_with_report(g, &CompressOptions::default())?;
    Ok((k, tau))
}

pub fn cutwidth_exact_with_report(g: &MultiGraph, opts: &CompressOptions) -> Result<(usize, Ordering, SolveReport)> {
    let mut report = SolveReport::default();
    // Some cut next to a max-degree vertex carries half its edges.
    let mut k = g.max_degree().div_ceil(2);
    loop {
        if let Decision::Fits(tau) = cutwidth_decide_with_report(g, k, opts, &mut report)? {
            return Ok((k, tau, report));
        }
        k += 1;
    }
}

/// Whether `sigma` has width at most `k`.
pub fn verify_certificate(g: &MultiGraph, sigma: &Ordering, k: usize) -> bool {
    width(g, sigma).is_ok_and(|w| w <= k)
}
