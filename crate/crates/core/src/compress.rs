//! The bucket-profile dynamic program: given an ordering of width `r` and a
//! target `k`, search for an ordering of width at most `k`.
//!
//! A profile is a left-to-right layout of the final ordering restricted to
//! the processed vertices and their unprocessed neighbours. Elements are
//! either processed vertices (identity forgotten) or slots for unprocessed
//! neighbours. Between consecutive elements sits a position carrying a lower
//! bound on the cut there; an open position can still receive unprocessed
//! vertices, a closed one cannot. Maximal runs of processed vertices joined
//! by closed positions are the odd buckets, open positions the even ones.
//! Edges are charged to every position they span as soon as their first
//! endpoint is processed, so bounds only grow by gap splits and new edges.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::ordering::{width, Ordering};

/// Default cap on stored states when `CW_STATE_LIMIT` is unset.
pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

const PARALLEL_THRESHOLD: usize = 512;
const CHUNK: usize = 1 << 14;

/// One layout token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Token {
    /// Position that may still receive vertices, with its cut lower bound.
    Open(u32),
    /// Position between two adjacent processed vertices.
    Closed(u32),
    /// A processed vertex.
    Placed,
    /// Reserved spot of an unprocessed vertex adjacent to processed ones.
    Slot(u32),
}

impl Token {
    fn is_pos(self) -> bool {
        matches!(self, Token::Open(_) | Token::Closed(_))
    }

    fn bump(&mut self, m: u32) -> u32 {
        match self {
            Token::Open(x) | Token::Closed(x) => {
                *x += m;
                *x
            }
            _ => 0,
        }
    }
}

/// Canonical DP profile. Positions and elements alternate, starting and
/// ending with an open position of bound 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BucketProfile {
    tokens: Box<[Token]>,
}

impl BucketProfile {
    pub fn empty() -> Self {
        BucketProfile { tokens: Box::new([Token::Open(0)]) }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Number of odd buckets (runs of processed vertices).
    pub fn odd_buckets(&self) -> usize {
        odd_buckets(&self.tokens)
    }

    /// Buckets strictly inside the layout: odd ones plus the even ones
    /// separating them.
    pub fn inner_buckets(&self) -> usize {
        (2 * self.odd_buckets()).saturating_sub(1)
    }

    pub fn slots(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .filter_map(|t| match *t {
                Token::Slot(u) => Some(u as usize),
                _ => None,
            })
            .collect()
    }

    pub fn max_bound(&self) -> u32 {
        self.tokens
            .iter()
            .map(|t| match *t {
                Token::Open(x) | Token::Closed(x) => x,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

fn odd_buckets(t: &[Token]) -> usize {
    (1..t.len()).filter(|&i| t[i] == Token::Placed && matches!(t[i - 1], Token::Open(_))).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DPState {
    /// Number of non-isolated vertices of the input ordering processed.
    pub w: usize,
    pub profile: BucketProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    NewOddBucket,
    MergeLeft,
    MergeRight,
    MergeBoth,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Scenario::NewOddBucket, Scenario::MergeLeft, Scenario::MergeRight, Scenario::MergeBoth];

    fn closes(self) -> (bool, bool) {
        match self {
            Scenario::NewOddBucket => (false, false),
            Scenario::MergeLeft => (true, false),
            Scenario::MergeRight => (false, true),
            Scenario::MergeBoth => (true, true),
        }
    }
}

/// The guesses made for one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlacementChoice {
    /// Ordinal of the open position receiving the vertex; `None` when the
    /// vertex fills its existing slot.
    pub gap: Option<u16>,
    pub scenario: Scenario,
    /// For each newly slotted neighbour (ascending vertex index), the
    /// ordinal of the open position receiving it, at the time of insertion.
    pub slots: Vec<u16>,
}

#[derive(Clone, Debug)]
pub struct CompressOptions {
    pub state_limit: usize,
    pub parallel: bool,
}

impl Default for CompressOptions {
    /// Reads `CW_STATE_LIMIT` from the environment.
    fn default() -> Self {
        let state_limit = std::env::var("CW_STATE_LIMIT")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_STATE_LIMIT);
        CompressOptions { state_limit, parallel: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompressStats {
    pub k: usize,
    pub r: usize,
    pub ell: usize,
    /// Distinct states per processed prefix length.
    pub states_per_layer: Vec<usize>,
    pub discarded_width: u64,
    pub discarded_buckets: u64,
    /// States dropped because another state had the same shape and
    /// pointwise smaller bounds.
    pub dominated: u64,
}

impl CompressStats {
    pub fn total_states(&self) -> usize {
        self.states_per_layer.iter().sum()
    }

    pub fn max_layer(&self) -> usize {
        self.states_per_layer.iter().copied().max().unwrap_or(0)
    }
}

/// `l = 4rk + 2k + 8r + 4`.
pub fn bucket_budget(r: usize, k: usize) -> usize {
    4 * r * k + 2 * k + 8 * r + 4
}

/// `l^(2k) * k^(2k) * (k+1)^(l+2k)`, saturating, with `0^0 = 1`.
pub fn profile_count_bound(k: usize, ell: usize) -> u128 {
    let pow = |b: u128, e: usize| -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..e {
            acc = acc.saturating_mul(b);
        }
        acc
    };
    pow(ell as u128, 2 * k)
        .saturating_mul(pow(k as u128, 2 * k))
        .saturating_mul(pow(k as u128 + 1, ell + 2 * k))
}

/// Precomputed context for one `(g, sigma, k)` run.
pub struct Compressor<'a> {
    g: &'a MultiGraph,
    order: Vec<usize>,
    isolated: Vec<usize>,
    rank: Vec<usize>,
    k: u32,
    r: usize,
    ell: usize,
}

struct Expansion {
    w: usize,
    out: Vec<(Box<[Token]>, PlacementChoice)>,
    width: u64,
    buckets: u64,
}

impl<'a> Compressor<'a> {
    pub fn new(g: &'a MultiGraph, sigma: &Ordering, k: usize) -> Result<Self> {
        let r = width(g, sigma)?;
        let (isolated, order): (Vec<usize>, Vec<usize>) =
            sigma.as_slice().iter().partition(|&&v| g.degree(v) == 0);
        let mut rank = vec![usize::MAX; g.n()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        Ok(Compressor { g, order, isolated, rank, k: k as u32, r, ell: bucket_budget(r, k) })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn layers(&self) -> usize {
        self.order.len()
    }

    pub fn initial(&self) -> DPState {
        DPState { w: 0, profile: BucketProfile::empty() }
    }

    /// All successors of `state`, in generation order, with their choices.
    pub fn expand(&self, state: &DPState) -> Vec<(DPState, PlacementChoice)> {
        if state.w >= self.order.len() {
            return Vec::new();
        }
        self.successors(state.w, &state.profile.tokens)
            .out
            .into_iter()
            .map(|(t, c)| (DPState { w: state.w + 1, profile: BucketProfile { tokens: t } }, c))
            .collect()
    }

    fn successors(&self, w: usize, prof: &[Token]) -> Expansion {
        let v = self.order[w];
        let mut exp = Expansion { w, out: Vec::new(), width: 0, buckets: 0 };
        let mut new_slots: Vec<usize> = self
            .g
            .neighbors(v)
            .iter()
            .map(|&(u, _)| u)
            .filter(|&u| self.rank[u] > w && !prof.contains(&Token::Slot(u as u32)))
            .collect();
        new_slots.sort_unstable();

        let mut bases: Vec<(Vec<Token>, usize, Option<u16>)> = Vec::new();
        if let Some(i) = prof.iter().position(|&t| t == Token::Slot(v as u32)) {
            let mut b = prof.to_vec();
            b[i] = Token::Placed;
            bases.push((b, i, None));
        } else {
            let mut ord = 0u16;
            for (i, &t) in prof.iter().enumerate() {
                if let Token::Open(x) = t {
                    let mut b = Vec::with_capacity(prof.len() + 2 + 2 * new_slots.len());
                    b.extend_from_slice(&prof[..i]);
                    b.extend_from_slice(&[Token::Open(x), Token::Placed, Token::Open(x)]);
                    b.extend_from_slice(&prof[i + 1..]);
                    bases.push((b, i + 1, Some(ord)));
                    ord += 1;
                }
            }
        }

        // Neighbours already slotted have their edges charged up front.
        let old_slots: Vec<(usize, u32)> = self
            .g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&(u, _)| self.rank[u] > w && !new_slots.contains(&u))
            .collect();
        let new_mult: Vec<u32> = new_slots.iter().map(|&u| self.g.multiplicity(u, v)).collect();

        for (mut base, vi, gap) in bases {
            if !old_slots.iter().all(|&(u, m)| self.charge(&mut base, vi, u, m)) {
                exp.width += 1;
                continue;
            }
            for scenario in Scenario::ALL {
                let (cl, cr) = scenario.closes();
                if cl && !(vi >= 2 && base[vi - 2] == Token::Placed) {
                    continue;
                }
                if cr && !(vi + 2 < base.len() && base[vi + 2] == Token::Placed) {
                    continue;
                }
                let mut b = base.clone();
                if cl {
                    close(&mut b[vi - 1]);
                }
                if cr {
                    close(&mut b[vi + 1]);
                }
                let choice = PlacementChoice { gap, scenario, slots: Vec::with_capacity(new_slots.len()) };
                self.place_slots(b, vi, &new_slots, &new_mult, choice, &mut exp);
            }
        }
        exp
    }

    /// Adds an edge of multiplicity `m` between the element at `vi` and the
    /// slot of `u`; false if some bound exceeds `k`.
    fn charge(&self, b: &mut [Token], vi: usize, u: usize, m: u32) -> bool {
        let s = b.iter().position(|&t| t == Token::Slot(u as u32)).expect("slot present");
        let (lo, hi) = if s < vi { (s, vi) } else { (vi, s) };
        b[lo + 1..hi].iter_mut().all(|t| t.bump(m) <= self.k)
    }

    fn place_slots(
        &self,
        b: Vec<Token>,
        vi: usize,
        pending: &[usize],
        mult: &[u32],
        choice: PlacementChoice,
        exp: &mut Expansion,
    ) {
        let Some((&u, rest)) = pending.split_first() else {
            self.finish(b, choice, exp);
            return;
        };
        let mut ord = 0u16;
        for (i, &t) in b.iter().enumerate() {
            if let Token::Open(x) = t {
                let mut nb = Vec::with_capacity(b.len() + 2);
                nb.extend_from_slice(&b[..i]);
                nb.extend_from_slice(&[Token::Open(x), Token::Slot(u as u32), Token::Open(x)]);
                nb.extend_from_slice(&b[i + 1..]);
                let nvi = if i < vi { vi + 2 } else { vi };
                let (lo, hi) = if i < vi { (i + 1, nvi) } else { (vi, i + 1) };
                if nb[lo + 1..hi].iter_mut().all(|t| t.bump(mult[0]) <= self.k) {
                    let mut c = choice.clone();
                    c.slots.push(ord);
                    self.place_slots(nb, nvi, rest, &mult[1..], c, exp);
                } else {
                    exp.width += 1;
                }
                ord += 1;
            }
        }
    }

    fn finish(&self, b: Vec<Token>, choice: PlacementChoice, exp: &mut Expansion) {
        let tokens = squeeze(b);
        if !self.slots_fit(&tokens, exp.w) {
            exp.width += 1;
            return;
        }
        if 2 * odd_buckets(&tokens) > self.ell + 1 {
            exp.buckets += 1;
            return;
        }
        exp.out.push((tokens.into_boxed_slice(), choice));
    }

    /// Each slot's edges to unprocessed vertices will cross one of the two
    /// positions beside it, so those two bounds must leave room for them.
    fn slots_fit(&self, t: &[Token], w: usize) -> bool {
        let bound = |x: Token| match x {
            Token::Open(b) | Token::Closed(b) => b,
            _ => 0,
        };
        (1..t.len()).step_by(2).all(|i| match t[i] {
            Token::Slot(u) => {
                let rest: u32 =
                    self.g.neighbors(u as usize).iter().filter(|&&(x, _)| self.rank[x] > w).map(|&(_, m)| m).sum();
                bound(t[i - 1]) + bound(t[i + 1]) + rest <= 2 * self.k
            }
            _ => true,
        })
    }

    /// Runs the layered search. `Ok(None)` when no ordering of width at
    /// most `k` exists.
    pub fn run(&self, opts: &CompressOptions) -> Result<(Option<Ordering>, CompressStats)> {
        let mut stats = CompressStats {
            k: self.k as usize,
            r: self.r,
            ell: self.ell,
            states_per_layer: vec![1],
            ..Default::default()
        };
        let mut layer: Vec<Box<[Token]>> = vec![BucketProfile::empty().tokens];
        let mut history: Vec<Vec<(u32, PlacementChoice)>> = Vec::with_capacity(self.order.len());
        let mut stored = 1usize;
        for w in 0..self.order.len() {
            let mut frontier = Frontier::default();
            for (c, chunk) in layer.chunks(CHUNK).enumerate() {
                let expand = |p: &Box<[Token]>| self.successors(w, p);
                let expansions: Vec<Expansion> = if opts.parallel && chunk.len() >= PARALLEL_THRESHOLD {
                    chunk.par_iter().map(expand).collect()
                } else {
                    chunk.iter().map(expand).collect()
                };
                for (i, e) in expansions.into_iter().enumerate() {
                    stats.discarded_width += e.width;
                    stats.discarded_buckets += e.buckets;
                    for (t, choice) in e.out {
                        frontier.offer(t, ((c * CHUNK + i) as u32, choice));
                    }
                }
                if stored + frontier.live > opts.state_limit {
                    return Err(Error::StateLimit(opts.state_limit));
                }
            }
            stats.dominated += frontier.dominated;
            let (next, back) = frontier.finish();
            stored += next.len();
            stats.states_per_layer.push(next.len());
            history.push(back);
            if next.is_empty() {
                return Ok((None, stats));
            }
            layer = next;
        }
        // Any final state is a complete layout; walk back from the first.
        let mut choices = Vec::with_capacity(self.order.len());
        let mut at = 0usize;
        for back in history.iter().rev() {
            let (pred, c) = &back[at];
            choices.push(c);
            at = *pred as usize;
        }
        choices.reverse();
        let perm = self.replay(&choices);
        Ok((Some(Ordering::new(perm)?), stats))
    }

    /// Rebuilds the full layout from the recorded guesses.
    fn replay(&self, choices: &[&PlacementChoice]) -> Vec<usize> {
        #[derive(Clone, Copy, PartialEq)]
        enum Cell {
            Open,
            Closed,
            Vertex(usize),
        }
        fn nth_open(l: &[Cell], ord: u16) -> usize {
            l.iter().enumerate().filter(|(_, &c)| c == Cell::Open).nth(ord as usize).expect("gap").0
        }
        let mut layout = vec![Cell::Open];
        for (w, c) in choices.iter().enumerate() {
            let v = self.order[w];
            let vi = match c.gap {
                None => layout.iter().position(|&x| x == Cell::Vertex(v)).expect("slot"),
                Some(ord) => {
                    let i = nth_open(&layout, ord);
                    layout.splice(i..=i, [Cell::Open, Cell::Vertex(v), Cell::Open]);
                    i + 1
                }
            };
            let (cl, cr) = c.scenario.closes();
            if cl {
                layout[vi - 1] = Cell::Closed;
            }
            if cr {
                layout[vi + 1] = Cell::Closed;
            }
            let mut new_slots: Vec<usize> = self
                .g
                .neighbors(v)
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| self.rank[u] > w && !layout.contains(&Cell::Vertex(u)))
                .collect();
            new_slots.sort_unstable();
            for (&u, &ord) in new_slots.iter().zip(&c.slots) {
                let i = nth_open(&layout, ord);
                layout.splice(i..=i, [Cell::Open, Cell::Vertex(u), Cell::Open]);
            }
        }
        let mut perm: Vec<usize> = layout
            .into_iter()
            .filter_map(|c| match c {
                Cell::Vertex(v) => Some(v),
                _ => None,
            })
            .collect();
        perm.extend_from_slice(&self.isolated);
        perm
    }
}

/// Next layer under construction. Among states of one shape (bounds
/// erased) only the pointwise-minimal bound vectors are kept: a completion
/// of a dominated state also completes its dominator.
#[derive(Default)]
struct Frontier {
    states: Vec<Option<(Box<[Token]>, (u32, PlacementChoice))>>,
    by_shape: HashMap<Box<[Token]>, Vec<usize>>,
    live: usize,
    dominated: u64,
}

fn shape(t: &[Token]) -> Box<[Token]> {
    t.iter()
        .map(|&x| match x {
            Token::Open(_) => Token::Open(0),
            Token::Closed(_) => Token::Closed(0),
            other => other,
        })
        .collect()
}

/// Whether every bound of `a` is at most the matching bound of `b`.
fn le(a: &[Token], b: &[Token]) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (Token::Open(p), Token::Open(q)) | (Token::Closed(p), Token::Closed(q)) => p <= q,
        _ => true,
    })
}

impl Frontier {
    fn offer(&mut self, t: Box<[Token]>, back: (u32, PlacementChoice)) {
        let bucket = self.by_shape.entry(shape(&t)).or_default();
        let states = &mut self.states;
        if bucket.iter().any(|&i| le(&states[i].as_ref().expect("live").0, &t)) {
            self.dominated += 1;
            return;
        }
        let before = bucket.len();
        bucket.retain(|&i| {
            let keep = !le(&t, &states[i].as_ref().expect("live").0);
            if !keep {
                states[i] = None;
            }
            keep
        });
        let dropped = before - bucket.len();
        self.dominated += dropped as u64;
        self.live -= dropped;
        bucket.push(states.len());
        states.push(Some((t, back)));
        self.live += 1;
    }

    fn finish(self) -> (Vec<Box<[Token]>>, Vec<(u32, PlacementChoice)>) {
        self.states.into_iter().flatten().unzip()
    }
}

fn close(t: &mut Token) {
    if let Token::Open(x) = *t {
        *t = Token::Closed(x);
    }
}

/// Collapses `Closed(a) Placed Closed(b)` into `Closed(max(a, b))`.
fn squeeze(b: Vec<Token>) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::with_capacity(b.len());
    for t in b {
        if let Token::Closed(y) = t {
            let n = out.len();
            if n >= 2 && out[n - 1] == Token::Placed {
                if let Token::Closed(x) = out[n - 2] {
                    out.truncate(n - 2);
                    out.push(Token::Closed(x.max(y)));
                    continue;
                }
            }
        }
        out.push(t);
    }
    debug_assert!(out.iter().step_by(2).all(|t| t.is_pos()));
    out
}

/// Successor states of `state` for target width `k`.
pub fn expand(state: &DPState, g: &MultiGraph, sigma: &Ordering, k: usize) -> Result<Vec<DPState>> {
    let c = Compressor::new(g, sigma, k)?;
    Ok(c.expand(state).into_iter().map(|(s, _)| s).collect())
}

/// An ordering of width at most `k`, if one exists. Returns `sigma` itself
/// when it already meets the target.
pub fn compress(g: &MultiGraph, sigma: &Ordering, k: usize) -> Result<Option<Ordering>> {
    Ok(compress_with_stats(g, sigma, k, &CompressOptions::default())?.0)
}

/// As [`compress`], but rejects `sigma` if its width exceeds `declared`.
pub fn compress_declared(g: &MultiGraph, sigma: &Ordering, declared: usize, k: usize) -> Result<Option<Ordering>> {
    let w = width(g, sigma)?;
    if w > declared {
        return Err(Error::WidthMismatch { width: w, declared });
    }
    compress(g, sigma, k)
}

pub fn compress_with_stats(
    g: &MultiGraph,
    sigma: &Ordering,
    k: usize,
    opts: &CompressOptions,
) -> Result<(Option<Ordering>, CompressStats)> {
    let c = Compressor::new(g, sigma, k)?;
    if k >= c.r {
        let stats = CompressStats { k, r: c.r, ell: c.ell, ..Default::default() };
        return Ok((Some(sigma.clone()), stats));
    }
    let (found, stats) = c.run(opts)?;
    if let Some(tau) = &found {
        debug_assert!(width(g, tau)? <= k);
    }
    Ok((found, stats))
}

/// Smallest `k` for which [`compress`] succeeds, with its witness.
pub fn optimum_from_ordering(g: &MultiGraph, sigma: &Ordering) -> Result<(usize, Ordering)> {
    let (k, tau, _) = optimum_with_stats(g, sigma, &CompressOptions::default())?;
    Ok((k, tau))
}

pub fn optimum_with_stats(
    g: &MultiGraph,
    sigma: &Ordering,
    opts: &CompressOptions,
) -> Result<(usize, Ordering, Vec<CompressStats>)> {
    let r = width(g, sigma)?;
    let mut runs = Vec::new();
    for k in 0..r {
        let (found, stats) = compress_with_stats(g, sigma, k, opts)?;
        runs.push(stats);
        if let Some(tau) = found {
            return Ok((k, tau, runs));
        }
    }
    Ok((r, sigma.clone(), runs))
}
