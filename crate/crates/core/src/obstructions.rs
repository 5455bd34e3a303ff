//! Obstruction workbench: exhaustive generation of small connected
//! multigraphs, search for minimal graphs of cutwidth `k + 1`, catalogs on
//! disk, disjoint-union obstructions for edge-deletion classes, and the
//! closed-form bounds that go with them.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::oracle::{self, ObstructionCertificate};

/// Largest vertex count `search_obstructions` accepts.
pub const SEARCH_LIMIT: usize = 8;

/// Constraints a generated graph must satisfy. Both are inherited by
/// subgraphs, which keeps vertex-by-vertex generation complete.
#[derive(Clone, Copy, Debug, Default)]
pub struct GraphFilter {
    pub max_mult: u32,
    pub max_degree: Option<usize>,
    pub max_cutwidth: Option<usize>,
}

/// All connected multigraphs on `1..=max_n` vertices up to isomorphism,
/// grouped by vertex count. Within a group graphs are sorted by edge count
/// then canonical code.
///
/// Each graph on `n` vertices is obtained from one on `n - 1` vertices by
/// adding a vertex: deleting a non-cut vertex keeps a graph connected.
pub fn connected_graphs(max_n: usize, filter: GraphFilter) -> Result<Vec<Vec<MultiGraph>>> {
    let mut levels: Vec<Vec<MultiGraph>> = Vec::new();
    if max_n == 0 {
        return Ok(levels);
    }
    levels.push(vec![MultiGraph::empty(1)]);
    for n in 2..=max_n {
        let parents = &levels[n - 2];
        let found: Vec<Result<Vec<(Vec<u8>, MultiGraph)>>> =
            parents.par_iter().map(|p| extend_by_vertex(p, filter)).collect();
        let mut seen: BTreeMap<(usize, Vec<u8>), MultiGraph> = BTreeMap::new();
        for batch in found {
            for (code, g) in batch? {
                seen.entry((g.edge_count(), code)).or_insert(g);
            }
        }
        levels.push(seen.into_values().collect());
    }
    Ok(levels)
}

fn extend_by_vertex(p: &MultiGraph, filter: GraphFilter) -> Result<Vec<(Vec<u8>, MultiGraph)>> {
    let n = p.n();
    let base = filter.max_mult as usize + 1;
    let mut out = Vec::new();
    let mut mult = vec![0u32; n];
    loop {
        // Advance the mixed-radix counter; the all-zero pattern is skipped.
        let mut i = 0;
        while i < n {
            mult[i] += 1;
            if (mult[i] as usize) < base {
                break;
            }
            mult[i] = 0;
            i += 1;
        }
        if i == n {
            return Ok(out);
        }
        let new_degree: usize = mult.iter().map(|&m| m as usize).sum();
        if let Some(d) = filter.max_degree {
            if new_degree > d || (0..n).any(|v| p.degree(v) + mult[v] as usize > d) {
                continue;
            }
        }
        let mut edges = p.edges().to_vec();
        edges.extend((0..n).filter(|&v| mult[v] > 0).map(|v| (v, n, mult[v])));
        let g = MultiGraph::build(n + 1, &edges)?;
        if let Some(c) = filter.max_cutwidth {
            if oracle::cutwidth_at_most(&g, c)?.is_none() {
                continue;
            }
        }
        out.push((g.canonical_code()?, g));
    }
}

/// A certified member of the obstruction set for cutwidth at most `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub graph: MultiGraph,
    pub certificate: ObstructionCertificate,
    pub code: Vec<u8>,
}

/// Connected multigraphs with at most `max_n` vertices and edge
/// multiplicity at most `max_mult` that have cutwidth exactly `k + 1` while
/// every one-step immersion reduction has cutwidth at most `k`.
pub fn search_obstructions(k: usize, max_n: usize, max_mult: u32) -> Result<Vec<MultiGraph>> {
    Ok(search_certified(k, max_n, max_mult)?.into_iter().map(|o| o.graph).collect())
}

pub fn search_certified(k: usize, max_n: usize, max_mult: u32) -> Result<Vec<Obstruction>> {
    Ok(search_by_size(k, max_n, max_mult)?.into_iter().flatten().collect())
}

fn search_by_size(k: usize, max_n: usize, max_mult: u32) -> Result<Vec<Vec<Obstruction>>> {
    if max_n > SEARCH_LIMIT {
        return Err(Error::TooLarge { size: max_n, limit: SEARCH_LIMIT });
    }
    // An obstruction has maximum degree at most 2(k+1) and cutwidth k+1.
    let filter = GraphFilter { max_mult, max_degree: Some(2 * (k + 1)), max_cutwidth: Some(k + 1) };
    let levels = connected_graphs(max_n, filter)?;
    levels.iter().map(|level| certify_level(level, k)).collect()
}

fn certify_level(level: &[MultiGraph], k: usize) -> Result<Vec<Obstruction>> {
    let checked: Vec<Result<Option<Obstruction>>> = level
        .par_iter()
        .map(|g| {
            Ok(oracle::obstruction_certificate(g, k)?.map(|certificate| Obstruction {
                graph: g.clone(),
                certificate,
                code: g.canonical_code().expect("generated graphs are small"),
            }))
        })
        .collect();
    let mut out = Vec::new();
    for c in checked {
        if let Some(o) = c? {
            out.push(o);
        }
    }
    Ok(out)
}

/// One line of a catalog file. Vertices are 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub format: u32,
    pub k: usize,
    pub n: usize,
    pub edges: Vec<(usize, usize, u32)>,
    pub canonical: String,
    pub optimum: Vec<usize>,
    pub reductions: Vec<(oracle::Reduction, Vec<usize>)>,
}

impl CatalogRecord {
    pub fn from_obstruction(o: &Obstruction, k: usize) -> Self {
        CatalogRecord {
            format: 1,
            k,
            n: o.graph.n(),
            edges: o.graph.edges().iter().map(|&(u, v, m)| (u + 1, v + 1, m)).collect(),
            canonical: o.code.iter().map(|b| format!("{b:02x}")).collect(),
            optimum: o.certificate.optimum.iter().map(|v| v + 1).collect(),
            reductions: o.certificate.reductions.clone(),
        }
    }

    pub fn graph(&self) -> Result<MultiGraph> {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v, m)| (u - 1, v - 1, m)).collect();
        MultiGraph::build(self.n, &edges)
    }
}

/// Progress marker stored next to a catalog: every size up to `done_n`
/// has been written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogCursor {
    pub format: u32,
    pub k: usize,
    pub max_mult: u32,
    pub done_n: usize,
}

pub fn cursor_path(catalog: &Path) -> PathBuf {
    let mut p = catalog.as_os_str().to_owned();
    p.push(".cursor");
    PathBuf::from(p)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Catalog(e.to_string())
}

/// Appends obstructions for sizes not yet covered by the cursor, updating
/// the cursor after each size. Returns the number of records appended.
pub fn write_catalog(path: &Path, k: usize, max_n: usize, max_mult: u32) -> Result<usize> {
    let cpath = cursor_path(path);
    let mut cursor = match std::fs::read_to_string(&cpath) {
        Ok(text) => serde_json::from_str::<CatalogCursor>(&text).map_err(io_err)?,
        Err(_) => CatalogCursor { format: 1, k, max_mult, done_n: 0 },
    };
    if cursor.k != k || cursor.max_mult != max_mult {
        return Err(Error::Catalog(format!(
            "cursor was written for k={} max_mult={}",
            cursor.k, cursor.max_mult
        )));
    }
    if cursor.done_n >= max_n {
        return Ok(0);
    }
    let levels = search_by_size(k, max_n, max_mult)?;
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
    let mut written = 0;
    for (i, level) in levels.iter().enumerate() {
        let n = i + 1;
        if n <= cursor.done_n {
            continue;
        }
        for o in level {
            let line = serde_json::to_string(&CatalogRecord::from_obstruction(o, k)).map_err(io_err)?;
            writeln!(file, "{line}").map_err(io_err)?;
            written += 1;
        }
        file.flush().map_err(io_err)?;
        cursor.done_n = n;
        std::fs::write(&cpath, serde_json::to_string(&cursor).map_err(io_err)?).map_err(io_err)?;
    }
    Ok(written)
}

pub fn read_catalog(path: &Path) -> Result<Vec<CatalogRecord>> {
    let file = File::open(path).map_err(io_err)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(io_err)?);
    }
    Ok(out)
}

/// Disjoint union of `w + 1` members of an immersion antichain. Members may
/// repeat; distinct members must be pairwise incomparable.
pub fn union_obstruction(members: &[MultiGraph], w: usize) -> Result<MultiGraph> {
    if members.len() != w + 1 {
        return Err(Error::MemberCount { expected: w + 1, got: members.len() });
    }
    let codes: Vec<Vec<u8>> = members.iter().map(|g| g.canonical_code()).collect::<Result<_>>()?;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if codes[i] == codes[j] {
                continue;
            }
            if oracle::is_immersion(&members[i], &members[j], false)?.is_some()
                || oracle::is_immersion(&members[j], &members[i], false)?.is_some()
            {
                return Err(Error::NotAntichain(i, j));
            }
        }
    }
    Ok(members.iter().fold(MultiGraph::empty(0), |acc, g| acc.disjoint_union(g)))
}

/// Whether `g` is a minimal graph outside the class of graphs that reach
/// cutwidth `k` after deleting at most `w` edges: it needs `w + 1`
/// deletions, and every one-step reduction needs at most `w`.
pub fn is_deletion_obstruction(g: &MultiGraph, w: usize, k: usize) -> Result<bool> {
    if oracle::dcw(g, k)?.0 != w + 1 {
        return Ok(false);
    }
    for (_, h) in oracle::one_step_reductions(g) {
        if oracle::dcw(&h, k)?.0 > w {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `binom(q + w, w + 1)`, saturating.
pub fn count_union_obstructions(q: usize, w: usize) -> u128 {
    let (n, r) = (q as u128 + w as u128, w as u128 + 1);
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // Exact at every step: acc * (n - i) is divisible by (i + 1).
        acc = match acc.checked_mul(n - i) {
            Some(x) => x / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// A symbol `s` and an inclusive interval of `word` whose letters are all
/// at least `s` and which contains `s` at least `n` times. Guaranteed to
/// exist when the word is at least `n^r` long over `1..=r`.
pub fn heavy_subword(word: &[usize], n: usize) -> Option<(usize, (usize, usize))> {
    let mut symbols: Vec<usize> = word.to_vec();
    symbols.sort_unstable();
    symbols.dedup();
    for &s in &symbols {
        // Any valid interval for s lies inside a maximal run of letters >= s.
        let mut i = 0;
        while i < word.len() {
            if word[i] < s {
                i += 1;
                continue;
            }
            let start = i;
            let mut hits = 0;
            while i < word.len() && word[i] >= s {
                hits += usize::from(word[i] == s);
                i += 1;
            }
            if hits >= n.max(1) {
                return Some((s, (start, i - 1)));
            }
        }
    }
    None
}

/// Direct check of a `heavy_subword` answer.
pub fn is_heavy(word: &[usize], n: usize, s: usize, lo: usize, hi: usize) -> bool {
    lo <= hi
        && hi < word.len()
        && word[lo..=hi].iter().all(|&c| c >= s)
        && word[lo..=hi].iter().filter(|&&c| c == s).count() >= n
}

/// `N^(k+1)` with `N = l^(2(k+1)) * (k+2)^(2l) + 2` and
/// `l = (2k+3)(2k+6)`: the vertex bound for obstructions to cutwidth `k`.
pub fn obstruction_size_bound(k: usize) -> BigUint {
    let ell = (2 * k + 3) * (2 * k + 6);
    let base = BigUint::from(ell).pow(2 * (k as u32 + 1)) * BigUint::from(k + 2).pow(2 * ell as u32) + 2u32;
    base.pow(k as u32 + 1)
}
