//! Text formats. Graph files hold `c` comment lines, one `p cw <n> <m>`
//! header and `e <u> <v> [mult]` edge lines; orderings are whitespace
//! separated vertex lists. Vertices are 1-indexed on disk.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::ordering::Ordering;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let t = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    t.parse().map_err(|_| parse_err(line, format!("bad {what} '{t}'")))
}

/// Parses a graph. Repeated edge lines add up. The header's edge count may
/// give either the number of edge lines or the total multiplicity.
pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut lines_seen = 0;
    let mut total = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "second header"));
                }
                if toks.next() != Some("cw") {
                    return Err(parse_err(line, "expected 'p cw <n> <m>'"));
                }
                let n = field(toks.next(), line, "vertex count")?;
                let m = field(toks.next(), line, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "edge before header"))?;
                let u = field(toks.next(), line, "endpoint")?;
                let v = field(toks.next(), line, "endpoint")?;
                let m = match toks.next() {
                    Some(t) => t.parse::<u32>().map_err(|_| parse_err(line, format!("bad multiplicity '{t}'")))?,
                    None => 1,
                };
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(line, format!("vertex {x} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(Error::ParseLoop { line, vertex: u });
                }
                if m == 0 {
                    return Err(parse_err(line, "multiplicity must be positive"));
                }
                *edges.entry((u.min(v) - 1, u.max(v) - 1)).or_insert(0) += m;
                lines_seen += 1;
                total += m as usize;
            }
            Some(t) => return Err(parse_err(line, format!("unknown line type '{t}'"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing fields"));
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "missing 'p cw' header"))?;
    if m != lines_seen && m != total {
        return Err(parse_err(0, format!("header announces {m} edges, found {lines_seen} lines ({total} with multiplicity)")));
    }
    let list: Vec<_> = edges.into_iter().map(|((u, v), m)| (u, v, m)).collect();
    MultiGraph::build(n, &list)
}

pub fn render_graph(g: &MultiGraph) -> String {
    let mut out = format!("p cw {} {}\n", g.n(), g.edges().len());
    for &(u, v, m) in g.edges() {
        if m == 1 {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        } else {
            out.push_str(&format!("e {} {} {}\n", u + 1, v + 1, m));
        }
    }
    out
}

/// Parses a 1-indexed ordering of `n` vertices; `c` lines are comments.
pub fn parse_ordering(text: &str, n: usize) -> Result<Ordering> {
    let mut perm = Vec::with_capacity(n);
    for (i, raw) in text.lines().enumerate() {
        let body = raw.trim_start();
        if body.starts_with('c') {
            continue;
        }
        for t in body.split_whitespace() {
            let v: usize = t.parse().map_err(|_| parse_err(i + 1, format!("bad vertex '{t}'")))?;
            if v == 0 || v > n {
                return Err(parse_err(i + 1, format!("vertex {v} outside 1..={n}")));
            }
            perm.push(v - 1);
        }
    }
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    Ordering::new(perm)
}

pub fn render_ordering(sigma: &Ordering) -> String {
    let parts: Vec<String> = sigma.as_slice().iter().map(|v| (v + 1).to_string()).collect();
    parts.join(" ") + "\n"
}
