//! Plain-text formats.
//!
//! Graph: `n m` then `m` lines `u v` with `u < v`. Demands: `k` then `k`
//! lines `s t`. Telephone schedule: one line per round, calls `u-v`
//! separated by spaces. Radio schedule: one line per round, transmitter ids
//! separated by spaces. An empty line is an idle round. Every line ends in a
//! newline.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::graph::{DemandSet, Graph, MultiGraph};
use crate::schedule::{RadioSchedule, TelephoneSchedule};
use crate::Error;

fn num(tok: &str, line: usize) -> Result<usize, Error> {
    tok.parse().map_err(|_| Error::Parse { line, reason: "expected a non-negative integer" })
}

// Non-blank lines with their 1-based numbers.
fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

fn two(l: &str, line: usize) -> Result<(usize, usize), Error> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((num(a, line)?, num(b, line)?)),
        _ => Err(Error::Parse { line, reason: "expected two integers" }),
    }
}

pub fn parse_graph(s: &str) -> Result<Graph, Error> {
    let mut lines = content_lines(s);
    let (line, head) = lines.next().ok_or(Error::Parse { line: 1, reason: "missing header" })?;
    let (n, m) = two(head, line)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        edges.push(two(l, line)?);
    }
    if edges.len() != m {
        return Err(Error::Parse { line: 1, reason: "edge count does not match header" });
    }
    Graph::new(n, edges)
}

/// The graph format with repeated edge lines counted as parallel copies.
pub fn parse_multigraph(s: &str) -> Result<MultiGraph, Error> {
    let mut lines = content_lines(s);
    let (line, head) = lines.next().ok_or(Error::Parse { line: 1, reason: "missing header" })?;
    let (n, m) = two(head, line)?;
    let mut count: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut seen = 0;
    for (line, l) in lines {
        let (u, v) = two(l, line)?;
        *count.entry((u.min(v), u.max(v))).or_default() += 1;
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse { line: 1, reason: "edge count does not match header" });
    }
    MultiGraph::new(n, count.into_iter().map(|((u, v), c)| (u, v, c)))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_demands(s: &str, n: usize) -> Result<DemandSet, Error> {
    let mut lines = content_lines(s);
    let (line, head) = lines.next().ok_or(Error::Parse { line: 1, reason: "missing header" })?;
    let k = num(head, line)?;
    let mut pairs = Vec::with_capacity(k);
    for (line, l) in lines {
        pairs.push(two(l, line)?);
    }
    if pairs.len() != k {
        return Err(Error::Parse { line: 1, reason: "pair count does not match header" });
    }
    DemandSet::new(n, pairs)
}

pub fn format_demands(d: &DemandSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", d.len());
    for &(s, t) in d.pairs() {
        let _ = writeln!(out, "{s} {t}");
    }
    out
}

/// Whitespace-separated integers, e.g. a terminal list or node weights.
pub fn parse_list(s: &str) -> Result<Vec<u64>, Error> {
    let mut out = Vec::new();
    for (i, l) in s.lines().enumerate() {
        for tok in l.split_whitespace() {
            out.push(tok.parse().map_err(|_| Error::Parse { line: i + 1, reason: "expected a non-negative integer" })?);
        }
    }
    Ok(out)
}

pub fn parse_telephone(s: &str) -> Result<TelephoneSchedule, Error> {
    let mut rounds = Vec::new();
    for (i, l) in s.split_terminator('\n').enumerate() {
        let mut calls = Vec::new();
        for tok in l.split_whitespace() {
            let (a, b) = tok.split_once('-').ok_or(Error::Parse { line: i + 1, reason: "expected a call u-v" })?;
            calls.push((num(a, i + 1)?, num(b, i + 1)?));
        }
        rounds.push(calls);
    }
    Ok(TelephoneSchedule::from_rounds(rounds))
}

pub fn format_telephone(s: &TelephoneSchedule) -> String {
    let mut out = String::new();
    for round in &s.rounds {
        for (i, (u, v)) in round.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{u}-{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_radio(s: &str) -> Result<RadioSchedule, Error> {
    let mut sched = RadioSchedule::new();
    for (i, l) in s.split_terminator('\n').enumerate() {
        let ids = l.split_whitespace().map(|t| num(t, i + 1)).collect::<Result<Vec<_>, _>>()?;
        sched.push(ids);
    }
    Ok(sched)
}

pub fn format_radio(s: &RadioSchedule) -> String {
    let mut out = String::new();
    for round in &s.rounds {
        for (i, v) in round.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
