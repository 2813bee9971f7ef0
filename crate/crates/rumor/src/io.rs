//! Text formats: edge lists, infected node sets, traces and score tables.
//!
//! Every writer accepts comment lines that are emitted first, each prefixed
//! with `# `; all readers skip lines starting with `#`.

use std::fs;
use std::io::Write;
use std::path::Path;

use rumor_core::centrality::CentralityScores;
use rumor_core::estimators::EstimateResult;
use rumor_core::spread::SpreadTrace;
use rumor_core::{Graph, GraphBuilder, NodeId};

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "step,node,time";
pub const SCORES_HEADER: &str = "node,log_score,exact_score,is_argmax";
pub const ESTIMATE_HEADER: &str = "estimator,node,log_score,is_argmax,chosen";

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_id(tok: &str, what: &'static str, line: usize) -> Result<NodeId> {
    tok.parse::<u64>().map(NodeId).map_err(|_| Error::Parse {
        what,
        line,
        msg: format!("`{tok}` is not a non-negative integer"),
    })
}

/// Parses `u v` lines. Duplicates and reversed duplicates collapse to one
/// undirected edge.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                what: "edge list",
                line,
                msg: format!("expected two node ids, found {} fields", toks.len()),
            });
        }
        let u = parse_id(toks[0], "edge list", line)?;
        let v = parse_id(toks[1], "edge list", line)?;
        b.add_edge(u, v).map_err(|e| Error::Parse {
            what: "edge list",
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(b.build())
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&read(path.as_ref())?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}

/// One `u v` line per edge with `u < v`, sorted.
pub fn write_edge_list<W: Write>(g: &Graph, w: &mut W, comments: &[String]) -> Result<()> {
    write_comments(w, comments)?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = Vec::new();
    write_edge_list(g, &mut out, &[]).expect("writing to memory");
    String::from_utf8(out).expect("ascii")
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf, comments)?;
    write_file(path.as_ref(), &buf)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parses an infected node set. Accepted layouts:
/// a trace CSV (`step,node,time` header), an edge list of the infected
/// subgraph, or one node id per line.
pub fn parse_infected(text: &str) -> Result<Vec<NodeId>> {
    let mut lines = content_lines(text).peekable();
    match lines.peek() {
        None => return Err(Error::Core(rumor_core::Error::Empty)),
        Some((_, first)) if first.replace(' ', "") == TRACE_HEADER => {
            return Ok(parse_trace(text)?.into_iter().map(|r| r.node).collect());
        }
        _ => {}
    }
    let mut nodes = Vec::new();
    let mut width = None;
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if !matches!(toks.len(), 1 | 2) || width.is_some_and(|w| w != toks.len()) {
            return Err(Error::Parse {
                what: "infected set",
                line,
                msg: "expected one node id per line or two per line (edges) throughout".into(),
            });
        }
        width = Some(toks.len());
        for t in toks {
            nodes.push(parse_id(t, "infected set", line)?);
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

pub fn load_infected(path: impl AsRef<Path>) -> Result<Vec<NodeId>> {
    parse_infected(&read(path.as_ref())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub node: NodeId,
    pub time: f64,
}

pub fn write_trace<W: Write>(trace: &SpreadTrace, w: &mut W, comments: &[String]) -> Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{TRACE_HEADER}")?;
    for (k, (v, t)) in trace.order.iter().zip(&trace.times).enumerate() {
        writeln!(w, "{k},{v},{t}")?;
    }
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad = |line: usize, msg: String| Error::Parse {
        what: "trace",
        line,
        msg,
    };
    let header = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["step", "node", "time"] {
        return Err(bad(1, format!("header must be `{TRACE_HEADER}`")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            bad(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let step = rec[0]
            .parse::<usize>()
            .map_err(|_| bad(line, format!("bad step `{}`", &rec[0])))?;
        let node = parse_id(&rec[1], "trace", line)?;
        let time = rec[2]
            .parse::<f64>()
            .ok()
            .filter(|t| *t >= 0.0)
            .ok_or_else(|| bad(line, format!("bad time `{}`", &rec[2])))?;
        if step != rows.len() {
            return Err(bad(line, format!("expected step {}, found {step}", rows.len())));
        }
        rows.push(TraceRow { step, node, time });
    }
    Ok(rows)
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

pub fn write_scores<W: Write>(s: &CentralityScores, w: &mut W, comments: &[String]) -> Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{SCORES_HEADER}")?;
    for (v, l) in s.iter() {
        let exact = s.exact_score(v).map(|x| x.to_string()).unwrap_or_default();
        let top = s.argmax_set().binary_search(&v).is_ok();
        writeln!(w, "{v},{l},{exact},{}", flag(top))?;
    }
    Ok(())
}

pub fn write_estimate<W: Write>(r: &EstimateResult, w: &mut W, comments: &[String]) -> Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "{ESTIMATE_HEADER}")?;
    for (v, l) in r.scores.iter() {
        let top = r.argmax_set().binary_search(&v).is_ok();
        writeln!(
            w,
            "{},{v},{l},{},{}",
            r.estimator_name(),
            flag(top),
            flag(v == r.estimate)
        )?;
    }
    Ok(())
}

/// `key,value` report table.
pub fn write_report<W: Write>(
    rows: &[(String, String)],
    w: &mut W,
    comments: &[String],
) -> Result<()> {
    write_comments(w, comments)?;
    writeln!(w, "key,value")?;
    for (k, v) in rows {
        writeln!(w, "{k},{v}")?;
    }
    Ok(())
}
