//! Text formats: tab-separated edge lists, CSV signals and JSON results.
//!
//! All floating-point output uses 17 significant digits so that values
//! survive a write/read round trip bit-for-bit.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{AzError, Result};
use crate::graph::{DynamicGraph, NodeId, WeightedGraph};
use crate::signal::GraphSignal;

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // keeps "-0" distinguishable without exponent noise
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> AzError + '_ {
    move |source| AzError::Io { path: path.to_path_buf(), source }
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(io_err(path))?;
    Ok(s)
}

/// Non-empty, non-comment lines with their 1-based line numbers, split on
/// tabs.
fn tsv_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split('\t').map(str::trim).collect()))
        }
    })
}

struct Ctx<'a> {
    path: &'a Path,
    line: usize,
}

impl Ctx<'_> {
    fn err(&self, msg: impl Into<String>) -> AzError {
        AzError::Parse {
            path: self.path.display().to_string(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn float(&self, s: &str, what: &str) -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| self.err(format!("{what}: cannot parse {s:?} as a number")))
    }

    fn time(&self, s: &str) -> Result<usize> {
        match s.parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(self.err(format!("time step must be an integer >= 1, got {s:?}"))),
        }
    }

    fn node(&self, s: &str) -> Result<NodeId> {
        if s.is_empty() {
            Err(self.err("empty node id"))
        } else {
            Ok(NodeId::new(s))
        }
    }

    fn wrap(&self, e: AzError) -> AzError {
        match e {
            AzError::Parse { .. } | AzError::Io { .. } => e,
            other => self.err(other.to_string()),
        }
    }
}

/// Parse a static edge list `u<TAB>v[<TAB>w]`.
pub fn parse_graph(text: &str, path: &Path, directed: bool) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for (line, cols) in tsv_rows(text) {
        let cx = Ctx { path, line };
        let w = match cols.len() {
            2 => 1.0,
            3 => cx.float(cols[2], "weight")?,
            n => return Err(cx.err(format!("expected 2 or 3 tab-separated fields, got {n}"))),
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(cx.err(format!("weight must be finite and > 0, got {w}")));
        }
        edges.push((cx.node(cols[0])?, cx.node(cols[1])?, w));
    }
    Ok(WeightedGraph::validate(std::iter::empty(), edges, directed)?.0)
}

pub fn read_graph(path: &Path, directed: bool) -> Result<WeightedGraph> {
    parse_graph(&read_text(path)?, path, directed)
}

/// Read a dynamic edge list `t<TAB>u<TAB>v<TAB>w` and an optional presence
/// file `t<TAB>v`. The horizon is the largest time step mentioned in either
/// file, or `horizon` when given.
pub fn read_dynamic_graph(
    path: &Path,
    presence: Option<&Path>,
    directed: bool,
    horizon: Option<usize>,
) -> Result<DynamicGraph> {
    let mut edges: Vec<Vec<(NodeId, NodeId, f64)>> = Vec::new();
    let mut nodes: Vec<Vec<NodeId>> = Vec::new();
    let grow = |t: usize, e: &mut Vec<Vec<_>>, n: &mut Vec<Vec<_>>| {
        if e.len() < t {
            e.resize_with(t, Vec::new);
            n.resize_with(t, Vec::new);
        }
    };
    let text = read_text(path)?;
    for (line, cols) in tsv_rows(&text) {
        let cx = Ctx { path, line };
        let w = match cols.len() {
            3 => 1.0,
            4 => cx.float(cols[3], "weight")?,
            n => return Err(cx.err(format!("expected 3 or 4 tab-separated fields, got {n}"))),
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(cx.err(format!("weight must be finite and > 0, got {w}")));
        }
        let t = cx.time(cols[0])?;
        grow(t, &mut edges, &mut nodes);
        edges[t - 1].push((cx.node(cols[1])?, cx.node(cols[2])?, w));
    }
    if let Some(p) = presence {
        let text = read_text(p)?;
        for (line, cols) in tsv_rows(&text) {
            let cx = Ctx { path: p, line };
            if cols.len() != 2 {
                return Err(cx.err(format!("expected 2 tab-separated fields, got {}", cols.len())));
            }
            let t = cx.time(cols[0])?;
            grow(t, &mut edges, &mut nodes);
            nodes[t - 1].push(cx.node(cols[1])?);
        }
    }
    if let Some(h) = horizon {
        if edges.len() > h {
            return Err(AzError::invalid(format!(
                "{}: time step {} exceeds horizon {h}",
                path.display(),
                edges.len()
            )));
        }
        grow(h, &mut edges, &mut nodes);
    }
    if edges.is_empty() {
        return Err(AzError::invalid(format!("{}: no time steps found", path.display())));
    }
    let snapshots = edges
        .into_iter()
        .zip(nodes)
        .map(|(e, n)| WeightedGraph::validate(n, e, directed).map(|(g, _)| g))
        .collect::<Result<Vec<_>>>()?;
    DynamicGraph::new(snapshots)
}

/// Read `u<TAB>v<TAB>delta` rows.
pub fn read_distances(path: &Path) -> Result<Vec<(NodeId, NodeId, f64)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (line, cols) in tsv_rows(&text) {
        let cx = Ctx { path, line };
        if cols.len() != 3 {
            return Err(cx.err(format!("expected 3 tab-separated fields, got {}", cols.len())));
        }
        let d = cx.float(cols[2], "distance")?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(cx.err(format!("distance must be finite and >= 0, got {d}")));
        }
        out.push((cx.node(cols[0])?, cx.node(cols[1])?, d));
    }
    Ok(out)
}

pub fn write_graph<W: Write>(g: &WeightedGraph, mut out: W) -> io::Result<()> {
    for (u, v, w) in g.edge_triples() {
        writeln!(out, "{u}\t{v}\t{}", fmt_f64(w))?;
    }
    out.flush()
}

/// Parse a signal CSV with header `t,node,f0[,f1,...]`.
pub fn parse_signal(text: &str, path: &Path) -> Result<GraphSignal> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Ctx { path, line: 1 }.err(e.to_string()))?
        .clone();
    let hx = Ctx { path, line: 1 };
    if header.len() < 3 || &header[0] != "t" || &header[1] != "node" {
        return Err(hx.err("header must be `t,node,f0[,f1,...]`"));
    }
    let dim = header.len() - 2;
    let mut rows = Vec::new();
    let mut horizon = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Ctx { path, line }.err(e.to_string())
        })?;
        let cx = Ctx { path, line: rec.position().map(|p| p.line() as usize).unwrap_or(0) };
        if rec.len() != dim + 2 {
            return Err(cx.err(format!("expected {} fields, got {}", dim + 2, rec.len())));
        }
        let t = cx.time(&rec[0])?;
        let node = cx.node(&rec[1])?;
        let vals = (2..rec.len())
            .map(|k| cx.float(&rec[k], &header[k]))
            .collect::<Result<Vec<_>>>()?;
        horizon = horizon.max(t);
        rows.push((cx.line, t, node, vals));
    }
    if rows.is_empty() {
        return Err(hx.err("signal file has no observations"));
    }
    let mut x = GraphSignal::new(dim, horizon)?;
    for (line, t, node, vals) in rows {
        let i = x.add_node(node.clone());
        let cx = Ctx { path, line };
        if x.get(i, t).is_some() {
            return Err(cx.err(format!("duplicate observation for node {node} at t={t}")));
        }
        x.set(i, t, &vals).map_err(|e| cx.wrap(e))?;
    }
    Ok(x)
}

pub fn read_signal(path: &Path) -> Result<GraphSignal> {
    parse_signal(&read_text(path)?, path)
}

/// Write the signal in `t,node,f0,...` form, ordered by time then node.
pub fn write_signal<W: Write>(x: &GraphSignal, out: W) -> io::Result<()> {
    let mut out = BufWriter::new(out);
    let head: Vec<String> = (0..x.dim()).map(|f| format!("f{f}")).collect();
    writeln!(out, "t,node,{}", head.join(","))?;
    for t in 1..=x.horizon() {
        for (i, n) in x.nodes().iter().enumerate() {
            if let Some(v) = x.get(i, t) {
                write!(out, "{t},{n}")?;
                for val in v {
                    write!(out, ",{}", fmt_f64(*val))?;
                }
                writeln!(out)?;
            }
        }
    }
    out.flush()
}

/// Write `value` to a new file at `path` through `write`.
pub fn write_file<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut f = BufWriter::new(File::create(path).map_err(io_err(path))?);
    write(&mut f).and_then(|_| f.flush()).map_err(io_err(path))
}

struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with every float printed to 17 significant digits.
/// Non-finite floats become `null`, as in plain serde_json.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise);
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn static_graph_with_comments_and_default_weight() {
        let g = parse_graph("# header\na\tb\nb\tc\t2.5\n\n", p(), false).unwrap();
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.edges()[0].w, 1.0);
        assert_eq!(g.edges()[1].w, 2.5);
    }

    #[test]
    fn malformed_rows_report_line() {
        let e = parse_graph("a\tb\n# c\na\tb\tnope\n", p(), false).unwrap_err();
        assert!(matches!(e, AzError::Parse { line: 3, .. }), "{e}");
        let e = parse_graph("a\tb\t-1\n", p(), false).unwrap_err();
        assert!(matches!(e, AzError::Parse { line: 1, .. }));
        let e = parse_signal("t,node,f0\n1,a,0.5\n1,b,x\n", p()).unwrap_err();
        assert!(matches!(e, AzError::Parse { line: 3, .. }), "{e}");
    }

    #[test]
    fn signal_round_trip_is_bit_exact() {
        let mut x = GraphSignal::new(2, 2).unwrap();
        x.insert("a".into(), 1, vec![0.1, -1e-300]).unwrap();
        x.insert("b".into(), 2, vec![1.0 / 3.0, 12345.678]).unwrap();
        let mut buf = Vec::new();
        write_signal(&x, &mut buf).unwrap();
        let y = parse_signal(std::str::from_utf8(&buf).unwrap(), p()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn json_has_seventeen_digits() {
        let s = to_json(&serde_json::json!({ "c": -std::f64::consts::SQRT_2 }));
        assert_eq!(s, r#"{"c":-1.4142135623730951e0}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["c"].as_f64().unwrap(), -std::f64::consts::SQRT_2);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(read_graph(Path::new("/nonexistent/g.tsv"), false).unwrap_err().is_io());
    }

    #[test]
    fn dynamic_graph_and_presence() {
        let dir = tempfile::tempdir().unwrap();
        let e = dir.path().join("e.tsv");
        let n = dir.path().join("n.tsv");
        std::fs::write(&e, "1\ta\tb\t1\n3\tb\tc\t2\n").unwrap();
        std::fs::write(&n, "2\tz\n").unwrap();
        let dg = read_dynamic_graph(&e, Some(&n), false, None).unwrap();
        assert_eq!(dg.horizon(), 3);
        assert!(dg.is_present(&"z".into(), 2));
        assert_eq!(dg.snapshot(2).n_edges(), 0);
        assert!(read_dynamic_graph(&e, None, false, Some(2)).is_err());
    }
}
