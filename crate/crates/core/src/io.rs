//! Text formats: edge-list CSV, spectrum CSV, and JSON reports with
//! 17-significant-digit floats.

use std::io;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Multigraph;

pub const EDGE_HEADER: &str = "u,v";
pub const SPECTRUM_HEADER: &str = "index,value";

/// Largest vertex index accepted by the edge reader.
pub const MAX_VERTEX: usize = 1 << 24;

/// 17 significant digits: enough to round-trip every f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn write_edge_csv(g: &Multigraph) -> String {
    let mut s = String::with_capacity(12 * (g.m() + 1));
    s.push_str(EDGE_HEADER);
    s.push('\n');
    for &(u, v) in g.edges() {
        s.push_str(&format!("{u},{v}\n"));
    }
    s
}

/// Reads an edge list. The vertex count is `n` when given, else one more
/// than the largest index seen (isolated top vertices are not recorded in
/// the format).
pub fn read_edge_csv(text: &str, n: Option<usize>) -> Result<Multigraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == EDGE_HEADER => {}
        Some((i, h)) => {
            return Err(Error::Parse { line: i + 1, msg: format!("expected header `{EDGE_HEADER}`, found {h:?}") })
        }
        None => return Err(Error::Parse { line: 1, msg: "empty edge list".into() }),
    }
    let mut edges = Vec::new();
    let mut top = 0usize;
    for (i, line) in lines {
        let line_no = i + 1;
        let mut parts = line.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse { line: line_no, msg: format!("expected `u,v`, found {line:?}") });
        };
        let u = parse_index(a, line_no)?;
        let v = parse_index(b, line_no)?;
        top = top.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Multigraph::new(n.unwrap_or(top), edges)
}

fn parse_index(s: &str, line: usize) -> Result<usize> {
    let t = s.trim();
    match t.parse::<usize>() {
        Ok(v) if v < MAX_VERTEX && !t.starts_with('+') => Ok(v),
        _ => Err(Error::Parse { line, msg: format!("bad vertex index {t:?}") }),
    }
}

pub fn write_spectrum_csv(values: &[f64]) -> String {
    let mut s = String::with_capacity(26 * (values.len() + 1));
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    for (i, &x) in values.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", fmt_f64(x)));
    }
    s
}

/// Inverse of [`write_spectrum_csv`]; indices must run 0, 1, 2, ...
pub fn read_spectrum_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == SPECTRUM_HEADER => {}
        Some((i, h)) => {
            return Err(Error::Parse { line: i + 1, msg: format!("expected header `{SPECTRUM_HEADER}`, found {h:?}") })
        }
        None => return Err(Error::Parse { line: 1, msg: "empty spectrum".into() }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let (idx, val) = line.split_once(',').ok_or_else(|| bad(format!("expected `index,value`, found {line:?}")))?;
        if idx.trim().parse::<usize>().ok() != Some(out.len()) {
            return Err(bad(format!("expected index {}, found {idx:?}", out.len())));
        }
        let x: f64 = val.trim().parse().map_err(|_| bad(format!("bad value {val:?}")))?;
        if !x.is_finite() {
            return Err(bad(format!("non-finite value {val:?}")));
        }
        out.push(x);
    }
    Ok(out)
}

/// Writes floats as `{:.16e}`; non-finite floats become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactFloatFormatter;

impl serde_json::ser::Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with exact floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Minimal RFC 4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_csv_round_trip() {
        let g = Multigraph::new(4, vec![(0, 1), (1, 1), (0, 1), (2, 3)]).unwrap();
        let text = write_edge_csv(&g);
        assert_eq!(text, "u,v\n0,1\n1,1\n0,1\n2,3\n");
        assert_eq!(read_edge_csv(&text, None).unwrap(), g);
        let iso = Multigraph::new(6, vec![(0, 1)]).unwrap();
        assert_eq!(read_edge_csv(&write_edge_csv(&iso), Some(6)).unwrap(), iso);
    }

    #[test]
    fn edge_csv_rejects() {
        for bad in ["", "a,b\n0,1", "u,v\n0", "u,v\n0,1,2", "u,v\n-1,0", "u,v\nx,1", "u,v\n99999999999,0"] {
            assert!(read_edge_csv(bad, None).is_err(), "{bad:?}");
        }
        assert!(read_edge_csv("u,v\n0,5\n", Some(3)).is_err());
    }

    #[test]
    fn spectrum_round_trip_is_exact() {
        let v = vec![-2.0, 0.1, 1.0 / 3.0, 5e-300, std::f64::consts::PI];
        let back = read_spectrum_csv(&write_spectrum_csv(&v)).unwrap();
        assert_eq!(back, v);
        assert!(read_spectrum_csv("index,value\n1,0.5\n").is_err());
        assert!(read_spectrum_csv("index,value\n0,nan\n").is_err());
    }

    #[test]
    fn json_floats_have_17_digits() {
        let s = to_json(&(0.1f64, f64::NAN, 2u32)).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,null,2]\n");
        let back: (f64, Option<f64>, u32) = serde_json::from_str(&s).unwrap();
        assert_eq!(back, (0.1, None, 2));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("rsrb"), "rsrb");
        assert_eq!(csv_field("a,\"b\""), "\"a,\"\"b\"\"\"");
    }
}
