//! Graph, partition and ordering files.
//!
//! Graph formats:
//! - **edge list**: whitespace-separated `u v [w]` lines, `#` or `%` starts a
//!   comment. Ids are non-negative integers compacted to `0..n` in order of
//!   first occurrence; duplicate lines are kept.
//! - **METIS**: the ASCII graph format (1-indexed adjacency lines, header
//!   `n m [fmt [ncon]]`, `%` comments). Vertex sizes and weights are read and
//!   ignored; edge weights become arc weights.
//! - **CSR snapshot**: `GLCSR1`, then little-endian `u64` words `n`, `m`,
//!   `flags` (bit 0 directed, bit 1 weighted), `n + 1` offsets, `m` targets
//!   and, when weighted, `m` IEEE-754 weights.
//!
//! Partition files hold one part id per line (line `i` is vertex `i`);
//! ordering files hold one new id per line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use graphlayout_core::ordering::{Ordering, Scope};
use graphlayout_core::{Graph, Partition};

use crate::error::{Error, Result};

pub const CSR_MAGIC: &[u8; 6] = b"GLCSR1";
const FLAG_DIRECTED: u64 = 1;
const FLAG_WEIGHTED: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    EdgeList,
    Metis,
    Csr,
}

impl Format {
    /// File extension used for graphs the CLI writes.
    pub fn extension(self) -> &'static str {
        match self {
            Format::EdgeList => "edges",
            Format::Metis => "metis",
            Format::Csr => "glcsr",
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// `directed` only matters for edge lists; METIS files are undirected and
/// CSR snapshots record their own flag.
pub fn read_graph(path: &Path, format: Format, directed: bool) -> Result<Graph> {
    match format {
        Format::EdgeList => parse_edge_list(&read_text(path)?, directed, path),
        Format::Metis => parse_metis(&read_text(path)?, path),
        Format::Csr => decode_csr(&fs::read(path).map_err(|e| Error::io(path, e))?, path),
    }
}

pub fn write_graph(g: &Graph, path: &Path, format: Format) -> Result<()> {
    let bytes = match format {
        Format::EdgeList => edge_list_string(g).into_bytes(),
        Format::Metis => metis_string(g)?.into_bytes(),
        Format::Csr => encode_csr(g),
    };
    write_bytes(path, &bytes)
}

fn parse_err(origin: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn format_err(origin: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: origin.to_path_buf(),
        msg: msg.into(),
    }
}

pub fn parse_edge_list(text: &str, directed: bool, origin: &Path) -> Result<Graph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut weighted = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', '%']).next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if !(2..=3).contains(&tokens.len()) {
            return Err(parse_err(origin, i + 1, format!("expected `u v [w]`, got {:?}", raw.trim())));
        }
        let mut vertex = |tok: &str| -> Result<usize> {
            let id: u64 = tok
                .parse()
                .map_err(|_| parse_err(origin, i + 1, format!("bad vertex id {tok:?}")))?;
            let next = ids.len();
            Ok(*ids.entry(id).or_insert(next))
        };
        let u = vertex(tokens[0])?;
        let v = vertex(tokens[1])?;
        let w = match tokens.get(2) {
            Some(tok) => {
                weighted = true;
                let w: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(origin, i + 1, format!("bad weight {tok:?}")))?;
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(graphlayout_core::Error::Domain(format!(
                        "{}:{}: weight {w} is negative or not finite",
                        origin.display(),
                        i + 1
                    ))
                    .into());
                }
                w
            }
            None => 1.0,
        };
        edges.push((u, v, w));
    }
    let n = ids.len();
    Ok(if weighted {
        Graph::from_weighted_edges(n, &edges, directed)?
    } else {
        let plain: Vec<_> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        Graph::from_edges(n, &plain, directed)?
    })
}

/// Undirected graphs list each edge once as `u v` with `u <= v`.
pub fn edge_list_string(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v, w) in g.arcs() {
        if !g.is_directed() && u > v {
            continue;
        }
        if g.is_weighted() {
            let _ = writeln!(out, "{u} {v} {w}");
        } else {
            let _ = writeln!(out, "{u} {v}");
        }
    }
    out
}

pub fn parse_metis(text: &str, origin: &Path) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('%'));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| format_err(origin, "missing header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if !(2..=4).contains(&head.len()) {
        return Err(parse_err(origin, hline + 1, "header must be `n m [fmt [ncon]]`"));
    }
    let num = |tok: &str| -> Result<usize> {
        tok.parse()
            .map_err(|_| parse_err(origin, hline + 1, format!("bad header field {tok:?}")))
    };
    let n = num(head[0])?;
    let m = num(head[1])?;
    let fmt = head.get(2).copied().unwrap_or("0");
    if fmt.len() > 3 || !fmt.chars().all(|c| c == '0' || c == '1') {
        return Err(parse_err(origin, hline + 1, format!("bad fmt code {fmt:?}")));
    }
    let fmt = format!("{fmt:0>3}");
    let has_size = &fmt[0..1] == "1";
    let has_vweight = &fmt[1..2] == "1";
    let has_eweight = &fmt[2..3] == "1";
    let ncon = match head.get(3) {
        Some(tok) => num(tok)?,
        None => usize::from(has_vweight),
    };
    let skip = usize::from(has_size) + if has_vweight { ncon } else { 0 };

    let body: Vec<(usize, &str)> = lines.collect();
    if body.len() < n || body[n..].iter().any(|(_, l)| !l.trim().is_empty()) {
        return Err(format_err(
            origin,
            format!("header announces {n} vertices, found {} adjacency lines", body.len()),
        ));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut targets = Vec::with_capacity(2 * m);
    let mut weights = has_eweight.then(|| Vec::with_capacity(2 * m));
    for (v, &(lno, line)) in body[..n].iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < skip {
            return Err(parse_err(origin, lno + 1, "missing vertex size or weights"));
        }
        let rest = &tokens[skip..];
        let step = if has_eweight { 2 } else { 1 };
        if rest.len() % step != 0 {
            return Err(parse_err(origin, lno + 1, "neighbor without edge weight"));
        }
        for pair in rest.chunks(step) {
            let u: usize = pair[0]
                .parse()
                .map_err(|_| parse_err(origin, lno + 1, format!("bad neighbor {:?}", pair[0])))?;
            if u == 0 || u > n {
                return Err(parse_err(origin, lno + 1, format!("neighbor {u} outside 1..={n}")));
            }
            if u - 1 == v {
                return Err(parse_err(origin, lno + 1, "self-loop"));
            }
            targets.push(u - 1);
            if let Some(w) = weights.as_mut() {
                let x: f64 = pair[1]
                    .parse()
                    .map_err(|_| parse_err(origin, lno + 1, format!("bad edge weight {:?}", pair[1])))?;
                w.push(x);
            }
        }
        offsets.push(targets.len());
    }
    if targets.len() != 2 * m {
        return Err(format_err(
            origin,
            format!("header announces {m} edges, adjacency lists hold {} arcs", targets.len()),
        ));
    }
    Graph::from_csr(offsets, targets, weights, false).map_err(|e| match e {
        graphlayout_core::Error::Invalid(msg) => format_err(origin, msg),
        other => other.into(),
    })
}

pub fn metis_string(g: &Graph) -> Result<String> {
    if g.is_directed() {
        return Err(Error::Invalid("METIS graphs are undirected".into()));
    }
    if g.arcs().any(|(u, v, _)| u == v) {
        return Err(Error::Invalid("METIS graphs cannot hold self-loops".into()));
    }
    let mut out = String::new();
    let _ = write!(out, "{} {}", g.n(), g.m() / 2);
    if g.is_weighted() {
        out.push_str(" 1");
    }
    out.push('\n');
    for v in 0..g.n() {
        let mut first = true;
        for (i, &u) in g.neighbors(v).iter().enumerate() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", u + 1);
            if g.is_weighted() {
                let _ = write!(out, " {}", g.arc_weight_at(v, i));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn encode_csr(g: &Graph) -> Vec<u8> {
    let words = 3 + g.n() + 1 + g.m() * if g.is_weighted() { 2 } else { 1 };
    let mut out = Vec::with_capacity(CSR_MAGIC.len() + 8 * words);
    out.extend_from_slice(CSR_MAGIC);
    let flags = if g.is_directed() { FLAG_DIRECTED } else { 0 } | if g.is_weighted() { FLAG_WEIGHTED } else { 0 };
    for x in [g.n() as u64, g.m() as u64, flags] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for &x in g.offsets().iter().chain(g.targets()) {
        out.extend_from_slice(&(x as u64).to_le_bytes());
    }
    if let Some(w) = g.weights() {
        for x in w {
            out.extend_from_slice(&x.to_bits().to_le_bytes());
        }
    }
    out
}

pub fn decode_csr(bytes: &[u8], origin: &Path) -> Result<Graph> {
    let body = bytes
        .strip_prefix(CSR_MAGIC.as_slice())
        .ok_or_else(|| format_err(origin, "not a GLCSR1 snapshot"))?;
    if body.len() % 8 != 0 || body.len() < 24 {
        return Err(format_err(origin, "truncated snapshot"));
    }
    let words: Vec<u64> = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let (n, m, flags) = (words[0], words[1], words[2]);
    if flags & !(FLAG_DIRECTED | FLAG_WEIGHTED) != 0 {
        return Err(format_err(origin, format!("unknown flags {flags:#x}")));
    }
    let weighted = flags & FLAG_WEIGHTED != 0;
    let expected = n
        .checked_add(1)
        .and_then(|x| x.checked_add(m.checked_mul(if weighted { 2 } else { 1 })?))
        .and_then(|x| x.checked_add(3));
    if expected != Some(words.len() as u64) {
        return Err(format_err(origin, "snapshot length does not match n and m"));
    }
    let (n, m) = (n as usize, m as usize);
    let to_index = |x: &u64| usize::try_from(*x).map_err(|_| format_err(origin, "id exceeds usize"));
    let offsets = words[3..4 + n].iter().map(to_index).collect::<Result<Vec<_>>>()?;
    let targets = words[4 + n..4 + n + m].iter().map(to_index).collect::<Result<Vec<_>>>()?;
    let weights = weighted.then(|| words[4 + n + m..].iter().map(|&b| f64::from_bits(b)).collect());
    Graph::from_csr(offsets, targets, weights, flags & FLAG_DIRECTED != 0).map_err(|e| match e {
        graphlayout_core::Error::Invalid(msg) => format_err(origin, msg),
        other => other.into(),
    })
}

/// Lines of non-negative integers; trailing blank lines are ignored.
fn parse_id_lines(text: &str, origin: &Path) -> Result<Vec<usize>> {
    text.trim_end()
        .lines()
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| parse_err(origin, i + 1, format!("expected a non-negative integer, got {:?}", l.trim())))
        })
        .collect()
}

/// `p = None` takes the largest id plus one.
pub fn parse_partition(text: &str, g: &Graph, p: Option<usize>, origin: &Path) -> Result<Partition> {
    let assignment = parse_id_lines(text, origin)?;
    if assignment.len() != g.n() {
        return Err(format_err(
            origin,
            format!("{} part ids for {} vertices", assignment.len(), g.n()),
        ));
    }
    let p = p.unwrap_or_else(|| assignment.iter().max().map_or(1, |&k| k + 1));
    if let Some((v, &k)) = assignment.iter().enumerate().find(|(_, &k)| k >= p) {
        return Err(parse_err(origin, v + 1, format!("part id {k} >= p = {p}")));
    }
    Ok(Partition::new(g, p, assignment)?)
}

pub fn read_partition(path: &Path, g: &Graph, p: Option<usize>) -> Result<Partition> {
    parse_partition(&read_text(path)?, g, p, path)
}

pub fn partition_string(part: &Partition) -> String {
    lines_of(part.assignment())
}

pub fn parse_ordering(text: &str, n: usize, origin: &Path) -> Result<Ordering> {
    let perm = parse_id_lines(text, origin)?;
    if perm.len() != n {
        return Err(format_err(origin, format!("{} ids for {n} vertices", perm.len())));
    }
    Ordering::new(perm, Scope::Global).map_err(|e| format_err(origin, e.to_string()))
}

pub fn read_ordering(path: &Path, n: usize) -> Result<Ordering> {
    parse_ordering(&read_text(path)?, n, path)
}

pub fn ordering_string(ord: &Ordering) -> String {
    lines_of(ord.perm())
}

/// Line `i`: new id of old vertex `i`, or `-` when it was dropped.
pub fn id_map_string(map: &[Option<usize>]) -> String {
    let mut out = String::new();
    for x in map {
        match x {
            Some(v) => {
                let _ = writeln!(out, "{v}");
            }
            None => out.push_str("-\n"),
        }
    }
    out
}

fn lines_of(xs: &[usize]) -> String {
    let mut out = String::with_capacity(xs.len() * 4);
    for x in xs {
        let _ = writeln!(out, "{x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn here() -> &'static Path {
        Path::new("<test>")
    }

    #[test]
    fn edge_list_examples() {
        let g = parse_edge_list("0 1\n1 2", false, here()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 4));
        let g = parse_edge_list("5 9\n9 5", true, here()).unwrap();
        assert_eq!((g.n(), g.m()), (2, 2));
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        let g = parse_edge_list("1 2 0.5\n", false, here()).unwrap();
        assert_eq!(g.weights(), Some(&[0.5, 0.5][..]));
    }

    #[test]
    fn edge_list_comments_and_errors() {
        let g = parse_edge_list("# header\n% other\n0 1 # trailing\n\n", false, here()).unwrap();
        assert_eq!(g.m(), 2);
        match parse_edge_list("0 1\n0 x\n", false, here()) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_edge_list("0 1 -2\n", false, here()),
            Err(Error::Core(graphlayout_core::Error::Domain(_)))
        ));
        assert!(parse_edge_list("0 1 2 3\n", false, here()).is_err());
    }

    #[test]
    fn metis_examples() {
        let g = parse_metis("3 2\n2\n1 3\n2\n", here()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 4));
        assert!(matches!(parse_metis("3 2\n2\n1\n\n", here()), Err(Error::Format { .. })));
        assert!(matches!(parse_metis("3 1\n2\n1 3\n\n", here()), Err(Error::Format { .. })));
        let g = parse_metis("3 1\n2\n1\n\n", here()).unwrap();
        assert_eq!(g.degree(2), 0);
        assert!(parse_metis("4 2\n2\n1 3\n2\n", here()).is_err());
    }

    #[test]
    fn metis_weights_and_vertex_weights() {
        let g = parse_metis("% c\n3 2 011\n5 2 7\n1 1 7 3 2\n1 2 2\n", here()).unwrap();
        assert_eq!(g.weights(), Some(&[7.0, 7.0, 2.0, 2.0][..]));
        let back = parse_metis(&metis_string(&g).unwrap(), here()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn csr_round_trip_and_corruption() {
        let g = parse_edge_list("0 1 2.5\n1 2 0.25\n2 0 1\n", true, here()).unwrap();
        let bytes = encode_csr(&g);
        assert_eq!(&bytes[..6], b"GLCSR1");
        assert_eq!(decode_csr(&bytes, here()).unwrap(), g);
        assert!(decode_csr(&bytes[..bytes.len() - 8], here()).is_err());
        assert!(decode_csr(b"GLCSR2", here()).is_err());
    }

    #[test]
    fn partition_files() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n", false, here()).unwrap();
        let part = parse_partition("0\n0\n1\n1\n", &g, Some(2), here()).unwrap();
        assert_eq!(part.assignment(), &[0, 0, 1, 1]);
        let again = parse_partition(&partition_string(&part), &g, Some(2), here()).unwrap();
        assert_eq!(again, part);
        assert!(parse_partition("0\n0\n1\n1\n0\n", &g, Some(2), here()).is_err());
        assert!(parse_partition("0\n0\n2\n1\n", &g, Some(2), here()).is_err());
        assert!(parse_partition("0\n0\nx\n1\n", &g, Some(2), here()).is_err());
    }

    #[test]
    fn ordering_files() {
        let o = parse_ordering("2\n0\n1\n", 3, here()).unwrap();
        assert_eq!(o.perm(), &[2, 0, 1]);
        assert_eq!(ordering_string(&o), "2\n0\n1\n");
        assert!(parse_ordering("0\n0\n1\n", 3, here()).is_err());
    }
}
