//! Edge-list text: a header `n <N>`, then `<i> <j> <+1|-1> <class>` per
//! edge with 0-based vertices. `#` starts a comment.

use fullersim_core::topology::{Coupling, Edge, FullereneGraph};

use super::LineError;

pub fn parse_edge_list(text: &str) -> Result<FullereneGraph, LineError> {
    let mut n: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut degree: Vec<(usize, usize)> = Vec::new(); // (count, last line)
    let mut seen = std::collections::BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((n, _)) = n else {
            match tokens.as_slice() {
                ["n", count] => {
                    let count: usize = count
                        .parse()
                        .map_err(|_| LineError::new(line, format!("bad vertex count `{count}`")))?;
                    if count == 0 {
                        return Err(LineError::new(line, "graph has no vertices"));
                    }
                    n = Some((count, line));
                    degree = vec![(0, line); count];
                    continue;
                }
                _ => return Err(LineError::new(line, "expected header `n <N>`")),
            }
        };
        let [i, j, sign, class] = tokens.as_slice() else {
            return Err(LineError::new(line, "expected `<i> <j> <+1|-1> <class>`"));
        };
        let vertex = |t: &str| -> Result<usize, LineError> {
            let v: usize = t.parse().map_err(|_| LineError::new(line, format!("bad vertex index `{t}`")))?;
            if v >= n {
                return Err(LineError::new(line, format!("vertex {v} out of range 0..{n}")));
            }
            Ok(v)
        };
        let (a, b) = (vertex(i)?, vertex(j)?);
        if a == b {
            return Err(LineError::new(line, format!("self-loop at vertex {a}")));
        }
        let value: i64 = sign
            .parse()
            .map_err(|_| LineError::new(line, format!("bad coupling `{sign}`: coupling must be ±1")))?;
        let coupling = Coupling::new(value).map_err(|_| LineError::new(line, "coupling must be ±1"))?;
        let key = (a.min(b), a.max(b));
        if let Some(first) = seen.insert(key, line) {
            return Err(LineError::new(line, format!("duplicate edge ({}, {}), first on line {first}", key.0, key.1)));
        }
        for v in [a, b] {
            degree[v].0 += 1;
            degree[v].1 = line;
            if degree[v].0 > 3 {
                return Err(LineError::new(line, format!("vertex {v} has degree {}", degree[v].0)));
            }
        }
        edges.push(Edge::new(a, b, coupling, *class));
    }
    let Some((n, header)) = n else {
        return Err(LineError::new(text.lines().count().max(1), "missing header `n <N>`"));
    };
    if let Some((v, &(d, line))) = degree.iter().enumerate().find(|(_, d)| d.0 != 3) {
        return Err(LineError::new(line, format!("vertex {v} has degree {d}")));
    }
    FullereneGraph::new(n, edges).map_err(|e| LineError::new(header, e.to_string()))
}

/// Canonical text, with optional leading comment lines.
pub fn write_edge_list(g: &FullereneGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&g.to_edge_list());
    out
}
