//! Ground-state manifold cache:
//!
//! ```text
//! fullersim-manifold v1
//! <graph digest, 64 hex digits>
//! <e0>
//! <count>
//! <state bits, lowercase hex>   (count lines, ascending)
//! ```
//!
//! Lines starting with `#` after the header are ignored.

use std::fmt::Write as _;

use fullersim_core::manifold::GroundStateManifold;
use fullersim_core::topology::FullereneGraph;
use fullersim_core::SpinConfig;

pub const HEADER: &str = "fullersim-manifold v1";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CacheError {
    #[error("graph digest {found} does not match {expected}")]
    Stale { found: String, expected: String },
    #[error("{0}")]
    Corrupt(String),
}

pub fn write_manifold(m: &GroundStateManifold, comments: &[String]) -> String {
    let mut out = String::with_capacity(32 * m.len() + 128);
    out.push_str(HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{}\n{}\n{}", hex::encode(m.graph_digest()), m.e0(), m.len());
    for s in m.states() {
        let _ = writeln!(out, "{s:x}");
    }
    out
}

/// Parses a cache written for `g`, checking the digest, the state count and
/// the energy of every state.
pub fn read_manifold(text: &str, g: &FullereneGraph) -> Result<GroundStateManifold, CacheError> {
    let corrupt = |m: String| CacheError::Corrupt(m);
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(corrupt(format!("missing header `{HEADER}`"))),
    }
    let mut body = lines.filter(|(_, l)| !l.starts_with('#'));
    let mut field = |what: &str| body.next().ok_or_else(|| corrupt(format!("truncated before {what}")));

    let (line, digest_hex) = field("graph digest")?;
    let digest: [u8; 32] = hex::decode(digest_hex.trim())
        .ok()
        .and_then(|d| d.try_into().ok())
        .ok_or_else(|| corrupt(format!("line {line}: bad graph digest")))?;
    let expected = g.digest();
    if digest != expected {
        return Err(CacheError::Stale { found: hex::encode(digest), expected: hex::encode(expected) });
    }
    let (line, e0) = field("ground energy")?;
    let e0: i32 = e0.trim().parse().map_err(|_| corrupt(format!("line {line}: bad ground energy")))?;
    let (line, count) = field("state count")?;
    let count: usize = count.trim().parse().map_err(|_| corrupt(format!("line {line}: bad state count")))?;

    let mut states = Vec::with_capacity(count.min(1 << 24));
    for (line, l) in body {
        let bits = u64::from_str_radix(l.trim(), 16).map_err(|_| corrupt(format!("line {line}: bad state `{l}`")))?;
        states.push(SpinConfig(bits));
    }
    if states.len() != count {
        return Err(corrupt(format!("expected {count} states, found {} (truncated?)", states.len())));
    }
    let m = GroundStateManifold::from_parts(digest, e0, states).map_err(|e| corrupt(e.to_string()))?;
    if let Some(i) = m.first_energy_violation(g) {
        return Err(corrupt(format!("state {:#x} does not have energy {e0}", m.states()[i].bits())));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fullersim_core::manifold::enumerate_ground_states;
    use fullersim_core::topology::BuiltinGraph;

    #[test]
    fn round_trip_and_failures() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let m = enumerate_ground_states(&g).unwrap();
        let text = write_manifold(&m, &["config abc".into()]);
        assert_eq!(read_manifold(&text, &g).unwrap(), m);

        let other = BuiltinGraph::C24Afm.build();
        assert!(matches!(read_manifold(&text, &other), Err(CacheError::Stale { .. })));

        let cut: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_manifold(&cut, &g), Err(CacheError::Corrupt(m)) if m.contains("truncated")));

        // Replace the first state with an excited configuration.
        let first = format!("\n{:x}\n", m.states()[0].bits());
        let bad = text.replacen(&first, "\n0\n", 1);
        assert!(matches!(read_manifold(&bad, &g), Err(CacheError::Corrupt(_))));
    }
}
