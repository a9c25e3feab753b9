//! Gray-code scan over all `2^N` configurations.
//!
//! The index range is cut into fixed blocks of `2^16` Gray-code steps; each
//! block tracks its own minimum and the blocks are merged in block order, so
//! the result does not depend on how many workers ran them.

use alloc::vec::Vec;

use super::{energy_of, EXHAUSTIVE_LIMIT};
use crate::error::{Error, Result};
use crate::par;
use crate::spin::SpinConfig;
use crate::topology::FullereneGraph;

const BLOCK_BITS: usize = 16;

struct Block {
    min: i32,
    states: Vec<u64>,
}

/// Ground energy and sorted ground states by exhaustive enumeration.
pub fn scan(g: &FullereneGraph) -> Result<(i32, Vec<SpinConfig>)> {
    let n = g.n_vertices();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::UnsupportedSize { what: "exhaustive scan size", n, max: EXHAUSTIVE_LIMIT });
    }
    let neighbors: Vec<[(usize, i32); 3]> = (0..n)
        .map(|v| g.incident(v).map(|i| (i.neighbor, i.coupling.value())))
        .collect();
    let block_bits = BLOCK_BITS.min(n);
    let n_blocks = 1usize << (n - block_bits);

    let blocks = par::map_indices(n_blocks, |b| scan_block(g, &neighbors, b, block_bits));
    let e0 = blocks.iter().map(|b| b.min).min().expect("at least one block");
    let mut states: Vec<SpinConfig> = blocks
        .into_iter()
        .filter(|b| b.min == e0)
        .flat_map(|b| b.states)
        .map(SpinConfig)
        .collect();
    states.sort_unstable();
    Ok((e0, states))
}

fn scan_block(g: &FullereneGraph, neighbors: &[[(usize, i32); 3]], block: usize, bits: usize) -> Block {
    let start = (block as u64) << bits;
    let end = start + (1u64 << bits);
    let mut x = start ^ (start >> 1);
    let mut energy = energy_of(g, x);
    let mut out = Block { min: i32::MAX, states: Vec::new() };
    let mut k = start;
    loop {
        if energy < out.min {
            out.min = energy;
            out.states.clear();
        }
        if energy == out.min {
            out.states.push(x);
        }
        k += 1;
        if k == end {
            break;
        }
        let v = k.trailing_zeros() as usize;
        let field: i32 = neighbors[v]
            .iter()
            .map(|&(u, j)| j * spin(x, u))
            .sum();
        energy -= 2 * spin(x, v) * field;
        x ^= 1 << v;
    }
    out
}

#[inline]
fn spin(x: u64, i: usize) -> i32 {
    (((x >> i) & 1) as i32) * 2 - 1
}

/// Classical energy of every basis state `0..2^N`, indexed by bit pattern.
pub fn energy_table(g: &FullereneGraph) -> Result<Vec<i8>> {
    let n = g.n_vertices();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::UnsupportedSize { what: "basis size (qubits)", n, max: EXHAUSTIVE_LIMIT });
    }
    let mut table = alloc::vec![0i8; 1usize << n];
    let chunk = 1usize << BLOCK_BITS.min(n);
    par::for_each_chunk_mut(&mut table, chunk, |c, out| {
        let base = (c * chunk) as u64;
        // Within a chunk only the low bits vary: update along Gray order
        // relative to `base`, writing energies at their natural index.
        let mut x = base;
        let mut energy = energy_of(g, x);
        out[0] = energy as i8;
        for k in 1..out.len() {
            let v = k.trailing_zeros() as usize;
            let field: i32 = g.incident(v).iter().map(|i| i.coupling.value() * spin(x, i.neighbor)).sum();
            energy -= 2 * spin(x, v) * field;
            x ^= 1 << v;
            let offset = (k ^ (k >> 1)) as u64;
            debug_assert_eq!(x, base | offset);
            out[offset as usize] = energy as i8;
        }
    });
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::BuiltinGraph;

    #[test]
    fn dodecahedron_scan() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let (e0, states) = scan(&g).unwrap();
        assert_eq!(e0, -18);
        assert_eq!(states.len(), 250);
        assert!(states.iter().all(|c| energy_of(&g, c.bits()) == e0));
    }

    #[test]
    fn energy_table_matches_direct_evaluation() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let table = energy_table(&g).unwrap();
        for x in (0..1u64 << 20).step_by(997) {
            assert_eq!(table[x as usize] as i32, energy_of(&g, x), "x = {x:#x}");
        }
    }
}
