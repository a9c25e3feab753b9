//! Depth-first branch-and-bound over spins in breadth-first vertex order.
//!
//! Spin 0 is fixed to `+1`; inverted partners are restored at output. A
//! branch is cut when its partial energy plus a lower bound on everything
//! not yet decided exceeds the limit. The bound for the undecided tail at
//! depth `k` is `min_energy(tail subgraph) - (edges crossing into the tail)`,
//! with the tail minima computed first, shortest tail to longest, by the
//! same search. The first pass finds `e0`, the second collects every
//! configuration at `e0`.

use alloc::vec;
use alloc::vec::Vec;

use super::MAX_VERTICES;
use crate::error::{Error, Result};
use crate::par;
use crate::spin::{mask, SpinConfig};
use crate::topology::FullereneGraph;

/// Depth at which the collection pass fans subtrees out to workers.
const SPLIT_DEPTH: usize = 14;

struct Layout {
    n: usize,
    /// Vertex placed at each depth.
    order: Vec<usize>,
    /// Couplings from depth `k` back to earlier depths: `(depth, J)`.
    back: Vec<Vec<(usize, i32)>>,
}

impl Layout {
    fn new(g: &FullereneGraph) -> Self {
        let order = g.bfs_order();
        let n = order.len();
        let mut depth = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            depth[v] = k;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut b: Vec<(usize, i32)> = g
                    .incident(v)
                    .iter()
                    .filter(|i| depth[i.neighbor] < k)
                    .map(|i| (depth[i.neighbor], i.coupling.value()))
                    .collect();
                b.sort_unstable();
                b
            })
            .collect();
        Layout { n, order, back }
    }

    /// Edges with one end in `[start, k)` and the other in `[k, n)`.
    fn crossing(&self, start: usize, k: usize) -> i32 {
        (k..self.n)
            .map(|t| self.back[t].iter().filter(|(d, _)| *d >= start && *d < k).count() as i32)
            .sum()
    }

    /// Edges inside `[start, n)`.
    fn internal(&self, start: usize) -> i32 {
        (start..self.n)
            .map(|t| self.back[t].iter().filter(|(d, _)| *d >= start).count() as i32)
            .sum()
    }
}

/// Search over the tail `[start, n)` with a fixed energy limit.
struct Dfs<'a> {
    layout: &'a Layout,
    start: usize,
    /// Lower bound on the energy of edges touching `[k, n)` (within the
    /// tail), indexed by `k`.
    rest: &'a [i32],
    limit: i32,
    spins: Vec<i32>,
    bits: u64,
    collect: bool,
    found: Vec<u64>,
}

impl Dfs<'_> {
    fn delta(&self, k: usize, s: i32) -> i32 {
        self.layout.back[k]
            .iter()
            .filter(|(d, _)| *d >= self.start)
            .map(|&(d, j)| j * s * self.spins[d])
            .sum()
    }

    /// Returns true once a leaf is found in find-one mode.
    fn descend(&mut self, k: usize, energy: i32) -> bool {
        if k == self.layout.n {
            if self.collect {
                self.found.push(self.bits);
                return false;
            }
            return true;
        }
        let up = self.delta(k, 1);
        // Lower partial energy first.
        let choices = if up <= -up { [1, -1] } else { [-1, 1] };
        let fixed = k == self.start;
        for s in choices {
            if fixed && s != 1 {
                continue;
            }
            let e = energy + s * up;
            if e + self.rest[k + 1] > self.limit {
                continue;
            }
            self.spins[k] = s;
            let bit = 1u64 << self.layout.order[k];
            if s == 1 {
                self.bits |= bit;
            }
            let done = self.descend(k + 1, e);
            self.bits &= !bit;
            if done {
                return true;
            }
        }
        false
    }
}

fn rest_bounds(layout: &Layout, start: usize, tail_min: &[i32]) -> Vec<i32> {
    (0..=layout.n)
        .map(|k| {
            if k <= start {
                i32::MIN / 4
            } else {
                tail_min[k] - layout.crossing(start, k)
            }
        })
        .collect()
}

/// Minimum energy of every tail subgraph `[k, n)`, `k = n` down to `0`.
fn tail_minima(layout: &Layout) -> Vec<i32> {
    let n = layout.n;
    let mut tail_min = vec![0i32; n + 1];
    for start in (0..n).rev() {
        let rest = rest_bounds(layout, start, &tail_min);
        let edges = layout.internal(start);
        let added = edges - layout.internal(start + 1);
        let mut limit = tail_min[start + 1] - added;
        // Energies on the tail share the parity of its edge count.
        if (limit - edges).rem_euclid(2) != 0 {
            limit += 1;
        }
        loop {
            let mut dfs = Dfs {
                layout,
                start,
                rest: &rest,
                limit,
                spins: vec![0; n],
                bits: 0,
                collect: false,
                found: Vec::new(),
            };
            if dfs.descend(start, 0) {
                break;
            }
            limit += 2;
        }
        tail_min[start] = limit;
    }
    tail_min
}

/// Ground energy of `g` by branch-and-bound.
pub fn ground_energy(g: &FullereneGraph) -> Result<i32> {
    check_size(g)?;
    Ok(tail_minima(&Layout::new(g))[0])
}

/// Ground energy and all ground states (sorted) by branch-and-bound.
pub fn search(g: &FullereneGraph) -> Result<(i32, Vec<SpinConfig>)> {
    check_size(g)?;
    let layout = Layout::new(g);
    let n = layout.n;
    let tail_min = tail_minima(&layout);
    let e0 = tail_min[0];
    let rest = rest_bounds(&layout, 0, &tail_min);

    // Enumerate surviving prefixes down to the split depth, then finish each
    // subtree independently; results concatenate in prefix order.
    let split = SPLIT_DEPTH.min(n);
    let prefixes = {
        let mut dfs = Dfs {
            layout: &layout,
            start: 0,
            rest: &rest,
            limit: e0,
            spins: vec![0; n],
            bits: 0,
            collect: true,
            found: Vec::new(),
        };
        let mut out = Vec::new();
        collect_prefixes(&mut dfs, 0, 0, split, &mut out);
        out
    };
    let parts = par::map_indices(prefixes.len(), |i| {
        let (bits, energy, ref spins) = prefixes[i];
        let mut dfs = Dfs {
            layout: &layout,
            start: 0,
            rest: &rest,
            limit: e0,
            spins: spins.clone(),
            bits,
            collect: true,
            found: Vec::new(),
        };
        dfs.descend(split, energy);
        dfs.found
    });

    let full = mask(n);
    let mut states: Vec<SpinConfig> = parts
        .into_iter()
        .flatten()
        .flat_map(|b| [SpinConfig(b), SpinConfig(!b & full)])
        .collect();
    states.sort_unstable();
    Ok((e0, states))
}

fn collect_prefixes(
    dfs: &mut Dfs<'_>,
    k: usize,
    energy: i32,
    split: usize,
    out: &mut Vec<(u64, i32, Vec<i32>)>,
) {
    if k == split {
        out.push((dfs.bits, energy, dfs.spins.clone()));
        return;
    }
    let up = dfs.delta(k, 1);
    for s in [1, -1] {
        if k == 0 && s != 1 {
            continue;
        }
        let e = energy + s * up;
        if e + dfs.rest[k + 1] > dfs.limit {
            continue;
        }
        dfs.spins[k] = s;
        let bit = 1u64 << dfs.layout.order[k];
        if s == 1 {
            dfs.bits |= bit;
        }
        collect_prefixes(dfs, k + 1, e, split, out);
        dfs.bits &= !bit;
    }
}

fn check_size(g: &FullereneGraph) -> Result<()> {
    let n = g.n_vertices();
    if n > MAX_VERTICES {
        return Err(Error::UnsupportedSize { what: "vertex count", n, max: MAX_VERTICES });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::exhaustive;
    use crate::topology::BuiltinGraph;

    #[test]
    fn agrees_with_exhaustive_scan_on_dodecahedron() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        assert_eq!(search(&g).unwrap(), exhaustive::scan(&g).unwrap());
    }

    #[test]
    fn tail_minimum_of_single_vertex_is_zero() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let layout = Layout::new(&g);
        let tails = tail_minima(&layout);
        assert_eq!(tails[20], 0);
        assert_eq!(tails[19], 0);
        assert!(tails.windows(2).all(|w| w[0] <= w[1]));
    }
}
