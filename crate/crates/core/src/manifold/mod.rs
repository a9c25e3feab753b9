//! Classical ground energy and exact ground-state enumeration.
//!
//! Energies are exact integers in units of `|J|`. Graphs with at most
//! [`EXHAUSTIVE_LIMIT`] vertices are scanned exhaustively; larger ones (up
//! to 64 vertices) go through depth-first branch-and-bound.

pub mod branch_bound;
pub mod exhaustive;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spin::SpinConfig;
use crate::topology::FullereneGraph;

/// Largest vertex count handled by the exhaustive scan.
pub const EXHAUSTIVE_LIMIT: usize = 26;
/// Largest vertex count a packed [`SpinConfig`] can hold.
pub const MAX_VERTICES: usize = 64;

/// `Σ_(ij) J_ij s_i s_j`.
pub fn classical_energy(g: &FullereneGraph, c: SpinConfig) -> Result<i32> {
    g.check_config(c)?;
    Ok(energy_of(g, c.bits()))
}

#[inline]
pub(crate) fn energy_of(g: &FullereneGraph, bits: u64) -> i32 {
    g.edges()
        .iter()
        .map(|e| {
            let aligned = ((bits >> e.u) ^ (bits >> e.v)) & 1 == 0;
            if aligned {
                e.coupling.value()
            } else {
                -e.coupling.value()
            }
        })
        .sum()
}

/// Every minimum-energy configuration of one graph, sorted ascending by bit
/// pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundStateManifold {
    graph_digest: [u8; 32],
    e0: i32,
    states: Vec<SpinConfig>,
}

impl GroundStateManifold {
    /// Assembles a manifold from stored parts, checking order and uniqueness.
    /// Energies are checked separately by
    /// [`GroundStateManifold::first_energy_violation`].
    pub fn from_parts(graph_digest: [u8; 32], e0: i32, states: Vec<SpinConfig>) -> Result<Self> {
        if let Some(w) = states.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(alloc::format!(
                "manifold states not strictly increasing at index {}",
                w + 1
            )));
        }
        Ok(GroundStateManifold { graph_digest, e0, states })
    }

    pub fn graph_digest(&self) -> &[u8; 32] {
        &self.graph_digest
    }

    pub fn e0(&self) -> i32 {
        self.e0
    }

    pub fn states(&self) -> &[SpinConfig] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    #[inline]
    pub fn index_of(&self, c: SpinConfig) -> Option<usize> {
        self.states.binary_search(&c).ok()
    }

    pub fn contains(&self, c: SpinConfig) -> bool {
        self.index_of(c).is_some()
    }

    pub fn matches(&self, g: &FullereneGraph) -> bool {
        self.graph_digest == g.digest()
    }

    /// Index of the first state whose energy on `g` differs from `e0`.
    pub fn first_energy_violation(&self, g: &FullereneGraph) -> Option<usize> {
        self.states
            .iter()
            .position(|c| !c.fits(g.n_vertices()) || energy_of(g, c.bits()) != self.e0)
    }

    pub fn is_inversion_closed(&self, n: usize) -> bool {
        self.states.iter().all(|c| self.contains(c.inverted(n)))
    }
}

/// Exact and complete ground-state manifold of `g`.
pub fn enumerate_ground_states(g: &FullereneGraph) -> Result<GroundStateManifold> {
    let n = g.n_vertices();
    if n > MAX_VERTICES {
        return Err(Error::UnsupportedSize { what: "vertex count", n, max: MAX_VERTICES });
    }
    let (e0, states) = if n <= EXHAUSTIVE_LIMIT {
        exhaustive::scan(g)?
    } else {
        branch_bound::search(g)?
    };
    Ok(GroundStateManifold { graph_digest: g.digest(), e0, states })
}
