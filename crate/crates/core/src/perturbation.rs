//! Floppy dimers, the tunneling matrix over a ground-state manifold, and the
//! perturbative ground state it selects.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::GroundStateManifold;
use crate::par;
use crate::spin::SpinConfig;
use crate::topology::FullereneGraph;

/// Per-edge test for the floppy-dimer condition. For edge `(i, j)` with
/// other neighbours `i', i''` of `i` and `j', j''` of `j`, the dimer is
/// floppy iff `J_ii' J_ii'' s_i' s_i'' = -1` and likewise on the `j` side.
#[derive(Clone, Debug)]
pub struct DimerStencil {
    /// `(a, b, want_equal)` per side: the side condition holds iff the spins
    /// at `a` and `b` are equal exactly when `want_equal`.
    sides: Vec<[(u8, u8, bool); 2]>,
    ends: Vec<(u8, u8)>,
}

impl DimerStencil {
    pub fn new(g: &FullereneGraph) -> Self {
        let side = |v: usize, partner: usize| {
            let others: Vec<_> = g.incident(v).iter().filter(|i| i.neighbor != partner).collect();
            let sign = others[0].coupling.value() * others[1].coupling.value();
            // sign * s_a * s_b = -1  <=>  s_a == s_b exactly when sign < 0.
            (others[0].neighbor as u8, others[1].neighbor as u8, sign < 0)
        };
        let sides = g.edges().iter().map(|e| [side(e.u, e.v), side(e.v, e.u)]).collect();
        let ends = g.edges().iter().map(|e| (e.u as u8, e.v as u8)).collect();
        DimerStencil { sides, ends }
    }

    #[inline]
    pub fn is_floppy(&self, edge: usize, bits: u64) -> bool {
        self.sides[edge].iter().all(|&(a, b, want_equal)| {
            let equal = ((bits >> a) ^ (bits >> b)) & 1 == 0;
            equal == want_equal
        })
    }

    #[inline]
    pub fn count(&self, bits: u64) -> u32 {
        (0..self.sides.len()).filter(|&e| self.is_floppy(e, bits)).count() as u32
    }

    #[inline]
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        let (u, v) = self.ends[edge];
        (u as usize, v as usize)
    }

    pub fn n_edges(&self) -> usize {
        self.sides.len()
    }
}

/// Edge indices of the floppy dimers of `c`.
pub fn floppy_dimers(g: &FullereneGraph, c: SpinConfig) -> Result<Vec<usize>> {
    g.check_config(c)?;
    let stencil = DimerStencil::new(g);
    Ok((0..g.n_edges()).filter(|&e| stencil.is_floppy(e, c.bits())).collect())
}

/// Symmetric 0/-1 matrix over manifold states in CSR form; every stored
/// entry has value `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TunnelingMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
}

impl TunnelingMatrix {
    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| {
            self.row(i)
                .iter()
                .all(|&j| j as usize != i && self.row(j as usize).binary_search(&(i as u32)).is_ok())
        })
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = -self.row(i).iter().map(|&j| x[j as usize]).sum::<f64>();
        }
    }

    /// Connected components, labelled in order of their smallest row.
    pub fn components(&self) -> Components {
        let n = self.dim();
        let mut label = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            label[root] = id;
            stack.push(root);
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in self.row(v) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = id;
                        stack.push(w as usize);
                    }
                }
            }
            sizes.push(size);
        }
        Components { label, sizes }
    }

    /// Restriction to the given rows (sorted ascending), reindexed.
    fn restrict(&self, members: &[usize]) -> TunnelingMatrix {
        let mut row_ptr = Vec::with_capacity(members.len() + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for &i in members {
            for &j in self.row(i) {
                let local = members.binary_search(&(j as usize)).expect("component is closed");
                cols.push(local as u32);
            }
            row_ptr.push(cols.len());
        }
        TunnelingMatrix { row_ptr, cols }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<u32>,
    pub sizes: Vec<usize>,
}

/// Builds the dimer-flip adjacency over `m`: for each state and each of its
/// floppy dimers, the flipped partner is located by binary search.
pub fn build_tunneling_matrix(m: &GroundStateManifold, g: &FullereneGraph) -> Result<TunnelingMatrix> {
    let stencil = DimerStencil::new(g);
    let states = m.states();
    let rows: Vec<Result<Vec<Vec<u32>>>> = par::map_chunks(states, 1 << 12, |_, chunk| {
        chunk
            .iter()
            .map(|c| {
                let mut row: Vec<u32> = (0..stencil.n_edges())
                    .filter(|&e| stencil.is_floppy(e, c.bits()))
                    .map(|e| {
                        let (u, v) = stencil.endpoints(e);
                        m.index_of(c.flip_pair(u, v))
                            .map(|j| j as u32)
                            .ok_or(Error::ManifoldIncomplete { state: c.bits() })
                    })
                    .collect::<Result<_>>()?;
                row.sort_unstable();
                Ok(row)
            })
            .collect()
    });
    let mut row_ptr = Vec::with_capacity(states.len() + 1);
    let mut cols = Vec::new();
    row_ptr.push(0);
    for chunk in rows {
        for row in chunk? {
            cols.extend_from_slice(&row);
            row_ptr.push(cols.len());
        }
    }
    Ok(TunnelingMatrix { row_ptr, cols })
}

/// Lowest eigenvalue found on each tunneling component.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentReport {
    pub sizes: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// Component carrying the selected eigenvector.
    pub selected: usize,
}

impl ComponentReport {
    pub fn isolated(&self) -> usize {
        self.sizes.iter().filter(|&&s| s == 1).count()
    }
}

/// Probability per manifold state.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbativeState {
    pub q: Vec<f64>,
    /// Eigenvalue of the tunneling matrix for this state (`0` for the
    /// uniform superposition, which is not an eigenvector in general).
    pub eigenvalue: f64,
    pub residual: f64,
    pub report: Option<ComponentReport>,
}

impl PerturbativeState {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// Convergence target on `‖T v − λ v‖`.
pub const EIGEN_TOLERANCE: f64 = 1e-10;
/// Two components whose lowest eigenvalues are closer than this tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Ground state of the tunneling matrix: per component the lowest
/// eigenpair (the Perron vector of `-T`, entrywise positive); the component
/// with the lowest eigenvalue carries `q`, zero elsewhere.
pub fn perturbative_ground_state(t: &TunnelingMatrix) -> Result<PerturbativeState> {
    let n = t.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty tunneling matrix".into()));
    }
    let comps = t.components();
    let mut members: Vec<Vec<usize>> = comps.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (i, &c) in comps.label.iter().enumerate() {
        members[c as usize].push(i);
    }

    let mut eigenvalues = Vec::with_capacity(members.len());
    let mut best: Option<(usize, linalg::EigenPair)> = None;
    for (c, rows) in members.iter().enumerate() {
        let pair = if rows.len() == 1 {
            linalg::EigenPair { value: 0.0, vector: vec![1.0], residual: 0.0 }
        } else {
            let local = t.restrict(rows);
            linalg::lowest_eigenpair(
                rows.len(),
                |x, y| local.apply(x, y),
                vec![1.0; rows.len()],
                EIGEN_TOLERANCE,
            )?
        };
        eigenvalues.push(pair.value);
        if best.as_ref().map_or(true, |(_, b)| pair.value < b.value) {
            best = Some((c, pair));
        }
    }
    let (selected, pair) = best.expect("at least one component");

    if let Some((other, _)) = eigenvalues
        .iter()
        .enumerate()
        .find(|&(c, &v)| c != selected && libm::fabs(v - pair.value) <= TIE_TOLERANCE)
    {
        return Err(Error::DegenerateGroundState {
            first: selected.min(other),
            second: selected.max(other),
            eigenvalue: pair.value,
        });
    }

    let mut q = vec![0.0; n];
    let norm2: f64 = pair.vector.iter().map(|v| v * v).sum();
    for (&i, v) in members[selected].iter().zip(&pair.vector) {
        q[i] = v * v / norm2;
    }
    Ok(PerturbativeState {
        q,
        eigenvalue: pair.value,
        residual: pair.residual,
        report: Some(ComponentReport { sizes: comps.sizes, eigenvalues, selected }),
    })
}

/// Uniform superposition over the manifold.
pub fn uniform_ground_state(m: &GroundStateManifold) -> PerturbativeState {
    let n = m.len().max(1);
    PerturbativeState {
        q: vec![1.0 / n as f64; m.len()],
        eigenvalue: 0.0,
        residual: 0.0,
        report: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::enumerate_ground_states;
    use crate::topology::BuiltinGraph;

    #[test]
    fn uniform_state_has_no_floppy_dimers() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        assert!(floppy_dimers(&g, SpinConfig::all_up(20)).unwrap().is_empty());
    }

    #[test]
    fn two_state_toy_manifold() {
        let t = TunnelingMatrix { row_ptr: vec![0, 1, 2], cols: vec![1, 0] };
        let psi = perturbative_ground_state(&t).unwrap();
        assert!((psi.eigenvalue + 1.0).abs() < 1e-12);
        assert!((psi.q[0] - 0.5).abs() < 1e-12 && (psi.q[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tied_components_are_reported() {
        // Two disjoint edges: both components have eigenvalue -1.
        let t = TunnelingMatrix { row_ptr: vec![0, 1, 2, 3, 4], cols: vec![1, 0, 3, 2] };
        assert!(matches!(
            perturbative_ground_state(&t),
            Err(Error::DegenerateGroundState { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn dodecahedron_matrix_shape() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let m = enumerate_ground_states(&g).unwrap();
        let t = build_tunneling_matrix(&m, &g).unwrap();
        assert_eq!(t.dim(), 250);
        assert!(t.is_symmetric());
        let stencil = DimerStencil::new(&g);
        for (i, c) in m.states().iter().enumerate() {
            assert_eq!(t.degree(i), stencil.count(c.bits()) as usize);
        }
    }

    #[test]
    fn incomplete_manifold_is_detected() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let full = enumerate_ground_states(&g).unwrap();
        let t = build_tunneling_matrix(&full, &g).unwrap();
        let hub = (0..t.dim()).max_by_key(|&i| t.degree(i)).unwrap();
        let states: Vec<SpinConfig> = full
            .states()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t.row(hub)[0] as usize)
            .map(|(_, c)| *c)
            .collect();
        let partial = GroundStateManifold::from_parts(*full.graph_digest(), full.e0(), states).unwrap();
        assert!(matches!(
            build_tunneling_matrix(&partial, &g),
            Err(Error::ManifoldIncomplete { .. })
        ));
    }

    #[test]
    fn uniform_single_state() {
        let m = GroundStateManifold::from_parts([0; 32], -3, vec![SpinConfig(5)]).unwrap();
        assert_eq!(uniform_ground_state(&m).q, vec![1.0]);
    }
}
