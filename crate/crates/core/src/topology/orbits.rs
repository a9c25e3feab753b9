use alloc::vec;
use alloc::vec::Vec;

use super::{AutomorphismGroup, Permutation};
use crate::error::{Error, Result};
use crate::par;
use crate::spin::{mask, SpinConfig};

/// Orbits of a set of spin configurations under an automorphism group,
/// optionally composed with global spin inversion.
///
/// Orbit labels are numbered by ascending representative, where the
/// representative is the numerically smallest bit pattern in the full orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    sizes: Vec<usize>,
    representatives: Vec<SpinConfig>,
    include_global_flip: bool,
}

impl OrbitPartition {
    /// Orbit label of the `i`-th input configuration.
    #[inline]
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.orbit_of
    }

    /// Number of input configurations carrying each label.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn representatives(&self) -> &[SpinConfig] {
        &self.representatives
    }

    pub fn n_orbits(&self) -> usize {
        self.sizes.len()
    }

    /// Number of configurations partitioned.
    pub fn len(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbit_of.is_empty()
    }

    pub fn includes_global_flip(&self) -> bool {
        self.include_global_flip
    }

    /// Sums `values` (indexed like the partitioned configurations) per orbit.
    pub fn bin(&self, values: &[f64]) -> Vec<f64> {
        let mut bins = vec![0.0; self.sizes.len()];
        for (i, &x) in values.iter().enumerate() {
            bins[self.orbit_of[i] as usize] += x;
        }
        bins
    }
}

/// Byte-sliced lookup tables applying one vertex permutation to a packed
/// configuration: spin `i` moves to position `p(i)`.
struct PermutedBits {
    tables: Vec<[u64; 256]>,
}

impl PermutedBits {
    fn new(p: &Permutation) -> Self {
        let n = p.len();
        let tables = (0..n.div_ceil(8))
            .map(|chunk| {
                let mut t = [0u64; 256];
                for (byte, slot) in t.iter_mut().enumerate() {
                    for bit in 0..8 {
                        let i = chunk * 8 + bit;
                        if i < n && (byte >> bit) & 1 == 1 {
                            *slot |= 1 << p.apply(i);
                        }
                    }
                }
                t
            })
            .collect();
        PermutedBits { tables }
    }

    #[inline]
    fn apply(&self, x: u64) -> u64 {
        self.tables
            .iter()
            .enumerate()
            .fold(0, |acc, (c, t)| acc | t[((x >> (8 * c)) & 0xff) as usize])
    }
}

/// Smallest image of `c` under the group (and inversion, if requested).
fn canonical(tables: &[PermutedBits], c: u64, full: u64, flip: bool) -> u64 {
    tables.iter().fold(u64::MAX, |best, t| {
        let image = t.apply(c);
        let best = best.min(image);
        if flip {
            best.min(!image & full)
        } else {
            best
        }
    })
}

/// Partitions `configs` into orbits. Every input is assigned exactly one
/// label; configurations need not be closed under the group.
pub fn orbit_partition(
    group: &AutomorphismGroup,
    configs: &[SpinConfig],
    include_global_flip: bool,
) -> Result<OrbitPartition> {
    let n = group.degree();
    if n > 64 {
        return Err(Error::UnsupportedSize { what: "vertex count", n, max: 64 });
    }
    if let Some(bad) = configs.iter().find(|c| !c.fits(n)) {
        return Err(Error::ConfigMismatch { config: bad.bits(), n });
    }
    let tables: Vec<PermutedBits> = group.elements().iter().map(PermutedBits::new).collect();
    let full = mask(n);

    let canon: Vec<u64> = par::map_chunks(configs, 1 << 12, |_, chunk| {
        chunk
            .iter()
            .map(|c| canonical(&tables, c.bits(), full, include_global_flip))
            .collect::<Vec<u64>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let mut reps = canon.clone();
    reps.sort_unstable();
    reps.dedup();
    let mut sizes = vec![0usize; reps.len()];
    let orbit_of = canon
        .iter()
        .map(|c| {
            let label = reps.binary_search(c).expect("representative present");
            sizes[label] += 1;
            label as u32
        })
        .collect();
    Ok(OrbitPartition {
        orbit_of,
        sizes,
        representatives: reps.into_iter().map(SpinConfig).collect(),
        include_global_flip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{automorphisms, BuiltinGraph};

    #[test]
    fn all_up_is_a_fixed_point() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let group = automorphisms(&g);
        let up = SpinConfig::all_up(20);
        let part = orbit_partition(&group, &[up], false).unwrap();
        assert_eq!(part.sizes(), &[1]);
        assert_eq!(part.representatives(), &[up]);
    }

    #[test]
    fn flip_joins_config_and_its_inverse() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let group = automorphisms(&g);
        let c = SpinConfig(0b1011_0010_0110_1001_0011);
        let part = orbit_partition(&group, &[c, c.inverted(20)], true).unwrap();
        assert_eq!(part.orbit_of(0), part.orbit_of(1));
        let part = orbit_partition(&group, &[c, c.inverted(20)], false).unwrap();
        assert_ne!(part.orbit_of(0), part.orbit_of(1));
    }

    #[test]
    fn rejects_oversized_config() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let group = automorphisms(&g);
        let err = orbit_partition(&group, &[SpinConfig(1 << 20)], true).unwrap_err();
        assert!(matches!(err, Error::ConfigMismatch { n: 20, .. }));
    }

    #[test]
    fn permuted_bits_match_naive_action() {
        let p = Permutation::from_images(vec![3, 0, 9, 1, 2, 8, 4, 7, 5, 6]).unwrap();
        let t = PermutedBits::new(&p);
        for x in [0u64, 1, 0b10_1100_1011, 0x3ff, 0x155] {
            let mut naive = 0;
            for i in 0..10 {
                if (x >> i) & 1 == 1 {
                    naive |= 1 << p.apply(i);
                }
            }
            assert_eq!(t.apply(x), naive);
        }
    }
}
