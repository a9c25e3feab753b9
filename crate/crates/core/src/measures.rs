//! Observables of basis-state distributions: residual energy density, mean
//! floppy-dimer count, Bhattacharyya and orbit-binned fidelities, seeded
//! sampling and finite-sample fidelity floors.
//!
//! Dense distributions are indexed by basis-state bit pattern (length
//! `2^N`). Manifold distributions are indexed like the states of a
//! [`GroundStateManifold`].

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifold::exhaustive::energy_table;
use crate::manifold::GroundStateManifold;
use crate::par;
use crate::perturbation::DimerStencil;
use crate::spin::SpinConfig;
use crate::topology::{FullereneGraph, OrbitPartition};

/// Tolerance on `Σ p = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

fn total(p: &[f64]) -> f64 {
    par::chunked_sum(p, |_, c| c.iter().sum())
}

fn check_normalized(p: &[f64]) -> Result<()> {
    let t = total(p);
    if libm::fabs(t - 1.0) > NORM_TOLERANCE {
        return Err(Error::NotNormalized { total: t });
    }
    Ok(())
}

/// Total mass may fall short of one (a restriction), but not exceed it.
fn check_sub_normalized(p: &[f64]) -> Result<()> {
    let t = total(p);
    if !(t <= 1.0 + NORM_TOLERANCE) || p.iter().any(|&x| x < 0.0) {
        return Err(Error::NotNormalized { total: t });
    }
    Ok(())
}

fn check_len(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::InvalidArgument(alloc::format!(
            "distribution has {} entries, expected {len}",
            p.len()
        )));
    }
    Ok(())
}

/// Classical energy and floppy-dimer count of every basis state of one
/// graph, for repeated evaluation of diagonal observables.
#[derive(Clone, Debug)]
pub struct BasisObservables {
    n: usize,
    energies: Vec<i8>,
    dimers: Vec<u8>,
}

impl BasisObservables {
    pub fn new(g: &FullereneGraph) -> Result<Self> {
        let energies = energy_table(g)?;
        let stencil = DimerStencil::new(g);
        let dimers = par::map_indices(energies.len().div_ceil(par::SUM_CHUNK), |c| {
            let lo = c * par::SUM_CHUNK;
            let hi = (lo + par::SUM_CHUNK).min(energies.len());
            (lo..hi).map(|x| stencil.count(x as u64) as u8).collect::<Vec<u8>>()
        })
        .into_iter()
        .flatten()
        .collect();
        Ok(BasisObservables { n: g.n_vertices(), energies, dimers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[i8] {
        &self.energies
    }

    pub fn dimer_counts(&self) -> &[u8] {
        &self.dimers
    }

    /// `⟨H_I⟩` of a normalised dense distribution.
    pub fn mean_energy(&self, p: &[f64]) -> Result<f64> {
        check_len(p, self.energies.len())?;
        check_normalized(p)?;
        Ok(weighted(p, |i| self.energies[i] as f64))
    }

    /// `1 - ⟨H_I⟩ / e0`.
    pub fn residual_energy_density(&self, p: &[f64], e0: i32) -> Result<f64> {
        if e0 >= 0 {
            return Err(Error::NonNegativeGroundEnergy(e0));
        }
        Ok(1.0 - self.mean_energy(p)? / e0 as f64)
    }

    /// `⟨D⟩`, the mean number of floppy dimers.
    pub fn dimer_expectation(&self, p: &[f64]) -> Result<f64> {
        check_len(p, self.dimers.len())?;
        check_normalized(p)?;
        Ok(weighted(p, |i| self.dimers[i] as f64))
    }
}

/// `Σ p_i f(i)` in fixed chunk order.
fn weighted<F: Fn(usize) -> f64 + Sync + Send>(p: &[f64], f: F) -> f64 {
    par::chunked_sum(p, |c, chunk| {
        let base = c * par::SUM_CHUNK;
        chunk.iter().enumerate().map(|(k, &x)| if x == 0.0 { 0.0 } else { x * f(base + k) }).sum()
    })
}

/// `1 - ⟨H_I⟩ / e0` for a dense distribution over all `2^N` basis states.
pub fn residual_energy_density(g: &FullereneGraph, p: &[f64], e0: i32) -> Result<f64> {
    if e0 >= 0 {
        return Err(Error::NonNegativeGroundEnergy(e0));
    }
    let energies = energy_table(g)?;
    check_len(p, energies.len())?;
    check_normalized(p)?;
    Ok(1.0 - weighted(p, |i| energies[i] as f64) / e0 as f64)
}

/// Mean floppy-dimer count of a dense distribution over all `2^N` states.
pub fn dimer_expectation(g: &FullereneGraph, p: &[f64]) -> Result<f64> {
    let n = g.n_vertices();
    if n > crate::manifold::EXHAUSTIVE_LIMIT {
        return Err(Error::UnsupportedSize {
            what: "dense distribution size",
            n,
            max: crate::manifold::EXHAUSTIVE_LIMIT,
        });
    }
    check_len(p, 1 << n)?;
    check_normalized(p)?;
    let stencil = DimerStencil::new(g);
    Ok(weighted(p, |i| stencil.count(i as u64) as f64))
}

/// Mean floppy-dimer count of a distribution given on a list of states.
pub fn sparse_dimer_expectation(g: &FullereneGraph, states: &[SpinConfig], p: &[f64]) -> Result<f64> {
    check_len(p, states.len())?;
    check_normalized(p)?;
    if let Some(bad) = states.iter().find(|c| !c.fits(g.n_vertices())) {
        return Err(Error::ConfigMismatch { config: bad.bits(), n: g.n_vertices() });
    }
    let stencil = DimerStencil::new(g);
    Ok(weighted(p, |i| stencil.count(states[i].bits()) as f64))
}

/// Bhattacharyya coefficient `Σ √(p_i q_i)` of two normalised
/// distributions over the same index set.
pub fn bhattacharyya(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q.len())?;
    check_normalized(p)?;
    check_normalized(q)?;
    Ok(overlap(p, q))
}

fn overlap(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(_, &y)| y > 0.0).map(|(&x, &y)| libm::sqrt(x * y)).sum()
}

/// Bhattacharyya coefficient of a dense distribution against one supported
/// on the manifold. Mass outside the manifold contributes nothing.
pub fn manifold_fidelity(p_full: &[f64], m: &GroundStateManifold, q: &[f64]) -> Result<f64> {
    check_len(q, m.len())?;
    check_normalized(p_full)?;
    check_normalized(q)?;
    Ok(overlap(&restrict_to_manifold(p_full, m)?, q))
}

/// Probabilities of the manifold states, in manifold order.
pub fn restrict_to_manifold(p_full: &[f64], m: &GroundStateManifold) -> Result<Vec<f64>> {
    m.states()
        .iter()
        .map(|c| {
            p_full.get(c.bits() as usize).copied().ok_or(Error::ConfigMismatch {
                config: c.bits(),
                n: p_full.len().trailing_zeros() as usize,
            })
        })
        .collect()
}

/// Binned fidelity `Σ_b √(P_b Q_b)` with `P_b`, `Q_b` the masses of orbit
/// `b`. Both inputs are indexed like the partitioned states; `q` must be
/// normalised, `p` may be a restriction with total mass below one.
pub fn binned_fidelity(p: &[f64], q: &[f64], orbits: &OrbitPartition) -> Result<f64> {
    check_len(p, orbits.len())?;
    check_len(q, orbits.len())?;
    check_sub_normalized(p)?;
    check_normalized(q)?;
    Ok(binned_overlap(&orbits.bin(p), &orbits.bin(q)))
}

fn binned_overlap(pb: &[f64], qb: &[f64]) -> f64 {
    let f: f64 = pb.iter().zip(qb).map(|(&x, &y)| libm::sqrt(x * y)).sum();
    // Rounding can push a perfect match a few ulps above one.
    f.min(1.0)
}

/// Binned fidelity of a dense distribution against a manifold reference.
pub fn manifold_binned_fidelity(
    p_full: &[f64],
    m: &GroundStateManifold,
    q: &[f64],
    orbits: &OrbitPartition,
) -> Result<f64> {
    check_normalized(p_full)?;
    binned_fidelity(&restrict_to_manifold(p_full, m)?, q, orbits)
}

/// Prefix-sum table for inverse-CDF sampling.
#[derive(Clone, Debug)]
pub struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    /// Weights must be finite and non-negative with a positive total; they
    /// need not sum to one.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
        }
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .iter()
            .map(|&w| {
                acc += w;
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::NotNormalized { total: acc });
        }
        Ok(Sampler { cumulative })
    }

    #[inline]
    pub fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        let total = self.cumulative[self.cumulative.len() - 1];
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // u < total always, except for rounding at the top end.
        i.min(self.last_positive())
    }

    fn last_positive(&self) -> usize {
        let total = self.cumulative[self.cumulative.len() - 1];
        self.cumulative.partition_point(|&c| c < total)
    }
}

/// `count` independent draws (basis indices) from `dist`, in draw order.
/// Identical seeds give identical output.
pub fn sample(dist: &[f64], count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let sampler = Sampler::new(dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}

/// Empirical distribution of `samples` over `len` outcomes.
pub fn empirical(samples: &[usize], len: usize) -> Vec<f64> {
    let mut h = vec![0.0; len];
    for &s in samples {
        h[s] += 1.0;
    }
    let n = samples.len().max(1) as f64;
    h.iter_mut().for_each(|x| *x /= n);
    h
}

/// Distribution of the binned infidelity `1 - F'` of `count` fair samples
/// from `q` scored against `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityFloor {
    pub mean: f64,
    /// 2.5th percentile.
    pub lower: f64,
    /// 97.5th percentile.
    pub upper: f64,
    pub count: usize,
    /// Infidelity per repetition, in repetition order.
    pub values: Vec<f64>,
}

impl FidelityFloor {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Monte Carlo sampling floor. Repetition `r` draws from ChaCha stream `r`
/// of `seed`, so the result does not depend on scheduling.
pub fn fidelity_floor(
    q: &[f64],
    orbits: &OrbitPartition,
    count: usize,
    repetitions: usize,
    seed: u64,
) -> Result<FidelityFloor> {
    if repetitions < 2 {
        return Err(Error::InvalidArgument("need at least two repetitions".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    check_len(q, orbits.len())?;
    check_normalized(q)?;
    let sampler = Sampler::new(q)?;
    let qb = orbits.bin(q);
    let values = par::map_indices(repetitions, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let mut counts = vec![0u64; orbits.n_orbits()];
        for _ in 0..count {
            counts[orbits.orbit_of(sampler.draw(&mut rng))] += 1;
        }
        let pb: Vec<f64> = counts.iter().map(|&c| c as f64 / count as f64).collect();
        1.0 - binned_overlap(&pb, &qb)
    });
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(FidelityFloor {
        mean: values.iter().sum::<f64>() / repetitions as f64,
        lower: percentile(&sorted, 0.025),
        upper: percentile(&sorted, 0.975),
        count,
        values,
    })
}

/// Linear interpolation between order statistics of a sorted sample.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// One row of observables for an anneal of length `t_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord {
    pub t_a: f64,
    pub delta_e: f64,
    pub d_mean: f64,
    pub f_binned: f64,
    /// `None` when computed exactly from the state vector.
    pub sample_count: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::enumerate_ground_states;
    use crate::topology::{automorphisms, orbit_partition, BuiltinGraph};

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / (1u64 << n) as f64; 1 << n]
    }

    #[test]
    fn uniform_distribution_limits() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let obs = BasisObservables::new(&g).unwrap();
        let p = uniform(20);
        assert!((obs.residual_energy_density(&p, -18).unwrap() - 1.0).abs() < 1e-12);
        assert!((obs.dimer_expectation(&p).unwrap() - 7.5).abs() < 1e-12);
        assert!((dimer_expectation(&g, &p).unwrap() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn point_mass_on_all_up() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let mut p = vec![0.0; 1 << 20];
        p[(1 << 20) - 1] = 1.0;
        let d = residual_energy_density(&g, &p, -18).unwrap();
        assert!((d - (1.0 - 30.0 / -18.0)).abs() < 1e-12);
        assert_eq!(dimer_expectation(&g, &p).unwrap(), 0.0);
        assert!(matches!(residual_energy_density(&g, &p, 0), Err(Error::NonNegativeGroundEnergy(0))));
    }

    #[test]
    fn ground_state_mass_has_zero_residual_energy() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let m = enumerate_ground_states(&g).unwrap();
        let mut p = vec![0.0; 1 << 20];
        for c in m.states() {
            p[c.bits() as usize] = 1.0 / m.len() as f64;
        }
        assert!(residual_energy_density(&g, &p, m.e0()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn fidelity_basics() {
        let p = [0.5, 0.5, 0.0, 0.0];
        let q = [0.0, 0.0, 0.25, 0.75];
        assert!((bhattacharyya(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(bhattacharyya(&p, &q).unwrap(), 0.0);
        assert!(bhattacharyya(&[0.5, 0.4], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn binned_fidelity_ignores_permutation_within_orbits() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let m = enumerate_ground_states(&g).unwrap();
        let orbits = orbit_partition(&automorphisms(&g), m.states(), true).unwrap();
        let q = vec![1.0 / m.len() as f64; m.len()];
        // All mass of each orbit on its first member.
        let mut p = vec![0.0; m.len()];
        let qb = orbits.bin(&q);
        for (b, &mass) in qb.iter().enumerate() {
            let first = (0..m.len()).find(|&i| orbits.orbit_of(i) == b).unwrap();
            p[first] = mass;
        }
        assert!((binned_fidelity(&p, &q, &orbits).unwrap() - 1.0).abs() < 1e-12);
        assert!(bhattacharyya(&p, &q).unwrap() < 0.5);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = [0.1, 0.0, 0.6, 0.3];
        assert!(sample(&d, 0, 1).unwrap().is_empty());
        let a = sample(&d, 1000, 7).unwrap();
        assert_eq!(a, sample(&d, 1000, 7).unwrap());
        assert_ne!(a, sample(&d, 1000, 8).unwrap());
        assert!(a.iter().all(|&i| i != 1));
        let e = empirical(&a, 4);
        assert!((e[2] - 0.6).abs() < 0.06);
    }

    #[test]
    fn draw_never_returns_trailing_zero_weight() {
        let s = Sampler::new(&[0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| s.draw(&mut rng) == 1));
        assert!(Sampler::new(&[0.0, 0.0]).is_err());
        assert!(Sampler::new(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn percentiles() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 0.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.125), 0.5);
    }

    #[test]
    fn floor_needs_two_repetitions() {
        let g = BuiltinGraph::DodecahedronAfm.build();
        let m = enumerate_ground_states(&g).unwrap();
        let orbits = orbit_partition(&automorphisms(&g), m.states(), true).unwrap();
        let q = vec![1.0 / m.len() as f64; m.len()];
        assert!(fidelity_floor(&q, &orbits, 100, 1, 0).is_err());
        let a = fidelity_floor(&q, &orbits, 1000, 20, 5).unwrap();
        assert_eq!(a, fidelity_floor(&q, &orbits, 1000, 20, 5).unwrap());
        assert!(a.lower <= a.mean && a.mean <= a.upper);
    }
}
