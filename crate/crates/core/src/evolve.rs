//! State-vector integration of `H(s) = Γ(s) H_D + J(s) H_I` with
//! `H_D = -Σ σx_i` over the full `2^N` computational basis.
//!
//! Each step of normalised length `h` (physical `dt = h·t_a`) applies the
//! symmetric split `D(dt/2) · I(dt) · D(dt/2)` with coefficients sampled at
//! the step midpoint. Energies are in GHz and times in ns, so a phase is
//! `2π · E · t`. Adjacent driver half-steps share the same operator and are
//! merged, so one step costs one diagonal pass and one rotation of every
//! qubit.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::manifold::exhaustive::energy_table;
use crate::par;
use crate::schedule::AnnealingSchedule;
use crate::topology::FullereneGraph;

pub const MAX_QUBITS: usize = 24;
/// Allowed drift of `‖ψ‖²` over one evolution.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Qubits rotated inside one cache-resident block.
const BLOCK_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    n: usize,
    amps: Vec<Complex64>,
}

impl Wavefunction {
    /// Ground state of `H_D`: every amplitude `2^(-n/2)`.
    pub fn initial_state(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let a = libm::pow(2.0, -(n as f64) / 2.0);
        Ok(Wavefunction { n, amps: vec![Complex64::new(a, 0.0); 1 << n] })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        Ok(Wavefunction { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        par::chunked_sum(&self.amps, |_, c| c.iter().map(|a| a.norm_sqr()).sum())
    }

    /// `|amp|²` per basis state, indexed by bit pattern.
    pub fn probabilities(&self) -> Vec<f64> {
        par::map_chunks(&self.amps, par::SUM_CHUNK, |_, c| {
            c.iter().map(|a| a.norm_sqr()).collect::<Vec<f64>>()
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

pub fn initial_state(n: usize) -> Result<Wavefunction> {
    Wavefunction::initial_state(n)
}

pub fn probabilities(w: &Wavefunction) -> Vec<f64> {
    w.probabilities()
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::UnsupportedSize { what: "qubit count", n, max: MAX_QUBITS });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionParams {
    /// Anneal duration in ns.
    pub t_a: f64,
    /// Requested normalised step; the integrator uses `1 / ceil(1 / ds)`.
    pub ds: f64,
    pub schedule: AnnealingSchedule,
}

impl EvolutionParams {
    pub fn new(t_a: f64, ds: f64, schedule: AnnealingSchedule) -> Result<Self> {
        let p = EvolutionParams { t_a, ds, schedule };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_a > 0.0 && self.t_a.is_finite()) {
            return Err(Error::OutOfRange { what: "t_a (ns)", value: self.t_a });
        }
        if !(self.ds > 0.0 && self.ds <= 0.1) {
            return Err(Error::OutOfRange { what: "ds", value: self.ds });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        libm::ceil(1.0 / self.ds - 1e-9) as usize
    }
}

/// Integrator bound to one graph; the diagonal energies are computed once
/// and reused across evolutions.
#[derive(Clone, Debug)]
pub struct Integrator {
    n: usize,
    energies: Vec<i8>,
    max_abs_energy: i32,
}

impl Integrator {
    pub fn new(g: &FullereneGraph) -> Result<Self> {
        let n = g.n_vertices();
        check_qubits(n)?;
        Ok(Integrator { n, energies: energy_table(g)?, max_abs_energy: g.n_edges() as i32 })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Classical energy per basis state.
    pub fn energies(&self) -> &[i8] {
        &self.energies
    }

    /// Evolves the `H_D` ground state over the full schedule.
    pub fn evolve(&self, p: &EvolutionParams) -> Result<Wavefunction> {
        let mut psi = Wavefunction::initial_state(self.n)?;
        self.evolve_state(&mut psi, p)?;
        Ok(psi)
    }

    pub fn evolve_state(&self, psi: &mut Wavefunction, p: &EvolutionParams) -> Result<()> {
        p.validate()?;
        if psi.n != self.n {
            return Err(Error::InvalidArgument(alloc::format!(
                "state has {} qubits, graph has {}",
                psi.n,
                self.n
            )));
        }
        let before = psi.norm_sqr();
        let steps = p.steps();
        let h = 1.0 / steps as f64;
        let dt = h * p.t_a;
        let coeffs: Vec<(f64, f64)> = (0..steps)
            .map(|k| p.schedule.eval((k as f64 + 0.5) * h))
            .collect::<Result<_>>()?;

        // Driver angle for a half-step with coefficient Γ: 2π Γ dt / 2.
        let driver = |gamma: f64| PI * gamma * dt;
        self.rotate_all(&mut psi.amps, driver(coeffs[0].0), None);
        for k in 0..steps {
            let next = coeffs.get(k + 1).map_or(0.0, |c| c.0);
            let angle = driver(coeffs[k].0) + driver(next);
            let phases = self.phase_table(2.0 * PI * coeffs[k].1 * dt);
            self.rotate_all(&mut psi.amps, angle, Some(&phases));
        }

        let drift = libm::fabs(psi.norm_sqr() - before);
        if drift > NORM_TOLERANCE {
            return Err(Error::NormDrift { drift });
        }
        Ok(())
    }

    /// `exp(-i φ E)` for every energy `E` in `[-|E|max, |E|max]`.
    fn phase_table(&self, phi: f64) -> Vec<Complex64> {
        (-self.max_abs_energy..=self.max_abs_energy)
            .map(|e| {
                let a = -phi * e as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect()
    }

    /// Optionally applies the diagonal phase, then `exp(i θ σx)` on every
    /// qubit.
    fn rotate_all(&self, amps: &mut [Complex64], theta: f64, phases: Option<&[Complex64]>) {
        let (c, s) = (libm::cos(theta), libm::sin(theta));
        let low = self.n.min(BLOCK_QUBITS);
        let offset = self.max_abs_energy;
        let energies = &self.energies;
        par::for_each_chunk_mut(amps, 1 << low, |b, block| {
            if let Some(ph) = phases {
                let e = &energies[b << low..(b + 1) << low];
                for (a, &en) in block.iter_mut().zip(e) {
                    *a *= ph[(en as i32 + offset) as usize];
                }
            }
            let mut q = 0;
            while q + 1 < low {
                rotate_two(block, q, c, s);
                q += 2;
            }
            if q < low {
                rotate_qubit(block, q, c, s);
            }
        });
        rotate_high(amps, self.n, low, c, s);
    }
}

/// `[a, b] <- [[c, i s], [i s, c]] [a, b]`.
#[inline(always)]
fn butterfly(a: Complex64, b: Complex64, c: f64, s: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(c * a.re - s * b.im, c * a.im + s * b.re),
        Complex64::new(c * b.re - s * a.im, c * b.im + s * a.re),
    )
}

fn rotate_qubit(block: &mut [Complex64], q: usize, c: f64, s: f64) {
    let half = 1 << q;
    for pair in block.chunks_exact_mut(half << 1) {
        let (lo, hi) = pair.split_at_mut(half);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            (*a, *b) = butterfly(*a, *b, c, s);
        }
    }
}

/// Rotates qubits `q` and `q + 1` of every amplitude in `block`.
fn rotate_two(block: &mut [Complex64], q: usize, c: f64, s: f64) {
    let stride = 1usize << q;
    for chunk in block.chunks_exact_mut(stride << 2) {
        let (lo, hi) = chunk.split_at_mut(stride << 1);
        let (s0, s1) = lo.split_at_mut(stride);
        let (s2, s3) = hi.split_at_mut(stride);
        for (((a, b), x), y) in s0.iter_mut().zip(s1.iter_mut()).zip(s2.iter_mut()).zip(s3.iter_mut()) {
            let (a1, b1) = butterfly(*a, *b, c, s);
            let (x1, y1) = butterfly(*x, *y, c, s);
            (*a, *x) = butterfly(a1, x1, c, s);
            (*b, *y) = butterfly(b1, y1, c, s);
        }
    }
}

/// Rotates qubits from `q` upwards (beyond the cache block) in passes of
/// two over the whole array.
fn rotate_high(amps: &mut [Complex64], n: usize, mut q: usize, c: f64, s: f64) {
    while q < n {
        let pair = q + 1 < n;
        let span = if pair { 4 << q } else { 2 << q };
        par::for_each_chunk_mut(amps, span, |_, chunk| {
            if pair {
                rotate_two(chunk, q, c, s);
            } else {
                rotate_qubit(chunk, q, c, s);
            }
        });
        q += if pair { 2 } else { 1 };
    }
}

/// One-shot evolution of the `H_D` ground state on `g`.
pub fn evolve(g: &FullereneGraph, p: &EvolutionParams) -> Result<Wavefunction> {
    Integrator::new(g)?.evolve(p)
}
