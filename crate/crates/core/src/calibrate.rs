//! Effective-time calibration between schedules by matching an observable
//! as a function of anneal time.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolve::{EvolutionParams, Integrator};
use crate::manifold::GroundStateManifold;
use crate::measures;
use crate::schedule::AnnealingSchedule;
use crate::topology::{FullereneGraph, OrbitPartition};

/// Observable used to match anneal times.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MatchObservable {
    /// Orbit-binned fidelity against the reference distribution.
    #[default]
    BinnedFidelity,
    /// Residual energy density.
    ResidualEnergy,
}

/// Observable value against anneal time, strictly increasing in time.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityCurve {
    schedule_name: String,
    points: Vec<(f64, f64)>,
}

impl FidelityCurve {
    pub fn new(schedule_name: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArgument("a curve needs at least three points".into()));
        }
        for (i, &(t, f)) in points.iter().enumerate() {
            if !(t.is_finite() && f.is_finite()) {
                return Err(Error::InvalidArgument(alloc::format!("point {i} is not finite")));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(Error::InvalidArgument(alloc::format!(
                    "t_a not increasing at point {i}"
                )));
            }
        }
        Ok(FidelityCurve { schedule_name: schedule_name.into(), points })
    }

    pub fn schedule_name(&self) -> &str {
        &self.schedule_name
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// Piecewise-linear value at `t`.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { what: "t_a (ns)", value: t });
        }
        let k = self.points.partition_point(|p| p.0 <= t);
        if k == self.points.len() {
            return Ok(self.points[k - 1].1);
        }
        let (t0, f0) = self.points[k - 1];
        let (t1, f1) = self.points[k];
        Ok(f0 + (t - t0) / (t1 - t0) * (f1 - f0))
    }
}

/// Reference the anneal output is scored against.
#[derive(Clone, Copy, Debug)]
pub struct CurveTarget<'a> {
    pub manifold: &'a GroundStateManifold,
    /// Reference probabilities in manifold order.
    pub reference: &'a [f64],
    pub orbits: &'a OrbitPartition,
    pub observable: MatchObservable,
}

/// Evolves and scores one anneal per entry of `t_list`, in order.
pub fn fidelity_points(
    g: &FullereneGraph,
    schedule: &AnnealingSchedule,
    t_list: &[f64],
    ds: f64,
    target: CurveTarget<'_>,
) -> Result<Vec<(f64, f64)>> {
    let integrator = Integrator::new(g)?;
    let energies = measures::BasisObservables::new(g)?;
    t_list
        .iter()
        .map(|&t| {
            let p = EvolutionParams::new(t, ds, schedule.clone())?;
            let probs = integrator.evolve(&p)?.probabilities();
            let value = match target.observable {
                MatchObservable::BinnedFidelity => measures::manifold_binned_fidelity(
                    &probs,
                    target.manifold,
                    target.reference,
                    target.orbits,
                )?,
                MatchObservable::ResidualEnergy => {
                    energies.residual_energy_density(&probs, target.manifold.e0())?
                }
            };
            Ok((t, value))
        })
        .collect()
}

/// [`fidelity_points`] packaged as a curve; needs at least three times.
pub fn fidelity_curve(
    g: &FullereneGraph,
    schedule: &AnnealingSchedule,
    t_list: &[f64],
    ds: f64,
    target: CurveTarget<'_>,
) -> Result<FidelityCurve> {
    FidelityCurve::new(schedule.name(), fidelity_points(g, schedule, t_list, ds, target)?)
}

/// Time `t'` at which `b` reaches the value `a` has at `t`, by inverting
/// `b` on the unique segment that brackets the value.
pub fn equivalent_time(a: &FidelityCurve, b: &FidelityCurve, t: f64) -> Result<f64> {
    let target = a.interpolate(t)?;
    let mut hits: Vec<(usize, f64)> = Vec::new();
    let mut flat = Vec::new();
    for (k, w) in b.points.windows(2).enumerate() {
        let ((t0, f0), (t1, f1)) = (w[0], w[1]);
        if target < f0.min(f1) || target > f0.max(f1) {
            continue;
        }
        if f0 == f1 {
            flat.push(k);
            continue;
        }
        let x = t0 + (target - f0) / (f1 - f0) * (t1 - t0);
        // A crossing exactly at a shared knot belongs to both neighbours.
        if hits.last().map_or(true, |&(_, prev)| libm::fabs(prev - x) > 1e-12 * x.abs().max(1.0)) {
            hits.push((k, x));
        }
    }
    match (hits.len(), flat.is_empty()) {
        (0, true) => Err(Error::NoMatch { target }),
        (1, true) => Ok(hits[0].1),
        _ => {
            let mut segments: Vec<usize> = hits.iter().map(|h| h.0).chain(flat).collect();
            segments.sort_unstable();
            Err(Error::Ambiguous { target, segments })
        }
    }
}
