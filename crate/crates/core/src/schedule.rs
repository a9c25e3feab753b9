//! Annealing schedules `Γ(s)`, `J(s)` sampled at knots in normalised time
//! and interpolated piecewise-linearly. Energies are `h·f` in GHz.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Knot {
    pub s: f64,
    pub gamma: f64,
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealingSchedule {
    name: String,
    knots: Vec<Knot>,
}

impl AnnealingSchedule {
    /// Knots must start at `s = 0`, end at `s = 1`, increase strictly in `s`
    /// and carry non-negative, finite energies.
    pub fn new(name: impl Into<String>, knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidSchedule(String::from("need at least two knots")));
        }
        for (i, k) in knots.iter().enumerate() {
            if !(k.s.is_finite() && k.gamma.is_finite() && k.j.is_finite()) {
                return Err(Error::InvalidSchedule(format!("knot {i} is not finite")));
            }
            if k.gamma < 0.0 || k.j < 0.0 {
                return Err(Error::InvalidSchedule(format!("knot {i} has a negative energy")));
            }
            if i > 0 && k.s <= knots[i - 1].s {
                return Err(Error::InvalidSchedule(format!("s not increasing at knot {i}")));
            }
        }
        if knots[0].s != 0.0 {
            return Err(Error::InvalidSchedule(String::from("first knot must have s = 0")));
        }
        if knots[knots.len() - 1].s != 1.0 {
            return Err(Error::InvalidSchedule(String::from("last knot must have s = 1")));
        }
        Ok(AnnealingSchedule { name: name.into(), knots })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// `(Γ(s), J(s))`, exact at knots and linear between them.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange { what: "s", value: s });
        }
        // First knot with knot.s > s; the segment ends there.
        let hi = self.knots.partition_point(|k| k.s <= s);
        if hi == 0 {
            let k = self.knots[0];
            return Ok((k.gamma, k.j));
        }
        let a = self.knots[hi - 1];
        if a.s == s || hi == self.knots.len() {
            return Ok((a.gamma, a.j));
        }
        let b = self.knots[hi];
        let w = (s - a.s) / (b.s - a.s);
        Ok((a.gamma + w * (b.gamma - a.gamma), a.j + w * (b.j - a.j)))
    }

    /// Multiplies `J(s)` by `factor` in `(0, 1]`, leaving `Γ(s)` unchanged.
    pub fn rescale_couplings(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::OutOfRange { what: "coupling scale", value: factor });
        }
        if factor == 1.0 {
            return Ok(self.clone());
        }
        let knots = self
            .knots
            .iter()
            .map(|k| Knot { j: k.j * factor, ..*k })
            .collect();
        Ok(AnnealingSchedule { name: format!("{}*J{}", self.name, factor), knots })
    }
}

/// Parameters of the synthetic linear-ramp schedule
/// `Γ(s) = Γ0 (1 - s)`, `J(s) = J0 s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearRamp {
    pub gamma0: f64,
    pub j0: f64,
    pub knots: usize,
}

impl Default for LinearRamp {
    fn default() -> Self {
        LinearRamp { gamma0: 6.0, j0: 4.0, knots: 101 }
    }
}

impl LinearRamp {
    pub fn build(&self) -> Result<AnnealingSchedule> {
        if self.knots < 2 {
            return Err(Error::InvalidSchedule(String::from("need at least two knots")));
        }
        let last = (self.knots - 1) as f64;
        let knots = (0..self.knots)
            .map(|i| {
                let s = i as f64 / last;
                Knot { s, gamma: self.gamma0 * (1.0 - s), j: self.j0 * s }
            })
            .collect();
        AnnealingSchedule::new("default", knots)
    }
}

/// Linear ramp with `Γ0 = 6 GHz`, `J0 = 4 GHz` at 101 uniform knots.
pub fn default_schedule() -> AnnealingSchedule {
    LinearRamp::default().build().expect("default ramp is valid")
}
