//! Piecewise time dependence of the LMG parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lmg::LmgParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampShape {
    #[default]
    Linear,
    /// `(1 - cos(pi u)) / 2`, zero slope at both ends.
    RaisedCosine,
}

impl RampShape {
    /// Interpolation weight at fraction `u` of the ramp.
    pub fn weight(self, u: f64) -> f64 {
        match self {
            RampShape::Linear => u,
            RampShape::RaisedCosine => 0.5 * (1.0 - (PI * u).cos()),
        }
    }

    /// `int_0^tau weight(s / T) ds`.
    pub fn weight_integral(self, tau: f64, duration: f64) -> f64 {
        match self {
            RampShape::Linear => tau * tau / (2.0 * duration),
            RampShape::RaisedCosine => {
                0.5 * tau - duration / (2.0 * PI) * (PI * tau / duration).sin()
            }
        }
    }
}

/// The three dimensionless LMG couplings at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Couplings {
    pub h: f64,
    pub gamma_x: f64,
    #[serde(default)]
    pub gamma_y: f64,
}

impl Couplings {
    pub fn new(h: f64, gamma_x: f64) -> Self {
        Self {
            h,
            gamma_x,
            gamma_y: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.h, self.gamma_x, self.gamma_y]
    }

    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        Self {
            h: a.h + (b.h - a.h) * w,
            gamma_x: a.gamma_x + (b.gamma_x - a.gamma_x) * w,
            gamma_y: a.gamma_y + (b.gamma_y - a.gamma_y) * w,
        }
    }
}

impl From<LmgParams> for Couplings {
    fn from(p: LmgParams) -> Self {
        Self {
            h: p.h,
            gamma_x: p.gamma_x,
            gamma_y: p.gamma_y,
        }
    }
}

/// One stretch of the schedule with a fixed energy scale `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub start: Couplings,
    pub end: Couplings,
    #[serde(default)]
    pub shape: RampShape,
    pub omega_over_2pi: f64,
}

impl Segment {
    pub fn hold(at: Couplings, duration: f64, omega_over_2pi: f64) -> Self {
        Self {
            duration,
            start: at,
            end: at,
            shape: RampShape::Linear,
            omega_over_2pi,
        }
    }

    pub fn ramp(
        from: Couplings,
        to: Couplings,
        duration: f64,
        shape: RampShape,
        omega_over_2pi: f64,
    ) -> Self {
        Self {
            duration,
            start: from,
            end: to,
            shape,
            omega_over_2pi,
        }
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.omega_over_2pi
    }

    pub fn is_constant(&self) -> bool {
        self.start == self.end
    }

    pub fn couplings_at(&self, tau: f64) -> Couplings {
        if self.is_constant() {
            return self.start;
        }
        Couplings::lerp(&self.start, &self.end, self.shape.weight(tau / self.duration))
    }

    /// `int_0^tau` of each coupling.
    pub fn coupling_integrals(&self, tau: f64) -> [f64; 3] {
        let s = self.start.as_array();
        let e = self.end.as_array();
        let w = self.shape.weight_integral(tau, self.duration);
        std::array::from_fn(|k| s[k] * tau + (e[k] - s[k]) * w)
    }

    /// `int_0^tau (t0 + s) d/ds coupling(s) ds`, per coupling.
    pub fn moment_of_change(&self, t0: f64, tau: f64) -> [f64; 3] {
        if self.is_constant() {
            return [0.0; 3];
        }
        let s = self.start.as_array();
        let e = self.end.as_array();
        let w = self.shape.weight(tau / self.duration);
        let wi = self.shape.weight_integral(tau, self.duration);
        let factor = (t0 + tau) * w - wi;
        std::array::from_fn(|k| (e[k] - s[k]) * factor)
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(invalid("duration", "segment duration must be positive"));
        }
        if !(self.omega_over_2pi > 0.0) || !self.omega_over_2pi.is_finite() {
            return Err(invalid("omega_over_2pi", "must be positive"));
        }
        for v in self.start.as_array().into_iter().chain(self.end.as_array()) {
            if !v.is_finite() {
                return Err(Error::NonFinite("schedule couplings"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct LmgSchedule {
    segments: Vec<Segment>,
    starts: Vec<f64>,
}

impl TryFrom<Vec<Segment>> for LmgSchedule {
    type Error = Error;
    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        Self::new(segments)
    }
}

impl From<LmgSchedule> for Vec<Segment> {
    fn from(s: LmgSchedule) -> Self {
        s.segments
    }
}

impl LmgSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("segments", "schedule needs at least one segment"));
        }
        let mut starts = Vec::with_capacity(segments.len());
        let mut t = 0.0;
        for s in &segments {
            s.validate()?;
            starts.push(t);
            t += s.duration;
        }
        Ok(Self { segments, starts })
    }

    /// A single constant segment.
    pub fn constant(p: LmgParams, duration: f64) -> Result<Self> {
        Self::new(vec![Segment::hold(p.into(), duration, p.omega_over_2pi)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_start(&self, k: usize) -> f64 {
        self.starts[k]
    }

    pub fn duration(&self) -> f64 {
        self.starts.last().unwrap() + self.segments.last().unwrap().duration
    }

    /// Segment index and local time. Boundaries belong to the later segment
    /// except at the very end.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.duration();
        let slack = 1e-12 * total;
        if !(t >= -slack && t <= total + slack) {
            return Err(Error::OutsideSchedule { t, duration: total });
        }
        let t = t.clamp(0.0, total);
        let k = match self.starts.partition_point(|&s| s <= t) {
            0 => 0,
            k => k - 1,
        };
        let tau = (t - self.starts[k]).min(self.segments[k].duration);
        Ok((k, tau))
    }

    pub fn couplings_at(&self, t: f64) -> Result<Couplings> {
        let (k, tau) = self.locate(t)?;
        Ok(self.segments[k].couplings_at(tau))
    }

    pub fn params_at(&self, t: f64) -> Result<LmgParams> {
        let (k, tau) = self.locate(t)?;
        let c = self.segments[k].couplings_at(tau);
        Ok(LmgParams {
            h: c.h,
            gamma_x: c.gamma_x,
            gamma_y: c.gamma_y,
            omega_over_2pi: self.segments[k].omega_over_2pi,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.segments.iter().all(|s| s.is_constant())
            && self.segments.windows(2).all(|w| {
                w[0].end == w[1].start && w[0].omega_over_2pi == w[1].omega_over_2pi
            })
    }

    /// Times where the Hamiltonian may be non-smooth, including 0 and the end.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.starts.clone();
        b.push(self.duration());
        b
    }

    /// Concatenates two schedules.
    pub fn then(&self, other: &LmgSchedule) -> Result<Self> {
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        Self::new(segs)
    }
}
