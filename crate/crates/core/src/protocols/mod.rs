//! The five measurement protocols: each prepares a state with ideal
//! adjacent-level pulses, runs LMG drive schedules, undoes the preparation
//! and reads out level 0.

pub mod dpt;
pub mod esqpt;
pub mod gap;
pub mod kz;
pub mod order;
pub mod prep;
pub mod spectrum;

use serde::{Deserialize, Serialize};

use crate::drive::{lmg_to_drive, Couplings, DriveOptions, DriveSchedule, LmgSchedule, RampShape, Segment, Sector};
use crate::error::{invalid, Error, Result};
use crate::evolve::{self, NoiseModel, PropagatorConfig, StateHistory};
use crate::linalg::{self, CMatrix, CVector};
use crate::lmg::{self, BasisMap, LmgParams, DEFAULT_OMEGA_OVER_2PI};
use crate::spin::{self, BasisTag, Parity, SpinSize, SpinState};

pub use dpt::{run_dpt, DptConfig, DptResult};
pub use esqpt::{run_esqpt, EsqptConfig, EsqptResult};
pub use gap::{critical_sweep, run_gap_ramsey, GapRamseyConfig, Preparation, RamseyGap, RamseyResult};
pub use kz::{kz_fast_limit, run_kibble_zurek, KibbleZurekConfig, KzPoint};
pub use order::{classical_order_peak, run_order_parameter, OrderDistribution, OrderParameterConfig};
pub use prep::PreparationSequence;
pub use spectrum::{extract_peak, Peak, PeakMethod, PeakOptions, SpectrumEstimate, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampParameter {
    H,
    GammaX,
}

/// A sweep of one coupling while the other is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSpec {
    pub parameter: RampParameter,
    pub start: f64,
    pub end: f64,
    /// Seconds.
    pub duration: f64,
    #[serde(default)]
    pub shape: RampShape,
    /// `Omega / 2 pi` in Hz during the ramp.
    pub omega_during_ramp: f64,
}

impl RampSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(invalid("ramp.duration", "must be positive"));
        }
        if !(self.omega_during_ramp > 0.0) {
            return Err(invalid("ramp.omega_during_ramp", "must be positive"));
        }
        if !self.start.is_finite() || !self.end.is_finite() {
            return Err(invalid("ramp", "endpoints must be finite"));
        }
        Ok(())
    }

    /// Couplings at the two ends with the other coupling at `other`.
    pub fn endpoints(&self, other: f64) -> (Couplings, Couplings) {
        match self.parameter {
            RampParameter::H => (Couplings::new(self.start, other), Couplings::new(self.end, other)),
            RampParameter::GammaX => (Couplings::new(other, self.start), Couplings::new(other, self.end)),
        }
    }

    pub fn segment(&self, other: f64) -> Segment {
        let (a, b) = self.endpoints(other);
        Segment::ramp(a, b, self.duration, self.shape, self.omega_during_ramp)
    }

    pub fn reversed_segment(&self, other: f64) -> Segment {
        let (a, b) = self.endpoints(other);
        Segment::ramp(b, a, self.duration, self.shape, self.omega_during_ramp)
    }

    /// True if `h / gamma_x` passes through 1 strictly inside the ramp.
    pub fn crosses_critical_point(&self, other: f64) -> bool {
        let (a, b) = self.endpoints(other);
        let side = |c: Couplings| {
            if c.gamma_x == 0.0 {
                1.0
            } else {
                (c.h / c.gamma_x - 1.0).signum()
            }
        };
        let ratio = |c: Couplings| if c.gamma_x == 0.0 { f64::INFINITY } else { c.h / c.gamma_x };
        let (ra, rb) = (ratio(a), ratio(b));
        side(a) * side(b) < 0.0 && ra != 1.0 && rb != 1.0
    }
}

/// Settings shared by every protocol run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub drive: DriveOptions,
    #[serde(default)]
    pub peak: PeakOptions,
}

impl ProtocolOptions {
    fn noisy(&self) -> bool {
        self.noise.as_ref().is_some_and(|n| n.enabled)
    }
}

/// Sector holding the doubled spin, or the whole qudit.
pub fn sector_for(doubled: bool) -> Sector {
    if doubled {
        Sector::Even
    } else {
        Sector::Full
    }
}

/// A Jz-basis state restricted to the driven transmon block.
pub fn block_vector(spin: SpinSize, sector: Sector, state: &SpinState) -> Result<CVector> {
    let full = match state.basis() {
        BasisTag::JzBasis => BasisMap::new(spin).vector_to_transmon(state.amplitudes()),
        BasisTag::TransmonBasis => state.amplitudes().clone(),
    };
    let (first, dim) = sector.block(spin);
    let inside = full.rows(first, dim).into_owned();
    let leak = full.norm_squared() - inside.norm_squared();
    if leak > 1e-12 {
        return Err(invalid("state", format!("has weight {leak:e} outside the {sector:?} sector")));
    }
    Ok(inside)
}

/// Eigenpairs of `H_LMG / Omega` on the driven block, ascending.
pub fn block_eigensystem(spin: SpinSize, p: &LmgParams, sector: Sector) -> Result<(Vec<f64>, CMatrix)> {
    match sector {
        Sector::Full => {
            let s = lmg::spectrum(spin, p, lmg::Basis::Transmon)?;
            Ok((s.energies, s.eigenvectors))
        }
        Sector::Even | Sector::Odd => {
            let parity = if sector == Sector::Even { Parity::Even } else { Parity::Odd };
            let h = linalg::to_complex(&lmg::sector_hamiltonian(spin, p, parity));
            let (vals, mut vecs) = linalg::eigh(&h);
            for mut col in vecs.column_iter_mut() {
                let mut v = col.clone_owned();
                linalg::fix_global_phase(&mut v);
                col.copy_from(&v);
            }
            Ok((vals, vecs))
        }
    }
}

/// Final state of a run, pure or mixed.
#[derive(Debug, Clone)]
pub enum FinalState {
    Pure(CVector),
    Mixed(CMatrix),
}

impl FinalState {
    pub fn readout(&self, prep: &PreparationSequence) -> f64 {
        match self {
            FinalState::Pure(v) => prep.measure_pure(v),
            FinalState::Mixed(r) => prep.measure_mixed(r),
        }
    }
}

pub(crate) fn drive(spin: SpinSize, schedule: &LmgSchedule, sector: Sector, opts: &ProtocolOptions) -> Result<DriveSchedule> {
    lmg_to_drive(spin, schedule, sector, opts.drive)
}

/// Evolves `psi` through `schedule` and returns the final state.
pub fn run_schedule(
    spin: SpinSize,
    schedule: &LmgSchedule,
    sector: Sector,
    psi: &CVector,
    opts: &ProtocolOptions,
) -> Result<FinalState> {
    let ds = drive(spin, schedule, sector, opts)?;
    if !opts.noisy() && opts.propagator.frame == evolve::Frame::Rotating {
        let mut m = CMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
        opts.propagator.validate()?;
        evolve::advance_piecewise(&ds, &opts.propagator, 0.0, ds.duration(), &mut m)?;
        return Ok(FinalState::Pure(m.column(0).into_owned()));
    }
    let initial = SpinState::new(psi.clone(), BasisTag::TransmonBasis)?;
    let traj = evolve::propagate(&initial, &ds, &opts.propagator, opts.noise.as_ref(), &[ds.duration()])?;
    Ok(match traj.history {
        StateHistory::Pure(mut v) => FinalState::Pure(v.pop().expect("one sample")),
        StateHistory::Mixed(mut r) => FinalState::Mixed(r.pop().expect("one sample")),
    })
}

/// Unitary of a noiseless schedule on the driven block.
pub fn schedule_unitary(spin: SpinSize, schedule: &LmgSchedule, sector: Sector, opts: &ProtocolOptions) -> Result<CMatrix> {
    let ds = drive(spin, schedule, sector, opts)?;
    evolve::propagator(&ds, &opts.propagator, 0.0, ds.duration())
}

pub(crate) fn definite_parity_block(spin: SpinSize, sector: Sector, m: u32, parity: Parity) -> Result<CVector> {
    block_vector(spin, sector, &spin::definite_parity_jx2_eigenstate(spin, m, parity)?)
}

pub(crate) fn jz_block(spin: SpinSize, sector: Sector, m: i64) -> Result<CVector> {
    block_vector(spin, sector, &spin::jz_eigenstate(spin, m)?)
}

pub(crate) fn equal_superposition(a: &CVector, b: &CVector) -> Result<CVector> {
    let v = (a + b) * linalg::c(0.5f64.sqrt());
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(invalid("superposition", "components must be orthonormal"));
    }
    Ok(v)
}

pub(crate) fn default_omega() -> f64 {
    DEFAULT_OMEGA_OVER_2PI
}

pub(crate) fn check_spin(j: u32) -> Result<SpinSize> {
    SpinSize::new(j).map_err(|_| Error::InvalidSpin(j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_crossing_detection() {
        let r = RampSpec {
            parameter: RampParameter::H,
            start: 0.0,
            end: 1.5,
            duration: 1e-6,
            shape: RampShape::Linear,
            omega_during_ramp: 1.91e6,
        };
        assert!(r.crosses_critical_point(1.0));
        assert!(!RampSpec { end: 0.8, ..r }.crosses_critical_point(1.0));
        assert!(!RampSpec { end: 1.0, ..r }.crosses_critical_point(1.0));
        let g = RampSpec { parameter: RampParameter::GammaX, start: 0.0, end: 1.0, ..r };
        assert!(!g.crosses_critical_point(2.0));
        assert!(g.crosses_critical_point(0.5));
    }

    #[test]
    fn block_vectors_respect_sectors() {
        let s = SpinSize::new(3).unwrap();
        let v = definite_parity_block(s, Sector::Even, 3, Parity::Even).unwrap();
        assert_eq!(v.len(), 4);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(definite_parity_block(s, Sector::Even, 3, Parity::Odd).is_err());
        let (vals, vecs) = block_eigensystem(s, &LmgParams::new(0.3, 1.0), Sector::Odd).unwrap();
        assert_eq!(vals.len(), 3);
        assert!((vecs.adjoint() * &vecs - CMatrix::identity(3, 3)).norm() < 1e-12);
    }
}
