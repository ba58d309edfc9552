//! Kibble-Zurek-like quench: prepare the `h = 2` ground state, ramp `h` to
//! 0 over `T` and measure how much population ends in the `h = 0` ground
//! state.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_spin, default_omega, definite_parity_block, jz_block, run_schedule, schedule_unitary, sector_for};
use super::{block_eigensystem, FinalState, PreparationSequence, ProtocolOptions, RampParameter, RampSpec};
use crate::drive::{Couplings, LmgSchedule, RampShape, Segment};
use crate::error::{invalid, Result};
use crate::lmg::LmgParams;
use crate::spin::Parity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KibbleZurekConfig {
    pub j: u32,
    /// Quench durations `T` in seconds.
    pub ramp_times: Vec<f64>,
    /// Simulate spin `j` inside its even sector only.
    #[serde(default)]
    pub doubled: bool,
    /// `gamma_x` ramp at fixed `h_start` that prepares the initial ground state.
    pub preparation: RampSpec,
    pub h_start: f64,
    pub h_end: f64,
    pub quench_shape: RampShape,
    /// `Omega / 2 pi` during the quench, Hz.
    pub omega: f64,
}

impl KibbleZurekConfig {
    pub fn new(j: u32) -> Self {
        let omega = default_omega();
        Self {
            j,
            ramp_times: log_ramp_times(1e-9, 50e-6, 16),
            doubled: false,
            preparation: RampSpec {
                parameter: RampParameter::GammaX,
                start: 0.0,
                end: 1.0,
                duration: 1e-6,
                shape: RampShape::RaisedCosine,
                omega_during_ramp: omega,
            },
            h_start: 2.0,
            h_end: 0.0,
            quench_shape: RampShape::RaisedCosine,
            omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_spin(self.j)?;
        self.preparation.validate()?;
        if self.preparation.parameter != RampParameter::GammaX {
            return Err(invalid("preparation", "must ramp gamma_x"));
        }
        if self.ramp_times.is_empty() || self.ramp_times.iter().any(|t| !(*t > 0.0)) {
            return Err(invalid("ramp_times", "need positive quench durations"));
        }
        if !(self.omega > 0.0) {
            return Err(invalid("omega", "must be positive"));
        }
        Ok(())
    }

    fn gamma_x(&self) -> f64 {
        self.preparation.end
    }
}

/// `n` logarithmically spaced durations from `lo` to `hi`.
pub fn log_ramp_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KzPoint {
    pub ramp_time: f64,
    /// `2 pi / (Omega T)`.
    pub ramp_speed: f64,
    pub ground_population: f64,
}

pub fn run_kibble_zurek(cfg: &KibbleZurekConfig, opts: &ProtocolOptions) -> Result<Vec<KzPoint>> {
    cfg.validate()?;
    let spin = check_spin(cfg.j)?;
    let sector = sector_for(cfg.doubled);
    let start = jz_block(spin, sector, spin.j() as i64)?;
    let target = definite_parity_block(spin, sector, spin.j(), Parity::Even)?;
    let readout = PreparationSequence::to_state(&target)?;
    let prep_seg = cfg.preparation.segment(cfg.h_start);
    let g = cfg.gamma_x();
    let quench = |t: f64| {
        Segment::ramp(
            Couplings::new(cfg.h_start, g),
            Couplings::new(cfg.h_end, g),
            t,
            cfg.quench_shape,
            cfg.omega,
        )
    };
    let noisy = opts.noise.as_ref().is_some_and(|n| n.enabled);
    // the preparation is shared by every quench when the dynamics is pure
    let prepared = if noisy {
        None
    } else {
        Some(schedule_unitary(spin, &LmgSchedule::new(vec![prep_seg])?, sector, opts)? * &start)
    };
    cfg.ramp_times
        .par_iter()
        .map(|&t| {
            let fin = match &prepared {
                Some(psi) => run_schedule(spin, &LmgSchedule::new(vec![quench(t)])?, sector, psi, opts)?,
                None => run_schedule(spin, &LmgSchedule::new(vec![prep_seg, quench(t)])?, sector, &start, opts)?,
            };
            Ok(KzPoint {
                ramp_time: t,
                ramp_speed: 1.0 / (cfg.omega * t),
                ground_population: readout_population(&fin, &readout),
            })
        })
        .collect()
}

fn readout_population(fin: &FinalState, readout: &PreparationSequence) -> f64 {
    fin.readout(readout).clamp(0.0, 1.0)
}

/// Sudden-quench limit `|<gs(h_start)|gs(h_end)>|^2` from diagonalization.
pub fn kz_fast_limit(cfg: &KibbleZurekConfig) -> Result<f64> {
    let spin = check_spin(cfg.j)?;
    let sector = sector_for(cfg.doubled);
    let g = cfg.gamma_x();
    let (_, a) = block_eigensystem(spin, &LmgParams::new(cfg.h_start, g), sector)?;
    let (_, b) = block_eigensystem(spin, &LmgParams::new(cfg.h_end, g), sector)?;
    // the ground state at h = 0 is doubly degenerate in the full space;
    // the even member is the one reached by parity-preserving dynamics
    let even_ground = |vecs: &crate::linalg::CMatrix| -> Result<crate::linalg::CVector> {
        let (first, _) = sector.block(spin);
        let even = spin.j() as usize + 1;
        for col in vecs.column_iter() {
            let w: f64 = (0..col.len()).filter(|&n| first + n < even).map(|n| col[n].norm_sqr()).sum();
            if w > 0.5 {
                return Ok(col.into_owned());
            }
        }
        Err(invalid("spectrum", "no even eigenvector found"))
    };
    let (ga, gb) = (even_ground(&a)?, even_ground(&b)?);
    Ok(ga.dotc(&gb).norm_sqr())
}
