//! Distribution of `J_x` in the LMG ground state, read out one `|j,m>_x`
//! at a time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    block_vector, check_spin, default_omega, definite_parity_block, jz_block, run_schedule, sector_for,
    PreparationSequence, ProtocolOptions, RampParameter, RampSpec,
};
use crate::drive::{LmgSchedule, RampShape, Sector};
use crate::error::{invalid, Result};
use crate::linalg::CVector;
use crate::lmg::BasisMap;
use crate::spin::{jx_eigenstate, Parity, SpinSize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderParameterConfig {
    pub j: u32,
    pub h_over_gx: Vec<f64>,
    #[serde(default)]
    pub doubled: bool,
    /// `h` ramp from 0 used for `h / gamma_x <= 1`.
    pub below_ramp_duration: f64,
    /// `gamma_x` ramp from 0 used for `h / gamma_x > 1`.
    pub above_ramp_duration: f64,
    pub shape: RampShape,
    pub omega: f64,
}

impl OrderParameterConfig {
    pub fn new(j: u32, h_over_gx: Vec<f64>) -> Self {
        Self {
            j,
            h_over_gx,
            doubled: false,
            below_ramp_duration: 2e-6,
            above_ramp_duration: 200e-9,
            shape: RampShape::RaisedCosine,
            omega: default_omega(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderDistribution {
    pub h_over_gx: f64,
    /// `m = j, j-1, ..., -j`.
    pub m_values: Vec<i64>,
    pub probabilities: Vec<f64>,
}

impl OrderDistribution {
    /// Most probable positive `m` (ties to the larger `m`).
    pub fn positive_peak(&self) -> i64 {
        let mut best = (f64::MIN, 0);
        for (m, p) in self.m_values.iter().zip(&self.probabilities) {
            if *m >= 0 && *p > best.0 + 1e-12 {
                best = (*p, *m);
            }
        }
        best.1
    }
}

/// `j sin(theta_0)` with `cos(theta_0) = h / gamma_x`: where the classical
/// minima sit on the `J_x` axis.
pub fn classical_order_peak(j: f64, h_over_gx: f64) -> f64 {
    j * h_over_gx.min(1.0).acos().sin()
}

/// Readout target for `|j,m>_x`. In doubled mode it is the even projection
/// `P_e |j,m>_x / sqrt(N)` together with `N`.
fn readout_target(spin: SpinSize, sector: Sector, m: i64) -> Result<(CVector, f64)> {
    let x = jx_eigenstate(spin, m)?;
    if sector == Sector::Full {
        return Ok((block_vector(spin, sector, &x)?, 1.0));
    }
    let full = BasisMap::new(spin).vector_to_transmon(x.amplitudes());
    let (first, dim) = sector.block(spin);
    let proj = full.rows(first, dim).into_owned();
    let norm = proj.norm_squared();
    // N is 1/2 for m != 0 and 1 for m = 0, since |j,0>_x is always even
    if norm < 1e-12 {
        return Err(invalid("m", format!("|j,{m}>_x has no even component")));
    }
    Ok((proj / crate::linalg::c(norm.sqrt()), norm))
}

pub fn run_order_parameter(cfg: &OrderParameterConfig, opts: &ProtocolOptions) -> Result<Vec<OrderDistribution>> {
    let spin = check_spin(cfg.j)?;
    if cfg.h_over_gx.iter().any(|h| !(*h >= 0.0)) {
        return Err(invalid("h_over_gx", "must be non-negative"));
    }
    let sector = sector_for(cfg.doubled);
    let j = spin.j() as i64;
    let targets: Vec<(i64, PreparationSequence, f64)> = (-j..=j)
        .rev()
        .map(|m| {
            let (v, n) = readout_target(spin, sector, m)?;
            Ok((m, PreparationSequence::to_state(&v)?, n))
        })
        .collect::<Result<_>>()?;
    cfg.h_over_gx
        .par_iter()
        .map(|&r| {
            let (start, ramp) = if r <= 1.0 {
                (
                    definite_parity_block(spin, sector, spin.j(), Parity::Even)?,
                    RampSpec {
                        parameter: RampParameter::H,
                        start: 0.0,
                        end: r,
                        duration: cfg.below_ramp_duration,
                        shape: cfg.shape,
                        omega_during_ramp: cfg.omega,
                    },
                )
            } else {
                (
                    jz_block(spin, sector, j)?,
                    RampSpec {
                        parameter: RampParameter::GammaX,
                        start: 0.0,
                        end: 1.0,
                        duration: cfg.above_ramp_duration,
                        shape: cfg.shape,
                        omega_during_ramp: cfg.omega,
                    },
                )
            };
            let other = if r <= 1.0 { 1.0 } else { r };
            let sched = LmgSchedule::new(vec![ramp.segment(other)])?;
            let fin = run_schedule(spin, &sched, sector, &start, opts)?;
            let probabilities = targets
                .iter()
                .map(|(_, seq, n)| n * fin.readout(seq))
                .collect();
            Ok(OrderDistribution {
                h_over_gx: r,
                m_values: targets.iter().map(|t| t.0).collect(),
                probabilities,
            })
        })
        .collect()
}
