//! Quench dynamics: prepare `|j,m>` with adjacent-level pulses, switch the
//! LMG drives on and watch populations, parity and the return probability.

use serde::{Deserialize, Serialize};

use super::{check_spin, default_omega, ProtocolOptions};
use crate::drive::{LmgSchedule, Sector};
use crate::error::{invalid, Result};
use crate::evolve::{self, TrajectoryRecord};
use crate::lmg::LmgParams;
use crate::spin;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DptConfig {
    pub j: u32,
    pub h: f64,
    pub gamma_x: f64,
    /// `J_z` eigenvalue of the initial state.
    pub initial_m: i64,
    pub t_max: f64,
    pub n_points: usize,
    pub omega: f64,
}

impl DptConfig {
    pub fn new(j: u32, h: f64, gamma_x: f64) -> Self {
        Self {
            j,
            h,
            gamma_x,
            initial_m: j as i64,
            t_max: 2e-6,
            n_points: 101,
            omega: default_omega(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DptResult {
    pub trajectory: TrajectoryRecord,
    pub echo: Vec<f64>,
}

impl DptResult {
    pub fn to_csv(&self) -> crate::io::CsvTable {
        self.trajectory.to_csv(Some(&self.echo))
    }
}

pub fn run_dpt(cfg: &DptConfig, opts: &ProtocolOptions) -> Result<DptResult> {
    let s = check_spin(cfg.j)?;
    if cfg.n_points < 2 {
        return Err(invalid("n_points", "need at least two samples"));
    }
    let p = LmgParams::new(cfg.h, cfg.gamma_x).with_omega(cfg.omega);
    p.validate()?;
    // pi pulses land exactly on the level of |j,m>, so the start is the basis state itself
    let initial = spin::jz_eigenstate(s, cfg.initial_m)?;
    let sched = LmgSchedule::constant(p, cfg.t_max)?;
    let ds = super::drive(s, &sched, Sector::Full, opts)?;
    let times = evolve::uniform_times(cfg.t_max, cfg.n_points);
    let psi0 = evolve::initial_vector(&initial, &ds)?;
    let trajectory = evolve::propagate(&initial, &ds, &opts.propagator, opts.noise.as_ref(), &times)?;
    let echo = evolve::loschmidt_echo(&psi0, &trajectory);
    Ok(DptResult { trajectory, echo })
}
