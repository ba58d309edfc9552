//! Time evolution of the qudit under a drive schedule.
//!
//! The rotating-frame path steps through piecewise-constant exponentials
//! (one exact exponential per constant stretch). The lab-frame path
//! integrates `H_0 + H_drive(t)` with DOPRI5 and maps back through `R(t)`.
//! Amplitude damping is handled at the density-matrix level.

pub mod ode;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::drive::{DriveSchedule, LabFrame, Sector, TransmonSpec};
use crate::error::{invalid, Error, Result};
use crate::io::CsvTable;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::lmg::BasisMap;
use crate::spin::{BasisTag, SpinState};

use ode::Dopri5Options;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PiecewiseExponential,
    AdaptiveRungeKutta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Rotating,
    Lab,
}

pub const DEFAULT_STEP: f64 = 1e-9;
pub const DEFAULT_LAB_MAX_STEP: f64 = 2e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Piecewise step in seconds. `None` picks the largest step allowed by
    /// the eigenfrequency bound, capped at 1 ns.
    pub step: Option<f64>,
    pub rel_tol: f64,
    /// Largest adaptive step in seconds.
    pub max_step: Option<f64>,
    pub frame: Frame,
    /// Device used by the lab-frame path.
    #[serde(default)]
    pub transmon: TransmonSpec,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: Method::PiecewiseExponential,
            step: None,
            rel_tol: 1e-10,
            max_step: None,
            frame: Frame::Rotating,
            transmon: TransmonSpec::table_s1(),
        }
    }
}

impl PropagatorConfig {
    pub fn lab() -> Self {
        Self {
            method: Method::AdaptiveRungeKutta,
            max_step: Some(DEFAULT_LAB_MAX_STEP),
            frame: Frame::Lab,
            ..Self::default()
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-6).contains(&self.rel_tol) {
            return Err(invalid("rel_tol", "must lie in [1e-13, 1e-6]"));
        }
        if let Some(s) = self.step {
            if !(s > 0.0) || !s.is_finite() {
                return Err(invalid("step", "must be positive"));
            }
        }
        if let Some(s) = self.max_step {
            if !(s > 0.0) {
                return Err(invalid("max_step", "must be positive"));
            }
        }
        if self.frame == Frame::Lab && self.method != Method::AdaptiveRungeKutta {
            return Err(invalid("method", "the lab frame needs the adaptive integrator"));
        }
        Ok(())
    }

    fn ode_options(&self) -> Dopri5Options {
        Dopri5Options {
            rel_tol: self.rel_tol,
            abs_tol: self.rel_tol * 1e-2,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
            ..Dopri5Options::default()
        }
    }
}

/// Amplitude damping `|n> -> |n-1>` on every driven transmon level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub enabled: bool,
    /// `T1` in seconds for transition `n -> n-1`, `n = 1..`.
    #[serde(default)]
    pub t1: Vec<f64>,
}

/// `T1` of the first excited level in the default noise table.
pub const DEFAULT_T1_FIRST: f64 = 60e-6;

impl NoiseModel {
    /// `T1_n = T1_1 / n`, the harmonic-oscillator scaling of the decay rate.
    pub fn default_for(levels: usize) -> Self {
        Self {
            enabled: true,
            t1: (1..levels.max(2)).map(|n| DEFAULT_T1_FIRST / n as f64).collect(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        if self.t1.len() + 1 < dim {
            return Err(invalid("t1", format!("need {} entries, got {}", dim - 1, self.t1.len())));
        }
        if self.t1.iter().any(|t| !(*t > 0.0)) {
            return Err(invalid("t1", "all T1 values must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum StateHistory {
    Pure(Vec<CVector>),
    Mixed(Vec<CMatrix>),
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// Transmon-level populations per time.
    pub populations: Vec<Vec<f64>>,
    pub parity: Vec<f64>,
    pub history: StateHistory,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> Option<&CVector> {
        match &self.history {
            StateHistory::Pure(v) => v.last(),
            StateHistory::Mixed(_) => None,
        }
    }

    pub fn final_density(&self) -> CMatrix {
        match &self.history {
            StateHistory::Pure(v) => {
                let psi = v.last().expect("non-empty trajectory");
                psi * psi.adjoint()
            }
            StateHistory::Mixed(r) => r.last().expect("non-empty trajectory").clone(),
        }
    }

    /// Columns `t_seconds, p_0..p_{d-1}, parity` and optionally `echo`.
    pub fn to_csv(&self, echo: Option<&[f64]>) -> CsvTable {
        let d = self.populations.first().map_or(0, Vec::len);
        let mut header: Vec<String> = vec!["t_seconds".into()];
        header.extend((0..d).map(|n| format!("p_{n}")));
        header.push("parity".into());
        if echo.is_some() {
            header.push("echo".into());
        }
        let refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = CsvTable::new(&refs);
        for (k, time) in self.times.iter().enumerate() {
            let mut row = vec![*time];
            row.extend_from_slice(&self.populations[k]);
            row.push(self.parity[k]);
            if let Some(e) = echo {
                row.push(e[k]);
            }
            t.row(&row);
        }
        t
    }
}

/// Parity sign of each driven level.
pub fn parity_signs(ds: &DriveSchedule) -> Vec<f64> {
    let (first, dim) = ds.sector().block(ds.spin());
    let even = ds.spin().j() as usize + 1;
    (0..dim).map(|n| if first + n < even { 1.0 } else { -1.0 }).collect()
}

/// `sum_n sign_n p_n`.
pub fn parity_expectation(populations: &[f64], signs: &[f64]) -> f64 {
    populations.iter().zip(signs).map(|(p, s)| p * s).sum::<f64>().clamp(-1.0, 1.0)
}

/// Parity expectation for full-spin transmon populations.
pub fn parity_expectation_full(populations: &[f64], map: &BasisMap) -> f64 {
    let even = map.even_levels();
    let signs: Vec<f64> = (0..populations.len()).map(|n| if n < even { 1.0 } else { -1.0 }).collect();
    parity_expectation(populations, &signs)
}

/// `|<psi(0)|psi(t)>|^2` (or `<psi(0)|rho(t)|psi(0)>`) per recorded time.
pub fn loschmidt_echo(initial: &CVector, traj: &TrajectoryRecord) -> Vec<f64> {
    match &traj.history {
        StateHistory::Pure(states) => states
            .iter()
            .map(|s| initial.dotc(s).norm_sqr().clamp(0.0, 1.0))
            .collect(),
        StateHistory::Mixed(rhos) => rhos
            .iter()
            .map(|r| initial.dotc(&(r * initial)).re.clamp(0.0, 1.0))
            .collect(),
    }
}

/// Amplitudes on the driven transmon levels.
pub fn initial_vector(initial: &SpinState, ds: &DriveSchedule) -> Result<CVector> {
    let v = match (initial.basis(), ds.sector()) {
        (BasisTag::TransmonBasis, _) => initial.amplitudes().clone(),
        (BasisTag::JzBasis, Sector::Full) => BasisMap::new(ds.spin()).vector_to_transmon(initial.amplitudes()),
        (BasisTag::JzBasis, _) => return Err(Error::WrongBasis { expected: "transmon" }),
    };
    if v.len() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: ds.dim(),
            got: v.len(),
        });
    }
    Ok(v)
}

fn check_times(times: &[f64], duration: f64) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("times", "need at least one sample time"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "sample times must be ascending"));
    }
    let slack = 1e-12 * duration;
    if times[0] < -slack || *times.last().unwrap() > duration + slack {
        return Err(Error::OutsideSchedule {
            t: if times[0] < 0.0 { times[0] } else { *times.last().unwrap() },
            duration,
        });
    }
    Ok(())
}

/// Largest piecewise step allowed at `[a, b]`: `1 / (32 f_max)` with the
/// eigenfrequency bounded by the Gershgorin radius of `H`.
fn step_bound(ds: &DriveSchedule, a: f64, b: f64) -> Result<f64> {
    let mut radius: f64 = 0.0;
    for t in [a, 0.5 * (a + b), b] {
        let h = ds.rotating_hamiltonian(t)?;
        for r in 0..h.nrows() {
            radius = radius.max(h.row(r).iter().map(|z| z.norm()).sum());
        }
    }
    Ok(if radius == 0.0 { f64::INFINITY } else { TAU / (32.0 * radius) })
}

fn split_at_breakpoints(ds: &DriveSchedule, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![a];
    for bp in ds.schedule().breakpoints() {
        if bp > a && bp < b {
            cuts.push(bp);
        }
    }
    cuts.push(b);
    cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}

/// Advances the columns of `m` from `a` to `b` in the rotating frame.
pub fn advance_piecewise(ds: &DriveSchedule, cfg: &PropagatorConfig, a: f64, b: f64, m: &mut CMatrix) -> Result<()> {
    for (s, e) in split_at_breakpoints(ds, a, b) {
        let mid = 0.5 * (s + e);
        if ds.constant_between(s, e) {
            let u = linalg::expm_hermitian(&ds.rotating_hamiltonian(mid)?, e - s);
            *m = u * &*m;
            continue;
        }
        let bound = step_bound(ds, s, e)?;
        let step = match cfg.step {
            Some(st) if st > bound * (1.0 + 1e-9) => {
                return Err(invalid(
                    "step",
                    format!("{st:e} s exceeds 1/(32 f_max) = {bound:e} s"),
                ))
            }
            Some(st) => st,
            None => DEFAULT_STEP.min(bound),
        };
        let n = ((e - s) / step).ceil().max(1.0) as usize;
        let dt = (e - s) / n as f64;
        for k in 0..n {
            let t = s + (k as f64 + 0.5) * dt;
            let u = linalg::expm_hermitian(&ds.rotating_hamiltonian(t)?, dt);
            *m = u * &*m;
        }
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("propagated state"));
    }
    Ok(())
}

/// Rotating-frame unitary from `a` to `b`.
pub fn propagator(ds: &DriveSchedule, cfg: &PropagatorConfig, a: f64, b: f64) -> Result<CMatrix> {
    cfg.validate()?;
    let mut u = CMatrix::identity(ds.dim(), ds.dim());
    advance_piecewise(ds, cfg, a, b, &mut u)?;
    Ok(u)
}

fn advance_rk_rotating(ds: &DriveSchedule, cfg: &PropagatorConfig, a: f64, b: f64, psi: &mut CVector) -> Result<()> {
    let opts = cfg.ode_options();
    for (s, e) in split_at_breakpoints(ds, a, b) {
        ode::integrate(
            |t, y, out| {
                let h = ds.rotating_hamiltonian(t)?;
                out.copy_from(&((h * y) * c(-1.0) * linalg::I));
                Ok(())
            },
            s,
            e,
            psi,
            &opts,
        )?;
    }
    Ok(())
}

/// Propagates `initial` and records observables at `times`.
pub fn propagate(
    initial: &SpinState,
    ds: &DriveSchedule,
    cfg: &PropagatorConfig,
    noise: Option<&NoiseModel>,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    check_times(times, ds.duration())?;
    let psi0 = initial_vector(initial, ds)?;
    let signs = parity_signs(ds);
    match noise {
        Some(nm) if nm.enabled => {
            if cfg.frame == Frame::Lab {
                return Err(invalid("frame", "decoherence is only modeled in the rotating frame"));
            }
            nm.validate(ds.dim())?;
            propagate_lindblad(&psi0, ds, cfg, nm, times, &signs)
        }
        _ => match cfg.frame {
            Frame::Rotating => propagate_pure(&psi0, ds, cfg, times, &signs),
            Frame::Lab => propagate_lab(&psi0, ds, cfg, times, &signs),
        },
    }
}

fn record_pure(states: Vec<CVector>, times: &[f64], signs: &[f64]) -> TrajectoryRecord {
    let populations: Vec<Vec<f64>> = states.iter().map(linalg::populations).collect();
    let parity = populations.iter().map(|p| parity_expectation(p, signs)).collect();
    TrajectoryRecord {
        times: times.to_vec(),
        populations,
        parity,
        history: StateHistory::Pure(states),
    }
}

fn propagate_pure(psi0: &CVector, ds: &DriveSchedule, cfg: &PropagatorConfig, times: &[f64], signs: &[f64]) -> Result<TrajectoryRecord> {
    let mut psi = CMatrix::from_column_slice(psi0.len(), 1, psi0.as_slice());
    let mut t = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        let target = target.clamp(0.0, ds.duration());
        if target > t {
            match cfg.method {
                Method::PiecewiseExponential => advance_piecewise(ds, cfg, t, target, &mut psi)?,
                Method::AdaptiveRungeKutta => {
                    let mut v = psi.column(0).into_owned();
                    advance_rk_rotating(ds, cfg, t, target, &mut v)?;
                    psi.set_column(0, &v);
                }
            }
            t = target;
        }
        states.push(psi.column(0).into_owned());
    }
    Ok(record_pure(states, times, signs))
}

fn propagate_lab(psi0: &CVector, ds: &DriveSchedule, cfg: &PropagatorConfig, times: &[f64], signs: &[f64]) -> Result<TrajectoryRecord> {
    let lab = LabFrame::new(ds, &cfg.transmon)?;
    let opts = cfg.ode_options();
    let mut psi = lab.to_lab(0.0, psi0)?;
    let mut t = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        let target = target.clamp(0.0, ds.duration());
        for (s, e) in split_at_breakpoints(ds, t, target) {
            ode::integrate(|tt, y, out| lab.apply(tt, y, out), s, e, &mut psi, &opts)?;
        }
        t = t.max(target);
        states.push(lab.to_rotating(target, &psi)?);
    }
    Ok(record_pure(states, times, signs))
}

fn flatten(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn unflatten(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_column_slice(d, d, v.as_slice())
}

/// `d rho / dt` for the rotating-frame Lindblad equation.
fn lindblad_rhs(h: &CMatrix, rates: &[f64], rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let mut out = (h * rho - rho * h) * (-linalg::I);
    for n in 1..d {
        let g = rates[n - 1];
        if g == 0.0 {
            continue;
        }
        // L rho L^dag with L = |n-1><n|
        out[(n - 1, n - 1)] += rho[(n, n)] * g;
        // -1/2 {|n><n|, rho}
        for k in 0..d {
            out[(n, k)] -= rho[(n, k)] * (0.5 * g);
            out[(k, n)] -= rho[(k, n)] * (0.5 * g);
        }
    }
    out
}

fn propagate_lindblad(
    psi0: &CVector,
    ds: &DriveSchedule,
    cfg: &PropagatorConfig,
    noise: &NoiseModel,
    times: &[f64],
    signs: &[f64],
) -> Result<TrajectoryRecord> {
    let d = ds.dim();
    // physical levels of the driven block
    let (first, _) = ds.sector().block(ds.spin());
    let offset = if ds.sector() == Sector::Full { first } else { 0 };
    let rates: Vec<f64> = (1..d).map(|n| 1.0 / noise.t1[offset + n - 1]).collect();
    let opts = Dopri5Options {
        rel_tol: cfg.rel_tol.max(1e-10),
        abs_tol: 1e-12,
        ..Dopri5Options::default()
    };
    let mut y = flatten(&(psi0 * psi0.adjoint()));
    let mut t = 0.0;
    let mut rhos = Vec::with_capacity(times.len());
    for &target in times {
        let target = target.clamp(0.0, ds.duration());
        for (s, e) in split_at_breakpoints(ds, t, target) {
            ode::integrate(
                |tt, v, out| {
                    let h = ds.rotating_hamiltonian(tt)?;
                    out.copy_from(&flatten(&lindblad_rhs(&h, &rates, &unflatten(v, d))));
                    Ok(())
                },
                s,
                e,
                &mut y,
                &opts,
            )?;
        }
        t = t.max(target);
        let rho = unflatten(&y, d);
        rhos.push((&rho + rho.adjoint()) * c(0.5));
    }
    let populations: Vec<Vec<f64>> = rhos
        .iter()
        .map(|r| (0..d).map(|n| r[(n, n)].re).collect())
        .collect();
    let parity = populations.iter().map(|p| parity_expectation(p, signs)).collect();
    Ok(TrajectoryRecord {
        times: times.to_vec(),
        populations,
        parity,
        history: StateHistory::Mixed(rhos),
    })
}

/// Uniform sample grid with `n` points over `[0, t_max]`.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t_max];
    }
    (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect()
}
