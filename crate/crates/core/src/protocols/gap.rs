//! Ramsey measurement of a gap: prepare an equal superposition of two LMG
//! eigenstates, let it precess for `delta_t` and read the oscillation
//! frequency off the Fourier transform.

use serde::{Deserialize, Serialize};

use super::spectrum::{extract_peak, SpectrumEstimate};
use super::{
    check_spin, default_omega, definite_parity_block, equal_superposition, jz_block,
    run_schedule, schedule_unitary, FinalState, PreparationSequence, ProtocolOptions, RampParameter, RampSpec,
};
use crate::drive::{Couplings, LmgSchedule, RampShape, Segment, Sector};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, CVector};
use crate::lmg::{self, GapKind, LmgParams};
use crate::spin::{Parity, SpinSize};

pub const DEFAULT_BELOW_RAMP: f64 = 2e-6;
pub const DEFAULT_ABOVE_RAMP: f64 = 200e-9;
pub const DEFAULT_POINTS: usize = 64;
/// Periods of the expected gap covered by the default `delta_t` grid.
pub const DEFAULT_PERIODS: f64 = 4.0;
/// Longest default `delta_t` span. Deep in the broken phase the even-odd gap
/// is exponentially small and needs tens of milliseconds; a closed gap gets
/// the full span and a flat trace.
pub const MAX_SPAN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RamseyGap {
    EvenOdd,
    EvenEven,
}

impl RamseyGap {
    pub fn lmg_kind(self) -> GapKind {
        match self {
            RamseyGap::EvenOdd => GapKind::EvenOdd,
            RamseyGap::EvenEven => GapKind::EvenEven,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preparation {
    /// Pulses into eigenstates of the ramp's starting point, then ramps.
    #[default]
    Adiabatic,
    /// Exact eigenstates of the hold Hamiltonian, no ramps.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRamseyConfig {
    pub j: u32,
    /// Hold couplings.
    pub h: f64,
    pub gamma_x: f64,
    pub kind: RamseyGap,
    /// Ramp into the hold point; reversed afterwards. `None` holds directly.
    pub ramp: Option<RampSpec>,
    pub delta_ts: Vec<f64>,
    /// `Omega / 2 pi` during the hold, Hz.
    pub omega_hold: f64,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub allow_critical_crossing: bool,
}

/// The paper's protocol for `h / gamma_x` on either side of the critical
/// point, with `gamma_x = 1` and a `delta_t` grid sized from the exact gap.
impl GapRamseyConfig {
    pub fn standard(j: u32, h_over_gx: f64, kind: RamseyGap) -> Result<Self> {
        let spin = check_spin(j)?;
        if !(h_over_gx >= 0.0) || !h_over_gx.is_finite() {
            return Err(invalid("h_over_gx", "must be finite and non-negative"));
        }
        let omega = default_omega();
        let ramp = if h_over_gx <= 1.0 {
            RampSpec {
                parameter: RampParameter::H,
                start: 0.0,
                end: h_over_gx,
                duration: DEFAULT_BELOW_RAMP,
                shape: RampShape::RaisedCosine,
                omega_during_ramp: omega,
            }
        } else {
            RampSpec {
                parameter: RampParameter::GammaX,
                start: 0.0,
                end: 1.0,
                duration: DEFAULT_ABOVE_RAMP,
                shape: RampShape::RaisedCosine,
                omega_during_ramp: omega,
            }
        };
        let gap = lmg::sector_gap(spin, &LmgParams::new(h_over_gx, 1.0), kind.lmg_kind())?;
        Ok(Self {
            j,
            h: h_over_gx,
            gamma_x: 1.0,
            kind,
            ramp: Some(ramp),
            delta_ts: default_delta_ts(gap, omega),
            omega_hold: omega,
            preparation: Preparation::Adiabatic,
            allow_critical_crossing: false,
        })
    }

    pub fn target(&self) -> Couplings {
        Couplings::new(self.h, self.gamma_x)
    }

    /// The coupling held fixed during the ramp.
    fn ramp_other(&self, ramp: &RampSpec) -> f64 {
        match ramp.parameter {
            RampParameter::H => self.gamma_x,
            RampParameter::GammaX => self.h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_spin(self.j)?;
        if !(self.omega_hold > 0.0) {
            return Err(invalid("omega_hold", "must be positive"));
        }
        if self.delta_ts.iter().any(|t| !(*t >= 0.0)) {
            return Err(invalid("delta_ts", "hold times must be non-negative"));
        }
        if let Some(r) = &self.ramp {
            r.validate()?;
            let other = self.ramp_other(r);
            let (_, end) = r.endpoints(other);
            if (end.h - self.h).abs() > 1e-12 || (end.gamma_x - self.gamma_x).abs() > 1e-12 {
                return Err(invalid("ramp", "must end at the hold couplings"));
            }
            if r.crosses_critical_point(other) && !self.allow_critical_crossing {
                let (a, b) = r.endpoints(other);
                let ratio = |c: Couplings| if c.gamma_x == 0.0 { f64::INFINITY } else { c.h / c.gamma_x };
                return Err(Error::RampCrossesCriticalPoint { from: ratio(a), to: ratio(b) });
            }
        }
        Ok(())
    }
}

/// `DEFAULT_POINTS` hold times covering `DEFAULT_PERIODS` periods of a gap
/// given in units of `Omega`.
pub fn default_delta_ts(gap_over_omega: f64, omega_hold: f64) -> Vec<f64> {
    delta_t_grid(gap_over_omega, omega_hold, DEFAULT_PERIODS, DEFAULT_POINTS)
}

/// `n` hold times `k * span / n` with `span` covering `periods` periods,
/// capped at `MAX_SPAN`.
pub fn delta_t_grid(gap_over_omega: f64, omega_hold: f64, periods: f64, n: usize) -> Vec<f64> {
    let f = gap_over_omega.abs() * omega_hold;
    let span = if f > 0.0 { (periods / f).min(MAX_SPAN) } else { MAX_SPAN };
    (0..n).map(|k| span * k as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyResult {
    pub delta_ts: Vec<f64>,
    /// Level-0 population after undoing the preparation.
    pub signal: Vec<f64>,
    pub spectrum: SpectrumEstimate,
    /// Zero when the trace shows no oscillation.
    pub gap_hz: f64,
    pub gap_over_omega: f64,
    pub bin_over_omega: f64,
    /// Periods of the measured tone inside the sampled span. Below one, the
    /// peak is leakage or aliasing rather than the gap.
    pub periods: f64,
}

impl RamseyResult {
    pub fn resolved(&self) -> bool {
        self.periods >= 1.0
    }
}

/// Everything a Ramsey trace needs, independent of how the states were
/// chosen.
pub(crate) struct RamseySetup {
    pub spin: SpinSize,
    pub sector: Sector,
    pub psi0: CVector,
    pub ramp: Option<(RampSpec, f64)>,
    pub target: Couplings,
    pub omega_hold: f64,
}

pub(crate) fn ramsey_signal(setup: &RamseySetup, delta_ts: &[f64], opts: &ProtocolOptions) -> Result<Vec<f64>> {
    let prep = PreparationSequence::to_state(&setup.psi0)?;
    let longest = delta_ts.iter().cloned().fold(0.0, f64::max);
    let hold = |dt: f64| Segment::hold(setup.target, dt, setup.omega_hold);
    let up = setup.ramp.map(|(r, other)| r.segment(other));
    let down = setup.ramp.map(|(r, other)| r.reversed_segment(other));

    if opts.noise.as_ref().is_some_and(|n| n.enabled) {
        return delta_ts
            .iter()
            .map(|&dt| {
                let mut segs: Vec<Segment> = up.iter().cloned().collect();
                if dt > 0.0 {
                    segs.push(hold(dt));
                }
                segs.extend(down.iter().cloned());
                if segs.is_empty() {
                    return Ok(1.0);
                }
                let sched = LmgSchedule::new(segs)?;
                Ok(run_schedule(setup.spin, &sched, setup.sector, &setup.psi0, opts)?.readout(&prep))
            })
            .collect();
    }

    let start = match &up {
        Some(seg) => schedule_unitary(setup.spin, &LmgSchedule::new(vec![*seg])?, setup.sector, opts)? * &setup.psi0,
        None => setup.psi0.clone(),
    };
    let u_down = match &down {
        Some(seg) => Some(schedule_unitary(setup.spin, &LmgSchedule::new(vec![*seg])?, setup.sector, opts)?),
        None => None,
    };
    // the hold is constant, so one diagonalization serves every delta_t
    let hold_sched = LmgSchedule::new(vec![hold(longest.max(1e-9))])?;
    let ds = super::drive(setup.spin, &hold_sched, setup.sector, opts)?;
    let (vals, vecs) = linalg::eigh(&ds.rotating_hamiltonian(0.0)?);
    delta_ts
        .iter()
        .map(|&dt| {
            let mut psi = linalg::apply_expm(&vals, &vecs, &start, dt);
            if let Some(u) = &u_down {
                psi = u * psi;
            }
            Ok(FinalState::Pure(psi).readout(&prep))
        })
        .collect()
}

fn initial_superposition(cfg: &GapRamseyConfig, spin: SpinSize) -> Result<CVector> {
    let j = spin.j();
    let sector = Sector::Full;
    if cfg.preparation == Preparation::Oracle {
        let spec = lmg::spectrum(spin, &LmgParams::new(cfg.h, cfg.gamma_x), lmg::Basis::Transmon)?;
        let even = spec.sector_state(Parity::Even, 0)?;
        let other = match cfg.kind {
            RamseyGap::EvenOdd => spec.sector_state(Parity::Odd, 0)?,
            RamseyGap::EvenEven => spec.sector_state(Parity::Even, 1)?,
        };
        return equal_superposition(&even, &other);
    }
    // the starting point of the ramp decides which states are eigenstates
    let start = match &cfg.ramp {
        Some(r) => r.endpoints(cfg.ramp_other(r)).0,
        None => cfg.target(),
    };
    let broken = start.gamma_x > 0.0 && start.h < start.gamma_x;
    if broken {
        let a = definite_parity_block(spin, sector, j, Parity::Even)?;
        let b = match cfg.kind {
            RamseyGap::EvenOdd => definite_parity_block(spin, sector, j, Parity::Odd)?,
            RamseyGap::EvenEven => definite_parity_block(spin, sector, j - 1, Parity::Even)?,
        };
        equal_superposition(&a, &b)
    } else {
        let a = jz_block(spin, sector, j as i64)?;
        let b = match cfg.kind {
            RamseyGap::EvenOdd => jz_block(spin, sector, j as i64 - 1)?,
            RamseyGap::EvenEven => jz_block(spin, sector, j as i64 - 2)?,
        };
        equal_superposition(&a, &b)
    }
}

pub(crate) fn analyze(delta_ts: &[f64], signal: Vec<f64>, omega_hold: f64, opts: &ProtocolOptions) -> Result<RamseyResult> {
    let spectrum = extract_peak(&signal, delta_ts, &opts.peak)?;
    let gap_hz = spectrum.peak_freq().unwrap_or(0.0);
    let n = delta_ts.len();
    let span = (delta_ts[n - 1] - delta_ts[0]) * n as f64 / (n - 1) as f64;
    Ok(RamseyResult {
        periods: gap_hz * span,
        delta_ts: delta_ts.to_vec(),
        signal,
        gap_over_omega: gap_hz / omega_hold,
        bin_over_omega: spectrum.bin_width / omega_hold,
        gap_hz,
        spectrum,
    })
}

pub fn run_gap_ramsey(cfg: &GapRamseyConfig, opts: &ProtocolOptions) -> Result<RamseyResult> {
    cfg.validate()?;
    let spin = check_spin(cfg.j)?;
    let psi0 = initial_superposition(cfg, spin)?;
    let ramp = match cfg.preparation {
        Preparation::Oracle => None,
        Preparation::Adiabatic => cfg.ramp.map(|r| (r, cfg.ramp_other(&r))),
    };
    let setup = RamseySetup {
        spin,
        sector: Sector::Full,
        psi0,
        ramp,
        target: cfg.target(),
        omega_hold: cfg.omega_hold,
    };
    let signal = ramsey_signal(&setup, &cfg.delta_ts, opts)?;
    analyze(&cfg.delta_ts, signal, cfg.omega_hold, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub h_over_gx: f64,
    pub peaks: usize,
    pub gap_over_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSweep {
    pub points: Vec<SweepPoint>,
    /// First `h / gamma_x` whose spectrum shows two or more strong peaks.
    pub onset: Option<f64>,
}

/// Runs the broken-phase protocol (ramping `h` up from 0) over `grid`,
/// deliberately allowing the ramp to cross the critical point, and reports
/// where multi-peak spectra begin.
pub fn critical_sweep(j: u32, kind: RamseyGap, grid: &[f64], opts: &ProtocolOptions) -> Result<CriticalSweep> {
    use rayon::prelude::*;
    let points: Vec<SweepPoint> = grid
        .par_iter()
        .map(|&h| {
            let mut cfg = GapRamseyConfig::standard(j, h.min(1.0), kind)?;
            cfg.h = h;
            if let Some(r) = cfg.ramp.as_mut() {
                r.end = h;
            }
            let gap = lmg::sector_gap(check_spin(j)?, &LmgParams::new(h, 1.0), kind.lmg_kind())?;
            cfg.delta_ts = default_delta_ts(gap, cfg.omega_hold);
            cfg.allow_critical_crossing = true;
            let r = run_gap_ramsey(&cfg, opts)?;
            Ok(SweepPoint {
                h_over_gx: h,
                peaks: r.spectrum.peaks.len(),
                gap_over_omega: r.gap_over_omega,
            })
        })
        .collect::<Result<_>>()?;
    let onset = points.iter().find(|p| p.peaks >= 2).map(|p| p.h_over_gx);
    Ok(CriticalSweep { points, onset })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(j: u32, h: f64, kind: RamseyGap) -> f64 {
        lmg::sector_gap(SpinSize::new(j).unwrap(), &LmgParams::new(h, 1.0), kind.lmg_kind()).unwrap()
    }

    #[test]
    fn even_even_gap_below_critical_point() {
        let cfg = GapRamseyConfig::standard(4, 0.6, RamseyGap::EvenEven).unwrap();
        let r = run_gap_ramsey(&cfg, &ProtocolOptions::default()).unwrap();
        let want = oracle(4, 0.6, RamseyGap::EvenEven);
        assert!((r.gap_over_omega - want).abs() <= r.bin_over_omega, "{} vs {want}", r.gap_over_omega);
        assert!(r.signal.iter().all(|s| (0.0..=1.0 + 1e-12).contains(s)));
    }

    #[test]
    fn sub_period_gaps_are_flagged() {
        // the h = 0.05 gap is ~1e-9 Omega, far below one period of any grid
        let opts = ProtocolOptions::default();
        let deep = run_gap_ramsey(&GapRamseyConfig::standard(4, 0.05, RamseyGap::EvenOdd).unwrap(), &opts).unwrap();
        assert!(!deep.resolved(), "{} periods", deep.periods);
        let r = run_gap_ramsey(&GapRamseyConfig::standard(4, 0.2, RamseyGap::EvenOdd).unwrap(), &opts).unwrap();
        assert!(r.resolved() && r.periods > 3.0, "{} periods", r.periods);
    }

    #[test]
    fn zeeman_splitting_without_ramp() {
        for h in [0.5, 1.3] {
            let mut cfg = GapRamseyConfig::standard(2, 2.0, RamseyGap::EvenOdd).unwrap();
            cfg.h = h;
            cfg.gamma_x = 0.0;
            cfg.ramp = None;
            cfg.delta_ts = default_delta_ts(h, cfg.omega_hold);
            let r = run_gap_ramsey(&cfg, &ProtocolOptions::default()).unwrap();
            assert!((r.gap_hz - h * cfg.omega_hold).abs() <= r.spectrum.bin_width);
        }
    }

    #[test]
    fn crossing_ramp_rejected_unless_allowed() {
        let mut cfg = GapRamseyConfig::standard(2, 1.0, RamseyGap::EvenEven).unwrap();
        cfg.h = 1.5;
        // fast enough that the passage through the minimum gap is diabatic
        let ramp = cfg.ramp.as_mut().unwrap();
        ramp.end = 1.5;
        ramp.duration = 200e-9;
        assert!(matches!(run_gap_ramsey(&cfg, &ProtocolOptions::default()), Err(Error::RampCrossesCriticalPoint { .. })));
        cfg.allow_critical_crossing = true;
        cfg.delta_ts = default_delta_ts(oracle(2, 1.5, RamseyGap::EvenEven), cfg.omega_hold);
        let r = run_gap_ramsey(&cfg, &ProtocolOptions::default()).unwrap();
        assert!(r.spectrum.peaks.len() >= 2, "{:?}", r.spectrum.peaks);
    }

    #[test]
    fn oracle_preparation_gives_pure_tone() {
        let mut cfg = GapRamseyConfig::standard(3, 0.4, RamseyGap::EvenEven).unwrap();
        cfg.preparation = Preparation::Oracle;
        let r = run_gap_ramsey(&cfg, &ProtocolOptions::default()).unwrap();
        let w = oracle(3, 0.4, RamseyGap::EvenEven) * std::f64::consts::TAU * cfg.omega_hold;
        for (t, s) in r.delta_ts.iter().zip(&r.signal) {
            assert!((s - 0.5 * (1.0 + (w * t).cos())).abs() < 1e-8);
        }
    }
}
