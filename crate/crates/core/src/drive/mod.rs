//! From LMG parameters to per-transition drives.
//!
//! In the rotating frame the qudit sees
//! `H = sum_n Delta_n |n><n| + sum_n (Omega_n |n-1><n| + h.c.)`, where the
//! detunings and couplings are read off the transmon-basis `H_LMG * Omega`.

mod schedule;
mod transmon;
mod waveform;

pub use schedule::{Couplings, LmgSchedule, RampShape, Segment};
pub use transmon::{TransmonSpec, TABLE_S1_GHZ};
pub use waveform::{
    lab_frame_hamiltonian, rotating_frame_from_lab, synthesize_lab_waveforms, EndOfPulseUpdate,
    IqWaveform, LabFrame, WaveformManifest,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, CMatrix};
use crate::lmg::{self, BasisMap, LmgParams};
use crate::spin::{Parity, SpinSize};

/// Which part of the transmon-basis Hamiltonian is driven.
///
/// `Even` and `Odd` place one parity block on the lowest transmon levels,
/// which is how a larger effective spin fits on the same device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    #[default]
    Full,
    Even,
    Odd,
}

impl Sector {
    pub fn from_parity(p: Parity) -> Self {
        match p {
            Parity::Even => Sector::Even,
            Parity::Odd => Sector::Odd,
        }
    }

    /// First transmon-basis level and the block size for spin `j`.
    pub fn block(self, spin: SpinSize) -> (usize, usize) {
        let e = spin.j() as usize + 1;
        match self {
            Sector::Full => (0, spin.dim()),
            Sector::Even => (0, e),
            Sector::Odd => (e, spin.dim() - e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveOptions {
    /// Largest allowed `|Omega_n|` as a fraction of `|anharmonicity|`.
    pub rwa_fraction: f64,
    /// `|alpha| / 2 pi` in Hz.
    pub anharmonicity: f64,
    /// Waveform sample rate in samples per second.
    pub sample_rate: f64,
}

impl Default for DriveOptions {
    fn default() -> Self {
        Self {
            rwa_fraction: 0.1,
            anharmonicity: 104e6,
            sample_rate: 64e9,
        }
    }
}

impl DriveOptions {
    pub fn for_transmon(spec: &TransmonSpec) -> Self {
        Self {
            anharmonicity: spec.anharmonicity().abs(),
            ..Self::default()
        }
    }
}

/// Per-transition drive description for a full protocol schedule.
#[derive(Debug, Clone)]
pub struct DriveSchedule {
    spin: SpinSize,
    sector: Sector,
    dim: usize,
    schedule: LmgSchedule,
    /// Diagonal of `H_LMG / Omega` per unit of (h, gamma_x, gamma_y).
    diag: [Vec<f64>; 3],
    /// Entry `(n-1, n)` per unit coupling; index 0 unused.
    off: [Vec<f64>; 3],
    phase_at_start: Vec<Vec<f64>>,
    zeta_at_start: Vec<Vec<f64>>,
    options: DriveOptions,
}

/// Translates an LMG schedule into the drive schedule on the transmon.
pub fn lmg_to_drive(
    spin: SpinSize,
    schedule: &LmgSchedule,
    sector: Sector,
    options: DriveOptions,
) -> Result<DriveSchedule> {
    if !(options.rwa_fraction > 0.0) || !(options.anharmonicity > 0.0) {
        return Err(invalid("rwa_fraction", "RWA guard parameters must be positive"));
    }
    let (first, dim) = sector.block(spin);
    let map = BasisMap::new(spin);
    let unit = |k: usize| {
        let mut p = LmgParams::new(0.0, 0.0);
        match k {
            0 => p.h = 1.0,
            1 => p.gamma_x = 1.0,
            _ => p.gamma_y = 1.0,
        }
        map.matrix_to_transmon(&lmg::build_lmg_real(spin, &p))
    };
    let mut diag: [Vec<f64>; 3] = Default::default();
    let mut off: [Vec<f64>; 3] = Default::default();
    for k in 0..3 {
        let m = unit(k);
        diag[k] = (0..dim).map(|n| m[(first + n, first + n)]).collect();
        off[k] = (0..dim)
            .map(|n| if n == 0 { 0.0 } else { m[(first + n - 1, first + n)] })
            .collect();
    }
    let mut ds = DriveSchedule {
        spin,
        sector,
        dim,
        schedule: schedule.clone(),
        diag,
        off,
        phase_at_start: Vec::new(),
        zeta_at_start: Vec::new(),
        options,
    };
    ds.precompute_phases();
    ds.check_rwa()?;
    Ok(ds)
}

impl DriveSchedule {
    pub fn spin(&self) -> SpinSize {
        self.spin
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn schedule(&self) -> &LmgSchedule {
        &self.schedule
    }

    pub fn options(&self) -> &DriveOptions {
        &self.options
    }

    pub fn duration(&self) -> f64 {
        self.schedule.duration()
    }

    fn diag_per_omega(&self, cpl: &Couplings, n: usize) -> f64 {
        let a = cpl.as_array();
        (0..3).map(|k| self.diag[k][n] * a[k]).sum()
    }

    fn off_per_omega(&self, cpl: &Couplings, n: usize) -> f64 {
        let a = cpl.as_array();
        (0..3).map(|k| self.off[k][n] * a[k]).sum()
    }

    fn delta_coeff(&self, k: usize, n: usize) -> f64 {
        self.diag[k][n] - self.diag[k][n - 1]
    }

    fn precompute_phases(&mut self) {
        let segs = self.schedule.segments().to_vec();
        let mut phase = vec![0.0; self.dim];
        let mut zeta = vec![0.0; self.dim];
        for (k, seg) in segs.iter().enumerate() {
            let t0 = self.schedule.segment_start(k);
            if k > 0 {
                // detuning jumps at a segment boundary enter zeta as t_b * jump
                let prev = &segs[k - 1];
                for n in 1..self.dim {
                    let before = prev.omega() * self.delta_at(&prev.end, n);
                    let after = seg.omega() * self.delta_at(&seg.start, n);
                    zeta[n] += t0 * (after - before);
                }
            }
            self.phase_at_start.push(phase.clone());
            self.zeta_at_start.push(zeta.clone());
            let integrals = seg.coupling_integrals(seg.duration);
            let moments = seg.moment_of_change(t0, seg.duration);
            for n in 0..self.dim {
                phase[n] += seg.omega() * (0..3).map(|p| self.diag[p][n] * integrals[p]).sum::<f64>();
                if n > 0 {
                    zeta[n] += seg.omega()
                        * (0..3).map(|p| self.delta_coeff(p, n) * moments[p]).sum::<f64>();
                }
            }
        }
    }

    fn delta_at(&self, cpl: &Couplings, n: usize) -> f64 {
        self.diag_per_omega(cpl, n) - self.diag_per_omega(cpl, n - 1)
    }

    fn check_rwa(&self) -> Result<()> {
        let limit = self.options.rwa_fraction * self.options.anharmonicity;
        for seg in self.schedule.segments() {
            // couplings are convex combinations of the end points
            for cpl in [seg.start, seg.end] {
                for n in 1..self.dim {
                    let amp = seg.omega_over_2pi * self.off_per_omega(&cpl, n).abs();
                    if amp > limit * (1.0 + 1e-12) {
                        return Err(Error::RwaViolation {
                            transition: n,
                            amplitude_hz: amp,
                            limit_hz: limit,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `Omega(t)` in rad/s.
    pub fn omega_at(&self, t: f64) -> Result<f64> {
        let (k, _) = self.schedule.locate(t)?;
        Ok(self.schedule.segments()[k].omega())
    }

    /// `Delta_n(t)` in rad/s, `n = 0..dim`.
    pub fn detunings(&self, t: f64) -> Result<Vec<f64>> {
        let (k, tau) = self.schedule.locate(t)?;
        let seg = &self.schedule.segments()[k];
        let cpl = seg.couplings_at(tau);
        Ok((0..self.dim)
            .map(|n| seg.omega() * self.diag_per_omega(&cpl, n))
            .collect())
    }

    /// `Omega_n(t)` in rad/s; index 0 is always zero.
    pub fn amplitudes(&self, t: f64) -> Result<Vec<Complex64>> {
        let (k, tau) = self.schedule.locate(t)?;
        let seg = &self.schedule.segments()[k];
        let cpl = seg.couplings_at(tau);
        Ok((0..self.dim)
            .map(|n| c(seg.omega() * self.off_per_omega(&cpl, n)))
            .collect())
    }

    /// `A_n(t) = int_0^t Delta_n`, closed form.
    pub fn accumulated_phases(&self, t: f64) -> Result<Vec<f64>> {
        let (k, tau) = self.schedule.locate(t)?;
        let seg = &self.schedule.segments()[k];
        let integrals = seg.coupling_integrals(tau);
        Ok((0..self.dim)
            .map(|n| {
                self.phase_at_start[k][n]
                    + seg.omega() * (0..3).map(|p| self.diag[p][n] * integrals[p]).sum::<f64>()
            })
            .collect())
    }

    /// `zeta_n(t) = (Delta_n - Delta_{n-1}) t - (A_n - A_{n-1})`, evaluated as
    /// `int_0^t s d/ds (Delta_n - Delta_{n-1}) ds` so that it vanishes
    /// identically for constant detunings. Index 0 is zero.
    pub fn zeta(&self, t: f64) -> Result<Vec<f64>> {
        let (k, tau) = self.schedule.locate(t)?;
        let seg = &self.schedule.segments()[k];
        let t0 = self.schedule.segment_start(k);
        let moments = seg.moment_of_change(t0, tau);
        Ok((0..self.dim)
            .map(|n| {
                if n == 0 {
                    return 0.0;
                }
                self.zeta_at_start[k][n]
                    + seg.omega() * (0..3).map(|p| self.delta_coeff(p, n) * moments[p]).sum::<f64>()
            })
            .collect())
    }

    /// Phase applied to drive `n`: the phase of the target coupling plus the
    /// compensation `+zeta_n`.
    ///
    /// With the tone written as `E cos(omega^(n)(t) t + phi)` and the frame
    /// `exp[i sum (omega_n t - A_n) |n><n|]`, the resonant term picks up
    /// `exp[i (phi - zeta_n)]`, so `phi = arg Omega_n + zeta_n` cancels it.
    pub fn drive_phases(&self, t: f64) -> Result<Vec<f64>> {
        let amps = self.amplitudes(t)?;
        let zeta = self.zeta(t)?;
        Ok((0..self.dim)
            .map(|n| if n == 0 { 0.0 } else { phase_of(amps[n]) + zeta[n] })
            .collect())
    }

    /// Eq. (5) assembled from `Delta_n` and `Omega_n`, in rad/s.
    pub fn rotating_hamiltonian(&self, t: f64) -> Result<CMatrix> {
        let det = self.detunings(t)?;
        let amp = self.amplitudes(t)?;
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for n in 0..self.dim {
            h[(n, n)] = c(det[n]);
            if n > 0 {
                h[(n - 1, n)] = amp[n];
                h[(n, n - 1)] = amp[n].conj();
            }
        }
        Ok(h)
    }

    /// The driven block of the transmon-basis `H_LMG / Omega` at time `t`.
    pub fn target_over_omega(&self, t: f64) -> Result<CMatrix> {
        let p = self.schedule.params_at(t)?;
        let (first, dim) = self.sector.block(self.spin);
        let full = lmg::build_lmg(self.spin, &p, lmg::Basis::Transmon);
        Ok(full.view((first, first), (dim, dim)).into_owned())
    }

    /// True if the Hamiltonian does not change on `[a, b]`.
    pub fn constant_between(&self, a: f64, b: f64) -> bool {
        let (Ok((ka, _)), Ok((kb, tb))) = (self.schedule.locate(a), self.schedule.locate(b)) else {
            return false;
        };
        let segs = self.schedule.segments();
        // a closing boundary at b belongs to the earlier segment
        let kb = if kb > ka && tb == 0.0 { kb - 1 } else { kb };
        (ka..=kb).all(|k| segs[k].is_constant())
            && (ka..kb).all(|k| {
                segs[k].end == segs[k + 1].start && segs[k].omega_over_2pi == segs[k + 1].omega_over_2pi
            })
    }
}

/// `arg z`, with zero for a vanishing amplitude.
pub(crate) fn phase_of(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Frequency in Hz of a rad/s quantity.
pub(crate) fn hz(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}
