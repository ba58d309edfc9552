//! Lab-frame drive tones and their hardware IQ decomposition.
//!
//! Tone `n` is `V_n(t) = E_n cos(omega^(n)(t) t + phi_n(t))` with
//! `E_n = 2 |Omega_n| / gamma_n` and
//! `omega^(n) = (omega_n - omega_{n-1}) - (Delta_n - Delta_{n-1})`.
//! Against a fixed reference `beta_n` it is emitted as
//! `V = cos(beta t) vI - sin(beta t) vQ`.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hz, DriveSchedule};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, CMatrix, CVector};

/// A drive schedule realized on concrete transmon levels.
#[derive(Debug, Clone)]
pub struct LabFrame {
    ds: DriveSchedule,
    level_freqs: Vec<f64>,
    transition_freqs: Vec<f64>,
    charge: Vec<f64>,
}

impl LabFrame {
    pub fn new(ds: &DriveSchedule, spec: &super::TransmonSpec) -> Result<Self> {
        spec.validate()?;
        let dim = ds.dim();
        if dim > spec.levels() {
            return Err(Error::DimensionMismatch {
                expected: spec.levels(),
                got: dim,
            });
        }
        let level_freqs = spec.level_freqs()[..dim].to_vec();
        let transition_freqs = (0..dim)
            .map(|n| if n == 0 { 0.0 } else { spec.transition_freq(n) })
            .collect();
        let charge = (0..dim)
            .map(|n| if n == 0 { 0.0 } else { spec.charge_element(n) })
            .collect();
        Ok(Self {
            ds: ds.clone(),
            level_freqs,
            transition_freqs,
            charge,
        })
    }

    pub fn drive(&self) -> &DriveSchedule {
        &self.ds
    }

    pub fn dim(&self) -> usize {
        self.ds.dim()
    }

    /// `omega_n` in rad/s.
    pub fn level_freqs(&self) -> &[f64] {
        &self.level_freqs
    }

    /// `gamma_n`, index 0 unused.
    pub fn charge_elements(&self) -> &[f64] {
        &self.charge
    }

    /// Per-transition `(E_n, omega^(n), phi_n)`; index 0 is zero.
    pub fn tones(&self, t: f64) -> Result<Vec<(f64, f64, f64)>> {
        let amps = self.ds.amplitudes(t)?;
        let det = self.ds.detunings(t)?;
        let phases = self.ds.drive_phases(t)?;
        Ok((0..self.dim())
            .map(|n| {
                if n == 0 {
                    return (0.0, 0.0, 0.0);
                }
                let e = 2.0 * amps[n].norm() / self.charge[n];
                let w = self.transition_freqs[n] - (det[n] - det[n - 1]);
                (e, w, phases[n])
            })
            .collect())
    }

    /// Total drive line voltage `sum_n V_n(t)` (rad/s units).
    pub fn line_voltage(&self, t: f64) -> Result<f64> {
        Ok(self
            .tones(t)?
            .iter()
            .skip(1)
            .map(|&(e, w, phi)| e * (w * t + phi).cos())
            .sum())
    }

    /// `H_0 + H_drive(t)` in rad/s.
    pub fn hamiltonian(&self, t: f64) -> Result<CMatrix> {
        let v = self.line_voltage(t)?;
        let d = self.dim();
        let mut h = CMatrix::zeros(d, d);
        for n in 0..d {
            h[(n, n)] = c(self.level_freqs[n]);
            if n > 0 {
                h[(n - 1, n)] = c(v * self.charge[n]);
                h[(n, n - 1)] = c(v * self.charge[n]);
            }
        }
        Ok(h)
    }

    /// `-i H(t) psi` using the tridiagonal structure.
    pub fn apply(&self, t: f64, psi: &CVector, out: &mut CVector) -> Result<()> {
        let v = self.line_voltage(t)?;
        let d = self.dim();
        let mi = Complex64::new(0.0, -1.0);
        for n in 0..d {
            let mut acc = psi[n] * self.level_freqs[n];
            if n > 0 {
                acc += psi[n - 1] * (v * self.charge[n]);
            }
            if n + 1 < d {
                acc += psi[n + 1] * (v * self.charge[n + 1]);
            }
            out[n] = mi * acc;
        }
        Ok(())
    }

    /// Diagonal of `R(t) = exp[i sum_n (omega_n t - A_n(t)) |n><n|]`, which
    /// maps lab-frame states into the rotating frame.
    pub fn frame(&self, t: f64) -> Result<Vec<Complex64>> {
        let a = self.ds.accumulated_phases(t)?;
        Ok((0..self.dim())
            .map(|n| Complex64::from_polar(1.0, self.level_freqs[n] * t - a[n]))
            .collect())
    }

    pub fn to_rotating(&self, t: f64, psi_lab: &CVector) -> Result<CVector> {
        let r = self.frame(t)?;
        Ok(CVector::from_fn(psi_lab.len(), |n, _| r[n] * psi_lab[n]))
    }

    pub fn to_lab(&self, t: f64, psi_rot: &CVector) -> Result<CVector> {
        let r = self.frame(t)?;
        Ok(CVector::from_fn(psi_rot.len(), |n, _| r[n].conj() * psi_rot[n]))
    }
}

/// `H_0 + H_drive(t)` in rad/s for the drive schedule on `spec`.
pub fn lab_frame_hamiltonian(
    ds: &DriveSchedule,
    spec: &super::TransmonSpec,
    t: f64,
) -> Result<CMatrix> {
    LabFrame::new(ds, spec)?.hamiltonian(t)
}

/// Rotating-frame Hamiltonian obtained by moving the lab drive into
/// `R(t)` and keeping only the resonant terms. With the `+zeta` phase
/// compensation this reproduces Eq. (5) exactly.
pub fn rotating_frame_from_lab(lab: &LabFrame, t: f64) -> Result<CMatrix> {
    let ds = lab.drive();
    let det = ds.detunings(t)?;
    let a = ds.accumulated_phases(t)?;
    let tones = lab.tones(t)?;
    let d = lab.dim();
    let mut h = CMatrix::zeros(d, d);
    for n in 0..d {
        h[(n, n)] = c(det[n]);
        if n > 0 {
            let (e, w, phi) = tones[n];
            let carrier = lab.level_freqs[n] - lab.level_freqs[n - 1];
            // (w - carrier) t is exactly the detuning-difference term
            let residual = (w - carrier) * t + phi + (a[n] - a[n - 1]);
            let z = Complex64::from_polar(0.5 * e * lab.charge[n], residual);
            h[(n - 1, n)] = z;
            h[(n, n - 1)] = z.conj();
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndOfPulseUpdate {
    pub transition: usize,
    /// `delta omega^(n)(t_end)` in rad/s, the new modulation frequency.
    pub modulation_freq: f64,
    /// `phi_n(t_end) - phi_n(0)`.
    pub phase_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IqWaveform {
    pub dim: usize,
    pub sample_rate: f64,
    /// `beta_n` in rad/s; index 0 unused.
    pub reference_freqs: Vec<f64>,
    /// `v_I[n][k]`; row 0 unused and empty.
    pub v_i: Vec<Vec<f64>>,
    pub v_q: Vec<Vec<f64>>,
    pub end_of_pulse_updates: Vec<EndOfPulseUpdate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformManifest {
    pub dim: usize,
    pub sample_rate: f64,
    pub n_samples: usize,
    pub reference_freqs_hz: Vec<f64>,
    pub end_of_pulse_updates: Vec<EndOfPulseUpdate>,
}

impl IqWaveform {
    pub fn n_samples(&self) -> usize {
        self.v_i.get(1).map_or(0, Vec::len)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.sample_rate
    }

    /// `beta_n t` reduced to `[0, 2 pi)`.
    pub fn carrier_phase(&self, n: usize, t: f64) -> f64 {
        (self.reference_freqs[n] * t).rem_euclid(TAU)
    }

    /// `cos(beta t) vI - sin(beta t) vQ` at sample `k`.
    pub fn reconstruct(&self, n: usize, k: usize) -> f64 {
        let (s, co) = self.carrier_phase(n, self.time(k)).sin_cos();
        co * self.v_i[n][k] - s * self.v_q[n][k]
    }

    pub fn manifest(&self) -> WaveformManifest {
        WaveformManifest {
            dim: self.dim,
            sample_rate: self.sample_rate,
            n_samples: self.n_samples(),
            reference_freqs_hz: self.reference_freqs.iter().skip(1).map(|b| hz(*b)).collect(),
            end_of_pulse_updates: self.end_of_pulse_updates.clone(),
        }
    }

    /// Text preamble terminated by `END`, then little-endian f64 samples,
    /// transition-major: `vI_1, vQ_1, vI_2, vQ_2, ...`.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "lmg-qudit waveform v1")?;
        writeln!(w, "d {}", self.dim)?;
        writeln!(w, "sample_rate {}", crate::io::num(self.sample_rate))?;
        writeln!(w, "n_samples {}", self.n_samples())?;
        let betas: Vec<String> = self.reference_freqs.iter().skip(1).map(|b| crate::io::num(hz(*b))).collect();
        writeln!(w, "beta_hz {}", betas.join(" "))?;
        writeln!(w, "END")?;
        for n in 1..self.dim {
            for v in self.v_i[n].iter().chain(&self.v_q[n]) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.bin")))?);
        self.write_binary(&mut f)?;
        f.flush()?;
        let json = serde_json::to_string_pretty(&self.manifest()).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(format!("{stem}.json")), json)?;
        Ok(())
    }

    /// Reads the sample block back; end-of-pulse updates live in the manifest.
    pub fn read_binary(r: &mut impl BufRead) -> Result<Self> {
        let mut dim = 0;
        let mut rate = 0.0;
        let mut n = 0;
        let mut betas = vec![0.0];
        loop {
            let mut line = String::new();
            if r.read_line(&mut line)? == 0 {
                return Err(invalid("waveform", "missing END marker"));
            }
            let line = line.trim_end();
            if line == "END" {
                break;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or("");
            let bad = || invalid("waveform", format!("bad header line `{line}`"));
            match key {
                "d" => dim = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                "sample_rate" => rate = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                "n_samples" => n = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?,
                "beta_hz" => {
                    for p in parts {
                        let b: f64 = p.parse().map_err(|_| bad())?;
                        betas.push(b * TAU);
                    }
                }
                _ => {}
            }
        }
        let mut read_block = || -> Result<Vec<f64>> {
            let mut buf = vec![0u8; 8 * n];
            r.read_exact(&mut buf)?;
            Ok(buf
                .chunks_exact(8)
                .map(|ch| f64::from_le_bytes(ch.try_into().unwrap()))
                .collect())
        };
        let mut v_i = vec![Vec::new()];
        let mut v_q = vec![Vec::new()];
        for _ in 1..dim {
            v_i.push(read_block()?);
            v_q.push(read_block()?);
        }
        Ok(Self {
            dim,
            sample_rate: rate,
            reference_freqs: betas,
            v_i,
            v_q,
            end_of_pulse_updates: Vec::new(),
        })
    }
}

/// Samples the IQ envelopes of every transition over the whole schedule.
pub fn synthesize_lab_waveforms(
    ds: &DriveSchedule,
    spec: &super::TransmonSpec,
) -> Result<IqWaveform> {
    let lab = LabFrame::new(ds, spec)?;
    let dim = lab.dim();
    let rate = ds.options().sample_rate;
    let duration = ds.duration();

    let tones0 = lab.tones(0.0)?;
    let beta: Vec<f64> = (0..dim).map(|n| if n == 0 { 0.0 } else { tones0[n].1 }).collect();

    // detunings and |Omega| are extremal at segment end points
    let mut max_mod: f64 = 0.0;
    let mut max_amp: f64 = 0.0;
    let sched = ds.schedule();
    for (k, seg) in sched.segments().iter().enumerate() {
        let t0 = sched.segment_start(k);
        let t1 = (t0 + seg.duration).min(duration);
        for t in [t0, t1] {
            let tones = lab.tones(t)?;
            for n in 1..dim {
                max_mod = max_mod.max((tones[n].1 - beta[n]).abs());
                max_amp = max_amp.max(tones[n].0);
            }
        }
    }
    let required = 16.0 * hz(max_mod).max(hz(max_amp));
    if rate < required {
        return Err(Error::Aliasing {
            sample_rate: rate,
            required,
        });
    }

    let n_samples = (duration * rate).round() as usize + 1;
    let mut v_i = vec![Vec::new(); dim];
    let mut v_q = vec![Vec::new(); dim];
    for n in 1..dim {
        v_i[n].reserve(n_samples);
        v_q[n].reserve(n_samples);
    }
    for k in 0..n_samples {
        let t = (k as f64 / rate).min(duration);
        let tones = lab.tones(t)?;
        for n in 1..dim {
            let (e, w, phi) = tones[n];
            let arg = (w - beta[n]) * t + phi;
            v_i[n].push(e * arg.cos());
            v_q[n].push(e * arg.sin());
        }
    }

    let tones_end = lab.tones(duration)?;
    let phases0 = ds.drive_phases(0.0)?;
    let phases1 = ds.drive_phases(duration)?;
    let end_of_pulse_updates = (1..dim)
        .map(|n| EndOfPulseUpdate {
            transition: n,
            modulation_freq: tones_end[n].1 - beta[n],
            phase_jump: phases1[n] - phases0[n],
        })
        .collect();

    Ok(IqWaveform {
        dim,
        sample_rate: rate,
        reference_freqs: beta,
        v_i,
        v_q,
        end_of_pulse_updates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::{lmg_to_drive, Couplings, DriveOptions, LmgSchedule, RampShape, Sector, Segment, TransmonSpec};
    use crate::linalg::max_abs;
    use crate::lmg::LmgParams;
    use crate::spin::SpinSize;

    fn ramp_schedule(j: u32) -> DriveSchedule {
        let sched = LmgSchedule::new(vec![
            Segment::ramp(Couplings::new(0.0, 0.2), Couplings::new(0.6, 1.0), 40e-9, RampShape::Linear, 1.91e6),
            Segment::hold(Couplings::new(0.6, 1.0), 20e-9, 1.91e6),
        ])
        .unwrap();
        lmg_to_drive(SpinSize::new(j).unwrap(), &sched, Sector::Full, DriveOptions::default()).unwrap()
    }

    #[test]
    fn undriven_transmon_is_bare() {
        let sched = LmgSchedule::constant(LmgParams::new(0.0, 0.0), 1e-6).unwrap();
        let ds = lmg_to_drive(SpinSize::new(2).unwrap(), &sched, Sector::Full, DriveOptions::default()).unwrap();
        let spec = TransmonSpec::table_s1();
        let h = lab_frame_hamiltonian(&ds, &spec, 0.3e-6).unwrap();
        let w = spec.level_freqs();
        for r in 0..5 {
            for col in 0..5 {
                let want = if r == col { w[r] } else { 0.0 };
                assert_eq!(h[(r, col)], c(want));
            }
        }
    }

    #[test]
    fn single_tone_only_touches_charge_entries() {
        // j = 1 even block has one coupling on transition 1, nothing on 2
        let sched = LmgSchedule::constant(LmgParams::new(0.0, 1.0), 1e-6).unwrap();
        let ds = lmg_to_drive(SpinSize::new(1).unwrap(), &sched, Sector::Full, DriveOptions::default()).unwrap();
        let lab = LabFrame::new(&ds, &TransmonSpec::table_s1()).unwrap();
        let tones = lab.tones(0.1e-6).unwrap();
        assert!(tones[1].0 > 0.0);
        assert_eq!(tones[2].0, 0.0);
        let h = lab.hamiltonian(0.1e-6).unwrap();
        assert_eq!(h[(0, 2)], c(0.0));
        // both charge entries carry the same line voltage scaled by gamma_n
        assert!((h[(1, 2)].re / h[(0, 1)].re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn compensated_phase_reproduces_rotating_hamiltonian() {
        let ds = ramp_schedule(3);
        let lab = LabFrame::new(&ds, &TransmonSpec::table_s1()).unwrap();
        for t in [0.0, 13e-9, 40e-9, 55e-9] {
            let want = ds.rotating_hamiltonian(t).unwrap();
            let got = rotating_frame_from_lab(&lab, t).unwrap();
            let scale = max_abs(&want);
            assert!(max_abs(&(got - want)) < 1e-9 * scale, "t={t}");
        }
    }

    #[test]
    fn iq_start_values_and_reconstruction() {
        let ds = ramp_schedule(2);
        let wf = synthesize_lab_waveforms(&ds, &TransmonSpec::table_s1()).unwrap();
        let lab = LabFrame::new(&ds, &TransmonSpec::table_s1()).unwrap();
        let tones0 = lab.tones(0.0).unwrap();
        for n in 1..wf.dim {
            let (e, _, phi) = tones0[n];
            assert!((wf.v_i[n][0] - e * phi.cos()).abs() <= 1e-12 * e.max(1.0));
            assert!((wf.v_q[n][0] - e * phi.sin()).abs() <= 1e-12 * e.max(1.0));
        }
        for k in (0..wf.n_samples()).step_by(7) {
            let t = wf.time(k);
            let tones = lab.tones(t).unwrap();
            for n in 1..wf.dim {
                let (e, w, phi) = tones[n];
                let target = e * (wf.carrier_phase(n, t) + (w - wf.reference_freqs[n]) * t + phi).cos();
                assert!((wf.reconstruct(n, k) - target).abs() <= 1e-12 * e.max(1.0));
            }
        }
    }

    #[test]
    fn constant_detunings_give_fixed_iq_ratio() {
        let sched = LmgSchedule::constant(LmgParams::new(0.3, 1.0), 20e-9).unwrap();
        let ds = lmg_to_drive(SpinSize::new(2).unwrap(), &sched, Sector::Full, DriveOptions::default()).unwrap();
        let wf = synthesize_lab_waveforms(&ds, &TransmonSpec::table_s1()).unwrap();
        for u in &wf.end_of_pulse_updates {
            assert_eq!(u.modulation_freq, 0.0);
            assert_eq!(u.phase_jump, 0.0);
        }
        for n in 1..wf.dim {
            let (i0, q0) = (wf.v_i[n][0], wf.v_q[n][0]);
            for k in 0..wf.n_samples() {
                assert_eq!(wf.v_i[n][k], i0);
                assert_eq!(wf.v_q[n][k], q0);
            }
        }
    }

    #[test]
    fn aliasing_guard() {
        let sched = LmgSchedule::constant(LmgParams::new(0.3, 1.0), 20e-9).unwrap();
        let opts = DriveOptions {
            sample_rate: 1e6,
            ..DriveOptions::default()
        };
        let ds = lmg_to_drive(SpinSize::new(2).unwrap(), &sched, Sector::Full, opts).unwrap();
        assert!(matches!(
            synthesize_lab_waveforms(&ds, &TransmonSpec::table_s1()),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn binary_round_trip() {
        let ds = ramp_schedule(2);
        let wf = synthesize_lab_waveforms(&ds, &TransmonSpec::table_s1()).unwrap();
        let mut buf = Vec::new();
        wf.write_binary(&mut buf).unwrap();
        let back = IqWaveform::read_binary(&mut std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.dim, wf.dim);
        assert_eq!(back.v_i, wf.v_i);
        assert_eq!(back.v_q, wf.v_q);
        for n in 1..wf.dim {
            assert!((back.reference_freqs[n] / wf.reference_freqs[n] - 1.0).abs() < 1e-15);
        }
    }
}
