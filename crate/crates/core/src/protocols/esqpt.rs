//! Excited-state spectroscopy inside each parity sector. Every gap between
//! neighbouring same-parity levels is measured by a Ramsey trace; the sums
//! rebuild both ladders, and even/odd pairs show where tunnelling splitting
//! sets in.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gap::{analyze, ramsey_signal, RamseyResult, RamseySetup};
use super::{check_spin, definite_parity_block, equal_superposition, ProtocolOptions, RampParameter, RampSpec};
use crate::drive::{Couplings, RampShape, Sector};
use crate::error::{invalid, Result};
use crate::lmg::{self, LmgParams};
use crate::semiclassics;
use crate::spin::Parity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsqptConfig {
    pub j: u32,
    pub h: f64,
    pub gamma_x: f64,
    /// `h` ramp from 0 into the hold point.
    pub ramp: RampSpec,
    pub omega_hold: f64,
    pub delta_ts: Vec<f64>,
}

impl EsqptConfig {
    pub fn new(j: u32, h: f64) -> Self {
        let omega_hold = lmg::DEFAULT_OMEGA_OVER_2PI;
        Self {
            j,
            h,
            gamma_x: 1.0,
            ramp: RampSpec {
                parameter: RampParameter::H,
                start: 0.0,
                end: h,
                duration: 5e-6,
                shape: RampShape::RaisedCosine,
                omega_during_ramp: 5.730e6,
            },
            omega_hold,
            delta_ts: default_grid(omega_hold),
        }
    }

    fn validate(&self) -> Result<()> {
        self.ramp.validate()?;
        if self.ramp.parameter != RampParameter::H || self.ramp.start != 0.0 || self.ramp.end != self.h {
            return Err(invalid("ramp", "must ramp h from 0 to the hold value"));
        }
        if !(self.gamma_x > 0.0) || !(self.h >= 0.0) || self.h >= self.gamma_x {
            return Err(invalid("h", "needs 0 <= h < gamma_x"));
        }
        if !(self.omega_hold > 0.0) {
            return Err(invalid("omega_hold", "must be positive"));
        }
        Ok(())
    }
}

/// 64 samples over `Omega t = 40`.
pub fn default_grid(omega_hold: f64) -> Vec<f64> {
    let span = 40.0 / (2.0 * std::f64::consts::PI * omega_hold);
    (0..64).map(|k| span * k as f64 / 64.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapMeasurement {
    pub parity: Parity,
    /// Gap between sector states `lower` and `lower + 1`.
    pub lower: usize,
    pub ramsey: RamseyResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsqptPair {
    pub index: usize,
    pub mean_energy: f64,
    pub splitting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsqptResult {
    /// Reconstructed ladders in units of `Omega`, both starting at 0.
    pub even_energies: Vec<f64>,
    pub odd_energies: Vec<f64>,
    pub gaps: Vec<GapMeasurement>,
    pub pairs: Vec<EsqptPair>,
    pub bin_over_omega: f64,
    /// Mean energy of the first pair split by more than two bins.
    pub crossing_energy: Option<f64>,
    /// `j` times the classical barrier height.
    pub critical_energy: f64,
    /// `(parity, lower)` of gaps whose trace showed no peak.
    pub unresolved: Vec<(Parity, usize)>,
}

impl EsqptResult {
    pub fn pairs_csv(&self) -> crate::io::CsvTable {
        let mut t = crate::io::CsvTable::new(&["pair", "mean_energy", "splitting", "bins"]);
        for p in &self.pairs {
            t.row(&[p.index as f64, p.mean_energy, p.splitting, p.splitting / self.bin_over_omega]);
        }
        t
    }

    pub fn spectrum_csv(&self) -> crate::io::CsvTable {
        let mut t = crate::io::CsvTable::new(&["parity", "n", "energy"]);
        for (sign, ladder) in [(1.0, &self.even_energies), (-1.0, &self.odd_energies)] {
            for (n, e) in ladder.iter().enumerate() {
                t.row(&[sign, n as f64, *e]);
            }
        }
        t
    }
}

pub fn run_esqpt(cfg: &EsqptConfig, opts: &ProtocolOptions) -> Result<EsqptResult> {
    cfg.validate()?;
    let spin = check_spin(cfg.j)?;
    let j = spin.j();
    let target = Couplings::new(cfg.h, cfg.gamma_x);
    // at h = 0 sector state n is |j, j-n>_(+/-)
    let jobs: Vec<(Parity, usize)> = [(Parity::Even, j as usize), (Parity::Odd, j as usize - 1)]
        .into_iter()
        .flat_map(|(p, top)| (0..top).map(move |n| (p, n)))
        .collect();
    let gaps = jobs
        .par_iter()
        .map(|&(parity, n)| {
            let sector = if parity == Parity::Even { Sector::Even } else { Sector::Odd };
            let a = definite_parity_block(spin, sector, j - n as u32, parity)?;
            let b = definite_parity_block(spin, sector, j - n as u32 - 1, parity)?;
            let setup = RamseySetup {
                spin,
                sector,
                psi0: equal_superposition(&a, &b)?,
                ramp: Some((cfg.ramp, cfg.gamma_x)),
                target,
                omega_hold: cfg.omega_hold,
            };
            let signal = ramsey_signal(&setup, &cfg.delta_ts, opts)?;
            Ok(GapMeasurement {
                parity,
                lower: n,
                ramsey: analyze(&cfg.delta_ts, signal, cfg.omega_hold, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ladder = |parity: Parity| {
        let mut e = vec![0.0];
        for g in gaps.iter().filter(|g| g.parity == parity) {
            e.push(e.last().unwrap() + g.ramsey.gap_over_omega);
        }
        e
    };
    let even_energies = ladder(Parity::Even);
    let odd_energies = ladder(Parity::Odd);
    let bin_over_omega = gaps.iter().map(|g| g.ramsey.bin_over_omega).fold(0.0, f64::max);
    let pairs: Vec<EsqptPair> = even_energies
        .iter()
        .zip(&odd_energies)
        .enumerate()
        .map(|(index, (e, o))| EsqptPair {
            index,
            mean_energy: 0.5 * (e + o),
            splitting: (o - e).abs(),
        })
        .collect();
    let crossing_energy = pairs.iter().find(|p| p.splitting > 2.0 * bin_over_omega).map(|p| p.mean_energy);
    let critical_energy = spin.jf() * semiclassics::critical_energy(cfg.h, cfg.gamma_x)?.shifted;
    let unresolved = gaps
        .iter()
        .filter(|g| g.ramsey.spectrum.peak.is_none())
        .map(|g| (g.parity, g.lower))
        .collect();
    Ok(EsqptResult {
        even_energies,
        odd_energies,
        gaps,
        pairs,
        bin_over_omega,
        crossing_energy,
        critical_energy,
        unresolved,
    })
}

/// Both ladders from direct diagonalization, each shifted to start at 0.
pub fn esqpt_oracle(j: u32, h: f64, gamma_x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let spin = check_spin(j)?;
    let p = LmgParams::new(h, gamma_x);
    let shift = |v: Vec<f64>| {
        let e0 = v[0];
        v.into_iter().map(|e| e - e0).collect()
    };
    Ok((
        shift(lmg::sector_eigenvalues(spin, &p, Parity::Even)),
        shift(lmg::sector_eigenvalues(spin, &p, Parity::Odd)),
    ))
}
