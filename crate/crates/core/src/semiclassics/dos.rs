//! Semiclassical density of states from the trace formula
//! `rho(E) = (1/4 pi) int dz dphi delta[H(z, phi) - E]` at `gamma_x = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::elliptic::elliptic_k;
use super::quadrature;
use crate::error::{invalid, Error, Result};
use crate::io::CsvTable;
use crate::lmg::{sector_eigenvalues, LmgParams};
use crate::spin::{Parity, SpinSize};

pub const QUAD_TOL: f64 = 1e-9;
/// Inside `|E + h| < DIVERGENCE_WINDOW` the density is reported as divergent.
pub const DIVERGENCE_WINDOW: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `h <= 1`, `E <= -h`: two orbits per energy.
    I,
    /// `h <= 1`, `E >= -h`.
    II,
    /// `h >= 1`.
    III,
}

impl Region {
    pub fn label(self) -> f64 {
        match self {
            Region::I => 1.0,
            Region::II => 2.0,
            Region::III => 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DosPoint {
    /// `+inf` when `divergent`.
    pub rho: f64,
    pub region: Region,
    pub divergent: bool,
}

/// Classically allowed band `[E_min, h]` at `gamma_x = 1`.
pub fn band(h: f64) -> (f64, f64) {
    let lo = if h <= 1.0 { -(h * h + 1.0) / 2.0 } else { -h };
    (lo, h)
}

pub fn region_of(h: f64, e: f64) -> Region {
    if h >= 1.0 {
        Region::III
    } else if e <= -h {
        Region::I
    } else {
        Region::II
    }
}

/// `rho(E)` at `gamma_x = 1`, `h >= 0`.
pub fn density_of_states(h: f64, e: f64) -> Result<DosPoint> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(invalid("h", "must be finite and non-negative"));
    }
    let (lo, hi) = band(h);
    if !(e >= lo && e <= hi) {
        return Err(Error::OutsideBand { energy: e, low: lo, high: hi });
    }
    let region = region_of(h, e);
    if h < 1.0 && (e + h).abs() < DIVERGENCE_WINDOW {
        return Ok(DosPoint { rho: f64::INFINITY, region, divergent: true });
    }
    let rho = match region {
        Region::I => rho_region_one(h, e)?,
        Region::II | Region::III => rho_single_orbit(h, e)?,
    };
    Ok(DosPoint { rho, region, divergent: false })
}

/// `rho` for general `gamma_x`, by rescaling `h` and `E`.
pub fn density_of_states_scaled(h: f64, gamma_x: f64, e: f64) -> Result<DosPoint> {
    if !(gamma_x > 0.0) {
        return Err(invalid("gamma_x", "must be positive"));
    }
    let mut p = density_of_states(h / gamma_x, e / gamma_x)?;
    p.rho /= gamma_x;
    Ok(p)
}

fn rho_region_one(h: f64, e: f64) -> Result<f64> {
    // h zeta_pm = E +- sqrt(E^2 - h^2)
    let root = (e * e - h * h).max(0.0).sqrt();
    let q = e - root;
    let gap = 2.0 * root;
    let cos_phi0 = (-q).clamp(0.0, 1.0).sqrt();
    let phi0 = cos_phi0.acos();
    let s = 1.0 / gap.sqrt();
    // regularized integrand; x = cos^2 phi - cos^2 phi0 written to avoid
    // cancellation near phi0
    let regular = |phi: f64| {
        let x = ((phi0 - phi).sin() * (phi0 + phi).sin()).max(0.0);
        let a = (x + gap).sqrt();
        -x.sqrt() / (a * gap.sqrt() * (a + gap.sqrt()))
    };
    let integral = quadrature::integrate(regular, 0.0, phi0, QUAD_TOL)?;
    let remainder = 2.0 / PI * s * elliptic_k(1.0 + q)?;
    Ok(2.0 / PI * integral + remainder)
}

fn rho_single_orbit(h: f64, e: f64) -> Result<f64> {
    // (1/4 pi) int_0^{2 pi} = (1/pi) int_0^{pi/2} by symmetry of cos^2
    let f = |phi: f64| {
        let c = phi.cos().powi(2);
        let d = h * h + c * (2.0 * e + c);
        1.0 / d.max(0.0).sqrt()
    };
    // the integrand peaks where cos^2 phi = -E; split there
    let mut cuts = vec![0.0];
    if (0.0..1.0).contains(&-e) {
        cuts.push((-e).sqrt().acos());
    }
    cuts.push(FRAC_PI_2);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += quadrature::integrate(f, w[0], w[1], QUAD_TOL)?;
    }
    Ok(total / PI)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DosResult {
    pub h: f64,
    pub energies: Vec<f64>,
    pub rho: Vec<f64>,
    pub regions: Vec<Region>,
}

impl DosResult {
    /// Columns `E, rho, region` with region coded 1, 2, 3.
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["E", "rho", "region"]);
        for k in 0..self.energies.len() {
            t.row(&[self.energies[k], self.rho[k], self.regions[k].label()]);
        }
        t
    }
}

/// `rho` on `n` points strictly inside the band at `gamma_x = 1`.
pub fn dos_grid(h: f64, n: usize) -> Result<DosResult> {
    if n == 0 {
        return Err(invalid("n", "need at least one energy"));
    }
    let (lo, hi) = band(h);
    let energies: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect();
    let points: Vec<DosPoint> = energies
        .par_iter()
        .map(|&e| density_of_states(h, e))
        .collect::<Result<_>>()?;
    Ok(DosResult {
        h,
        energies,
        rho: points.iter().map(|p| p.rho).collect(),
        regions: points.iter().map(|p| p.region).collect(),
    })
}

/// Normalized histogram of `E_k / j` for the spin-`j` LMG spectrum at
/// `gamma_x = 1`: returns bin edges and the density per bin.
pub fn eigenvalue_histogram(spin: SpinSize, h: f64, bins: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if bins == 0 {
        return Err(invalid("bins", "need at least one bin"));
    }
    let p = LmgParams::new(h, 1.0);
    let j = spin.jf();
    let mut energies: Vec<f64> = sector_eigenvalues(spin, &p, Parity::Even);
    energies.extend(sector_eigenvalues(spin, &p, Parity::Odd));
    let (lo, hi) = band(h);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| lo + width * k as f64).collect();
    let mut counts = vec![0usize; bins];
    // levels pushed outside the classical band by O(1/j) corrections are
    // dropped, not folded into the edge bins
    for e in energies {
        let x = ((e / j) - lo) / width;
        if (0.0..bins as f64).contains(&x) {
            counts[x as usize] += 1;
        }
    }
    let total = spin.dim() as f64;
    Ok((edges, counts.iter().map(|&c| c as f64 / (total * width)).collect()))
}
