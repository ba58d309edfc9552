//! Large-`j` limit of the LMG model: the classical energy surface on the
//! Bloch sphere, its minima and barrier, and the density of states.

pub mod dos;
pub mod elliptic;
pub mod quadrature;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::io::CsvTable;

pub use dos::{density_of_states, density_of_states_scaled, dos_grid, eigenvalue_histogram, DosPoint, DosResult, Region};
pub use elliptic::{elliptic_f, elliptic_k};

/// `H(theta, phi) = -h cos(theta) - (gamma_x/2) sin^2(theta) cos^2(phi)`,
/// the energy per spin in units of `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySurface {
    pub h: f64,
    pub gamma_x: f64,
}

impl EnergySurface {
    pub fn new(h: f64, gamma_x: f64) -> Result<Self> {
        if !(gamma_x > 0.0) || !h.is_finite() {
            return Err(invalid("gamma_x", "must be positive (and h finite)"));
        }
        Ok(Self { h, gamma_x })
    }

    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let s = theta.sin() * phi.cos();
        -self.h * theta.cos() - 0.5 * self.gamma_x * s * s
    }

    /// `(min, max)` of the surface.
    pub fn bounds(&self) -> (f64, f64) {
        let (h, g) = (self.h.abs(), self.gamma_x);
        let lo = if h < g { -(h * h + g * g) / (2.0 * g) } else { -h };
        (lo, h)
    }

    /// Gridded export with columns `theta, phi, energy`.
    pub fn grid_csv(&self, thetas: &[f64], phis: &[f64]) -> CsvTable {
        let mut t = CsvTable::new(&["theta", "phi", "energy"]);
        for &th in thetas {
            for &ph in phis {
                t.row(&[th, ph, self.eval(th, ph)]);
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundMinima {
    /// Polar angles of the minima (both at `phi = 0`, mirrored through the
    /// `z` axis in the broken phase).
    pub thetas: Vec<f64>,
    pub e_min: f64,
}

pub fn ground_minima(h: f64, gamma_x: f64) -> Result<GroundMinima> {
    EnergySurface::new(h, gamma_x)?;
    if h >= gamma_x {
        return Ok(GroundMinima {
            thetas: vec![0.0],
            e_min: -h,
        });
    }
    let t = (h / gamma_x).acos();
    Ok(GroundMinima {
        thetas: vec![t, -t],
        e_min: -(h * h + gamma_x * gamma_x) / (2.0 * gamma_x),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEnergy {
    /// Barrier top `H(theta = 0) = -h`.
    pub barrier: f64,
    /// Barrier height above the minimum, `(gamma_x - h)^2 / (2 gamma_x)`.
    pub shifted: f64,
}

pub fn critical_energy(h: f64, gamma_x: f64) -> Result<CriticalEnergy> {
    EnergySurface::new(h, gamma_x)?;
    if h > gamma_x {
        return Err(Error::NoTransition(h / gamma_x));
    }
    Ok(CriticalEnergy {
        barrier: -h,
        shifted: (gamma_x - h).powi(2) / (2.0 * gamma_x),
    })
}

/// Roots `z = -cos(theta)` of `H(z, phi) = E` at `gamma_x = 1` that lie in
/// `[-1, 1]`, as `(z_plus, z_minus)`.
pub fn z_roots(h: f64, e: f64, phi: f64) -> (Option<f64>, Option<f64>) {
    let c = phi.cos().powi(2);
    let disc = h * h + c * (2.0 * e + c);
    if disc < 0.0 {
        return (None, None);
    }
    let ok = |z: f64| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&z);
    if c < 1e-300 {
        // linear case h z = E
        let z = e / h;
        return (Some(z).filter(|z| ok(*z)), None);
    }
    let r = disc.sqrt();
    let zp = (-h + r) / c;
    let zm = (-h - r) / c;
    (Some(zp).filter(|z| ok(*z)), Some(zm).filter(|z| ok(*z)))
}
