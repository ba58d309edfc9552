//! The LMG Hamiltonian `H/Omega = -h J_z - (g_x/2j) J_x^2 - (g_y/2j) J_y^2`,
//! its parity-resolved spectrum, and the relabeling onto transmon levels.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::io::CsvTable;
use crate::linalg::{self, CMatrix, CVector};
use crate::spin::{BasisTag, Parity, SpinSize, SpinState};

/// Energy scale of the experiment, `Omega / 2 pi` in Hz.
pub const DEFAULT_OMEGA_OVER_2PI: f64 = 1.910e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmgParams {
    pub h: f64,
    pub gamma_x: f64,
    #[serde(default)]
    pub gamma_y: f64,
    #[serde(default = "default_omega")]
    pub omega_over_2pi: f64,
}

fn default_omega() -> f64 {
    DEFAULT_OMEGA_OVER_2PI
}

impl LmgParams {
    pub fn new(h: f64, gamma_x: f64) -> Self {
        Self {
            h,
            gamma_x,
            gamma_y: 0.0,
            omega_over_2pi: DEFAULT_OMEGA_OVER_2PI,
        }
    }

    pub fn with_omega(mut self, omega_over_2pi: f64) -> Self {
        self.omega_over_2pi = omega_over_2pi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_over_2pi > 0.0) || !self.omega_over_2pi.is_finite() {
            return Err(invalid("omega_over_2pi", "must be positive and finite"));
        }
        for (name, v) in [("h", self.h), ("gamma_x", self.gamma_x), ("gamma_y", self.gamma_y)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// `Omega` in rad/s.
    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.omega_over_2pi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Jz,
    Transmon,
}

/// Permutation from `J_z` index (m = j..-j) to transmon level.
///
/// Even-parity `m = j - 2n` sits on level `n`; odd-parity `m = j - 1 - 2n`
/// on level `j + 1 + n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    spin: SpinSize,
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl BasisMap {
    pub fn new(spin: SpinSize) -> Self {
        let j = spin.j() as usize;
        let d = spin.dim();
        let perm: Vec<usize> = (0..d)
            .map(|k| if k % 2 == 0 { k / 2 } else { j + 1 + (k - 1) / 2 })
            .collect();
        let mut inverse = vec![0; d];
        for (k, &n) in perm.iter().enumerate() {
            inverse[n] = k;
        }
        Self { spin, perm, inverse }
    }

    pub fn spin(&self) -> SpinSize {
        self.spin
    }

    /// Transmon level holding `J_z` index `k`.
    pub fn level_of_index(&self, k: usize) -> usize {
        self.perm[k]
    }

    /// `J_z` index stored on transmon level `n`.
    pub fn index_of_level(&self, n: usize) -> usize {
        self.inverse[n]
    }

    pub fn level_of_m(&self, m: i64) -> Result<usize> {
        Ok(self.perm[self.spin.index_of(m)?])
    }

    pub fn m_of_level(&self, n: usize) -> i64 {
        self.spin.m_at(self.inverse[n])
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Number of even-parity levels, `j + 1`.
    pub fn even_levels(&self) -> usize {
        self.spin.j() as usize + 1
    }

    pub fn matrix_to_transmon<T: nalgebra::Scalar + Copy>(&self, a: &DMatrix<T>) -> DMatrix<T> {
        DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(self.inverse[r], self.inverse[c])])
    }

    pub fn matrix_to_jz<T: nalgebra::Scalar + Copy>(&self, a: &DMatrix<T>) -> DMatrix<T> {
        DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(self.perm[r], self.perm[c])])
    }

    pub fn vector_to_transmon(&self, v: &CVector) -> CVector {
        CVector::from_fn(v.len(), |n, _| v[self.inverse[n]])
    }

    pub fn vector_to_jz(&self, v: &CVector) -> CVector {
        CVector::from_fn(v.len(), |k, _| v[self.perm[k]])
    }

    pub fn state_to_transmon(&self, s: &SpinState) -> Result<SpinState> {
        match s.basis() {
            BasisTag::TransmonBasis => Ok(s.clone()),
            BasisTag::JzBasis => {
                SpinState::new(self.vector_to_transmon(s.amplitudes()), BasisTag::TransmonBasis)
            }
        }
    }

    pub fn state_to_jz(&self, s: &SpinState) -> Result<SpinState> {
        match s.basis() {
            BasisTag::JzBasis => Ok(s.clone()),
            BasisTag::TransmonBasis => {
                SpinState::new(self.vector_to_jz(s.amplitudes()), BasisTag::JzBasis)
            }
        }
    }

    /// Parity operator in the transmon basis: `+1` on levels `0..=j`.
    pub fn parity_transmon(&self) -> CMatrix {
        let d = self.spin.dim();
        let e = self.even_levels();
        CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| {
            linalg::c(if n < e { 1.0 } else { -1.0 })
        }))
    }
}

/// Real symmetric Hamiltonian in the `J_z` basis, built from closed-form
/// matrix elements so that large `j` stays cheap.
pub fn build_lmg_real(spin: SpinSize, p: &LmgParams) -> DMatrix<f64> {
    let d = spin.dim();
    let jf = spin.jf();
    let jj1 = jf * (jf + 1.0);
    let ladder = |m: f64| (jj1 - m * (m + 1.0)).max(0.0).sqrt();
    let mut h = DMatrix::zeros(d, d);
    let sx = p.gamma_x / (2.0 * jf);
    let sy = p.gamma_y / (2.0 * jf);
    for k in 0..d {
        let m = spin.m_at(k) as f64;
        let j2 = 0.5 * (jj1 - m * m);
        h[(k, k)] = -p.h * m - (sx + sy) * j2;
        if k >= 2 {
            // <m+2| J_+^2 |m> with |m+2> at index k-2
            let a = 0.25 * ladder(m) * ladder(m + 1.0);
            let v = -sx * a + sy * a;
            h[(k - 2, k)] = v;
            h[(k, k - 2)] = v;
        }
    }
    h
}

/// `H_LMG / Omega` as a Hermitian matrix in the requested basis.
pub fn build_lmg(spin: SpinSize, p: &LmgParams, basis: Basis) -> CMatrix {
    let real = build_lmg_real(spin, p);
    let real = match basis {
        Basis::Jz => real,
        Basis::Transmon => BasisMap::new(spin).matrix_to_transmon(&real),
    };
    linalg::to_complex(&real)
}

/// Parity operator in the requested basis.
pub fn parity_operator(spin: SpinSize, basis: Basis) -> CMatrix {
    match basis {
        Basis::Jz => crate::spin::build_angular_momentum(spin).parity,
        Basis::Transmon => BasisMap::new(spin).parity_transmon(),
    }
}

/// Real symmetric block of one parity sector in transmon-level order.
pub fn sector_hamiltonian(spin: SpinSize, p: &LmgParams, parity: Parity) -> DMatrix<f64> {
    let map = BasisMap::new(spin);
    let full = map.matrix_to_transmon(&build_lmg_real(spin, p));
    let e = map.even_levels();
    match parity {
        Parity::Even => full.view((0, 0), (e, e)).into_owned(),
        Parity::Odd => full.view((e, e), (spin.dim() - e, spin.dim() - e)).into_owned(),
    }
}

/// Ascending eigenvalues of one parity sector.
pub fn sector_eigenvalues(spin: SpinSize, p: &LmgParams, parity: Parity) -> Vec<f64> {
    linalg::eigvalsh_real(sector_hamiltonian(spin, p, parity))
}

#[derive(Debug, Clone)]
pub struct LabeledSpectrum {
    pub energies: Vec<f64>,
    pub parities: Vec<Parity>,
    /// Column `k` is the eigenvector of `energies[k]`, phase-fixed.
    pub eigenvectors: CMatrix,
}

/// Energies closer than this (relative to the spectral scale) count as a
/// degenerate pair and are ordered by parity.
pub const DEGENERACY_TOL: f64 = 1e-9;
const COMMUTATOR_TOL: f64 = 1e-10;

/// Parity-resolved diagonalization.
pub fn diagonalize(h: &CMatrix, parity_op: &CMatrix) -> Result<LabeledSpectrum> {
    let n = h.nrows();
    if parity_op.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: parity_op.nrows(),
        });
    }
    let comm = linalg::max_abs(&linalg::commutator(h, parity_op));
    if comm > COMMUTATOR_TOL {
        return Err(Error::ParityViolation(comm));
    }
    let (pvals, pvecs) = linalg::eigh(parity_op);
    let mut entries: Vec<(f64, Parity, CVector)> = Vec::with_capacity(n);
    for parity in [Parity::Even, Parity::Odd] {
        let cols: Vec<usize> = (0..n)
            .filter(|&k| Parity::from_sign(pvals[k]) == parity)
            .collect();
        if cols.is_empty() {
            continue;
        }
        let q = CMatrix::from_fn(n, cols.len(), |r, c| pvecs[(r, cols[c])]);
        let block = q.adjoint() * h * &q;
        let (vals, vecs) = linalg::eigh(&block);
        for (k, e) in vals.into_iter().enumerate() {
            let mut v = &q * vecs.column(k);
            linalg::fix_global_phase(&mut v);
            entries.push((e, parity, v));
        }
    }
    let scale = entries.iter().map(|e| e.0.abs()).fold(1.0, f64::max);
    let tol = DEGENERACY_TOL * scale;
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    // even before odd inside a near-degenerate pair
    let mut k = 0;
    while k + 1 < entries.len() {
        if (entries[k + 1].0 - entries[k].0).abs() < tol
            && entries[k].1 == Parity::Odd
            && entries[k + 1].1 == Parity::Even
        {
            entries.swap(k, k + 1);
            k += 2;
        } else {
            k += 1;
        }
    }
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, e) in entries.iter().enumerate() {
        eigenvectors.set_column(k, &e.2);
    }
    Ok(LabeledSpectrum {
        energies: entries.iter().map(|e| e.0).collect(),
        parities: entries.iter().map(|e| e.1).collect(),
        eigenvectors,
    })
}

/// Convenience: build and diagonalize in one call.
pub fn spectrum(spin: SpinSize, p: &LmgParams, basis: Basis) -> Result<LabeledSpectrum> {
    diagonalize(&build_lmg(spin, p, basis), &parity_operator(spin, basis))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// Lowest odd minus lowest even.
    EvenOdd,
    /// Second even minus lowest even.
    EvenEven,
    /// `E_even[n+1] - E_even[n]`.
    EvenEvenAt(usize),
    /// `E_odd[n+1] - E_odd[n]`.
    OddOddAt(usize),
}

impl LabeledSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Energies with the ground-state energy set to zero.
    pub fn shifted_energies(&self) -> Vec<f64> {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| e - e0).collect()
    }

    /// Energies of one parity sector, ascending.
    pub fn sector(&self, parity: Parity) -> Vec<f64> {
        self.energies
            .iter()
            .zip(&self.parities)
            .filter(|(_, p)| **p == parity)
            .map(|(e, _)| *e)
            .collect()
    }

    /// `n`-th eigenvector of the given parity.
    pub fn sector_state(&self, parity: Parity, n: usize) -> Result<CVector> {
        let cols: Vec<usize> = (0..self.len()).filter(|&k| self.parities[k] == parity).collect();
        cols.get(n)
            .map(|&k| self.eigenvectors.column(k).into_owned())
            .ok_or(Error::LevelOutOfRange {
                index: n,
                available: cols.len(),
            })
    }

    pub fn ground_state(&self) -> CVector {
        self.eigenvectors.column(0).into_owned()
    }
}

fn level(levels: &[f64], n: usize) -> Result<f64> {
    levels.get(n).copied().ok_or(Error::LevelOutOfRange {
        index: n,
        available: levels.len(),
    })
}

/// Non-negative energy difference selected by `kind`.
pub fn gap(spec: &LabeledSpectrum, kind: GapKind) -> Result<f64> {
    let even = spec.sector(Parity::Even);
    let odd = spec.sector(Parity::Odd);
    let g = match kind {
        GapKind::EvenOdd => level(&odd, 0)? - level(&even, 0)?,
        GapKind::EvenEven => level(&even, 1)? - level(&even, 0)?,
        GapKind::EvenEvenAt(n) => level(&even, n + 1)? - level(&even, n)?,
        GapKind::OddOddAt(n) => level(&odd, n + 1)? - level(&odd, n)?,
    };
    Ok(g.abs())
}

/// Gap from sector eigenvalues only; suitable for large `j`.
pub fn sector_gap(spin: SpinSize, p: &LmgParams, kind: GapKind) -> Result<f64> {
    let even = sector_eigenvalues(spin, p, Parity::Even);
    let g = match kind {
        GapKind::EvenOdd => {
            let odd = sector_eigenvalues(spin, p, Parity::Odd);
            level(&odd, 0)? - level(&even, 0)?
        }
        GapKind::EvenEven => level(&even, 1)? - level(&even, 0)?,
        GapKind::EvenEvenAt(n) => level(&even, n + 1)? - level(&even, n)?,
        GapKind::OddOddAt(n) => {
            let odd = sector_eigenvalues(spin, p, Parity::Odd);
            level(&odd, n + 1)? - level(&odd, n)?
        }
    };
    Ok(g.abs())
}

/// Spectra over a grid of `h/gamma_x`, evaluated in parallel.
pub fn spectrum_sweep(
    spin: SpinSize,
    gamma_x: f64,
    h_over_gamma: &[f64],
) -> Result<Vec<(f64, LabeledSpectrum)>> {
    h_over_gamma
        .par_iter()
        .map(|&r| {
            let p = LmgParams::new(r * gamma_x, gamma_x);
            spectrum(spin, &p, Basis::Jz).map(|s| (r, s))
        })
        .collect()
}

/// CSV with columns `h_over_gamma_x, level_index, energy_over_Omega, parity`.
/// Energies are shifted so each ground state sits at zero.
pub fn spectrum_csv(rows: &[(f64, LabeledSpectrum)]) -> CsvTable {
    let mut t = CsvTable::new(&["h_over_gamma_x", "level_index", "energy_over_Omega", "parity"]);
    for (r, spec) in rows {
        for (k, (e, p)) in spec.shifted_energies().iter().zip(&spec.parities).enumerate() {
            t.row(&[*r, k as f64, *e, p.sign()]);
        }
    }
    t
}
