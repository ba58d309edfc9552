//! Angular-momentum algebra for an integer spin `j` and the special state
//! families used throughout the simulator.
//!
//! The `J_z` basis is ordered `m = j, j-1, ..., -j`, so index 0 holds the
//! highest-weight state `|j,j>`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};

/// Integer spin quantum number, `j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinSize(u32);

impl SpinSize {
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Self(j))
    }

    /// Accepts only positive integral values.
    pub fn from_f64(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 1.0 || j.fract() != 0.0 || j > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Self(j as u32))
    }

    pub fn j(self) -> u32 {
        self.0
    }

    pub fn jf(self) -> f64 {
        self.0 as f64
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        2 * self.0 as usize + 1
    }

    /// `m` carried by basis index `index`.
    pub fn m_at(self, index: usize) -> i64 {
        self.0 as i64 - index as i64
    }

    pub fn index_of(self, m: i64) -> Result<usize> {
        self.check_m(m)?;
        Ok((self.0 as i64 - m) as usize)
    }

    pub fn check_m(self, m: i64) -> Result<()> {
        if m.abs() > self.0 as i64 {
            return Err(Error::MOutOfRange { j: self.0, m });
        }
        Ok(())
    }

    pub fn m_values(self) -> impl Iterator<Item = i64> {
        let j = self.0 as i64;
        (0..self.dim()).map(move |k| j - k as i64)
    }

    /// Parity of `|j,m>` under `exp[i pi (J_z - j)]`.
    pub fn parity_of_m(self, m: i64) -> Parity {
        if (self.0 as i64 - m).rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl std::fmt::Display for SpinSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Eigenvalue of the parity operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: f64) -> Self {
        if sign >= 0.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Dense `J_x, J_y, J_z, J_+, J_-` and parity for one spin size.
#[derive(Debug, Clone)]
pub struct AngularMomentumSet {
    pub spin: SpinSize,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
    pub parity: CMatrix,
}

/// Ladder-operator construction in the `J_z` basis.
pub fn build_angular_momentum(spin: SpinSize) -> AngularMomentumSet {
    let d = spin.dim();
    let jj = spin.jf();
    let mut j_plus = CMatrix::zeros(d, d);
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; |m+1> sits one index lower.
    for col in 1..d {
        let m = spin.m_at(col) as f64;
        j_plus[(col - 1, col)] = c((jj * (jj + 1.0) - m * (m + 1.0)).sqrt());
    }
    let j_minus = j_plus.adjoint();
    let jx = (&j_plus + &j_minus) * c(0.5);
    let jy = (&j_plus - &j_minus) * Complex64::new(0.0, -0.5);
    let jz = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        spin.m_values().map(|m| c(m as f64)),
    ));
    let parity = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        spin.m_values().map(|m| c(spin.parity_of_m(m).sign())),
    ));
    AngularMomentumSet {
        spin,
        jx,
        jy,
        jz,
        j_plus,
        j_minus,
        parity,
    }
}

impl AngularMomentumSet {
    pub fn new(spin: SpinSize) -> Self {
        build_angular_momentum(spin)
    }

    pub fn jx_squared(&self) -> CMatrix {
        &self.jx * &self.jx
    }

    pub fn jy_squared(&self) -> CMatrix {
        &self.jy * &self.jy
    }

    /// `exp(-i angle J_y)`.
    pub fn rotation_y(&self, angle: f64) -> CMatrix {
        linalg::expm_hermitian(&self.jy, angle)
    }

    /// `exp(-i angle J_x)`.
    pub fn rotation_x(&self, angle: f64) -> CMatrix {
        linalg::expm_hermitian(&self.jx, angle)
    }
}

/// Basis in which a state's amplitudes are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// `J_z` eigenbasis, index 0 = `|j,j>`.
    JzBasis,
    /// Transmon levels after parity relabeling.
    TransmonBasis,
}

/// Normalized spin state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    amplitudes: CVector,
    basis: BasisTag,
}

impl SpinState {
    /// Wraps amplitudes that must already have unit norm (to 1e-12).
    pub fn new(amplitudes: CVector, basis: BasisTag) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Normalizes before wrapping.
    pub fn normalized(amplitudes: CVector, basis: BasisTag) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes / c(norm),
            basis,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    pub fn overlap(&self, other: &SpinState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    fn phase_fixed(mut amplitudes: CVector, basis: BasisTag) -> Self {
        linalg::fix_global_phase(&mut amplitudes);
        Self { amplitudes, basis }
    }
}

/// `|j,m>` in the `J_z` basis.
pub fn jz_eigenstate(spin: SpinSize, m: i64) -> Result<SpinState> {
    let index = spin.index_of(m)?;
    Ok(SpinState {
        amplitudes: linalg::unit_vector(spin.dim(), index),
        basis: BasisTag::JzBasis,
    })
}

/// `|j,m>_x`, the `J_x` eigenstate with eigenvalue `m`, phase-fixed.
pub fn jx_eigenstate(spin: SpinSize, m: i64) -> Result<SpinState> {
    spin.check_m(m)?;
    let ops = build_angular_momentum(spin);
    let (_, vectors) = linalg::eigh(&ops.jx);
    // ascending eigenvalues -j..j
    let col = (m + spin.j() as i64) as usize;
    Ok(SpinState::phase_fixed(
        vectors.column(col).into_owned(),
        BasisTag::JzBasis,
    ))
}

/// All `|j,m>_x` for `m = j..-j` from a single diagonalization.
pub fn jx_eigenbasis(spin: SpinSize) -> Vec<SpinState> {
    let ops = build_angular_momentum(spin);
    let (_, vectors) = linalg::eigh(&ops.jx);
    let d = spin.dim();
    (0..d)
        .map(|k| {
            let col = d - 1 - k;
            SpinState::phase_fixed(vectors.column(col).into_owned(), BasisTag::JzBasis)
        })
        .collect()
}

/// `|j,m>_{+/-} = (|j,m>_x +/- P|j,m>_x)/sqrt(2)` for `m > 0`, and
/// `|j,0>_+ = |j,0>_x`.
///
/// `P|j,m>_x` equals `|j,-m>_x` up to a sign under the phase convention, so
/// the combination is built from `P|j,m>_x` directly, which guarantees the
/// requested parity.
pub fn definite_parity_jx2_eigenstate(spin: SpinSize, m: u32, parity: Parity) -> Result<SpinState> {
    spin.check_m(m as i64)?;
    let base = jx_eigenstate(spin, m as i64)?;
    if m == 0 {
        return match parity {
            Parity::Even => Ok(base),
            Parity::Odd => Err(Error::NoOddZeroState),
        };
    }
    let ops = build_angular_momentum(spin);
    let flipped = &ops.parity * base.amplitudes();
    let combined = (base.amplitudes() + flipped * c(parity.sign())) * c(std::f64::consts::FRAC_1_SQRT_2);
    Ok(SpinState::phase_fixed(combined, BasisTag::JzBasis))
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Spin coherent state `exp(-i phi J_z) exp(-i theta J_y) |j,j>`.
///
/// Uses the closed-form Wigner-d column `d^j_{m,j}(theta)`, which stays
/// accurate at large `j`.
pub fn spin_coherent_state(spin: SpinSize, theta: f64, phi: f64) -> SpinState {
    let two_j = 2 * spin.j();
    let (s, co) = (0.5 * theta).sin_cos();
    let amplitudes = CVector::from_iterator(
        spin.dim(),
        spin.m_values().map(|m| {
            let up = (spin.j() as i64 + m) as u32;
            let down = two_j - up;
            let magnitude = pow_times_binomial(two_j, down, co, up, s, down);
            magnitude * Complex64::from_polar(1.0, -(m as f64) * phi)
        }),
    );
    SpinState {
        amplitudes,
        basis: BasisTag::JzBasis,
    }
}

/// `sqrt(C(n, k)) * a^pa * b^pb` evaluated in log space with signs tracked.
fn pow_times_binomial(n: u32, k: u32, a: f64, pa: u32, b: f64, pb: u32) -> f64 {
    if (pa > 0 && a == 0.0) || (pb > 0 && b == 0.0) {
        return 0.0;
    }
    let mut sign = 1.0;
    if a < 0.0 && pa % 2 == 1 {
        sign = -sign;
    }
    if b < 0.0 && pb % 2 == 1 {
        sign = -sign;
    }
    let mut log = 0.5 * ln_binomial(n, k);
    if pa > 0 {
        log += pa as f64 * a.abs().ln();
    }
    if pb > 0 {
        log += pb as f64 * b.abs().ln();
    }
    sign * log.exp()
}

/// Husimi `Q(theta, phi) = |<theta,phi|psi>|^2`; rows follow `thetas`,
/// columns follow `phis`.
pub fn husimi_q(state: &SpinState, thetas: &[f64], phis: &[f64]) -> Result<DMatrix<f64>> {
    if state.basis() != BasisTag::JzBasis {
        return Err(Error::WrongBasis { expected: "J_z" });
    }
    let spin = SpinSize::from_f64((state.dim() as f64 - 1.0) / 2.0)?;
    let mut q = DMatrix::zeros(thetas.len(), phis.len());
    for (r, &theta) in thetas.iter().enumerate() {
        for (col, &phi) in phis.iter().enumerate() {
            let coherent = spin_coherent_state(spin, theta, phi);
            q[(r, col)] = coherent.overlap(state).norm_sqr().clamp(0.0, 1.0);
        }
    }
    Ok(q)
}

/// Uniform grid over `[0, pi]` x `[0, 2 pi)`.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    let thetas = (0..n_theta)
        .map(|k| PI * k as f64 / (n_theta.max(2) - 1) as f64)
        .collect();
    let phis = (0..n_phi)
        .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
        .collect();
    (thetas, phis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use std::f64::consts::FRAC_PI_2;

    fn spin(j: u32) -> SpinSize {
        SpinSize::new(j).unwrap()
    }

    fn expect(state: &SpinState, op: &CMatrix) -> f64 {
        state.expectation(op).re
    }

    #[test]
    fn rejects_zero_and_fractional_spin() {
        assert!(SpinSize::new(0).is_err());
        assert!(SpinSize::from_f64(1.5).is_err());
        assert!(SpinSize::from_f64(0.0).is_err());
        assert_eq!(SpinSize::from_f64(3.0).unwrap().dim(), 7);
    }

    #[test]
    fn jz_ordering_for_spin_one() {
        let ops = build_angular_momentum(spin(1));
        let diag: Vec<f64> = ops.jz.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn jx_matrix_elements_spin_one() {
        // oracle: sqrt(j(j+1) - m(m+1)) / 2 for j = 1, m = 0 or -1
        let expected = (2.0f64).sqrt() / 2.0;
        let ops = build_angular_momentum(spin(1));
        for k in 0..3 {
            assert_eq!(ops.jx[(k, k)], c(0.0));
        }
        assert!((ops.jx[(0, 1)].re - expected).abs() < 1e-15);
        assert!((ops.jx[(1, 2)].re - expected).abs() < 1e-15);
        assert!((ops.jx[(0, 1)].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn parity_eigenvalue_of_m3_in_j4() {
        let s = spin(4);
        let ops = build_angular_momentum(s);
        let k = s.index_of(3).unwrap();
        assert_eq!(ops.parity[(k, k)], c(-1.0));
    }

    #[test]
    fn algebra_holds_up_to_j16() {
        for j in 1..=16 {
            let ops = build_angular_momentum(spin(j));
            let i = Complex64::new(0.0, 1.0);
            assert!(max_abs(&(linalg::commutator(&ops.jx, &ops.jy) - &ops.jz * i)) < 1e-12);
            assert!(max_abs(&(linalg::commutator(&ops.jy, &ops.jz) - &ops.jx * i)) < 1e-12);
            assert!(max_abs(&(linalg::commutator(&ops.jz, &ops.jx) - &ops.jy * i)) < 1e-12);
            let casimir = ops.jx_squared() + ops.jy_squared() + &ops.jz * &ops.jz;
            let jj = j as f64;
            let target = CMatrix::identity(ops.spin.dim(), ops.spin.dim()) * c(jj * (jj + 1.0));
            assert!(max_abs(&(casimir - target)) < 1e-12);
            let p = &ops.parity;
            assert!(max_abs(&(p * &ops.jx * p.adjoint() + &ops.jx)) < 1e-12);
            assert!(max_abs(&(p * &ops.jz * p.adjoint() - &ops.jz)) < 1e-12);
        }
    }

    #[test]
    fn jx_eigenstates_satisfy_eigen_equation() {
        let s = spin(1);
        let st = jx_eigenstate(s, 0).unwrap();
        let ops = build_angular_momentum(s);
        assert!(expect(&st, &ops.jx).abs() < 1e-12);
        assert!(expect(&st, &ops.jx_squared()).abs() < 1e-12);

        let s = spin(4);
        let ops = build_angular_momentum(s);
        let st = jx_eigenstate(s, 4).unwrap();
        assert!((expect(&st, &ops.jx) - 4.0).abs() < 1e-10);
        let residual = &ops.jx * st.amplitudes() - st.amplitudes() * c(4.0);
        assert!(residual.norm() < 1e-10);
        assert!(jx_eigenstate(s, 5).is_err());
    }

    /// Taylor-series exponential, independent of the eigendecomposition path.
    fn taylor_expm(a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..80 {
            term = &term * a * c(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn jx_eigenstate_matches_wigner_rotation() {
        let s = spin(2);
        let ops = build_angular_momentum(s);
        let rot = taylor_expm(&(&ops.jy * Complex64::new(0.0, -FRAC_PI_2)));
        let mut oracle = rot.column(s.index_of(1).unwrap()).into_owned();
        linalg::fix_global_phase(&mut oracle);
        let st = jx_eigenstate(s, 1).unwrap();
        assert!((st.amplitudes() - oracle).norm() < 1e-12);
    }

    #[test]
    fn definite_parity_states() {
        let s = spin(1);
        let plus0 = definite_parity_jx2_eigenstate(s, 0, Parity::Even).unwrap();
        assert_eq!(plus0, jx_eigenstate(s, 0).unwrap());
        assert!(matches!(
            definite_parity_jx2_eigenstate(s, 0, Parity::Odd),
            Err(Error::NoOddZeroState)
        ));

        let s = spin(4);
        let ops = build_angular_momentum(s);
        let plus = definite_parity_jx2_eigenstate(s, 4, Parity::Even).unwrap();
        let minus = definite_parity_jx2_eigenstate(s, 4, Parity::Odd).unwrap();
        assert!((expect(&plus, &ops.parity) - 1.0).abs() < 1e-10);
        assert!((expect(&minus, &ops.parity) + 1.0).abs() < 1e-10);
        assert!(plus.overlap(&minus).norm() < 1e-10);
        let jx2 = ops.jx_squared();
        let res = &jx2 * minus.amplitudes() - minus.amplitudes() * c(16.0);
        assert!(res.norm() < 1e-10);
    }

    #[test]
    fn definite_parity_basis_is_orthonormal() {
        for j in 1..=8 {
            let s = spin(j);
            let mut states = Vec::new();
            for m in 0..=j {
                states.push(definite_parity_jx2_eigenstate(s, m, Parity::Even).unwrap());
                if m > 0 {
                    states.push(definite_parity_jx2_eigenstate(s, m, Parity::Odd).unwrap());
                }
            }
            assert_eq!(states.len(), s.dim());
            for (a, sa) in states.iter().enumerate() {
                for (b, sb) in states.iter().enumerate() {
                    let g = sa.overlap(sb);
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((g - c(target)).norm() < 1e-10, "j={j} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn parity_maps_jx_eigenstates_to_negated_m() {
        for j in 1..=6 {
            let s = spin(j);
            let ops = build_angular_momentum(s);
            for m in -(j as i64)..=(j as i64) {
                let a = jx_eigenstate(s, m).unwrap();
                let b = jx_eigenstate(s, -m).unwrap();
                let v = b.amplitudes().dotc(&(&ops.parity * a.amplitudes()));
                assert!((v.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn coherent_state_expectations() {
        let s = spin(4);
        let ops = build_angular_momentum(s);
        let north = spin_coherent_state(s, 0.0, 0.0);
        assert_eq!(north.amplitudes()[0], c(1.0));
        assert!(north.amplitudes().iter().skip(1).all(|z| *z == c(0.0)));
        // phi only contributes the phase exp(-i j phi) at the pole
        let north = spin_coherent_state(s, 0.0, 1.3);
        assert!((north.amplitudes()[0] - Complex64::from_polar(1.0, -4.0 * 1.3)).norm() < 1e-14);
        assert!(north.amplitudes().iter().skip(1).all(|z| *z == c(0.0)));

        let eq = spin_coherent_state(s, FRAC_PI_2, 0.0);
        assert!((expect(&eq, &ops.jx) - 4.0).abs() < 1e-10);

        let st = spin_coherent_state(s, PI / 3.0, PI / 4.0);
        assert!((expect(&st, &ops.jz) - 2.0).abs() < 1e-10);
        let (th, ph) = (PI / 3.0, PI / 4.0);
        assert!((expect(&st, &ops.jx) - 4.0 * th.sin() * ph.cos()).abs() < 1e-10);
        assert!((expect(&st, &ops.jy) - 4.0 * th.sin() * ph.sin()).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_matches_rotation_route() {
        let s = spin(3);
        let ops = build_angular_momentum(s);
        let (theta, phi) = (2.2, -0.7);
        let rz = linalg::expm_hermitian(&ops.jz, phi);
        let ry = linalg::expm_hermitian(&ops.jy, theta);
        let oracle = rz * ry * linalg::unit_vector(s.dim(), 0);
        let st = spin_coherent_state(s, theta, phi);
        assert!((st.amplitudes() - oracle).norm() < 1e-12);
    }

    #[test]
    fn husimi_of_highest_weight_state() {
        let s = spin(4);
        let st = jz_eigenstate(s, 4).unwrap();
        let q = husimi_q(&st, &[0.0, PI], &[0.0, 1.0, 2.0]).unwrap();
        for col in 0..3 {
            assert!((q[(0, col)] - 1.0).abs() < 1e-12);
            assert!(q[(1, col)].abs() < 1e-12);
        }
    }

    #[test]
    fn husimi_of_cat_state_has_two_equatorial_maxima() {
        let s = spin(4);
        let cat = definite_parity_jx2_eigenstate(s, 4, Parity::Even).unwrap();
        let (thetas, phis) = sphere_grid(37, 72);
        let q = husimi_q(&cat, &thetas, &phis).unwrap();
        let max = q.max();
        let equator = 18; // theta = pi/2
        let at_0 = q[(equator, 0)];
        let at_pi = q[(equator, 36)];
        assert!((at_0 - max).abs() < 1e-12);
        assert!((at_pi - max).abs() < 1e-12);
        // direct evaluation oracle: |<pi/2,0|cat>|^2 = (1 + <pi/2,0|pi/2,pi>)^2/2 ~ 1/2
        assert!((at_0 - 0.5).abs() < 1e-3);
        assert!(q.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn husimi_rejects_transmon_basis() {
        let st = SpinState::new(linalg::unit_vector(3, 0), BasisTag::TransmonBasis).unwrap();
        assert!(husimi_q(&st, &[0.0], &[0.0]).is_err());
    }
}
