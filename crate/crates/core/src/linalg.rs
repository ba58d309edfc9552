//! Small dense linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending
/// order. Columns of the returned matrix are the matching eigenvectors.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvalsh_real(h: DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = eigh(h);
    expm_from_eigh(&values, &vectors, t)
}

pub fn expm_from_eigh(values: &[f64], vectors: &CMatrix, t: f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (col, &lambda) in values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        for r in 0..n {
            scaled[(r, col)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

/// Apply `exp(-i H t)` to a vector given the eigen-decomposition of `H`.
pub fn apply_expm(values: &[f64], vectors: &CMatrix, psi: &CVector, t: f64) -> CVector {
    let mut coeffs = vectors.ad_mul(psi);
    for (k, &lambda) in values.iter().enumerate() {
        coeffs[k] *= Complex64::from_polar(1.0, -lambda * t);
    }
    vectors * coeffs
}

/// Fix the global phase so the largest-magnitude amplitude is real and
/// positive. Ties (within a relative 1e-9) go to the lowest index.
pub fn fix_global_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-9))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    max_abs(&(m - m.adjoint())) <= tol
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// `|<a|b>|^2`
pub fn overlap_sq(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm_sqr()
}

pub fn populations(psi: &CVector) -> Vec<f64> {
    psi.iter().map(|z| z.norm_sqr()).collect()
}

pub fn unit_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = c(1.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_ascending() {
        let h = to_complex(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]));
        let (vals, vecs) = eigh(&h);
        assert_eq!(vals, vec![-1.0, 3.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_fix_picks_lowest_index_on_tie() {
        let mut v = CVector::from_vec(vec![Complex64::new(0.0, 0.5), Complex64::new(-0.5, 0.0)]);
        fix_global_phase(&mut v);
        assert!((v[0] - c(0.5)).norm() < 1e-15);
        assert!((v[1] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn expm_of_pauli_x() {
        let x = to_complex(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let u = expm_hermitian(&x, std::f64::consts::FRAC_PI_2);
        // exp(-i pi/2 X) = -i X
        assert!((u[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u[(0, 0)].norm() < 1e-14);
    }
}
