//! State preparation as a chain of rotations between adjacent transmon
//! levels, the idealized form of sequential two-level pulses.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// A unitary acting on levels `(n, n + 1)` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjacentRotation {
    pub level: usize,
    /// Row-major `2x2` block.
    pub block: [[Complex64; 2]; 2],
}

impl AdjacentRotation {
    fn apply(&self, v: &mut CVector) {
        let (a, b) = (v[self.level], v[self.level + 1]);
        v[self.level] = self.block[0][0] * a + self.block[0][1] * b;
        v[self.level + 1] = self.block[1][0] * a + self.block[1][1] * b;
    }

    fn apply_adjoint(&self, v: &mut CVector) {
        let (a, b) = (v[self.level], v[self.level + 1]);
        v[self.level] = self.block[0][0].conj() * a + self.block[1][0].conj() * b;
        v[self.level + 1] = self.block[0][1].conj() * a + self.block[1][1].conj() * b;
    }
}

/// Pulse sequence taking level 0 to a target state.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationSequence {
    pub dim: usize,
    pub rotations: Vec<AdjacentRotation>,
}

impl PreparationSequence {
    /// Builds the sequence `(0,1), (1,2), ...`: each rotation leaves the
    /// final amplitude on its lower level and passes the rest upward.
    pub fn to_state(target: &CVector) -> Result<Self> {
        let d = target.len();
        let norm = target.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        if d == 1 {
            return Ok(Self { dim: 1, rotations: Vec::new() });
        }
        // tail[k] = sqrt(sum_{i >= k} |v_i|^2)
        let mut tail = vec![0.0f64; d + 1];
        for k in (0..d).rev() {
            tail[k] = (tail[k + 1].powi(2) + target[k].norm_sqr()).sqrt();
        }
        let mut rotations = Vec::new();
        for k in 0..d - 1 {
            let r = tail[k];
            if r < 1e-15 {
                break;
            }
            let top = target[k] / r;
            let bottom = if k == d - 2 { target[d - 1] / r } else { Complex64::new(tail[k + 1] / r, 0.0) };
            rotations.push(AdjacentRotation {
                level: k,
                block: [[top, -bottom.conj()], [bottom, top.conj()]],
            });
        }
        Ok(Self { dim: d, rotations })
    }

    pub fn apply(&self, v: &mut CVector) {
        for r in &self.rotations {
            r.apply(v);
        }
    }

    /// Undoes the sequence: maps the target state back to level 0.
    pub fn apply_inverse(&self, v: &mut CVector) {
        for r in self.rotations.iter().rev() {
            r.apply_adjoint(v);
        }
    }

    pub fn unitary(&self) -> CMatrix {
        let mut u = CMatrix::identity(self.dim, self.dim);
        for c in 0..self.dim {
            let mut col = u.column(c).into_owned();
            self.apply(&mut col);
            u.set_column(c, &col);
        }
        u
    }

    /// Ground-level population after undoing the preparation, i.e. the
    /// probability of reading out level 0.
    pub fn measure_pure(&self, psi: &CVector) -> f64 {
        let mut v = psi.clone();
        self.apply_inverse(&mut v);
        v[0].norm_sqr()
    }

    pub fn measure_mixed(&self, rho: &CMatrix) -> f64 {
        let u = self.unitary();
        let back = u.adjoint() * rho * &u;
        back[(0, 0)].re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, unit_vector};

    fn sample(d: usize, seed: u64) -> CVector {
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let v = CVector::from_fn(d, |_, _| Complex64::new(next(), next()));
        v.normalize()
    }

    #[test]
    fn prepares_arbitrary_states() {
        for d in [2, 3, 5, 9] {
            let v = sample(d, d as u64);
            let seq = PreparationSequence::to_state(&v).unwrap();
            let mut g = unit_vector(d, 0);
            seq.apply(&mut g);
            assert!((g - &v).norm() < 1e-14);
            assert!((seq.measure_pure(&v) - 1.0).abs() < 1e-14);
            let u = seq.unitary();
            assert!((u.adjoint() * &u - CMatrix::identity(d, d)).norm() < 1e-14);
        }
    }

    #[test]
    fn sparse_targets_and_mixed_readout() {
        // |5> alone: a chain of full swaps
        let v = unit_vector(9, 5);
        let seq = PreparationSequence::to_state(&v).unwrap();
        let mut g = unit_vector(9, 0);
        seq.apply(&mut g);
        assert!((g - &v).norm() < 1e-15);
        let rho = &v * v.adjoint();
        assert!((seq.measure_mixed(&rho) - 1.0).abs() < 1e-14);
        let w = (unit_vector(3, 0) + unit_vector(3, 2)) * c(0.5f64.sqrt());
        let seq = PreparationSequence::to_state(&w).unwrap();
        assert!((seq.measure_pure(&unit_vector(3, 0)) - 0.5).abs() < 1e-15);
    }
}
