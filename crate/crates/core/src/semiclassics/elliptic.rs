//! Legendre elliptic integrals of the first kind by the arithmetic-geometric
//! mean.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-15;

/// Closest `m` to 1 for which `K(m)` is still reported.
pub const K_CUTOFF: f64 = 1.0 - 1e-14;

/// `K(m)` for `m < 1`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !m.is_finite() || m >= 1.0 {
        return Err(Error::EllipticDomain(format!("K(m) needs m < 1, got {m}")));
    }
    if m > K_CUTOFF {
        return Err(Error::EllipticDomain(format!("K(m) diverges as m -> 1, got {m}")));
    }
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    while (a - b).abs() > AGM_TOL * a {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    Ok(PI / (a + b))
}

/// `F(phi, m)`. For `m > 1` the reciprocal-modulus identity
/// `F(phi, m) = F(asin(sqrt(m) sin phi), 1/m) / sqrt(m)` is used, which needs
/// `sqrt(m) |sin phi| <= 1`.
pub fn elliptic_f(phi: f64, m: f64) -> Result<f64> {
    if !phi.is_finite() || !m.is_finite() {
        return Err(Error::EllipticDomain("non-finite argument".into()));
    }
    if m > 1.0 {
        let arg = m.sqrt() * phi.sin();
        if arg.abs() > 1.0 + 1e-14 {
            return Err(Error::EllipticDomain(format!(
                "F(phi, m) with m = {m} > 1 needs sqrt(m)|sin phi| <= 1, got {arg}"
            )));
        }
        return Ok(elliptic_f(arg.clamp(-1.0, 1.0).asin(), 1.0 / m)? / m.sqrt());
    }
    if m == 1.0 {
        if phi.abs() >= FRAC_PI_2 {
            return Err(Error::EllipticDomain("F(phi, 1) diverges at |phi| >= pi/2".into()));
        }
        return Ok(phi.tan().asinh());
    }
    // periodicity F(phi + k pi) = F(phi) + 2k K
    let k_turns = (phi / PI).round();
    let reduced = phi - k_turns * PI;
    let base = if k_turns != 0.0 { 2.0 * k_turns * elliptic_k(m)? } else { 0.0 };
    Ok(base + landen(reduced, m))
}

// descending Landen transformation with phase tracking, |phi| <= pi/2
fn landen(phi: f64, m: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    let mut p = phi;
    let mut scale = 1.0;
    while (a - b).abs() > AGM_TOL * a {
        let t = (b / a * p.tan()).atan();
        p += t + PI * ((p - t) / PI).round();
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
        scale *= 2.0;
    }
    p / (scale * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Carlson's symmetric integral R_F by duplication, the independent oracle
    fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
        loop {
            let l = x.sqrt() * y.sqrt() + y.sqrt() * z.sqrt() + z.sqrt() * x.sqrt();
            x = 0.25 * (x + l);
            y = 0.25 * (y + l);
            z = 0.25 * (z + l);
            let mu = (x + y + z) / 3.0;
            let dx = 1.0 - x / mu;
            let dy = 1.0 - y / mu;
            let dz = 1.0 - z / mu;
            if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
                let e2 = dx * dy - dz * dz;
                let e3 = dx * dy * dz;
                return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
            }
        }
    }

    fn f_oracle(phi: f64, m: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
    }

    #[test]
    fn defining_values() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        for phi in [0.1, 0.7, 1.3] {
            assert!((elliptic_f(phi, 0.0).unwrap() - phi).abs() < 1e-15);
        }
        // K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi))
        assert!((elliptic_k(0.5).unwrap() - 1.854_074_677_301_372).abs() < 1e-14);
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn agrees_with_carlson() {
        for &m in &[-3.0, -0.5, 0.0, 0.3, 0.9, 0.999] {
            for &phi in &[0.05, 0.4, 1.0, 1.5, FRAC_PI_2] {
                let want = f_oracle(phi, m);
                assert!((elliptic_f(phi, m).unwrap() - want).abs() < 1e-12 * want.max(1.0), "phi {phi} m {m}");
            }
            let k = f_oracle(FRAC_PI_2, m);
            assert!((elliptic_k(m).unwrap() - k).abs() < 1e-12 * k);
        }
    }

    #[test]
    fn periodicity_and_oddness() {
        let (phi, m) = (0.8, 0.6);
        let k = elliptic_k(m).unwrap();
        assert!((elliptic_f(phi + PI, m).unwrap() - elliptic_f(phi, m).unwrap() - 2.0 * k).abs() < 1e-12);
        assert!((elliptic_f(-phi, m).unwrap() + elliptic_f(phi, m).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_modulus_branch_matches_carlson() {
        // R_F covers m > 1 as long as 1 - m sin^2 phi >= 0
        for &m in &[1.5, 2.0, 7.0] {
            let phi_max = (1.0 / f64::sqrt(m)).asin();
            for frac in [0.2, 0.6, 0.95] {
                let phi = frac * phi_max;
                assert!((elliptic_f(phi, m).unwrap() - f_oracle(phi, m)).abs() < 1e-12);
            }
        }
        assert!(elliptic_f(1.2, 4.0).is_err());
    }
}
