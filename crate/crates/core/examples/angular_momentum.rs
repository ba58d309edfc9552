//! Spin-j operators, the parity operator and the definite-parity J_x^2
//! eigenstates the protocols start from.

use lmg_qudit::linalg::{commutator, max_abs, c};
use lmg_qudit::spin::{self, build_angular_momentum, Parity, SpinSize};

fn main() -> lmg_qudit::Result<()> {
    let s = SpinSize::new(4)?;
    let ops = build_angular_momentum(s);
    let i = num_complex::Complex64::i();

    let lie = commutator(&ops.jx, &ops.jy) - &ops.jz * i;
    let casimir = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz;
    let jj = s.jf() * (s.jf() + 1.0);
    println!("j = {}, dim = {}", s.j(), s.dim());
    println!("|[Jx,Jy] - iJz|      = {:.1e}", max_abs(&lie));
    println!("|J^2 - j(j+1)|       = {:.1e}", max_abs(&(casimir - lmg_qudit::linalg::CMatrix::identity(s.dim(), s.dim()) * c(jj))));
    println!("|[Jx^2, parity]|     = {:.1e}", max_abs(&commutator(&(&ops.jx * &ops.jx), &ops.parity)));

    // |j,m>_(+/-) = (|j,m>_x +/- |j,-m>_x) / sqrt 2
    println!("\n  m  parity   <Jx^2>   <parity>");
    for m in (0..=s.j()).rev() {
        for p in [Parity::Even, Parity::Odd] {
            let Ok(st) = spin::definite_parity_jx2_eigenstate(s, m, p) else { continue };
            let jx2 = st.expectation(&(&ops.jx * &ops.jx)).re;
            let par = st.expectation(&ops.parity).re;
            println!("{m:>3}  {p:?}{:w$} {jx2:>7.3}  {par:>7.3}", "", w = 6 - format!("{p:?}").len());
        }
    }

    let coherent = spin::spin_coherent_state(s, std::f64::consts::FRAC_PI_2, 0.0);
    println!("\ncoherent state on the equator: <Jx> = {:.3}", coherent.expectation(&ops.jx).re);
    Ok(())
}
