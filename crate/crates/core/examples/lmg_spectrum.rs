//! Parity-resolved LMG spectrum across the transition and the two lowest
//! gaps, the quantities the Ramsey protocol measures.

use lmg_qudit::lmg::{self, Basis, GapKind, LmgParams};
use lmg_qudit::spin::{Parity, SpinSize};

fn main() -> lmg_qudit::Result<()> {
    let s = SpinSize::new(4)?;
    println!("h/gx   even-odd   even-even   (units of Omega)");
    for k in 0..=10 {
        let r = 0.2 * k as f64;
        let p = LmgParams::new(r, 1.0);
        let eo = lmg::sector_gap(s, &p, GapKind::EvenOdd)?;
        let ee = lmg::sector_gap(s, &p, GapKind::EvenEven)?;
        println!("{r:4.1}  {eo:9.5}  {ee:10.5}");
    }

    let spec = lmg::spectrum(s, &LmgParams::new(0.5, 1.0), Basis::Transmon)?;
    println!("\nh/gx = 0.5 even ladder: {:.4?}", spec.sector(Parity::Even));
    println!("h/gx = 0.5 odd ladder:  {:.4?}", spec.sector(Parity::Odd));

    let rows = lmg::spectrum_sweep(s, 1.0, &(0..=40).map(|k| 0.05 * k as f64).collect::<Vec<_>>())?;
    let out = std::env::temp_dir().join("lmg_spectrum_j4.csv");
    lmg::spectrum_csv(&rows).write(&out)?;
    println!("\nfull sweep written to {}", out.display());
    Ok(())
}
