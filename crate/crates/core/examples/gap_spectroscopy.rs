//! Ramsey measurement of the even-even gap at j = 4, h/gamma_x = 0.6:
//! prepare (|4,4>_+ + |4,3>_+)/sqrt 2, ramp h up, hold, ramp back, read out,
//! and Fourier transform the trace.

use lmg_qudit::lmg::{self, LmgParams};
use lmg_qudit::protocols::{run_gap_ramsey, GapRamseyConfig, ProtocolOptions, RamseyGap};
use lmg_qudit::spin::SpinSize;

fn main() -> lmg_qudit::Result<()> {
    let cfg = GapRamseyConfig::standard(4, 0.6, RamseyGap::EvenEven)?;
    let r = run_gap_ramsey(&cfg, &ProtocolOptions::default())?;
    for (t, s) in r.delta_ts.iter().zip(&r.signal).step_by(4) {
        let bar = "#".repeat((s * 50.0).round() as usize);
        println!("{:7.3} us  {s:.3} {bar}", t * 1e6);
    }
    let exact = lmg::sector_gap(SpinSize::new(4)?, &LmgParams::new(0.6, 1.0), lmg::GapKind::EvenEven)?;
    println!("\nmeasured gap  {:.5} Omega ({:.1} kHz)", r.gap_over_omega, r.gap_hz / 1e3);
    println!("exact gap     {exact:.5} Omega");
    println!("one bin       {:.5} Omega", r.bin_over_omega);

    println!("\nj  h/gx  even-odd (meas / exact)   even-even (meas / exact)");
    for j in 1..=4 {
        for r in [0.3, 1.5] {
            let mut row = format!("{j}  {r:.1} ");
            for kind in [RamseyGap::EvenOdd, RamseyGap::EvenEven] {
                let res = run_gap_ramsey(&GapRamseyConfig::standard(j, r, kind)?, &ProtocolOptions::default())?;
                let exact = lmg::sector_gap(SpinSize::new(j)?, &LmgParams::new(r, 1.0), kind.lmg_kind())?;
                row += &format!("   {:8.5} / {exact:8.5}", res.gap_over_omega);
            }
            println!("{row}");
        }
    }
    Ok(())
}
