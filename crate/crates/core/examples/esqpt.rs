//! Excited-state spectroscopy at j = 8, h/gamma_x = 0.18. Even/odd pairs
//! stay degenerate below the classical barrier and split above it.

use lmg_qudit::protocols::esqpt::esqpt_oracle;
use lmg_qudit::protocols::{run_esqpt, EsqptConfig, ProtocolOptions};

fn main() -> lmg_qudit::Result<()> {
    let cfg = EsqptConfig::new(8, 0.18);
    let r = run_esqpt(&cfg, &ProtocolOptions::default())?;
    let (even, odd) = esqpt_oracle(8, 0.18, 1.0)?;
    println!("pair  mean E   splitting   bins   exact splitting");
    for p in &r.pairs {
        println!(
            "{:4}  {:6.3}   {:8.4}   {:5.1}   {:8.4}",
            p.index,
            p.mean_energy,
            p.splitting,
            p.splitting / r.bin_over_omega,
            (odd[p.index] - even[p.index]).abs()
        );
    }
    println!("\nsplitting exceeds 2 bins at E = {:?}", r.crossing_energy);
    println!("j E_c = {:.4}", r.critical_energy);
    Ok(())
}
