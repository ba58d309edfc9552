//! Quench from |4,4> and |4,3> into the broken (h = 0) and normal (h = 2)
//! phases. The return probability collapses only in the broken phase; with
//! T1 decay switched on the odd start leaks into even parity.

use lmg_qudit::evolve::NoiseModel;
use lmg_qudit::protocols::{run_dpt, DptConfig, ProtocolOptions};

fn main() -> lmg_qudit::Result<()> {
    let noisy = ProtocolOptions {
        noise: Some(NoiseModel::default_for(9)),
        ..ProtocolOptions::default()
    };
    for (h, m) in [(0.0, 4), (2.0, 4), (0.0, 3), (2.0, 3)] {
        let mut cfg = DptConfig::new(4, h, 1.0);
        cfg.initial_m = m;
        cfg.n_points = 9;
        let ideal = run_dpt(&cfg, &ProtocolOptions::default())?;
        let decayed = run_dpt(&cfg, &noisy)?;
        println!("h = {h}, start |4,{m}>");
        println!("  t (us)  echo    parity(ideal)  parity(T1)");
        for k in 0..cfg.n_points {
            println!(
                "  {:5.2}  {:.3}   {:+.6}      {:+.6}",
                ideal.trajectory.times[k] * 1e6,
                ideal.echo[k],
                ideal.trajectory.parity[k],
                decayed.trajectory.parity[k]
            );
        }
    }
    Ok(())
}
