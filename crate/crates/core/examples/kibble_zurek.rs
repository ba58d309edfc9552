//! Ramp h from 2 to 0 over times T and measure how much population ends in
//! the h = 0 ground state. Fast ramps saturate at the overlap of the two
//! ground states.

use lmg_qudit::protocols::{kz_fast_limit, run_kibble_zurek, KibbleZurekConfig, ProtocolOptions};

fn main() -> lmg_qudit::Result<()> {
    for j in [1, 2, 4] {
        let cfg = KibbleZurekConfig::new(j);
        let pts = run_kibble_zurek(&cfg, &ProtocolOptions::default())?;
        println!("j = {j}  (fast limit {:.4})", kz_fast_limit(&cfg)?);
        for p in pts.iter().step_by(3) {
            println!("  T = {:9.3e} s  speed {:9.3e}  P0 = {:.4}", p.ramp_time, p.ramp_speed, p.ground_population);
        }
    }

    // doubled spin: j = 8 fits in the 9 even levels of the qudit
    let mut cfg = KibbleZurekConfig::new(8);
    cfg.doubled = true;
    cfg.ramp_times = vec![1e-8, 1e-6, 5e-5];
    for p in run_kibble_zurek(&cfg, &ProtocolOptions::default())? {
        println!("j = 8 doubled  T = {:9.3e} s  P0 = {:.4}", p.ramp_time, p.ground_population);
    }
    Ok(())
}
