//! Full J_x distribution of the LMG ground state. Below the critical point
//! it is bimodal with peaks near the classical minima j sin(theta_0).

use lmg_qudit::protocols::{classical_order_peak, run_order_parameter, OrderParameterConfig, ProtocolOptions};

fn main() -> lmg_qudit::Result<()> {
    let mut cfg = OrderParameterConfig::new(8, vec![0.0, 0.5, 0.9, 1.5]);
    cfg.doubled = true;
    for d in run_order_parameter(&cfg, &ProtocolOptions::default())? {
        println!("h/gx = {:.1}  classical peak m = {:.2}", d.h_over_gx, classical_order_peak(8.0, d.h_over_gx));
        for (m, p) in d.m_values.iter().zip(&d.probabilities) {
            println!("  {m:+3}  {p:.4} {}", "#".repeat((p * 100.0).round() as usize));
        }
    }
    Ok(())
}
