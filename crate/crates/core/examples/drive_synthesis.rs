//! From an LMG ramp to per-transition drives: detunings, complex amplitudes,
//! the compensating phases, and sampled IQ envelopes.

use lmg_qudit::drive::{lmg_to_drive, synthesize_lab_waveforms, Couplings, DriveOptions, LmgSchedule, RampShape, Segment, Sector, TransmonSpec};
use lmg_qudit::lmg::{self, Basis};
use lmg_qudit::spin::SpinSize;

fn main() -> lmg_qudit::Result<()> {
    let s = SpinSize::new(2)?;
    let omega = 1.91e6;
    let ramp = Segment::ramp(Couplings::new(0.0, 1.0), Couplings::new(0.8, 1.0), 200e-9, RampShape::RaisedCosine, omega);
    let sched = LmgSchedule::new(vec![ramp])?;
    let ds = lmg_to_drive(s, &sched, Sector::Full, DriveOptions::default())?;

    for t in [0.0, 100e-9, 200e-9] {
        let det: Vec<f64> = ds.detunings(t)?.iter().map(|d| d / (2.0 * std::f64::consts::PI * 1e6)).collect();
        let amp: Vec<f64> = ds.amplitudes(t)?.iter().map(|a| a.norm() / (2.0 * std::f64::consts::PI * 1e6)).collect();
        println!("t = {:5.0} ns  detunings (MHz) {det:7.3?}", t * 1e9);
        println!("              |Omega_n|  (MHz) {amp:7.3?}");
        println!("              zeta_n     (rad) {:7.3?}", ds.zeta(t)?);
    }

    // the rotating-frame Hamiltonian rebuilt from the drives is H_LMG * Omega
    let t = 137e-9;
    let target = lmg::build_lmg(s, &sched.params_at(t)?, Basis::Transmon) * lmg_qudit::linalg::c(2.0 * std::f64::consts::PI * omega);
    let err = lmg_qudit::linalg::max_abs(&(ds.rotating_hamiltonian(t)? - target));
    println!("\nreassembly error at t = 137 ns: {err:.1e} rad/s");

    let iq = synthesize_lab_waveforms(&ds, &TransmonSpec::table_s1())?;
    println!("\n{} IQ samples per transition at {:.0} GS/s", iq.n_samples(), iq.sample_rate / 1e9);
    for u in &iq.end_of_pulse_updates {
        println!(
            "transition {}: end-of-pulse modulation {:8.3} MHz, phase jump {:7.3} rad",
            u.transition,
            u.modulation_freq / (2.0 * std::f64::consts::PI * 1e6),
            u.phase_jump
        );
    }
    Ok(())
}
