//! Checks the rotating-wave approximation: propagate the full lab-frame
//! transmon Hamiltonian with all drive tones, move back to the rotating
//! frame and compare with the effective LMG evolution.
//!
//! `cargo run --release --example rwa_validation -- 1e-6` runs the full
//! microsecond; the default is shorter.

use lmg_qudit::drive::{lmg_to_drive, DriveOptions, LmgSchedule, Sector};
use lmg_qudit::evolve::{self, PropagatorConfig};
use lmg_qudit::lmg::LmgParams;
use lmg_qudit::spin::{self, SpinSize};

fn main() -> lmg_qudit::Result<()> {
    let duration: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200e-9);
    let s = SpinSize::new(2)?;
    let sched = LmgSchedule::constant(LmgParams::new(0.0, 1.0), duration)?;
    let ds = lmg_to_drive(s, &sched, Sector::Full, DriveOptions::default())?;
    let psi0 = spin::jz_eigenstate(s, 2)?;
    let times = evolve::uniform_times(duration, 5);

    let rot = evolve::propagate(&psi0, &ds, &PropagatorConfig::default(), None, &times)?;
    let start = std::time::Instant::now();
    let lab = evolve::propagate(&psi0, &ds, &PropagatorConfig::lab(), None, &times)?;
    println!("lab-frame propagation: {:.1} s", start.elapsed().as_secs_f64());

    println!("   t (ns)   fidelity");
    for (k, t) in times.iter().enumerate() {
        let (evolve::StateHistory::Pure(a), evolve::StateHistory::Pure(b)) = (&rot.history, &lab.history) else { unreachable!() };
        println!("{:9.1}   {:.6}", t * 1e9, a[k].dotc(&b[k]).norm_sqr());
    }
    Ok(())
}
