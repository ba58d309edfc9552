//! Semiclassical density of states with its logarithmic ESQPT singularity,
//! against a histogram of the j = 500 spectrum.

use lmg_qudit::semiclassics::{dos, dos_grid, eigenvalue_histogram};
use lmg_qudit::spin::SpinSize;

fn main() -> lmg_qudit::Result<()> {
    let h = 0.18;
    let (edges, hist) = eigenvalue_histogram(SpinSize::new(500)?, h, 20)?;
    println!("   E/j range         histogram   semiclassical");
    for k in 0..hist.len() {
        // bin average of the smooth curve
        let fine = 40;
        let mean: f64 = (0..fine)
            .map(|i| {
                let e = edges[k] + (edges[k + 1] - edges[k]) * (i as f64 + 0.5) / fine as f64;
                dos::density_of_states(h, e).map(|p| if p.rho.is_finite() { p.rho } else { 0.0 })
            })
            .sum::<lmg_qudit::Result<f64>>()?
            / fine as f64;
        println!("[{:+.3}, {:+.3}]   {:8.4}    {mean:8.4}", edges[k], edges[k + 1], hist[k]);
    }

    let curve = dos_grid(h, 2000)?;
    let de = curve.energies[1] - curve.energies[0];
    let total: f64 = curve.rho.iter().filter(|r| r.is_finite()).sum::<f64>() * de;
    println!("\nnormalization on a 2000-point grid: {total:.4}");
    for d in [1e-2, 1e-4, 1e-6] {
        println!("rho(-h - {d:.0e}) = {:.4}", dos::density_of_states(h, -h - d)?.rho);
    }
    Ok(())
}
