//! A qubit driven by a prescribed classical oscillation. The weak-drive
//! probability follows the perturbative sinc^2 line shape near resonance;
//! further out the counter-rotating half of the drive adds visible ripples.

use energy_exchange::analysis::{simulate, transition_probability, Target};
use energy_exchange::dynamics::{perturbative_pe, EvolutionConfig, Method};
use energy_exchange::models::{ModelSpec, QubitSemiClassicalParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = 6.0 * std::f64::consts::PI;
    println!("{:>6} {:>12} {:>12}", "delta", "numeric", "perturbative");
    for i in -4..=4 {
        let delta = 0.1 * i as f64;
        let p = QubitSemiClassicalParams {
            omega: 1.0,
            nu: 1.0 + delta,
            lambda: 1e-3,
            x0: 1.0,
        };
        let traj = simulate(&ModelSpec::QubitDrive(p), &EvolutionConfig::new(0.01, t, Method::MidpointPiecewise))?;
        let numeric = *transition_probability(&traj, Target::QubitExcited)?.last().unwrap();
        let formula = perturbative_pe(p.lambda * p.x0, p.omega, p.nu, t);
        println!("{delta:>6.2} {numeric:>12.4e} {formula:>12.4e}");
    }
    Ok(())
}
