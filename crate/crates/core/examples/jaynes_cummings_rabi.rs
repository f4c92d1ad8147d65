//! Vacuum Rabi oscillation of one photon and a qubit, exact evolution
//! against the Rabi formula.

use energy_exchange::analysis::{simulate, transition_probability, Target};
use energy_exchange::dynamics::{rabi_probability, EvolutionConfig, Method};
use energy_exchange::models::{FieldState, JaynesCummingsParams, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = 0.05;
    for delta in [0.0, 0.05, 0.1] {
        let model = ModelSpec::JaynesCummings(JaynesCummingsParams {
            nu: 1.0 + delta,
            omega: 1.0,
            g,
            field_cutoff: 4,
            field: FieldState::Fock { n: 1 },
            anti_rotating: false,
        });
        let traj = simulate(&model, &EvolutionConfig::new(1.0, 60.0, Method::MatrixExponential))?;
        let p = transition_probability(&traj, Target::QubitExcited)?;
        let worst = traj
            .times
            .iter()
            .zip(&p)
            .map(|(t, p)| (p - rabi_probability(2.0 * g, delta, *t)).abs())
            .fold(0.0, f64::max);
        println!("delta = {delta:<4}  max P = {:.4}  max |P - Rabi| = {worst:.1e}", p.iter().copied().fold(0.0, f64::max));
    }
    Ok(())
}
