//! First-order perturbation theory for two coupled modes: closed form,
//! numerical double integral, and exact evolution side by side.

use energy_exchange::analysis::{simulate, transition_probability, Target};
use energy_exchange::dynamics::{dyson_first_order, EvolutionConfig, Method};
use energy_exchange::models::{BeamSplitterParams, FieldState, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = BeamSplitterParams {
        nu: 1.2,
        omega: 1.0,
        g: 1e-3,
        field_cutoff: 26,
        detector_cutoff: 4,
        field: FieldState::coherent(2.0),
    };
    let traj = simulate(&ModelSpec::BeamSplitter(p), &EvolutionConfig::new(1.0, 10.0, Method::MatrixExponential))?;
    let exact = transition_probability(&traj, Target::DetectorLevel(1))?;
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "closed", "dyson", "exact");
    for (t, e) in traj.times.iter().zip(&exact).skip(1) {
        let d = dyson_first_order(&p, *t);
        println!("{t:>5} {:>12.4e} {:>12.4e} {e:>12.4e}", d.closed_form, d.double_integral);
    }
    Ok(())
}
