//! Mean-field back-reaction: the classical oscillator feels `-lambda <Q>`
//! and pays for the detector's energy, so the total stays put.

use energy_exchange::analysis::{energy_ledger, simulate};
use energy_exchange::dynamics::{EvolutionConfig, Method};
use energy_exchange::models::{ModelSpec, QubitSemiClassicalParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = QubitSemiClassicalParams {
        omega: 1.0,
        nu: 1.0,
        lambda: 0.05,
        x0: 1.0,
    };
    for (name, model) in [("prescribed", ModelSpec::QubitDrive(p)), ("mean-field", ModelSpec::NeoClassicalQubit(p))] {
        let mut cfg = EvolutionConfig::new(1e-3, 50.0, Method::MidpointPiecewise);
        cfg.record_stride = 1000;
        let ledger = energy_ledger(&simulate(&model, &cfg)?, &model)?;
        println!("{name}:");
        for i in (0..ledger.len()).step_by(10) {
            println!(
                "  t = {:>4}  field {:.6}  detector {:+.6}  total {:+.6}",
                ledger.times[i], ledger.e_classical[i], ledger.e_quantum_free[i], ledger.e_total[i]
            );
        }
        println!("  total drift {:.2e}", ledger.total_drift());
    }
    Ok(())
}
