//! Peak probability against detuning deep in the weak-coupling regime,
//! fitted on log-log axes. The slope approaches -2.

use energy_exchange::analysis::{golden_rule_fit, peak_detuning_scan, Target};
use energy_exchange::dynamics::{EvolutionConfig, Method};
use energy_exchange::models::{FieldState, JaynesCummingsParams, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ModelSpec::JaynesCummings(JaynesCummingsParams {
        nu: 1.0,
        omega: 1.0,
        g: 5e-4,
        field_cutoff: 3,
        field: FieldState::Fock { n: 1 },
        anti_rotating: false,
    });
    let deltas: Vec<f64> = (0..=20).map(|i| 0.01 * 10f64.powf(i as f64 / 10.0)).collect();
    let cfg = EvolutionConfig::new(0.05, 10.0, Method::MatrixExponential);
    let scan = peak_detuning_scan(&model, &cfg, Target::QubitExcited, &deltas)?;
    for (d, p) in scan.successful() {
        println!("{d:>8.4} {p:.4e}");
    }
    let fit = golden_rule_fit(&scan)?;
    println!(
        "slope {:.4} (95% {:.4}..{:.4}), smallest delta/Omega {:.1}",
        fit.fit.slope, fit.fit.ci95.0, fit.fit.ci95.1, fit.min_ratio
    );
    Ok(())
}
