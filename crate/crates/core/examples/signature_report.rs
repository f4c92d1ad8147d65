//! Threshold, intensity and short-time signatures of the semi-classical
//! drive, computed from three scans.

use energy_exchange::analysis::{
    detuning_scan, intensity_scan, signature_report, time_scan, SignatureTolerances, Target,
};
use energy_exchange::dynamics::{EvolutionConfig, Method};
use energy_exchange::models::{DrivenOscillatorParams, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = ModelSpec::DrivenOscillator(DrivenOscillatorParams {
        omega: 1.0,
        nu: 1.0,
        lambda: 1e-3,
        x0: 1.0,
        detector_cutoff: 6,
    });
    let cfg = EvolutionConfig::new(0.01, 6.0 * std::f64::consts::PI, Method::MidpointPiecewise);
    let target = Target::DetectorLevel(1);
    let deltas: Vec<f64> = (-10..=10).map(|i| 0.05 * i as f64).collect();
    let intensities: Vec<f64> = (1..=16).map(f64::from).collect();
    let times: Vec<f64> = (0..8).map(|i| 1e-3 * 4f64.powi(i)).collect();
    let scans = [
        detuning_scan(&model, &cfg, target, &deltas)?,
        intensity_scan(&model, &cfg, target, &intensities)?,
        time_scan(&model, &cfg, target, &times)?,
    ];
    let report = signature_report(&scans, &SignatureTolerances::default())?;
    for (name, check) in [
        ("threshold", &report.threshold),
        ("intensity slope", &report.intensity_slope),
        ("intensity gap", &report.intensity_gap),
        ("short time", &report.short_time),
    ] {
        println!("{name:<16} {:?}  {}", check.status, check.detail);
    }
    Ok(())
}
