use serde::Serialize;

use super::{rabi_frequency, AnalysisError, ScanAxis, ScanResult};
use crate::dynamics::formulas::GOLDEN_RULE_MIN_RATIO;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Normal-approximation 95% interval `slope +- 1.96 stderr`.
    pub ci95: (f64, f64),
    pub r_squared: f64,
    pub points: usize,
}

/// Fit `y = C x^k` on the points where both coordinates are positive and finite.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<PowerLawFit, AnalysisError> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite() && **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(AnalysisError::InsufficientData {
            needed: 3,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::InsufficientData { needed: 2, found: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(PowerLawFit {
        slope,
        intercept,
        slope_stderr,
        ci95: (slope - 1.96 * slope_stderr, slope + 1.96 * slope_stderr),
        r_squared,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenRuleFit {
    pub fit: PowerLawFit,
    /// Resonant population oscillation frequency of the template model.
    pub rabi_frequency: f64,
    /// Smallest `|delta| / Omega` in the scan.
    pub min_ratio: f64,
}

/// Log-log regression of peak probability against `|delta|`.
///
/// Requires a [`ScanAxis::PeakDetuning`] scan with every point at
/// `|delta| / Omega >= 10`.
pub fn golden_rule_fit(scan: &ScanResult) -> Result<GoldenRuleFit, AnalysisError> {
    if scan.axis != ScanAxis::PeakDetuning {
        return Err(AnalysisError::Axis(format!(
            "golden-rule fit needs a peak_detuning scan, got {}",
            scan.axis
        )));
    }
    let omega = rabi_frequency(&scan.model)?;
    let min_ratio = scan
        .values
        .iter()
        .map(|d| d.abs() / omega)
        .fold(f64::INFINITY, f64::min);
    if !(min_ratio >= GOLDEN_RULE_MIN_RATIO * (1.0 - 1e-12)) {
        return Err(AnalysisError::RegimeViolation {
            ratio: min_ratio,
            required: GOLDEN_RULE_MIN_RATIO,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = scan.successful().map(|(d, p)| (d.abs(), p)).unzip();
    Ok(GoldenRuleFit {
        fit: loglog_fit(&x, &y)?,
        rabi_frequency: omega,
        min_ratio,
    })
}
