use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{loglog_fit, AnalysisError, ScanAxis, ScanResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The scan cannot decide, for example a readout time too short to
    /// resolve the resonance.
    Inconclusive,
}

/// One signature check with the statistic it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub status: CheckStatus,
    pub statistic: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, statistic: f64, tolerance: f64, detail: String) -> Self {
        Self {
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            statistic,
            tolerance,
            detail,
        }
    }

    fn inconclusive(statistic: f64, tolerance: f64, detail: String) -> Self {
        Self {
            status: CheckStatus::Inconclusive,
            statistic,
            tolerance,
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignatureTolerances {
    /// Allowed `|slope - 1|` of probability against intensity.
    pub intensity_slope: f64,
    /// Allowed spread of the conditioned detector gain across intensities.
    pub gap: f64,
    /// The short-time check must reach down to this readout time.
    pub t_min: f64,
}

impl Default for SignatureTolerances {
    fn default() -> Self {
        Self {
            intensity_slope: 0.01,
            gap: 1e-9,
            t_min: 1e-3,
        }
    }
}

/// Photo-electric signatures of one model family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureReport {
    pub model: &'static str,
    /// Probability peaks at zero detuning.
    pub threshold: Check,
    /// Probability grows linearly with intensity.
    pub intensity_slope: Check,
    /// The energy the detector absorbs per transition does not depend on intensity.
    pub intensity_gap: Check,
    /// Transitions start immediately.
    pub short_time: Check,
}

impl SignatureReport {
    pub fn threshold_pass(&self) -> bool {
        self.threshold.passed()
    }

    pub fn intensity_independence_pass(&self) -> bool {
        self.intensity_slope.passed() && self.intensity_gap.passed()
    }

    pub fn short_time_pass(&self) -> bool {
        self.short_time.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.threshold_pass() && self.intensity_independence_pass() && self.short_time_pass()
    }
}

fn find(scans: &[ScanResult], axis: ScanAxis) -> Result<&ScanResult, AnalysisError> {
    scans
        .iter()
        .find(|s| s.axis == axis)
        .ok_or(AnalysisError::MissingScan(axis))
}

fn failed_points(scan: &ScanResult) -> Option<String> {
    (!scan.errors.is_empty()).then(|| format!("{} of {} points failed", scan.errors.len(), scan.len()))
}

fn threshold_check(scan: &ScanResult) -> Check {
    if let Some(msg) = failed_points(scan) {
        return Check::inconclusive(f64::NAN, f64::NAN, msg);
    }
    let v = &scan.values;
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let lobe = TAU / scan.evolution.t_max;
    if !(lo <= 0.0 && hi >= 0.0) {
        return Check::inconclusive(f64::NAN, f64::NAN, format!("detuning range [{lo}, {hi}] excludes zero"));
    }
    if lobe > (-lo).min(hi) {
        return Check::inconclusive(
            f64::NAN,
            f64::NAN,
            format!("first sinc zero 2pi/t = {lobe} lies outside the detuning range [{lo}, {hi}]"),
        );
    }
    let probs: Vec<f64> = scan.probabilities.iter().map(|p| p.expect("no failed points")).collect();
    let k = (0..probs.len())
        .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
        .expect("scan is non-empty");
    let mut step = 0.0f64;
    if k > 0 {
        step = step.max((v[k] - v[k - 1]).abs());
    }
    if k + 1 < v.len() {
        step = step.max((v[k + 1] - v[k]).abs());
    }
    Check::new(
        v[k].abs() <= step * (1.0 + 1e-12),
        v[k],
        step,
        format!("argmax at delta = {} with P = {}", v[k], probs[k]),
    )
}

fn intensity_checks(scan: &ScanResult, tol: &SignatureTolerances) -> (Check, Check) {
    if let Some(msg) = failed_points(scan) {
        let c = Check::inconclusive(f64::NAN, f64::NAN, msg);
        return (c.clone(), c);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = scan.successful().unzip();
    let slope = match loglog_fit(&x, &y) {
        Ok(fit) => Check::new(
            (fit.slope - 1.0).abs() <= tol.intensity_slope,
            fit.slope,
            tol.intensity_slope,
            format!("log-log slope {} +- {} over {} points", fit.slope, fit.slope_stderr, fit.points),
        ),
        Err(e) => Check::inconclusive(f64::NAN, tol.intensity_slope, e.to_string()),
    };
    let gains: Vec<f64> = scan.detector_gain.iter().flatten().copied().collect();
    let gap = if gains.len() < scan.len() {
        Check::inconclusive(
            f64::NAN,
            tol.gap,
            format!(
                "only {} of {} points have a transition probability to condition on",
                gains.len(),
                scan.len()
            ),
        )
    } else {
        let spread = gains.iter().map(|g| (g - gains[0]).abs()).fold(0.0, f64::max);
        Check::new(
            spread <= tol.gap,
            spread,
            tol.gap,
            format!("detector gain {} across intensities {} to {}", gains[0], x[0], x[x.len() - 1]),
        )
    };
    (slope, gap)
}

fn short_time_check(scan: &ScanResult, tol: &SignatureTolerances) -> Check {
    if let Some(msg) = failed_points(scan) {
        return Check::inconclusive(f64::NAN, 0.0, msg);
    }
    let t_lo = scan.values.iter().copied().fold(f64::INFINITY, f64::min);
    let p_min = scan.successful().map(|(_, p)| p).fold(f64::INFINITY, f64::min);
    if t_lo > tol.t_min {
        return Check::inconclusive(
            p_min,
            0.0,
            format!("earliest readout {t_lo} is later than the required {}", tol.t_min),
        );
    }
    Check::new(
        p_min > 0.0,
        p_min,
        0.0,
        format!("smallest probability {p_min} over readout times from {t_lo}"),
    )
}

/// Threshold, intensity and short-time checks from the first detuning,
/// intensity and time scans in `scans`.
pub fn signature_report(scans: &[ScanResult], tol: &SignatureTolerances) -> Result<SignatureReport, AnalysisError> {
    let detuning = find(scans, ScanAxis::Detuning)?;
    let intensity = find(scans, ScanAxis::Intensity)?;
    let time = find(scans, ScanAxis::Time)?;
    let (intensity_slope, intensity_gap) = intensity_checks(intensity, tol);
    Ok(SignatureReport {
        model: detuning.model.tag(),
        threshold: threshold_check(detuning),
        intensity_slope,
        intensity_gap,
        short_time: short_time_check(time, tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Target;
    use crate::dynamics::{EvolutionConfig, Method};
    use crate::models::{DrivenOscillatorParams, ModelSpec};

    fn synthetic(axis: ScanAxis, values: Vec<f64>, f: impl Fn(f64) -> f64, t: f64) -> ScanResult {
        let n = values.len();
        ScanResult {
            axis,
            model: ModelSpec::DrivenOscillator(DrivenOscillatorParams {
                omega: 1.0,
                nu: 1.0,
                lambda: 1e-3,
                x0: 1.0,
                detector_cutoff: 3,
            }),
            target: Target::DetectorLevel(1),
            evolution: EvolutionConfig::new(t / 10.0, t, Method::MidpointPiecewise),
            probabilities: values.iter().map(|v| Some(f(*v))).collect(),
            detector_gain: vec![Some(1.0); n],
            values,
            errors: vec![],
        }
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn sinc2(t: f64) -> impl Fn(f64) -> f64 {
        move |d: f64| {
            let u = d * t / 2.0;
            if u == 0.0 { 1.0 } else { (u.sin() / u).powi(2) }
        }
    }

    #[test]
    fn missing_scan_is_an_error() {
        let d = synthetic(ScanAxis::Detuning, grid(-1.0, 1.0, 21), sinc2(20.0), 20.0);
        let err = signature_report(&[d], &SignatureTolerances::default()).unwrap_err();
        assert_eq!(err, AnalysisError::MissingScan(ScanAxis::Intensity));
    }

    #[test]
    fn synthetic_signatures_pass() {
        let scans = [
            synthetic(ScanAxis::Detuning, grid(-1.0, 1.0, 21), sinc2(20.0), 20.0),
            synthetic(ScanAxis::Intensity, grid(1.0, 16.0, 16), |i| 1e-4 * i, 20.0),
            synthetic(ScanAxis::Time, vec![1e-3, 1e-2, 1e-1, 1.0], |t| t * t, 1.0),
        ];
        let r = signature_report(&scans, &SignatureTolerances::default()).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn off_center_peak_fails() {
        let shifted = |d: f64| sinc2(20.0)(d - 0.3);
        let c = threshold_check(&synthetic(ScanAxis::Detuning, grid(-1.0, 1.0, 21), shifted, 20.0));
        assert_eq!(c.status, CheckStatus::Fail);
    }

    #[test]
    fn short_readout_is_inconclusive_not_fail() {
        let c = threshold_check(&synthetic(ScanAxis::Detuning, grid(-1.0, 1.0, 21), sinc2(2.0), 2.0));
        assert_eq!(c.status, CheckStatus::Inconclusive);
    }

    #[test]
    fn quadratic_intensity_fails_slope() {
        let (slope, gap) = intensity_checks(
            &synthetic(ScanAxis::Intensity, grid(1.0, 16.0, 16), |i| 1e-4 * i * i, 1.0),
            &SignatureTolerances::default(),
        );
        assert_eq!(slope.status, CheckStatus::Fail);
        assert!(gap.passed());
    }

    #[test]
    fn zero_probability_fails_short_time() {
        let c = short_time_check(
            &synthetic(ScanAxis::Time, vec![1e-3, 1.0], |t| if t < 0.5 { 0.0 } else { 1.0 }, 1.0),
            &SignatureTolerances::default(),
        );
        assert_eq!(c.status, CheckStatus::Fail);
        let late = short_time_check(
            &synthetic(ScanAxis::Time, vec![0.1, 1.0], |t| t, 1.0),
            &SignatureTolerances::default(),
        );
        assert_eq!(late.status, CheckStatus::Inconclusive);
    }
}
