use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{conditioned_energy_deficit, initial_state, resolved, simulate, transition_probability, AnalysisError, Target};
use crate::dynamics::EvolutionConfig;
use crate::hilbert::CoherentSpec;
use crate::models::{FieldState, ModelSpec};

/// Minimum number of samples per window in a peak-detuning scan.
const PEAK_SAMPLES: usize = 256;

/// Parameter varied by a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    /// `delta = nu - omega`, probability read at `t_max`.
    Detuning,
    /// Mean field occupation `|alpha|^2`, or `x0^2` for a classical drive.
    /// A quantized field gets at least the cutoff its state needs.
    Intensity,
    /// Readout time; `dt` shrinks to the readout time when needed.
    Time,
    /// `delta = nu - omega`, probability maximized over `0 <= t <= 2 pi / |delta|`.
    PeakDetuning,
}

impl ScanAxis {
    pub fn name(&self) -> &'static str {
        match self {
            ScanAxis::Detuning => "detuning",
            ScanAxis::Intensity => "intensity",
            ScanAxis::Time => "time",
            ScanAxis::PeakDetuning => "peak_detuning",
        }
    }
}

impl fmt::Display for ScanAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Axis grid `start..=stop` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub axis: ScanAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl AxisSpec {
    /// Grid values. Linear grids interpolate as `start (1 - f) + stop f`,
    /// so a symmetric grid with an odd point count contains exactly zero.
    pub fn values(&self) -> Result<Vec<f64>, AnalysisError> {
        let bad = |m: String| Err(AnalysisError::Axis(m));
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return bad(format!("{} range must be finite", self.axis));
        }
        if self.points == 0 {
            return bad(format!("{} scan needs at least one point", self.axis));
        }
        if self.points > 1 && self.start == self.stop {
            return bad(format!("{} range is empty", self.axis));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return bad(format!("log-spaced {} range must be positive", self.axis));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.points - 1 {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start * (1.0 - f) + self.stop * f,
                    Spacing::Log => (self.start.ln() * (1.0 - f) + self.stop.ln() * f).exp(),
                }
            })
            .collect())
    }
}

/// A point that could not be evaluated. The rest of the scan is unaffected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointError {
    pub index: usize,
    pub value: f64,
    /// True for tolerance aborts (norm drift, truncation), false otherwise.
    pub numerical_abort: bool,
    pub message: String,
}

/// One evolution per axis value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub axis: ScanAxis,
    /// Template model; each point changes only the scanned parameter.
    pub model: ModelSpec,
    pub target: Target,
    pub evolution: EvolutionConfig,
    pub values: Vec<f64>,
    /// Target population, `None` where the point failed.
    pub probabilities: Vec<Option<f64>>,
    /// Detector free-energy gain on the branch conditioned on a transition.
    /// `None` where the transition is too unlikely to condition on.
    pub detector_gain: Vec<Option<f64>>,
    pub errors: Vec<PointError>,
}

impl ScanResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(value, probability)` pairs of the points that succeeded.
    pub fn successful(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.probabilities)
            .filter_map(|(v, p)| p.map(|p| (*v, p)))
    }
}

fn check_monotone(values: &[f64]) -> Result<(), AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::Axis("scan has no points".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::Axis("axis values must be finite".into()));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if up || down {
        Ok(())
    } else {
        Err(AnalysisError::Axis("axis values must be strictly monotone".into()))
    }
}

fn set_detuning(model: &mut ModelSpec, delta: f64) {
    let nu = model.detector_frequency() + delta;
    match model {
        ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.nu = nu,
        ModelSpec::JaynesCummings(p) => p.nu = nu,
        ModelSpec::BeamSplitter(p) => p.nu = nu,
        ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.nu = nu,
        ModelSpec::Gravito(_) => unreachable!("scans resolve first"),
    }
}

fn field_with_intensity(field: &FieldState, intensity: f64) -> Result<FieldState, AnalysisError> {
    Ok(match *field {
        FieldState::Coherent { tail_tolerance, .. } => FieldState::Coherent {
            alpha: intensity.sqrt(),
            tail_tolerance,
        },
        FieldState::Fock { .. } => {
            if intensity.fract() != 0.0 {
                return Err(AnalysisError::Axis(format!(
                    "Fock field needs integer intensities, got {intensity}"
                )));
            }
            FieldState::Fock { n: intensity as usize }
        }
    })
}

/// Smallest field cutoff that holds `field`: the coherent tail bound, or two
/// levels above a Fock state.
fn min_field_cutoff(field: &FieldState) -> Result<usize, AnalysisError> {
    Ok(match *field {
        FieldState::Coherent { alpha, tail_tolerance } => {
            CoherentSpec::new(Complex64::new(alpha, 0.0), tail_tolerance)?.min_cutoff()
        }
        FieldState::Fock { n } => n + 2,
    })
}

fn set_intensity(model: &mut ModelSpec, intensity: f64) -> Result<(), AnalysisError> {
    if intensity < 0.0 {
        return Err(AnalysisError::Axis(format!("intensity must be >= 0, got {intensity}")));
    }
    match model {
        ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.x0 = intensity.sqrt(),
        ModelSpec::JaynesCummings(p) => {
            p.field = field_with_intensity(&p.field, intensity)?;
            p.field_cutoff = p.field_cutoff.max(min_field_cutoff(&p.field)?);
        }
        ModelSpec::BeamSplitter(p) => {
            p.field = field_with_intensity(&p.field, intensity)?;
            p.field_cutoff = p.field_cutoff.max(min_field_cutoff(&p.field)?);
        }
        ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.x0 = intensity.sqrt(),
        ModelSpec::Gravito(_) => unreachable!("scans resolve first"),
    }
    Ok(())
}

/// Model and evolution settings of one axis point.
fn point_setup(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    axis: ScanAxis,
    value: f64,
) -> Result<(ModelSpec, EvolutionConfig), AnalysisError> {
    let mut model = *template;
    let mut cfg = *cfg;
    match axis {
        ScanAxis::Detuning => set_detuning(&mut model, value),
        ScanAxis::PeakDetuning => {
            if value == 0.0 {
                return Err(AnalysisError::Axis("peak-detuning scan cannot include delta = 0".into()));
            }
            set_detuning(&mut model, value);
            cfg.t_max = TAU / value.abs();
            cfg.dt = cfg.dt.min(cfg.t_max / PEAK_SAMPLES as f64);
            cfg.record_stride = 1;
        }
        ScanAxis::Intensity => set_intensity(&mut model, value)?,
        ScanAxis::Time => {
            if !(value > 0.0) {
                return Err(AnalysisError::Axis(format!("readout time must be positive, got {value}")));
            }
            cfg.t_max = value;
            cfg.dt = cfg.dt.min(value);
        }
    }
    model
        .validate()
        .map_err(|e| AnalysisError::Axis(format!("{axis} = {value}: {e}")))?;
    cfg.validate()
        .map_err(|e| AnalysisError::Axis(format!("{axis} = {value}: {e}")))?;
    Ok((model, cfg))
}

fn evaluate(
    model: &ModelSpec,
    cfg: &EvolutionConfig,
    axis: ScanAxis,
    target: Target,
) -> Result<(f64, Option<f64>), AnalysisError> {
    let traj = simulate(model, cfg)?;
    let series = transition_probability(&traj, target)?;
    let probability = match axis {
        ScanAxis::PeakDetuning => series.iter().copied().fold(0.0, f64::max),
        _ => *series.last().expect("trajectory holds at least one sample"),
    };
    let gain = match conditioned_energy_deficit(&traj, model) {
        Ok(r) => Some(r.detector_gain),
        Err(AnalysisError::ConditioningTooSmall { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok((probability, gain))
}

type Setups = Vec<(ModelSpec, EvolutionConfig)>;

fn prepare(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    axis: ScanAxis,
    values: &[f64],
) -> Result<(ModelSpec, Setups), AnalysisError> {
    let template = resolved(template)?;
    template.validate()?;
    cfg.validate()?;
    target.locate(initial_state(&template)?.space())?;
    check_monotone(values)?;
    let setups = values
        .iter()
        .map(|&v| point_setup(&template, cfg, axis, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((template, setups))
}

/// Every check [`run_scan`] performs before evolving anything.
pub fn validate_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    axis: ScanAxis,
    values: &[f64],
) -> Result<(), AnalysisError> {
    prepare(template, cfg, target, axis, values).map(|_| ())
}

/// Evaluate `template` at every axis value in parallel.
///
/// The whole scan is rejected up front if any value leaves the model's valid
/// parameter domain. Numerical aborts during evolution only fail their own
/// point. Results are in axis order regardless of scheduling.
pub fn run_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    axis: ScanAxis,
    values: &[f64],
) -> Result<ScanResult, AnalysisError> {
    let (template, setups) = prepare(template, cfg, target, axis, values)?;
    let outcomes: Vec<_> = setups
        .par_iter()
        .map(|(model, cfg)| evaluate(model, cfg, axis, target))
        .collect();

    let mut result = ScanResult {
        axis,
        model: template,
        target,
        evolution: *cfg,
        values: values.to_vec(),
        probabilities: Vec::with_capacity(values.len()),
        detector_gain: Vec::with_capacity(values.len()),
        errors: Vec::new(),
    };
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((p, gain)) => {
                result.probabilities.push(Some(p));
                result.detector_gain.push(gain);
            }
            Err(e) => {
                result.probabilities.push(None);
                result.detector_gain.push(None);
                result.errors.push(PointError {
                    index,
                    value: values[index],
                    numerical_abort: e.is_numerical_abort(),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(result)
}

/// Probability at `cfg.t_max` against `delta = nu - omega`.
pub fn detuning_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    deltas: &[f64],
) -> Result<ScanResult, AnalysisError> {
    run_scan(template, cfg, target, ScanAxis::Detuning, deltas)
}

/// Probability at `cfg.t_max` against field intensity.
pub fn intensity_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    intensities: &[f64],
) -> Result<ScanResult, AnalysisError> {
    run_scan(template, cfg, target, ScanAxis::Intensity, intensities)
}

/// Probability against readout time, one evolution per time.
pub fn time_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    times: &[f64],
) -> Result<ScanResult, AnalysisError> {
    run_scan(template, cfg, target, ScanAxis::Time, times)
}

/// Largest probability within one beat period `2 pi / |delta|`, against `delta`.
pub fn peak_detuning_scan(
    template: &ModelSpec,
    cfg: &EvolutionConfig,
    target: Target,
    deltas: &[f64],
) -> Result<ScanResult, AnalysisError> {
    run_scan(template, cfg, target, ScanAxis::PeakDetuning, deltas)
}
