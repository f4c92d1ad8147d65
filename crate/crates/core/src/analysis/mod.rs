//! Post-processing of trajectories: energy ledgers, conditioned energy
//! deficits, parameter scans, power-law fits and the photo-electric
//! signature report.
//!
//! The detector is always the last tensor factor of a model's space, so a
//! [`Target`] only names a level on that factor.

mod fit;
mod ledger;
pub mod output;
mod scan;
mod signature;

use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::ConstantsTable;
use crate::dynamics::{evolve_driven, evolve_hybrid, evolve_unitary, Drive, DynamicsError, EvolutionConfig, HybridState, Trajectory};
use crate::hilbert::{level_ket, CoherentSpec, Factor, HilbertError, Operator, SpaceDescriptor, StateVector};
use crate::models::{
    beam_splitter_parts, driven_oscillator_parts, driven_qubit_parts, jc_parts, FieldState, ModelError, ModelSpec,
};

pub use fit::{golden_rule_fit, loglog_fit, GoldenRuleFit, PowerLawFit};
pub use ledger::{
    conditioned_energy_deficit, conservation_audit, energy_ledger, ConservationAudit, DeficitReport, EnergyLedger,
    LedgerSummary, MIN_CONDITIONING_PROBABILITY,
};
pub use scan::{
    detuning_scan, intensity_scan, peak_detuning_scan, run_scan, time_scan, validate_scan, AxisSpec, PointError, ScanAxis,
    ScanResult, Spacing,
};
pub use signature::{signature_report, Check, CheckStatus, SignatureReport, SignatureTolerances};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("trajectory does not match model {model}: {reason}")]
    Mismatch { model: &'static str, reason: String },
    #[error("target {target} is not available: {reason}")]
    InvalidTarget { target: Target, reason: String },
    #[error("transition probability {probability:e} is too small to condition on (minimum {minimum:e})")]
    ConditioningTooSmall { probability: f64, minimum: f64 },
    #[error("invalid scan axis: {0}")]
    Axis(String),
    #[error("signature report needs a {0} scan")]
    MissingScan(ScanAxis),
    #[error("golden-rule regime requires |delta|/Omega >= {required}, got {ratio}")]
    RegimeViolation { ratio: f64, required: f64 },
    #[error("fit needs at least {needed} usable points, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

impl AnalysisError {
    /// Tolerance aborts raised while evolving, as opposed to bad inputs.
    pub fn is_numerical_abort(&self) -> bool {
        matches!(self, AnalysisError::Dynamics(e) if e.is_numerical_abort())
    }
}

/// Detector level whose population counts as a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Level `|e>` of a two-level detector.
    QubitExcited,
    /// Fock level `n` of an oscillator detector.
    DetectorLevel(usize),
}

impl Target {
    /// `|e>` for qubit detectors, one quantum for oscillator detectors.
    pub fn default_for(model: &ModelSpec) -> Self {
        match model {
            ModelSpec::QubitDrive(_) | ModelSpec::NeoClassicalQubit(_) | ModelSpec::JaynesCummings(_) => {
                Target::QubitExcited
            }
            _ => Target::DetectorLevel(1),
        }
    }

    /// Factor index and level of the target within `space`.
    pub fn locate(&self, space: &SpaceDescriptor) -> Result<(usize, usize), AnalysisError> {
        let invalid = |reason: String| AnalysisError::InvalidTarget { target: *self, reason };
        let index = space
            .factors()
            .len()
            .checked_sub(1)
            .ok_or_else(|| invalid("space has no factors".into()))?;
        match (self, space.factors()[index]) {
            (Target::QubitExcited, Factor::TwoLevel) => Ok((index, 1)),
            (Target::DetectorLevel(n), Factor::Boson { dim }) if *n < dim => Ok((index, *n)),
            (Target::DetectorLevel(n), Factor::Boson { dim }) => {
                Err(invalid(format!("level {n} is outside a detector of dimension {dim}")))
            }
            (_, f) => Err(invalid(format!("detector factor is {f}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::QubitExcited => write!(f, "qubit_excited"),
            Target::DetectorLevel(n) => write!(f, "detector_level({n})"),
        }
    }
}

/// Population of `target` at every sample of `traj`.
pub fn transition_probability(traj: &Trajectory, target: Target) -> Result<Vec<f64>, AnalysisError> {
    let space = traj.final_state().space();
    let (factor, level) = target.locate(space)?;
    traj.states
        .iter()
        .map(|psi| Ok(psi.level_population(factor, level)?))
        .collect()
}

/// Replaces a gravitational-wave spec by its natural-unit driven oscillator
/// using CODATA constants. Other specs pass through.
pub(crate) fn resolved(model: &ModelSpec) -> Result<ModelSpec, AnalysisError> {
    Ok(model.resolve(&ConstantsTable::codata_2018())?)
}

fn field_ket(field: &FieldState, dim: usize) -> Result<DVector<Complex64>, AnalysisError> {
    Ok(match *field {
        FieldState::Coherent { alpha, tail_tolerance } => {
            CoherentSpec::new(Complex64::new(alpha, 0.0), tail_tolerance)?.ket(dim)?
        }
        FieldState::Fock { n } => level_ket(dim, n)?,
    })
}

/// Default initial detector-plus-field state: the configured field state
/// with the detector in its ground level.
pub fn initial_state(model: &ModelSpec) -> Result<StateVector, AnalysisError> {
    let model = resolved(model)?;
    model.validate()?;
    let state = match &model {
        ModelSpec::JaynesCummings(p) => {
            let space = jc_parts(p)?.space().clone();
            StateVector::product(&space, &[field_ket(&p.field, p.field_cutoff)?, level_ket(2, 0)?])?
        }
        ModelSpec::BeamSplitter(p) => {
            let space = beam_splitter_parts(p)?.space().clone();
            StateVector::product(
                &space,
                &[field_ket(&p.field, p.field_cutoff)?, level_ket(p.detector_cutoff, 0)?],
            )?
        }
        ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => {
            StateVector::basis(driven_qubit_parts(p)?.space(), &[0])?
        }
        ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => {
            StateVector::basis(driven_oscillator_parts(p)?.space(), &[0])?
        }
        ModelSpec::Gravito(_) => unreachable!("resolved above"),
    };
    Ok(state)
}

/// Evolve `model` from [`initial_state`] with the engine that fits its family.
///
/// Neo-classical runs start from `x = 0, p = x0 nu`, the same phase point as
/// the prescribed drive `x0 sin(nu t)`.
pub fn simulate(model: &ModelSpec, cfg: &EvolutionConfig) -> Result<Trajectory, AnalysisError> {
    let model = resolved(model)?;
    let psi0 = initial_state(&model)?;
    let traj = match &model {
        ModelSpec::JaynesCummings(p) => evolve_unitary(&jc_parts(p)?.total(), &psi0, cfg)?,
        ModelSpec::BeamSplitter(p) => evolve_unitary(&beam_splitter_parts(p)?.total(), &psi0, cfg)?,
        ModelSpec::QubitDrive(p) => evolve_driven(&Drive::Qubit(*p), &psi0, cfg)?,
        ModelSpec::DrivenOscillator(p) => evolve_driven(&Drive::Oscillator(*p), &psi0, cfg)?,
        ModelSpec::NeoClassicalQubit(p) => hybrid_from_drive_phase(&model, p.x0 * p.nu, psi0, cfg)?,
        ModelSpec::NeoClassicalOscillator(p) => hybrid_from_drive_phase(&model, p.x0 * p.nu, psi0, cfg)?,
        ModelSpec::Gravito(_) => unreachable!("resolved above"),
    };
    Ok(traj)
}

fn hybrid_from_drive_phase(
    model: &ModelSpec,
    p: f64,
    psi: StateVector,
    cfg: &EvolutionConfig,
) -> Result<Trajectory, DynamicsError> {
    evolve_hybrid(model, &HybridState { x: 0.0, p, psi }, cfg)
}

/// Total excitation number of an excitation-conserving quantum model.
///
/// `None` for driven models and for the counter-rotating coupling.
pub fn excitation_operator(model: &ModelSpec) -> Result<Option<Operator>, AnalysisError> {
    Ok(match model {
        ModelSpec::JaynesCummings(p) if !p.anti_rotating => {
            let space = jc_parts(p)?.space().clone();
            let up = Operator::level_projector(&space, 1, 1)?;
            Some(Operator::number(&space, 0)?.add(&up)?)
        }
        ModelSpec::BeamSplitter(p) => {
            let space = beam_splitter_parts(p)?.space().clone();
            Some(Operator::number(&space, 0)?.add(&Operator::number(&space, 1)?)?)
        }
        _ => None,
    })
}

/// Frequency `Omega` of the resonant population oscillation, used to judge
/// how far a detuning is from the golden-rule regime.
///
/// Quantized fields give `2 g sqrt(I)` with `I` the mean field occupation;
/// classical drives give `lambda |x0|`.
pub fn rabi_frequency(model: &ModelSpec) -> Result<f64, AnalysisError> {
    Ok(match resolved(model)? {
        ModelSpec::JaynesCummings(p) => 2.0 * p.g * p.field.intensity().sqrt(),
        ModelSpec::BeamSplitter(p) => 2.0 * p.g * p.field.intensity().sqrt(),
        ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.lambda * p.x0.abs(),
        ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.lambda * p.x0.abs(),
        ModelSpec::Gravito(_) => unreachable!("resolved above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Method;
    use crate::models::{BeamSplitterParams, JaynesCummingsParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn jc(g: f64) -> ModelSpec {
        ModelSpec::JaynesCummings(JaynesCummingsParams {
            nu: 1.0,
            omega: 1.0,
            g,
            field_cutoff: 4,
            field: FieldState::Fock { n: 1 },
            anti_rotating: false,
        })
    }

    #[test]
    fn targets_resolve_on_the_last_factor() {
        let bs = SpaceDescriptor::new(vec![Factor::Boson { dim: 5 }, Factor::Boson { dim: 3 }]).unwrap();
        assert_eq!(Target::DetectorLevel(2).locate(&bs).unwrap(), (1, 2));
        assert!(Target::DetectorLevel(3).locate(&bs).is_err());
        assert!(Target::QubitExcited.locate(&bs).is_err());
        let q = SpaceDescriptor::two_level();
        assert_eq!(Target::QubitExcited.locate(&q).unwrap(), (0, 1));
        assert!(Target::DetectorLevel(1).locate(&q).is_err());
    }

    #[test]
    fn initial_target_population_is_zero_and_swap_peaks_at_one() {
        let model = jc(0.05);
        let cfg = EvolutionConfig::new(PI / (2.0 * 0.05) / 100.0, PI / (2.0 * 0.05), Method::MatrixExponential);
        let traj = simulate(&model, &cfg).unwrap();
        let p = transition_probability(&traj, Target::QubitExcited).unwrap();
        assert_eq!(p[0], 0.0);
        assert_abs_diff_eq!(*p.last().unwrap(), 1.0, epsilon = 1e-12);
        assert!(p.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn beam_splitter_starts_in_field_state_times_vacuum() {
        let model = ModelSpec::BeamSplitter(BeamSplitterParams {
            nu: 1.0,
            omega: 1.0,
            g: 0.01,
            field_cutoff: 30,
            detector_cutoff: 3,
            field: FieldState::coherent(2.0),
        });
        let psi = initial_state(&model).unwrap();
        let n = Operator::number(psi.space(), 0).unwrap();
        assert_abs_diff_eq!(n.expectation(&psi).unwrap().re, 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(psi.level_population(1, 0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rabi_frequency_conventions() {
        assert_abs_diff_eq!(rabi_frequency(&jc(0.1)).unwrap(), 0.2, epsilon = 1e-15);
        let drive = ModelSpec::QubitDrive(crate::models::QubitSemiClassicalParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 0.01,
            x0: -3.0,
        });
        assert_abs_diff_eq!(rabi_frequency(&drive).unwrap(), 0.03, epsilon = 1e-15);
    }

    #[test]
    fn excitation_operator_only_for_conserving_models() {
        assert!(excitation_operator(&jc(0.1)).unwrap().is_some());
        let ModelSpec::JaynesCummings(p) = jc(0.1) else { unreachable!() };
        let anti = ModelSpec::JaynesCummings(JaynesCummingsParams { anti_rotating: true, ..p });
        assert!(excitation_operator(&anti).unwrap().is_none());
    }
}
