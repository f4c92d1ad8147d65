//! Hamiltonians for the five model families and the SI mappings of the
//! gravito-phononic detector.
//!
//! Dynamics run in natural units with `hbar = 1`. Only the gravito mapping
//! touches SI quantities; it rescales time by the detector frequency so that
//! the resulting driven-oscillator model has `omega = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::ConstantsTable;
use crate::hilbert::{Factor, HilbertError, Operator, Pauli, SpaceDescriptor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("cutoff {name} must be at least {min}, got {value}")]
    InvalidCutoff {
        name: &'static str,
        min: usize,
        value: usize,
    },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            requirement: "finite and > 0",
            value,
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            requirement: "finite and >= 0",
            value,
        })
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            requirement: "finite",
            value,
        })
    }
}

fn cutoff(name: &'static str, value: usize) -> Result<(), ModelError> {
    if value >= 2 {
        Ok(())
    } else {
        Err(ModelError::InvalidCutoff { name, min: 2, value })
    }
}

/// Initial state of a quantized field mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldState {
    Coherent {
        alpha: f64,
        #[serde(default = "default_tail")]
        tail_tolerance: f64,
    },
    Fock {
        n: usize,
    },
}

fn default_tail() -> f64 {
    crate::hilbert::CoherentSpec::DEFAULT_TAIL
}

impl FieldState {
    pub fn coherent(alpha: f64) -> Self {
        FieldState::Coherent {
            alpha,
            tail_tolerance: default_tail(),
        }
    }

    /// Mean excitation number `|alpha|^2` or `n`.
    pub fn intensity(&self) -> f64 {
        match self {
            FieldState::Coherent { alpha, .. } => alpha * alpha,
            FieldState::Fock { n } => *n as f64,
        }
    }

    fn validate(&self, field_cutoff: usize) -> Result<(), ModelError> {
        match *self {
            FieldState::Coherent {
                alpha,
                tail_tolerance,
            } => {
                finite("alpha", alpha)?;
                let spec = crate::hilbert::CoherentSpec::new(Complex64::new(alpha, 0.0), tail_tolerance)?;
                spec.ket(field_cutoff)?;
                Ok(())
            }
            FieldState::Fock { n } => {
                if n + 1 >= field_cutoff {
                    Err(ModelError::InvalidCutoff {
                        name: "field_cutoff",
                        min: n + 2,
                        value: field_cutoff,
                    })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Qubit driven by a classical oscillator, `H = p^2/2 + nu^2 x^2/2 + (omega/2) sigma_z + lambda x sigma_x`.
///
/// Without back-reaction the drive is `x(t) = x0 sin(nu t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSemiClassicalParams {
    pub omega: f64,
    pub nu: f64,
    pub lambda: f64,
    pub x0: f64,
}

impl QubitSemiClassicalParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("omega", self.omega)?;
        positive("nu", self.nu)?;
        non_negative("lambda", self.lambda)?;
        finite("x0", self.x0)
    }
}

/// Quantized field mode coupled to a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JaynesCummingsParams {
    pub nu: f64,
    pub omega: f64,
    pub g: f64,
    pub field_cutoff: usize,
    #[serde(default = "default_jc_field")]
    pub field: FieldState,
    /// Build `g (a sigma_- + a^dagger sigma_+)` instead of the
    /// excitation-conserving `g (a sigma_+ + a^dagger sigma_-)`.
    #[serde(default)]
    pub anti_rotating: bool,
}

fn default_jc_field() -> FieldState {
    FieldState::Fock { n: 1 }
}

impl JaynesCummingsParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("nu", self.nu)?;
        positive("omega", self.omega)?;
        non_negative("g", self.g)?;
        cutoff("field_cutoff", self.field_cutoff)?;
        self.field.validate(self.field_cutoff)
    }
}

/// Two bosonic modes under a beam-splitter coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSplitterParams {
    pub nu: f64,
    pub omega: f64,
    pub g: f64,
    pub field_cutoff: usize,
    pub detector_cutoff: usize,
    pub field: FieldState,
}

impl BeamSplitterParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("nu", self.nu)?;
        positive("omega", self.omega)?;
        non_negative("g", self.g)?;
        cutoff("field_cutoff", self.field_cutoff)?;
        cutoff("detector_cutoff", self.detector_cutoff)?;
        self.field.validate(self.field_cutoff)
    }

    /// Coherent amplitude of the initial field, zero for Fock inputs.
    pub fn alpha(&self) -> f64 {
        match self.field {
            FieldState::Coherent { alpha, .. } => alpha,
            FieldState::Fock { .. } => 0.0,
        }
    }
}

/// Quantum oscillator detector driven by a classical oscillator,
/// `H = p^2/2 + nu^2 x^2/2 + omega b^dagger b + lambda x (b + b^dagger)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivenOscillatorParams {
    pub omega: f64,
    pub nu: f64,
    pub lambda: f64,
    pub x0: f64,
    pub detector_cutoff: usize,
}

impl DrivenOscillatorParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("omega", self.omega)?;
        positive("nu", self.nu)?;
        non_negative("lambda", self.lambda)?;
        finite("x0", self.x0)?;
        cutoff("detector_cutoff", self.detector_cutoff)
    }
}

/// Resonant-mass detector and gravitational wave, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravitoParams {
    /// Detector mass, kg.
    pub mass: f64,
    /// Detector length, m.
    pub length: f64,
    /// Gravitational-wave angular frequency, rad/s.
    pub nu: f64,
    /// Detector mode angular frequency, rad/s.
    pub omega0: f64,
    /// Strain amplitude.
    pub h0: f64,
    /// Quantization volume, m^3.
    pub volume: f64,
    #[serde(default = "default_gravito_cutoff")]
    pub detector_cutoff: usize,
}

fn default_gravito_cutoff() -> usize {
    4
}

impl GravitoParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("mass", self.mass)?;
        positive("length", self.length)?;
        positive("nu", self.nu)?;
        positive("omega0", self.omega0)?;
        positive("h0", self.h0)?;
        positive("volume", self.volume)?;
        cutoff("detector_cutoff", self.detector_cutoff)
    }
}

/// One model family with its parameters. The neo-classical variants evolve
/// the classical oscillator under the mean-field back-reaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    QubitDrive(QubitSemiClassicalParams),
    NeoClassicalQubit(QubitSemiClassicalParams),
    JaynesCummings(JaynesCummingsParams),
    BeamSplitter(BeamSplitterParams),
    DrivenOscillator(DrivenOscillatorParams),
    NeoClassicalOscillator(DrivenOscillatorParams),
    Gravito(GravitoParams),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.validate(),
            ModelSpec::JaynesCummings(p) => p.validate(),
            ModelSpec::BeamSplitter(p) => p.validate(),
            ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.validate(),
            ModelSpec::Gravito(p) => p.validate(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ModelSpec::QubitDrive(_) => "qubit_drive",
            ModelSpec::NeoClassicalQubit(_) => "neo_classical_qubit",
            ModelSpec::JaynesCummings(_) => "jaynes_cummings",
            ModelSpec::BeamSplitter(_) => "beam_splitter",
            ModelSpec::DrivenOscillator(_) => "driven_oscillator",
            ModelSpec::NeoClassicalOscillator(_) => "neo_classical_oscillator",
            ModelSpec::Gravito(_) => "gravito",
        }
    }

    pub fn is_neo_classical(&self) -> bool {
        matches!(
            self,
            ModelSpec::NeoClassicalQubit(_) | ModelSpec::NeoClassicalOscillator(_)
        )
    }

    /// Fully quantized models whose Hamiltonian is a time-independent operator.
    pub fn is_full_quantum(&self) -> bool {
        matches!(self, ModelSpec::JaynesCummings(_) | ModelSpec::BeamSplitter(_))
    }

    /// Gravito parameters become a natural-unit driven oscillator; every
    /// other spec is returned unchanged.
    pub fn resolve(&self, constants: &ConstantsTable) -> Result<ModelSpec, ModelError> {
        match self {
            ModelSpec::Gravito(p) => Ok(ModelSpec::DrivenOscillator(
                gravito_classical_params_with(p, constants)?.driven,
            )),
            other => Ok(*other),
        }
    }

    /// Transition frequency of the detector.
    pub fn detector_frequency(&self) -> f64 {
        match self {
            ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.omega,
            ModelSpec::JaynesCummings(p) => p.omega,
            ModelSpec::BeamSplitter(p) => p.omega,
            ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.omega,
            ModelSpec::Gravito(_) => 1.0,
        }
    }

    /// Frequency of the radiation (field mode or classical drive).
    pub fn field_frequency(&self) -> f64 {
        match self {
            ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => p.nu,
            ModelSpec::JaynesCummings(p) => p.nu,
            ModelSpec::BeamSplitter(p) => p.nu,
            ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => p.nu,
            ModelSpec::Gravito(p) => p.nu / p.omega0,
        }
    }
}

/// Decomposition `H = H_field + H_detector + H_int` of a fully quantum model.
#[derive(Debug, Clone)]
pub struct QuantumHamiltonian {
    pub field_free: Operator,
    pub detector_free: Operator,
    pub interaction: Operator,
    /// Index of the detector factor in the composite space.
    pub detector_factor: usize,
}

impl QuantumHamiltonian {
    pub fn total(&self) -> Operator {
        // all three parts share one space by construction
        self.field_free
            .add(&self.detector_free)
            .and_then(|h| h.add(&self.interaction))
            .expect("hamiltonian parts share a space")
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.field_free.space()
    }
}

/// Detector Hamiltonian of a classically driven model, `H(x) = H_0 + lambda x Q`.
#[derive(Debug, Clone)]
pub struct DrivenHamiltonian {
    pub detector_free: Operator,
    /// `sigma_x` for the qubit, `b + b^dagger` for the oscillator.
    pub coupling: Operator,
    pub lambda: f64,
}

impl DrivenHamiltonian {
    pub fn at(&self, x: f64) -> Operator {
        self.detector_free
            .add(&self.coupling.scale_real(self.lambda * x))
            .expect("driven hamiltonian parts share a space")
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.detector_free.space()
    }
}

pub fn jc_parts(p: &JaynesCummingsParams) -> Result<QuantumHamiltonian, ModelError> {
    p.validate()?;
    let space = SpaceDescriptor::new(vec![Factor::Boson { dim: p.field_cutoff }, Factor::TwoLevel])?;
    let mode = SpaceDescriptor::boson(p.field_cutoff)?;
    let qubit = SpaceDescriptor::two_level();
    let a = Operator::annihilation(&mode, 0)?;
    let ad = a.dagger();
    let sp = Operator::pauli(&qubit, 0, Pauli::Plus)?;
    let sm = Operator::pauli(&qubit, 0, Pauli::Minus)?;
    let field_free = Operator::number(&space, 0)?.scale_real(p.nu);
    let detector_free = Operator::pauli(&space, 1, Pauli::Z)?.scale_real(p.omega / 2.0);
    let coupling = if p.anti_rotating {
        a.tensor(&sm).add(&ad.tensor(&sp))?
    } else {
        a.tensor(&sp).add(&ad.tensor(&sm))?
    };
    Ok(QuantumHamiltonian {
        field_free,
        detector_free,
        interaction: coupling.scale_real(p.g),
        detector_factor: 1,
    })
}

/// `H = nu a^dagger a + (omega/2) sigma_z + g (a sigma_+ + a^dagger sigma_-)` on
/// `Boson(field_cutoff) x TwoLevel`.
pub fn build_jc_hamiltonian(p: &JaynesCummingsParams) -> Result<Operator, ModelError> {
    Ok(jc_parts(p)?.total())
}

pub fn beam_splitter_parts(p: &BeamSplitterParams) -> Result<QuantumHamiltonian, ModelError> {
    p.validate()?;
    let space = SpaceDescriptor::new(vec![
        Factor::Boson { dim: p.field_cutoff },
        Factor::Boson {
            dim: p.detector_cutoff,
        },
    ])?;
    let a = Operator::annihilation(&SpaceDescriptor::boson(p.field_cutoff)?, 0)?;
    let b = Operator::annihilation(&SpaceDescriptor::boson(p.detector_cutoff)?, 0)?;
    let exchange = a.tensor(&b.dagger()).add(&a.dagger().tensor(&b))?;
    Ok(QuantumHamiltonian {
        field_free: Operator::number(&space, 0)?.scale_real(p.nu),
        detector_free: Operator::number(&space, 1)?.scale_real(p.omega),
        interaction: exchange.scale_real(p.g),
        detector_factor: 1,
    })
}

/// `H = nu a^dagger a + omega b^dagger b + g (a b^dagger + b a^dagger)`.
pub fn build_beam_splitter_hamiltonian(p: &BeamSplitterParams) -> Result<Operator, ModelError> {
    Ok(beam_splitter_parts(p)?.total())
}

pub fn driven_qubit_parts(p: &QubitSemiClassicalParams) -> Result<DrivenHamiltonian, ModelError> {
    p.validate()?;
    let space = SpaceDescriptor::two_level();
    Ok(DrivenHamiltonian {
        detector_free: Operator::pauli(&space, 0, Pauli::Z)?.scale_real(p.omega / 2.0),
        coupling: Operator::pauli(&space, 0, Pauli::X)?,
        lambda: p.lambda,
    })
}

/// Quantum part `(omega/2) sigma_z + lambda x sigma_x` at classical coordinate `x`.
pub fn build_driven_qubit_hamiltonian(p: &QubitSemiClassicalParams, x: f64) -> Result<Operator, ModelError> {
    Ok(driven_qubit_parts(p)?.at(x))
}

pub fn driven_oscillator_parts(p: &DrivenOscillatorParams) -> Result<DrivenHamiltonian, ModelError> {
    p.validate()?;
    let space = SpaceDescriptor::boson(p.detector_cutoff)?;
    let b = Operator::annihilation(&space, 0)?;
    Ok(DrivenHamiltonian {
        detector_free: Operator::number(&space, 0)?.scale_real(p.omega),
        coupling: b.add(&b.dagger())?,
        lambda: p.lambda,
    })
}

/// Quantum part `omega b^dagger b + lambda x (b + b^dagger)` at classical coordinate `x`.
pub fn build_driven_oscillator_hamiltonian(p: &DrivenOscillatorParams, x: f64) -> Result<Operator, ModelError> {
    Ok(driven_oscillator_parts(p)?.at(x))
}

/// Classical field energy `p^2/2 + nu^2 x^2/2` of a drive oscillator at frequency `nu`.
pub fn classical_energy(nu: f64, x: f64, p: f64) -> f64 {
    0.5 * p * p + 0.5 * nu * nu * x * x
}

/// Vacuum coupling `g_{q,nu} = (1/c) sqrt(8 pi G hbar / (V nu))` with CODATA constants.
///
/// The expression is evaluated in SI and reported as a rate in rad/s, the
/// same convention as `hbar g` being the coupling energy.
pub fn gravito_vacuum_coupling(p: &GravitoParams) -> Result<f64, ModelError> {
    gravito_vacuum_coupling_with(p, &ConstantsTable::codata_2018())
}

pub fn gravito_vacuum_coupling_with(p: &GravitoParams, k: &ConstantsTable) -> Result<f64, ModelError> {
    positive("volume", p.volume)?;
    positive("nu", p.nu)?;
    Ok((8.0 * std::f64::consts::PI * k.g * k.hbar / (p.volume * p.nu)).sqrt() / k.c)
}

/// SI couplings of the semi-classical detector model plus the equivalent
/// natural-unit driven oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GravitoMapping {
    /// `M L nu^2 / pi^2`, N per unit strain displacement.
    pub lambda_si: f64,
    /// Zero-point length `sqrt(hbar / (M omega0))`, m.
    pub zero_point_length: f64,
    /// `(L / pi^2) sqrt(M nu^4 hbar / omega0)`, J per unit strain.
    pub interaction_coefficient: f64,
    /// Time measured in `1/omega0`, energies in `hbar omega0`; the drive is the strain.
    pub driven: DrivenOscillatorParams,
}

pub fn gravito_classical_params(p: &GravitoParams) -> Result<GravitoMapping, ModelError> {
    gravito_classical_params_with(p, &ConstantsTable::codata_2018())
}

pub fn gravito_classical_params_with(p: &GravitoParams, k: &ConstantsTable) -> Result<GravitoMapping, ModelError> {
    p.validate()?;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let lambda_si = p.mass * p.length * p.nu * p.nu / pi2;
    let zero_point_length = (k.hbar / (p.mass * p.omega0)).sqrt();
    let interaction_coefficient = (p.length / pi2) * (p.mass * p.nu.powi(4) * k.hbar / p.omega0).sqrt();
    let driven = DrivenOscillatorParams {
        omega: 1.0,
        nu: p.nu / p.omega0,
        lambda: lambda_si * zero_point_length / (k.hbar * p.omega0),
        x0: p.h0,
        detector_cutoff: p.detector_cutoff,
    };
    Ok(GravitoMapping {
        lambda_si,
        zero_point_length,
        interaction_coefficient,
        driven,
    })
}

/// Gravitational-wave energy density `c^2 nu^2 h0^2 / (32 pi G)`, J/m^3.
pub fn gw_energy_density(p: &GravitoParams) -> f64 {
    gw_energy_density_with(p, &ConstantsTable::codata_2018())
}

pub fn gw_energy_density_with(p: &GravitoParams, k: &ConstantsTable) -> f64 {
    k.c * k.c / (32.0 * std::f64::consts::PI * k.g) * p.nu * p.nu * p.h0 * p.h0
}
