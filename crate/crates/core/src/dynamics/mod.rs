//! Time evolution engines and closed-form transition probabilities.
//!
//! Three propagators share one [`Trajectory`] output:
//!
//! * [`evolve_unitary`] for time-independent Hamiltonians,
//! * [`evolve_driven`] for a detector under a prescribed classical drive
//!   `x(t) = x0 sin(nu t)`,
//! * [`evolve_hybrid`] for the mean-field model in which the classical
//!   oscillator feels the quantum expectation value of the coupling.
//!
//! The closed forms in [`formulas`] and the first-order Dyson integral in
//! [`dyson`] are independent routes to the same probabilities and are used
//! as oracles against the propagators.

pub mod dyson;
pub mod formulas;
mod hybrid;
mod propagate;
pub mod quadrature;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hilbert::{HilbertError, StateVector};
use crate::models::ModelError;

pub use dyson::{dyson_first_order, DysonEstimate};
pub use formulas::{
    coherent_amplitude_beta, golden_rule_limit, perturbative_pe, pn1_from_beta, rabi_probability,
    semiclassical_pn1, sinc,
};
pub use hybrid::{evolve_hybrid, HybridState};
pub use propagate::{evolve_driven, evolve_unitary, Drive, Spectral};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error("state norm drifted to {norm} at t={time} (tolerance {tolerance:e})")]
    NormDrift { time: f64, norm: f64, tolerance: f64 },
    #[error(
        "top Fock level population {population:e} at t={time} exceeds {tolerance:e}; raise the cutoff"
    )]
    TopLevel {
        time: f64,
        population: f64,
        tolerance: f64,
    },
    #[error("hamiltonian is not hermitian")]
    NotHermitian,
    #[error("non-finite classical state at t={0}")]
    NonFinite(f64),
    #[error("method {method:?} is not supported by {engine}")]
    UnsupportedMethod { method: Method, engine: &'static str },
    #[error("model {0} has no mean-field back-reaction")]
    NotNeoClassical(&'static str),
    #[error("golden-rule regime requires |delta|/g >= {required}, got {ratio}")]
    RegimeViolation { ratio: f64, required: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

impl DynamicsError {
    /// Tolerance aborts, as opposed to bad inputs.
    pub fn is_numerical_abort(&self) -> bool {
        matches!(
            self,
            DynamicsError::NormDrift { .. } | DynamicsError::TopLevel { .. } | DynamicsError::NonFinite(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Spectral propagation, exact for time-independent Hamiltonians.
    MatrixExponential,
    /// Classical fourth-order Runge-Kutta.
    Rk4,
    /// Hamiltonian frozen at each interval midpoint; Strang splitting for hybrids.
    MidpointPiecewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_max: f64,
    pub method: Method,
    #[serde(default = "default_norm_tol")]
    pub norm_drift_tol: f64,
    #[serde(default = "default_top_tol")]
    pub top_level_tol: f64,
    /// Keep every `record_stride`-th step in the trajectory. Checks still run on every step.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_norm_tol() -> f64 {
    1e-9
}

fn default_top_tol() -> f64 {
    1e-8
}

fn default_stride() -> usize {
    1
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_max: f64, method: Method) -> Self {
        Self {
            dt,
            t_max,
            method,
            norm_drift_tol: default_norm_tol(),
            top_level_tol: default_top_tol(),
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |msg: String| Err(DynamicsError::Config(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt * (1.0 - 1e-12)) {
            return bad(format!("t_max must be >= dt, got {}", self.t_max));
        }
        for (name, tol) in [
            ("norm_drift_tol", self.norm_drift_tol),
            ("top_level_tol", self.top_level_tol),
        ] {
            if !(tol > 0.0 && tol < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {tol}"));
            }
        }
        if self.record_stride == 0 {
            return bad("record_stride must be >= 1".into());
        }
        Ok(())
    }

    /// Number of steps and the step actually used, so the grid ends exactly at `t_max`.
    pub fn grid(&self) -> (usize, f64) {
        let ratio = self.t_max / self.dt;
        let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        }
        .max(1);
        (steps, self.t_max / steps as f64)
    }
}

/// Sampled evolution. `classical` holds `(x, p)` for drive and hybrid runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub classical: Option<Vec<(f64, f64)>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds at least the initial time")
    }
}

/// Per-step invariant checks shared by all engines.
pub(crate) fn check_state(psi: &StateVector, time: f64, cfg: &EvolutionConfig) -> Result<(), DynamicsError> {
    let norm = psi.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > cfg.norm_drift_tol {
        return Err(DynamicsError::NormDrift {
            time,
            norm,
            tolerance: cfg.norm_drift_tol,
        });
    }
    let population = psi.top_level_population();
    if population > cfg.top_level_tol {
        return Err(DynamicsError::TopLevel {
            time,
            population,
            tolerance: cfg.top_level_tol,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_t_max_exactly() {
        let (n, dt) = EvolutionConfig::new(0.1, 1.0, Method::Rk4).grid();
        assert_eq!(n, 10);
        assert!((dt * n as f64 - 1.0).abs() < 1e-15);
        let (n, dt) = EvolutionConfig::new(0.3, 1.0, Method::Rk4).grid();
        assert_eq!(n, 4);
        assert_eq!(dt, 0.25);
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::new(0.0, 1.0, Method::Rk4).validate().is_err());
        assert!(EvolutionConfig::new(0.1, 0.01, Method::Rk4).validate().is_err());
        let mut c = EvolutionConfig::new(0.1, 1.0, Method::Rk4);
        c.norm_drift_tol = 1.0;
        assert!(c.validate().is_err());
        c.norm_drift_tol = 1e-9;
        c.record_stride = 0;
        assert!(c.validate().is_err());
    }
}
