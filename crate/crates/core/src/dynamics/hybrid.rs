//! Mean-field (neo-classical) evolution of a classical oscillator coupled to
//! a quantum detector.
//!
//! The classical oscillator has `H_cl = p^2/2 + nu^2 x^2/2` and follows
//! Hamilton's equations generated by the mean energy `<H>`:
//!
//! ```text
//! dx/dt = p
//! dp/dt = -nu^2 x - lambda <Q>
//! i dpsi/dt = (H_0 + lambda x Q) psi
//! ```
//!
//! so that `d/dt (p^2/2 + nu^2 x^2/2) = -lambda p <Q>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::propagate::Spectral;
use super::{check_state, DynamicsError, EvolutionConfig, Method, Trajectory};
use crate::hilbert::{HilbertError, StateVector};
use crate::models::{driven_oscillator_parts, driven_qubit_parts, DrivenHamiltonian, ModelSpec};

/// Classical phase-space point paired with the detector state.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub x: f64,
    pub p: f64,
    pub psi: StateVector,
}

struct MeanField {
    h0: DMatrix<Complex64>,
    q: DMatrix<Complex64>,
    lambda: f64,
    nu: f64,
}

impl MeanField {
    fn new(parts: &DrivenHamiltonian, nu: f64) -> Self {
        Self {
            h0: parts.detector_free.matrix().clone(),
            q: parts.coupling.matrix().clone(),
            lambda: parts.lambda,
            nu,
        }
    }

    fn mean_coupling(&self, v: &DVector<Complex64>) -> f64 {
        v.dotc(&(&self.q * v)).re
    }

    fn h_at(&self, x: f64) -> DMatrix<Complex64> {
        &self.h0 + &self.q * Complex64::new(self.lambda * x, 0.0)
    }

    /// Exact flow of `x'' = -nu^2 x + force` over `h`.
    fn classical_flow(&self, x: f64, p: f64, force: f64, h: f64) -> (f64, f64) {
        let w = self.nu;
        let shift = force / (w * w);
        let u = x - shift;
        let (s, c) = (w * h).sin_cos();
        (shift + u * c + p * s / w, -u * w * s + p * c)
    }

    /// `A(dt/2) B(dt) A(dt/2)`: A moves the classical pair with the quantum
    /// force frozen, B moves the state with `x` frozen. Each sub-flow is exact.
    fn strang(&self, x: f64, p: f64, v: &DVector<Complex64>, dt: f64) -> (f64, f64, DVector<Complex64>) {
        let (x, p) = self.classical_flow(x, p, -self.lambda * self.mean_coupling(v), dt / 2.0);
        let v = Spectral::of_matrix(self.h_at(x)).propagate(v, dt);
        let (x, p) = self.classical_flow(x, p, -self.lambda * self.mean_coupling(&v), dt / 2.0);
        (x, p, v)
    }

    fn rk4(&self, x: f64, p: f64, v: &DVector<Complex64>, dt: f64) -> (f64, f64, DVector<Complex64>) {
        let mi = Complex64::new(0.0, -1.0);
        let f = |x: f64, p: f64, v: &DVector<Complex64>| {
            (
                p,
                -self.nu * self.nu * x - self.lambda * self.mean_coupling(v),
                (self.h_at(x) * v) * mi,
            )
        };
        let c = |a: f64| Complex64::new(a, 0.0);
        let (k1x, k1p, k1v) = f(x, p, v);
        let (k2x, k2p, k2v) = f(x + dt / 2.0 * k1x, p + dt / 2.0 * k1p, &(v + &k1v * c(dt / 2.0)));
        let (k3x, k3p, k3v) = f(x + dt / 2.0 * k2x, p + dt / 2.0 * k2p, &(v + &k2v * c(dt / 2.0)));
        let (k4x, k4p, k4v) = f(x + dt * k3x, p + dt * k3p, &(v + &k3v * c(dt)));
        (
            x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            v + (k1v + k2v * c(2.0) + k3v * c(2.0) + k4v) * c(dt / 6.0),
        )
    }
}

/// Mean-field evolution for the neo-classical model variants.
///
/// `MidpointPiecewise` selects the Strang splitting (second order), `Rk4`
/// integrates the coupled system directly (fourth order).
pub fn evolve_hybrid(model: &ModelSpec, s0: &HybridState, cfg: &EvolutionConfig) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let (parts, nu) = match model {
        ModelSpec::NeoClassicalQubit(p) => (driven_qubit_parts(p)?, p.nu),
        ModelSpec::NeoClassicalOscillator(p) => (driven_oscillator_parts(p)?, p.nu),
        other => return Err(DynamicsError::NotNeoClassical(other.tag())),
    };
    if parts.space() != s0.psi.space() {
        return Err(HilbertError::SpaceMismatch {
            left: parts.space().to_string(),
            right: s0.psi.space().to_string(),
        }
        .into());
    }
    if cfg.method == Method::MatrixExponential {
        return Err(DynamicsError::UnsupportedMethod {
            method: cfg.method,
            engine: "evolve_hybrid",
        });
    }
    let mf = MeanField::new(&parts, nu);
    let (steps, dt) = cfg.grid();
    let space = s0.psi.space().clone();

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![s0.psi.clone()],
        classical: Some(vec![(s0.x, s0.p)]),
    };
    check_state(&s0.psi, 0.0, cfg)?;
    let (mut x, mut p, mut v) = (s0.x, s0.p, s0.psi.amplitudes().clone());
    for k in 1..=steps {
        (x, p, v) = match cfg.method {
            Method::Rk4 => mf.rk4(x, p, &v, dt),
            _ => mf.strang(x, p, &v, dt),
        };
        let t = k as f64 * dt;
        if !(x.is_finite() && p.is_finite()) {
            return Err(DynamicsError::NonFinite(t));
        }
        let psi = StateVector::from_raw(space.clone(), v.clone());
        check_state(&psi, t, cfg)?;
        if k % cfg.record_stride == 0 || k == steps {
            traj.times.push(t);
            traj.states.push(psi);
            if let Some(c) = traj.classical.as_mut() {
                c.push((x, p));
            }
        }
    }
    Ok(traj)
}
