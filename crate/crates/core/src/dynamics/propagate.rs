use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{check_state, DynamicsError, EvolutionConfig, Method, Trajectory};
use crate::hilbert::{Operator, StateVector};
use crate::models::{
    driven_oscillator_parts, driven_qubit_parts, DrivenHamiltonian, DrivenOscillatorParams,
    QubitSemiClassicalParams,
};

/// Eigendecomposition of a hermitian operator, used to apply `exp(-i H t)`.
#[derive(Debug, Clone)]
pub struct Spectral {
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Spectral {
    pub fn new(h: &Operator) -> Result<Self, DynamicsError> {
        if !h.is_hermitian() {
            return Err(DynamicsError::NotHermitian);
        }
        Ok(Self::of_matrix(h.matrix().clone()))
    }

    pub(crate) fn of_matrix(m: DMatrix<Complex64>) -> Self {
        if m.iter().all(|z| z.im == 0.0) {
            let eig = SymmetricEigen::new(m.map(|z| z.re));
            return Self {
                values: eig.eigenvalues,
                vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
            };
        }
        let eig = SymmetricEigen::new(m);
        Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// Coordinates of `v` in the eigenbasis.
    fn to_eigenbasis(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        self.vectors.ad_mul(v)
    }

    fn from_eigenbasis(&self, c: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let phased = DVector::from_iterator(
            c.len(),
            c.iter()
                .zip(self.values.iter())
                .map(|(ci, e)| ci * Complex64::new(0.0, -e * t).exp()),
        );
        &self.vectors * phased
    }

    /// `exp(-i H t) v`.
    pub fn propagate(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.from_eigenbasis(&self.to_eigenbasis(v), t)
    }

    /// Dense `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.values.len();
        let phases = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(0.0, -self.values[i] * t).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.vectors * phases * self.vectors.adjoint()
    }
}

struct Recorder<'a> {
    cfg: &'a EvolutionConfig,
    steps: usize,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a EvolutionConfig, steps: usize, classical: bool) -> Self {
        Self {
            cfg,
            steps,
            traj: Trajectory {
                times: Vec::new(),
                states: Vec::new(),
                classical: classical.then(Vec::new),
            },
        }
    }

    fn push(&mut self, step: usize, time: f64, psi: &StateVector, xp: Option<(f64, f64)>) -> Result<(), DynamicsError> {
        check_state(psi, time, self.cfg)?;
        if let Some((x, p)) = xp {
            if !(x.is_finite() && p.is_finite()) {
                return Err(DynamicsError::NonFinite(time));
            }
        }
        if step % self.cfg.record_stride == 0 || step == self.steps {
            self.traj.times.push(time);
            self.traj.states.push(psi.clone());
            if let (Some(c), Some(xp)) = (self.traj.classical.as_mut(), xp) {
                c.push(xp);
            }
        }
        Ok(())
    }
}

pub(crate) fn rk4_step<F>(psi: &DVector<Complex64>, t: f64, dt: f64, h_at: F) -> DVector<Complex64>
where
    F: Fn(f64) -> DMatrix<Complex64>,
{
    let mi = Complex64::new(0.0, -1.0);
    let f = |time: f64, v: &DVector<Complex64>| (h_at(time) * v) * mi;
    let half = Complex64::new(dt / 2.0, 0.0);
    let full = Complex64::new(dt, 0.0);
    let k1 = f(t, psi);
    let k2 = f(t + dt / 2.0, &(psi + &k1 * half));
    let k3 = f(t + dt / 2.0, &(psi + &k2 * half));
    let k4 = f(t + dt, &(psi + &k3 * full));
    psi + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dt / 6.0, 0.0)
}

/// Evolve under a time-independent hermitian Hamiltonian.
///
/// `MatrixExponential` evaluates `exp(-i H t_k) psi0` directly at every grid
/// time, `MidpointPiecewise` repeatedly applies the one-step propagator and
/// `Rk4` integrates the Schrodinger equation.
pub fn evolve_unitary(h: &Operator, psi0: &StateVector, cfg: &EvolutionConfig) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    if !h.is_hermitian() {
        return Err(DynamicsError::NotHermitian);
    }
    if h.space() != psi0.space() {
        return Err(crate::hilbert::HilbertError::SpaceMismatch {
            left: h.space().to_string(),
            right: psi0.space().to_string(),
        }
        .into());
    }
    let (steps, dt) = cfg.grid();
    let space = psi0.space().clone();
    let mut rec = Recorder::new(cfg, steps, false);
    rec.push(0, 0.0, psi0, None)?;
    match cfg.method {
        Method::MatrixExponential => {
            let spec = Spectral::new(h)?;
            let c0 = spec.to_eigenbasis(psi0.amplitudes());
            for k in 1..=steps {
                let t = k as f64 * dt;
                let psi = StateVector::from_raw(space.clone(), spec.from_eigenbasis(&c0, t));
                rec.push(k, t, &psi, None)?;
            }
        }
        Method::MidpointPiecewise => {
            let u = Spectral::new(h)?.unitary(dt);
            let mut v = psi0.amplitudes().clone();
            for k in 1..=steps {
                v = &u * v;
                rec.push(k, k as f64 * dt, &StateVector::from_raw(space.clone(), v.clone()), None)?;
            }
        }
        Method::Rk4 => {
            let m = h.matrix().clone();
            let mut v = psi0.amplitudes().clone();
            for k in 1..=steps {
                v = rk4_step(&v, (k - 1) as f64 * dt, dt, |_| m.clone());
                rec.push(k, k as f64 * dt, &StateVector::from_raw(space.clone(), v.clone()), None)?;
            }
        }
    }
    Ok(rec.traj)
}

/// Detector under a prescribed classical drive `x(t) = x0 sin(nu t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Qubit(QubitSemiClassicalParams),
    Oscillator(DrivenOscillatorParams),
}

impl Drive {
    pub fn hamiltonian(&self) -> Result<DrivenHamiltonian, DynamicsError> {
        Ok(match self {
            Drive::Qubit(p) => driven_qubit_parts(p)?,
            Drive::Oscillator(p) => driven_oscillator_parts(p)?,
        })
    }

    pub fn nu(&self) -> f64 {
        match self {
            Drive::Qubit(p) => p.nu,
            Drive::Oscillator(p) => p.nu,
        }
    }

    pub fn x0(&self) -> f64 {
        match self {
            Drive::Qubit(p) => p.x0,
            Drive::Oscillator(p) => p.x0,
        }
    }

    /// Classical phase-space point `(x, p)` at time `t`, with `p = dx/dt`.
    pub fn phase_point(&self, t: f64) -> (f64, f64) {
        let (x0, nu) = (self.x0(), self.nu());
        (x0 * (nu * t).sin(), x0 * nu * (nu * t).cos())
    }
}

/// Schrodinger evolution under the time-dependent drive.
///
/// `MidpointPiecewise` freezes `H` at each interval midpoint (second order);
/// `Rk4` samples `H` at the Runge-Kutta stages (fourth order).
pub fn evolve_driven(drive: &Drive, psi0: &StateVector, cfg: &EvolutionConfig) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let parts = drive.hamiltonian()?;
    if parts.space() != psi0.space() {
        return Err(crate::hilbert::HilbertError::SpaceMismatch {
            left: parts.space().to_string(),
            right: psi0.space().to_string(),
        }
        .into());
    }
    let (steps, dt) = cfg.grid();
    let space = psi0.space().clone();
    let h0 = parts.detector_free.matrix().clone();
    let q = parts.coupling.matrix().clone();
    let lambda = parts.lambda;
    let h_at = |t: f64| &h0 + &q * Complex64::new(lambda * drive.phase_point(t).0, 0.0);

    let mut rec = Recorder::new(cfg, steps, true);
    rec.push(0, 0.0, psi0, Some(drive.phase_point(0.0)))?;
    let mut v = psi0.amplitudes().clone();
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * dt;
        v = match cfg.method {
            Method::MidpointPiecewise => Spectral::of_matrix(h_at(t0 + dt / 2.0)).propagate(&v, dt),
            Method::Rk4 => rk4_step(&v, t0, dt, h_at),
            Method::MatrixExponential => {
                return Err(DynamicsError::UnsupportedMethod {
                    method: cfg.method,
                    engine: "evolve_driven",
                })
            }
        };
        let t = k as f64 * dt;
        rec.push(k, t, &StateVector::from_raw(space.clone(), v.clone()), Some(drive.phase_point(t)))?;
    }
    Ok(rec.traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{coherent_state, CoherentSpec, Factor, SpaceDescriptor};
    use crate::models::{
        build_beam_splitter_hamiltonian, build_jc_hamiltonian, BeamSplitterParams, FieldState,
        JaynesCummingsParams,
    };
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn number_eigenstate_only_picks_up_a_phase() {
        let s = SpaceDescriptor::boson(4).unwrap();
        let h = Operator::number(&s, 0).unwrap().scale_real(1.7);
        let one = StateVector::basis(&s, &[1]).unwrap();
        for method in [Method::MatrixExponential, Method::MidpointPiecewise, Method::Rk4] {
            let traj = evolve_unitary(&h, &one, &EvolutionConfig::new(0.01, 2.0, method)).unwrap();
            for (t, psi) in traj.times.iter().zip(&traj.states) {
                assert_abs_diff_eq!(psi.level_population(0, 1).unwrap(), 1.0, epsilon = 1e-10);
                let phase = psi.amplitudes()[1];
                let expect = Complex64::new(0.0, -1.7 * t).exp();
                assert_abs_diff_eq!((phase - expect).norm(), 0.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn resonant_jc_single_excitation_rabi() {
        let g = 0.05;
        let p = JaynesCummingsParams {
            nu: 1.0,
            omega: 1.0,
            g,
            field_cutoff: 4,
            field: FieldState::Fock { n: 1 },
            anti_rotating: false,
        };
        let h = build_jc_hamiltonian(&p).unwrap();
        let space = h.space().clone();
        let psi0 = StateVector::basis(&space, &[1, 0]).unwrap();
        let traj = evolve_unitary(&h, &psi0, &EvolutionConfig::new(0.5, 100.0, Method::MatrixExponential)).unwrap();
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            let pe = psi.level_population(1, 1).unwrap();
            assert_abs_diff_eq!(pe, (g * t).sin().powi(2), epsilon = 1e-6);
        }
    }

    #[test]
    fn resonant_beam_splitter_swaps_at_quarter_period() {
        let g = 0.1;
        let p = BeamSplitterParams {
            nu: 1.0,
            omega: 1.0,
            g,
            field_cutoff: 3,
            detector_cutoff: 3,
            field: FieldState::Fock { n: 1 },
        };
        let h = build_beam_splitter_hamiltonian(&p).unwrap();
        let psi0 = StateVector::basis(h.space(), &[1, 0]).unwrap();
        let t_swap = PI / (2.0 * g);
        let traj = evolve_unitary(&h, &psi0, &EvolutionConfig::new(t_swap / 100.0, t_swap, Method::MatrixExponential)).unwrap();
        let last = traj.final_state();
        assert_abs_diff_eq!(last.level_population(1, 1).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(last.level_population(0, 0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unitary_rejects_mismatch_and_flags_truncation() {
        let s = SpaceDescriptor::boson(3).unwrap();
        let h = Operator::number(&s, 0).unwrap();
        let other = StateVector::basis(&SpaceDescriptor::boson(4).unwrap(), &[0]).unwrap();
        assert!(evolve_unitary(&h, &other, &EvolutionConfig::new(0.1, 1.0, Method::Rk4)).is_err());
        let top = StateVector::basis(&s, &[2]).unwrap();
        let err = evolve_unitary(&h, &top, &EvolutionConfig::new(0.1, 1.0, Method::Rk4)).unwrap_err();
        assert!(matches!(err, DynamicsError::TopLevel { .. }));
        assert!(err.is_numerical_abort());
        let a = Operator::annihilation(&s, 0).unwrap();
        let ground = StateVector::basis(&s, &[0]).unwrap();
        assert_eq!(
            evolve_unitary(&a, &ground, &EvolutionConfig::new(0.1, 1.0, Method::Rk4)).unwrap_err(),
            DynamicsError::NotHermitian
        );
    }

    #[test]
    fn zero_coupling_drive_is_stationary() {
        let p = DrivenOscillatorParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 0.0,
            x0: 1.0,
            detector_cutoff: 4,
        };
        let s = SpaceDescriptor::boson(4).unwrap();
        let psi0 = StateVector::basis(&s, &[0]).unwrap();
        let traj = evolve_driven(&Drive::Oscillator(p), &psi0, &EvolutionConfig::new(0.1, 5.0, Method::MidpointPiecewise)).unwrap();
        for psi in &traj.states {
            assert_abs_diff_eq!(psi.level_population(0, 0).unwrap(), 1.0, epsilon = 1e-14);
        }
        let classical = traj.classical.unwrap();
        assert_eq!(classical.len(), traj.times.len());
        assert_abs_diff_eq!(classical[10].0, (1.0f64).sin(), epsilon = 1e-12);
    }

    #[test]
    fn driven_oscillator_stays_coherent() {
        let p = DrivenOscillatorParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 0.05,
            x0: 1.0,
            detector_cutoff: 12,
        };
        let s = SpaceDescriptor::boson(12).unwrap();
        let psi0 = StateVector::basis(&s, &[0]).unwrap();
        let t = 10.0;
        let traj = evolve_driven(&Drive::Oscillator(p), &psi0, &EvolutionConfig::new(1e-3, t, Method::MidpointPiecewise)).unwrap();
        let beta = super::super::coherent_amplitude_beta(&p, t);
        let mean = beta.norm_sqr();
        let probs = traj.final_state().marginal(0).unwrap();
        let mut pois = (-mean).exp();
        for (n, prob) in probs.iter().enumerate().take(6) {
            assert_abs_diff_eq!(*prob, pois, epsilon = 1e-6);
            pois *= mean / (n as f64 + 1.0);
        }
        // the state is |-beta e^{-i omega t}>: the sign flips because x'' = -x at nu = 1
        let spec = CoherentSpec::new(-beta * Complex64::new(0.0, -t).exp(), 1e-12).unwrap();
        let expect = coherent_state(&s, 0, &spec).unwrap();
        assert_abs_diff_eq!(expect.inner(traj.final_state()).unwrap().norm(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn midpoint_and_rk4_agree_on_driven_qubit() {
        let p = QubitSemiClassicalParams {
            omega: 1.0,
            nu: 1.5,
            lambda: 0.01,
            x0: 1.0,
        };
        let space = SpaceDescriptor::new(vec![Factor::TwoLevel]).unwrap();
        let g = StateVector::basis(&space, &[0]).unwrap();
        let a = evolve_driven(&Drive::Qubit(p), &g, &EvolutionConfig::new(1e-3, 20.0, Method::MidpointPiecewise)).unwrap();
        let b = evolve_driven(&Drive::Qubit(p), &g, &EvolutionConfig::new(1e-3, 20.0, Method::Rk4)).unwrap();
        let pa = a.final_state().level_population(0, 1).unwrap();
        let pb = b.final_state().level_population(0, 1).unwrap();
        assert!((pa / pb - 1.0).abs() < 1e-5, "{pa} vs {pb}");
        assert!(evolve_driven(&Drive::Qubit(p), &g, &EvolutionConfig::new(1e-3, 1.0, Method::MatrixExponential)).is_err());
    }
}
