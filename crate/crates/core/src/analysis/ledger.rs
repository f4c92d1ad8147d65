use serde::Serialize;

use super::{resolved, AnalysisError, Target};
use crate::dynamics::Trajectory;
use crate::hilbert::{Operator, StateVector};
use crate::models::{
    beam_splitter_parts, classical_energy, driven_oscillator_parts, driven_qubit_parts, jc_parts, DrivenHamiltonian,
    ModelSpec, QuantumHamiltonian,
};

/// Smallest transition probability [`conditioned_energy_deficit`] will
/// condition on.
pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-12;

/// Per-sample energy decomposition of a run.
///
/// `e_classical` is the field energy: `<nu a^dagger a>` for a quantized
/// field, `p^2/2 + nu^2 x^2/2` for a classical oscillator. A prescribed
/// drive carries the constant `nu^2 x0^2 / 2` because its amplitude never
/// changes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub model: &'static str,
    pub times: Vec<f64>,
    pub e_classical: Vec<f64>,
    pub e_quantum_free: Vec<f64>,
    pub e_interaction: Vec<f64>,
    pub e_total: Vec<f64>,
    /// `sqrt(Var(H))` of the quantum Hamiltonian at each sample.
    pub energy_std: Vec<f64>,
    /// `dE_F/dt + lambda p <Q>` for mean-field runs, with `dE_F/dt` from
    /// three-point differences of the sampled field energy.
    pub edot_residual: Option<Vec<f64>>,
}

impl EnergyLedger {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |e_total(t) - e_total(0)|`.
    pub fn total_drift(&self) -> f64 {
        let e0 = self.e_total[0];
        self.e_total.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }

    /// [`EnergyLedger::total_drift`] divided by `|e_total(0)|`.
    pub fn relative_total_drift(&self) -> f64 {
        self.total_drift() / self.e_total[0].abs()
    }

    pub fn max_edot_residual(&self) -> Option<f64> {
        self.edot_residual
            .as_ref()
            .map(|r| r.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
    }

    pub fn summary(&self) -> LedgerSummary {
        LedgerSummary {
            samples: self.len(),
            total_drift: self.total_drift(),
            relative_total_drift: self.relative_total_drift(),
            e_classical_constant: self.e_classical.iter().all(|e| *e == self.e_classical[0]),
            max_energy_std: self.energy_std.iter().copied().fold(0.0, f64::max),
            max_edot_residual: self.max_edot_residual(),
        }
    }
}

/// Scalar digest of an [`EnergyLedger`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerSummary {
    pub samples: usize,
    pub total_drift: f64,
    pub relative_total_drift: f64,
    /// Every sample has bit-identical field energy.
    pub e_classical_constant: bool,
    pub max_energy_std: f64,
    pub max_edot_residual: Option<f64>,
}

/// Largest deviations over a run of the quantities a unitary evolution under
/// a time-independent Hamiltonian must keep fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationAudit {
    /// `max |‖psi‖ - 1|`.
    pub norm_drift: f64,
    /// `max |<H>(t) - <H>(0)| / |<H>(0)|`, or the absolute drift when `<H>(0) = 0`.
    pub energy_drift: f64,
    /// Same for the total excitation number, when the model conserves it.
    pub excitation_drift: Option<f64>,
}

impl ConservationAudit {
    pub fn max_drift(&self) -> f64 {
        self.norm_drift
            .max(self.energy_drift)
            .max(self.excitation_drift.unwrap_or(0.0))
    }
}

/// Conservation audit of a fully quantum run.
pub fn conservation_audit(traj: &Trajectory, model: &ModelSpec) -> Result<ConservationAudit, AnalysisError> {
    let model = resolved(model)?;
    let d = Decomposition::of(&model)?;
    check_consistent(&model, &d, traj)?;
    let Decomposition::Quantum(h) = &d else {
        return Err(AnalysisError::Mismatch {
            model: model.tag(),
            reason: "conservation audit needs a time-independent quantum Hamiltonian".into(),
        });
    };
    let relative = |op: &Operator| -> Result<f64, AnalysisError> {
        let v0 = expect_re(op, &traj.states[0])?;
        let mut worst = 0.0f64;
        for psi in &traj.states {
            worst = worst.max((expect_re(op, psi)? - v0).abs());
        }
        Ok(if v0 == 0.0 { worst } else { worst / v0.abs() })
    };
    Ok(ConservationAudit {
        norm_drift: traj.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max),
        energy_drift: relative(&h.total())?,
        excitation_drift: match super::excitation_operator(&model)? {
            Some(n) => Some(relative(&n)?),
            None => None,
        },
    })
}

enum Decomposition {
    Quantum(QuantumHamiltonian),
    Driven {
        parts: DrivenHamiltonian,
        nu: f64,
        x0: f64,
        back_reaction: bool,
    },
}

impl Decomposition {
    fn of(model: &ModelSpec) -> Result<Self, AnalysisError> {
        Ok(match model {
            ModelSpec::JaynesCummings(p) => Decomposition::Quantum(jc_parts(p)?),
            ModelSpec::BeamSplitter(p) => Decomposition::Quantum(beam_splitter_parts(p)?),
            ModelSpec::QubitDrive(p) | ModelSpec::NeoClassicalQubit(p) => Decomposition::Driven {
                parts: driven_qubit_parts(p)?,
                nu: p.nu,
                x0: p.x0,
                back_reaction: model.is_neo_classical(),
            },
            ModelSpec::DrivenOscillator(p) | ModelSpec::NeoClassicalOscillator(p) => Decomposition::Driven {
                parts: driven_oscillator_parts(p)?,
                nu: p.nu,
                x0: p.x0,
                back_reaction: model.is_neo_classical(),
            },
            ModelSpec::Gravito(_) => unreachable!("callers resolve first"),
        })
    }

    fn detector_free(&self) -> &Operator {
        match self {
            Decomposition::Quantum(h) => &h.detector_free,
            Decomposition::Driven { parts, .. } => &parts.detector_free,
        }
    }

    fn space(&self) -> &crate::hilbert::SpaceDescriptor {
        self.detector_free().space()
    }
}

fn check_consistent(model: &ModelSpec, d: &Decomposition, traj: &Trajectory) -> Result<(), AnalysisError> {
    let mismatch = |reason: String| AnalysisError::Mismatch {
        model: model.tag(),
        reason,
    };
    if traj.is_empty() || traj.states.len() != traj.times.len() {
        return Err(mismatch("trajectory has no samples or ragged columns".into()));
    }
    if let Some(bad) = traj.states.iter().find(|s| s.space() != d.space()) {
        return Err(mismatch(format!("state space {} vs model space {}", bad.space(), d.space())));
    }
    match (d, &traj.classical) {
        (Decomposition::Driven { .. }, Some(c)) if c.len() == traj.len() => Ok(()),
        (Decomposition::Driven { .. }, _) => Err(mismatch("missing classical phase-space samples".into())),
        (Decomposition::Quantum(_), _) => Ok(()),
    }
}

fn expect_re(op: &Operator, psi: &StateVector) -> Result<f64, AnalysisError> {
    Ok(op.expectation(psi)?.re)
}

/// Energy ledger of a trajectory produced for `model`.
pub fn energy_ledger(traj: &Trajectory, model: &ModelSpec) -> Result<EnergyLedger, AnalysisError> {
    let model = resolved(model)?;
    let d = Decomposition::of(&model)?;
    check_consistent(&model, &d, traj)?;
    let n = traj.len();
    let mut ledger = EnergyLedger {
        model: model.tag(),
        times: traj.times.clone(),
        e_classical: Vec::with_capacity(n),
        e_quantum_free: Vec::with_capacity(n),
        e_interaction: Vec::with_capacity(n),
        e_total: Vec::with_capacity(n),
        energy_std: Vec::with_capacity(n),
        edot_residual: None,
    };

    match &d {
        Decomposition::Quantum(h) => {
            let total = h.total();
            for psi in &traj.states {
                let (ef, ed, ei) = (
                    expect_re(&h.field_free, psi)?,
                    expect_re(&h.detector_free, psi)?,
                    expect_re(&h.interaction, psi)?,
                );
                ledger.e_classical.push(ef);
                ledger.e_quantum_free.push(ed);
                ledger.e_interaction.push(ei);
                ledger.e_total.push(ef + ed + ei);
                ledger.energy_std.push(total.variance(psi)?.max(0.0).sqrt());
            }
        }
        Decomposition::Driven {
            parts,
            nu,
            x0,
            back_reaction,
        } => {
            let classical = traj.classical.as_ref().expect("checked above");
            let drive_energy = 0.5 * nu * nu * x0 * x0;
            let mut coupling = Vec::with_capacity(n);
            for (psi, &(x, p)) in traj.states.iter().zip(classical) {
                let ef = if *back_reaction {
                    classical_energy(*nu, x, p)
                } else {
                    drive_energy
                };
                let q = expect_re(&parts.coupling, psi)?;
                let ed = expect_re(&parts.detector_free, psi)?;
                let ei = parts.lambda * x * q;
                coupling.push(q);
                ledger.e_classical.push(ef);
                ledger.e_quantum_free.push(ed);
                ledger.e_interaction.push(ei);
                ledger.e_total.push(ef + ed + ei);
                ledger.energy_std.push(parts.at(x).variance(psi)?.max(0.0).sqrt());
            }
            if *back_reaction && n >= 3 {
                let slope = three_point_derivative(&ledger.times, &ledger.e_classical);
                ledger.edot_residual = Some(
                    slope
                        .iter()
                        .zip(classical)
                        .zip(&coupling)
                        .map(|((de, &(_, p)), q)| de + parts.lambda * p * q)
                        .collect(),
                );
            }
        }
    }
    Ok(ledger)
}

/// Second-order derivative estimate on a possibly non-uniform grid.
fn three_point_derivative(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let stencil = |i: usize, at: usize| {
        let (t0, t1, t2) = (t[i], t[i + 1], t[i + 2]);
        let (h0, h1) = (t1 - t0, t2 - t1);
        let (c0, c1, c2) = match at {
            0 => (
                -(2.0 * h0 + h1) / (h0 * (h0 + h1)),
                (h0 + h1) / (h0 * h1),
                -h0 / (h1 * (h0 + h1)),
            ),
            1 => (-h1 / (h0 * (h0 + h1)), (h1 - h0) / (h0 * h1), h0 / (h1 * (h0 + h1))),
            _ => (
                h1 / (h0 * (h0 + h1)),
                -(h0 + h1) / (h0 * h1),
                (2.0 * h1 + h0) / (h1 * (h0 + h1)),
            ),
        };
        c0 * f[i] + c1 * f[i + 1] + c2 * f[i + 2]
    };
    (0..n)
        .map(|k| match k {
            0 => stencil(0, 0),
            k if k == n - 1 => stencil(n - 3, 2),
            k => stencil(k - 1, 1),
        })
        .collect()
}

/// Energy bookkeeping of a single transition, read out at the final sample.
///
/// The final state is projected onto the detector target level and
/// renormalized. The free energy of that conditioned state (field plus
/// detector, without the interaction) is compared with the free energy of the
/// initial state. A classical field contributes its sampled energy, which a
/// prescribed drive never changes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficitReport {
    pub model: &'static str,
    pub time: f64,
    /// Probability of the conditioning event.
    pub probability: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `energy_after - energy_before`: energy the single transition created.
    pub deficit: f64,
    /// Increase of the detector free energy on the conditioned branch.
    pub detector_gain: f64,
    pub detector_quantum: f64,
    pub field_quantum: f64,
    /// `field_quantum - detector_gain`, the mismatch a quantized field
    /// would have to absorb.
    pub e_diff: f64,
}

/// Conditioned energy deficit of the run ending at `traj.final_state()`,
/// conditioning on [`Target::default_for`] the model.
pub fn conditioned_energy_deficit(traj: &Trajectory, model: &ModelSpec) -> Result<DeficitReport, AnalysisError> {
    let model = resolved(model)?;
    let d = Decomposition::of(&model)?;
    check_consistent(&model, &d, traj)?;
    let (factor, level) = Target::default_for(&model).locate(d.space())?;
    let projector = Operator::level_projector(d.space(), factor, level)?;

    let psi0 = &traj.states[0];
    let last = traj.final_state();
    let probability = expect_re(&projector, last)?;
    if !(probability >= MIN_CONDITIONING_PROBABILITY) {
        return Err(AnalysisError::ConditioningTooSmall {
            probability,
            minimum: MIN_CONDITIONING_PROBABILITY,
        });
    }
    let conditioned = StateVector::normalized(last.space().clone(), projector.apply(last)?)?;

    let detector_before = expect_re(d.detector_free(), psi0)?;
    let detector_after = expect_re(d.detector_free(), &conditioned)?;
    let (field_before, field_after) = match &d {
        Decomposition::Quantum(h) => (expect_re(&h.field_free, psi0)?, expect_re(&h.field_free, &conditioned)?),
        Decomposition::Driven {
            nu, x0, back_reaction, ..
        } => {
            if *back_reaction {
                let c = traj.classical.as_ref().expect("checked above");
                let (first, end) = (c[0], c[c.len() - 1]);
                (classical_energy(*nu, first.0, first.1), classical_energy(*nu, end.0, end.1))
            } else {
                let e = 0.5 * nu * nu * x0 * x0;
                (e, e)
            }
        }
    };

    let energy_before = field_before + detector_before;
    let energy_after = field_after + detector_after;
    let detector_gain = detector_after - detector_before;
    let field_quantum = model.field_frequency();
    Ok(DeficitReport {
        model: model.tag(),
        time: traj.final_time(),
        probability,
        energy_before,
        energy_after,
        deficit: energy_after - energy_before,
        detector_gain,
        detector_quantum: model.detector_frequency(),
        field_quantum,
        e_diff: field_quantum - detector_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{simulate, transition_probability};
    use crate::dynamics::{EvolutionConfig, Method};
    use crate::models::{BeamSplitterParams, DrivenOscillatorParams, FieldState, QubitSemiClassicalParams};
    use approx::assert_abs_diff_eq;

    fn driven(nu: f64) -> ModelSpec {
        ModelSpec::DrivenOscillator(DrivenOscillatorParams {
            omega: 1.0,
            nu,
            lambda: 1e-2,
            x0: 1.0,
            detector_cutoff: 6,
        })
    }

    fn bs(nu: f64, field: FieldState) -> ModelSpec {
        ModelSpec::BeamSplitter(BeamSplitterParams {
            nu,
            omega: 1.0,
            g: 0.05,
            field_cutoff: 16,
            detector_cutoff: 16,
            field,
        })
    }

    #[test]
    fn derivative_stencil_is_exact_for_quadratics() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.7];
        let f: Vec<f64> = t.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        for (x, d) in t.iter().zip(three_point_derivative(&t, &f)) {
            assert_abs_diff_eq!(d, 6.0 * x - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn beam_splitter_ledger_closes() {
        let model = bs(1.0, FieldState::coherent(1.0));
        let traj = simulate(&model, &EvolutionConfig::new(0.1, 30.0, Method::MatrixExponential)).unwrap();
        let ledger = energy_ledger(&traj, &model).unwrap();
        assert!(ledger.relative_total_drift() < 1e-12);
        assert!(ledger.edot_residual.is_none());
        let audit = conservation_audit(&traj, &model).unwrap();
        assert!(audit.max_drift() < 1e-12, "{audit:?}");
        assert!(audit.excitation_drift.is_some());
        // energy really flows from field to detector
        assert!(ledger.e_quantum_free.last().unwrap() > &0.1);
    }

    #[test]
    fn semiclassical_field_energy_is_exactly_constant_and_detector_gains_omega_p() {
        let model = driven(1.0);
        let traj = simulate(&model, &EvolutionConfig::new(1e-2, 20.0, Method::MidpointPiecewise)).unwrap();
        let ledger = energy_ledger(&traj, &model).unwrap();
        assert!(ledger.e_classical.iter().all(|e| *e == ledger.e_classical[0]));
        let p1 = transition_probability(&traj, Target::DetectorLevel(1)).unwrap();
        let gain = ledger.e_quantum_free.last().unwrap() - ledger.e_quantum_free[0];
        // coherent response: <n> = |beta|^2 and P(1) = |beta|^2 e^{-|beta|^2}
        let pl = *p1.last().unwrap();
        assert!((gain - pl).abs() / pl < 0.05, "gain {gain} vs P(1) {pl}");
    }

    #[test]
    fn semiclassical_deficit_is_the_detector_quantum() {
        for nu in [1.0, 1.3] {
            let model = driven(nu);
            let traj = simulate(&model, &EvolutionConfig::new(1e-2, 20.0, Method::MidpointPiecewise)).unwrap();
            let r = conditioned_energy_deficit(&traj, &model).unwrap();
            assert_abs_diff_eq!(r.deficit, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(r.e_diff, nu - 1.0, epsilon = 1e-9);
        }
        let qubit = ModelSpec::QubitDrive(QubitSemiClassicalParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 0.01,
            x0: 1.0,
        });
        let traj = simulate(&qubit, &EvolutionConfig::new(1e-2, 20.0, Method::MidpointPiecewise)).unwrap();
        let r = conditioned_energy_deficit(&traj, &qubit).unwrap();
        assert_abs_diff_eq!(r.deficit, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quantum_deficit_closes_for_a_single_quantum() {
        let model = bs(1.0, FieldState::Fock { n: 1 });
        let traj = simulate(&model, &EvolutionConfig::new(0.1, 10.0, Method::MatrixExponential)).unwrap();
        let r = conditioned_energy_deficit(&traj, &model).unwrap();
        assert_abs_diff_eq!(r.deficit, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e_diff, 0.0, epsilon = 1e-12);

        let detuned = bs(1.2, FieldState::Fock { n: 1 });
        let traj = simulate(&detuned, &EvolutionConfig::new(0.1, 10.0, Method::MatrixExponential)).unwrap();
        let r = conditioned_energy_deficit(&traj, &detuned).unwrap();
        assert_abs_diff_eq!(r.deficit, -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(r.e_diff, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn conditioning_needs_a_transition() {
        let model = ModelSpec::DrivenOscillator(DrivenOscillatorParams {
            lambda: 0.0,
            ..match driven(1.0) {
                ModelSpec::DrivenOscillator(p) => p,
                _ => unreachable!(),
            }
        });
        let traj = simulate(&model, &EvolutionConfig::new(0.1, 1.0, Method::MidpointPiecewise)).unwrap();
        let err = conditioned_energy_deficit(&traj, &model).unwrap_err();
        assert!(matches!(err, AnalysisError::ConditioningTooSmall { .. }));
    }

    #[test]
    fn mismatched_trajectory_is_rejected() {
        let traj = simulate(&driven(1.0), &EvolutionConfig::new(0.1, 1.0, Method::MidpointPiecewise)).unwrap();
        let other = bs(1.0, FieldState::Fock { n: 1 });
        assert!(matches!(energy_ledger(&traj, &other), Err(AnalysisError::Mismatch { .. })));
    }

    #[test]
    fn hybrid_residual_is_second_order() {
        let model = ModelSpec::NeoClassicalQubit(QubitSemiClassicalParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 0.2,
            x0: 1.0,
        });
        let residual = |dt: f64| {
            let traj = simulate(&model, &EvolutionConfig::new(dt, 5.0, Method::MidpointPiecewise)).unwrap();
            energy_ledger(&traj, &model).unwrap().max_edot_residual().unwrap()
        };
        let (r1, r2) = (residual(1e-2), residual(5e-3));
        let order = (r1 / r2).log2();
        assert!(order > 1.9, "order {order}");
    }
}
