//! Closed-form transition probabilities.
//!
//! Detunings follow `delta = nu - omega` (radiation minus detector) unless a
//! function says otherwise. Every `sin^2(delta t / 2) / delta^2` factor is
//! written as `(t^2 / 4) sinc^2(delta t / 2)` so the resonant limit is a
//! removable singularity rather than a division by zero.

use num_complex::Complex64;

use super::quadrature::GaussLegendre;
use super::DynamicsError;
use crate::models::DrivenOscillatorParams;

/// Smallest `|delta|/g` accepted by [`golden_rule_limit`].
pub const GOLDEN_RULE_MIN_RATIO: f64 = 10.0;

/// `sin(u) / u`, switching to its Taylor series for `|u| < 5e-7`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 5e-7 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `sin^2(delta t / 2) / delta^2`.
fn resonance_factor(delta: f64, t: f64) -> f64 {
    let s = sinc(delta * t / 2.0);
    t * t / 4.0 * s * s
}

/// Rabi formula `g^2/(g^2+delta^2) sin^2(sqrt(g^2+delta^2) t / 2)`.
///
/// `g` is the Rabi frequency. For a qubit coupled to `n` field quanta
/// through `g_q (a sigma_+ + a^dagger sigma_-)` it equals `2 sqrt(n) g_q`.
pub fn rabi_probability(g: f64, delta: f64, t: f64) -> f64 {
    let omega_sq = g * g + delta * delta;
    if omega_sq == 0.0 {
        return 0.0;
    }
    let s = (omega_sq.sqrt() * t / 2.0).sin();
    g * g / omega_sq * s * s
}

/// Weak-drive excitation probability of a qubit, `lambda^2 sin^2((omega-nu) t/2) / (omega-nu)^2`.
///
/// `lambda` is the drive amplitude coupling (`lambda x0` for a drive
/// `x0 sin(nu t)` acting through `lambda x sigma_x`). The value is not
/// clamped; it is only meaningful while it is much smaller than one.
pub fn perturbative_pe(lambda: f64, omega: f64, nu: f64, t: f64) -> f64 {
    lambda * lambda * resonance_factor(omega - nu, t)
}

/// Long-time, weak-coupling limit `(g^2/delta^2) sin^2(delta t / 2)`.
///
/// Refuses detunings with `|delta|/g < GOLDEN_RULE_MIN_RATIO`.
pub fn golden_rule_limit(g: f64, delta: f64, t: f64) -> Result<f64, DynamicsError> {
    let ratio = if g == 0.0 { f64::INFINITY } else { delta.abs() / g };
    if ratio < GOLDEN_RULE_MIN_RATIO {
        return Err(DynamicsError::RegimeViolation {
            ratio,
            required: GOLDEN_RULE_MIN_RATIO,
        });
    }
    Ok(g * g * resonance_factor(delta, t))
}

/// One-quantum probability of a classically driven oscillator,
/// `lambda^2 x0^2 nu^4 (t^2/4) sinc^2(delta t/2)` with `delta = nu - omega`.
pub fn semiclassical_pn1(p: &DrivenOscillatorParams, t: f64) -> f64 {
    let scale = p.lambda * p.x0 * p.nu * p.nu;
    scale * scale * resonance_factor(p.nu - p.omega, t)
}

/// Coherent amplitude `beta(t) = -i lambda int_0^t x''(s) e^{i omega s} ds`
/// for `x(s) = x0 sin(nu s)`, by composite Gauss-Legendre quadrature.
pub fn coherent_amplitude_beta(p: &DrivenOscillatorParams, t: f64) -> Complex64 {
    let rule = GaussLegendre::new(20);
    let panels = ((p.nu + p.omega) * t.abs()).ceil() as usize + 1;
    let accel = |s: f64| -p.x0 * p.nu * p.nu * (p.nu * s).sin();
    let integral = rule.integrate_complex(
        |s| Complex64::new(0.0, p.omega * s).exp() * accel(s),
        0.0,
        t,
        panels,
    );
    Complex64::new(0.0, -p.lambda) * integral
}

/// Fock-1 population `|beta|^2 e^{-|beta|^2}` of the coherent state `|beta>`.
pub fn pn1_from_beta(beta: Complex64) -> f64 {
    let m = beta.norm_sqr();
    m * (-m).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn sinc_series_branch_is_continuous() {
        for u in [4.9e-7, 5.0e-7, 5.1e-7] {
            assert_abs_diff_eq!(sinc(u), u.sin() / u, epsilon = 1e-15);
        }
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn rabi_formula_limits() {
        let g = 0.2;
        assert_abs_diff_eq!(rabi_probability(g, 0.0, PI / g), 1.0, epsilon = 1e-15);
        assert_eq!(rabi_probability(0.0, 0.3, 5.0), 0.0);
        assert_eq!(rabi_probability(0.0, 0.0, 5.0), 0.0);
        for t in [0.1, 1.0, 10.0, 100.0] {
            let pe = rabi_probability(0.3, 0.7, t);
            assert!((0.0..=1.0).contains(&pe));
        }
        // peak value g^2/(g^2+delta^2)
        let (g, d) = (0.01, 1.0);
        let t_peak = PI / (g * g + d * d as f64).sqrt();
        assert_abs_diff_eq!(rabi_probability(g, d, t_peak), g * g / (g * g + d * d), epsilon = 1e-18);
    }

    #[test]
    fn perturbative_pe_limits() {
        let (lambda, t) = (0.01, 7.0);
        assert_abs_diff_eq!(perturbative_pe(lambda, 1.0, 1.0, t), lambda * lambda * t * t / 4.0, epsilon = 1e-18);
        assert_abs_diff_eq!(perturbative_pe(lambda, 1.0, 1.0 - TAU / t, t), 0.0, epsilon = 1e-18);
        // continuous through the series switch
        let near = perturbative_pe(lambda, 1.0, 1.0 + 1e-7 / t, t);
        assert_abs_diff_eq!(near, lambda * lambda * t * t / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn golden_rule_regime_and_zeros() {
        assert!(matches!(golden_rule_limit(0.1, 0.5, 1.0), Err(DynamicsError::RegimeViolation { .. })));
        assert!(golden_rule_limit(0.1, 0.0, 1.0).is_err());
        let (g, d) = (0.01, 1.0);
        assert_abs_diff_eq!(golden_rule_limit(g, d, TAU / d).unwrap(), 0.0, epsilon = 1e-18);
    }

    #[test]
    fn golden_rule_tracks_rabi_at_large_detuning() {
        let (g, d) = (0.01, 1.0);
        for k in 0..6 {
            let t = (2 * k + 1) as f64 * PI / d;
            let gold = golden_rule_limit(g, d, t).unwrap();
            let rabi = rabi_probability(g, d, t);
            assert!((gold - rabi).abs() / rabi <= (g / d).powi(2) * 10.0, "k={k}");
        }
    }

    #[test]
    fn golden_rule_peak_slope_is_minus_two() {
        let g = 1e-3;
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let d = g * 10f64.powf(1.0 + 2.0 * i as f64 / 20.0);
                let peak = golden_rule_limit(g, d, PI / d).unwrap();
                (d.ln(), peak.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let (num, den) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
        assert_abs_diff_eq!(num / den, -2.0, epsilon = 1e-9);
    }

    #[test]
    fn pn1_resonant_limit_and_zeros() {
        let p = DrivenOscillatorParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 1e-3,
            x0: 2.0,
            detector_cutoff: 4,
        };
        let t = 10.0;
        assert_abs_diff_eq!(semiclassical_pn1(&p, t), 1e-6 * 4.0 * t * t / 4.0, epsilon = 1e-18);
        let detuned = DrivenOscillatorParams { nu: 1.0 + TAU / t, ..p };
        assert_abs_diff_eq!(semiclassical_pn1(&detuned, t), 0.0, epsilon = 1e-18);
    }

    #[test]
    fn beta_quadrature_matches_closed_form_integral() {
        // int_0^t sin(nu s) e^{i w s} ds in closed form, independent of the quadrature
        let p = DrivenOscillatorParams {
            omega: 1.0,
            nu: 1.3,
            lambda: 2e-3,
            x0: 0.7,
            detector_cutoff: 4,
        };
        let t = 17.0;
        let i = Complex64::new(0.0, 1.0);
        let part = |k: f64| ((i * k * t).exp() - 1.0) / (i * k);
        let int_sin = (part(p.omega + p.nu) - part(p.omega - p.nu)) / (2.0 * i);
        let expect = -i * p.lambda * (-p.x0 * p.nu * p.nu) * int_sin;
        let got = coherent_amplitude_beta(&p, t);
        assert_abs_diff_eq!((got - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn beta_carries_nu_to_the_fourth() {
        // on resonance the probability ratio between drive frequencies is (nu2/nu1)^4 up to
        // the counter-rotating remainder, which is small at long times
        let base = DrivenOscillatorParams {
            omega: 1.0,
            nu: 1.0,
            lambda: 1e-4,
            x0: 1.0,
            detector_cutoff: 4,
        };
        let fast = DrivenOscillatorParams { omega: 2.0, nu: 2.0, ..base };
        let t = 400.0;
        let ratio = coherent_amplitude_beta(&fast, t).norm_sqr() / coherent_amplitude_beta(&base, t).norm_sqr();
        assert!((ratio / 16.0 - 1.0).abs() < 0.01, "{ratio}");
        let formula = semiclassical_pn1(&fast, t) / semiclassical_pn1(&base, t);
        assert_abs_diff_eq!(formula, 16.0, epsilon = 1e-12);
    }
}
