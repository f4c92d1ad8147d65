//! First-order time-dependent perturbation theory for the beam-splitter model.
//!
//! In the interaction picture of `H_0 = nu a^dagger a + omega b^dagger b` the
//! coupling is `g (a b^dagger e^{-i(nu-omega)t} + h.c.)`. Truncating the Dyson
//! series after the linear term gives the detector one-quantum probability
//!
//! ```text
//! P(n=1) = g^2 |alpha|^2 int_0^t int_0^t e^{-i(omega-nu)(t'-t'')} dt' dt''
//!        = 4 g^2 |alpha|^2 sin^2((nu-omega) t/2) / (nu-omega)^2
//! ```
//!
//! Both sides are computed independently: the double integral by tensor
//! Gauss-Legendre quadrature, the right-hand side in closed form.

use super::formulas::sinc;
use super::quadrature::GaussLegendre;
use crate::models::BeamSplitterParams;

const NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DysonEstimate {
    pub closed_form: f64,
    pub double_integral: f64,
    /// `g^2 |alpha|^2 t^2`; first order is trustworthy while this is well below 0.01.
    pub expansion_parameter: f64,
}

impl DysonEstimate {
    /// Recommended validity bound on [`DysonEstimate::expansion_parameter`].
    pub const VALIDITY_BOUND: f64 = 0.01;

    pub fn is_valid(&self) -> bool {
        self.expansion_parameter < Self::VALIDITY_BOUND
    }
}

/// First-order detector excitation probability. `|alpha|^2` is the mean
/// field occupation, so Fock inputs `|n>` use `n`.
pub fn dyson_first_order(p: &BeamSplitterParams, t: f64) -> DysonEstimate {
    let intensity = p.field.intensity();
    let coupling = p.g * p.g * intensity;
    let delta = p.nu - p.omega;

    let s = sinc(delta * t / 2.0);
    let closed_form = coupling * t * t * s * s;

    let rule = GaussLegendre::new(NODES);
    let panels = (delta.abs() * t).ceil() as usize + 1;
    let grid = rule.composite(0.0, t, panels);
    // the imaginary part is antisymmetric under t' <-> t'' and cancels
    let mut integral = 0.0;
    for &(t1, w1) in &grid {
        let mut row = 0.0;
        for &(t2, w2) in &grid {
            row += w2 * ((p.omega - p.nu) * (t1 - t2)).cos();
        }
        integral += w1 * row;
    }

    DysonEstimate {
        closed_form,
        double_integral: coupling * integral,
        expansion_parameter: coupling * t * t,
    }
}
