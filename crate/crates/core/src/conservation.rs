//! Conserved variables, fluxes and jump-condition residuals for each model.

use crate::fan::{State, Wave, WaveFan, WaveKind};
use crate::flux::FluxModel;

/// Conserved variables `U` of the governing 3x3 system at `state`.
///
/// Polymer: `(s, m(c) + c s, k)`; traffic: `(rho, rho w, k)`.
pub fn conserved(model: &FluxModel, state: &State) -> Option<[f64; 3]> {
    match (model, state) {
        (FluxModel::Traffic { traffic }, State::Traffic(t)) => {
            let w = t.w(traffic.gamma);
            Some([t.rho, t.rho * w, t.k])
        }
        (_, State::Polymer(p)) => {
            let m = model.adsorption().map_or(0.0, |a| a.m(p.c));
            Some([p.s, m + p.c * p.s, p.k])
        }
        _ => None,
    }
}

/// Flux `F(U)` of the governing 3x3 system at `state`.
pub fn flux_vector(model: &FluxModel, state: &State) -> Option<[f64; 3]> {
    match (model, state) {
        (FluxModel::Traffic { traffic }, State::Traffic(t)) => {
            let q = t.rho * t.v;
            Some([q, q * t.w(traffic.gamma), 0.0])
        }
        (_, State::Polymer(p)) => {
            let f = model.polymer()?.f(p.s, p.c, p.k);
            Some([f, p.c * f, 0.0])
        }
        _ => None,
    }
}

/// `max_i |sigma [U_i] - [F_i]|` on a discontinuity; `None` for rarefactions.
pub fn rh_residual(model: &FluxModel, wave: &Wave) -> Option<f64> {
    if wave.kind == WaveKind::Rarefaction {
        return None;
    }
    let sigma = wave.speed.min();
    let (ul, ur) = (
        conserved(model, &wave.left)?,
        conserved(model, &wave.right)?,
    );
    let (fl, fr) = (
        flux_vector(model, &wave.left)?,
        flux_vector(model, &wave.right)?,
    );
    Some(
        (0..3)
            .map(|i| (sigma * (ur[i] - ul[i]) - (fr[i] - fl[i])).abs())
            .fold(0.0, f64::max),
    )
}

/// Largest jump-condition residual over the discontinuities of `fan`.
pub fn max_rh_residual(model: &FluxModel, fan: &WaveFan) -> f64 {
    fan.waves
        .iter()
        .filter_map(|w| rh_residual(model, w))
        .fold(0.0, f64::max)
}
