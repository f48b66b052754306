//! Invariant suite run on every returned wave fan.

use serde::{Deserialize, Serialize};

use crate::conservation::max_rh_residual;
use crate::fan::{Family, Speed, State, WaveFan};
use crate::flux::FluxModel;

/// Results of [`check_fan`]; residuals are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// Speed ordering and state chaining hold.
    pub chain_ok: bool,
    pub rh_residual: f64,
    pub wave_property_residual: f64,
    pub self_similarity_defect: f64,
}

impl InvariantReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.chain_ok
            && self.rh_residual <= tol
            && self.wave_property_residual <= tol
            && self.self_similarity_defect == 0.0
    }
}

fn polymer_flux(model: &FluxModel, s: &State) -> f64 {
    match (model.polymer(), s) {
        (Some(f), State::Polymer(p)) => f.f(p.s, p.c, p.k),
        _ => f64::NAN,
    }
}

/// Largest violation of the quantities each wave family must carry through.
pub fn wave_property_residual(model: &FluxModel, fan: &WaveFan) -> f64 {
    let mut worst: f64 = 0.0;
    let mut note = |v: f64| worst = worst.max(if v.is_nan() { f64::INFINITY } else { v.abs() });
    for w in &fan.waves {
        match (w.left, w.right) {
            (State::Polymer(a), State::Polymer(b)) => {
                let (fa, fb) = (polymer_flux(model, &w.left), polymer_flux(model, &w.right));
                match w.family {
                    Family::S => {
                        note(a.c - b.c);
                        note(a.k - b.k);
                    }
                    Family::C => {
                        note(a.k - b.k);
                        if let (FluxModel::PolymerPlain { .. }, true) =
                            (model, a.s > 0.0 && b.s > 0.0)
                        {
                            note(fa / a.s - fb / b.s);
                        }
                    }
                    Family::K => {
                        note(fa - fb);
                        note(a.c - b.c);
                        note(w.speed.max());
                    }
                    Family::CK => {
                        note(fa - fb);
                        note(w.speed.max());
                    }
                    _ => note(f64::NAN),
                }
            }
            (State::Traffic(a), State::Traffic(b)) => {
                let g = model.traffic().map_or(f64::NAN, |t| t.gamma);
                match w.family {
                    Family::V => {
                        note(a.w(g) - b.w(g));
                        note(a.k - b.k);
                    }
                    Family::Rho => {
                        note(a.v - b.v);
                        note(a.k - b.k);
                    }
                    Family::K => {
                        note(a.rho * a.v - b.rho * b.v);
                        note(a.w(g) - b.w(g));
                        note(w.speed.max());
                    }
                    Family::Vacuum => {
                        note(a.k - b.k);
                        note(a.rho);
                        note(b.rho);
                    }
                    _ => note(f64::NAN),
                }
            }
            _ => note(f64::NAN),
        }
    }
    worst
}

/// Largest difference between samples at `(t, xi t)` for `t` in `{0.5, 1, 2}`.
pub fn self_similarity_defect(fan: &WaveFan) -> f64 {
    let (lo, hi) = fan.speed_bounds().unwrap_or((0.0, 0.0));
    let mut xis: Vec<f64> = (0..=256)
        .map(|i| lo - 1.0 + (hi - lo + 2.0) * i as f64 / 256.0)
        .collect();
    for w in &fan.waves {
        match w.speed {
            Speed::Single(s) => xis.push(s),
            Speed::Range(a, b) => xis.extend([a, b, 0.5 * (a + b)]),
        }
    }
    let mut worst: f64 = 0.0;
    for xi in xis {
        let base = fan.sample(1.0, xi);
        for t in [0.5, 2.0] {
            worst = worst.max(fan.sample(t, xi * t).max_abs_diff(&base));
        }
    }
    worst
}

pub fn check_fan(model: &FluxModel, fan: &WaveFan, tol: f64) -> InvariantReport {
    InvariantReport {
        chain_ok: fan.validate(tol).is_ok(),
        rh_residual: max_rh_residual(model, fan),
        wave_property_residual: wave_property_residual(model, fan),
        self_similarity_defect: self_similarity_defect(fan),
    }
}
