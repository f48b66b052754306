//! Random admissible Riemann data for each model, used by the invariant suite.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fan::{PolymerState, State, TrafficState};
use crate::flux::{AdsorptionParams, FluxModel, PolymerFluxParams, TrafficParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Polymer,
    PolymerAdsorption,
    PolymerGravity,
    Traffic,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Polymer,
        ModelKind::PolymerAdsorption,
        ModelKind::PolymerGravity,
        ModelKind::Traffic,
    ];

    /// The model with default parameters (`G = 4` for gravity).
    pub fn default_model(self) -> FluxModel {
        match self {
            ModelKind::Polymer => FluxModel::PolymerPlain {
                flux: PolymerFluxParams::default(),
            },
            ModelKind::PolymerAdsorption => FluxModel::PolymerAdsorption {
                flux: PolymerFluxParams::default(),
                adsorption: AdsorptionParams::default(),
            },
            ModelKind::PolymerGravity => FluxModel::PolymerGravity {
                flux: PolymerFluxParams::with_gravity(4.0),
            },
            ModelKind::Traffic => FluxModel::Traffic {
                traffic: TrafficParams::default(),
            },
        }
    }

    pub fn of(model: &FluxModel) -> ModelKind {
        match model {
            FluxModel::PolymerPlain { .. } => ModelKind::Polymer,
            FluxModel::PolymerAdsorption { .. } => ModelKind::PolymerAdsorption,
            FluxModel::PolymerGravity { .. } => ModelKind::PolymerGravity,
            FluxModel::Traffic { .. } => ModelKind::Traffic,
        }
    }
}

/// Range of `k` sampled for polymer data; gravity needs `G mu(c) > k`.
fn k_range(model: &FluxModel) -> (f64, f64) {
    match model {
        FluxModel::PolymerGravity { flux } => {
            let mu_min = flux.mu(0.0).min(flux.mu(1.0));
            (
                0.4,
                (0.95 * flux.gravity_number * mu_min)
                    .min(4.0 * mu_min * 0.95)
                    .min(flux.k_max),
            )
        }
        FluxModel::PolymerPlain { flux } | FluxModel::PolymerAdsorption { flux, .. } => {
            (flux.k_min.max(0.25), flux.k_max.min(4.0))
        }
        FluxModel::Traffic { .. } => (0.5, 2.0),
    }
}

/// Random Riemann data for `model`. One draw in ten repeats `c` (or `w`) and
/// one in ten repeats `k`, so the degenerate branches are exercised too.
pub fn random_riemann<R: Rng + ?Sized>(model: &FluxModel, rng: &mut R) -> (State, State) {
    let (k_lo, k_hi) = k_range(model);
    let k_l = rng.gen_range(k_lo..k_hi);
    let k_r = if rng.gen_bool(0.1) {
        k_l
    } else {
        rng.gen_range(k_lo..k_hi)
    };
    match model {
        FluxModel::Traffic { traffic } => {
            let g = traffic.gamma;
            let v_l = rng.gen_range(0.0..2.0);
            let w_l = v_l + rng.gen_range(0.0..2.0);
            let v_r = rng.gen_range(0.0..2.0);
            let w_r = if rng.gen_bool(0.1) && w_l >= v_r {
                w_l
            } else {
                v_r + rng.gen_range(0.0..2.0)
            };
            (
                TrafficState::from_wv(w_l, v_l, k_l, g).into(),
                TrafficState::from_wv(w_r, v_r, k_r, g).into(),
            )
        }
        _ => {
            let c_l = rng.gen_range(0.0..1.0);
            let c_r = if rng.gen_bool(0.1) {
                c_l
            } else {
                rng.gen_range(0.0..1.0)
            };
            let s_l = rng.gen_range(0.0..1.0);
            let s_r = rng.gen_range(0.0..1.0);
            (
                PolymerState::new(s_l, c_l, k_l).into(),
                PolymerState::new(s_r, c_r, k_r).into(),
            )
        }
    }
}

/// Gravity data whose c-wave travels left: `f(s_l, c_l, k_l) < 0`, distinct `c` and `k`.
pub fn random_gravity_case1<R: Rng + ?Sized>(
    flux: &PolymerFluxParams,
    rng: &mut R,
) -> (PolymerState, PolymerState) {
    let model = FluxModel::PolymerGravity { flux: flux.clone() };
    let (k_lo, k_hi) = k_range(&model);
    loop {
        let (c_l, c_r): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let (k_l, k_r): (f64, f64) = (rng.gen_range(k_lo..k_hi), rng.gen_range(k_lo..k_hi));
        if (c_l - c_r).abs() < 1e-3 || (k_l - k_r).abs() < 1e-3 {
            continue;
        }
        let Some(z) = flux.positive_zero(c_l, k_l) else {
            continue;
        };
        let s_l = rng.gen_range(0.0..z);
        if s_l <= 0.0 {
            continue;
        }
        let s_r = rng.gen_range(0.0..1.0);
        return (
            PolymerState::new(s_l, c_l, k_l),
            PolymerState::new(s_r, c_r, k_r),
        );
    }
}
