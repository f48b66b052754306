//! The wave-fan document written by `solve`.

use riemann_core::{
    c_wave_sign, check_fan, traffic_middle, Family, FluxModel, InvariantReport, ModelKind, Speed,
    State, WaveFan, WaveKind, WaveSign,
};
use serde::{Deserialize, Serialize};

/// Format tag stored in every document.
pub const FAN_FORMAT: &str = "rough-riemann/fan/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub format: String,
    pub model: ModelKind,
    pub params: FluxModel,
    pub left: State,
    pub right: State,
    /// Which branches of the solver produced the fan.
    pub cases: Vec<String>,
    pub waves: Vec<WaveRecord>,
    pub residuals: InvariantReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveRecord {
    pub family: Family,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    /// A number for jumps, `[from, to]` for rarefactions.
    pub speed: Speed,
}

impl FanDocument {
    pub fn new(model: &FluxModel, fan: &WaveFan, tol: f64) -> Self {
        Self {
            format: FAN_FORMAT.to_string(),
            model: ModelKind::of(model),
            params: model.clone(),
            left: fan.left_state,
            right: fan.right_state,
            cases: case_labels(model, fan.left_state, fan.right_state),
            waves: fan
                .waves
                .iter()
                .map(|w| WaveRecord {
                    family: w.family,
                    kind: w.kind,
                    left: w.left,
                    right: w.right,
                    speed: w.speed,
                })
                .collect(),
            residuals: check_fan(model, fan, tol),
        }
    }
}

/// Labels of the solver branches taken for `(left, right)`.
pub fn case_labels(model: &FluxModel, left: State, right: State) -> Vec<String> {
    let mut out = Vec::new();
    match (model, left, right) {
        (FluxModel::Traffic { traffic }, State::Traffic(l), State::Traffic(r)) => {
            if l.k == r.k {
                out.push("equal_k");
            }
            let (rho_m, _) = traffic_middle(l, r, traffic);
            out.push(if rho_m == 0.0 && l.w(traffic.gamma) < r.v {
                "vacuum"
            } else {
                "no_vacuum"
            });
        }
        (FluxModel::PolymerGravity { flux }, State::Polymer(l), State::Polymer(r)) => {
            if l.c == r.c {
                out.push("equal_c");
            } else if l.k == r.k {
                out.push("equal_k");
            } else {
                out.push(match c_wave_sign(l, flux) {
                    WaveSign::Negative => "case_1_negative_c_wave",
                    WaveSign::Positive => "case_2_positive_c_wave",
                    WaveSign::Zero => "case_3_stationary_c_wave",
                });
            }
        }
        (_, State::Polymer(l), State::Polymer(r)) => {
            out.push(if l.k == r.k { "equal_k" } else { "k_jump" });
            if l.c == r.c {
                out.push("equal_c");
            }
        }
        _ => {}
    }
    out.into_iter().map(String::from).collect()
}
