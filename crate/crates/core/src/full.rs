//! Riemann solvers for the full 3x3 systems without gravity. Each one splits
//! off the stationary k-wave and hands the rest to a reduced solver.

use std::sync::Arc;

use crate::envelope::{minimum_jump, scalar_waves, StateMap};
use crate::error::{Result, RiemannError};
use crate::fan::{Family, PolymerState, State, TrafficState, Wave, WaveFan, WaveKind};
use crate::flux::{AdsorptionParams, FluxModel, PolymerFluxParams, TrafficParams};
use crate::gravity::solve_gravity3;
use crate::numerics::bisect;
use crate::reduced::{
    absorb_coincident, check_traffic, finish, polymer_state, solve_adsorption2, solve_polymer2,
    solve_traffic2, traffic_waves, PolymerState2, TrafficState2,
};

/// The trace `s_m` with `f(s_m, c, k_r) = target` on `[0,1]`, where `f` is increasing.
fn k_trace(flux: &PolymerFluxParams, c: f64, k_r: f64, target: f64) -> Result<f64> {
    if target <= 0.0 {
        return Ok(0.0);
    }
    if target >= 1.0 {
        return Ok(1.0);
    }
    bisect(|s| flux.f(s, c, k_r) - target, 0.0, 1.0, 1e-15).ok_or_else(|| {
        RiemannError::Assertion(format!(
            "k-wave trace for flux {target} not bracketed in [0,1]"
        ))
    })
}

fn k_wave_then<F>(
    left: PolymerState,
    right: PolymerState,
    flux: &PolymerFluxParams,
    second: F,
) -> Result<WaveFan>
where
    F: FnOnce(PolymerState2, PolymerState2) -> Result<WaveFan>,
{
    if flux.gravity_number != 0.0 {
        return Err(RiemannError::Domain(
            "flux has gravity; use the gravity solver for this model".into(),
        ));
    }
    flux.validate()?;
    flux.check_state(left.s, left.c, left.k)?;
    flux.check_state(right.s, right.c, right.k)?;
    let s_m = if left.k == right.k {
        left.s
    } else {
        k_trace(flux, left.c, right.k, flux.f(left.s, left.c, left.k))?
    };
    let rest = second(
        PolymerState2::new(s_m, left.c),
        PolymerState2::new(right.s, right.c),
    )?;
    let mid = polymer_state(s_m, left.c, right.k);
    let kw = Wave::jump(Family::K, WaveKind::Contact, State::Polymer(left), mid, 0.0);
    finish(WaveFan::chain(
        State::Polymer(left),
        State::Polymer(right),
        vec![vec![kw], rest.waves],
    ))
}

/// Polymer flooding without adsorption or gravity.
pub fn solve_polymer3(
    left: PolymerState,
    right: PolymerState,
    flux: &PolymerFluxParams,
) -> Result<WaveFan> {
    k_wave_then(left, right, flux, |l, r| {
        solve_polymer2(l, r, flux, right.k)
    })
}

/// Polymer flooding with adsorption.
pub fn solve_adsorption3(
    left: PolymerState,
    right: PolymerState,
    flux: &PolymerFluxParams,
    adsorption: &AdsorptionParams,
) -> Result<WaveFan> {
    k_wave_then(left, right, flux, |l, r| {
        solve_adsorption2(l, r, flux, adsorption, right.k)
    })
}

/// Intermediate state of the first solver step: `(rho_m, v_m)` at `k_r`.
pub fn traffic_middle(
    left: TrafficState,
    right: TrafficState,
    traffic: &TrafficParams,
) -> (f64, f64) {
    let w_l = left.w(traffic.gamma);
    if w_l >= right.v {
        (traffic.rho_from(w_l, right.v, right.k), right.v)
    } else {
        (0.0, w_l)
    }
}

/// Aw-Rascle traffic on a road with a jump in the coefficient `k`.
pub fn solve_traffic3(
    left: TrafficState,
    right: TrafficState,
    traffic: &TrafficParams,
) -> Result<WaveFan> {
    let g = traffic.gamma;
    let (w_l, w_r) = (left.w(g), right.w(g));
    check_traffic(traffic, left.k, w_l, left.v)?;
    check_traffic(traffic, right.k, w_r, right.v)?;
    if left.rho < 0.0 || right.rho < 0.0 {
        return Err(RiemannError::Domain("negative density".into()));
    }
    if left.k == right.k {
        let fan = solve_traffic2(
            TrafficState2::new(w_l, left.v),
            TrafficState2::new(w_r, right.v),
            left.k,
            traffic,
        )?;
        return Ok(pin_ends(fan, State::Traffic(left), State::Traffic(right)));
    }
    let (rho_m, v_m) = traffic_middle(left, right, traffic);
    // Step 1: waves from the middle state to R at k_r.
    let step1 = traffic_waves(
        traffic,
        right.k,
        TrafficState2::new(w_l, v_m),
        TrafficState2::new(w_r, right.v),
    );
    // Step 2: scalar law in rho along w = w_l with k jumping at x = 0.
    let stag = |k: f64| (w_l / k).max(0.0).powf(1.0 / g);
    let cap = stag(left.k)
        .max(stag(right.k))
        .max(left.rho)
        .max(rho_m)
        .max(1e-12);
    let f_l = traffic.density_flux(w_l, left.k, cap);
    let f_r = traffic.density_flux(w_l, right.k, cap);
    let path = minimum_jump(&f_l, &f_r, left.rho, rho_m)?;
    let lift = |k: f64| -> StateMap {
        Arc::new(move |rho: f64| {
            State::Traffic(TrafficState::new(rho, w_l - k * rho.max(0.0).powf(g), k))
        })
    };
    let lw = scalar_waves(&f_l, left.rho, path.s_minus, Family::V, lift(left.k));
    let rw = scalar_waves(&f_r, path.s_plus, rho_m, Family::V, lift(right.k));
    let kw = Wave::jump(
        Family::K,
        WaveKind::Contact,
        lift(left.k)(path.s_minus),
        lift(right.k)(path.s_plus),
        0.0,
    );
    let l = State::Traffic(left);
    let r = State::Traffic(right);
    // Re-anchor the data states so chaining holds exactly.
    let mut waves = absorb_coincident(lw, kw, rw);
    waves.push(step1);
    if let Some(first) = waves.iter_mut().flatten().next() {
        first.left = l;
    }
    finish(WaveFan::chain(l, r, waves)).map(|fan| pin_ends(fan, l, r))
}

/// Replaces the end states rebuilt from `(w, v)` by the data states.
fn pin_ends(mut fan: WaveFan, left: State, right: State) -> WaveFan {
    fan.left_state = left;
    fan.right_state = right;
    if let Some(first) = fan.waves.first_mut() {
        first.left = left;
    }
    if let Some(last) = fan.waves.last_mut() {
        last.right = right;
    }
    fan
}

fn state_mismatch(kind: &str) -> RiemannError {
    RiemannError::Domain(format!("{kind} model needs {kind} states"))
}

/// Solves the Riemann problem for any supported model.
pub fn solve_riemann(model: &FluxModel, left: State, right: State) -> Result<WaveFan> {
    model.validate()?;
    match model {
        FluxModel::Traffic { traffic } => match (left.traffic(), right.traffic()) {
            (Some(l), Some(r)) => solve_traffic3(l, r, traffic),
            _ => Err(state_mismatch("traffic")),
        },
        _ => {
            let (Some(l), Some(r)) = (left.polymer(), right.polymer()) else {
                return Err(state_mismatch("polymer"));
            };
            match model {
                FluxModel::PolymerPlain { flux } => solve_polymer3(l, r, flux),
                FluxModel::PolymerAdsorption { flux, adsorption } => {
                    solve_adsorption3(l, r, flux, adsorption)
                }
                FluxModel::PolymerGravity { flux } => solve_gravity3(l, r, flux),
                FluxModel::Traffic { .. } => unreachable!(),
            }
        }
    }
}
