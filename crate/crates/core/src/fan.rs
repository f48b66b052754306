//! Self-similar wave fans: the output type of every Riemann solver.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiemannError};

/// Tolerance on wave-speed ordering inside a fan.
pub const SPEED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolymerState {
    pub s: f64,
    pub c: f64,
    pub k: f64,
}

impl PolymerState {
    pub fn new(s: f64, c: f64, k: f64) -> Self {
        Self { s, c, k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficState {
    pub rho: f64,
    pub v: f64,
    pub k: f64,
}

impl TrafficState {
    pub fn new(rho: f64, v: f64, k: f64) -> Self {
        Self { rho, v, k }
    }

    /// Builds the state from Riemann invariants `(w, v)` at road condition `k`.
    pub fn from_wv(w: f64, v: f64, k: f64, gamma: f64) -> Self {
        let p = (w - v) / k;
        let rho = if p <= 0.0 { 0.0 } else { p.powf(1.0 / gamma) };
        Self { rho, v, k }
    }

    pub fn w(&self, gamma: f64) -> f64 {
        self.v + self.k * self.rho.powf(gamma)
    }
}

/// A point in phase space of one of the supported systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum State {
    Scalar { u: f64 },
    Polymer(PolymerState),
    Traffic(TrafficState),
}

impl State {
    pub fn scalar(&self) -> Option<f64> {
        match *self {
            State::Scalar { u } => Some(u),
            _ => None,
        }
    }

    pub fn polymer(&self) -> Option<PolymerState> {
        match *self {
            State::Polymer(p) => Some(p),
            _ => None,
        }
    }

    pub fn traffic(&self) -> Option<TrafficState> {
        match *self {
            State::Traffic(t) => Some(t),
            _ => None,
        }
    }

    /// Components in a fixed order: `[u]`, `[s, c, k]` or `[rho, v, k]`.
    pub fn components(&self) -> Vec<f64> {
        match *self {
            State::Scalar { u } => vec![u],
            State::Polymer(p) => vec![p.s, p.c, p.k],
            State::Traffic(t) => vec![t.rho, t.v, t.k],
        }
    }

    pub fn max_abs_diff(&self, other: &State) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<PolymerState> for State {
    fn from(p: PolymerState) -> Self {
        State::Polymer(p)
    }
}

impl From<TrafficState> for State {
    fn from(t: TrafficState) -> Self {
        State::Traffic(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    S,
    C,
    K,
    Rho,
    V,
    Vacuum,
    /// Stationary wave where the c and k jumps coincide.
    CK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Speed {
    Single(f64),
    Range(f64, f64),
}

impl Speed {
    pub fn min(&self) -> f64 {
        match *self {
            Speed::Single(s) => s,
            Speed::Range(a, _) => a,
        }
    }

    pub fn max(&self) -> f64 {
        match *self {
            Speed::Single(s) => s,
            Speed::Range(_, b) => b,
        }
    }
}

/// Evaluable rarefaction profile `xi -> State` on the wave's speed range.
#[derive(Clone)]
pub struct Profile(Arc<dyn Fn(f64) -> State + Send + Sync>);

impl Profile {
    pub fn new<F: Fn(f64) -> State + Send + Sync + 'static>(f: F) -> Self {
        Self(Arc::new(f))
    }

    pub fn eval(&self, xi: f64) -> State {
        (self.0)(xi)
    }

    /// Composes the profile with a state map.
    pub fn map<F: Fn(State) -> State + Send + Sync + 'static>(&self, f: F) -> Self {
        let inner = self.0.clone();
        Self(Arc::new(move |xi| f(inner(xi))))
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Profile(..)")
    }
}

#[derive(Debug, Clone)]
pub struct Wave {
    pub family: Family,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed: Speed,
    pub profile: Option<Profile>,
}

impl Wave {
    pub fn jump(family: Family, kind: WaveKind, left: State, right: State, speed: f64) -> Self {
        Self {
            family,
            kind,
            left,
            right,
            speed: Speed::Single(speed),
            profile: None,
        }
    }

    pub fn rarefaction(
        family: Family,
        left: State,
        right: State,
        from: f64,
        to: f64,
        profile: Profile,
    ) -> Self {
        Self {
            family,
            kind: WaveKind::Rarefaction,
            left,
            right,
            speed: Speed::Range(from, to),
            profile: Some(profile),
        }
    }

    /// State at similarity coordinate `xi` inside the wave's speed range.
    pub fn state_at(&self, xi: f64) -> State {
        match (&self.profile, self.speed) {
            (Some(p), Speed::Range(a, b)) => {
                if xi <= a {
                    self.left
                } else if xi >= b {
                    self.right
                } else {
                    p.eval(xi)
                }
            }
            _ => self.left,
        }
    }

    /// Maps both end states and the profile.
    pub fn map_states<F: Fn(State) -> State + Send + Sync + Clone + 'static>(
        &self,
        family: Family,
        f: F,
    ) -> Wave {
        Wave {
            family,
            kind: self.kind,
            left: f(self.left),
            right: f(self.right),
            speed: self.speed,
            profile: self.profile.as_ref().map(|p| p.map(f.clone())),
        }
    }
}

/// Ordered sequence of waves solving one Riemann problem.
#[derive(Debug, Clone)]
pub struct WaveFan {
    pub left_state: State,
    pub right_state: State,
    pub waves: Vec<Wave>,
}

impl WaveFan {
    pub fn empty(state: State) -> Self {
        Self {
            left_state: state,
            right_state: state,
            waves: Vec::new(),
        }
    }

    pub fn new(left_state: State, right_state: State, waves: Vec<Wave>) -> Self {
        Self {
            left_state,
            right_state,
            waves,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    /// Smallest and largest wave speeds, `None` for an empty fan.
    pub fn speed_bounds(&self) -> Option<(f64, f64)> {
        let lo = self.waves.iter().map(|w| w.speed.min()).reduce(f64::min)?;
        let hi = self.waves.iter().map(|w| w.speed.max()).reduce(f64::max)?;
        Some((lo, hi))
    }

    /// State at `x/t = xi`; exactly at a discontinuity the left limit is returned.
    pub fn state_at(&self, xi: f64) -> State {
        for w in &self.waves {
            match w.speed {
                Speed::Single(s) => {
                    if xi <= s {
                        return w.left;
                    }
                }
                Speed::Range(a, b) => {
                    if xi <= a {
                        return w.left;
                    }
                    if xi < b {
                        return w.state_at(xi);
                    }
                }
            }
        }
        self.right_state
    }

    /// State at `(t, x)`; at `t = 0` this is the Riemann data.
    pub fn sample(&self, t: f64, x: f64) -> State {
        if t <= 0.0 {
            if x < 0.0 {
                self.left_state
            } else if x > 0.0 {
                self.right_state
            } else {
                self.state_at(0.0)
            }
        } else {
            self.state_at(x / t)
        }
    }

    /// Checks speed ordering and state chaining.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut prev_state = self.left_state;
        let mut prev_speed = f64::NEG_INFINITY;
        for (i, w) in self.waves.iter().enumerate() {
            if w.left.max_abs_diff(&prev_state) > tol {
                return Err(RiemannError::Assertion(format!(
                    "wave {i} left state {:?} does not match previous state {:?}",
                    w.left, prev_state
                )));
            }
            if w.speed.min() < prev_speed - SPEED_TOL {
                return Err(RiemannError::Assertion(format!(
                    "wave {i} speed {:?} below previous speed {prev_speed}",
                    w.speed
                )));
            }
            if w.speed.max() < w.speed.min() - SPEED_TOL {
                return Err(RiemannError::Assertion(format!(
                    "wave {i} has reversed speed range"
                )));
            }
            prev_state = w.right;
            prev_speed = w.speed.max();
        }
        if prev_state.max_abs_diff(&self.right_state) > tol {
            return Err(RiemannError::Assertion(format!(
                "last state {prev_state:?} does not match right state {:?}",
                self.right_state
            )));
        }
        Ok(())
    }

    /// Concatenates fans, dropping waves whose end states coincide and
    /// snapping rarefaction edges that undershoot the previous speed by
    /// less than `SPEED_TOL`.
    pub fn chain(left_state: State, right_state: State, parts: Vec<Vec<Wave>>) -> Self {
        let mut waves: Vec<Wave> = parts
            .into_iter()
            .flatten()
            .filter(|w| w.left.max_abs_diff(&w.right) > 0.0)
            .collect();
        for i in 1..waves.len() {
            let prev = waves[i - 1].speed.max();
            if let Speed::Range(a, b) = waves[i].speed {
                if a < prev && prev - a <= SPEED_TOL {
                    waves[i].speed = Speed::Range(prev, b.max(prev));
                }
            }
        }
        for i in (0..waves.len().saturating_sub(1)).rev() {
            let next = waves[i + 1].speed.min();
            if let Speed::Range(a, b) = waves[i].speed {
                if b > next && b - next <= SPEED_TOL {
                    waves[i].speed = Speed::Range(a.min(next), next);
                }
            }
        }
        Self {
            left_state,
            right_state,
            waves,
        }
    }
}
