use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RiemannError};
use crate::fan::{State, TrafficState};
use crate::flux::TrafficParams;
use crate::reduced::TrafficState2;

/// Default rarefaction chop in `v`.
pub const DEFAULT_EPS_FRAC: f64 = 0.01;

/// Collision times closer than this are processed together.
const TIME_TOL: f64 = 1e-12;

/// Fronts closing slower than this (relative) are treated as parallel.
const SPEED_TOL: f64 = 1e-12;

/// Hard cap on processed events.
const MAX_EVENTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontFamily {
    V,
    Rho,
    Vacuum,
}

/// A discontinuity moving with constant speed between two `(w, v)` states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    /// Position at the time of the enclosing [`FrontState`].
    pub position: f64,
    pub speed: f64,
    pub left: TrafficState2,
    pub right: TrafficState2,
    pub family: FrontFamily,
    /// Manhattan distance `|dw| + |dv|`.
    pub strength: f64,
}

fn manhattan(a: TrafficState2, b: TrafficState2) -> f64 {
    (a.w - b.w).abs() + (a.v - b.v).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontState {
    pub time: f64,
    pub fronts: Vec<Front>,
    pub total_strength: f64,
    pub interaction_count: usize,
}

impl FrontState {
    fn new(time: f64, fronts: Vec<Front>, interaction_count: usize) -> Self {
        let total_strength = fronts.iter().map(|f| f.strength).sum();
        Self {
            time,
            fronts,
            total_strength,
            interaction_count,
        }
    }

    /// `(w, v)` at `x`; on a front the left state.
    pub fn state_at(&self, x: f64, far_left: TrafficState2) -> TrafficState2 {
        self.fronts.iter().find(|f| x <= f.position).map_or_else(
            || self.fronts.last().map_or(far_left, |f| f.right),
            |f| f.left,
        )
    }
}

/// One interaction: a cluster of fronts meeting at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEvent {
    pub time: f64,
    pub position: f64,
    pub incoming: usize,
    pub outgoing: usize,
    /// Families of the incoming fronts, left to right.
    pub families_in: Vec<FrontFamily>,
    /// Families of the outgoing fronts, left to right.
    pub families_out: Vec<FrontFamily>,
    pub strength_in: f64,
    pub strength_out: f64,
    /// Total strength of all fronts right after the event.
    pub total_strength: f64,
    pub front_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontTrackingConfig {
    pub k: f64,
    pub traffic: TrafficParams,
    pub eps_frac: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRun {
    pub config: FrontTrackingConfig,
    pub initial: FrontState,
    pub events: Vec<FrontEvent>,
    pub final_state: FrontState,
    /// Fronts at `t = 0`, rarefaction pieces included.
    pub initial_front_count: usize,
    pub max_front_count: usize,
    pub far_left: TrafficState2,
}

impl FrontRun {
    /// Traffic states of the final configuration at `xs`.
    pub fn sample(&self, xs: &[f64]) -> Vec<State> {
        let c = &self.config;
        xs.iter()
            .map(|&x| {
                let s = self.final_state.state_at(x, self.far_left);
                State::Traffic(TrafficState::from_wv(s.w, s.v, c.k, c.traffic.gamma))
            })
            .collect()
    }
}

struct Solver {
    k: f64,
    gamma: f64,
    eps: f64,
}

impl Solver {
    fn rho(&self, s: TrafficState2) -> f64 {
        let p = (s.w - s.v) / self.k;
        if p <= 0.0 {
            0.0
        } else {
            p.powf(1.0 / self.gamma)
        }
    }

    /// Jump speed along `w = const`.
    fn v_speed(&self, a: TrafficState2, b: TrafficState2) -> f64 {
        let (ra, rb) = (self.rho(a), self.rho(b));
        if ra == 0.0 {
            return b.v;
        }
        if rb == 0.0 {
            return a.v;
        }
        if (rb - ra).abs() <= 1e-14 * (1.0 + ra.max(rb)) {
            let r = 0.5 * (ra + rb);
            let v = 0.5 * (a.v + b.v);
            return v - self.gamma * self.k * r.powf(self.gamma);
        }
        (rb * b.v - ra * a.v) / (rb - ra)
    }

    fn front(
        &self,
        family: FrontFamily,
        left: TrafficState2,
        right: TrafficState2,
        x: f64,
    ) -> Front {
        let speed = match family {
            FrontFamily::V => self.v_speed(left, right),
            FrontFamily::Rho => left.v,
            FrontFamily::Vacuum => 0.5 * (left.v + right.v),
        };
        Front {
            position: x,
            speed,
            left,
            right,
            family,
            strength: manhattan(left, right),
        }
    }

    /// Increasing step from `v0` to `v1` in pieces no larger than `eps`.
    fn chop(&self, v0: f64, v1: f64) -> Vec<(f64, f64)> {
        let n = ((v1 - v0) / self.eps - 1e-9).ceil().max(1.0) as usize;
        (0..n)
            .map(|i| {
                let a = if i == 0 {
                    v0
                } else {
                    v0 + (v1 - v0) * i as f64 / n as f64
                };
                let b = if i + 1 == n {
                    v1
                } else {
                    v0 + (v1 - v0) * (i + 1) as f64 / n as f64
                };
                (a, b)
            })
            .collect()
    }

    /// Fronts solving the Riemann problem `(l, r)` located at `x`.
    fn riemann(&self, l: TrafficState2, r: TrafficState2, x: f64) -> Vec<Front> {
        let mut out = Vec::new();
        let st = |w: f64, v: f64| TrafficState2 { w, v };
        if l.w >= r.v {
            if r.v > l.v {
                for (a, b) in self.chop(l.v, r.v) {
                    out.push(self.front(FrontFamily::V, st(l.w, a), st(l.w, b), x));
                }
            } else if r.v < l.v {
                out.push(self.front(FrontFamily::V, l, st(l.w, r.v), x));
            }
            if r.w != l.w {
                out.push(self.front(FrontFamily::Rho, st(l.w, r.v), r, x));
            }
        } else {
            if l.w > l.v {
                for (a, b) in self.chop(l.v, l.w) {
                    out.push(self.front(FrontFamily::V, st(l.w, a), st(l.w, b), x));
                }
            }
            for (a, b) in self.chop(l.w, r.v) {
                out.push(self.front(FrontFamily::Vacuum, st(a, a), st(b, b), x));
            }
            if r.w != r.v {
                out.push(self.front(FrontFamily::Rho, st(r.v, r.v), r, x));
            }
        }
        out
    }
}

fn check_state(s: TrafficState2) -> Result<()> {
    if !(s.w.is_finite() && s.v.is_finite()) || s.w < s.v {
        return Err(RiemannError::Domain(format!(
            "state {s:?} has negative density"
        )));
    }
    Ok(())
}

/// Moves every front by `dt`; roundoff between fronts that travel together
/// is clipped so positions stay ordered.
fn advance(fronts: &mut [Front], dt: f64) {
    let mut floor = f64::NEG_INFINITY;
    for f in fronts {
        f.position = (f.position + f.speed * dt).max(floor);
        floor = f.position;
    }
}

/// Wave-front tracking for the traffic system at fixed `k`.
///
/// `states[i]` lives on `(breaks[i-1], breaks[i])`. Rarefactions (and the
/// vacuum fan) are chopped into steps of at most `eps_frac` in `v`; fronts
/// that meet at the same point within `1e-12` in time are resolved together
/// by one Riemann problem.
pub fn front_tracking(
    breaks: &[f64],
    states: &[TrafficState2],
    config: FrontTrackingConfig,
) -> Result<FrontRun> {
    config.traffic.validate()?;
    if !(config.k > 0.0) || !(config.eps_frac > 0.0) || !(config.t_end >= 0.0) {
        return Err(RiemannError::Parameter(format!(
            "invalid front tracking configuration {config:?}"
        )));
    }
    if states.len() != breaks.len() + 1 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(RiemannError::Domain(
            "need increasing breakpoints and one more state".into(),
        ));
    }
    for s in states {
        check_state(*s)?;
    }
    let solver = Solver {
        k: config.k,
        gamma: config.traffic.gamma,
        eps: config.eps_frac,
    };
    let mut fronts: Vec<Front> = Vec::new();
    for (i, &x) in breaks.iter().enumerate() {
        fronts.extend(solver.riemann(states[i], states[i + 1], x));
    }
    let initial = FrontState::new(0.0, fronts.clone(), 0);
    let initial_front_count = fronts.len();
    let mut max_front_count = fronts.len();
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        // earliest collision between neighbours
        let times: Vec<f64> = fronts
            .windows(2)
            .map(|p| {
                let closing = p[0].speed - p[1].speed;
                if closing <= SPEED_TOL * (1.0 + p[0].speed.abs().max(p[1].speed.abs())) {
                    f64::INFINITY
                } else {
                    t + (p[1].position - p[0].position).max(0.0) / closing
                }
            })
            .collect();
        let t_next = times.iter().copied().fold(f64::INFINITY, f64::min);
        if !(t_next <= config.t_end) {
            advance(&mut fronts, config.t_end - t);
            t = config.t_end;
            break;
        }
        if events.len() >= MAX_EVENTS {
            return Err(RiemannError::Assertion(format!(
                "more than {MAX_EVENTS} interactions before t = {t}"
            )));
        }
        advance(&mut fronts, t_next - t);
        t = t_next;
        // group consecutive colliding pairs into clusters
        let hit: Vec<bool> = times.iter().map(|&s| s <= t_next + TIME_TOL).collect();
        let first_event = events.len();
        let mut next = Vec::with_capacity(fronts.len() + 4);
        let mut i = 0;
        while i < fronts.len() {
            if i < hit.len() && hit[i] {
                let start = i;
                while i < hit.len() && hit[i] {
                    i += 1;
                }
                let cluster = &fronts[start..=i];
                if cluster.len() > 2 {
                    debug!("{} fronts meet at t = {t}", cluster.len());
                }
                let x = cluster.iter().map(|f| f.position).sum::<f64>() / cluster.len() as f64;
                let outgoing = solver.riemann(cluster[0].left, cluster[cluster.len() - 1].right, x);
                let strength_in: f64 = cluster.iter().map(|f| f.strength).sum();
                let strength_out: f64 = outgoing.iter().map(|f| f.strength).sum();
                events.push(FrontEvent {
                    time: t,
                    position: x,
                    incoming: cluster.len(),
                    outgoing: outgoing.len(),
                    families_in: cluster.iter().map(|f| f.family).collect(),
                    families_out: outgoing.iter().map(|f| f.family).collect(),
                    strength_in,
                    strength_out,
                    total_strength: 0.0,
                    front_count: 0,
                });
                next.extend(outgoing);
            } else {
                next.push(fronts[i]);
            }
            i += 1;
        }
        fronts = next;
        let total: f64 = fronts.iter().map(|f| f.strength).sum();
        for e in &mut events[first_event..] {
            e.total_strength = total;
            e.front_count = fronts.len();
        }
        max_front_count = max_front_count.max(fronts.len());
    }
    let far_left = states[0];
    let n = events.len();
    Ok(FrontRun {
        config,
        initial,
        events,
        final_state: FrontState::new(t, fronts, n),
        initial_front_count,
        max_front_count,
        far_left,
    })
}
