use serde::{Deserialize, Serialize};

use crate::envelope::ScalarFn;
use crate::error::{Result, RiemannError};
use crate::fan::{PolymerState, State, TrafficState};
use crate::flux::FluxModel;

use super::sample::{uniform_centers, PiecewiseConstant};

/// Below this the second conserved variable no longer determines `c` or `w`.
const DEGENERATE_MASS: f64 = 1e-10;

/// Courant factor of the explicit step.
const CFL: f64 = 0.4;

/// System integrated by the viscous reference solver.
#[derive(Clone)]
pub enum ViscousModel {
    /// `u_t + f(u)_x = eps u_xx`.
    Scalar(ScalarFn),
    Model(FluxModel),
}

impl From<FluxModel> for ViscousModel {
    fn from(m: FluxModel) -> Self {
        ViscousModel::Model(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViscousConfig {
    pub eps: f64,
    pub cells: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub t_end: f64,
    /// Fixed time step; by default the largest stable one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

/// Result of a viscous run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViscousRun {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
    pub eps: f64,
    /// Viscosity actually applied, raised to keep the cell Peclet number below one.
    pub eps_eff: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    /// Cell averages of the conserved variables; the last entry is the frozen `k`.
    pub conserved: Vec<[f64; 3]>,
    pub states: Vec<State>,
    /// Largest per-step defect of the discrete conservation balance.
    pub max_conservation_residual: f64,
}

impl ViscousRun {
    pub fn centers(&self) -> Vec<f64> {
        uniform_centers(self.x_min, self.x_max, self.cells)
    }
}

/// Data ranges used to bound speeds and decode the conserved variables.
#[derive(Debug, Clone, Copy)]
struct Bounds {
    lo: f64,
    hi: f64,
}

impl Bounds {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(
            Bounds {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY,
            },
            |b, v| Bounds {
                lo: b.lo.min(v),
                hi: b.hi.max(v),
            },
        )
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

struct Kernel<'a> {
    model: &'a ViscousModel,
    /// Range of `c` (polymer) or `w` (traffic).
    value: Bounds,
}

impl Kernel<'_> {
    fn encode(&self, st: &State) -> Result<[f64; 3]> {
        match (self.model, st) {
            (ViscousModel::Scalar(_), State::Scalar { u }) => Ok([*u, 0.0, 0.0]),
            (ViscousModel::Model(FluxModel::Traffic { traffic }), State::Traffic(t)) => {
                Ok([t.rho, t.rho * t.w(traffic.gamma), t.k])
            }
            (ViscousModel::Model(m @ FluxModel::PolymerAdsorption { .. }), State::Polymer(p))
            | (ViscousModel::Model(m @ FluxModel::PolymerPlain { .. }), State::Polymer(p))
            | (ViscousModel::Model(m @ FluxModel::PolymerGravity { .. }), State::Polymer(p)) => {
                let ads = m.adsorption().map_or(0.0, |a| a.m(p.c));
                Ok([p.s, ads + p.c * p.s, p.k])
            }
            _ => Err(RiemannError::Domain(format!(
                "state {st:?} does not match the model"
            ))),
        }
    }

    fn value_of(&self, st: &State) -> f64 {
        match (self.model, st) {
            (ViscousModel::Model(FluxModel::Traffic { traffic }), State::Traffic(t)) => {
                t.w(traffic.gamma)
            }
            (_, State::Polymer(p)) => p.c,
            _ => 0.0,
        }
    }

    /// Recovers the state; `memo` carries `c` or `w` through degenerate cells.
    fn decode(&self, u: [f64; 3], memo: &mut f64) -> State {
        match self.model {
            ViscousModel::Scalar(_) => State::Scalar { u: u[0] },
            ViscousModel::Model(FluxModel::Traffic { traffic }) => {
                let rho = u[0].max(0.0);
                if rho > DEGENERATE_MASS {
                    *memo = self.value.clamp(u[1] / rho);
                }
                let v = *memo - u[2] * rho.powf(traffic.gamma);
                State::Traffic(TrafficState::new(rho, v, u[2]))
            }
            ViscousModel::Model(m) => {
                let s = u[0];
                if s > DEGENERATE_MASS {
                    *memo = match m.adsorption() {
                        None => self.value.clamp(u[1] / s),
                        Some(a) => {
                            // m(c) + c s is increasing in c
                            let g = |c: f64| a.m(c) + c * s - u[1];
                            let (mut lo, mut hi) = (self.value.lo, self.value.hi);
                            if g(lo) >= 0.0 {
                                lo
                            } else if g(hi) <= 0.0 {
                                hi
                            } else {
                                let mut c = self.value.clamp(*memo);
                                for _ in 0..60 {
                                    let gc = g(c);
                                    if gc > 0.0 {
                                        hi = c;
                                    } else {
                                        lo = c;
                                    }
                                    let next = c - gc / (a.m_dc(c) + s);
                                    c = if next > lo && next < hi {
                                        next
                                    } else {
                                        0.5 * (lo + hi)
                                    };
                                    if gc.abs() < 1e-15 || hi - lo < 1e-15 {
                                        break;
                                    }
                                }
                                c
                            }
                        }
                    };
                }
                State::Polymer(PolymerState::new(s, *memo, u[2]))
            }
        }
    }

    fn flux(&self, st: &State) -> [f64; 2] {
        match (self.model, st) {
            (ViscousModel::Scalar(f), State::Scalar { u }) => [f.eval(*u), 0.0],
            (ViscousModel::Model(FluxModel::Traffic { traffic }), State::Traffic(t)) => {
                let q = t.rho * t.v;
                [q, q * t.w(traffic.gamma)]
            }
            (ViscousModel::Model(m), State::Polymer(p)) => {
                let f = m
                    .polymer()
                    .map_or(0.0, |fl| fl.f(p.s.clamp(0.0, 1.0), p.c, p.k));
                [f, p.c * f]
            }
            _ => [0.0, 0.0],
        }
    }

    fn cell_flux(&self, u: [f64; 3], memo: &mut f64) -> [f64; 2] {
        match self.model {
            ViscousModel::Model(FluxModel::Traffic { traffic }) => {
                let rho = u[0].max(0.0);
                if rho > DEGENERATE_MASS {
                    *memo = self.value.clamp(u[1] / rho);
                }
                let q = rho * (*memo - u[2] * rho.powf(traffic.gamma));
                [q, q * *memo]
            }
            _ => self.flux(&self.decode(u, memo)),
        }
    }

    /// Bound on the characteristic speeds over the invariant region of the data.
    fn max_speed(&self, states: &[State]) -> f64 {
        let mut lam: f64 = 0.0;
        match self.model {
            ViscousModel::Scalar(f) => {
                let b = Bounds::of(states.iter().filter_map(State::scalar));
                for i in 0..=256 {
                    lam = lam.max(f.deriv(b.lo + (b.hi - b.lo) * i as f64 / 256.0).abs());
                }
            }
            ViscousModel::Model(FluxModel::Traffic { traffic }) => {
                let g = traffic.gamma;
                let ts: Vec<TrafficState> = states.iter().filter_map(State::traffic).collect();
                let vb = Bounds::of(ts.iter().map(|t| t.v).chain([self.value.hi]));
                for w in [self.value.lo, self.value.hi] {
                    for v in [vb.lo, vb.hi] {
                        lam = lam.max(v.abs()).max(((1.0 + g) * v - g * w).abs());
                    }
                }
            }
            ViscousModel::Model(m) => {
                let Some(fl) = m.polymer() else { return 0.0 };
                let ks = Bounds::of(states.iter().filter_map(State::polymer).map(|p| p.k));
                for k in [ks.lo, ks.hi] {
                    for j in 0..=8 {
                        let c = self.value.lo + (self.value.hi - self.value.lo) * j as f64 / 8.0;
                        for i in 1..=256 {
                            let s = i as f64 / 256.0;
                            lam = lam
                                .max(fl.f_s(s, c, k).abs())
                                .max((fl.f(s, c, k) / s).abs());
                        }
                    }
                }
            }
        }
        lam
    }
}

/// Explicit conservative scheme for `U_t + F(U)_x = eps U_xx` with the
/// coefficient `k` frozen in place and outflow boundaries.
pub fn viscous_solve(
    model: &ViscousModel,
    data: &PiecewiseConstant,
    cfg: &ViscousConfig,
) -> Result<ViscousRun> {
    if let ViscousModel::Model(m) = model {
        m.validate()?;
    }
    if !(cfg.eps > 0.0) || cfg.cells < 3 || !(cfg.x_max > cfg.x_min) || !(cfg.t_end >= 0.0) {
        return Err(RiemannError::Parameter(format!(
            "invalid viscous configuration {cfg:?}"
        )));
    }
    let value = match model {
        ViscousModel::Scalar(_) => Bounds { lo: 0.0, hi: 0.0 },
        ViscousModel::Model(FluxModel::Traffic { traffic }) => Bounds::of(
            data.states
                .iter()
                .filter_map(State::traffic)
                .map(|t| t.w(traffic.gamma)),
        ),
        ViscousModel::Model(_) => {
            Bounds::of(data.states.iter().filter_map(State::polymer).map(|p| p.c))
        }
    };
    let kernel = Kernel { model, value };
    let n = cfg.cells;
    let dx = (cfg.x_max - cfg.x_min) / n as f64;
    let init: Vec<State> = uniform_centers(cfg.x_min, cfg.x_max, n)
        .into_iter()
        .map(|x| data.at(x))
        .collect();
    let mut u: Vec<[f64; 3]> = init
        .iter()
        .map(|st| kernel.encode(st))
        .collect::<Result<_>>()?;
    let lam = kernel.max_speed(&data.states) * 1.1;
    if !lam.is_finite() {
        return Err(RiemannError::Parameter(
            "characteristic speed bound is not finite".into(),
        ));
    }
    let eps = cfg.eps.max(0.5 * lam * dx);
    let bound = CFL * (if lam > 0.0 { dx / lam } else { f64::INFINITY }).min(dx * dx / (2.0 * eps));
    let dt = match cfg.dt {
        Some(dt) if dt > bound || !(dt > 0.0) => {
            return Err(RiemannError::Parameter(format!(
                "time step {dt} violates the CFL bound {bound}"
            )));
        }
        Some(dt) => dt,
        None => bound,
    };
    let mut memo: Vec<f64> = init.iter().map(|st| kernel.value_of(st)).collect();
    let mut flux = vec![[0.0; 2]; n];
    let mut iface = vec![[0.0; 2]; n + 1];
    let mut t = 0.0;
    let mut steps = 0;
    let mut max_res: f64 = 0.0;
    while t < cfg.t_end {
        let h = dt.min(cfg.t_end - t);
        if h <= 0.0 {
            break;
        }
        for i in 0..n {
            flux[i] = kernel.cell_flux(u[i], &mut memo[i]);
        }
        for (j, out) in iface.iter_mut().enumerate() {
            let (a, b) = (j.saturating_sub(1), j.min(n - 1));
            for c in 0..2 {
                out[c] = 0.5 * (flux[a][c] + flux[b][c]) - eps * (u[b][c] - u[a][c]) / dx;
            }
        }
        let before = totals(&u);
        let r = h / dx;
        for i in 0..n {
            for c in 0..2 {
                u[i][c] -= r * (iface[i + 1][c] - iface[i][c]);
            }
        }
        let after = totals(&u);
        for c in 0..2 {
            let boundary = h * (iface[n][c] - iface[0][c]);
            let scale = 1.0 + before[c].abs() * dx;
            max_res = max_res.max(((after[c] - before[c]) * dx + boundary).abs() / scale);
        }
        t += h;
        steps += 1;
    }
    let states = u
        .iter()
        .zip(memo.iter_mut())
        .map(|(c, m)| kernel.decode(*c, m))
        .collect();
    Ok(ViscousRun {
        x_min: cfg.x_min,
        x_max: cfg.x_max,
        cells: n,
        eps: cfg.eps,
        eps_eff: eps,
        dx,
        dt,
        t_end: cfg.t_end,
        steps,
        conserved: u,
        states,
        max_conservation_residual: max_res,
    })
}

fn totals(u: &[[f64; 3]]) -> [f64; 2] {
    let mut s = [0.0; 2];
    for c in u {
        s[0] += c[0];
        s[1] += c[1];
    }
    s
}
