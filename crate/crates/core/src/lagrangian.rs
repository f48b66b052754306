//! Lagrangian coordinates `(phi, psi)` with `psi = x` and `phi` the potential
//! of the first conservation law: `phi_x = -s, phi_t = f` for polymer and
//! `phi_x = -rho, phi_t = rho v` for traffic. With gravity the flux changes
//! sign; the modified chart uses `phi_x = -sign(f) s, phi_t = |f|`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiemannError};
use crate::fan::{Speed, State, WaveFan};
use crate::flux::FluxModel;

/// Default number of midpoint panels per integration leg.
pub const DEFAULT_PANELS: usize = 4096;

/// Tolerance used to match `phi` levels.
pub const LEVEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathOrder {
    /// `(0,0) -> (0,x) -> (t,x)`.
    XFirst,
    /// `(0,0) -> (t,0) -> (t,x)`.
    TFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Original,
    /// Sign-modified potential for fluxes that change sign.
    Modified,
}

impl Chart {
    /// Chart used by default for `model`.
    pub fn for_model(model: &FluxModel) -> Chart {
        match model {
            FluxModel::PolymerGravity { .. } => Chart::Modified,
            _ => Chart::Original,
        }
    }
}

/// A solution that can be sampled pointwise, with known discontinuity locations.
pub trait Sampler {
    fn state(&self, t: f64, x: f64) -> State;

    /// Discontinuity and kink locations on the line of fixed `t`.
    fn x_breaks(&self, t: f64) -> Vec<f64>;

    /// Times at which the line of fixed `x` crosses a wave edge.
    fn t_breaks(&self, x: f64) -> Vec<f64>;
}

fn edge_speeds(fan: &WaveFan) -> Vec<f64> {
    fan.waves
        .iter()
        .flat_map(|w| match w.speed {
            Speed::Single(s) => vec![s],
            Speed::Range(a, b) => vec![a, b],
        })
        .collect()
}

impl Sampler for WaveFan {
    fn state(&self, t: f64, x: f64) -> State {
        self.sample(t, x)
    }

    fn x_breaks(&self, t: f64) -> Vec<f64> {
        let mut b: Vec<f64> = edge_speeds(self).into_iter().map(|s| s * t).collect();
        b.push(0.0);
        b
    }

    fn t_breaks(&self, x: f64) -> Vec<f64> {
        edge_speeds(self)
            .into_iter()
            .filter(|&s| s != 0.0)
            .map(|s| x / s)
            .filter(|&t| t > 0.0)
            .collect()
    }
}

/// The two partial derivatives `(phi_t, -phi_x)` of the potential at `state`.
pub fn potential_densities(model: &FluxModel, state: &State, chart: Chart) -> Result<(f64, f64)> {
    let (flow, mass) = match (model, state) {
        (FluxModel::Traffic { .. }, State::Traffic(t)) => (t.rho * t.v, t.rho),
        (_, State::Polymer(p)) => {
            let flux = model.polymer().ok_or_else(|| {
                RiemannError::Domain("polymer state under a traffic model".into())
            })?;
            (flux.f(p.s, p.c, p.k), p.s)
        }
        _ => {
            return Err(RiemannError::Domain(format!(
                "state {state:?} does not match the model"
            )))
        }
    };
    Ok(match chart {
        Chart::Original => (flow, mass),
        Chart::Modified => (flow.abs(), flow.signum() * mass),
    })
}

fn vacuum_check(model: &FluxModel, state: &State) -> Result<()> {
    let empty = match state {
        State::Polymer(p) => p.s <= 0.0,
        State::Traffic(t) => t.rho * t.v <= 0.0 && matches!(model, FluxModel::Traffic { .. }),
        State::Scalar { .. } => true,
    };
    if empty {
        return Err(RiemannError::Degenerate(format!(
            "vacuum state {state:?} on the integration path"
        )));
    }
    Ok(())
}

/// Potential `phi` of a sampled solution, evaluated by line integrals.
pub struct PotentialField<'a, S: Sampler> {
    pub sampler: &'a S,
    pub model: &'a FluxModel,
    pub chart: Chart,
    pub panels: usize,
}

impl<'a, S: Sampler> PotentialField<'a, S> {
    pub fn new(sampler: &'a S, model: &'a FluxModel) -> Self {
        Self {
            sampler,
            model,
            chart: Chart::for_model(model),
            panels: DEFAULT_PANELS,
        }
    }

    pub fn with_chart(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    /// Composite midpoint rule on `[a, b]` split at `breaks`, with `panels`
    /// panels on every piece.
    fn leg<F: Fn(f64) -> Result<f64>>(
        &self,
        a: f64,
        b: f64,
        breaks: Vec<f64>,
        g: F,
    ) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut nodes: Vec<f64> = breaks.into_iter().filter(|&p| p > lo && p < hi).collect();
        nodes.push(lo);
        nodes.push(hi);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let (p, q) = (w[0], w[1]);
            let n = self.panels.max(1);
            let h = (q - p) / n as f64;
            for i in 0..n {
                total += g(p + (i as f64 + 0.5) * h)? * h;
            }
        }
        Ok(sign * total)
    }

    fn dens(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        let st = self.sampler.state(t, x);
        vacuum_check(self.model, &st)?;
        potential_densities(self.model, &st, self.chart)
    }

    /// `phi(t, x)` integrated along the chosen rectilinear path.
    pub fn phi(&self, t: f64, x: f64, path: PathOrder) -> Result<f64> {
        match path {
            PathOrder::XFirst => {
                let a = self.leg(0.0, x, self.sampler.x_breaks(0.0), |y| {
                    Ok(-self.dens(0.0, y)?.1)
                })?;
                let b = self.leg(0.0, t, self.sampler.t_breaks(x), |s| Ok(self.dens(s, x)?.0))?;
                Ok(a + b)
            }
            PathOrder::TFirst => {
                let a = self.leg(0.0, t, self.sampler.t_breaks(0.0), |s| {
                    Ok(self.dens(s, 0.0)?.0)
                })?;
                let b = self.leg(0.0, x, self.sampler.x_breaks(t), |y| {
                    Ok(-self.dens(t, y)?.1)
                })?;
                Ok(a + b)
            }
        }
    }
}

/// `phi(t, x)` of `sampler` in the default chart of `model`.
pub fn potential<S: Sampler>(
    sampler: &S,
    model: &FluxModel,
    t: f64,
    x: f64,
    path: PathOrder,
) -> Result<f64> {
    PotentialField::new(sampler, model).phi(t, x, path)
}

/// Determinant of `d(phi, psi)/d(t, x)`: `f` in the original chart, `|f|` in
/// the modified one.
pub fn jacobian_det(model: &FluxModel, state: &State, chart: Chart) -> Result<f64> {
    Ok(potential_densities(model, state, chart)?.0)
}

/// One piece of the image of `t = 0` in the `(psi, phi)` plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSegment {
    /// `None` stands for an unbounded end.
    pub psi_from: Option<f64>,
    pub psi_to: Option<f64>,
    /// `phi` at the finite ends.
    pub phi_from: Option<f64>,
    pub phi_to: Option<f64>,
    /// `d phi / d psi = -s` (or `-rho`).
    pub slope: f64,
    /// Decoupled quantity (`c` or `w`) at both ends; linear in between on vacuum.
    pub value_from: f64,
    pub value_to: f64,
    pub k: f64,
    pub vacuum: bool,
}

/// The initial line `t = 0` mapped into Lagrangian coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianProfile {
    pub segments: Vec<CurveSegment>,
    /// `(c_1, c_2)` across vacuum segments whose neighbours disagree.
    pub value_jumps: Vec<(f64, f64)>,
}

impl LagrangianProfile {
    /// `phi` is nonincreasing along the curve and continuous at breakpoints.
    pub fn is_monotone(&self) -> bool {
        let slopes_ok = self.segments.iter().all(|s| s.slope <= 0.0);
        let joins_ok = self
            .segments
            .windows(2)
            .all(|w| match (w[0].phi_to, w[1].phi_from) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                _ => true,
            });
        slopes_ok && joins_ok
    }
}

fn mass_and_value(model: &FluxModel, st: &State) -> Result<(f64, f64, f64)> {
    match (model, st) {
        (FluxModel::Traffic { traffic }, State::Traffic(t)) => Ok((t.rho, t.w(traffic.gamma), t.k)),
        (_, State::Polymer(p)) => Ok((p.s, p.c, p.k)),
        _ => Err(RiemannError::Domain(format!(
            "state {st:?} does not match the model"
        ))),
    }
}

/// Image of piecewise-constant data (`states[i]` on `(breaks[i-1], breaks[i])`).
pub fn initial_curve(
    model: &FluxModel,
    breaks: &[f64],
    states: &[State],
) -> Result<LagrangianProfile> {
    if states.len() != breaks.len() + 1 || states.is_empty() {
        return Err(RiemannError::Domain(
            "need one more state than breakpoints".into(),
        ));
    }
    if breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RiemannError::Domain("breakpoints must increase".into()));
    }
    let info: Vec<(f64, f64, f64)> = states
        .iter()
        .map(|s| mass_and_value(model, s))
        .collect::<Result<_>>()?;
    // phi at each breakpoint, anchored at phi(0, 0) = 0
    let phi_at = |x: f64| -> f64 {
        let mut acc = 0.0;
        let (lo, hi, sign) = if x >= 0.0 {
            (0.0, x, -1.0)
        } else {
            (x, 0.0, 1.0)
        };
        for (i, &(m, _, _)) in info.iter().enumerate() {
            let a = if i == 0 {
                f64::NEG_INFINITY
            } else {
                breaks[i - 1]
            };
            let b = if i == breaks.len() {
                f64::INFINITY
            } else {
                breaks[i]
            };
            let overlap = b.min(hi) - a.max(lo);
            if overlap > 0.0 {
                acc += m * overlap;
            }
        }
        sign * acc
    };
    let mut segments = Vec::with_capacity(states.len());
    let mut value_jumps = Vec::new();
    for (i, &(m, v, k)) in info.iter().enumerate() {
        let psi_from = (i > 0).then(|| breaks[i - 1]);
        let psi_to = (i < breaks.len()).then(|| breaks[i]);
        let vacuum = m <= 0.0;
        let (value_from, value_to) = if vacuum {
            let before = if i > 0 { info[i - 1].1 } else { v };
            let after = if i + 1 < info.len() { info[i + 1].1 } else { v };
            if before != after {
                value_jumps.push((before, after));
            }
            (before, after)
        } else {
            (v, v)
        };
        segments.push(CurveSegment {
            psi_from,
            psi_to,
            phi_from: psi_from.map(phi_at),
            phi_to: psi_to.map(phi_at),
            slope: -m,
            value_from,
            value_to,
            k,
            vacuum,
        });
    }
    Ok(LagrangianProfile {
        segments,
        value_jumps,
    })
}

/// Largest variations of the decoupled quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    /// Variation of `c` (polymer) or `w` (traffic) along lines of fixed `phi`.
    pub max_value_dev_along_phi: f64,
    /// Variation of `k` along lines of fixed `psi`.
    pub max_k_dev_along_psi: f64,
    /// Grid points used (those away from wave level sets).
    pub samples: usize,
}

/// Sampling grid for [`verify_decoupling`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingGrid {
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nt: usize,
    pub nx: usize,
}

impl Default for DecouplingGrid {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            x_min: -1.0,
            x_max: 1.0,
            nt: 64,
            nx: 64,
        }
    }
}

fn decoupled_value(model: &FluxModel, st: &State) -> Result<(f64, f64)> {
    let (_, v, k) = mass_and_value(model, st)?;
    Ok((v, k))
}

/// Self-similar potential of a wave fan: `phi(t, x) = t Phi(x / t)` with
/// `Phi(xi) = Phi(0) - int_0^xi s`, tabulated on the fan's speed range.
struct SimilarityPotential {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// `phi_x` densities of the outer states, used beyond the table.
    slopes: (f64, f64),
}

impl SimilarityPotential {
    fn new(fan: &WaveFan, model: &FluxModel, panels: usize) -> Result<Self> {
        let dens = |xi: f64| -> Result<(f64, f64)> {
            let st = fan.state_at(xi);
            vacuum_check(model, &st)?;
            potential_densities(model, &st, Chart::Original)
        };
        let mut breaks = edge_speeds(fan);
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let lo = breaks[0];
        let mut nodes = vec![lo];
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / panels as f64;
            nodes.extend((1..=panels).map(|i| {
                if i == panels {
                    w[1]
                } else {
                    w[0] + h * i as f64
                }
            }));
        }
        let mut values = vec![0.0; nodes.len()];
        for i in 1..nodes.len() {
            let (a, b) = (nodes[i - 1], nodes[i]);
            values[i] = values[i - 1] - dens(0.5 * (a + b))?.1 * (b - a);
        }
        let zero = nodes.partition_point(|&x| x < 0.0);
        let shift = dens(0.0)?.0 - values[zero];
        values.iter_mut().for_each(|v| *v += shift);
        let outer = |st: &State| -> Result<f64> {
            vacuum_check(model, st)?;
            Ok(potential_densities(model, st, Chart::Original)?.1)
        };
        let slopes = (outer(&fan.left_state)?, outer(&fan.right_state)?);
        Ok(Self {
            nodes,
            values,
            slopes,
        })
    }

    fn eval(&self, xi: f64) -> f64 {
        let n = self.nodes.len();
        if xi <= self.nodes[0] {
            return self.values[0] - self.slopes.0 * (xi - self.nodes[0]);
        }
        if xi >= self.nodes[n - 1] {
            return self.values[n - 1] - self.slopes.1 * (xi - self.nodes[n - 1]);
        }
        let i = self.nodes.partition_point(|&x| x <= xi).min(n - 1);
        let (a, b) = (self.nodes[i - 1], self.nodes[i]);
        let r = (xi - a) / (b - a);
        self.values[i - 1] + r * (self.values[i] - self.values[i - 1])
    }

    fn phi(&self, t: f64, x: f64) -> f64 {
        t * self.eval(x / t)
    }
}

/// Checks that `c` (or `w`) is constant on level sets of `phi` and `k` is
/// constant on lines of fixed `x`.
///
/// Each grid point `(t, x)` is carried to the final time `t_max` along its
/// `phi` level (found by bisection in `x`, using `phi_x < 0`) and the
/// decoupled quantity is compared at both ends. Points whose `phi` lies
/// within `LEVEL_TOL` of a wave level, or whose level leaves the window,
/// are skipped.
pub fn verify_decoupling(
    fan: &WaveFan,
    model: &FluxModel,
    grid: DecouplingGrid,
) -> Result<DecouplingReport> {
    let pot = SimilarityPotential::new(fan, model, DEFAULT_PANELS)?;
    let levels = wave_levels(fan, model, &pot)?;
    let t_end = grid.t_max;
    let mut report = DecouplingReport {
        max_value_dev_along_phi: 0.0,
        max_k_dev_along_psi: 0.0,
        samples: 0,
    };
    let (lo_end, hi_end) = (grid.x_min, grid.x_max);
    let phi_lo = pot.phi(t_end, hi_end);
    let phi_hi = pot.phi(t_end, lo_end);
    for i in 1..=grid.nt {
        let t = t_end * i as f64 / grid.nt as f64;
        for j in 0..=grid.nx {
            let x = grid.x_min + (grid.x_max - grid.x_min) * j as f64 / grid.nx as f64;
            let phi = pot.phi(t, x);
            if levels.iter().any(|l| (phi - l).abs() <= LEVEL_TOL) || phi <= phi_lo || phi >= phi_hi
            {
                continue;
            }
            let x_end = bisect_level(|y| pot.phi(t_end, y), phi, lo_end, hi_end);
            let (v0, k0) = decoupled_value(model, &fan.sample(t, x))?;
            let (v1, _) = decoupled_value(model, &fan.sample(t_end, x_end))?;
            let (_, k1) = decoupled_value(model, &fan.sample(0.5 * t, x))?;
            report.max_value_dev_along_phi = report.max_value_dev_along_phi.max((v1 - v0).abs());
            report.max_k_dev_along_psi = report.max_k_dev_along_psi.max((k1 - k0).abs());
            report.samples += 1;
        }
    }
    Ok(report)
}

/// `phi` along the trajectories of contact waves that carry the decoupled
/// quantity; for Riemann solutions all of them sit on a level through the origin.
fn wave_levels(fan: &WaveFan, model: &FluxModel, pot: &SimilarityPotential) -> Result<Vec<f64>> {
    let mut out = vec![0.0];
    for w in &fan.waves {
        let (v0, _) = decoupled_value(model, &w.left)?;
        let (v1, _) = decoupled_value(model, &w.right)?;
        if v0 != v1 {
            if let Speed::Single(s) = w.speed {
                out.push(pot.eval(s));
            }
        }
    }
    Ok(out)
}

fn bisect_level<F: Fn(f64) -> f64>(phi: F, target: f64, a: f64, b: f64) -> f64 {
    // phi decreases in x
    let (mut lo, mut hi) = (a, b);
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        if phi(m) > target {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}
