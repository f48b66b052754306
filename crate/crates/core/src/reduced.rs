//! Riemann solvers for the reduced 2x2 systems: polymer in `(s, c)` with and
//! without adsorption, traffic in the `(w, v)` plane, and the discontinuous
//! flux system in `(s, k)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::envelope::{build_envelope, minimum_jump, scalar_waves, Direction, ScalarFn, StateMap};
use crate::error::{Result, RiemannError};
use crate::fan::{Family, PolymerState, Profile, State, TrafficState, Wave, WaveFan, WaveKind};
use crate::flux::{AdsorptionParams, PolymerFluxParams, TrafficParams};

/// Tolerance for chaining and ordering checks on assembled fans.
pub const FAN_TOL: f64 = 1e-9;

/// Closeness to the resonance locus `lambda_s = lambda_c` treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-8;

/// Speed difference below which two discontinuities are treated as one.
pub const COINCIDENT_TOL: f64 = 1e-9;

const PATH_STEP: f64 = 2e-3;
const PATH_MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolymerState2 {
    pub s: f64,
    pub c: f64,
}

impl PolymerState2 {
    pub fn new(s: f64, c: f64) -> Self {
        Self { s, c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficState2 {
    pub w: f64,
    pub v: f64,
}

impl TrafficState2 {
    pub fn new(w: f64, v: f64) -> Self {
        Self { w, v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkState {
    pub s: f64,
    pub k: f64,
}

impl SkState {
    pub fn new(s: f64, k: f64) -> Self {
        Self { s, k }
    }
}

pub(crate) fn polymer_state(s: f64, c: f64, k: f64) -> State {
    State::Polymer(PolymerState::new(s, c, k))
}

pub(crate) fn polymer_map(c: f64, k: f64) -> StateMap {
    Arc::new(move |s| polymer_state(s, c, k))
}

/// Folds shocks travelling at exactly the speed of `mid` into `mid`, so a
/// single discontinuity is never split into two coincident waves.
pub(crate) fn absorb_coincident(
    mut lw: Vec<Wave>,
    mut mid: Wave,
    mut rw: Vec<Wave>,
) -> Vec<Vec<Wave>> {
    let speed = mid.speed.min();
    while let Some(last) = lw.last() {
        if last.kind == WaveKind::Shock && (last.speed.max() - speed).abs() <= COINCIDENT_TOL {
            mid.left = last.left;
            lw.pop();
        } else {
            break;
        }
    }
    while let Some(first) = rw.first() {
        if first.kind == WaveKind::Shock && (first.speed.min() - speed).abs() <= COINCIDENT_TOL {
            mid.right = first.right;
            rw.remove(0);
        } else {
            break;
        }
    }
    vec![lw, vec![mid], rw]
}

pub(crate) fn finish(fan: WaveFan) -> Result<WaveFan> {
    fan.validate(FAN_TOL)?;
    Ok(fan)
}

/// s-waves, a single c-discontinuity at the minimum-jump speed, s-waves.
/// `a = 0` gives the plain polymer contact, `a > 0` the adsorptive shock.
fn c_jump_fan(
    flux: &PolymerFluxParams,
    k: f64,
    left: PolymerState2,
    right: PolymerState2,
    a: f64,
    kind: WaveKind,
) -> Result<WaveFan> {
    let g_l = flux.shifted_ratio(left.c, k, a);
    let g_r = flux.shifted_ratio(right.c, k, a);
    let path = minimum_jump(&g_l, &g_r, left.s, right.s)?;
    let lw = scalar_waves(
        &flux.s_flux(left.c, k),
        left.s,
        path.s_minus,
        Family::S,
        polymer_map(left.c, k),
    );
    let rw = scalar_waves(
        &flux.s_flux(right.c, k),
        path.s_plus,
        right.s,
        Family::S,
        polymer_map(right.c, k),
    );
    let cw = Wave::jump(
        Family::C,
        kind,
        polymer_state(path.s_minus, left.c, k),
        polymer_state(path.s_plus, right.c, k),
        path.sigma,
    );
    finish(WaveFan::chain(
        polymer_state(left.s, left.c, k),
        polymer_state(right.s, right.c, k),
        absorb_coincident(lw, cw, rw),
    ))
}

fn pure_s_fan(
    flux: &PolymerFluxParams,
    k: f64,
    left: PolymerState2,
    right: PolymerState2,
) -> Result<WaveFan> {
    let waves = scalar_waves(
        &flux.s_flux(left.c, k),
        left.s,
        right.s,
        Family::S,
        polymer_map(left.c, k),
    );
    finish(WaveFan::new(
        polymer_state(left.s, left.c, k),
        polymer_state(right.s, right.c, k),
        waves,
    ))
}

fn check_polymer2(flux: &PolymerFluxParams, k: f64, states: &[PolymerState2]) -> Result<()> {
    flux.validate()?;
    for st in states {
        flux.check_state(st.s, st.c, k)?;
    }
    Ok(())
}

/// Polymer system at fixed permeability `k`.
pub fn solve_polymer2(
    left: PolymerState2,
    right: PolymerState2,
    flux: &PolymerFluxParams,
    k: f64,
) -> Result<WaveFan> {
    check_polymer2(flux, k, &[left, right])?;
    if left.c == right.c {
        return pure_s_fan(flux, k, left, right);
    }
    c_jump_fan(flux, k, left, right, 0.0, WaveKind::Contact)
}

/// Adsorptive polymer system at fixed permeability `k`.
pub fn solve_adsorption2(
    left: PolymerState2,
    right: PolymerState2,
    flux: &PolymerFluxParams,
    adsorption: &AdsorptionParams,
    k: f64,
) -> Result<WaveFan> {
    check_polymer2(flux, k, &[left, right])?;
    adsorption.validate()?;
    if left.c == right.c {
        return pure_s_fan(flux, k, left, right);
    }
    if left.c > right.c {
        let a = adsorption.secant(left.c, right.c);
        return c_jump_fan(flux, k, left, right, a, WaveKind::Shock);
    }
    CRarefaction {
        flux,
        ads: adsorption,
        k,
    }
    .solve(left, right)
}

/// Integral curve of the c-family for the adsorptive system, stored as RK4
/// knots ordered by increasing `c`.
#[derive(Debug, Clone)]
pub struct CPath {
    /// `(s, c)` knots.
    pub knots: Vec<(f64, f64)>,
    /// Arc length between consecutive knots.
    steps: Vec<f64>,
    /// Orientation of the normalized field along increasing knot index.
    orient: f64,
}

#[derive(Clone, Copy)]
struct CRarefaction<'a> {
    flux: &'a PolymerFluxParams,
    ads: &'a AdsorptionParams,
    k: f64,
}

impl CRarefaction<'_> {
    fn lambda_c(&self, s: f64, c: f64) -> f64 {
        self.flux.f(s, c, self.k) / (s + self.ads.m_dc(c))
    }

    fn gap(&self, s: f64, c: f64) -> f64 {
        self.flux.f_s(s, c, self.k) - self.lambda_c(s, c)
    }

    /// Unit tangent of `(-f_c, lambda_s - lambda_c)` times `orient`.
    fn field(&self, s: f64, c: f64, orient: f64) -> (f64, f64) {
        let ds = -self.flux.f_c(s, c, self.k);
        let dc = self.gap(s, c);
        let n = ds.hypot(dc).max(1e-300);
        (orient * ds / n, orient * dc / n)
    }

    fn rk4(&self, (s, c): (f64, f64), h: f64, orient: f64) -> (f64, f64) {
        let k1 = self.field(s, c, orient);
        let k2 = self.field(s + 0.5 * h * k1.0, c + 0.5 * h * k1.1, orient);
        let k3 = self.field(s + 0.5 * h * k2.0, c + 0.5 * h * k2.1, orient);
        let k4 = self.field(s + h * k3.0, c + h * k3.1, orient);
        (
            s + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            c + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        )
    }

    /// Follows the integral curve from `(s0, c0)` until `c = target`.
    /// `side` picks the branch when the start point is resonant.
    /// With `partial`, a curve that folds or leaves the range is returned up to
    /// its last regular knot instead of failing.
    fn integrate(
        &self,
        s0: f64,
        c0: f64,
        target: f64,
        side: f64,
        h: f64,
        partial: bool,
    ) -> Result<CPath> {
        let dir = (target - c0).signum();
        let g0 = self.gap(s0, c0);
        let resonant = g0.abs() < RESONANCE_TOL;
        let orient = if resonant { side } else { dir * g0.signum() };
        let mut knots = vec![(s0, c0)];
        let mut steps = Vec::new();
        let mut p = (s0, c0);
        let mut region = if resonant { 0.0 } else { g0.signum() };
        for _ in 0..PATH_MAX_STEPS {
            let q = self.rk4(p, h, orient);
            if !(0.0..=1.0).contains(&q.0) {
                if partial && knots.len() > 1 {
                    return Ok(self.ordered(knots, steps, orient, dir));
                }
                return Err(RiemannError::Resonance(format!(
                    "c-family curve from ({s0}, {c0}) leaves the saturation range at {q:?}"
                )));
            }
            if (q.1 - p.1) * dir <= 0.0 && !(resonant && knots.len() == 1) {
                if partial && knots.len() > 1 {
                    return Ok(self.ordered(knots, steps, orient, dir));
                }
                return Err(RiemannError::Resonance(format!(
                    "c-family curve from ({s0}, {c0}) turns back at {p:?}"
                )));
            }
            let gq = self.gap(q.0, q.1);
            if region == 0.0 && gq.abs() >= RESONANCE_TOL {
                region = gq.signum();
            } else if region != 0.0 && gq.signum() != region && gq.abs() >= RESONANCE_TOL {
                if partial && knots.len() > 1 {
                    return Ok(self.ordered(knots, steps, orient, dir));
                }
                return Err(RiemannError::Resonance(format!(
                    "c-family curve from ({s0}, {c0}) crosses the resonance locus near {q:?}"
                )));
            }
            if (q.1 - target) * dir >= 0.0 {
                let (mut a, mut b) = (0.0, h);
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if (self.rk4(p, m, orient).1 - target) * dir < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let last = self.rk4(p, b, orient);
                knots.push((last.0, target));
                steps.push(b);
                return Ok(self.ordered(knots, steps, orient, dir));
            }
            knots.push(q);
            steps.push(h);
            p = q;
        }
        Err(RiemannError::Resonance(format!(
            "c-family curve from ({s0}, {c0}) did not reach c = {target}"
        )))
    }

    fn ordered(
        &self,
        mut knots: Vec<(f64, f64)>,
        mut steps: Vec<f64>,
        orient: f64,
        dir: f64,
    ) -> CPath {
        if dir < 0.0 {
            knots.reverse();
            steps.reverse();
            CPath {
                knots,
                steps,
                orient: -orient,
            }
        } else {
            CPath {
                knots,
                steps,
                orient,
            }
        }
    }

    fn integrate_retry(&self, s0: f64, c0: f64, target: f64, side: f64) -> Result<CPath> {
        self.integrate(s0, c0, target, side, PATH_STEP, false)
            .or_else(|_| self.integrate(s0, c0, target, side, 0.25 * PATH_STEP, false))
    }

    fn ratio(&self, c: f64) -> ScalarFn {
        self.flux.shifted_ratio(c, self.k, self.ads.m_dc(c))
    }

    fn wave(&self, path: &CPath) -> Result<Wave> {
        let lams: Vec<f64> = path
            .knots
            .iter()
            .map(|&(s, c)| self.lambda_c(s, c))
            .collect();
        if lams.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RiemannError::Assertion(
                "lambda_c is not strictly increasing along the c-rarefaction".into(),
            ));
        }
        let (first, last) = (path.knots[0], *path.knots.last().unwrap_or(&path.knots[0]));
        let flux = self.flux.clone();
        let ads = *self.ads;
        let k = self.k;
        let knots = path.knots.clone();
        let steps = path.steps.clone();
        let orient = path.orient;
        let profile = Profile::new(move |xi| {
            let rf = CRarefaction {
                flux: &flux,
                ads: &ads,
                k,
            };
            let i = lams.partition_point(|&l| l <= xi).clamp(1, lams.len() - 1) - 1;
            let p = knots[i];
            let (mut a, mut b) = (0.0, steps[i]);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let q = rf.rk4(p, m, orient);
                if rf.lambda_c(q.0, q.1) < xi {
                    a = m;
                } else {
                    b = m;
                }
            }
            let q = rf.rk4(p, 0.5 * (a + b), orient);
            polymer_state(q.0, q.1, k)
        });
        Ok(Wave::rarefaction(
            Family::C,
            polymer_state(first.0, first.1, self.k),
            polymer_state(last.0, last.1, self.k),
            self.lambda_c(first.0, first.1),
            self.lambda_c(last.0, last.1),
            profile,
        ))
    }

    fn assemble(&self, left: PolymerState2, right: PolymerState2, path: &CPath) -> Result<WaveFan> {
        let (foot, end) = (path.knots[0].0, path.knots[path.knots.len() - 1].0);
        let in_left = {
            let env = build_envelope(&self.ratio(left.c), left.s, Direction::Flat)?;
            (env.eval(foot) - self.ratio(left.c).eval(foot)).abs() <= FAN_TOL
        };
        let in_right = {
            let env = build_envelope(&self.ratio(right.c), right.s, Direction::Sharp)?;
            (env.eval(end) - self.ratio(right.c).eval(end)).abs() <= FAN_TOL
        };
        if !(in_left && in_right) {
            return Err(RiemannError::Assertion(format!(
                "c-rarefaction traces ({foot}, {end}) violate the envelope conditions"
            )));
        }
        let k = self.k;
        let lw = scalar_waves(
            &self.flux.s_flux(left.c, k),
            left.s,
            foot,
            Family::S,
            polymer_map(left.c, k),
        );
        let rw = scalar_waves(
            &self.flux.s_flux(right.c, k),
            end,
            right.s,
            Family::S,
            polymer_map(right.c, k),
        );
        finish(WaveFan::chain(
            polymer_state(left.s, left.c, k),
            polymer_state(right.s, right.c, k),
            vec![lw, vec![self.wave(path)?], rw],
        ))
    }

    /// Point of `path` (knots increasing in `c`) at concentration `c`, with the
    /// knot index and the step taken from it.
    fn locate(&self, path: &CPath, c: f64) -> Option<(usize, f64, (f64, f64))> {
        let n = path.knots.len();
        if n < 2 || c < path.knots[0].1 || c > path.knots[n - 1].1 {
            return None;
        }
        let i = path.knots.partition_point(|q| q.1 <= c).clamp(1, n - 1) - 1;
        let p = path.knots[i];
        let (mut a, mut b) = (0.0, path.steps[i]);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if self.rk4(p, m, path.orient).1 < c {
                a = m;
            } else {
                b = m;
            }
        }
        let h = 0.5 * (a + b);
        let q = self.rk4(p, h, path.orient);
        Some((i, h, (q.0, c)))
    }

    /// Splits `path` at concentration `c` into the parts below and above it.
    fn split(&self, path: &CPath, c: f64) -> Option<(CPath, CPath, (f64, f64))> {
        let (i, h, q) = self.locate(path, c)?;
        let mut hk = path.knots[..=i].to_vec();
        let mut hs = path.steps[..i].to_vec();
        if h > 1e-14 {
            hk.push(q);
            hs.push(h);
        } else {
            hk[i] = q;
        }
        let rest = path.steps[i] - h;
        let (mut tk, mut ts) = (vec![q], Vec::new());
        if rest > 1e-14 {
            tk.extend_from_slice(&path.knots[i + 1..]);
            ts.push(rest);
            ts.extend_from_slice(&path.steps[i + 1..]);
        } else {
            tk.extend_from_slice(path.knots.get(i + 2..).unwrap_or(&[]));
            ts.extend_from_slice(path.steps.get(i + 1..).unwrap_or(&[]));
        }
        let o = path.orient;
        Some((
            CPath {
                knots: hk,
                steps: hs,
                orient: o,
            },
            CPath {
                knots: tk,
                steps: ts,
                orient: o,
            },
            q,
        ))
    }

    /// c-rarefaction on the branch below resonance from the left state, an
    /// s-shock across the resonance at equal `lambda_c`, and a c-rarefaction
    /// on the branch above resonance ending at `end` on `c = right.c`.
    fn composite(
        &self,
        left: PolymerState2,
        right: PolymerState2,
        end: f64,
        side: f64,
    ) -> Result<WaveFan> {
        let lower = self
            .integrate(left.s, left.c, right.c, 1.0, PATH_STEP, true)
            .or_else(|_| self.integrate(left.s, left.c, right.c, 1.0, 0.25 * PATH_STEP, true))?;
        let upper = self.integrate_retry(end, right.c, left.c, side)?;
        let c_hi = lower.knots[lower.knots.len() - 1].1;
        let diff = |c: f64| -> Option<f64> {
            let (_, _, a) = self.locate(&lower, c)?;
            let (_, _, b) = self.locate(&upper, c)?;
            (a.0 < b.0).then(|| self.lambda_c(a.0, a.1) - self.lambda_c(b.0, b.1))
        };
        let (mut a, mut b) = (left.c, c_hi);
        let (da, db) = (diff(a), diff(b));
        match (da, db) {
            (Some(x), Some(y)) if x <= 0.0 && y >= 0.0 => {}
            _ => {
                return Err(RiemannError::Resonance(format!(
                    "no switching concentration for the composite c-wave ({da:?}, {db:?})"
                )))
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            match diff(m) {
                Some(d) if d < 0.0 => a = m,
                Some(_) => b = m,
                None => break,
            }
            if b - a < 1e-15 {
                break;
            }
        }
        let c_star = 0.5 * (a + b);
        let (head, _, p1) = self.split(&lower, c_star).ok_or_else(|| {
            RiemannError::Assertion("composite split below resonance failed".into())
        })?;
        let (_, tail, p2) = self.split(&upper, c_star).ok_or_else(|| {
            RiemannError::Assertion("composite split above resonance failed".into())
        })?;
        let in_right = {
            let env = build_envelope(&self.ratio(right.c), right.s, Direction::Sharp)?;
            (env.eval(end) - self.ratio(right.c).eval(end)).abs() <= FAN_TOL
        };
        if !in_right {
            return Err(RiemannError::Assertion(format!(
                "composite c-wave end {end} violates the envelope condition"
            )));
        }
        let k = self.k;
        let mut parts = Vec::new();
        if head.knots.len() > 1 {
            parts.push(vec![self.wave(&head)?]);
        }
        let fs = self.flux.s_flux(c_star, k);
        let sigma = (fs.eval(p2.0) - fs.eval(p1.0)) / (p2.0 - p1.0);
        parts.push(vec![Wave::jump(
            Family::S,
            WaveKind::Shock,
            polymer_state(p1.0, c_star, k),
            polymer_state(p2.0, c_star, k),
            sigma,
        )]);
        if tail.knots.len() > 1 {
            parts.push(vec![self.wave(&tail)?]);
        }
        parts.push(scalar_waves(
            &self.flux.s_flux(right.c, k),
            end,
            right.s,
            Family::S,
            polymer_map(right.c, k),
        ));
        finish(WaveFan::chain(
            polymer_state(left.s, left.c, k),
            polymer_state(right.s, right.c, k),
            parts,
        ))
    }

    fn resonance(&self, c: f64) -> f64 {
        let g = self.ratio(c);
        g.critical_points()
            .iter()
            .copied()
            .max_by(|a, b| g.eval(*a).total_cmp(&g.eval(*b)))
            .unwrap_or(1.0)
    }

    fn solve(&self, left: PolymerState2, right: PolymerState2) -> Result<WaveFan> {
        if left.s == 0.0 && right.s == 0.0 {
            let w = Wave::jump(
                Family::C,
                WaveKind::Contact,
                polymer_state(0.0, left.c, self.k),
                polymer_state(0.0, right.c, self.k),
                0.0,
            );
            return finish(WaveFan::new(w.left, w.right, vec![w]));
        }
        let (res_l, res_r) = (self.resonance(left.c), self.resonance(right.c));
        let mut tried: Vec<String> = Vec::new();
        let mut attempt = |label: &str, path: Result<CPath>| -> Option<WaveFan> {
            match path.and_then(|p| self.assemble(left, right, &p)) {
                Ok(fan) => Some(fan),
                Err(e) => {
                    tried.push(format!("{label}: {e}"));
                    None
                }
            }
        };
        if left.s <= res_l && left.s > 0.0 {
            if let Some(fan) = attempt(
                "foot at left state",
                self.integrate_retry(left.s, left.c, right.c, 1.0),
            ) {
                return Ok(fan);
            }
        }
        if right.s >= res_r {
            if let Some(fan) = attempt(
                "end at right state",
                self.integrate_retry(right.s, right.c, left.c, 1.0),
            ) {
                return Ok(fan);
            }
        }
        for side in [-1.0, 1.0] {
            if let Some(fan) = attempt(
                "end at resonance",
                self.integrate_retry(res_r, right.c, left.c, side),
            ) {
                return Ok(fan);
            }
        }
        if left.s > res_l {
            if let Some(fan) = attempt(
                "foot at left state",
                self.integrate_retry(left.s, left.c, right.c, 1.0),
            ) {
                return Ok(fan);
            }
        }
        if right.s < res_r {
            if let Some(fan) = attempt(
                "end at right state",
                self.integrate_retry(right.s, right.c, left.c, 1.0),
            ) {
                return Ok(fan);
            }
        }
        if left.s <= res_l && left.s > 0.0 {
            let (end, side) = if right.s > res_r {
                (right.s, 1.0)
            } else {
                (res_r, 1.0)
            };
            match self.composite(left, right, end, side) {
                Ok(fan) => return Ok(fan),
                Err(e) => tried.push(format!("composite: {e}")),
            }
        }
        Err(RiemannError::Resonance(format!(
            "no admissible c-rarefaction for {left:?} -> {right:?}: {}",
            tried.join("; ")
        )))
    }
}

/// Integral curve of the adsorptive c-family from `(s, c0)` to `c1`.
pub fn c_rarefaction_path(
    flux: &PolymerFluxParams,
    adsorption: &AdsorptionParams,
    k: f64,
    s: f64,
    c0: f64,
    c1: f64,
) -> Result<CPath> {
    CRarefaction {
        flux,
        ads: adsorption,
        k,
    }
    .integrate_retry(s, c0, c1, 1.0)
}

fn traffic_state(rho: f64, v: f64, k: f64) -> State {
    State::Traffic(TrafficState::new(rho, v, k))
}

/// Waves of the v family along `w = const` from `(rho_l, v_l)` to `(rho_m, v_m)`.
pub(crate) fn v_wave(
    traffic: &TrafficParams,
    w: f64,
    k: f64,
    from: (f64, f64),
    to: (f64, f64),
) -> Option<Wave> {
    let ((rho_l, v_l), (rho_m, v_m)) = (from, to);
    if v_l == v_m {
        return None;
    }
    let l = traffic_state(rho_l, v_l, k);
    let m = traffic_state(rho_m, v_m, k);
    if v_l > v_m {
        let speed = (rho_m * v_m - rho_l * v_l) / (rho_m - rho_l);
        return Some(Wave::jump(Family::V, WaveKind::Shock, l, m, speed));
    }
    let g = traffic.gamma;
    let profile = Profile::new(move |xi| {
        let rho = ((w - xi) / ((g + 1.0) * k)).max(0.0).powf(1.0 / g);
        traffic_state(rho, w - k * rho.powf(g), k)
    });
    Some(Wave::rarefaction(
        Family::V,
        l,
        m,
        traffic.lambda_v(rho_l, v_l, k),
        traffic.lambda_v(rho_m, v_m, k),
        profile,
    ))
}

pub(crate) fn check_traffic(traffic: &TrafficParams, k: f64, w: f64, v: f64) -> Result<()> {
    traffic.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(RiemannError::Domain(format!(
            "road coefficient k must be positive, got {k}"
        )));
    }
    if !(v >= 0.0) || w < v - 1e-12 || !w.is_finite() {
        return Err(RiemannError::Domain(format!(
            "state (w, v) = ({w}, {v}) lies left of the vacuum line or has negative velocity"
        )));
    }
    Ok(())
}

/// Step-1 waves from `(w_l, v_l)` to `(w_r, v_r)` at road coefficient `k`.
pub(crate) fn traffic_waves(
    traffic: &TrafficParams,
    k: f64,
    left: TrafficState2,
    right: TrafficState2,
) -> Vec<Wave> {
    let rho = |st: TrafficState2| traffic.rho_from(st.w, st.v, k);
    let (rho_l, rho_r) = (rho(left), rho(right));
    let r_state = traffic_state(rho_r, right.v, k);
    let mut waves = Vec::new();
    if right.v <= left.w {
        let rho_m = traffic.rho_from(left.w, right.v, k);
        waves.extend(v_wave(
            traffic,
            left.w,
            k,
            (rho_l, left.v),
            (rho_m, right.v),
        ));
        let m = traffic_state(rho_m, right.v, k);
        if m.max_abs_diff(&r_state) > 0.0 {
            waves.push(Wave::jump(
                Family::Rho,
                WaveKind::Contact,
                m,
                r_state,
                right.v,
            ));
        }
    } else {
        waves.extend(v_wave(traffic, left.w, k, (rho_l, left.v), (0.0, left.w)));
        let m1 = traffic_state(0.0, left.w, k);
        let m2 = traffic_state(0.0, right.v, k);
        let vac = Profile::new(move |xi| traffic_state(0.0, xi, k));
        waves.push(Wave::rarefaction(
            Family::Vacuum,
            m1,
            m2,
            left.w,
            right.v,
            vac,
        ));
        if rho_r > 0.0 {
            waves.push(Wave::jump(
                Family::Rho,
                WaveKind::Contact,
                m2,
                r_state,
                right.v,
            ));
        }
    }
    waves
}

/// Traffic system in the `(w, v)` plane at fixed road coefficient `k`.
pub fn solve_traffic2(
    left: TrafficState2,
    right: TrafficState2,
    k: f64,
    traffic: &TrafficParams,
) -> Result<WaveFan> {
    check_traffic(traffic, k, left.w, left.v)?;
    check_traffic(traffic, k, right.w, right.v)?;
    let l = traffic_state(traffic.rho_from(left.w, left.v, k), left.v, k);
    let r = traffic_state(traffic.rho_from(right.w, right.v, k), right.v, k);
    finish(WaveFan::new(l, r, traffic_waves(traffic, k, left, right)))
}

/// `(s, k)` system at fixed `c`: scalar waves around a stationary k-wave.
pub fn solve_sk2(
    left: SkState,
    right: SkState,
    c: f64,
    flux: &PolymerFluxParams,
) -> Result<WaveFan> {
    flux.validate()?;
    flux.check_state(left.s, c, left.k)?;
    flux.check_state(right.s, c, right.k)?;
    let l = polymer_state(left.s, c, left.k);
    let r = polymer_state(right.s, c, right.k);
    if left.k == right.k {
        let waves = scalar_waves(
            &flux.s_flux(c, left.k),
            left.s,
            right.s,
            Family::S,
            polymer_map(c, left.k),
        );
        return finish(WaveFan::new(l, r, waves));
    }
    let (f_l, f_r) = (flux.s_flux(c, left.k), flux.s_flux(c, right.k));
    let path = minimum_jump(&f_l, &f_r, left.s, right.s)?;
    let lw = scalar_waves(
        &f_l,
        left.s,
        path.s_minus,
        Family::S,
        polymer_map(c, left.k),
    );
    let rw = scalar_waves(
        &f_r,
        path.s_plus,
        right.s,
        Family::S,
        polymer_map(c, right.k),
    );
    let kw = Wave::jump(
        Family::K,
        WaveKind::Contact,
        polymer_state(path.s_minus, c, left.k),
        polymer_state(path.s_plus, c, right.k),
        0.0,
    );
    finish(WaveFan::chain(l, r, absorb_coincident(lw, kw, rw)))
}
