//! Global Riemann solver for polymer flooding with gravity.
//!
//! With gravity the c-wave may travel left, right or stand still, depending
//! on the sign of the left flux. When it travels left the solution splits into
//! a left problem in `(s, c)` at `k_l` (waves of negative speed) and a right
//! problem in `(s, k)` at `c_r` (waves of non-negative speed). The common trace
//! `s_m` is the single point shared by the trace sets `I1` and `I2`.

use serde::{Deserialize, Serialize};

use crate::envelope::{scalar_waves, ScalarFn};
use crate::error::{Result, RiemannError};
use crate::fan::{Family, PolymerState, State, Wave, WaveFan, WaveKind};
use crate::flux::PolymerFluxParams;
use crate::numerics::bisect;
use crate::reduced::{
    finish, polymer_map, polymer_state, solve_polymer2, solve_sk2, PolymerState2, SkState,
};

/// `|f_l|` below this is treated as a stationary c-wave.
pub const SIGN_TOL: f64 = 1e-12;

/// Tolerance when intersecting trace sets.
pub const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveSign {
    Negative,
    Zero,
    Positive,
}

/// Direction of the c-wave, read off the left state.
pub fn c_wave_sign(left: PolymerState, flux: &PolymerFluxParams) -> WaveSign {
    if left.s == 0.0 {
        return WaveSign::Negative;
    }
    let f_l = flux.f(left.s, left.c, left.k);
    if f_l.abs() <= SIGN_TOL {
        WaveSign::Zero
    } else if f_l < 0.0 {
        WaveSign::Negative
    } else {
        WaveSign::Positive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceLabel {
    I1,
    I2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, s: f64, tol: f64) -> bool {
        let above = if self.lo_closed {
            s >= self.lo - tol
        } else {
            s > self.lo + tol
        };
        let below = if self.hi_closed {
            s <= self.hi + tol
        } else {
            s < self.hi - tol
        };
        above && below
    }
}

/// Admissible values of the middle trace `s_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSet {
    pub label: TraceLabel,
    pub intervals: Vec<Interval>,
    pub isolated_points: Vec<f64>,
}

impl TraceSet {
    fn open_closed(
        label: TraceLabel,
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
        points: Vec<f64>,
    ) -> Self {
        Self {
            label,
            intervals: vec![Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }],
            isolated_points: points,
        }
    }

    pub fn contains(&self, s: f64, tol: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(s, tol))
            || self.isolated_points.iter().any(|p| (p - s).abs() <= tol)
    }

    /// Distance from `s` to the nearest interval endpoint or isolated point.
    pub fn boundary_distance(&self, s: f64) -> f64 {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .chain(self.isolated_points.iter().copied())
            .map(|p| (p - s).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Points of `self` and `other` in common; overlapping intervals of
    /// positive length yield their endpoints so the caller can reject them.
    pub fn intersect(&self, other: &TraceSet) -> Vec<f64> {
        let mut out = Vec::new();
        for &p in &self.isolated_points {
            if other.contains(p, TRACE_TOL) {
                out.push(p);
            }
        }
        for &p in &other.isolated_points {
            if self.contains(p, TRACE_TOL) {
                out.push(p);
            }
        }
        for a in &self.intervals {
            for b in &other.intervals {
                let lo = a.lo.max(b.lo);
                let hi = a.hi.min(b.hi);
                if hi - lo > TRACE_TOL {
                    out.push(lo);
                    out.push(hi);
                } else if hi - lo >= -TRACE_TOL
                    && a.contains(lo, TRACE_TOL)
                    && b.contains(lo, TRACE_TOL)
                {
                    out.push(0.5 * (lo + hi));
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= TRACE_TOL);
        out
    }
}

/// Shape data of a dipping flux: minimum, positive zero and the minimum of `f/s`.
struct Dip<'a> {
    f: &'a ScalarFn,
}

impl<'a> Dip<'a> {
    fn new(f: &'a ScalarFn) -> Result<Self> {
        let d = Dip { f };
        let m = d.argmin()?;
        if d.f.eval(m) >= 0.0 {
            return Err(RiemannError::Shape("flux has no negative dip".into()));
        }
        Ok(d)
    }

    fn argmin(&self) -> Result<f64> {
        self.f
            .critical_points()
            .iter()
            .copied()
            .find(|&s| self.f.eval(s) < 0.0)
            .ok_or_else(|| RiemannError::Shape("flux has no interior minimum below zero".into()))
    }

    fn zero(&self) -> Result<f64> {
        let m = self.argmin()?;
        bisect(|s| self.f.eval(s), m, 1.0, 1e-15)
            .ok_or_else(|| RiemannError::Shape("flux has no positive zero".into()))
    }

    fn ratio(&self, s: f64) -> f64 {
        self.f.eval(s) / s
    }

    /// Minimiser of `f/s`, where `f' = f/s`.
    fn ratio_argmin(&self) -> Result<f64> {
        let (m, z) = (self.argmin()?, self.zero()?);
        // f/s decreases on (0, r) and increases on (r, z) with r < m.
        let d = |s: f64| self.f.deriv(s) * s - self.f.eval(s);
        bisect(d, 1e-300_f64.max(1e-12 * m), m, 1e-15)
            .or_else(|| bisect(d, 1e-12, z, 1e-15))
            .ok_or_else(|| RiemannError::Shape("f/s has no interior minimum".into()))
    }

    /// Left (decreasing) and right (increasing) roots of `f = y` inside the dip.
    fn level(&self, y: f64) -> Result<(f64, f64)> {
        let m = self.argmin()?;
        let g = |s: f64| self.f.eval(s) - y;
        let left = if y >= 0.0 {
            0.0
        } else {
            bisect(g, 0.0, m, 1e-15).unwrap_or(m)
        };
        let right = bisect(g, m, 1.0, 1e-15).ok_or_else(|| {
            RiemannError::Shape(format!("level {y} not attained on the increasing branch"))
        })?;
        Ok((left, right))
    }

    /// Largest root of `f/s = y` with `y` negative (right branch of `f/s`).
    fn ratio_level_right(&self, y: f64) -> Result<f64> {
        let r = self.ratio_argmin()?;
        let z = self.zero()?;
        bisect(|s| self.ratio(s) - y, r, z, 1e-15).ok_or_else(|| {
            RiemannError::Shape(format!("f/s never reaches {y} right of its minimum"))
        })
    }
}

fn pair_at_ratio(dm: &Dip, y: f64) -> Result<(f64, f64)> {
    let s2 = dm.ratio_level_right(y)?;
    let (a, b) = dm.level(dm.f.eval(s2))?;
    let s1 = if (a - s2).abs() < (b - s2).abs() {
        b
    } else {
        a
    };
    Ok((s1, s2))
}

/// Values of `s_m` for which the left problem `(s_l, c_l) -> (s_m, c_r)` at
/// `k_l` is solved by waves of negative speed.
pub fn build_i1(s_l: f64, f_l: &ScalarFn, f_m: &ScalarFn) -> Result<TraceSet> {
    let (dl, dm) = (Dip::new(f_l)?, Dip::new(f_m)?);
    let probe = dm.argmin()?;
    let label = TraceLabel::I1;
    if f_l.eval(probe) > f_m.eval(probe) {
        let hat = dl.ratio_argmin()?;
        let y = if s_l >= hat {
            dl.ratio(s_l)
        } else {
            dl.ratio(hat)
        };
        let m_hat = dm.argmin()?;
        if y < dm.ratio(m_hat) {
            // the collinear trace falls on the decreasing branch of f_m
            return Ok(TraceSet::open_closed(
                label,
                0.0,
                m_hat,
                false,
                true,
                Vec::new(),
            ));
        }
        let (s1, s2) = pair_at_ratio(&dm, y)?;
        Ok(TraceSet::open_closed(
            label,
            0.0,
            s1.min(s2),
            false,
            false,
            vec![s1.max(s2)],
        ))
    } else {
        let hat = dm.argmin()?;
        let y_hat = dm.ratio(hat);
        let tilde = dl.ratio_level_right(y_hat)?;
        if s_l >= tilde {
            let (s1, s2) = pair_at_ratio(&dm, dl.ratio(s_l))?;
            Ok(TraceSet::open_closed(
                label,
                0.0,
                s1.min(s2),
                false,
                false,
                vec![s1.max(s2)],
            ))
        } else {
            Ok(TraceSet::open_closed(
                label,
                0.0,
                hat,
                false,
                true,
                Vec::new(),
            ))
        }
    }
}

/// Values of `s_m` for which the right problem `(s_m, k_l) -> (s_r, k_r)` at
/// `c_r` is solved by waves of non-negative speed.
pub fn build_i2(s_r: f64, f_m: &ScalarFn, f_r: &ScalarFn) -> Result<TraceSet> {
    let (dm, dr) = (Dip::new(f_m)?, Dip::new(f_r)?);
    let probe = dm.argmin()?;
    let label = TraceLabel::I2;
    if f_m.eval(probe) > f_r.eval(probe) {
        let hat = dm.argmin()?;
        let (tilde, _) = dr.level(f_m.eval(hat))?;
        if s_r >= tilde {
            Ok(TraceSet::open_closed(
                label,
                hat,
                1.0,
                true,
                true,
                Vec::new(),
            ))
        } else {
            let (s1, s2) = dm.level(f_r.eval(s_r))?;
            let pts = if f_r.eval(s_r) < 0.0 {
                vec![s1]
            } else {
                Vec::new()
            };
            Ok(TraceSet::open_closed(label, s2, 1.0, true, true, pts))
        }
    } else {
        let hat = dr.argmin()?;
        let y = if s_r >= hat {
            f_r.eval(hat)
        } else {
            f_r.eval(s_r)
        };
        let (s1, s2) = dm.level(y)?;
        let pts = if y < 0.0 { vec![s1] } else { Vec::new() };
        Ok(TraceSet::open_closed(label, s2, 1.0, true, true, pts))
    }
}

fn check_shapes(flux: &PolymerFluxParams, pairs: &[(f64, f64)]) -> Result<()> {
    for &(c, k) in pairs {
        flux.check_gravity_shape(c, k)?;
    }
    Ok(())
}

/// Polymer flooding with gravity and a permeability jump at `x = 0`.
pub fn solve_gravity3(
    left: PolymerState,
    right: PolymerState,
    flux: &PolymerFluxParams,
) -> Result<WaveFan> {
    flux.validate()?;
    flux.check_state(left.s, left.c, left.k)?;
    flux.check_state(right.s, right.c, right.k)?;
    let (l, r) = (State::Polymer(left), State::Polymer(right));
    if left.c == right.c {
        return solve_sk2(
            SkState::new(left.s, left.k),
            SkState::new(right.s, right.k),
            left.c,
            flux,
        );
    }
    if left.k == right.k {
        return solve_polymer2(
            PolymerState2::new(left.s, left.c),
            PolymerState2::new(right.s, right.c),
            flux,
            left.k,
        );
    }
    check_shapes(
        flux,
        &[
            (left.c, left.k),
            (right.c, left.k),
            (right.c, right.k),
            (left.c, right.k),
        ],
    )?;
    match c_wave_sign(left, flux) {
        WaveSign::Positive => {
            let f_l = flux.f(left.s, left.c, left.k);
            let z = flux.positive_zero(left.c, right.k).unwrap_or(0.0);
            let s_m = if f_l >= 1.0 {
                1.0
            } else {
                bisect(|s| flux.f(s, left.c, right.k) - f_l, z, 1.0, 1e-15).ok_or_else(|| {
                    RiemannError::Assertion(format!(
                        "no k-wave trace for flux {f_l} on the positive branch"
                    ))
                })?
            };
            let mid = polymer_state(s_m, left.c, right.k);
            let kw = Wave::jump(Family::K, WaveKind::Contact, l, mid, 0.0);
            let rest = solve_polymer2(
                PolymerState2::new(s_m, left.c),
                PolymerState2::new(right.s, right.c),
                flux,
                right.k,
            )?;
            finish(WaveFan::chain(l, r, vec![vec![kw], rest.waves]))
        }
        WaveSign::Zero => {
            let s_m = flux
                .positive_zero(right.c, right.k)
                .ok_or_else(|| RiemannError::Shape("right flux has no positive zero".into()))?;
            let ck = Wave::jump(
                Family::CK,
                WaveKind::Contact,
                l,
                polymer_state(s_m, right.c, right.k),
                0.0,
            );
            let rw = scalar_waves(
                &flux.s_flux(right.c, right.k),
                s_m,
                right.s,
                Family::S,
                polymer_map(right.c, right.k),
            );
            finish(WaveFan::chain(l, r, vec![vec![ck], rw]))
        }
        WaveSign::Negative => {
            let f_l = flux.s_flux(left.c, left.k);
            let f_m = flux.s_flux(right.c, left.k);
            let f_r = flux.s_flux(right.c, right.k);
            let i1 = build_i1(left.s, &f_l, &f_m)?;
            let i2 = build_i2(right.s, &f_m, &f_r)?;
            let common = i1.intersect(&i2);
            if common.len() != 1 {
                return Err(RiemannError::Assertion(format!(
                    "trace sets do not meet in a single point: I1 = {}, I2 = {}",
                    describe(&i1),
                    describe(&i2)
                )));
            }
            let s_m = common[0];
            if f_m.eval(s_m) >= 0.0 {
                return Err(RiemannError::Assertion(format!(
                    "middle trace {s_m} has non-negative flux {}",
                    f_m.eval(s_m)
                )));
            }
            let r1 = solve_polymer2(
                PolymerState2::new(left.s, left.c),
                PolymerState2::new(s_m, right.c),
                flux,
                left.k,
            )?;
            let r2 = solve_sk2(
                SkState::new(s_m, left.k),
                SkState::new(right.s, right.k),
                right.c,
                flux,
            )?;
            finish(WaveFan::chain(l, r, vec![r1.waves, r2.waves]))
        }
    }
}

fn describe(set: &TraceSet) -> String {
    let ivs: Vec<String> = set
        .intervals
        .iter()
        .map(|iv| {
            format!(
                "{}{}, {}{}",
                if iv.lo_closed { '[' } else { '(' },
                iv.lo,
                iv.hi,
                if iv.hi_closed { ']' } else { ')' }
            )
        })
        .collect();
    format!(
        "{:?} {} points {:?}",
        set.label,
        ivs.join(" u "),
        set.isolated_points
    )
}
