//! Monotone envelopes, the minimum-jump path and hull-based scalar Riemann
//! solutions. Every system solver reduces to these kernels.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Result, RiemannError};
use crate::fan::{Family, Profile, State, Wave, WaveFan, WaveKind};
use crate::numerics::{bisect, scan_roots, ROOT_TOL};

/// Scan resolution used to bracket critical points.
pub const CRITICAL_SCAN: usize = 512;

/// Grid resolution of the hull construction before tangency refinement.
pub const HULL_GRID: usize = 2048;

/// Traces closer than this to the data are snapped onto it.
pub const SNAP_TOL: f64 = 1e-12;

/// Derivative samples used to detect a convex or concave flux segment.
pub const MONOTONE_PROBE: usize = 128;

/// Residual tolerance for envelope contacts and jump conditions.
pub const RESIDUAL_TOL: f64 = 1e-9;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function with derivative on `[lo, hi]`.
#[derive(Clone)]
pub struct ScalarFn {
    g: RealFn,
    dg: RealFn,
    lo: f64,
    hi: f64,
    scan: usize,
    critical: OnceLock<Vec<f64>>,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl ScalarFn {
    pub fn new<G, D>(g: G, dg: D, lo: f64, hi: f64) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            g: Arc::new(g),
            dg: Arc::new(dg),
            lo,
            hi,
            scan: CRITICAL_SCAN,
            critical: OnceLock::new(),
        }
    }

    pub fn with_scan(mut self, scan: usize) -> Self {
        self.scan = scan.max(8);
        self.critical = OnceLock::new();
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.dg)(x)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Sorted interior roots of `g'`.
    pub fn critical_points(&self) -> &[f64] {
        self.critical.get_or_init(|| {
            let dg = self.dg.clone();
            scan_roots(|x| dg(x), self.lo, self.hi, self.scan, ROOT_TOL)
                .into_iter()
                .filter(|&x| x > self.lo && x < self.hi)
                .collect()
        })
    }

    /// `[lo, critical..., hi]`: `g` is monotone between consecutive entries.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![self.lo];
        b.extend_from_slice(self.critical_points());
        b.push(self.hi);
        b
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// All `x` with `g(x) = y`, including tangential touches at critical points.
    pub fn level_set(&self, y: f64) -> Vec<f64> {
        let bp = self.breakpoints();
        let mut out = Vec::new();
        for w in bp.windows(2) {
            let (a, b) = (w[0], w[1]);
            if let Some(r) = bisect(|x| self.eval(x) - y, a, b, ROOT_TOL) {
                out.push(r);
            }
        }
        for &x in &bp {
            if (self.eval(x) - y).abs() <= 1e-10 {
                out.push(x);
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-11);
        out
    }
}

/// Roots of `g'` on `[lo, hi]` (restricted to the function's own interval).
pub fn critical_points(g: &ScalarFn, lo: f64, hi: f64) -> Vec<f64> {
    g.critical_points()
        .iter()
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Running max to the right of the anchor, running min to the left.
    Sharp,
    /// Running min to the right of the anchor, running max to the left.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentShape {
    Follows,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSegment {
    pub lo: f64,
    pub hi: f64,
    pub shape: SegmentShape,
}

#[derive(Debug, Clone)]
pub struct MonotoneEnvelope {
    pub anchor: f64,
    pub direction: Direction,
    pub segments: Vec<EnvelopeSegment>,
    g: ScalarFn,
}

#[derive(Clone, Copy, PartialEq)]
enum Extreme {
    Max,
    Min,
}

fn walk(g: &ScalarFn, pieces: &[(f64, f64)], start: f64, mode: Extreme) -> Vec<EnvelopeSegment> {
    let mut e = start;
    let mut out = Vec::new();
    let beats = |a: f64, b: f64| match mode {
        Extreme::Max => a > b,
        Extreme::Min => a < b,
    };
    for &(from, to) in pieces {
        let gt = g.eval(to);
        let gf = g.eval(from);
        if beats(gt, e) {
            if !beats(e, gf) {
                out.push((from, to, SegmentShape::Follows));
            } else {
                let x = bisect(|x| g.eval(x) - e, from, to, ROOT_TOL).unwrap_or(from);
                out.push((from, x, SegmentShape::Constant(e)));
                out.push((x, to, SegmentShape::Follows));
            }
            e = gt;
        } else {
            out.push((from, to, SegmentShape::Constant(e)));
        }
    }
    out.into_iter()
        .filter(|(a, b, _)| a != b)
        .map(|(a, b, shape)| EnvelopeSegment {
            lo: a.min(b),
            hi: a.max(b),
            shape,
        })
        .collect()
}

fn merge_segments(mut segs: Vec<EnvelopeSegment>) -> Vec<EnvelopeSegment> {
    segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut out: Vec<EnvelopeSegment> = Vec::with_capacity(segs.len());
    for s in segs {
        if let Some(last) = out.last_mut() {
            if last.shape == s.shape && (last.hi - s.lo).abs() <= 0.0 {
                last.hi = s.hi;
                continue;
            }
        }
        out.push(s);
    }
    out
}

/// Builds `G#` (sharp) or `Gb` (flat) of `g` anchored at `anchor`.
pub fn build_envelope(g: &ScalarFn, anchor: f64, direction: Direction) -> Result<MonotoneEnvelope> {
    if !g.contains(anchor) {
        return Err(RiemannError::Domain(format!(
            "anchor {anchor} outside [{}, {}]",
            g.lo, g.hi
        )));
    }
    let mut bp = g.breakpoints();
    bp.push(anchor);
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    let right: Vec<(f64, f64)> = bp
        .windows(2)
        .filter(|w| w[0] >= anchor)
        .map(|w| (w[0], w[1]))
        .collect();
    let left: Vec<(f64, f64)> = bp
        .windows(2)
        .rev()
        .filter(|w| w[1] <= anchor)
        .map(|w| (w[1], w[0]))
        .collect();
    let (rmode, lmode) = match direction {
        Direction::Sharp => (Extreme::Max, Extreme::Min),
        Direction::Flat => (Extreme::Min, Extreme::Max),
    };
    let g0 = g.eval(anchor);
    let mut segs = walk(g, &right, g0, rmode);
    segs.extend(walk(g, &left, g0, lmode));
    if segs.is_empty() {
        segs.push(EnvelopeSegment {
            lo: anchor,
            hi: anchor,
            shape: SegmentShape::Follows,
        });
    }
    Ok(MonotoneEnvelope {
        anchor,
        direction,
        segments: merge_segments(segs),
        g: g.clone(),
    })
}

impl MonotoneEnvelope {
    pub fn segment_at(&self, s: f64) -> &EnvelopeSegment {
        let i = self.segments.partition_point(|seg| seg.hi < s);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s == self.anchor {
            return self.g.eval(s);
        }
        match self.segment_at(s).shape {
            SegmentShape::Follows => self.g.eval(s),
            SegmentShape::Constant(y) => y,
        }
    }

    pub fn function(&self) -> &ScalarFn {
        &self.g
    }
}

/// Traces and speed of the minimum-jump path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpPath {
    pub s_minus: f64,
    pub s_plus: f64,
    pub sigma: f64,
}

/// Locates the crossing of `Gb(.; s_l)` built on `g_l` and `G#(.; s_r)` built
/// on `g_r`, and the traces touching `g_l`, `g_r` at the crossing level.
///
/// Among admissible trace pairs the one with the smallest `|s_+ - s_-|` is
/// returned; remaining ties go to the pair nearest the anchors.
pub fn minimum_jump(g_l: &ScalarFn, g_r: &ScalarFn, s_l: f64, s_r: f64) -> Result<JumpPath> {
    let (lo, hi) = g_l.interval();
    if g_r.interval() != (lo, hi) {
        return Err(RiemannError::Domain(
            "envelope functions must share their interval".into(),
        ));
    }
    let flat = build_envelope(g_l, s_l, Direction::Flat)?;
    let sharp = build_envelope(g_r, s_r, Direction::Sharp)?;
    let h = |s: f64| sharp.eval(s) - flat.eval(s);
    let (h_lo, h_hi) = (h(lo), h(hi));
    if h_lo > RESIDUAL_TOL || h_hi < -RESIDUAL_TOL {
        return Err(RiemannError::Infeasible(format!(
            "envelope difference has no sign change on [{lo}, {hi}]: {h_lo} .. {h_hi}"
        )));
    }
    let cross = if h_lo >= 0.0 {
        lo
    } else if h_hi <= 0.0 {
        hi
    } else {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if h(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        b
    };
    let level = match (flat.segment_at(cross).shape, sharp.segment_at(cross).shape) {
        (SegmentShape::Constant(y), _) => y,
        (_, SegmentShape::Constant(y)) => y,
        _ => 0.5 * (flat.eval(cross) + sharp.eval(cross)),
    };
    let contacts = |g: &ScalarFn, env: &MonotoneEnvelope, anchor: f64| -> Vec<f64> {
        let mut c: Vec<f64> = g
            .level_set(level)
            .into_iter()
            .filter(|&x| (env.eval(x) - level).abs() <= RESIDUAL_TOL)
            .map(|x| {
                if (x - anchor).abs() <= SNAP_TOL {
                    anchor
                } else {
                    x
                }
            })
            .collect();
        if (g.eval(anchor) - level).abs() <= 1e-12 {
            c.push(anchor);
        }
        c
    };
    let minus = contacts(g_l, &flat, s_l);
    let plus = contacts(g_r, &sharp, s_r);
    let mut best: Option<(f64, f64, JumpPath)> = None;
    for &a in &minus {
        for &b in &plus {
            let jump = (b - a).abs();
            let tie = (a - s_l).abs() + (b - s_r).abs();
            let better = match best {
                None => true,
                Some((j, t, _)) => jump < j - 1e-12 || (jump <= j + 1e-12 && tie < t),
            };
            if better {
                best = Some((
                    jump,
                    tie,
                    JumpPath {
                        s_minus: a,
                        s_plus: b,
                        sigma: level,
                    },
                ));
            }
        }
    }
    best.map(|(_, _, p)| p).ok_or_else(|| {
        RiemannError::Assertion(format!(
            "no envelope contact at crossing level {level} (s_l = {s_l}, s_r = {s_r})"
        ))
    })
}

/// One wave of a scalar entropy solution, in the conserved variable `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarPiece {
    Shock {
        from: f64,
        to: f64,
        speed: f64,
    },
    Rarefaction {
        from: f64,
        to: f64,
        speed_from: f64,
        speed_to: f64,
    },
}

impl ScalarPiece {
    pub fn min_speed(&self) -> f64 {
        match *self {
            ScalarPiece::Shock { speed, .. } => speed,
            ScalarPiece::Rarefaction { speed_from, .. } => speed_from,
        }
    }

    pub fn max_speed(&self) -> f64 {
        match *self {
            ScalarPiece::Shock { speed, .. } => speed,
            ScalarPiece::Rarefaction { speed_to, .. } => speed_to,
        }
    }
}

/// Hull construction in the traversal parameter `t in [0,1]`,
/// `u = u_l + t (u_r - u_l)`, `phi(t) = f(u)/(u_r - u_l)`: the entropy
/// solution follows the lower convex hull of `phi`, with speeds `phi'`.
struct Hull<'a> {
    f: &'a ScalarFn,
    ul: f64,
    du: f64,
}

impl Hull<'_> {
    fn u(&self, t: f64) -> f64 {
        if t >= 1.0 {
            self.ul + self.du
        } else {
            self.ul + t * self.du
        }
    }

    fn phi(&self, t: f64) -> f64 {
        self.f.eval(self.u(t)) / self.du
    }

    fn dphi(&self, t: f64) -> f64 {
        self.f.deriv(self.u(t))
    }

    fn chord(&self, a: f64, b: f64) -> f64 {
        let (ua, ub) = (self.u(a), self.u(b));
        if (ub - ua).abs() <= SNAP_TOL {
            return self.f.deriv(0.5 * (ua + ub));
        }
        (self.f.eval(ub) - self.f.eval(ua)) / (ub - ua)
    }

    /// Right tangency point `b` of a chord anchored at `a`, near `guess`.
    fn tangent_right(&self, a: f64, guess: f64, h: f64) -> f64 {
        let pa = self.phi(a);
        let cond = |b: f64| self.dphi(b) * (b - a) - (self.phi(b) - pa);
        self.refine(
            cond,
            guess,
            (a + 1e-14).max(guess - 3.0 * h),
            (guess + 3.0 * h).min(1.0),
        )
    }

    /// Left tangency point `a` of a chord anchored at `b`, near `guess`.
    fn tangent_left(&self, b: f64, guess: f64, h: f64) -> f64 {
        let pb = self.phi(b);
        let cond = |a: f64| self.dphi(a) * (b - a) - (pb - self.phi(a));
        self.refine(
            cond,
            guess,
            (guess - 3.0 * h).max(0.0),
            (b - 1e-14).min(guess + 3.0 * h),
        )
    }

    fn refine<F: Fn(f64) -> f64>(&self, cond: F, guess: f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return guess;
        }
        let n = 24;
        let mut best: Option<f64> = None;
        let mut x0 = lo;
        let mut c0 = cond(x0);
        for i in 1..=n {
            let x1 = lo + (hi - lo) * i as f64 / n as f64;
            let c1 = cond(x1);
            if c0 == 0.0 || c0.signum() != c1.signum() {
                let r = if c0 == 0.0 {
                    x0
                } else {
                    bisect(&cond, x0, x1, 1e-15).unwrap_or(x0)
                };
                if best.is_none_or(|b| (r - guess).abs() < (b - guess).abs()) {
                    best = Some(r);
                }
            }
            x0 = x1;
            c0 = c1;
        }
        best.unwrap_or(guess)
    }

    fn refine_chord(&self, a: f64, b: f64, h: f64) -> (f64, f64) {
        let free_a = a > 0.0;
        let free_b = b < 1.0;
        let (mut a, mut b) = (a, b);
        for _ in 0..60 {
            let (pa, pb) = (a, b);
            if free_b {
                b = self.tangent_right(a, b, h);
            }
            if free_a {
                a = self.tangent_left(b, a, h);
            }
            if !(free_a && free_b) || ((a - pa).abs() < 1e-15 && (b - pb).abs() < 1e-15) {
                break;
            }
        }
        (a, b)
    }

    /// Single rarefaction or single shock when `phi'` is monotone on `[0,1]`.
    fn monotone_piece(&self) -> Option<ScalarPiece> {
        let probe: Vec<f64> = (0..=MONOTONE_PROBE)
            .map(|i| self.dphi(i as f64 / MONOTONE_PROBE as f64))
            .collect();
        let (ul, ur) = (self.u(0.0), self.u(1.0));
        if probe.windows(2).all(|w| w[1] > w[0]) {
            Some(ScalarPiece::Rarefaction {
                from: ul,
                to: ur,
                speed_from: probe[0],
                speed_to: probe[MONOTONE_PROBE],
            })
        } else if probe.windows(2).all(|w| w[1] < w[0]) {
            Some(ScalarPiece::Shock {
                from: ul,
                to: ur,
                speed: self.chord(0.0, 1.0),
            })
        } else {
            None
        }
    }

    fn pieces(&self) -> Vec<ScalarPiece> {
        if let Some(p) = self.monotone_piece() {
            return vec![p];
        }
        let n = HULL_GRID;
        let h = 1.0 / n as f64;
        let pts: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let t = i as f64 * h;
                (t, self.phi(t))
            })
            .collect();
        let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        let noise = 8.0 * f64::EPSILON * scale * h;
        let mut hull: Vec<usize> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            while hull.len() >= 2 {
                let o = pts[hull[hull.len() - 2]];
                let a = pts[hull[hull.len() - 1]];
                let b = pts[i];
                let cross = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
                if cross <= noise {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        let mut chords: Vec<(f64, f64)> = hull
            .windows(2)
            .filter(|w| w[1] - w[0] > 1)
            .map(|w| self.refine_chord(pts[w[0]].0, pts[w[1]].0, h))
            .collect();
        // Merge chords whose refined tangency points overlap.
        loop {
            let mut merged = false;
            for i in 1..chords.len() {
                let prev = chords[i - 1];
                let next = chords[i];
                if next.0 <= prev.1 + 1e-13
                    || self.chord(next.0, next.1) < self.chord(prev.0, prev.1)
                {
                    chords[i - 1] = self.refine_chord(prev.0, next.1, h);
                    chords.remove(i);
                    merged = true;
                    break;
                }
            }
            if !merged {
                break;
            }
        }
        let mut out = Vec::new();
        let mut t = 0.0;
        let push_fan = |out: &mut Vec<ScalarPiece>, a: f64, b: f64| {
            if b > a {
                out.push(ScalarPiece::Rarefaction {
                    from: self.u(a),
                    to: self.u(b),
                    speed_from: self.dphi(a),
                    speed_to: self.dphi(b),
                });
            }
        };
        for &(a, b) in &chords {
            push_fan(&mut out, t, a);
            out.push(ScalarPiece::Shock {
                from: self.u(a),
                to: self.u(b),
                speed: self.chord(a, b),
            });
            t = b;
        }
        push_fan(&mut out, t, 1.0);
        // Pin rarefaction edge speeds to neighbouring shock speeds.
        for i in 0..out.len() {
            let prev = if i > 0 {
                Some(out[i - 1].max_speed())
            } else {
                None
            };
            let next = out.get(i + 1).map(|p| p.min_speed());
            if let ScalarPiece::Rarefaction {
                speed_from,
                speed_to,
                ..
            } = &mut out[i]
            {
                if let Some(p) = prev {
                    if (*speed_from - p).abs() < 1e-7 {
                        *speed_from = p;
                    }
                }
                if let Some(q) = next {
                    if (*speed_to - q).abs() < 1e-7 {
                        *speed_to = q;
                    }
                }
                if *speed_to < *speed_from {
                    *speed_to = *speed_from;
                }
            }
        }
        out
    }
}

/// Entropy solution pieces of `u_t + f(u)_x = 0` with data `u_l`, `u_r`.
pub fn scalar_pieces(f: &ScalarFn, ul: f64, ur: f64) -> Vec<ScalarPiece> {
    if ul == ur {
        return Vec::new();
    }
    Hull { f, ul, du: ur - ul }.pieces()
}

/// Inverts `f'(u) = xi` on a rarefaction from `from` to `to`.
pub fn invert_speed(f: &ScalarFn, from: f64, to: f64, xi: f64) -> f64 {
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let u = |t: f64| from + t * (to - from);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f.deriv(u(m)) < xi {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-16 {
            break;
        }
    }
    u(0.5 * (a + b))
}

pub(crate) type StateMap = Arc<dyn Fn(f64) -> State + Send + Sync>;

/// Scalar entropy solution lifted into system states through `map`.
pub(crate) fn scalar_waves(
    f: &ScalarFn,
    ul: f64,
    ur: f64,
    family: Family,
    map: StateMap,
) -> Vec<Wave> {
    scalar_pieces(f, ul, ur)
        .into_iter()
        .map(|p| match p {
            ScalarPiece::Shock { from, to, speed } => {
                Wave::jump(family, WaveKind::Shock, map(from), map(to), speed)
            }
            ScalarPiece::Rarefaction {
                from,
                to,
                speed_from,
                speed_to,
            } => {
                let (flux, m) = (f.clone(), map.clone());
                let profile = Profile::new(move |xi| m(invert_speed(&flux, from, to, xi)));
                Wave::rarefaction(family, map(from), map(to), speed_from, speed_to, profile)
            }
        })
        .collect()
}

/// Entropy solution of the scalar Riemann problem as a fan of scalar states.
pub fn scalar_riemann(f: &ScalarFn, ul: f64, ur: f64) -> WaveFan {
    let map: StateMap = Arc::new(|u| State::Scalar { u });
    let waves = scalar_waves(f, ul, ur, Family::S, map);
    WaveFan::new(State::Scalar { u: ul }, State::Scalar { u: ur }, waves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::PolymerFluxParams;

    fn burgers() -> ScalarFn {
        ScalarFn::new(|u| 0.5 * u * u, |u| u, -2.0, 2.0)
    }

    fn bump() -> ScalarFn {
        // unimodal with maximum at 0.5
        ScalarFn::new(|s| s * (1.0 - s), |s| 1.0 - 2.0 * s, 0.0, 1.0)
    }

    #[test]
    fn critical_points_examples() {
        let sq = ScalarFn::new(|x| x * x, |x| 2.0 * x, -1.0, 1.0);
        assert_eq!(sq.critical_points(), &[0.0]);
        let lin = ScalarFn::new(|x| 3.0 * x, |_| 3.0, 0.0, 1.0);
        assert!(lin.critical_points().is_empty());
        let p = PolymerFluxParams::default();
        let g = p.shifted_ratio(0.3, 1.0, 0.0);
        let crit = g.critical_points();
        assert_eq!(crit.len(), 1);
        assert!(g.deriv(crit[0]).abs() <= 1e-10);
        // dense scan: maximum of f/s near the tangency point
        let best = (1..10000)
            .map(|i| i as f64 / 10000.0)
            .max_by(|a, b| g.eval(*a).total_cmp(&g.eval(*b)));
        assert!((best.unwrap() - crit[0]).abs() < 2e-4);
    }

    #[test]
    fn sharp_of_increasing_is_identity() {
        let g = ScalarFn::new(|x| x * x * x + x, |x| 3.0 * x * x + 1.0, 0.0, 1.0);
        let env = build_envelope(&g, 0.4, Direction::Sharp).unwrap();
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            assert!((env.eval(s) - g.eval(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn sharp_of_unimodal_saturates_at_max() {
        let g = bump();
        let env = build_envelope(&g, 0.2, Direction::Sharp).unwrap();
        assert_eq!(env.eval(0.35), g.eval(0.35));
        assert_eq!(env.eval(0.8), 0.25);
        assert_eq!(env.eval(0.2), g.eval(0.2));
    }

    #[test]
    fn flat_envelope_matches_brute_force() {
        let g = bump();
        for &anchor in &[0.2, 0.5, 0.9] {
            for dir in [Direction::Flat, Direction::Sharp] {
                let env = build_envelope(&g, anchor, dir).unwrap();
                let n = 10_000;
                let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
                for &s in grid.iter().step_by(37) {
                    let vals = grid
                        .iter()
                        .filter(|&&x| (x - s) * (x - anchor) <= 0.0 || x == s);
                    let vals: Vec<f64> = vals
                        .filter(|&&x| x >= s.min(anchor) && x <= s.max(anchor))
                        .map(|&x| g.eval(x))
                        .collect();
                    let want_max = (s >= anchor) == (dir == Direction::Sharp);
                    let brute = if want_max {
                        vals.iter().copied().fold(f64::MIN, f64::max).max(g.eval(s))
                    } else {
                        vals.iter().copied().fold(f64::MAX, f64::min).min(g.eval(s))
                    };
                    assert!((env.eval(s) - brute).abs() < 1e-6, "{anchor} {s} {dir:?}");
                }
            }
        }
        // Gb anchored left of the peak is constant to the right of the anchor
        let env = build_envelope(&g, 0.2, Direction::Flat).unwrap();
        assert_eq!(env.eval(0.6), g.eval(0.2));
    }

    #[test]
    fn anchor_outside_interval_is_domain_error() {
        assert!(matches!(
            build_envelope(&bump(), 1.5, Direction::Flat),
            Err(RiemannError::Domain(_))
        ));
    }

    #[test]
    fn minimum_jump_identity_data() {
        let g = bump();
        let p = minimum_jump(&g, &g, 0.3, 0.3).unwrap();
        assert_eq!((p.s_minus, p.s_plus), (0.3, 0.3));
        assert!((p.sigma - g.eval(0.3)).abs() < 1e-15);
    }

    #[test]
    fn minimum_jump_same_function() {
        let g = bump();
        for &(sl, sr) in &[(0.1, 0.7), (0.8, 0.3), (0.2, 0.9), (0.6, 0.55)] {
            let p = minimum_jump(&g, &g, sl, sr).unwrap();
            assert!((g.eval(p.s_minus) - p.sigma).abs() < 1e-9);
            assert!((g.eval(p.s_plus) - p.sigma).abs() < 1e-9);
            // brute force: Godunov-type crossing value
            let n = 10_000;
            let vals = (0..=n)
                .map(|i| sl + (sr - sl) * i as f64 / n as f64)
                .map(|x| g.eval(x));
            let want = if sl < sr {
                vals.fold(f64::MAX, f64::min)
            } else {
                vals.fold(f64::MIN, f64::max)
            };
            assert!((p.sigma - want).abs() < 1e-6, "{sl} {sr}");
        }
    }

    #[test]
    fn burgers_rarefaction_and_shock() {
        let f = burgers();
        assert!(scalar_riemann(&f, 0.3, 0.3).is_empty());
        let fan = scalar_riemann(&f, 0.0, 1.0);
        assert_eq!(fan.len(), 1);
        assert_eq!(fan.waves[0].kind, WaveKind::Rarefaction);
        assert!((fan.waves[0].speed.min() - 0.0).abs() < 1e-15);
        assert!((fan.waves[0].speed.max() - 1.0).abs() < 1e-15);
        let u = fan.state_at(0.5).scalar().unwrap();
        assert!((u - 0.5).abs() < 1e-12);
        let fan = scalar_riemann(&f, 1.0, 0.0);
        assert_eq!(fan.len(), 1);
        assert_eq!(fan.waves[0].kind, WaveKind::Shock);
        assert!((fan.waves[0].speed.min() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn buckley_leverett_is_rarefaction_then_shock() {
        let p = PolymerFluxParams::default();
        let f = p.s_flux(0.0, 1.0);
        let fan = scalar_riemann(&f, 1.0, 0.0);
        assert_eq!(fan.len(), 2);
        assert_eq!(fan.waves[0].kind, WaveKind::Rarefaction);
        assert_eq!(fan.waves[1].kind, WaveKind::Shock);
        // Welge tangency: shock speed equals f'(s*) = f(s*)/s*
        let ScalarPiece::Shock { from, speed, .. } = scalar_pieces(&f, 1.0, 0.0)[1] else {
            panic!()
        };
        assert!((f.deriv(from) - speed).abs() < 1e-10);
        assert!((f.eval(from) / from - speed).abs() < 1e-12);
        fan.validate(1e-12).unwrap();
    }

    #[test]
    fn oleinik_chord_condition_holds() {
        let p = PolymerFluxParams::with_gravity(3.0);
        let f = p.s_flux(0.4, 1.0);
        for &(ul, ur) in &[
            (0.05, 0.9),
            (0.9, 0.05),
            (0.3, 0.6),
            (0.7, 0.1),
            (0.0, 1.0),
            (1.0, 0.0),
        ] {
            for piece in scalar_pieces(&f, ul, ur) {
                if let ScalarPiece::Shock { from, to, speed } = piece {
                    for i in 1..100 {
                        let u = from + (to - from) * i as f64 / 100.0;
                        let chord = f.eval(from) + speed * (u - from);
                        // lower hull when increasing, upper hull when decreasing
                        let gap = if to > from {
                            f.eval(u) - chord
                        } else {
                            chord - f.eval(u)
                        };
                        assert!(gap >= -1e-9, "{ul} {ur} {u} {gap}");
                    }
                }
            }
        }
    }
}
