use serde::{Deserialize, Serialize};

use crate::error::{Result, RiemannError};
use crate::fan::{State, WaveFan};

/// Evaluates the self-similar solution at time `t` on the points `xs`.
pub fn sample_fan(fan: &WaveFan, t: f64, xs: &[f64]) -> Vec<State> {
    xs.iter().map(|&x| fan.sample(t, x)).collect()
}

/// Cell centers of a uniform grid with `cells` cells on `[a, b]`.
pub fn uniform_centers(a: f64, b: f64, cells: usize) -> Vec<f64> {
    let dx = (b - a) / cells as f64;
    (0..cells).map(|i| a + (i as f64 + 0.5) * dx).collect()
}

/// The variable compared by default: `u`, `s` or `rho`.
pub fn primary(state: &State) -> f64 {
    match state {
        State::Scalar { u } => *u,
        State::Polymer(p) => p.s,
        State::Traffic(t) => t.rho,
    }
}

/// Discrete L1 distance of the primary variable with cell width `dx`.
pub fn l1_primary(a: &[State], b: &[State], dx: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (primary(p) - primary(q)).abs())
        .sum::<f64>()
        * dx
}

/// Discrete L1 distance of every state component.
pub fn l1_distance(a: &[State], b: &[State], dx: f64) -> Vec<f64> {
    let n = a.first().map_or(0, |s| s.components().len());
    let mut out = vec![0.0; n];
    for (p, q) in a.iter().zip(b) {
        for (o, (x, y)) in out
            .iter_mut()
            .zip(p.components().into_iter().zip(q.components()))
        {
            *o += (x - y).abs() * dx;
        }
    }
    out
}

/// Piecewise-constant data: `states[i]` lives on `(breaks[i-1], breaks[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    pub breaks: Vec<f64>,
    pub states: Vec<State>,
}

impl PiecewiseConstant {
    pub fn new(breaks: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if states.len() != breaks.len() + 1 {
            return Err(RiemannError::Domain(format!(
                "{} breakpoints need {} states, got {}",
                breaks.len(),
                breaks.len() + 1,
                states.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(RiemannError::Domain(
                "breakpoints must be finite and increasing".into(),
            ));
        }
        Ok(Self { breaks, states })
    }

    pub fn riemann(left: State, right: State) -> Self {
        Self {
            breaks: vec![0.0],
            states: vec![left, right],
        }
    }

    /// Value at `x`; at a breakpoint the left state.
    pub fn at(&self, x: f64) -> State {
        let i = self.breaks.partition_point(|&b| b < x);
        self.states[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{scalar_riemann, ScalarFn};

    #[test]
    fn empty_fan_is_left_state() {
        let st = State::Scalar { u: 0.3 };
        let out = sample_fan(&WaveFan::empty(st), 1.0, &[-1.0, 0.0, 2.0]);
        assert!(out.iter().all(|s| *s == st));
    }

    #[test]
    fn burgers_rarefaction_midpoint() {
        let f = ScalarFn::new(|u| 0.5 * u * u, |u| u, -2.0, 2.0);
        let fan = scalar_riemann(&f, 0.0, 1.0);
        let u = sample_fan(&fan, 2.0, &[1.0])[0].scalar().unwrap();
        assert!((u - 0.5).abs() < 1e-9);
    }

    #[test]
    fn piecewise_lookup() {
        let d = PiecewiseConstant::new(
            vec![0.0, 1.0],
            vec![
                State::Scalar { u: 1.0 },
                State::Scalar { u: 2.0 },
                State::Scalar { u: 3.0 },
            ],
        )
        .unwrap();
        assert_eq!(d.at(-1.0).scalar(), Some(1.0));
        assert_eq!(d.at(0.0).scalar(), Some(1.0));
        assert_eq!(d.at(0.5).scalar(), Some(2.0));
        assert_eq!(d.at(3.0).scalar(), Some(3.0));
        assert!(PiecewiseConstant::new(vec![1.0, 0.0], vec![d.states[0]; 3]).is_err());
    }
}
