//! Flux families for the polymer-flooding and traffic systems.
//!
//! The polymer fractional flow uses quadratic Corey relative permeabilities
//! with the absolute permeability `k` scaling the water mobility:
//!
//! ```text
//! q(s,c,k) = k s^2 / (k s^2 + mu(c) (1-s)^2)
//! f(s,c,k) = q(s,c,k) - G s^2 (1-s)^2
//! ```
//!
//! `G` is the gravity number. With `G = 0` this is the S-shaped
//! Buckley-Leverett curve. With `G mu(c) > k` the flux dips below zero
//! near `s = 0` while keeping `f(1) = 1`, and the gravity term does not
//! depend on `c` or `k`, so `f_c < 0` and `f_k > 0` hold on the whole box.

use serde::{Deserialize, Serialize};

use crate::envelope::ScalarFn;
use crate::error::{Result, RiemannError};

/// Exponent of the Corey relative permeabilities.
pub const MOBILITY_EXPONENT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolymerFluxParams {
    /// Polynomial coefficients of the viscosity ratio, `mu(c) = sum a_i c^i`.
    pub viscosity_coeffs: Vec<f64>,
    /// Gravity number `G >= 0`; zero disables gravity.
    pub gravity_number: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl Default for PolymerFluxParams {
    fn default() -> Self {
        Self {
            viscosity_coeffs: vec![0.5, 0.5],
            gravity_number: 0.0,
            k_min: 0.05,
            k_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdsorptionParams {
    /// Langmuir coefficient of `m(c) = kappa c / (1 + kappa c)`.
    pub kappa: f64,
}

impl Default for AdsorptionParams {
    fn default() -> Self {
        Self { kappa: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrafficParams {
    /// Pressure exponent, `1 < gamma < 2`.
    pub gamma: f64,
}

impl Default for TrafficParams {
    fn default() -> Self {
        Self { gamma: 1.5 }
    }
}

/// A concrete flux family tagged by model variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FluxModel {
    PolymerPlain {
        flux: PolymerFluxParams,
    },
    PolymerAdsorption {
        flux: PolymerFluxParams,
        adsorption: AdsorptionParams,
    },
    PolymerGravity {
        flux: PolymerFluxParams,
    },
    Traffic {
        traffic: TrafficParams,
    },
}

impl FluxModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            FluxModel::PolymerPlain { flux } => {
                flux.validate()?;
                if flux.gravity_number != 0.0 {
                    return Err(RiemannError::Domain(
                        "plain polymer model requires gravity_number = 0".into(),
                    ));
                }
                Ok(())
            }
            FluxModel::PolymerAdsorption { flux, adsorption } => {
                flux.validate()?;
                adsorption.validate()?;
                if flux.gravity_number != 0.0 {
                    return Err(RiemannError::Domain(
                        "adsorption model requires gravity_number = 0".into(),
                    ));
                }
                Ok(())
            }
            FluxModel::PolymerGravity { flux } => flux.validate(),
            FluxModel::Traffic { traffic } => traffic.validate(),
        }
    }

    pub fn polymer(&self) -> Option<&PolymerFluxParams> {
        match self {
            FluxModel::PolymerPlain { flux }
            | FluxModel::PolymerAdsorption { flux, .. }
            | FluxModel::PolymerGravity { flux } => Some(flux),
            FluxModel::Traffic { .. } => None,
        }
    }

    pub fn adsorption(&self) -> Option<&AdsorptionParams> {
        match self {
            FluxModel::PolymerAdsorption { adsorption, .. } => Some(adsorption),
            _ => None,
        }
    }

    pub fn traffic(&self) -> Option<&TrafficParams> {
        match self {
            FluxModel::Traffic { traffic } => Some(traffic),
            _ => None,
        }
    }
}

impl PolymerFluxParams {
    pub fn with_gravity(gravity_number: f64) -> Self {
        Self {
            gravity_number,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.viscosity_coeffs.is_empty() {
            return Err(RiemannError::Domain(
                "viscosity_coeffs must be non-empty".into(),
            ));
        }
        if !(self.k_min > 0.0 && self.k_max > self.k_min) {
            return Err(RiemannError::Domain(format!(
                "need 0 < k_min < k_max, got [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if !(self.gravity_number >= 0.0 && self.gravity_number.is_finite()) {
            return Err(RiemannError::Domain(
                "gravity_number must be finite and >= 0".into(),
            ));
        }
        for i in 0..=64 {
            let c = i as f64 / 64.0;
            if self.mu(c) <= 0.0 || self.mu_dc(c) <= 0.0 {
                return Err(RiemannError::Domain(format!(
                    "mu(c) and mu'(c) must be positive on [0,1]; fails at c = {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn mu(&self, c: f64) -> f64 {
        self.viscosity_coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * c + a)
    }

    pub fn mu_dc(&self, c: f64) -> f64 {
        self.viscosity_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, a)| acc * c + i as f64 * a)
    }

    pub fn check_state(&self, s: f64, c: f64, k: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&c) {
            return Err(RiemannError::Domain(format!(
                "(s, c) = ({s}, {c}) outside [0,1]^2"
            )));
        }
        if !(k >= self.k_min && k <= self.k_max) {
            return Err(RiemannError::Domain(format!(
                "k = {k} outside [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }

    fn denom(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        k * s * s + self.mu(c) * o * o
    }

    /// Fractional flow `f(s,c,k)`, unchecked.
    pub fn f(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        k * s * s / self.denom(s, c, k) - self.gravity_number * s * s * o * o
    }

    pub fn f_s(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        let d = self.denom(s, c, k);
        2.0 * k * self.mu(c) * s * o / (d * d) - 2.0 * self.gravity_number * s * o * (1.0 - 2.0 * s)
    }

    pub fn f_c(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        let d = self.denom(s, c, k);
        -k * s * s * o * o * self.mu_dc(c) / (d * d)
    }

    pub fn f_k(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        let d = self.denom(s, c, k);
        s * s * o * o * self.mu(c) / (d * d)
    }

    /// `f/s`, extended continuously by 0 at `s = 0`.
    pub fn f_over_s(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        k * s / self.denom(s, c, k) - self.gravity_number * s * o * o
    }

    pub fn f_over_s_ds(&self, s: f64, c: f64, k: f64) -> f64 {
        let o = 1.0 - s;
        let d = self.denom(s, c, k);
        let dd = 2.0 * k * s - 2.0 * self.mu(c) * o;
        k * (d - s * dd) / (d * d) - self.gravity_number * (o * o - 2.0 * s * o)
    }

    /// `s -> f(s,c,k)` on `[0,1]`.
    pub fn s_flux(&self, c: f64, k: f64) -> ScalarFn {
        let (p, q) = (self.clone(), self.clone());
        ScalarFn::new(move |s| p.f(s, c, k), move |s| q.f_s(s, c, k), 0.0, 1.0)
    }

    /// `s -> f(s,c,k)/(s + a)`; `a = 0` gives the c-wave speed function `f/s`.
    pub fn shifted_ratio(&self, c: f64, k: f64, a: f64) -> ScalarFn {
        let (p, q) = (self.clone(), self.clone());
        if a == 0.0 {
            ScalarFn::new(
                move |s| p.f_over_s(s, c, k),
                move |s| q.f_over_s_ds(s, c, k),
                0.0,
                1.0,
            )
        } else {
            ScalarFn::new(
                move |s| p.f(s, c, k) / (s + a),
                move |s| {
                    let d = s + a;
                    (q.f_s(s, c, k) * d - q.f(s, c, k)) / (d * d)
                },
                0.0,
                1.0,
            )
        }
    }

    /// Checks the single-dip shape the gravity trace-set construction needs:
    /// `f < 0` just right of 0, one interior minimum, one positive zero.
    pub fn check_gravity_shape(&self, c: f64, k: f64) -> Result<()> {
        let flux = self.s_flux(c, k);
        let crit = flux.critical_points();
        let zero = self.positive_zero(c, k);
        if crit.len() != 1 || zero.is_none() || self.f(crit[0], c, k) >= 0.0 {
            return Err(RiemannError::Shape(format!(
                "gravity flux at (c, k) = ({c}, {k}) is not single-dip \
                 (critical points {crit:?}, zero {zero:?}); need G mu(c) > k and k < 4 min mu"
            )));
        }
        Ok(())
    }

    /// The unique `s0 in (0,1)` with `f(s0,c,k) = 0`, if the flux dips.
    pub fn positive_zero(&self, c: f64, k: f64) -> Option<f64> {
        // sign(f) = sign(k - G (1-s)^2 D(s)) away from s = 0
        let h = |s: f64| {
            let o = 1.0 - s;
            k - self.gravity_number * o * o * self.denom(s, c, k)
        };
        if h(0.0) >= 0.0 {
            return None;
        }
        crate::numerics::bisect(h, 0.0, 1.0, 1e-15)
    }
}

/// Fractional flow with domain checks.
pub fn polymer_flux(s: f64, c: f64, k: f64, params: &PolymerFluxParams) -> Result<f64> {
    params.check_state(s, c, k)?;
    Ok(params.f(s, c, k))
}

/// Analytic `df/ds` with domain checks.
pub fn polymer_flux_ds(s: f64, c: f64, k: f64, params: &PolymerFluxParams) -> Result<f64> {
    params.check_state(s, c, k)?;
    Ok(params.f_s(s, c, k))
}

impl AdsorptionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(RiemannError::Domain(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn m(&self, c: f64) -> f64 {
        self.kappa * c / (1.0 + self.kappa * c)
    }

    pub fn m_dc(&self, c: f64) -> f64 {
        let d = 1.0 + self.kappa * c;
        self.kappa / (d * d)
    }

    pub fn m_dcc(&self, c: f64) -> f64 {
        let d = 1.0 + self.kappa * c;
        -2.0 * self.kappa * self.kappa / (d * d * d)
    }

    /// Secant slope of `m` between two concentrations (`m'` when they coincide).
    pub fn secant(&self, c1: f64, c2: f64) -> f64 {
        if c1 == c2 {
            self.m_dc(c1)
        } else {
            (self.m(c1) - self.m(c2)) / (c1 - c2)
        }
    }
}

/// `(m, m', m'')` of the Langmuir adsorption isotherm.
pub fn adsorption(c: f64, params: &AdsorptionParams) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&c) {
        return Err(RiemannError::Domain(format!("c = {c} outside [0,1]")));
    }
    Ok((params.m(c), params.m_dc(c), params.m_dcc(c)))
}

impl TrafficParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma < 2.0) {
            return Err(RiemannError::Domain(format!(
                "gamma must lie in (1,2), got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// `w = v + k rho^gamma`.
    pub fn w(&self, rho: f64, v: f64, k: f64) -> f64 {
        v + k * rho.powf(self.gamma)
    }

    /// Density on the level set `w` at velocity `v` (requires `w >= v`).
    pub fn rho_from(&self, w: f64, v: f64, k: f64) -> f64 {
        let p = (w - v) / k;
        if p <= 0.0 {
            0.0
        } else {
            p.powf(1.0 / self.gamma)
        }
    }

    /// Eigenvalue of the v family, `v - gamma k rho^gamma`.
    pub fn lambda_v(&self, rho: f64, v: f64, k: f64) -> f64 {
        v - self.gamma * k * rho.powf(self.gamma)
    }

    /// `rho (w - k rho^gamma)` as a function of `rho` on `[0, rho_max]`.
    pub fn density_flux(&self, w: f64, k: f64, rho_max: f64) -> ScalarFn {
        let g = self.gamma;
        ScalarFn::new(
            move |r| traffic_flux(r, w, k, g),
            move |r| w - (g + 1.0) * k * r.max(0.0).powf(g),
            0.0,
            rho_max,
        )
    }
}

/// Traffic flux `rho v` with `v = w - k rho^gamma`.
pub fn traffic_flux(rho: f64, w: f64, k: f64, gamma: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    rho * (w - k * rho.powf(gamma))
}
