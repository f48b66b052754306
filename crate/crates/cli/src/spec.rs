//! Problem files: the JSON accepted by every verb.

use std::path::Path;

use riemann_core::simulate::{PiecewiseConstant, ViscousConfig};
use riemann_core::{
    AdsorptionParams, DecouplingGrid, FluxModel, ModelKind, PolymerFluxParams, PolymerState, State,
    TrafficParams, TrafficState,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Tolerance of the invariant suite when neither the file nor `--tol` sets one.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub model: ModelKind,
    #[serde(default)]
    pub params: Params,
    pub problem: Problem,
    #[serde(default)]
    pub output: OutputRequest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Settings of the reference run used by `compare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSettings>,
}

/// Model parameters; omitted groups take their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<PolymerFluxParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adsorption: Option<AdsorptionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficParams>,
}

/// A state as written in a problem file; which fields apply depends on the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Polymer(PolymerFields),
    Traffic(TrafficFields),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolymerFields {
    pub s: f64,
    pub c: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficFields {
    pub rho: f64,
    pub v: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Problem {
    Riemann { left: StateSpec, right: StateSpec },
    Cauchy(CauchyProblem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyProblem {
    pub breakpoints: Vec<f64>,
    pub states: Vec<StateSpec>,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub method: Method,
    /// Rarefaction chop of front tracking.
    #[serde(default = "default_eps_frac")]
    pub eps_frac: f64,
    /// Grid of the viscous method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscous: Option<ViscousGrid>,
}

fn default_eps_frac() -> f64 {
    riemann_core::simulate::DEFAULT_EPS_FRAC
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FrontTracking,
    Viscous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscousGrid {
    pub eps: f64,
    pub cells: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for ViscousGrid {
    fn default() -> Self {
        Self {
            eps: 2e-3,
            cells: 4096,
            x_min: -4.0,
            x_max: 4.0,
        }
    }
}

impl ViscousGrid {
    pub fn config(&self, t_end: f64) -> ViscousConfig {
        ViscousConfig {
            eps: self.eps,
            cells: self.cells,
            x_min: self.x_min,
            x_max: self.x_max,
            t_end,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSettings {
    #[serde(default)]
    pub grid: ViscousGrid,
    /// Time of comparison for Riemann problems; Cauchy problems use `T`.
    #[serde(default = "one")]
    pub t: f64,
    /// Largest accepted L1 distance of the primary variable.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            grid: ViscousGrid::default(),
            t: 1.0,
            threshold: default_threshold(),
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_threshold() -> f64 {
    0.05
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRequest {
    /// Write the wave fan document; on by default for Riemann problems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoupling_report: Option<DecouplingRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRequest {
    pub t: f64,
    pub xs: Points,
}

/// Sample points: an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

impl Points {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Points::List(xs) => xs.clone(),
            Points::Range { min, max, count: 1 } => vec![0.5 * (min + max)],
            Points::Range { min, max, count } => (0..*count)
                .map(|i| min + (max - min) * i as f64 / (*count - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecouplingRequest {
    Enabled(bool),
    Grid(DecouplingGrid),
}

impl DecouplingRequest {
    pub fn grid(&self) -> Option<DecouplingGrid> {
        match self {
            DecouplingRequest::Enabled(true) => Some(DecouplingGrid::default()),
            DecouplingRequest::Enabled(false) => None,
            DecouplingRequest::Grid(g) => Some(*g),
        }
    }
}

/// Reads and checks a problem file. Schema errors carry the line, column and
/// field path of the offending value.
pub fn load(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ProblemSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ProblemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        CliError::Input(format!(
            "line {} column {}, field `{}`: {}",
            inner.line(),
            inner.column(),
            e.path(),
            inner
        ))
    })?;
    spec.check()?;
    Ok(spec)
}

impl ProblemSpec {
    pub fn riemann(model: ModelKind, left: StateSpec, right: StateSpec) -> Self {
        Self {
            model,
            params: Params::default(),
            problem: Problem::Riemann { left, right },
            output: OutputRequest::default(),
            seed: None,
            tol: None,
            compare: None,
        }
    }

    /// The flux model with defaults filled in.
    pub fn flux_model(&self) -> Result<FluxModel, CliError> {
        let p = &self.params;
        let traffic_only = p.flux.is_some() || p.adsorption.is_some();
        let model = match self.model {
            ModelKind::Traffic if traffic_only => {
                return Err(CliError::Input(
                    "field `params`: traffic takes only `traffic` parameters".into(),
                ));
            }
            _ if self.model != ModelKind::Traffic && p.traffic.is_some() => {
                return Err(CliError::Input(
                    "field `params.traffic`: only valid for the traffic model".into(),
                ));
            }
            _ if self.model != ModelKind::PolymerAdsorption && p.adsorption.is_some() => {
                return Err(CliError::Input(
                    "field `params.adsorption`: only valid for the polymer_adsorption model".into(),
                ));
            }
            ModelKind::Polymer => FluxModel::PolymerPlain {
                flux: p.flux.clone().unwrap_or_default(),
            },
            ModelKind::PolymerAdsorption => FluxModel::PolymerAdsorption {
                flux: p.flux.clone().unwrap_or_default(),
                adsorption: p.adsorption.unwrap_or_default(),
            },
            ModelKind::PolymerGravity => {
                let flux = p
                    .flux
                    .clone()
                    .unwrap_or_else(|| PolymerFluxParams::with_gravity(4.0));
                FluxModel::PolymerGravity { flux }
            }
            ModelKind::Traffic => FluxModel::Traffic {
                traffic: p.traffic.unwrap_or_default(),
            },
        };
        model
            .validate()
            .map_err(|e| CliError::Input(format!("field `params`: {e}")))?;
        Ok(model)
    }

    pub fn state(&self, s: &StateSpec, field: &str) -> Result<State, CliError> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match (self.model, s) {
            (ModelKind::Traffic, StateSpec::Traffic(t)) if finite(&[t.rho, t.v, t.k]) => {
                if t.rho < 0.0 || t.v < 0.0 || t.k <= 0.0 {
                    return Err(CliError::Input(format!(
                        "field `{field}`: need rho >= 0, v >= 0, k > 0"
                    )));
                }
                Ok(State::Traffic(TrafficState::new(t.rho, t.v, t.k)))
            }
            (ModelKind::Traffic, _) => Err(CliError::Input(format!(
                "field `{field}`: expected finite {{rho, v, k}}"
            ))),
            (_, StateSpec::Polymer(p)) if finite(&[p.s, p.c, p.k]) => {
                let flux = self.flux_model()?;
                let st = PolymerState::new(p.s, p.c, p.k);
                flux.polymer()
                    .map(|f| f.check_state(st.s, st.c, st.k))
                    .transpose()
                    .map_err(|e| CliError::Input(format!("field `{field}`: {e}")))?;
                Ok(State::Polymer(st))
            }
            _ => Err(CliError::Input(format!(
                "field `{field}`: expected finite {{s, c, k}}"
            ))),
        }
    }

    /// Left and right states of a Riemann problem.
    pub fn riemann_states(&self) -> Result<(State, State), CliError> {
        match &self.problem {
            Problem::Riemann { left, right } => Ok((
                self.state(left, "problem.riemann.left")?,
                self.state(right, "problem.riemann.right")?,
            )),
            Problem::Cauchy(_) => Err(CliError::Input(
                "field `problem`: expected a riemann problem".into(),
            )),
        }
    }

    pub fn cauchy_data(&self) -> Result<(&CauchyProblem, PiecewiseConstant), CliError> {
        let Problem::Cauchy(c) = &self.problem else {
            return Err(CliError::Input(
                "field `problem`: expected a cauchy problem".into(),
            ));
        };
        let states = c
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| self.state(s, &format!("problem.cauchy.states[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let data = PiecewiseConstant::new(c.breakpoints.clone(), states)
            .map_err(|e| CliError::Input(format!("field `problem.cauchy`: {e}")))?;
        Ok((c, data))
    }

    /// Checks that go beyond the schema.
    fn check(&self) -> Result<(), CliError> {
        self.flux_model()?;
        match &self.problem {
            Problem::Riemann { .. } => {
                self.riemann_states()?;
            }
            Problem::Cauchy(c) => {
                if c.method == Method::FrontTracking && self.model != ModelKind::Traffic {
                    return Err(CliError::Input(
                        "field `problem.cauchy.method`: front_tracking is only available for traffic".into(),
                    ));
                }
                if !(c.t_end >= 0.0 && c.t_end.is_finite()) {
                    return Err(CliError::Input(
                        "field `problem.cauchy.T`: must be finite and >= 0".into(),
                    ));
                }
                if c.eps_frac.is_nan() || c.eps_frac <= 0.0 {
                    return Err(CliError::Input(
                        "field `problem.cauchy.eps_frac`: must be positive".into(),
                    ));
                }
                self.cauchy_data()?;
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Input("field `tol`: must be positive".into()));
            }
        }
        if let Some(p) = &self.output.profile {
            if !(p.t > 0.0 && p.t.is_finite()) {
                return Err(CliError::Input(
                    "field `output.profile.t`: must be positive".into(),
                ));
            }
            if p.xs.values().iter().any(|x| !x.is_finite()) {
                return Err(CliError::Input(
                    "field `output.profile.xs`: must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}
