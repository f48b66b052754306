//! The four verbs.

use std::path::{Path, PathBuf};

use log::info;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemann_core::simulate::{
    front_tracking, l1_distance, l1_primary, sample_fan, viscous_solve, FrontRun,
    FrontTrackingConfig, PiecewiseConstant, ViscousRun,
};
use riemann_core::{
    check_fan, random_riemann, solve_riemann, verify_decoupling, Chart, DecouplingGrid,
    DecouplingReport, FluxModel, InvariantReport, ModelKind, PathOrder, PotentialField,
    RiemannError, State, TrafficState2, WaveFan,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::artifacts::{self, write_atomic, write_json};
use crate::document::FanDocument;
use crate::error::CliError;
use crate::spec::{CauchyProblem, CompareSettings, Method, Points, ProblemSpec, DEFAULT_TOL};

/// Agreement required of the two potential paths and of the decoupled values.
pub const DECOUPLING_TOL: f64 = 1e-6;

/// Problems drawn by `validate` when a seed is given.
pub const DEFAULT_SWEEP: usize = 100;

/// Shared command-line settings.
#[derive(Debug, Clone)]
pub struct Options {
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub count: usize,
}

impl Options {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            tol: None,
            seed: None,
            count: DEFAULT_SWEEP,
        }
    }

    fn tol(&self, spec: &ProblemSpec) -> f64 {
        self.tol.or(spec.tol).unwrap_or(DEFAULT_TOL)
    }
}

/// Paths of the files a command wrote, in order.
pub type Written = Vec<PathBuf>;

fn solve_fan(model: &FluxModel, l: State, r: State) -> Result<WaveFan, CliError> {
    solve_riemann(model, l, r)
        .map_err(|e| CliError::from_solver(e, json!({ "model": model, "left": l, "right": r })))
}

/// Fails with the document attached when the invariant suite does not pass.
fn require_passing(doc: &FanDocument, tol: f64, out: &Path) -> Result<(), CliError> {
    if doc.residuals.passes(tol) {
        return Ok(());
    }
    write_json(out, artifacts::FAILURE_FILE, doc)?;
    Err(CliError::Solver {
        message: format!(
            "invariant suite failed at tolerance {tol}: {:?}",
            doc.residuals
        ),
        state: serde_json::to_value(doc).unwrap_or_default(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingDocument {
    pub grid: DecouplingGrid,
    pub report: DecouplingReport,
    /// Largest gap between the two integration paths of the potential.
    pub potential_path_gap: f64,
}

fn decoupling(
    model: &FluxModel,
    fan: &WaveFan,
    grid: DecouplingGrid,
) -> Result<DecouplingDocument, CliError> {
    let degenerate = |e: RiemannError| match e {
        RiemannError::Degenerate(m) => CliError::Input(format!(
            "decoupling report needs a solution without vacuum: {m}"
        )),
        e => CliError::from_solver(e, json!({ "grid": grid })),
    };
    let report = verify_decoupling(fan, model, grid).map_err(degenerate)?;
    let field = PotentialField::new(fan, model).with_chart(Chart::Original);
    let mut gap: f64 = 0.0;
    for i in 1..=4 {
        let t = grid.t_max * i as f64 / 4.0;
        for j in 0..=4 {
            let x = grid.x_min + (grid.x_max - grid.x_min) * j as f64 / 4.0;
            let a = field.phi(t, x, PathOrder::XFirst).map_err(degenerate)?;
            let b = field.phi(t, x, PathOrder::TFirst).map_err(degenerate)?;
            gap = gap.max((a - b).abs());
        }
    }
    Ok(DecouplingDocument {
        grid,
        report,
        potential_path_gap: gap,
    })
}

fn profile_rows(t: f64, xs: &[f64], states: &[State]) -> Vec<(f64, f64, State)> {
    xs.iter().zip(states).map(|(&x, &s)| (t, x, s)).collect()
}

/// `solve`: exact Riemann solution, fan document and requested samples.
pub fn solve(spec: &ProblemSpec, opts: &Options) -> Result<Written, CliError> {
    let model = spec.flux_model()?;
    let (l, r) = spec.riemann_states()?;
    let tol = opts.tol(spec);
    let fan = solve_fan(&model, l, r)?;
    let doc = FanDocument::new(&model, &fan, tol);
    require_passing(&doc, tol, &opts.out)?;
    let mut written = Vec::new();
    if spec.output.fan != Some(false) {
        written.push(write_json(&opts.out, artifacts::FAN_FILE, &doc)?);
    }
    if let Some(p) = &spec.output.profile {
        let xs = p.xs.values();
        let csv = artifacts::profile_csv(&profile_rows(p.t, &xs, &sample_fan(&fan, p.t, &xs)));
        written.push(write_atomic(
            &opts.out,
            artifacts::PROFILE_FILE,
            csv.as_bytes(),
        )?);
    }
    if let Some(grid) = spec.output.decoupling_report.and_then(|d| d.grid()) {
        written.push(write_json(
            &opts.out,
            artifacts::DECOUPLING_FILE,
            &decoupling(&model, &fan, grid)?,
        )?);
    }
    info!("{} waves, cases {:?}", doc.waves.len(), doc.cases);
    Ok(written)
}

/// Riemann invariants of traffic data at one common `k`.
fn traffic_data(
    model: &FluxModel,
    data: &PiecewiseConstant,
) -> Result<(f64, Vec<TrafficState2>), CliError> {
    let gamma = model.traffic().map(|t| t.gamma).unwrap_or_default();
    let states: Vec<_> = data.states.iter().filter_map(|s| s.traffic()).collect();
    let k = states.first().map(|s| s.k).unwrap_or(1.0);
    if states.len() != data.states.len() || states.iter().any(|s| s.k != k) {
        return Err(CliError::Input(
            "field `problem.cauchy.states`: front tracking needs traffic states with one common k"
                .into(),
        ));
    }
    Ok((
        k,
        states
            .iter()
            .map(|s| TrafficState2::new(s.w(gamma), s.v))
            .collect(),
    ))
}

fn run_front_tracking(
    model: &FluxModel,
    c: &CauchyProblem,
    data: &PiecewiseConstant,
) -> Result<FrontRun, CliError> {
    let (k, states) = traffic_data(model, data)?;
    let traffic = *model
        .traffic()
        .expect("front tracking is checked to be traffic");
    let config = FrontTrackingConfig {
        k,
        traffic,
        eps_frac: c.eps_frac,
        t_end: c.t_end,
    };
    front_tracking(&data.breaks, &states, config).map_err(|e| {
        CliError::from_solver(e, json!({ "breakpoints": data.breaks, "config": config }))
    })
}

fn run_viscous(
    model: &FluxModel,
    data: &PiecewiseConstant,
    grid: crate::spec::ViscousGrid,
    t: f64,
) -> Result<ViscousRun, CliError> {
    viscous_solve(&model.clone().into(), data, &grid.config(t))
        .map_err(|e| CliError::from_solver(e, json!({ "grid": grid, "t": t })))
}

/// Checks of a front-tracking run: strength never grows and the front count stays bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontChecks {
    pub events: usize,
    pub strength_increases: usize,
    pub initial_front_count: usize,
    pub rarefaction_pieces: usize,
    pub max_front_count: usize,
    pub initial_strength: f64,
    pub final_strength: f64,
}

impl FrontChecks {
    pub fn of(run: &FrontRun) -> Self {
        use riemann_core::simulate::FrontFamily;
        let mut prev = run.initial.total_strength;
        let mut increases = 0;
        for e in &run.events {
            if e.total_strength > prev + 1e-12 || e.strength_out > e.strength_in + 1e-12 {
                increases += 1;
            }
            prev = e.total_strength;
        }
        let pieces = run
            .initial
            .fronts
            .iter()
            .filter(|f| {
                f.family == FrontFamily::Vacuum
                    || (f.family == FrontFamily::V && f.right.v > f.left.v)
            })
            .count();
        Self {
            events: run.events.len(),
            strength_increases: increases,
            initial_front_count: run.initial_front_count,
            rarefaction_pieces: pieces,
            max_front_count: run.max_front_count,
            initial_strength: run.initial.total_strength,
            final_strength: run.final_state.total_strength,
        }
    }

    pub fn passes(&self) -> bool {
        self.strength_increases == 0
            && self.max_front_count <= self.initial_front_count + self.rarefaction_pieces
    }
}

fn default_points(c: &CauchyProblem, data: &PiecewiseConstant) -> Points {
    let reach = data
        .states
        .iter()
        .flat_map(|s| s.components())
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let lo = data.breaks.first().copied().unwrap_or(0.0) - 1.0 - c.t_end * reach;
    let hi = data.breaks.last().copied().unwrap_or(0.0) + 1.0 + c.t_end * reach;
    Points::Range {
        min: lo,
        max: hi,
        count: 401,
    }
}

/// `simulate`: Cauchy problem by front tracking or the viscous solver.
pub fn simulate(spec: &ProblemSpec, opts: &Options) -> Result<Written, CliError> {
    let model = spec.flux_model()?;
    let (c, data) = spec.cauchy_data()?;
    if let Some(p) = &spec.output.profile {
        if p.t != c.t_end {
            return Err(CliError::Input(
                "field `output.profile.t`: simulations sample at `T` only".into(),
            ));
        }
    }
    let mut written = Vec::new();
    match c.method {
        Method::FrontTracking => {
            let run = run_front_tracking(&model, c, &data)?;
            let checks = FrontChecks::of(&run);
            written.push(write_atomic(
                &opts.out,
                artifacts::EVENTS_FILE,
                artifacts::events_csv(&run.events).as_bytes(),
            )?);
            if !checks.passes() {
                write_json(&opts.out, artifacts::FAILURE_FILE, &checks)?;
                return Err(CliError::Solver {
                    message: format!("front tracking checks failed: {checks:?}"),
                    state: serde_json::to_value(checks).unwrap_or_default(),
                });
            }
            let xs = spec
                .output
                .profile
                .as_ref()
                .map_or_else(|| default_points(c, &data), |p| p.xs.clone())
                .values();
            let csv = artifacts::profile_csv(&profile_rows(c.t_end, &xs, &run.sample(&xs)));
            written.push(write_atomic(
                &opts.out,
                artifacts::PROFILE_FILE,
                csv.as_bytes(),
            )?);
            info!(
                "{} interactions, strength {} -> {}",
                checks.events, checks.initial_strength, checks.final_strength
            );
        }
        Method::Viscous => {
            let run = run_viscous(&model, &data, c.viscous.unwrap_or_default(), c.t_end)?;
            let xs = match &spec.output.profile {
                Some(p) => p.xs.values(),
                None => run.centers(),
            };
            let states: Vec<State> = xs.iter().map(|&x| cell_state(&run, x)).collect();
            let csv = artifacts::profile_csv(&profile_rows(c.t_end, &xs, &states));
            written.push(write_atomic(
                &opts.out,
                artifacts::PROFILE_FILE,
                csv.as_bytes(),
            )?);
            info!(
                "{} steps, eps_eff {}, balance defect {:e}",
                run.steps, run.eps_eff, run.max_conservation_residual
            );
        }
    }
    Ok(written)
}

/// State of the cell containing `x`, clamped to the grid.
fn cell_state(run: &ViscousRun, x: f64) -> State {
    let i = ((x - run.x_min) / run.dx)
        .floor()
        .clamp(0.0, (run.cells - 1) as f64) as usize;
    run.states[i]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    /// `riemann_fan` or `front_tracking`, compared against `viscous`.
    pub source: String,
    pub t: f64,
    pub settings: CompareSettings,
    pub variables: Vec<String>,
    /// L1 distance per variable on the viscous grid.
    pub distances: Vec<f64>,
    /// L1 distance of the primary variable, the one held to the threshold.
    pub primary_distance: f64,
    pub pass: bool,
}

/// `compare`: exact or front-tracking solution against the viscous oracle.
pub fn compare(spec: &ProblemSpec, opts: &Options) -> Result<Written, CliError> {
    let model = spec.flux_model()?;
    let settings = spec.compare.clone().unwrap_or_default();
    let (source, t, data) = match &spec.problem {
        crate::spec::Problem::Riemann { .. } => {
            let (l, r) = spec.riemann_states()?;
            ("riemann_fan", settings.t, PiecewiseConstant::riemann(l, r))
        }
        crate::spec::Problem::Cauchy(c) if c.method == Method::FrontTracking => {
            ("front_tracking", c.t_end, spec.cauchy_data()?.1)
        }
        crate::spec::Problem::Cauchy(_) => {
            return Err(CliError::Input(
                "field `problem.cauchy.method`: compare needs front_tracking or a riemann problem"
                    .into(),
            ));
        }
    };
    let (exact, viscous) = std::thread::scope(|scope| {
        let viscous = scope.spawn(|| run_viscous(&model, &data, settings.grid, t));
        let exact = match &spec.problem {
            crate::spec::Problem::Cauchy(c) => {
                run_front_tracking(&model, c, &data).map(Sampled::Front)
            }
            crate::spec::Problem::Riemann { .. } => {
                solve_fan(&model, data.states[0], data.states[1]).map(Sampled::Fan)
            }
        };
        (exact, viscous.join().expect("viscous worker panicked"))
    });
    let (exact, viscous) = (exact?, viscous?);
    let xs = viscous.centers();
    let states = match &exact {
        Sampled::Fan(fan) => sample_fan(fan, t, &xs),
        Sampled::Front(run) => run.sample(&xs),
    };
    let primary_distance = l1_primary(&states, &viscous.states, viscous.dx);
    let report = CompareReport {
        source: source.into(),
        t,
        variables: artifacts::state_fields(&viscous.states[0])
            .iter()
            .map(|s| s.to_string())
            .collect(),
        distances: l1_distance(&states, &viscous.states, viscous.dx),
        primary_distance,
        pass: primary_distance <= settings.threshold,
        settings,
    };
    let path = write_json(&opts.out, artifacts::COMPARE_FILE, &report)?;
    if !report.pass {
        return Err(CliError::Solver {
            message: format!(
                "L1 distance {primary_distance} above threshold {}",
                report.settings.threshold
            ),
            state: serde_json::to_value(&report).unwrap_or_default(),
        });
    }
    Ok(vec![path])
}

enum Sampled {
    Fan(WaveFan),
    Front(FrontRun),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub model: ModelKind,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<InvariantReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoupling: Option<DecouplingDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_tracking: Option<FrontChecks>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscous_balance_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    pub failures: Vec<String>,
}

/// Random Riemann problems drawn for the problem file's model from a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub problems: usize,
    pub failed: usize,
    pub max_rh_residual: f64,
    pub max_wave_property_residual: f64,
}

/// Largest discrete balance defect accepted from the viscous solver.
pub const BALANCE_TOL: f64 = 1e-10;

/// `validate`: invariant suite on the problem file and, with a seed, on a random sweep.
pub fn validate(spec: &ProblemSpec, opts: &Options) -> Result<Written, CliError> {
    let model = spec.flux_model()?;
    let tol = opts.tol(spec);
    let kind = ModelKind::of(&model);
    let mut report = ValidateReport {
        model: kind,
        tol,
        problem: None,
        decoupling: None,
        front_tracking: None,
        viscous_balance_defect: None,
        sweep: None,
        failures: Vec::new(),
    };
    match &spec.problem {
        crate::spec::Problem::Riemann { .. } => {
            let (l, r) = spec.riemann_states()?;
            let fan = solve_fan(&model, l, r)?;
            let inv = check_fan(&model, &fan, tol);
            if !inv.passes(tol) {
                report.failures.push(format!("invariant suite: {inv:?}"));
            }
            report.problem = Some(inv);
            if matches!(kind, ModelKind::Polymer | ModelKind::Traffic) {
                match decoupling(&model, &fan, DecouplingGrid::default()) {
                    Ok(d) => {
                        let dev = d
                            .report
                            .max_value_dev_along_phi
                            .max(d.report.max_k_dev_along_psi);
                        if dev > DECOUPLING_TOL || d.potential_path_gap > DECOUPLING_TOL {
                            report.failures.push(format!(
                                "decoupling deviation {dev}, path gap {}",
                                d.potential_path_gap
                            ));
                        }
                        report.decoupling = Some(d);
                    }
                    Err(CliError::Input(m)) => info!("decoupling skipped: {m}"),
                    Err(e) => return Err(e),
                }
            }
        }
        crate::spec::Problem::Cauchy(c) => {
            let (_, data) = spec.cauchy_data()?;
            match c.method {
                Method::FrontTracking => {
                    let checks = FrontChecks::of(&run_front_tracking(&model, c, &data)?);
                    if !checks.passes() {
                        report.failures.push(format!("front tracking: {checks:?}"));
                    }
                    report.front_tracking = Some(checks);
                }
                Method::Viscous => {
                    let run = run_viscous(&model, &data, c.viscous.unwrap_or_default(), c.t_end)?;
                    if run.max_conservation_residual > BALANCE_TOL {
                        report
                            .failures
                            .push(format!("balance defect {}", run.max_conservation_residual));
                    }
                    report.viscous_balance_defect = Some(run.max_conservation_residual);
                }
            }
        }
    }
    if let Some(seed) = opts.seed.or(spec.seed) {
        report.sweep = Some(sweep(&model, seed, opts.count, tol, &mut report.failures));
    }
    let path = write_json(&opts.out, artifacts::VALIDATE_FILE, &report)?;
    if !report.failures.is_empty() {
        return Err(CliError::Solver {
            message: format!(
                "{} check(s) failed: {}",
                report.failures.len(),
                report.failures.join("; ")
            ),
            state: serde_json::to_value(&report).unwrap_or_default(),
        });
    }
    Ok(vec![path])
}

fn sweep(
    model: &FluxModel,
    seed: u64,
    count: usize,
    tol: f64,
    failures: &mut Vec<String>,
) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SweepReport {
        seed,
        problems: count,
        failed: 0,
        max_rh_residual: 0.0,
        max_wave_property_residual: 0.0,
    };
    for _ in 0..count {
        let (l, r) = random_riemann(model, &mut rng);
        match solve_riemann(model, l, r) {
            Ok(fan) => {
                let inv = check_fan(model, &fan, tol);
                out.max_rh_residual = out.max_rh_residual.max(inv.rh_residual);
                out.max_wave_property_residual = out
                    .max_wave_property_residual
                    .max(inv.wave_property_residual);
                if !inv.passes(tol) {
                    out.failed += 1;
                    failures.push(format!("{l:?} {r:?}: {inv:?}"));
                }
            }
            Err(e) => {
                out.failed += 1;
                failures.push(format!("{l:?} {r:?}: {e}"));
            }
        }
    }
    out
}
