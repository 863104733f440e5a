//! Simulation runs and the convergence sweeps built on them.

use std::time::{Duration, Instant};

use polecond_core::assembly::Boundary;
use polecond_core::mesh::{build_base_mesh, refine_uniform, Mesh};
use polecond_core::system::{simulate, OutputSample, SimulationConfig, SystemError};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Half width of the square domain.
pub const HALF_WIDTH: f64 = 4.0;
pub const CHAMFER: f64 = 0.5;
/// Target boundary edge length of the unrefined mesh.
pub const BASE_EDGE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub samples: Vec<OutputSample>,
    /// Maximum relative error over all outputs, when tracked.
    pub max_error: Option<f64>,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn max_energy(&self) -> Option<f64> {
        self.samples.iter().filter_map(|s| s.energy).reduce(f64::max)
    }
}

pub fn build_mesh(refinements: usize) -> Result<Mesh, CliError> {
    let mut mesh = build_base_mesh(HALF_WIDTH, CHAMFER, BASE_EDGE).map_err(|e| CliError::Config(e.to_string()))?;
    for _ in 0..refinements {
        mesh = refine_uniform(&mesh).map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(mesh)
}

fn solver_error(e: SystemError) -> CliError {
    match e {
        SystemError::InvalidParameters(_) | SystemError::S0Mismatch | SystemError::InvalidTimeStep => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Solver(e.to_string()),
    }
}

/// Run one simulation; `on_output` sees every reported state.
pub fn run_with(
    cfg: &ExperimentConfig,
    on_output: impl FnMut(&OutputSample, &[polecond_core::C64], &polecond_core::assembly::DofMap),
) -> Result<RunResult, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mesh = build_mesh(cfg.refinements)?;
    let sim = SimulationConfig {
        fe_order: cfg.fe_order,
        boundary: Boundary::Transparent { n_xi: cfg.n_xi },
        dt: cfg.dt,
        t_start: cfg.t_start,
        t_end: cfg.t_end,
        n_outputs: cfg.n_outputs,
        integrator: cfg.integrator,
        track_error: cfg.track_error,
    };
    let samples = simulate(&mesh, &spec, &sim, None, on_output).map_err(solver_error)?;
    let max_error = samples.iter().filter_map(|s| s.rel_error).reduce(f64::max);
    Ok(RunResult { config: cfg.clone(), samples, max_error, wall_time: start.elapsed() })
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    run_with(cfg, |_, _, _| {})
}

fn require_error(r: &RunResult) -> Result<f64, CliError> {
    r.max_error.ok_or_else(|| CliError::Config("sweeps need track_error = true".into()))
}

/// `log(e_prev/e_next) / log(factor)`, with equal inputs giving 0.
fn rate(e_prev: f64, e_next: f64, factor: f64) -> f64 {
    if factor == 1.0 {
        0.0
    } else {
        (e_prev / e_next).ln() / factor.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceRow {
    pub order: usize,
    pub level: usize,
    pub max_error: f64,
    /// `log2(e_{level−1}/e_level)`; `None` on the first level.
    pub rate: Option<f64>,
}

pub fn sweep_convergence_space(
    base: &ExperimentConfig,
    orders: &[usize],
    levels: &[usize],
) -> Result<Vec<SpaceRow>, CliError> {
    let mut rows = Vec::new();
    for &order in orders {
        let mut prev: Option<f64> = None;
        for &level in levels {
            let cfg = ExperimentConfig { fe_order: order, refinements: level, ..base.clone() };
            let e = require_error(&run(&cfg)?)?;
            rows.push(SpaceRow { order, level, max_error: e, rate: prev.map(|p| rate(p, e, 2.0)) });
            prev = Some(e);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRow {
    pub dt: f64,
    pub max_error: f64,
    /// Order observed against the previous row; `None` on the first.
    pub rate: Option<f64>,
}

pub fn sweep_convergence_time(base: &ExperimentConfig, dts: &[f64]) -> Result<Vec<TimeRow>, CliError> {
    let mut rows: Vec<TimeRow> = Vec::new();
    for &dt in dts {
        let e = require_error(&run(&ExperimentConfig { dt, ..base.clone() })?)?;
        let r = rows.last().map(|p| rate(p.max_error, e, p.dt / dt));
        rows.push(TimeRow { dt, max_error: e, rate: r });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NxiRow {
    pub n_xi: usize,
    pub max_error: f64,
}

pub fn sweep_nxi(base: &ExperimentConfig, n_xis: &[usize]) -> Result<Vec<NxiRow>, CliError> {
    n_xis
        .iter()
        .map(|&n_xi| {
            let e = require_error(&run(&ExperimentConfig { n_xi, ..base.clone() })?)?;
            Ok(NxiRow { n_xi, max_error: e })
        })
        .collect()
}
