use alloc::vec;
use alloc::vec::Vec;

use super::{
    build_semidiscrete, AnalyticSolution, ProblemSpec, Radau5Stepper, RadauSolve, SemiDiscrete, SystemError,
    TrapezoidalStepper, WaveOperators, WaveStepper,
};
use crate::assembly::{assemble_global, Boundary, DofMap};
use crate::linalg::CsrMatrix;
use crate::mesh::{Mesh, Point};
use crate::C64;

/// Relative discrete l2 error over all FE nodal values.
pub fn relative_l2_error(
    u: &[C64],
    dofs: &DofMap,
    mut exact: impl FnMut(Point) -> Result<C64, SystemError>,
) -> Result<f64, SystemError> {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, p) in dofs.fe_nodes() {
        let e = exact(p)?;
        num += (u[i] - e).norm_sqr();
        den += e.norm_sqr();
    }
    if !(den > 0.0) || !num.is_finite() {
        return Err(SystemError::DegenerateReference);
    }
    Ok(libm::sqrt(num / den))
}

fn quad_form(a: &CsrMatrix, x: &[C64]) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        for (j, v) in a.row(i) {
            s += xi.conj() * v * x[j];
        }
    }
    s.re
}

/// Discrete energy of the second-order scheme between levels `n − 1` and `n`:
/// `½ vᴴM0v + ½ c² ūᴴ(−L0ᴵ)ū + ½ k² ūᴴM0ū` with `v = (uₙ − uₙ₋₁)/h`,
/// `ū = (uₙ + uₙ₋₁)/2` and `L0ᴵ` the interior stiffness part. Exactly
/// conserved for homogeneous Dirichlet data.
pub fn discrete_energy(ops: &WaveOperators, u: &[C64], u_prev: &[C64], h: f64) -> f64 {
    let v: Vec<C64> = u.iter().zip(u_prev).map(|(a, b)| (a - b) / h).collect();
    let avg: Vec<C64> = u.iter().zip(u_prev).map(|(a, b)| (a + b) * 0.5).collect();
    let kinetic = quad_form(&ops.m0, &v);
    let potential = -quad_form(&ops.l0_interior, &avg);
    let reaction = quad_form(&ops.m0, &avg);
    0.5 * kinetic + 0.5 * ops.c * ops.c * potential + 0.5 * ops.k * ops.k * reaction
}

/// Step indices `round(j·N/(n − 1))`, `j = 0..n`, without repeats.
pub fn output_steps(n_steps: usize, n_outputs: usize) -> Vec<usize> {
    if n_outputs <= 1 {
        return vec![n_steps];
    }
    let mut out: Vec<usize> = (0..n_outputs)
        .map(|j| libm::round(j as f64 * n_steps as f64 / (n_outputs - 1) as f64) as usize)
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Trapezoidal,
    Radau5(RadauSolve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub fe_order: usize,
    pub boundary: Boundary,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub n_outputs: usize,
    /// First-order equations only; second-order ones always use the
    /// three-level scheme.
    pub integrator: Integrator,
    /// Compare against the analytic reference at every output.
    pub track_error: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSample {
    pub step: usize,
    pub t: f64,
    pub rel_error: Option<f64>,
    pub energy: Option<f64>,
}

enum Stepper {
    Trap(TrapezoidalStepper),
    Radau(Radau5Stepper),
    Wave(WaveStepper, WaveOperators),
}

/// Assemble, integrate from `t_start` to `t_end` and report at the output
/// steps. The initial value interpolates `initial` (or the reference) at
/// `t_start`; exterior unknowns start at zero. `on_output` sees every
/// reported state.
pub fn simulate(
    mesh: &Mesh,
    spec: &ProblemSpec,
    config: &SimulationConfig,
    initial: Option<&dyn Fn(Point) -> C64>,
    mut on_output: impl FnMut(&OutputSample, &[C64], &DofMap),
) -> Result<Vec<OutputSample>, SystemError> {
    let span = config.t_end - config.t_start;
    if !(config.dt > 0.0 && config.dt.is_finite() && span > 0.0 && span.is_finite()) {
        return Err(SystemError::InvalidTimeStep);
    }
    let n_steps = (libm::round(span / config.dt) as usize).max(1);
    let h = span / n_steps as f64;
    let reference = AnalyticSolution::for_spec(spec);
    let global = assemble_global(mesh, config.fe_order, config.boundary, spec.params())?;
    let dofs = &global.dof_map;
    let n = global.n_dofs();

    let mut u = vec![C64::new(0.0, 0.0); n];
    for (i, p) in dofs.fe_nodes() {
        u[i] = match (initial, &reference) {
            (Some(f), _) => f(p),
            (None, Some(r)) => r.eval(p[0], p[1], config.t_start)?,
            (None, None) => return Err(SystemError::InvalidParameters("no initial condition")),
        };
    }

    let stepper = match build_semidiscrete(&global, spec)? {
        SemiDiscrete::FirstOrder(ops) => match config.integrator {
            Integrator::Trapezoidal => Stepper::Trap(TrapezoidalStepper::new(&ops.m, &ops.a, h)?),
            Integrator::Radau5(mode) => Stepper::Radau(Radau5Stepper::new(&ops.m, &ops.a, h, mode)?),
        },
        SemiDiscrete::SecondOrder(ops) => Stepper::Wave(WaveStepper::new(&ops, h)?, ops),
    };

    let outputs = output_steps(n_steps, config.n_outputs);
    let mut samples = Vec::with_capacity(outputs.len());
    let mut next = 0;
    let mut u_prev: Option<Vec<C64>> = None;
    for step in 0..=n_steps {
        if step > 0 {
            let u_new = match &stepper {
                Stepper::Trap(s) => s.step(&u, step)?,
                Stepper::Radau(s) => s.step(&u, step)?,
                Stepper::Wave(s, _) => match &u_prev {
                    None => s.bootstrap(&u)?,
                    Some(prev) => s.step(&u, prev, step)?,
                },
            };
            if u_new.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(SystemError::Solver { step, source: crate::linalg::LinalgError::Singular { pivot: 0 } });
            }
            u_prev = Some(core::mem::replace(&mut u, u_new));
        }
        if next < outputs.len() && outputs[next] == step {
            next += 1;
            let t = config.t_start + step as f64 * h;
            let energy = match &stepper {
                Stepper::Wave(_, ops) => Some(discrete_energy(ops, &u, u_prev.as_deref().unwrap_or(&u), h)),
                _ => None,
            };
            let rel_error = match (&reference, config.track_error) {
                (Some(r), true) => Some(reference_error(r, &u, dofs, t)?),
                _ => None,
            };
            let sample = OutputSample { step, t, rel_error, energy };
            on_output(&sample, &u, dofs);
            samples.push(sample);
        }
    }
    Ok(samples)
}

fn reference_error(r: &AnalyticSolution, u: &[C64], dofs: &DofMap, t: f64) -> Result<f64, SystemError> {
    if !matches!(r, AnalyticSolution::GaussianPulse { .. }) {
        return relative_l2_error(u, dofs, |p| r.eval(p[0], p[1], t));
    }
    // Tabulate the radial profile once and interpolate linearly.
    let rmax = dofs.fe_nodes().map(|(_, p)| libm::sqrt(p[0] * p[0] + p[1] * p[1])).fold(0.0, f64::max);
    let m = 2048;
    let dr = rmax.max(1e-12) / m as f64;
    let table: Vec<f64> = (0..=m).map(|j| r.radial(j as f64 * dr, t)).collect();
    relative_l2_error(u, dofs, |p| {
        let s = libm::sqrt(p[0] * p[0] + p[1] * p[1]) / dr;
        let j = (s as usize).min(m - 1);
        let f = s - j as f64;
        Ok(C64::new(table[j] * (1.0 - f) + table[j + 1] * f, 0.0))
    })
}
