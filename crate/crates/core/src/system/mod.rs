//! Problem families, the semi-discrete operators for a given `s0`, time
//! integrators, analytic reference solutions and error measures.

mod driver;
mod exact;
mod integrators;

use core::fmt;

pub use driver::{discrete_energy, output_steps, relative_l2_error, simulate, Integrator, OutputSample, SimulationConfig};
pub use exact::{exact_driftdiffusion, exact_schrodinger, exact_schrodinger_alpha, AnalyticSolution};
pub use integrators::{
    radau5_stability, radau5_tableau, Radau5Stepper, RadauSolve, TrapezoidalStepper, WaveStepper,
};

use crate::assembly::{AssemblyError, GlobalSystem, PdeParams};
use crate::hardy::S0;
use crate::linalg::{CsrMatrix, LinalgError};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum SystemError {
    /// Parameters not allowed for this equation.
    InvalidParameters(&'static str),
    /// Numeric `s0` required but the symbolic `iω` tag was given, or vice versa.
    S0Mismatch,
    InvalidTimeStep,
    /// Linear solve failed at the given time step (0 for setup).
    Solver { step: usize, source: LinalgError },
    Assembly(AssemblyError),
    /// Reference solution vanishes or is undefined at the requested time.
    DegenerateReference,
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::InvalidParameters(what) => write!(f, "invalid parameters: {what}"),
            SystemError::S0Mismatch => f.write_str("s0 kind does not match the equation"),
            SystemError::InvalidTimeStep => f.write_str("time step must be positive and finite"),
            SystemError::Solver { step, source } => write!(f, "linear solver failed at step {step}: {source}"),
            SystemError::Assembly(e) => write!(f, "assembly: {e}"),
            SystemError::DegenerateReference => f.write_str("reference solution is zero or undefined"),
        }
    }
}

impl core::error::Error for SystemError {}

impl From<AssemblyError> for SystemError {
    fn from(e: AssemblyError) -> Self {
        SystemError::Assembly(e)
    }
}

pub(crate) fn setup_err(source: LinalgError) -> SystemError {
    SystemError::Solver { step: 0, source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Schrodinger,
    DriftDiffusion,
    Heat,
    Wave,
    KleinGordon,
}

impl ProblemKind {
    pub fn is_second_order(self) -> bool {
        matches!(self, ProblemKind::Wave | ProblemKind::KleinGordon)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Schrodinger => "schrodinger",
            ProblemKind::DriftDiffusion => "driftdiffusion",
            ProblemKind::Heat => "heat",
            ProblemKind::Wave => "wave",
            ProblemKind::KleinGordon => "kleingordon",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ProblemKind::Schrodinger,
            ProblemKind::DriftDiffusion,
            ProblemKind::Heat,
            ProblemKind::Wave,
            ProblemKind::KleinGordon,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

/// `s0 = −1 − i` for Schrödinger, `−5` for drift-diffusion and heat, the
/// symbolic `iω` for the second-order equations.
pub fn s0_default(kind: ProblemKind) -> S0 {
    match kind {
        ProblemKind::Schrodinger => S0::Value(C64::new(-1.0, -1.0)),
        ProblemKind::DriftDiffusion | ProblemKind::Heat => S0::Value(C64::new(-5.0, 0.0)),
        ProblemKind::Wave | ProblemKind::KleinGordon => S0::IOmega,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub c: f64,
    pub d: [f64; 2],
    pub k: f64,
    pub s0: S0,
}

impl ProblemSpec {
    /// Validate parameters against the equation; `s0 = None` picks the default.
    pub fn new(kind: ProblemKind, c: f64, d: [f64; 2], k: f64, s0: Option<S0>) -> Result<Self, SystemError> {
        if !(c.is_finite() && k.is_finite() && d.iter().all(|v| v.is_finite())) {
            return Err(SystemError::InvalidParameters("non-finite parameter"));
        }
        let drift_free = !matches!(kind, ProblemKind::DriftDiffusion);
        if drift_free && d != [0.0, 0.0] {
            return Err(SystemError::InvalidParameters("drift must vanish for this equation"));
        }
        let mass_free = matches!(kind, ProblemKind::Schrodinger | ProblemKind::Heat | ProblemKind::Wave);
        if mass_free && k != 0.0 {
            return Err(SystemError::InvalidParameters("k must vanish for this equation"));
        }
        let s0 = s0.unwrap_or(s0_default(kind));
        if kind.is_second_order() != matches!(s0, S0::IOmega) {
            return Err(SystemError::S0Mismatch);
        }
        Ok(ProblemSpec { kind, c, d, k, s0 })
    }

    pub fn params(&self) -> PdeParams {
        PdeParams { c: self.c, d: self.d, k: self.k }
    }
}

/// Operators of a first-order equation at numeric `s0`.
#[derive(Debug, Clone)]
pub struct FirstOrderOperators {
    pub s0: C64,
    /// `M0 + M₋₁/s0 + M₋₂/s0²`
    pub m: CsrMatrix,
    /// `L0 + s0 L1`
    pub l: CsrMatrix,
    /// `D0 + D₋₁/s0`
    pub d: CsrMatrix,
    /// `−k² M`
    pub k_term: CsrMatrix,
    /// Right-hand side of `M u' = A u`: `c² L + D − k² M`, times `−i` for
    /// Schrödinger.
    pub a: CsrMatrix,
}

/// Raw graded matrices for the second-order scheme, where `s0 = iω` is
/// realised by time derivatives.
#[derive(Debug, Clone)]
pub struct WaveOperators {
    pub m0: CsrMatrix,
    pub mm1: CsrMatrix,
    pub mm2: CsrMatrix,
    pub l0: CsrMatrix,
    pub l1: CsrMatrix,
    pub l0_interior: CsrMatrix,
    pub c: f64,
    pub k: f64,
}

#[derive(Debug, Clone)]
pub enum SemiDiscrete {
    FirstOrder(FirstOrderOperators),
    SecondOrder(WaveOperators),
}

pub fn build_semidiscrete(global: &GlobalSystem, spec: &ProblemSpec) -> Result<SemiDiscrete, SystemError> {
    let one = C64::new(1.0, 0.0);
    let lin = |terms: &[(C64, &CsrMatrix)]| CsrMatrix::lin_comb(terms).map_err(setup_err);
    match spec.s0 {
        S0::IOmega => {
            if !spec.kind.is_second_order() {
                return Err(SystemError::S0Mismatch);
            }
            Ok(SemiDiscrete::SecondOrder(WaveOperators {
                m0: global.m0.clone(),
                mm1: global.mm1.clone(),
                mm2: global.mm2.clone(),
                l0: global.l0.clone(),
                l1: global.l1.clone(),
                l0_interior: global.l0_interior.clone(),
                c: spec.c,
                k: spec.k,
            }))
        }
        S0::Value(s0) => {
            if spec.kind.is_second_order() {
                return Err(SystemError::S0Mismatch);
            }
            let m = lin(&[(one, &global.m0), (one / s0, &global.mm1), (one / (s0 * s0), &global.mm2)])?;
            let l = lin(&[(one, &global.l0), (s0, &global.l1)])?;
            let d = lin(&[(one, &global.d0), (one / s0, &global.dm1)])?;
            let k_term = m.scale(C64::new(-spec.k * spec.k, 0.0));
            let c2 = C64::new(spec.c * spec.c, 0.0);
            let rhs = lin(&[(c2, &l), (one, &d), (one, &k_term)])?;
            let a = if spec.kind == ProblemKind::Schrodinger { rhs.scale(C64::new(0.0, -1.0)) } else { rhs };
            Ok(SemiDiscrete::FirstOrder(FirstOrderOperators { s0, m, l, d, k_term, a }))
        }
    }
}

#[cfg(test)]
mod tests;
