use alloc::vec::Vec;

use super::{ProblemKind, ProblemSpec, SystemError};
use crate::assembly::gauss_legendre;
use crate::C64;

/// One Gaussian beam of the free Schrödinger equation `i u_t = Δu`:
/// `i/(4t+i) · exp((−i(x²+y²) − α(x+y) − 2α²t)/(4t+i))`.
pub fn exact_schrodinger_alpha(x: f64, y: f64, t: f64, alpha: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let den = C64::new(4.0 * t, 1.0);
    let arg = (-i * (x * x + y * y) - alpha * (x + y) - 2.0 * alpha * alpha * t) / den;
    i / den * arg.exp()
}

/// Superposition of the beams with `α = 1.4` and `α = −2`.
pub fn exact_schrodinger(x: f64, y: f64, t: f64) -> C64 {
    exact_schrodinger_alpha(x, y, t, 1.4) + exact_schrodinger_alpha(x, y, t, -2.0)
}

/// Drifting heat kernel `(1/t) exp(−|x − d t|² / (4 c² t))`, defined for `t > 0`.
pub fn exact_driftdiffusion(x: f64, y: f64, t: f64, c: f64, d: [f64; 2]) -> Result<f64, SystemError> {
    if !(t > 0.0) || c == 0.0 {
        return Err(SystemError::DegenerateReference);
    }
    let (ex, ey) = (x - d[0] * t, y - d[1] * t);
    Ok(libm::exp(-(ex * ex + ey * ey) / (4.0 * c * c * t)) / t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSolution {
    /// Beams for `i u_t = c² Δu`, i.e. the `c = 1` solution at time `c² t`.
    Schrodinger { c: f64, alphas: Vec<f64> },
    DriftDiffusion { c: f64, d: [f64; 2] },
    /// Radial solution of `u_tt = c² Δu − k² u` with `u(0) = exp(−a r²)`
    /// and zero velocity, by Hankel transform.
    GaussianPulse { a: f64, c: f64, k: f64 },
}

impl AnalyticSolution {
    /// The reference used for each equation; heat reuses the drifting
    /// kernel with `d = 0`.
    pub fn for_spec(spec: &ProblemSpec) -> Option<Self> {
        match spec.kind {
            ProblemKind::Schrodinger => Some(AnalyticSolution::Schrodinger { c: spec.c, alphas: [1.4, -2.0].into() }),
            ProblemKind::DriftDiffusion | ProblemKind::Heat => {
                Some(AnalyticSolution::DriftDiffusion { c: spec.c, d: spec.d })
            }
            ProblemKind::Wave | ProblemKind::KleinGordon => {
                Some(AnalyticSolution::GaussianPulse { a: 2.0, c: spec.c, k: spec.k })
            }
        }
    }

    pub fn eval(&self, x: f64, y: f64, t: f64) -> Result<C64, SystemError> {
        match self {
            AnalyticSolution::Schrodinger { c, alphas } => {
                let tau = c * c * t;
                Ok(alphas.iter().map(|&a| exact_schrodinger_alpha(x, y, tau, a)).sum())
            }
            AnalyticSolution::DriftDiffusion { c, d } => Ok(C64::new(exact_driftdiffusion(x, y, t, *c, *d)?, 0.0)),
            AnalyticSolution::GaussianPulse { .. } => Ok(C64::new(self.radial(libm::sqrt(x * x + y * y), t), 0.0)),
        }
    }

    /// Radial profile of [`AnalyticSolution::GaussianPulse`]:
    /// `∫₀^∞ e^{−κ²/4a}/(2a) cos(t√(c²κ² + k²)) J₀(κr) κ dκ`. Zero for the
    /// other variants.
    pub fn radial(&self, r: f64, t: f64) -> f64 {
        let AnalyticSolution::GaussianPulse { a, c, k } = *self else {
            return 0.0;
        };
        // e^{−κ²/4a} < 1e-17 beyond this cutoff
        let kmax = libm::sqrt(4.0 * a * 40.0);
        let oscill = kmax * (libm::fabs(c * t) + r) / core::f64::consts::PI;
        let panels = libm::ceil(oscill).max(16.0) as usize;
        let rule = gauss_legendre(10);
        let w = kmax / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            for &(x, wt) in &rule {
                let kappa = (p as f64 + x) * w;
                let omega = libm::sqrt(c * c * kappa * kappa + k * k);
                sum += wt * w * libm::exp(-kappa * kappa / (4.0 * a)) * libm::cos(omega * t) * libm::j0(kappa * r) * kappa;
            }
        }
        sum / (2.0 * a)
    }
}
