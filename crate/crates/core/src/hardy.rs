//! Hardy-space representation of the exterior solution along a ray.
//!
//! A function `f` on `[0, ∞)` is represented through its Laplace transform
//! pulled back to the unit disc,
//!
//! ```text
//! (ML f)(z) = (f0 + (z − 1) F(z)) / (2 s0),   F(z) = Σ_{j<Nξ} F_j z^j,
//! ```
//!
//! so the degrees of freedom are the stacked vector `(f0, F_0, …, F_{Nξ−1})`.
//! The integer matrices returned here are twice the coefficient maps of the
//! operators `T−`, `T+` (representation of `f` and `f'`) and `P`
//! (multiplication by `ξ`).

use alloc::vec::Vec;
use core::fmt;

use crate::linalg::DenseMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardyError {
    /// Truncation must be at least one coefficient.
    EmptyTruncation,
    TruncationMismatch { left: usize, right: usize },
    /// The pole coincides with `s0`; its disc image is at infinity.
    PoleAtS0,
    /// A numeric `s0` was requested from the symbolic `iω` tag.
    SymbolicS0,
}

impl fmt::Display for HardyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardyError::EmptyTruncation => f.write_str("n_xi must be at least 1"),
            HardyError::TruncationMismatch { left, right } => {
                write!(f, "truncation mismatch: {left} vs {right} coefficients")
            }
            HardyError::PoleAtS0 => f.write_str("pole equals s0"),
            HardyError::SymbolicS0 => f.write_str("s0 = iω is symbolic and has no numeric value"),
        }
    }
}

impl core::error::Error for HardyError {}

fn check(n_xi: usize) -> Result<usize, HardyError> {
    if n_xi < 1 {
        Err(HardyError::EmptyTruncation)
    } else {
        Ok(n_xi + 1)
    }
}

/// Upper bidiagonal, ones on the diagonal and superdiagonal.
pub fn t_plus_matrix(n_xi: usize) -> Result<DenseMatrix<i64>, HardyError> {
    let n = check(n_xi)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| if i == j || i + 1 == j { 1 } else { 0 }))
}

/// Upper bidiagonal, ones on the diagonal and `−1` on the superdiagonal.
pub fn t_minus_matrix(n_xi: usize) -> Result<DenseMatrix<i64>, HardyError> {
    let n = check(n_xi)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| match () {
        _ if i == j => 1,
        _ if i + 1 == j => -1,
        _ => 0,
    }))
}

/// Tridiagonal: column `j` holds `j`, `−(2j+1)`, `j+1` in rows `j−1`, `j`, `j+1`.
pub fn p_matrix(n_xi: usize) -> Result<DenseMatrix<i64>, HardyError> {
    let n = check(n_xi)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        let j = j as i64;
        match i as i64 - j {
            -1 => j,
            0 => -(2 * j + 1),
            1 => j + 1,
            _ => 0,
        }
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyOperatorSet {
    pub n_xi: usize,
    pub t_plus: DenseMatrix<i64>,
    pub t_minus: DenseMatrix<i64>,
    pub p: DenseMatrix<i64>,
}

impl HardyOperatorSet {
    pub fn new(n_xi: usize) -> Result<Self, HardyError> {
        Ok(HardyOperatorSet { n_xi, t_plus: t_plus_matrix(n_xi)?, t_minus: t_minus_matrix(n_xi)?, p: p_matrix(n_xi)? })
    }

    pub fn dim(&self) -> usize {
        self.n_xi + 1
    }

    /// The operator coefficient maps themselves, i.e. half of the integer
    /// matrices: `(T+, T−, P) / 2`.
    pub fn coefficient_maps(&self) -> (DenseMatrix<f64>, DenseMatrix<f64>, DenseMatrix<f64>) {
        let half = |m: &DenseMatrix<i64>| m.map(|v| 0.5 * v as f64);
        (half(&self.t_plus), half(&self.t_minus), half(&self.p))
    }
}

/// Boundary value and monomial coefficients of one ray function.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyCoefficients {
    pub f0: C64,
    pub f: Vec<C64>,
}

impl HardyCoefficients {
    pub fn new(f0: C64, f: Vec<C64>) -> Result<Self, HardyError> {
        check(f.len())?;
        Ok(HardyCoefficients { f0, f })
    }

    pub fn n_xi(&self) -> usize {
        self.f.len()
    }

    /// `(f0, F_0, …, F_{Nξ−1})`.
    pub fn stacked(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.f.len() + 1);
        v.push(self.f0);
        v.extend_from_slice(&self.f);
        v
    }

    /// Monomial coefficients of `2 s0 · (ML f)`, i.e. `T− (f0, F)`.
    pub fn disc_coefficients(&self) -> Vec<C64> {
        let n = self.f.len();
        let mut c = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let here = if j == 0 { self.f0 } else { self.f[j - 1] };
            let next = if j < n { self.f[j] } else { C64::new(0.0, 0.0) };
            c.push(here - next);
        }
        c
    }
}

/// The parameter orienting the Möbius half-plane. Second-order-in-time
/// equations use `s0 = iω`, which never takes a numeric value: the time
/// scheme substitutes the time derivative for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum S0 {
    Value(C64),
    IOmega,
}

impl S0 {
    pub fn numeric(self) -> Result<C64, HardyError> {
        match self {
            S0::Value(s) => Ok(s),
            S0::IOmega => Err(HardyError::SymbolicS0),
        }
    }
}

/// The half-plane `P_{s0}` of modes excluded by the pole condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleRegion {
    pub s0: S0,
}

impl PoleRegion {
    pub fn new(s0: S0) -> Self {
        PoleRegion { s0 }
    }

    /// Whether a mode with Laplace pole `z` lies in the excluded half-plane.
    /// For `iω` with `ω > 0` this is `Im z < 0`.
    pub fn contains(&self, z: C64) -> bool {
        match self.s0 {
            S0::Value(s0) => (z * s0.conj()).re < 0.0,
            S0::IOmega => z.im < 0.0,
        }
    }
}

/// Disc image `z* = (pole + s0)/(pole − s0)` of a Laplace-domain pole;
/// `|z*| < 1` exactly when the pole lies in `P_{s0}`.
pub fn mobius_pole_image(pole: C64, s0: C64) -> Result<C64, HardyError> {
    let den = pole - s0;
    if den == C64::new(0.0, 0.0) {
        return Err(HardyError::PoleAtS0);
    }
    Ok((pole + s0) / den)
}

/// `∫₀^∞ f g dξ` for two ray functions given in the Hardy basis.
///
/// The unit-circle integral pairs `(ML f)(z̄)` with `(ML g)(z)`. On the circle
/// `z̄ = 1/z`, so only matching powers survive and the pairing is the plain
/// bilinear product of the monomial coefficients:
///
/// ```text
/// ∫ f g = −2 s0 Σ_j a_j b_j = −(T− f̂) · (T− ĝ) / (2 s0).
/// ```
///
/// Coefficients are not conjugated, so the pairing is bilinear (and
/// symmetric) for complex `f`, matching the Galerkin forms it stands for.
pub fn hardy_pairing(f: &HardyCoefficients, g: &HardyCoefficients, s0: C64) -> Result<C64, HardyError> {
    if f.n_xi() != g.n_xi() {
        return Err(HardyError::TruncationMismatch { left: f.n_xi(), right: g.n_xi() });
    }
    let a = f.disc_coefficients();
    let b = g.disc_coefficients();
    let dot: C64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    Ok(-dot / (2.0 * s0))
}
