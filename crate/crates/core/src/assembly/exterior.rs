//! Local matrices of one semi-infinite trapezoid.
//!
//! Inside an element a basis function is a product `φ_i(η) ψ_j(ξ)`, so every
//! integral splits into an η-factor, evaluated by Gauss–Legendre quadrature,
//! and a ξ-factor, evaluated exactly in the Hardy basis. With `t± = T±/2`
//! and `p = P/2` the coefficient maps of the Hardy operators,
//!
//! ```text
//! ∫ ψ_i ψ_j    = −(2/s0)  t−ᵀ t−        ∫ ξ ψ_i ψ_j    = −(2/s0²) t−ᵀ p t−
//! ∫ ψ_i ψ'_j   = −2       t−ᵀ t+        ∫ ξ ψ_i ψ'_j   = −(2/s0)  t−ᵀ p t+
//! ∫ ψ'_i ψ'_j  = −2 s0    t+ᵀ t+        ∫ ξ ψ'_i ψ'_j  = −2       t+ᵀ p t+
//! ```
//!
//! which is where the `−2` prefactors of the blocks come from.

use alloc::vec::Vec;

use super::lagrange::lagrange_1d;
use super::quadrature::gauss_legendre;
use crate::hardy::HardyOperatorSet;
use crate::linalg::{DenseLu, DenseMatrix, LinalgError};
use crate::mesh::ExteriorElementGeometry;
use crate::C64;

/// η-factors over `[0, 1]` for the Pk trace basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaBlocks {
    /// `∫ φ'_i (h_ξ + β²/h_ξ) φ'_j` with `β = b − (a+b)η`
    pub l11: DenseMatrix<f64>,
    /// `∫ φ'_i (β/h_ξ) φ_j`
    pub l12: DenseMatrix<f64>,
    /// `∫ φ_i (β/h_ξ) φ'_j`
    pub l21: DenseMatrix<f64>,
    /// `∫ φ_i φ_j / h_ξ`
    pub l22: DenseMatrix<f64>,
    pub m_eta: DenseMatrix<f64>,
    /// `h_η d̃₂ M_η`
    pub d1: DenseMatrix<f64>,
    /// `d̃₂ M_η`
    pub d2: DenseMatrix<f64>,
    /// `∫ φ_i (h_ξ d̃₁ + β d̃₂) φ'_j`
    pub d3: DenseMatrix<f64>,
}

/// `d̃ = Rᵀ d`, the drift in the element's (tangent, normal) frame.
pub fn rotated_drift(geom: &ExteriorElementGeometry, d: [f64; 2]) -> [f64; 2] {
    let (t, n) = (geom.tangent(), geom.normal());
    [t[0] * d[0] + t[1] * d[1], n[0] * d[0] + n[1] * d[1]]
}

pub fn eta_blocks(geom: &ExteriorElementGeometry, fe_order: usize, d: [f64; 2]) -> EtaBlocks {
    let n = fe_order + 1;
    let (h_xi, h_eta, s) = (geom.h_xi, geom.h_eta, geom.a + geom.b);
    let dt = rotated_drift(geom, d);
    let mut l11 = DenseMatrix::zeros(n, n);
    let mut l12 = DenseMatrix::zeros(n, n);
    let mut m_eta = DenseMatrix::zeros(n, n);
    let mut d3 = DenseMatrix::zeros(n, n);
    for (eta, w) in gauss_legendre(fe_order + 2) {
        let (v, dv) = lagrange_1d(fe_order, eta);
        let beta = geom.b - s * eta;
        let g = beta / h_xi;
        for i in 0..n {
            for j in 0..n {
                l11[(i, j)] += w * dv[i] * (h_xi + beta * beta / h_xi) * dv[j];
                l12[(i, j)] += w * dv[i] * g * v[j];
                m_eta[(i, j)] += w * v[i] * v[j];
                d3[(i, j)] += w * v[i] * (h_xi * dt[0] + beta * dt[1]) * dv[j];
            }
        }
    }
    EtaBlocks {
        l21: l12.transpose(),
        l12,
        l11,
        l22: m_eta.scale(1.0 / h_xi),
        d1: m_eta.scale(h_eta * dt[1]),
        d2: m_eta.scale(dt[1]),
        d3,
        m_eta,
    }
}

/// ξ-factors, named by the power of `s0` they multiply.
#[derive(Debug, Clone, PartialEq)]
pub struct XiBlocks {
    pub l12_0: DenseMatrix<f64>,
    pub l21_0: DenseMatrix<f64>,
    pub l22_1: DenseMatrix<f64>,
    pub l22_0: DenseMatrix<f64>,
    pub m_m1: DenseMatrix<f64>,
    pub m_m2: DenseMatrix<f64>,
    pub d1_0: DenseMatrix<f64>,
    pub d2_m1: DenseMatrix<f64>,
    pub d3_m1: DenseMatrix<f64>,
}

pub fn xi_blocks(geom: &ExteriorElementGeometry, hardy: &HardyOperatorSet) -> XiBlocks {
    let (tp, tm, p) = hardy.coefficient_maps();
    let (h_xi, h_eta, s) = (geom.h_xi, geom.h_eta, geom.a + geom.b);
    let (tmt, tpt) = (tm.transpose(), tp.transpose());
    let mm_tp = tmt.matmul(&tp).scale(-2.0);
    XiBlocks {
        l21_0: mm_tp.transpose(),
        l12_0: mm_tp.clone(),
        l22_1: tpt.matmul(&tp).scale(-2.0 * h_eta),
        l22_0: tpt.matmul(&p).matmul(&tp).scale(-2.0 * s),
        m_m1: tmt.matmul(&tm).scale(-2.0 * h_xi * h_eta),
        m_m2: tmt.matmul(&p).matmul(&tm).scale(-2.0 * h_xi * s),
        d1_0: mm_tp,
        d2_m1: tmt.matmul(&p).matmul(&tp).scale(-2.0 * s),
        d3_m1: tmt.matmul(&tm).scale(-2.0),
    }
}

/// `∫ ψ_i ψ_j / (h_η + (a+b)ξ)` to leading order `s0⁻¹`, formed with an
/// explicit inverse: `−2 t−ᵀ (h_η s0 I + (a+b) p)⁻¹ t−`. Production code
/// never forms this; it introduces auxiliary unknowns instead.
pub fn l11_inverse_form(
    geom: &ExteriorElementGeometry,
    hardy: &HardyOperatorSet,
    s0: C64,
) -> Result<DenseMatrix<C64>, LinalgError> {
    let (_, tm, p) = hardy.coefficient_maps();
    let n = hardy.dim();
    let y = DenseMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { s0 * geom.h_eta } else { C64::new(0.0, 0.0) };
        diag + (geom.a + geom.b) * p[(i, j)]
    });
    let y_inv = DenseLu::new(&y)?.inverse();
    let tmc = tm.to_complex();
    Ok(tmc.transpose().matmul(&y_inv).matmul(&tmc).scale(C64::new(-2.0, 0.0)))
}

/// Local matrices of the bilinear forms (not yet signed for the global
/// system): stiffness `∫∇v·∇u`, mass `∫vu` and drift `∫v d·∇u`, split by
/// powers of `s0`. The first `N_η(N_ξ+1)` unknowns are the Hardy
/// coefficients (index `i(N_ξ+1) + j`, `i` the η-node, `j = 0` the trace),
/// the second half the auxiliary unknowns `w = (I ⊗ Y⁻¹ t−) û`, which obey
///
/// ```text
/// 2 (I ⊗ t−) û − 2 (I ⊗ Y) w = 0,   Y = h_η s0 I + (a+b) p.
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct LocalExteriorMatrices {
    pub l0: DenseMatrix<f64>,
    pub l1: DenseMatrix<f64>,
    pub mm1: DenseMatrix<f64>,
    pub mm2: DenseMatrix<f64>,
    pub d0: DenseMatrix<f64>,
    pub dm1: DenseMatrix<f64>,
}

impl LocalExteriorMatrices {
    pub fn dim(&self) -> usize {
        self.l0.rows()
    }
}

fn place(target: &mut DenseMatrix<f64>, block: &DenseMatrix<f64>, r0: usize, c0: usize) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            target[(r0 + i, c0 + j)] += block[(i, j)];
        }
    }
}

pub fn local_exterior(
    geom: &ExteriorElementGeometry,
    hardy: &HardyOperatorSet,
    fe_order: usize,
    d: [f64; 2],
) -> LocalExteriorMatrices {
    let eta = eta_blocks(geom, fe_order, d);
    let xi = xi_blocks(geom, hardy);
    let (_, tm, p) = hardy.coefficient_maps();
    let n_eta = fe_order + 1;
    let half = n_eta * hardy.dim();
    let id_eta = DenseMatrix::<f64>::identity(n_eta);
    let zeros = || DenseMatrix::<f64>::zeros(2 * half, 2 * half);

    let mut l0 = zeros();
    place(&mut l0, &eta.l22.kron(&xi.l22_0), 0, 0);
    place(&mut l0, &eta.l12.kron(&xi.l12_0), 0, 0);
    place(&mut l0, &eta.l21.kron(&xi.l21_0), 0, 0);
    place(&mut l0, &eta.l11.kron(&tm.transpose()).scale(-2.0), 0, half);
    place(&mut l0, &id_eta.kron(&tm).scale(2.0), half, 0);
    place(&mut l0, &id_eta.kron(&p).scale(-2.0 * (geom.a + geom.b)), half, half);

    let mut l1 = zeros();
    place(&mut l1, &eta.l22.kron(&xi.l22_1), 0, 0);
    place(&mut l1, &DenseMatrix::identity(half).scale(-2.0 * geom.h_eta), half, half);

    let mut mm1 = zeros();
    place(&mut mm1, &eta.m_eta.kron(&xi.m_m1), 0, 0);
    let mut mm2 = zeros();
    place(&mut mm2, &eta.m_eta.kron(&xi.m_m2), 0, 0);

    let mut d0 = zeros();
    place(&mut d0, &eta.d1.kron(&xi.d1_0), 0, 0);
    let mut dm1 = zeros();
    place(&mut dm1, &eta.d2.kron(&xi.d2_m1), 0, 0);
    place(&mut dm1, &eta.d3.kron(&xi.d3_m1), 0, 0);

    LocalExteriorMatrices { l0, l1, mm1, mm2, d0, dm1 }
}

/// Eliminate the auxiliary half of `L0 + s0 L1`:
/// `A − B C⁻¹ D` for the 2×2 block partition. Used by the oracle tests.
pub fn schur_eliminate_auxiliary(loc: &LocalExteriorMatrices, s0: C64) -> Result<DenseMatrix<C64>, LinalgError> {
    let n = loc.dim() / 2;
    let full = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| C64::new(loc.l0[(i, j)], 0.0) + s0 * loc.l1[(i, j)]);
    let block = |r0: usize, c0: usize| DenseMatrix::from_fn(n, n, |i, j| full[(r0 + i, c0 + j)]);
    let (a, b, c, dd) = (block(0, 0), block(0, n), block(n, n), block(n, 0));
    let c_inv = DenseLu::new(&c)?.inverse();
    Ok(&a - &b.matmul(&c_inv).matmul(&dd))
}

/// The same contribution formed directly: `L_η,11 ⊗ L_ξ,11` plus the
/// remaining stiffness blocks at `s0`.
pub fn direct_stiffness(
    geom: &ExteriorElementGeometry,
    hardy: &HardyOperatorSet,
    fe_order: usize,
    s0: C64,
) -> Result<DenseMatrix<C64>, LinalgError> {
    let eta = eta_blocks(geom, fe_order, [0.0, 0.0]);
    let xi = xi_blocks(geom, hardy);
    let x11 = l11_inverse_form(geom, hardy, s0)?;
    let c = |m: &DenseMatrix<f64>| m.to_complex();
    let mut out = c(&eta.l11).kron(&x11);
    let rest: Vec<DenseMatrix<C64>> = alloc::vec![
        c(&eta.l22).kron(&c(&xi.l22_0)),
        c(&eta.l22).kron(&c(&xi.l22_1)).scale(s0),
        c(&eta.l12).kron(&c(&xi.l12_0)),
        c(&eta.l21).kron(&c(&xi.l21_0)),
    ];
    for r in &rest {
        out = &out + r;
    }
    Ok(out)
}
