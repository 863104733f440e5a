use alloc::vec::Vec;

use super::{setup_err, SystemError, WaveOperators};
use crate::linalg::{CsrMatrix, DenseLu, DenseMatrix, LinalgError, SparseLu, TripletBuilder};
use crate::C64;

fn check_step(h: f64) -> Result<(), SystemError> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(SystemError::InvalidTimeStep)
    }
}

fn at_step(step: usize) -> impl Fn(LinalgError) -> SystemError {
    move |source| SystemError::Solver { step, source }
}

fn lin(terms: &[(C64, &CsrMatrix)]) -> Result<CsrMatrix, SystemError> {
    CsrMatrix::lin_comb(terms).map_err(setup_err)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Crank-Nicolson for `M u' = A u`:
/// `(M/h − A/2) u⁺ = (M/h + A/2) u`, factorised once.
pub struct TrapezoidalStepper {
    lu: SparseLu,
    rhs: CsrMatrix,
}

impl TrapezoidalStepper {
    pub fn new(m: &CsrMatrix, a: &CsrMatrix, h: f64) -> Result<Self, SystemError> {
        check_step(h)?;
        let lhs = lin(&[(re(1.0 / h), m), (re(-0.5), a)])?;
        let rhs = lin(&[(re(1.0 / h), m), (re(0.5), a)])?;
        let lu = SparseLu::new(&lhs).map_err(setup_err)?;
        Ok(TrapezoidalStepper { lu, rhs })
    }

    /// Advance one step; `step` is only used to label failures.
    pub fn step(&self, u: &[C64], step: usize) -> Result<Vec<C64>, SystemError> {
        let b = self.rhs.matvec(u).map_err(at_step(step))?;
        self.lu.solve(&b).map_err(at_step(step))
    }
}

/// Butcher matrix and nodes of the three-stage Radau IIA method.
pub fn radau5_tableau() -> ([[f64; 3]; 3], [f64; 3]) {
    let s6 = libm::sqrt(6.0);
    let a = [
        [(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0],
        [(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0],
        [(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0],
    ];
    (a, [(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0])
}

/// Closed-form stability function, the (2,3) Padé approximant of `e^z`.
pub fn radau5_stability(z: C64) -> C64 {
    let num = 1.0 + z * 0.4 + z * z / 20.0;
    let den = 1.0 - z * 0.6 + z * z * 0.15 - z * z * z / 60.0;
    num / den
}

/// How the coupled stage equations are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadauSolve {
    /// One sparse factorisation of the full `3N` stage system.
    #[default]
    Block,
    /// Diagonalise the Butcher matrix and solve three shifted `N` systems.
    Decoupled,
}

enum RadauFactors {
    Block { lu: SparseLu, n: usize },
    Decoupled { lus: Vec<SparseLu>, weights: [C64; 3] },
}

/// Radau IIA(5) for `M u' = A u` with fixed step. Stage increments `Z`
/// solve `(A_rk⁻¹ ⊗ M − h I ⊗ A) Z = h (1 ⊗ A u)`; stiff accuracy gives
/// `u⁺ = u + Z₃`, which is valid for singular `M`.
pub struct Radau5Stepper {
    factors: RadauFactors,
    a: CsrMatrix,
    h: f64,
}

impl Radau5Stepper {
    pub fn new(m: &CsrMatrix, a: &CsrMatrix, h: f64, solve: RadauSolve) -> Result<Self, SystemError> {
        check_step(h)?;
        let (rk, _) = radau5_tableau();
        let rk = DenseMatrix::from_fn(3, 3, |i, j| re(rk[i][j]));
        let ainv = DenseLu::new(&rk).map_err(setup_err)?.inverse();
        let factors = match solve {
            RadauSolve::Block => {
                let n = m.nrows();
                let mut tb = TripletBuilder::with_capacity(3 * n, 3 * n, 9 * m.nnz() + 3 * a.nnz());
                for bi in 0..3 {
                    for bj in 0..3 {
                        let coef = ainv[(bi, bj)];
                        for r in 0..n {
                            for (c, v) in m.row(r) {
                                tb.push(bi * n + r, bj * n + c, 0, coef * v);
                            }
                            if bi == bj {
                                for (c, v) in a.row(r) {
                                    tb.push(bi * n + r, bj * n + c, 0, v * (-h));
                                }
                            }
                        }
                    }
                }
                let lu = SparseLu::new(&tb.build()).map_err(setup_err)?;
                RadauFactors::Block { lu, n }
            }
            RadauSolve::Decoupled => {
                let (lambda, t) = eigen3(&ainv).map_err(setup_err)?;
                let tinv = DenseLu::new(&t).map_err(setup_err)?.inverse();
                let mut weights = [C64::new(0.0, 0.0); 3];
                let mut lus = Vec::with_capacity(3);
                for k in 0..3 {
                    let s: C64 = (0..3).map(|i| tinv[(k, i)]).sum();
                    weights[k] = t[(2, k)] * s;
                    let shifted = lin(&[(lambda[k], m), (re(-h), a)])?;
                    lus.push(SparseLu::new(&shifted).map_err(setup_err)?);
                }
                RadauFactors::Decoupled { lus, weights }
            }
        };
        Ok(Radau5Stepper { factors, a: a.clone(), h })
    }

    pub fn step(&self, u: &[C64], step: usize) -> Result<Vec<C64>, SystemError> {
        let mut hau = self.a.matvec(u).map_err(at_step(step))?;
        hau.iter_mut().for_each(|v| *v *= self.h);
        let mut out = u.to_vec();
        match &self.factors {
            RadauFactors::Block { lu, n } => {
                let mut rhs = Vec::with_capacity(3 * n);
                for _ in 0..3 {
                    rhs.extend_from_slice(&hau);
                }
                let z = lu.solve(&rhs).map_err(at_step(step))?;
                for (o, dz) in out.iter_mut().zip(&z[2 * n..]) {
                    *o += dz;
                }
            }
            RadauFactors::Decoupled { lus, weights } => {
                for (lu, w) in lus.iter().zip(weights) {
                    let wk = lu.solve(&hau).map_err(at_step(step))?;
                    for (o, dz) in out.iter_mut().zip(&wk) {
                        *o += w * dz;
                    }
                }
            }
        }
        Ok(out)
    }
}

fn det3(a: &DenseMatrix<C64>) -> C64 {
    a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)]) - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)])
}

/// Eigenvalues and eigenvectors (as columns) of a 3x3 matrix with simple
/// spectrum near the Radau IIA(5) one.
fn eigen3(a: &DenseMatrix<C64>) -> Result<([C64; 3], DenseMatrix<C64>), LinalgError> {
    let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let minor = |i: usize, j: usize| a[(i, i)] * a[(j, j)] - a[(i, j)] * a[(j, i)];
    let c1 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    let det = det3(a);
    let p = |l: C64| ((l - tr) * l + c1) * l - det;
    let dp = |l: C64| (l * 3.0 - tr * 2.0) * l + c1;
    let mut lambda = [
        C64::new(3.637834252744496, 0.0),
        C64::new(2.681082873627752, 3.050430199247411),
        C64::new(2.681082873627752, -3.050430199247411),
    ];
    for l in lambda.iter_mut() {
        for _ in 0..8 {
            *l -= p(*l) / dp(*l);
        }
    }
    let mut t = DenseMatrix::zeros(3, 3);
    for (k, &l) in lambda.iter().enumerate() {
        let r = |i: usize, j: usize| if i == j { a[(i, j)] - l } else { a[(i, j)] };
        let v = [
            r(0, 1) * r(1, 2) - r(0, 2) * r(1, 1),
            r(0, 2) * r(1, 0) - r(0, 0) * r(1, 2),
            r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0),
        ];
        let norm = libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if norm == 0.0 {
            return Err(LinalgError::Singular { pivot: k });
        }
        for i in 0..3 {
            t[(i, k)] = v[i] / norm;
        }
    }
    Ok((lambda, t))
}

/// The three-level scheme for second-order equations with the `s0 = iω`
/// grading:
///
/// `M0 δ²u − M₋₁ δu + M₋₂ ⟨u⟩ = c² L0 ⟨u⟩ − c² L1 δu − k² M0 ⟨u⟩`
///
/// with `δ²u = (u⁺ − 2u + u⁻)/h²`, `δu = (u⁺ − u⁻)/(2h)` and
/// `⟨u⟩ = (u⁺ + 2u + u⁻)/4`.
pub struct WaveStepper {
    lu: SparseLu,
    r_cur: CsrMatrix,
    r_prev: CsrMatrix,
    start: SparseLu,
    start_rhs: CsrMatrix,
}

impl WaveStepper {
    pub fn new(ops: &WaveOperators, h: f64) -> Result<Self, SystemError> {
        check_step(h)?;
        let c2 = ops.c * ops.c;
        let k2 = ops.k * ops.k;
        let (h1, h2) = (1.0 / h, 1.0 / (h * h));
        let (m0, mm1, mm2, l0, l1) = (&ops.m0, &ops.mm1, &ops.mm2, &ops.l0, &ops.l1);
        let lhs = lin(&[
            (re(h2 + 0.25 * k2), m0),
            (re(-0.5 * h1), mm1),
            (re(0.25), mm2),
            (re(-0.25 * c2), l0),
            (re(0.5 * c2 * h1), l1),
        ])?;
        let r_cur = lin(&[(re(2.0 * h2 - 0.5 * k2), m0), (re(-0.5), mm2), (re(0.5 * c2), l0)])?;
        let r_prev = lin(&[
            (re(-h2 - 0.25 * k2), m0),
            (re(-0.5 * h1), mm1),
            (re(-0.25), mm2),
            (re(0.25 * c2), l0),
            (re(0.5 * c2 * h1), l1),
        ])?;
        // First step: trapezoidal rule on (u, u') with u'(0) = 0, after
        // eliminating the velocity.
        let start_lhs = lin(&[
            (re(2.0 * h2 + 0.5 * k2), m0),
            (re(-h1), mm1),
            (re(0.5), mm2),
            (re(-0.5 * c2), l0),
            (re(c2 * h1), l1),
        ])?;
        let start_rhs = lin(&[
            (re(2.0 * h2 - 0.5 * k2), m0),
            (re(-h1), mm1),
            (re(-0.5), mm2),
            (re(0.5 * c2), l0),
            (re(c2 * h1), l1),
        ])?;
        let lu = SparseLu::new(&lhs).map_err(setup_err)?;
        let start = SparseLu::new(&start_lhs).map_err(setup_err)?;
        Ok(WaveStepper { lu, r_cur, r_prev, start, start_rhs })
    }

    /// `u¹` from `u⁰` and zero initial velocity.
    pub fn bootstrap(&self, u0: &[C64]) -> Result<Vec<C64>, SystemError> {
        let b = self.start_rhs.matvec(u0).map_err(at_step(1))?;
        self.start.solve(&b).map_err(at_step(1))
    }

    pub fn step(&self, u: &[C64], u_prev: &[C64], step: usize) -> Result<Vec<C64>, SystemError> {
        let mut b = self.r_cur.matvec(u).map_err(at_step(step))?;
        let b2 = self.r_prev.matvec(u_prev).map_err(at_step(step))?;
        for (x, y) in b.iter_mut().zip(&b2) {
            *x += y;
        }
        self.lu.solve(&b).map_err(at_step(step))
    }
}
