//! Left-looking sparse LU (Gilbert–Peierls) with threshold partial pivoting.
//!
//! Columns are visited in a minimum-degree order of `A + Aᵀ`; the diagonal
//! entry is preferred as pivot when it is within `PIVOT_TOLERANCE` of the
//! column maximum, which keeps the fill close to the symmetric prediction.

use alloc::vec;
use alloc::vec::Vec;

use super::{minimum_degree, CsrMatrix, LinalgError};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const PIVOT_TOLERANCE: f64 = 0.01;

/// Sparse LU factors `P A Q = L U`. Immutable once built; solves take `&self`
/// and can run concurrently.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// column order: step `k` eliminates original column `q[k]`
    q: Vec<usize>,
    /// row permutation: original row `i` became pivot row `pinv[i]`
    pinv: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<u32>,
    l_val: Vec<C64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<u32>,
    u_val: Vec<C64>,
}

impl SparseLu {
    /// Factor with a minimum-degree column order.
    pub fn new(a: &CsrMatrix) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
        }
        let q = minimum_degree(a);
        Self::with_order(a, q)
    }

    /// Factor with a caller-supplied column order (`q[k]` = column at step k).
    pub fn with_order(a: &CsrMatrix, q: Vec<usize>) -> Result<Self, LinalgError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(LinalgError::NotSquare { rows: n, cols: a.ncols() });
        }
        if q.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: q.len() });
        }
        // column access: CSR of the transpose
        let at = a.transpose();
        let (ap, ai, ax) = (at.row_ptr(), at.col_idx(), at.values());
        let anorm = a.max_abs().max(f64::MIN_POSITIVE);
        let sing_tol = f64::EPSILON * anorm * 16.0;

        const NONE: usize = usize::MAX;
        let mut pinv = vec![NONE; n];
        let mut x = vec![ZERO; n];
        let mut mark = vec![0usize; n];
        let mut stamp = 0usize;
        let mut xi = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];

        let guess = 4 * a.nnz() + n;
        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx: Vec<u32> = Vec::with_capacity(guess);
        let mut l_val: Vec<C64> = Vec::with_capacity(guess);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut u_idx: Vec<u32> = Vec::with_capacity(guess);
        let mut u_val: Vec<C64> = Vec::with_capacity(guess);

        for k in 0..n {
            l_ptr.push(l_val.len());
            u_ptr.push(u_val.len());
            let col = q[k];

            // reach of A(:,col) in the graph of L, topologically ordered in xi[top..n]
            stamp += 1;
            let mut top = n;
            for p in ap[col]..ap[col + 1] {
                let start = ai[p];
                if mark[start] == stamp {
                    continue;
                }
                let mut head = 0usize;
                stack[0] = start;
                loop {
                    let j = stack[head];
                    let jnew = pinv[j];
                    let end = if jnew == NONE { 0 } else { l_ptr.get(jnew + 1).copied().unwrap_or(l_val.len()) };
                    if mark[j] != stamp {
                        mark[j] = stamp;
                        pstack[head] = if jnew == NONE { 0 } else { l_ptr[jnew] };
                    }
                    let mut descended = false;
                    let mut pp = pstack[head];
                    while pp < end {
                        let i = l_idx[pp] as usize;
                        pp += 1;
                        if mark[i] != stamp {
                            pstack[head] = pp;
                            head += 1;
                            stack[head] = i;
                            descended = true;
                            break;
                        }
                    }
                    if !descended {
                        top -= 1;
                        xi[top] = j;
                        if head == 0 {
                            break;
                        }
                        head -= 1;
                    }
                }
            }

            // sparse triangular solve x = L \ A(:,col)
            for &i in &xi[top..n] {
                x[i] = ZERO;
            }
            for p in ap[col]..ap[col + 1] {
                x[ai[p]] = ax[p];
            }
            for px in top..n {
                let j = xi[px];
                let jnew = pinv[j];
                if jnew == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == ZERO {
                    continue;
                }
                let end = l_ptr.get(jnew + 1).copied().unwrap_or(l_val.len());
                // first entry of each L column is the unit diagonal
                for pp in l_ptr[jnew] + 1..end {
                    x[l_idx[pp] as usize] -= l_val[pp] * xj;
                }
            }

            // pivot selection
            let mut ipiv = NONE;
            let mut amax = -1.0f64;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let t = x[i].norm();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else {
                    u_idx.push(pinv[i] as u32);
                    u_val.push(x[i]);
                }
            }
            if ipiv == NONE || amax <= sing_tol {
                return Err(LinalgError::Singular { pivot: k });
            }
            if pinv[col] == NONE && mark[col] == stamp && x[col].norm() >= PIVOT_TOLERANCE * amax {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u_idx.push(k as u32);
            u_val.push(pivot);
            pinv[ipiv] = k;
            l_idx.push(ipiv as u32);
            l_val.push(C64::new(1.0, 0.0));
            let inv_pivot = C64::new(1.0, 0.0) / pivot;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    l_idx.push(i as u32);
                    l_val.push(x[i] * inv_pivot);
                }
                x[i] = ZERO;
            }
        }
        l_ptr.push(l_val.len());
        u_ptr.push(u_val.len());
        for r in &mut l_idx {
            *r = pinv[*r as usize] as u32;
        }
        Ok(SparseLu { n, q, pinv, l_ptr, l_idx, l_val, u_ptr, u_idx, u_val })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries in `L` and `U` (diagonals included).
    pub fn factor_nnz(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        let mut out = vec![ZERO; self.n];
        self.solve_into(b, &mut out)?;
        Ok(out)
    }

    pub fn solve_into(&self, b: &[C64], out: &mut [C64]) -> Result<(), LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: b.len() });
        }
        if out.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: out.len() });
        }
        let mut y = vec![ZERO; n];
        for (i, &bi) in b.iter().enumerate() {
            y[self.pinv[i]] = bi;
        }
        for j in 0..n {
            let yj = y[j];
            if yj == ZERO {
                continue;
            }
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                y[self.l_idx[p] as usize] -= self.l_val[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            let yj = y[j] / self.u_val[last];
            y[j] = yj;
            if yj == ZERO {
                continue;
            }
            for p in self.u_ptr[j]..last {
                y[self.u_idx[p] as usize] -= self.u_val[p] * yj;
            }
        }
        for k in 0..n {
            out[self.q[k]] = y[k];
        }
        Ok(())
    }
}
