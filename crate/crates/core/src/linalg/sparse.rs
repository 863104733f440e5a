use alloc::vec;
use alloc::vec::Vec;

use super::{DenseMatrix, LinalgError};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Complex matrix in compressed sparse row form. Column indices are sorted
/// within each row and free of duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

/// Collects `(row, col, value)` contributions tagged with an ordering key.
///
/// Duplicates are summed in `(row, col, tag)` order, so the assembled values do
/// not depend on the order in which contributions were pushed as long as
/// every contribution carries a distinct tag.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(u32, u32, u64, C64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        assert!(nrows <= u32::MAX as usize && ncols <= u32::MAX as usize);
        TripletBuilder { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        let mut b = Self::new(nrows, ncols);
        b.entries.reserve(cap);
        b
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, tag: u64, value: C64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        if value != ZERO {
            self.entries.push((row as u32, col as u32, tag, value));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<C64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for &(r, c, _, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c as usize);
                values.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Assemble from untagged triplets; duplicates are summed in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut b = TripletBuilder::with_capacity(nrows, ncols, triplets.len());
        for (k, &(i, j, v)) in triplets.iter().enumerate() {
            b.push(i, j, k as u64, v);
        }
        b.build()
    }

    /// Raw constructor; validates sortedness and bounds.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self, LinalgError> {
        if row_ptr.len() != nrows + 1 {
            return Err(LinalgError::DimensionMismatch { expected: nrows + 1, found: row_ptr.len() });
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(LinalgError::DimensionMismatch { expected: col_idx.len(), found: values.len() });
        }
        for i in 0..nrows {
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c >= ncols) {
                return Err(LinalgError::DimensionMismatch { expected: ncols, found: ncols });
            }
        }
        Ok(CsrMatrix { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn from_dense(a: &DenseMatrix<C64>) -> Self {
        let mut trip = Vec::new();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a[(i, j)] != ZERO {
                    trip.push((i, j, a[(i, j)]));
                }
            }
        }
        Self::from_triplets(a.rows(), a.cols(), &trip)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Iterate `(col, value)` over row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>, LinalgError> {
        let mut y = vec![ZERO; self.nrows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) -> Result<(), LinalgError> {
        if x.len() != self.ncols {
            return Err(LinalgError::DimensionMismatch { expected: self.ncols, found: x.len() });
        }
        if y.len() != self.nrows {
            return Err(LinalgError::DimensionMismatch { expected: self.nrows, found: y.len() });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
        Ok(())
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![ZERO; self.nnz()];
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[k];
                let dst = next[c];
                next[c] += 1;
                col_idx[dst] = i;
                values[dst] = self.values[k];
            }
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, row_ptr, col_idx, values }
    }

    pub fn scale(&self, s: C64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `Σ coef_k · A_k` over matrices of equal shape; the result pattern is
    /// the union of the input patterns.
    pub fn lin_comb(terms: &[(C64, &CsrMatrix)]) -> Result<CsrMatrix, LinalgError> {
        let (nrows, ncols) = match terms.first() {
            Some((_, a)) => (a.nrows, a.ncols),
            None => return Ok(CsrMatrix::zeros(0, 0)),
        };
        for (_, a) in terms {
            if a.nrows != nrows || a.ncols != ncols {
                return Err(LinalgError::DimensionMismatch { expected: nrows, found: a.nrows });
            }
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![ZERO; ncols];
        let mut seen = vec![false; ncols];
        let mut cols: Vec<usize> = Vec::new();
        for i in 0..nrows {
            cols.clear();
            for &(coef, a) in terms {
                for (c, v) in a.row(i) {
                    if !seen[c] {
                        seen[c] = true;
                        cols.push(c);
                    }
                    acc[c] += coef * v;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                col_idx.push(c);
                values.push(acc[c]);
                acc[c] = ZERO;
                seen[c] = false;
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix { nrows, ncols, row_ptr, col_idx, values })
    }

    /// Keep rows and columns listed in `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut trip = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (c, v) in self.row(old_i) {
                if map[c] != usize::MAX {
                    trip.push((new_i, map[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), keep.len(), &trip)
    }

    pub fn to_dense(&self) -> DenseMatrix<C64> {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (c, v) in self.row(i) {
                d[(i, c)] = v;
            }
        }
        d
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// True when every stored value in row `i` is exactly zero.
    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).all(|(_, v)| v == ZERO)
    }
}
