use crate::error::{Error, Result};

/// Compressed sparse row matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from coordinate triplets. Entries may come in any order;
    /// duplicates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted = triplets.to_vec();
        if let Some(&(r, c, _)) = sorted.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::Config(format!("entry ({r}, {c}) outside a {rows}x{cols} matrix")));
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    /// `(column, value)` pairs of one row in column order.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn abs(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// `out += A·x`
    pub fn mul_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[i] * x[self.col_idx[i]];
            }
            *o += acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_add(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }
}

const RADIUS_TOLERANCE: f64 = 1e-10;
const RADIUS_MAX_ITERATIONS: usize = 100_000;

/// Perron root of a square non-negative matrix by power iteration.
///
/// Iterates on `A + cI` with `c` the mean row sum: the shift leaves the
/// Perron vector alone but breaks ties with other peripheral eigenvalues
/// (cyclic structure), which would otherwise stall plain power iteration.
/// Stops when the Collatz–Wielandt bounds `min (Av)ᵢ/vᵢ ≤ ρ ≤ max (Av)ᵢ/vᵢ`
/// close to the tolerance, or when the estimate stops moving (reducible
/// matrices whose Perron vector has zero entries never close the bounds).
pub fn estimate_spectral_radius(matrix: &CsrMatrix) -> Result<f64> {
    if matrix.rows != matrix.cols {
        return Err(Error::Config(format!(
            "spectral radius needs a square matrix, got {}x{}",
            matrix.rows, matrix.cols
        )));
    }
    if matrix.values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Config("spectral radius estimate needs non-negative entries".into()));
    }
    let n = matrix.rows;
    if n == 0 || matrix.values.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let shift = matrix.values.iter().sum::<f64>() / n as f64;
    let mut v = vec![1.0 / n as f64; n];
    let mut w = vec![0.0; n];
    let mut last = f64::NAN;
    let mut still = 0;
    for _ in 0..RADIUS_MAX_ITERATIONS {
        w.iter_mut().zip(&v).for_each(|(w, v)| *w = shift * v);
        matrix.mul_add(&v, &mut w);
        let (mut lo, mut hi) = (f64::INFINITY, 0f64);
        for (wi, vi) in w.iter().zip(&v) {
            if *vi > 0.0 {
                let ratio = wi / vi;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        let total: f64 = w.iter().sum();
        let estimate = total - shift;
        if hi - lo <= RADIUS_TOLERANCE * hi {
            return Ok((0.5 * (lo + hi) - shift).max(0.0));
        }
        if (estimate - last).abs() <= 0.1 * RADIUS_TOLERANCE * estimate.abs().max(f64::MIN_POSITIVE) {
            still += 1;
            if still >= 10 {
                return Ok(estimate.max(0.0));
            }
        } else {
            still = 0;
        }
        last = estimate;
        // v sums to one, so Σw = ρ + c once v is the Perron vector
        v.iter_mut().zip(&w).for_each(|(v, w)| *v = w / total);
    }
    Err(Error::Estimation {
        iterations: RADIUS_MAX_ITERATIONS,
        last,
    })
}
