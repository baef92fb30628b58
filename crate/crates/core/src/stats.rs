//! Scalar and small dense linear-algebra primitives.
//!
//! The standard normal CDF is evaluated as `Φ(z) = ½·erfc(−z/√2)` using the
//! FreeBSD/Sun `s_erf.c` rational approximations (via `libm`), whose
//! documented error is below one ulp for `erfc` over the whole real line.
//! Evaluating through `erfc` rather than `1 + erf` keeps full relative
//! accuracy in the lower tail, so `Φ(−8) ≈ 6.2e−16` is resolved instead of
//! cancelling to zero. Absolute error of `Φ` is therefore well under 1e-15.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain { what: "std_normal_pdf", value: z });
    }
    Ok(pdf_unchecked(z))
}

pub fn std_normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain { what: "std_normal_cdf", value: z });
    }
    Ok(cdf_unchecked(z))
}

#[inline]
pub(crate) fn pdf_unchecked(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

#[inline]
pub(crate) fn cdf_unchecked(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            Error::check_dim(n_cols, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { rows: n_rows, cols: n_cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        Error::check_dim(self.cols, other.rows)?;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.cols, v.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn add_diagonal(&mut self, value: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += value;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cholesky factor `L` with `L·Lᵀ = A`. Entries above the diagonal are zero
/// and every diagonal entry is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangularFactor {
    entries: Matrix,
}

impl LowerTriangularFactor {
    pub fn dim(&self) -> usize {
        self.entries.rows
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Returns `L·Lᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        self.entries.matmul(&self.entries.transpose()).expect("square factor")
    }

    /// Solves `L·z = b` by forward substitution.
    pub fn forward_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        Error::check_dim(n, b.len())?;
        let l = &self.entries;
        let mut z = vec![0.0; n];
        for i in 0..n {
            let s = dot(&l.row(i)[..i], &z[..i]);
            z[i] = (b[i] - s) / l[(i, i)];
        }
        Ok(z)
    }

    /// Solves `Lᵀ·x = z` by back substitution.
    pub fn backward_solve(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        Error::check_dim(n, z.len())?;
        let l = &self.entries;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
            x[i] = (z[i] - s) / l[(i, i)];
        }
        Ok(x)
    }

    /// Solves `(L·Lᵀ)·x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let z = self.forward_solve(b)?;
        self.backward_solve(&z)
    }
}

/// Unblocked inner-product Cholesky factorization.
///
/// Input that is asymmetric beyond `1e-12·max|A|` is symmetrized by
/// averaging `A` and `Aᵀ` first. Fails with the index of the first
/// non-positive pivot.
pub fn cholesky(a: &Matrix) -> Result<LowerTriangularFactor> {
    if !a.is_square() {
        return Err(Error::contract(format!("cholesky needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    let scale = a.max_abs();
    let asymmetric =
        (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).any(|(i, j)| (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale);

    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)] - dot(&l.row(j)[..j], &l.row(j)[..j]);
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        pivot = pivot.sqrt();
        l[(j, j)] = pivot;
        for i in j + 1..n {
            let a_ij = if asymmetric { 0.5 * (a[(i, j)] + a[(j, i)]) } else { a[(i, j)] };
            let s = dot(&l.row(i)[..j], &l.row(j)[..j]);
            l[(i, j)] = (a_ij - s) / pivot;
        }
    }
    Ok(LowerTriangularFactor { entries: l })
}

pub fn solve_cholesky(factor: &LowerTriangularFactor, b: &[f64]) -> Result<Vec<f64>> {
    factor.solve(b)
}
