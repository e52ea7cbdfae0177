use std::fmt;

use crate::error::{Error, Result};

/// Dense real symmetric matrix stored row-major.
///
/// Inputs are symmetrized on construction by averaging `a[i][j]` and
/// `a[j][i]`, so the stored entries satisfy `a[i][j] == a[j][i]` exactly.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        check_finite(&data)?;
        let mut m = SymMatrix { dim, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("symmetric matrix rows must form a square array"));
        }
        SymMatrix::new(dim, rows.concat())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        SymMatrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        check_finite(diag)?;
        if diag.is_empty() {
            return Err(Error::domain("matrix dimension must be positive"));
        }
        let mut m = SymMatrix::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = v;
        }
        Ok(m)
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Result<Self> {
        check_finite(v)?;
        let mut m = SymMatrix::zeros(v.len().max(1));
        if !v.is_empty() {
            m.add_outer(1.0, v);
        }
        Ok(m)
    }

    /// Wraps data that is symmetric by construction.
    pub(crate) fn from_symmetric_data(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        let mut m = SymMatrix { dim, data };
        m.symmetrize();
        m
    }

    fn symmetrize(&mut self) {
        let d = self.dim;
        for i in 0..d {
            for j in (i + 1)..d {
                let v = 0.5 * (self.data[i * d + j] + self.data[j * d + i]);
                self.data[i * d + j] = v;
                self.data[j * d + i] = v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        SymMatrix { dim: self.dim, data }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        SymMatrix { dim: self.dim, data }
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn add_assign(&mut self, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale_mut(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    /// `self += weight · v vᵀ`.
    pub fn add_outer(&mut self, weight: f64, v: &[f64]) {
        let d = self.dim;
        assert_eq!(v.len(), d, "dimension mismatch");
        for i in 0..d {
            let wi = weight * v[i];
            if wi == 0.0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate().skip(i) {
                let x = wi * vj;
                self.data[i * d + j] += x;
                if j != i {
                    self.data[j * d + i] += x;
                }
            }
        }
    }

    /// `x ↦ A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        self.data.chunks(self.dim).map(|row| dot(row, x)).collect()
    }

    /// `Q A Qᵀ` for a square `Q`.
    pub fn conjugate(&self, q: &RectMatrix) -> SymMatrix {
        assert!(q.cols() == self.dim && q.rows() == self.dim, "dimension mismatch");
        let qa = q.matmul(&self.to_rect());
        let out = qa.matmul(&q.transpose());
        SymMatrix::from_symmetric_data(self.dim, out.into_data())
    }

    pub fn to_rect(&self) -> RectMatrix {
        RectMatrix { rows: self.dim, cols: self.dim, data: self.data.clone() }
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymMatrix").field("dim", &self.dim).field("rows", &self.to_rows()).finish()
    }
}

/// Dense real `rows × cols` matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(RectMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::domain("ragged rows"));
        }
        RectMatrix::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        RectMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub(crate) fn from_data_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        RectMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> RectMatrix {
        let mut out = RectMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    pub fn matmul(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = RectMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!(self.shape(), other.shape(), "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RectMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RectMatrix) -> RectMatrix {
        assert_eq!(self.shape(), other.shape(), "dimension mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RectMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, factor: f64) -> RectMatrix {
        RectMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Frobenius inner product `tr(Aᵀ B)`.
    pub fn inner(&self, other: &RectMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dimension mismatch");
        dot(&self.data, &other.data)
    }

    /// `A Aᵀ`.
    pub fn gram_rows(&self) -> SymMatrix {
        let out = self.matmul(&self.transpose());
        SymMatrix::from_symmetric_data(self.rows, out.data)
    }

    /// The symmetric matrix with the same entries; fails unless square.
    pub fn to_sym(&self) -> Result<SymMatrix> {
        if self.rows != self.cols {
            return Err(Error::domain("matrix is not square"));
        }
        SymMatrix::new(self.rows, self.data.clone())
    }
}

impl From<&SymMatrix> for RectMatrix {
    fn from(m: &SymMatrix) -> Self {
        m.to_rect()
    }
}

impl fmt::Debug for RectMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RectMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.to_rows())
            .finish()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::domain(format!("matrix entry {i} is not finite ({})", data[i]))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.trace(), 4.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymMatrix::new(2, vec![1.0; 3]).is_err());
        assert!(SymMatrix::new(0, vec![]).is_err());
        assert!(SymMatrix::new(1, vec![f64::NAN]).is_err());
        assert!(RectMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(RectMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn outer_and_products() {
        let v = [1.0, 2.0, -1.0];
        let m = SymMatrix::outer(&v).unwrap();
        assert_eq!(m.get(1, 2), -2.0);
        assert_eq!(m.mul_vec(&v), vec![6.0, 12.0, -6.0]);
        let a = RectMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let g = a.gram_rows();
        assert_eq!(g.to_rows(), vec![vec![14.0, 32.0], vec![32.0, 77.0]]);
        assert_eq!(a.transpose().shape(), (3, 2));
        assert_eq!(a.max_abs(), 6.0);
    }
}
