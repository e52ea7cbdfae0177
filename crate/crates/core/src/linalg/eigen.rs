//! Symmetric eigendecomposition by Householder tridiagonalization followed by
//! the implicit QL algorithm with Wilkinson-type shifts (EISPACK `tred2`/`tql2`).

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

use super::matrix::{RectMatrix, SymMatrix};

/// Spectral decomposition `A = U diag(λ) Uᵀ` with eigenvalues in nonincreasing order.
///
/// Columns of `basis` are the eigenvectors. Each eigenvector is normalised so
/// that its largest-magnitude component is positive (ties go to the lowest
/// index), which makes the output reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    basis: RectMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &RectMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.basis.column(k)
    }

    /// Replaces every eigenvalue by `f(λ)` keeping the eigenvectors.
    ///
    /// The result is no longer sorted if `f` is not monotone.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpectralDecomposition {
        SpectralDecomposition {
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            basis: self.basis.clone(),
        }
    }

    /// `U diag(λ) Uᵀ`.
    pub fn compose(&self) -> SymMatrix {
        let mut out = SymMatrix::zeros(self.dim());
        self.accumulate_into(&mut out, 1.0, |l| l);
        out
    }

    /// `out += weight · U diag(f(λ)) Uᵀ`, skipping eigenvalues mapped to zero.
    pub(crate) fn accumulate_into(&self, out: &mut SymMatrix, weight: f64, f: impl Fn(f64) -> f64) {
        let d = self.dim();
        let mut column = vec![0.0; d];
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let w = weight * f(l);
            if w == 0.0 {
                continue;
            }
            for (i, c) in column.iter_mut().enumerate() {
                *c = self.basis.get(i, k);
            }
            out.add_outer(w, &column);
        }
    }
}

/// Computes the spectral decomposition of a symmetric matrix.
pub fn eig_sym(a: &SymMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let mut v = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));

    let mut basis = vec![0.0; n * n];
    let mut eigenvalues = Vec::with_capacity(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigenvalues.push(d[old_col]);
        let mut pivot = 0;
        for i in 1..n {
            if v[i * n + old_col].abs() > v[pivot * n + old_col].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot * n + old_col] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            basis[i * n + new_col] = sign * v[i * n + old_col];
        }
    }
    Ok(SpectralDecomposition { eigenvalues, basis: RectMatrix::from_data_unchecked(n, n, basis) })
}

/// Householder reduction to tridiagonal form. On exit `d` holds the diagonal,
/// `e[1..]` the subdiagonal and `v` the accumulated orthogonal transform.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
                v[idx(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = 0.0;
    }
    v[idx(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix produced by [`tred2`].
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_iterations = 30 * n.max(1);
    let mut iterations = 0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iterations {
                    return Err(Error::numeric(format!(
                        "symmetric eigensolver exceeded {max_iterations} QL iterations"
                    )));
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vh = v[idx(k, i + 1)];
                        v[idx(k, i + 1)] = s * v[idx(k, i)] + c * vh;
                        v[idx(k, i)] = c * v[idx(k, i)] - s * vh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::numeric("symmetric eigensolver produced non-finite eigenvalues"));
    }
    Ok(())
}
