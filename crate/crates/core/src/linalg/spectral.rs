use crate::error::{Error, Result};
use crate::influence::InfluenceKind;

use super::eigen::{eig_sym, SpectralDecomposition};
use super::matrix::{norm2, RectMatrix, SymMatrix};

/// `f(A) = U f(Λ) Uᵀ`.
pub fn matrix_fn(f: impl Fn(f64) -> f64, a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eig_sym(a)?;
    apply_fn(&eig, f)
}

/// Applies `f` to a decomposition already at hand.
pub fn apply_fn(eig: &SpectralDecomposition, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let mapped = eig.map(&f);
    if let Some(l) = eig.eigenvalues().iter().zip(mapped.eigenvalues()).find(|(_, v)| !v.is_finite()) {
        return Err(Error::numeric(format!("matrix function is not finite at eigenvalue {}", l.0)));
    }
    Ok(mapped.compose())
}

/// The symmetric dilation `[[0, A], [Aᵀ, 0]]`.
pub fn hermitian_dilation(a: &RectMatrix) -> SymMatrix {
    let (r, c) = a.shape();
    let n = r + c;
    let mut data = vec![0.0; n * n];
    for i in 0..r {
        for j in 0..c {
            let v = a.get(i, j);
            data[i * n + r + j] = v;
            data[(r + j) * n + i] = v;
        }
    }
    SymMatrix::from_symmetric_data(n, data)
}

/// Upper-right `rows × cols` block of a symmetric `(rows + cols)`-square matrix.
pub fn upper_right_block(m: &SymMatrix, rows: usize, cols: usize) -> RectMatrix {
    assert_eq!(m.dim(), rows + cols, "dimension mismatch");
    let mut out = RectMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out.set(i, j, m.get(i, rows + j));
        }
    }
    out
}

/// Operator, Frobenius and nuclear norms.
pub trait MatrixNorms {
    /// Largest singular value.
    fn op_norm(&self) -> Result<f64>;
    /// Square root of the sum of squared entries.
    fn frob_norm(&self) -> f64;
    /// Sum of singular values.
    fn nuclear_norm(&self) -> Result<f64>;
}

impl MatrixNorms for SymMatrix {
    fn op_norm(&self) -> Result<f64> {
        let eig = eig_sym(self)?;
        let evs = eig.eigenvalues();
        Ok(evs[0].abs().max(evs[evs.len() - 1].abs()))
    }

    fn frob_norm(&self) -> f64 {
        SymMatrix::frob_norm(self)
    }

    fn nuclear_norm(&self) -> Result<f64> {
        Ok(eig_sym(self)?.eigenvalues().iter().map(|l| l.abs()).sum())
    }
}

impl MatrixNorms for RectMatrix {
    fn op_norm(&self) -> Result<f64> {
        Ok(singular_values(self)?[0])
    }

    fn frob_norm(&self) -> f64 {
        RectMatrix::frob_norm(self)
    }

    fn nuclear_norm(&self) -> Result<f64> {
        Ok(singular_values(self)?.iter().sum())
    }
}

/// Singular values in nonincreasing order (`min(rows, cols)` of them),
/// read off the top of the dilation's spectrum.
pub fn singular_values(a: &RectMatrix) -> Result<Vec<f64>> {
    let k = a.rows().min(a.cols());
    let eig = eig_sym(&hermitian_dilation(a))?;
    Ok(eig.eigenvalues()[..k].iter().map(|&s| s.max(0.0)).collect())
}

/// `(s, u, v)` with unit singular vectors `u` and `v`.
pub type SingularTriple = (f64, Vec<f64>, Vec<f64>);

/// Leading singular triple `(s₁, u₁, v₁)`; `None` for the zero matrix.
pub fn leading_singular_triple(a: &RectMatrix) -> Result<Option<SingularTriple>> {
    let (r, _) = a.shape();
    let eig = eig_sym(&hermitian_dilation(a))?;
    let s = eig.eigenvalues()[0];
    if s <= 0.0 {
        return Ok(None);
    }
    let w = eig.eigenvector(0);
    let mut u = w[..r].to_vec();
    let mut v = w[r..].to_vec();
    let (nu, nv) = (norm2(&u), norm2(&v));
    u.iter_mut().for_each(|x| *x /= nu);
    v.iter_mut().for_each(|x| *x /= nv);
    Ok(Some((s, u, v)))
}

/// Eigenvalue soft-thresholding `Σ max(λⱼ - τ/2, 0) vⱼvⱼᵀ`, returned in
/// spectral form so the shrunken eigenvalues are available exactly.
pub fn soft_threshold_sym_spectral(a: &SymMatrix, tau: f64) -> Result<SpectralDecomposition> {
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("threshold must be nonnegative, got {tau}")));
    }
    Ok(eig_sym(a)?.map(|l| (l - 0.5 * tau).max(0.0)))
}

pub fn soft_threshold_sym(a: &SymMatrix, tau: f64) -> Result<SymMatrix> {
    Ok(soft_threshold_sym_spectral(a, tau)?.compose())
}

/// Singular-value soft-thresholding `Σ max(sᵢ - level, 0) uᵢvᵢᵀ`.
///
/// Computed as the upper-right block of `g(H(A))` for the odd map
/// `g(λ) = sign(λ) max(|λ| - level, 0)`, which sends the `±sᵢ` eigenpairs of
/// the dilation to the dilation of the thresholded matrix.
pub fn soft_threshold_svd(a: &RectMatrix, level: f64) -> Result<RectMatrix> {
    if !(level >= 0.0) {
        return Err(Error::domain(format!("threshold level must be nonnegative, got {level}")));
    }
    let (r, c) = a.shape();
    let shrunk = matrix_fn(|l| l.signum() * (l.abs() - level).max(0.0), &hermitian_dilation(a))?;
    Ok(upper_right_block(&shrunk, r, c))
}

/// `ψ(θλ) u uᵀ`, the influence function of the rank-one matrix `θλ u uᵀ`.
pub fn rank1_psi(lambda: f64, u: &[f64], kind: InfluenceKind, theta: f64) -> Result<SymMatrix> {
    if !(theta > 0.0) {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    if u.is_empty() || (norm2(u) - 1.0).abs() > 1e-8 {
        return Err(Error::domain("rank-one direction must be a unit vector"));
    }
    if !lambda.is_finite() {
        return Err(Error::domain("rank-one eigenvalue must be finite"));
    }
    let mut out = SymMatrix::zeros(u.len());
    let w = kind.apply(theta * lambda);
    if w != 0.0 {
        out.add_outer(w, u);
    }
    Ok(out)
}
