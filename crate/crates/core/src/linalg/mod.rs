//! Dense symmetric and rectangular matrices, the symmetric eigensolver and the
//! spectral calculus built on it.

mod eigen;
mod matrix;
mod spectral;

pub use eigen::{eig_sym, SpectralDecomposition};
pub use matrix::{RectMatrix, SymMatrix};
pub use spectral::{
    apply_fn, hermitian_dilation, leading_singular_triple, matrix_fn, rank1_psi, singular_values,
    soft_threshold_svd, soft_threshold_sym, soft_threshold_sym_spectral, upper_right_block,
    MatrixNorms, SingularTriple,
};

pub(crate) use matrix::norm2;
