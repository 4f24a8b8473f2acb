//! Dense complex linear algebra: the matrix type, a Hermitian Jacobi
//! eigensolver, the operator norm and top-eigenspace extraction.

mod eigen;
mod eigenspace;
mod matrix;

pub use eigen::{hermitian_defect, hermitian_eig, hermitian_eigenvalues, SpectralData, HERMITIAN_REL_TOL};
pub use eigenspace::{compress, gram_spectrum, max_eigenspace, operator_norm, MaxEigenspace};
pub use matrix::{inner, vec_norm, ComplexMatrix};
