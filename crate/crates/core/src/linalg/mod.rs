//! Dense extended-precision matrix algebra.

mod eig;
mod functions;
mod matrix;
mod ops;

pub use eig::{certify_positive_definite, certify_psd, hermitian_eig, hermitian_eigenvalues, min_eigenvalue, EigResult};
pub use functions::{loewner_leq, psd_power, similarity_power, svd_values, LoewnerVerdict, SingularValues};
pub use matrix::{Matrix, MatrixFlags, MatrixJson};
pub use ops::{compound, condition_estimate, determinant, inverse, operator_norm};
