//! Random matrices drawn from [`RngStream`]s.

use rug::Float;

use crate::error::Result;
use crate::linalg::{Matrix, MatrixFlags};
use crate::numerics::{Complex, PrecisionConfig, Real, RngStream};

/// Matrix of independent complex standard normals.
pub fn complex_normal_matrix(rng: &mut RngStream, rows: usize, cols: usize, cfg: &PrecisionConfig) -> Matrix {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(rng.draw_complex_normal(cfg));
    }
    Matrix::from_vec(rows, cols, data).expect("sized data")
}

/// `G G*` for the given factor, flagged PSD.
pub fn gram(factor: &Matrix) -> Matrix {
    (factor * &factor.adjoint()).hermitian_part().with_flags(MatrixFlags::HERMITIAN | MatrixFlags::PSD)
}

/// Gram matrix of a `d x d` complex normal factor (positive definite with
/// probability one).
pub fn random_psd(rng: &mut RngStream, d: usize, cfg: &PrecisionConfig) -> Matrix {
    gram(&complex_normal_matrix(rng, d, d, cfg))
}

/// Unitary from modified Gram–Schmidt (applied twice) on a complex normal
/// matrix.
pub fn random_unitary(rng: &mut RngStream, d: usize, cfg: &PrecisionConfig) -> Matrix {
    let g = complex_normal_matrix(rng, d, d, cfg);
    let prec = g.prec();
    let mut cols: Vec<Vec<Complex>> = (0..d).map(|j| (0..d).map(|i| g.get(i, j).clone()).collect()).collect();
    for j in 0..d {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = Complex::zero(prec);
                for i in 0..d {
                    dot.add_mul(&cols[k][i].conj(), &cols[j][i]);
                }
                for i in 0..d {
                    let sub = &cols[k][i] * &dot;
                    cols[j][i] -= &sub;
                }
            }
        }
        let mut norm = Float::new(prec);
        for z in &cols[j] {
            norm += z.norm_sqr();
        }
        let inv = norm.sqrt().recip();
        for z in cols[j].iter_mut() {
            *z = z.scale(&inv);
        }
    }
    Matrix::from_fn(d, d, prec, |i, j| cols[j][i].clone())
}

/// `U diag(values) U*` with a random unitary `U`.
pub fn random_hermitian_with_spectrum(rng: &mut RngStream, values: &[Real], cfg: &PrecisionConfig) -> Matrix {
    let u = random_unitary(rng, values.len(), cfg);
    let d = Matrix::diag(values, cfg.bits());
    (&(&u * &d) * &u.adjoint()).hermitian_part()
}

/// Random Hermitian matrix (not necessarily PSD).
pub fn random_hermitian(rng: &mut RngStream, d: usize, cfg: &PrecisionConfig) -> Matrix {
    let g = complex_normal_matrix(rng, d, d, cfg);
    (&g + &g.adjoint()).scale(&cfg.real(0.5)).hermitian_part()
}

/// Uniform draws in `[lo, hi)`.
pub fn uniform_vec(rng: &mut RngStream, n: usize, lo: f64, hi: f64, cfg: &PrecisionConfig) -> Result<Vec<Real>> {
    let (a, b) = (cfg.real(lo), cfg.real(hi));
    (0..n).map(|_| rng.draw_uniform(&a, &b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let cfg = PrecisionConfig::default();
        let mut rng = RngStream::new(5, 0);
        let u = random_unitary(&mut rng, 4, &cfg);
        let err = (&u.adjoint() * &u).try_sub(&Matrix::identity(4, cfg.bits())).unwrap().frobenius_norm();
        assert!(err < cfg.tau());
    }
}
