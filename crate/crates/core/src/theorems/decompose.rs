use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{certify_psd, hermitian_eig, Matrix, MatrixFlags};
use crate::numerics::{real_power, PrecisionConfig, Real};

/// Factorisation of a pair `A > 0`, `B >= 0` as `A = S S*` and
/// `A B = S diag(lambda) S^-1`, hence `B = S^-* diag(lambda) S^-1` and
/// `B A = S^-* diag(lambda) S*`.
#[derive(Clone, Debug)]
pub struct PairDecomposition {
    pub s: Matrix,
    pub s_inv: Matrix,
    /// Eigenvalues of `AB`, descending, clamped at zero.
    pub lambda: Vec<Real>,
    /// `||A - S S*||_F`.
    pub residual_a: Real,
    /// `||AB - S diag(lambda) S^-1||_F`.
    pub residual_ab: Real,
}

impl PairDecomposition {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda_matrix(&self) -> Matrix {
        Matrix::diag(&self.lambda, self.s.prec())
    }

    fn lambda_pow(&self, p: &Real) -> Result<Matrix> {
        let powered = self.lambda.iter().map(|v| real_power(v, p)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::diag(&powered, self.s.prec()))
    }

    /// `S^-* diag(lambda) S^-1`, which reproduces `B`.
    pub fn b_reconstruction(&self) -> Matrix {
        let s_inv_adj = self.s_inv.adjoint();
        (&(&s_inv_adj * &self.lambda_matrix()) * &self.s_inv).hermitian_part()
    }

    /// `(BA)^p = S^-* diag(lambda^p) S*`.
    pub fn ba_power(&self, p: &Real) -> Result<Matrix> {
        Ok(&(&self.s_inv.adjoint() * &self.lambda_pow(p)?) * &self.s.adjoint())
    }

    /// `(AB)^p = S diag(lambda^p) S^-1`.
    pub fn ab_power(&self, p: &Real) -> Result<Matrix> {
        Ok(&(&self.s * &self.lambda_pow(p)?) * &self.s_inv)
    }

    /// `C = S^-1 S^-*`, positive definite.
    pub fn c_matrix(&self) -> Matrix {
        (&self.s_inv * &self.s_inv.adjoint())
            .hermitian_part()
            .with_flags(MatrixFlags::HERMITIAN | MatrixFlags::PSD | MatrixFlags::POSITIVE_DEFINITE)
    }

    /// Bound the residuals must respect: `tau (1 + ||A||)(1 + ||B||)`.
    pub fn residual_bound(a: &Matrix, b: &Matrix, cfg: &PrecisionConfig) -> Real {
        let prec = cfg.bits();
        let na = Float::with_val(prec, a.frobenius_norm() + 1u32);
        let nb = Float::with_val(prec, b.frobenius_norm() + 1u32);
        na * nb * cfg.tau()
    }
}

/// Builds the decomposition without any non-hermitian eigensolver:
/// `M = A^{1/2} B A^{1/2} = U diag(lambda) U*`, then `S = A^{1/2} U` and
/// `S^-1 = U* A^{-1/2}`.
pub fn decompose_pair(a: &Matrix, b: &Matrix, cfg: &PrecisionConfig) -> Result<PairDecomposition> {
    if a.dim() != b.dim() || !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    let a = a.certify_hermitian(cfg)?;
    let b = certify_psd(b, cfg)?;
    let prec = cfg.bits();
    let ea = hermitian_eig(&a, cfg)?;
    let min = ea.min_value();
    if min.is_nan() || *min <= 0 {
        return Err(Error::NotPositiveDefinite(format!("{:.6e}", min.to_f64())));
    }
    let sqrt_vals: Vec<Real> = ea.values.iter().map(|v| v.clone().sqrt()).collect();
    let inv_sqrt_vals: Vec<Real> = sqrt_vals.iter().map(|v| v.clone().recip()).collect();
    let a_half = ea.reconstruct_with(&sqrt_vals);
    let a_inv_half = ea.reconstruct_with(&inv_sqrt_vals);

    let m = (&(&a_half * &b) * &a_half).hermitian_part();
    let em = hermitian_eig(&m, cfg)?;
    let mscale = em.values[0].clone().abs();
    let neg_tol = cfg.tol(&mscale);
    let mut lambda = Vec::with_capacity(em.values.len());
    for v in &em.values {
        if *v < Float::with_val(prec, -&neg_tol) {
            return Err(Error::NotPsd(format!("A^1/2 B A^1/2 eigenvalue {:.6e}", v.to_f64())));
        }
        lambda.push(if v.is_sign_negative() { Float::new(prec) } else { v.clone() });
    }
    let s = &a_half * &em.vectors;
    let s_inv = &em.vectors.adjoint() * &a_inv_half;

    let lam = Matrix::diag(&lambda, prec);
    let residual_a = a.try_sub(&(&s * &s.adjoint()))?.frobenius_norm();
    let ab = &a * &b;
    let residual_ab = ab.try_sub(&(&(&s * &lam) * &s_inv))?.frobenius_norm();
    Ok(PairDecomposition { s, s_inv, lambda, residual_a, residual_ab })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_psd;
    use crate::numerics::RngStream;

    #[test]
    fn identity_a_gives_unitary_s() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let b = Matrix::diag(&[cfg.real(1), cfg.real(5), cfg.real(2)], cfg.bits());
        let a = Matrix::identity(3, cfg.bits());
        let dec = decompose_pair(&a, &b, &cfg).unwrap();
        let lam: Vec<f64> = dec.lambda.iter().map(|v| v.to_f64()).collect();
        assert_eq!(lam.iter().map(|v| v.round() as i64).collect::<Vec<_>>(), vec![5, 2, 1]);
        let uu = &dec.s.adjoint() * &dec.s;
        assert!(uu.try_sub(&Matrix::identity(3, cfg.bits())).unwrap().frobenius_norm() < cfg.tau());
        assert!(dec.residual_a < cfg.tau() && dec.residual_ab < cfg.tau());
    }

    #[test]
    fn diagonal_a_identity_b() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let a = Matrix::diag(&[cfg.real(4), cfg.real(1)], cfg.bits());
        let b = Matrix::identity(2, cfg.bits());
        let dec = decompose_pair(&a, &b, &cfg).unwrap();
        assert!((dec.lambda[0].to_f64() - 4.0).abs() < 1e-30 && (dec.lambda[1].to_f64() - 1.0).abs() < 1e-30);
        let ss = &dec.s * &dec.s.adjoint();
        assert!(ss.try_sub(&a).unwrap().frobenius_norm() < cfg.tau());
    }

    #[test]
    fn rejects_singular_a() {
        let cfg = PrecisionConfig::with_digits(30).unwrap();
        let a = Matrix::diag(&[cfg.real(1), cfg.zero()], cfg.bits());
        let b = Matrix::identity(2, cfg.bits());
        assert!(matches!(decompose_pair(&a, &b, &cfg), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn random_pair_reconstructs_b_and_powers() {
        let cfg = PrecisionConfig::with_digits(50).unwrap();
        let mut rng = RngStream::new(17, 0);
        let a = random_psd(&mut rng, 3, &cfg);
        let b = random_psd(&mut rng, 3, &cfg);
        let dec = decompose_pair(&a, &b, &cfg).unwrap();
        let bound = PairDecomposition::residual_bound(&a, &b, &cfg);
        assert!(dec.residual_a <= bound && dec.residual_ab <= bound);
        let rb = dec.b_reconstruction().try_sub(&b).unwrap().frobenius_norm();
        assert!(rb <= bound);
        // (BA)^1 = BA
        let ba = &b * &a;
        let err = dec.ba_power(&cfg.one()).unwrap().try_sub(&ba).unwrap().frobenius_norm();
        assert!(err <= bound);
        // (AB)^{1/2} squared is AB
        let half = dec.ab_power(&cfg.real(0.5)).unwrap();
        let err = (&half * &half).try_sub(&(&a * &b)).unwrap().frobenius_norm();
        assert!(err <= bound);
    }
}
