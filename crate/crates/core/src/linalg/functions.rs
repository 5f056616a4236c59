use rug::Float;
use serde::Serialize;

use super::eig::{hermitian_eig, hermitian_eigenvalues};
use super::matrix::{Matrix, MatrixFlags};
use super::ops::{condition_estimate, inverse};
use crate::error::{Error, Result};
use crate::numerics::{real_power, real_to_string, PrecisionConfig, Real};

/// Nonnegative values in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValues(Vec<Real>);

impl SingularValues {
    pub fn new(values: Vec<Real>) -> Result<Self> {
        if values.iter().any(|v| v.is_sign_negative() && !v.is_zero()) {
            return Err(Error::Domain("negative singular value".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Unsorted);
        }
        Ok(SingularValues(values))
    }

    /// Sorts descending first.
    pub fn from_unsorted(mut values: Vec<Real>) -> Result<Self> {
        values.sort_by(|a, b| b.partial_cmp(a).expect("NaN singular value"));
        Self::new(values)
    }

    pub fn values(&self) -> &[Real] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entrywise `p`-th power (order is preserved for `p > 0`).
    pub fn powf(&self, p: &Real) -> Result<SingularValues> {
        let out = self.0.iter().map(|v| real_power(v, p)).collect::<Result<Vec<_>>>()?;
        SingularValues::from_unsorted(out)
    }

    pub fn scale(&self, c: &Real) -> SingularValues {
        SingularValues(self.0.iter().map(|v| Float::with_val(v.prec(), v * c)).collect())
    }

    pub fn sum(&self) -> Real {
        let prec = self.0.first().map_or(64, |v| v.prec());
        let mut s = Float::new(prec);
        for v in &self.0 {
            s += v;
        }
        s
    }

    /// Product of the `k` largest values.
    pub fn top_product(&self, k: usize) -> Real {
        let prec = self.0.first().map_or(64, |v| v.prec());
        let mut s = Float::with_val(prec, 1);
        for v in self.0.iter().take(k) {
            s *= v;
        }
        s
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(real_to_string).collect()
    }
}

impl Serialize for SingularValues {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

/// Singular values of a square matrix: square roots of the eigenvalues of
/// `X* X`. Values below `tau ||X||` carry absolute, not relative, accuracy.
pub fn svd_values(x: &Matrix, cfg: &PrecisionConfig) -> Result<SingularValues> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!("singular values of {:?}", x.dim())));
    }
    let gram = (&x.adjoint() * x).hermitian_part();
    let eig = hermitian_eigenvalues(&gram, cfg)?;
    let values = eig
        .into_iter()
        .map(|v| if v.is_sign_negative() { Float::new(v.prec()) } else { v.sqrt() })
        .collect();
    SingularValues::new(values)
}

/// `H^p` for PSD `H` via its eigen-decomposition. Eigenvalues below
/// `tau ||H||` count as zero.
pub fn psd_power(h: &Matrix, p: &Real, cfg: &PrecisionConfig) -> Result<Matrix> {
    let eig = hermitian_eig(h, cfg)?;
    let prec = eig.vectors.prec();
    let scale = eig.values.iter().map(|v| v.clone().abs()).fold(Float::new(prec), |a, b| a.max(&b));
    let neg_tol = cfg.tol(&scale);
    let clamp = Float::with_val(prec, &scale * cfg.tau());
    let min = eig.min_value();
    if *min < Float::with_val(prec, -&neg_tol) {
        return Err(Error::NotPsd(format!("{:.6e}", min.to_f64())));
    }
    let mut singular = false;
    let mapped = eig
        .values
        .iter()
        .map(|v| {
            if *v <= clamp {
                singular = true;
                Float::new(prec)
            } else {
                v.clone()
            }
        })
        .collect::<Vec<_>>();
    if singular && (p.is_zero() || p.is_sign_negative()) {
        return Err(Error::Singularity(format!("singular PSD matrix to the power {}", p.to_f64())));
    }
    let powered = mapped.iter().map(|v| real_power(v, p)).collect::<Result<Vec<_>>>()?;
    let definite = powered.iter().all(|v| *v > 0);
    let mut flags = MatrixFlags::HERMITIAN | MatrixFlags::PSD;
    if definite {
        flags |= MatrixFlags::POSITIVE_DEFINITE;
    }
    Ok(eig.reconstruct_with(&powered).with_flags(flags))
}

/// `S diag(lambda^p) S^-1` for invertible `S` and a nonnegative diagonal.
pub fn similarity_power(s: &Matrix, lambda: &Matrix, p: &Real, cfg: &PrecisionConfig) -> Result<Matrix> {
    if !lambda.has(MatrixFlags::DIAGONAL) || !lambda.has(MatrixFlags::NONNEGATIVE_DIAGONAL) {
        return Err(Error::Domain("eigenvalue matrix must be nonnegative diagonal".into()));
    }
    if s.dim() != lambda.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", s.dim(), lambda.dim())));
    }
    let cond = condition_estimate(s, cfg)?;
    let limit = cfg.real(Float::u_pow_u(10, cfg.digits() / 2));
    if cond > limit {
        return Err(Error::IllConditioned(format!("condition estimate {:.3e}", cond.to_f64())));
    }
    let s_inv = inverse(s, cfg)?;
    let powered = lambda.real_diagonal().iter().map(|v| real_power(v, p)).collect::<Result<Vec<_>>>()?;
    let d = Matrix::diag(&powered, s.prec());
    Ok(&(s * &d) * &s_inv)
}

/// Loewner comparison `X <= Y`.
#[derive(Clone, Debug)]
pub struct LoewnerVerdict {
    pub verdict: bool,
    /// Minimum eigenvalue of `Y - X`.
    pub margin: Real,
    /// `tau * max(1, ||X||, ||Y||)`.
    pub tolerance: Real,
}

impl LoewnerVerdict {
    /// `|margin| <= tolerance`.
    pub fn is_boundary(&self) -> bool {
        self.margin.clone().abs() <= self.tolerance
    }
}

pub fn loewner_leq(x: &Matrix, y: &Matrix, cfg: &PrecisionConfig) -> Result<LoewnerVerdict> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.dim(), y.dim())));
    }
    let x = x.certify_hermitian(cfg)?;
    let y = y.certify_hermitian(cfg)?;
    let diff = y.try_sub(&x)?.hermitian_part();
    let margin = hermitian_eigenvalues(&diff, cfg)?.pop().expect("empty matrix");
    let nx = x.frobenius_norm();
    let ny = y.frobenius_norm();
    let tolerance = cfg.tol(&nx.max(&ny));
    let verdict = margin >= Float::with_val(margin.prec(), -&tolerance);
    Ok(LoewnerVerdict { verdict, margin, tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Complex;

    fn close(a: &Real, b: &Real, cfg: &PrecisionConfig) -> bool {
        Float::with_val(a.prec(), a - b).abs() < cfg.tau()
    }

    #[test]
    fn svd_small_examples() {
        let cfg = PrecisionConfig::default();
        let nil = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]], &cfg).unwrap();
        let s = svd_values(&nil, &cfg).unwrap();
        assert!(close(&s.values()[0], &cfg.one(), &cfg) && close(&s.values()[1], &cfg.zero(), &cfg));

        // Quadratic-formula oracle: X*X = [[1,1],[1,2]] has eigenvalues (3 ± sqrt5)/2.
        let x = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]], &cfg).unwrap();
        let s = svd_values(&x, &cfg).unwrap();
        let sqrt5 = cfg.real(5).sqrt();
        let tr = cfg.real(3);
        let disc = (Float::with_val(cfg.bits(), &tr * &tr) - 4u32).sqrt();
        let big = Float::with_val(cfg.bits(), &tr + &disc) / 2u32;
        let small = Float::with_val(cfg.bits(), &tr - &disc) / 2u32;
        assert!(close(&s.values()[0], &big.sqrt(), &cfg));
        assert!(close(&s.values()[1], &small.sqrt(), &cfg));
        let golden = (cfg.one() + &sqrt5) / 2u32;
        assert!(close(&s.values()[0], &golden, &cfg));
        assert!(close(&s.values()[1], &((sqrt5 - 1u32) / 2u32), &cfg));
    }

    #[test]
    fn psd_power_examples() {
        let cfg = PrecisionConfig::default();
        let d = Matrix::diag(&[cfg.real(4), cfg.real(9)], cfg.bits());
        let r = psd_power(&d, &cfg.real(0.5), &cfg).unwrap();
        assert!(close(&r.get(0, 0).re, &cfg.real(2), &cfg));
        assert!(close(&r.get(1, 1).re, &cfg.real(3), &cfg));

        let h = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]], &cfg).unwrap();
        let r = psd_power(&h, &cfg.real(0.5), &cfg).unwrap();
        let sqrt3 = cfg.real(3).sqrt();
        let diag = (sqrt3.clone() + 1u32) / 2u32;
        let off = (sqrt3 - 1u32) / 2u32;
        assert!(close(&r.get(0, 0).re, &diag, &cfg) && close(&r.get(0, 1).re, &off, &cfg));
        // Squaring recovers the input.
        let sq = &r * &r;
        assert!(sq.try_sub(&h).unwrap().frobenius_norm() < cfg.tau());
        let same = psd_power(&h, &cfg.one(), &cfg).unwrap();
        assert!(same.try_sub(&h).unwrap().frobenius_norm() < cfg.tau());
    }

    #[test]
    fn psd_power_errors() {
        let cfg = PrecisionConfig::with_digits(30).unwrap();
        let neg = Matrix::diag(&[cfg.real(1), cfg.real(-1)], cfg.bits());
        assert!(matches!(psd_power(&neg, &cfg.real(0.5), &cfg), Err(Error::NotPsd(_))));
        let sing = Matrix::diag(&[cfg.real(1), cfg.zero()], cfg.bits());
        assert!(matches!(psd_power(&sing, &cfg.real(-0.5), &cfg), Err(Error::Singularity(_))));
        assert!(matches!(psd_power(&sing, &cfg.zero(), &cfg), Err(Error::Singularity(_))));
        assert!(psd_power(&sing, &cfg.real(0.5), &cfg).is_ok());
    }

    #[test]
    fn similarity_power_diagonal_case() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let lambda = Matrix::diag(&[cfg.real(4), cfg.zero(), cfg.real(0.25)], cfg.bits());
        let r = similarity_power(&Matrix::identity(3, cfg.bits()), &lambda, &cfg.real(0.5), &cfg).unwrap();
        assert!(close(&r.get(0, 0).re, &cfg.real(2), &cfg));
        assert!(close(&r.get(1, 1).re, &cfg.zero(), &cfg));
        assert!(close(&r.get(2, 2).re, &cfg.real(0.5), &cfg));
        let bad = Matrix::diag(&[cfg.real(-1), cfg.one(), cfg.one()], cfg.bits());
        assert!(similarity_power(&Matrix::identity(3, cfg.bits()), &bad, &cfg.one(), &cfg).is_err());
        let sing = Matrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], &cfg).unwrap();
        assert!(matches!(
            similarity_power(&sing, &lambda, &cfg.one(), &cfg),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn loewner_examples() {
        let cfg = PrecisionConfig::with_digits(30).unwrap();
        let i = Matrix::identity(2, cfg.bits());
        let r = loewner_leq(&i, &i.scale(&cfg.real(2)), &cfg).unwrap();
        assert!(r.verdict && close(&r.margin, &cfg.one(), &cfg));
        let x = Matrix::diag(&[cfg.real(1), cfg.real(3)], cfg.bits());
        let y = Matrix::diag(&[cfg.real(2), cfg.real(2)], cfg.bits());
        let r = loewner_leq(&x, &y, &cfg).unwrap();
        assert!(!r.verdict && close(&r.margin, &cfg.real(-1), &cfg));
        let r = loewner_leq(&x, &x, &cfg).unwrap();
        assert!(r.verdict && r.is_boundary());
        assert!(loewner_leq(&x, &Matrix::identity(3, cfg.bits()), &cfg).is_err());
        let mut c = Matrix::identity(2, cfg.bits());
        c.set(0, 1, Complex::one(cfg.bits()));
        assert!(matches!(loewner_leq(&c, &i, &cfg), Err(Error::NotHermitian(_))));
    }
}
