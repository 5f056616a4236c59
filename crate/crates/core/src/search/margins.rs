use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{certify_psd, hermitian_eigenvalues, psd_power, svd_values, Matrix};
use crate::numerics::{Exponent, PrecisionConfig, Real};
use crate::theorems::decompose_pair;

/// A violation margin (positive means violated) and the size of the
/// quantities it was computed from.
#[derive(Clone, Debug)]
pub struct Margin {
    pub value: Real,
    pub scale: Real,
    /// Ky Fan order for the singular-value objective.
    pub k: Option<usize>,
}

impl Margin {
    /// `value > factor * tau * scale`.
    pub fn exceeds(&self, factor: u32, cfg: &PrecisionConfig) -> bool {
        self.value > Float::with_val(cfg.bits(), cfg.tol(&self.scale) * factor)
    }

    pub fn relative(&self) -> f64 {
        Float::with_val(self.value.prec(), &self.value / &self.scale).to_f64()
    }
}

fn check_pair(a: &Matrix, b: &Matrix, p: &Exponent) -> Result<()> {
    if !a.is_square() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    if !p.is_positive() {
        return Err(Error::Domain(format!("exponent {p} must be positive")));
    }
    Ok(())
}

fn max_excess(lhs: &Matrix, rhs: &Matrix, cfg: &PrecisionConfig) -> Result<Margin> {
    let diff = lhs.try_sub(rhs)?.hermitian_part();
    let top = hermitian_eigenvalues(&diff, cfg)?.swap_remove(0);
    let scale = rhs.frobenius_norm().max(&cfg.one());
    Ok(Margin { value: top, scale, k: None })
}

/// `lmax((A B^{1/p} A)^{2p} - A^{4p})`.
pub fn violation_margin(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<Real> {
    Ok(violation_margin_scaled(a, b, p, cfg)?.value)
}

pub fn violation_margin_scaled(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<Margin> {
    check_pair(a, b, p)?;
    let prec = cfg.bits();
    let pr = p.to_real(cfg);
    let two_p = Float::with_val(prec, &pr * 2u32);
    let b = certify_psd(b, cfg)?;
    let b_root = psd_power(&b, &Float::with_val(prec, pr.recip_ref()), cfg)?;
    let inner = (&(a * &b_root) * a).hermitian_part();
    let lhs = psd_power(&inner, &two_p, cfg)?;
    let a2 = (a * a).hermitian_part();
    let rhs = psd_power(&a2, &two_p, cfg)?;
    max_excess(&lhs, &rhs, cfg)
}

/// `lmax((ABA)^2 - A^4)`: failure of the premise side, the quantity of
/// interest when the conclusion side holds (converse implication, `p > 1`).
pub fn converse_violation_margin(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<Margin> {
    check_pair(a, b, p)?;
    let aba = (&(a * b) * a).hermitian_part();
    let lhs = (&aba * &aba).hermitian_part();
    let a2 = (a * a).hermitian_part();
    let rhs = (&a2 * &a2).hermitian_part();
    max_excess(&lhs, &rhs, cfg)
}

/// `sum_{j<=k} sigma_j(B^p A^p) - sum_{j<=k} sigma_j((BA)^p)` for every
/// `k = 1..=d`, with the larger of the two full sums (at least 1) as scale.
pub fn direct_sigma_margins(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<(Vec<Real>, Real)> {
    check_pair(a, b, p)?;
    let prec = cfg.bits();
    let pr = p.to_real(cfg);
    let a = certify_psd(a, cfg)?;
    let b = certify_psd(b, cfg)?;
    let split = svd_values(&(&psd_power(&b, &pr, cfg)? * &psd_power(&a, &pr, cfg)?), cfg)?;
    let dec = decompose_pair(&a, &b, cfg)?;
    let joint = svd_values(&dec.ba_power(&pr)?, cfg)?;
    let mut margins = Vec::with_capacity(split.len());
    let mut acc = Float::new(prec);
    for (l, r) in split.values().iter().zip(joint.values()) {
        acc += l;
        acc -= r;
        margins.push(acc.clone());
    }
    let scale = split.sum().max(&joint.sum()).max(&cfg.one());
    Ok((margins, scale))
}

pub fn direct_sigma_margin(a: &Matrix, b: &Matrix, p: &Exponent, k: usize, cfg: &PrecisionConfig) -> Result<Real> {
    if k == 0 || k > a.rows() {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={}", a.rows())));
    }
    Ok(direct_sigma_margins(a, b, p, cfg)?.0.swap_remove(k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use crate::sample::random_psd;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn commuting_premise_pair_has_no_violation() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let a = Matrix::diag(&[cfg.real(2), cfg.real(0.3)], cfg.bits());
        let b = Matrix::diag(&[cfg.real(0.7), cfg.real(1)], cfg.bits());
        for p in ["0.3", "0.95", "2"] {
            let m = violation_margin_scaled(&a, &b, &e(p), &cfg).unwrap();
            assert!(!m.exceeds(1, &cfg));
            let m = converse_violation_margin(&a, &b, &e(p), &cfg).unwrap();
            assert!(!m.exceeds(1, &cfg));
        }
    }

    #[test]
    fn p_one_and_commuting_give_zero() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let mut rng = RngStream::new(6, 0);
        let a = random_psd(&mut rng, 3, &cfg);
        let b = random_psd(&mut rng, 3, &cfg);
        let (m, scale) = direct_sigma_margins(&a, &b, &e("1"), &cfg).unwrap();
        assert!(m.iter().all(|v| v.clone().abs() <= cfg.tol(&scale)));
        let da = Matrix::diag(&[cfg.real(2), cfg.real(0.3), cfg.real(5)], cfg.bits());
        let db = Matrix::diag(&[cfg.real(0.7), cfg.real(1), cfg.real(4)], cfg.bits());
        for k in 1..=3 {
            let v = direct_sigma_margin(&da, &db, &e("1.15"), k, &cfg).unwrap();
            assert!(v.abs() <= cfg.tol(&scale));
        }
        assert!(direct_sigma_margin(&da, &db, &e("1.15"), 4, &cfg).is_err());
    }
}
