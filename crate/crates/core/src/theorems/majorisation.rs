use serde::{Deserialize, Serialize};

use super::decompose::decompose_pair;
use super::validity::{power_product_direction, similarity_power_proven, split_power_proven};
use super::{input_hash, Direction};
use crate::error::{Error, Result};
use crate::linalg::{certify_psd, inverse, psd_power, similarity_power, svd_values, Matrix, MatrixFlags, SingularValues};
use crate::majorize::{weak_majorisation_leq, MajorisationReport, ReportJson};
use crate::numerics::{real_to_string, Exponent, PrecisionConfig, Real};

/// A weak-majorisation check together with the claim being tested.
#[derive(Clone, Debug)]
pub struct MajorisationCheck {
    pub report: MajorisationReport,
    pub direction: Direction,
    pub p: Exponent,
    /// The exponent lies in a range where the inequality is proven.
    pub proven: bool,
    /// Shift `eps` applied as `A + eps I` when `A` was singular.
    pub perturbation: Option<Real>,
    pub input_hash: String,
}

impl MajorisationCheck {
    pub fn verdict(&self) -> bool {
        self.report.verdict
    }

    /// Failed even though the exponent is in the proven range.
    pub fn unexpected_violation(&self) -> bool {
        self.proven && !self.report.verdict
    }

    pub fn to_json(&self) -> CheckJson {
        CheckJson {
            direction: self.direction,
            p: self.p.to_string(),
            proven: self.proven,
            perturbation: self.perturbation.as_ref().map(real_to_string),
            input_hash: self.input_hash.clone(),
            report: self.report.to_json(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckJson {
    pub direction: Direction,
    pub p: String,
    pub proven: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub perturbation: Option<String>,
    pub input_hash: String,
    pub report: ReportJson,
}

fn same_square(a: &Matrix, b: &Matrix) -> Result<usize> {
    if !a.is_square() || a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    Ok(a.rows())
}

fn positive(p: &Exponent) -> Result<()> {
    if !p.is_positive() {
        return Err(Error::Domain(format!("exponent {p} must be positive")));
    }
    Ok(())
}

fn oriented(
    smaller_forward: &SingularValues,
    larger_forward: &SingularValues,
    direction: Direction,
    cfg: &PrecisionConfig,
) -> Result<MajorisationReport> {
    match direction {
        Direction::Forward => weak_majorisation_leq(smaller_forward, larger_forward, cfg),
        Direction::Reversed => weak_majorisation_leq(larger_forward, smaller_forward, cfg),
    }
}

/// Compares `sigma(B^p A^p)` with `sigma((BA)^p)`. Forward tests
/// `sigma(B^p A^p) ≺_w sigma((BA)^p)`, reversed the opposite.
///
/// `(BA)^p` is formed as `S^-* Lambda^p S*` from [`decompose_pair`]. A
/// singular `A` is replaced by `A + eps I`, `eps = tau * max(1, ||A||)`.
pub fn check_split_power(
    a: &Matrix,
    b: &Matrix,
    p: &Exponent,
    direction: Direction,
    cfg: &PrecisionConfig,
) -> Result<MajorisationCheck> {
    let d = same_square(a, b)?;
    positive(p)?;
    let hash = input_hash(&[a, b], Some(p));
    let a = certify_psd(a, cfg)?;
    let b = certify_psd(b, cfg)?;
    let (a, perturbation) = if a.has(MatrixFlags::POSITIVE_DEFINITE) {
        (a, None)
    } else {
        let norm = a.frobenius_norm();
        let eps = cfg.tol(&norm);
        let shifted = a.add_identity(&eps)?;
        (shifted, Some(eps))
    };
    let pr = p.to_real(cfg);
    let bp = psd_power(&b, &pr, cfg)?;
    let ap = psd_power(&a, &pr, cfg)?;
    let split = svd_values(&(&bp * &ap), cfg)?;
    let dec = decompose_pair(&a, &b, cfg)?;
    let joint = svd_values(&dec.ba_power(&pr)?, cfg)?;
    let report = oriented(&split, &joint, direction, cfg)?;
    Ok(MajorisationCheck {
        report,
        direction,
        p: p.clone(),
        proven: split_power_proven(d, p, direction),
        perturbation,
        input_hash: hash,
    })
}

/// Compares `sigma(A^p B^p)` with `sigma^p(AB)`: forward for `p <= 1`,
/// reversed for `p > 1`. Holds in every dimension.
pub fn check_power_product(a: &Matrix, b: &Matrix, p: &Exponent, cfg: &PrecisionConfig) -> Result<MajorisationCheck> {
    same_square(a, b)?;
    positive(p)?;
    let hash = input_hash(&[a, b], Some(p));
    let a = certify_psd(a, cfg)?;
    let b = certify_psd(b, cfg)?;
    let pr = p.to_real(cfg);
    let ap = psd_power(&a, &pr, cfg)?;
    let bp = psd_power(&b, &pr, cfg)?;
    let lhs = svd_values(&(&ap * &bp), cfg)?;
    let rhs = svd_values(&(&a * &b), cfg)?.powf(&pr)?;
    let direction = power_product_direction(p);
    let report = oriented(&lhs, &rhs, direction, cfg)?;
    Ok(MajorisationCheck { report, direction, p: p.clone(), proven: true, perturbation: None, input_hash: hash })
}

/// For `X = S Lambda S^-1`, compares `sigma^p(X)` with `sigma(X^p)`: forward
/// (`sigma^p(X) ≺_w sigma(X^p)`) for `p <= 1`, reversed for `p > 1`.
pub fn check_similarity_power(
    s: &Matrix,
    lambda: &Matrix,
    p: &Exponent,
    cfg: &PrecisionConfig,
) -> Result<MajorisationCheck> {
    let d = same_square(s, lambda)?;
    positive(p)?;
    let hash = input_hash(&[s, lambda], Some(p));
    let pr = p.to_real(cfg);
    let xp = similarity_power(s, lambda, &pr, cfg)?;
    let s_inv = inverse(s, cfg)?;
    let x = &(s * lambda) * &s_inv;
    let powered = svd_values(&x, cfg)?.powf(&pr)?;
    let of_power = svd_values(&xp, cfg)?;
    let direction = if p.le_int(1) { Direction::Forward } else { Direction::Reversed };
    let report = oriented(&powered, &of_power, direction, cfg)?;
    Ok(MajorisationCheck {
        report,
        direction,
        p: p.clone(),
        proven: similarity_power_proven(d, p),
        perturbation: None,
        input_hash: hash,
    })
}

/// `(S, Lambda)` with `AB = S Lambda S^-1` for `A > 0`, `B >= 0`.
pub fn similarity_pair_from_psd(a: &Matrix, b: &Matrix, cfg: &PrecisionConfig) -> Result<(Matrix, Matrix)> {
    let dec = decompose_pair(a, b, cfg)?;
    let lambda = dec.lambda_matrix();
    Ok((dec.s, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;
    use crate::numerics::RngStream;
    use crate::sample::random_psd;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::with_digits(40).unwrap()
    }

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn diag(vals: &[f64], cfg: &PrecisionConfig) -> Matrix {
        Matrix::diag(&vals.iter().map(|v| cfg.real(*v)).collect::<Vec<_>>(), cfg.bits())
    }

    #[test]
    fn commuting_pair_is_equality_both_ways() {
        let cfg = cfg();
        let a = diag(&[3.0, 0.5, 2.0], &cfg);
        let b = diag(&[0.2, 4.0, 1.0], &cfg);
        for dir in [Direction::Forward, Direction::Reversed] {
            let c = check_split_power(&a, &b, &e("0.7"), dir, &cfg).unwrap();
            assert!(c.verdict() && c.report.boundary);
            assert!(c.perturbation.is_none());
        }
    }

    #[test]
    fn p_one_gives_zero_margins() {
        let cfg = cfg();
        let mut rng = RngStream::new(3, 0);
        let a = random_psd(&mut rng, 3, &cfg);
        let b = random_psd(&mut rng, 3, &cfg);
        let c = check_split_power(&a, &b, &e("1"), Direction::Forward, &cfg).unwrap();
        let t = cfg.tol(&c.report.scale);
        assert!(c.report.partial_margins.iter().all(|m| m.clone().abs() <= t));
        let c = check_power_product(&a, &b, &e("1"), &cfg).unwrap();
        assert!(c.report.partial_margins.iter().all(|m| m.clone().abs() <= t));
    }

    #[test]
    fn two_by_two_extension_and_half() {
        let cfg = cfg();
        let mut rng = RngStream::new(11, 0);
        for _ in 0..5 {
            let a = random_psd(&mut rng, 2, &cfg);
            let b = random_psd(&mut rng, 2, &cfg);
            let c = check_split_power(&a, &b, &e("0.8"), Direction::Forward, &cfg).unwrap();
            assert!(c.proven && c.verdict());
            let a = random_psd(&mut rng, 3, &cfg);
            let b = random_psd(&mut rng, 3, &cfg);
            let c = check_split_power(&a, &b, &e("0.5"), Direction::Forward, &cfg).unwrap();
            assert!(c.proven && c.verdict());
            let c = check_power_product(&a, &b, &e("0.5"), &cfg).unwrap();
            assert!(c.verdict() && c.report.min_margin().is_sign_positive());
        }
    }

    #[test]
    fn singular_a_is_perturbed() {
        let cfg = cfg();
        let a = diag(&[1.0, 0.0], &cfg);
        let mut rng = RngStream::new(5, 0);
        let b = random_psd(&mut rng, 2, &cfg);
        let c = check_split_power(&a, &b, &e("0.5"), Direction::Forward, &cfg).unwrap();
        assert!(c.perturbation.is_some() && c.verdict());
    }

    #[test]
    fn normal_similarity_is_equality() {
        let cfg = cfg();
        let mut rng = RngStream::new(9, 0);
        let u = crate::sample::random_unitary(&mut rng, 3, &cfg);
        let lam = diag(&[2.0, 0.5, 0.1], &cfg);
        let c = check_similarity_power(&u, &lam, &e("0.5"), &cfg).unwrap();
        assert!(c.verdict() && c.report.boundary);
    }

    // sigma of a real 2x2 matrix from its Frobenius norm and determinant.
    fn sv2(m: [[f64; 2]; 2]) -> (f64, f64) {
        let f2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
        let disc = (f2 * f2 - 4.0 * det * det).sqrt();
        (((f2 + disc) / 2.0).sqrt(), ((f2 - disc) / 2.0).sqrt())
    }

    #[test]
    fn shear_similarity_closed_form() {
        let cfg = cfg();
        let s = Matrix::from_real_rows(&[&[2.0, 2.0], &[0.0, 2.0]], &cfg).unwrap();
        let lam = diag(&[1.0, 0.25], &cfg);
        let c = check_similarity_power(&s, &lam, &e("1/2"), &cfg).unwrap();
        assert!(c.proven && c.verdict());
        // X = S L S^-1 = [[1, -0.75], [0, 0.25]], X^{1/2} = [[1, -0.5], [0, 0.5]]
        let (x1, x2) = sv2([[1.0, -0.75], [0.0, 0.25]]);
        let (y1, y2) = sv2([[1.0, -0.5], [0.0, 0.5]]);
        let left = [x1.sqrt(), x2.sqrt()];
        let right = [y1, y2];
        let l: Vec<f64> = c.report.left.values().iter().map(|v| v.to_f64()).collect();
        let r: Vec<f64> = c.report.right.values().iter().map(|v| v.to_f64()).collect();
        for k in 0..2 {
            assert!((l[k] - left[k]).abs() < 1e-12 && (r[k] - right[k]).abs() < 1e-12);
        }
        assert!(left[0] <= right[0] && left[0] + left[1] <= right[0] + right[1]);
    }

    #[test]
    fn similarity_pair_reproduces_product() {
        let cfg = cfg();
        let mut rng = RngStream::new(21, 0);
        let a = random_psd(&mut rng, 3, &cfg);
        let b = random_psd(&mut rng, 3, &cfg);
        let (s, lam) = similarity_pair_from_psd(&a, &b, &cfg).unwrap();
        let x = &(&s * &lam) * &inverse(&s, &cfg).unwrap();
        let err = x.try_sub(&(&a * &b)).unwrap().frobenius_norm();
        assert!(err < Float::with_val(cfg.bits(), cfg.tau() * 1000u32));
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = cfg();
        let a = diag(&[1.0, 2.0], &cfg);
        let b = diag(&[1.0, 2.0, 3.0], &cfg);
        assert!(check_split_power(&a, &b, &e("0.5"), Direction::Forward, &cfg).is_err());
        assert!(check_power_product(&a, &a, &e("0"), &cfg).is_err());
        let neg = diag(&[1.0, -1.0], &cfg);
        assert!(matches!(check_power_product(&neg, &a, &e("0.5"), &cfg), Err(Error::NotPsd(_))));
    }
}
