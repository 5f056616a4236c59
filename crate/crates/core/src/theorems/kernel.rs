use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use super::validity::{entrywise_power_proven, power_quotient_proven};
use crate::error::{Error, Result};
use crate::linalg::{certify_psd, min_eigenvalue, Matrix, MatrixFlags};
use crate::numerics::quadrature::{graded_breakpoints, Integrator};
use crate::numerics::{real_power_with, real_to_string, Complex, Exponent, PrecisionConfig, Real, ZeroPowZero};

/// Nodes `lambda_i >= 0` and exponent `alpha` of the kernel
/// `C_ij = (1 - (lambda_i lambda_j)^alpha) / (1 - lambda_i lambda_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerQuotientSpec {
    pub lambdas: Vec<Real>,
    pub alpha: Exponent,
}

impl PowerQuotientSpec {
    pub fn new(lambdas: Vec<Real>, alpha: Exponent) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|l| l.is_sign_negative() && !l.is_zero()) {
            return Err(Error::Domain(format!("node {} is negative", bad.to_f64())));
        }
        Ok(PowerQuotientSpec { lambdas, alpha })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }
}

/// Minimum eigenvalue of a symmetric matrix together with whether the
/// theory guarantees it to be nonnegative.
#[derive(Clone, Debug)]
pub struct PsdCheck {
    pub verdict: bool,
    pub min_eig: Real,
    pub tolerance: Real,
    pub condition_satisfied: bool,
}

impl PsdCheck {
    pub fn unexpected_violation(&self) -> bool {
        self.condition_satisfied && !self.verdict
    }

    pub fn to_json(&self) -> PsdCheckJson {
        PsdCheckJson {
            verdict: self.verdict,
            min_eig: real_to_string(&self.min_eig),
            tolerance: real_to_string(&self.tolerance),
            condition_satisfied: self.condition_satisfied,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsdCheckJson {
    pub verdict: bool,
    pub min_eig: String,
    pub tolerance: String,
    pub condition_satisfied: bool,
}

/// `(1 - x^alpha) / (1 - x)` for `x >= 0`, with the limit `alpha` when
/// `|1 - x| <= tau`. Uses `expm1` so entries near `x = 1` keep full
/// relative accuracy.
pub fn power_quotient_entry(x: &Real, alpha: &Real, cfg: &PrecisionConfig) -> Real {
    let prec = cfg.bits();
    let h = Float::with_val(prec, 1 - x);
    if h.clone().abs() <= cfg.tau() {
        return alpha.clone();
    }
    if x.is_zero() {
        return if alpha.is_zero() { Float::new(prec) } else { cfg.one() / h };
    }
    let ln = Float::with_val(prec, x.ln_ref());
    let num = -Float::with_val(prec, alpha * &ln).exp_m1();
    num / h
}

fn check_nodes(spec: &PowerQuotientSpec) -> Result<()> {
    if spec.lambdas.is_empty() {
        return Err(Error::DimensionMismatch("no nodes".into()));
    }
    Ok(())
}

pub fn power_quotient_matrix(spec: &PowerQuotientSpec, cfg: &PrecisionConfig) -> Result<Matrix> {
    check_nodes(spec)?;
    let prec = cfg.bits();
    let alpha = spec.alpha.to_real(cfg);
    let n = spec.dim();
    let mut m = Matrix::zeros(n, n, prec);
    for i in 0..n {
        for j in i..n {
            let x = Float::with_val(prec, &spec.lambdas[i] * &spec.lambdas[j]);
            let v = Complex::from_real(power_quotient_entry(&x, &alpha, cfg));
            m.set(j, i, v.clone());
            m.set(i, j, v);
        }
    }
    Ok(m.with_flags(MatrixFlags::HERMITIAN))
}

pub fn check_power_quotient_psd(spec: &PowerQuotientSpec, cfg: &PrecisionConfig) -> Result<PsdCheck> {
    let m = power_quotient_matrix(spec, cfg)?;
    let min_eig = min_eigenvalue(&m, cfg)?;
    let tolerance = cfg.tol(&m.frobenius_norm());
    Ok(PsdCheck {
        verdict: min_eig >= Float::with_val(cfg.bits(), -&tolerance),
        min_eig,
        tolerance,
        condition_satisfied: power_quotient_proven(spec.dim(), &spec.alpha),
    })
}

/// Largest deviation between the closed-form entries and
/// `alpha * int_0^1 (t + (1 - t) x)^(alpha - 1) dt`, evaluated by composite
/// Gauss–Legendre on a mesh graded toward the integrand's singular point
/// `t* = x / (x - 1)`.
pub fn check_power_quotient_integral(spec: &PowerQuotientSpec, integrator: &mut Integrator) -> Result<Real> {
    check_nodes(spec)?;
    let cfg = *integrator.config();
    let prec = cfg.bits();
    let alpha = spec.alpha.to_real(&cfg);
    let exponent = Float::with_val(prec, &alpha - 1u32);
    let polynomial = spec.alpha.is_natural();
    let mut worst = Float::new(prec);
    for i in 0..spec.dim() {
        for j in i..spec.dim() {
            let x = Float::with_val(prec, &spec.lambdas[i] * &spec.lambdas[j]);
            let closed = power_quotient_entry(&x, &alpha, &cfg);
            let h = Float::with_val(prec, 1 - &x);
            let integrand = |t: &Real| {
                let base = Float::with_val(prec, &h * t) + &x;
                let v = if exponent.is_zero() { Float::with_val(prec, 1) } else { base.pow(&exponent) };
                v * &alpha
            };
            let breakpoints = if polynomial || h.is_zero() {
                vec![cfg.zero(), cfg.one()]
            } else if h.is_sign_positive() {
                // x < 1: singular point at -x / (1 - x)
                let dist = Float::with_val(prec, &x / &h);
                graded_breakpoints(&dist, true, &cfg)
            } else {
                // x > 1: singular point at 1 + 1 / (x - 1)
                let dist = Float::with_val(prec, -&h).recip();
                graded_breakpoints(&dist, false, &cfg)
            };
            let scale = Float::with_val(prec, closed.abs_ref()).max(&cfg.one());
            let tol = Float::with_val(prec, cfg.tol(&scale) / 100u32);
            let est = integrator.integrate_until_stable(integrand, &breakpoints, &tol)?;
            let dev = Float::with_val(prec, &est.value - &closed).abs();
            if dev > worst {
                worst = dev;
            }
        }
    }
    Ok(worst)
}

/// Minimum eigenvalue of the entrywise `q`-th power of a PSD matrix with
/// nonnegative real entries (`0^0 = 1`).
pub fn check_entrywise_power_psd(m: &Matrix, q: &Exponent, cfg: &PrecisionConfig) -> Result<PsdCheck> {
    let m = certify_psd(m, cfg)?;
    let prec = cfg.bits();
    let slack = cfg.tol(&m.max_abs());
    let neg_slack = Float::with_val(prec, -&slack);
    let qr = q.to_real(cfg);
    let n = m.rows();
    let mut powered = Matrix::zeros(n, n, prec);
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if z.im.clone().abs() > slack || z.re < neg_slack {
                return Err(Error::Domain(format!("entry ({i},{j}) is not a nonnegative real")));
            }
            let re = if z.re.is_sign_negative() { Float::new(prec) } else { z.re.clone() };
            powered.set(i, j, Complex::from_real(real_power_with(&re, &qr, ZeroPowZero::One)?));
        }
    }
    let powered = powered.hermitian_part();
    let min_eig = min_eigenvalue(&powered, cfg)?;
    let tolerance = cfg.tol(&powered.frobenius_norm());
    Ok(PsdCheck {
        verdict: min_eig >= Float::with_val(prec, -&tolerance),
        min_eig,
        tolerance,
        condition_satisfied: entrywise_power_proven(n, q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    fn spec(l: &[f64], alpha: &str, cfg: &PrecisionConfig) -> PowerQuotientSpec {
        PowerQuotientSpec::new(l.iter().map(|v| cfg.real(*v)).collect(), e(alpha)).unwrap()
    }

    #[test]
    fn alpha_one_and_two() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let s = spec(&[0.2, 0.7, 1.3], "1", &cfg);
        let m = power_quotient_matrix(&s, &cfg).unwrap();
        for z in m.entries() {
            assert!(Float::with_val(cfg.bits(), &z.re - 1u32).abs() < cfg.tau());
        }
        let s = spec(&[0.2, 0.7, 1.3], "2", &cfg);
        let m = power_quotient_matrix(&s, &cfg).unwrap();
        let l = [0.2, 0.7, 1.3];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j).re.to_f64() - (1.0 + l[i] * l[j])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn limit_at_unit_product() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let s = spec(&[0.5, 2.0], "2.5", &cfg);
        let m = power_quotient_matrix(&s, &cfg).unwrap();
        assert_eq!(m.get(0, 1).re, cfg.real(2.5));
        // x = 1 + 1e-20 is outside the tau band and still close to alpha
        let x = Float::with_val(cfg.bits(), 1u32) + cfg.pow10_neg(20);
        let v = power_quotient_entry(&x, &cfg.real(2.5), &cfg);
        assert!((v.to_f64() - 2.5).abs() < 1e-18);
        let zero = power_quotient_entry(&cfg.zero(), &cfg.real(2.5), &cfg);
        assert_eq!(zero, cfg.one());
    }

    #[test]
    fn psd_under_condition() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        for alpha in ["3", "2.5"] {
            let c = check_power_quotient_psd(&spec(&[0.2, 0.5, 0.9], alpha, &cfg), &cfg).unwrap();
            assert!(c.condition_satisfied && c.verdict);
        }
        let c = check_power_quotient_psd(&spec(&[0.2, 0.5, 0.9], "1.5", &cfg), &cfg).unwrap();
        assert!(!c.condition_satisfied);
    }

    #[test]
    fn integral_matches_closed_form() {
        let cfg = PrecisionConfig::default();
        let mut integ = Integrator::new(cfg);
        let dev = check_power_quotient_integral(&spec(&[0.3, 0.7], "2.5", &cfg), &mut integ).unwrap();
        assert!(dev < cfg.pow10_neg(45), "{}", dev.to_f64());
        let dev = check_power_quotient_integral(&spec(&[0.5], "2", &cfg), &mut integ).unwrap();
        assert!(dev < cfg.tau());
        let dev = check_power_quotient_integral(&spec(&[0.0, 1.1, 0.95], "2.3", &cfg), &mut integ).unwrap();
        assert!(dev < cfg.tau(), "{}", dev.to_f64());
    }

    #[test]
    fn schur_powers_and_domain() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let m = Matrix::from_real_rows(&[&[2.0, 1.0, 0.5], &[1.0, 2.0, 1.0], &[0.5, 1.0, 2.0]], &cfg).unwrap();
        for q in ["1", "2"] {
            let c = check_entrywise_power_psd(&m, &e(q), &cfg).unwrap();
            assert!(c.verdict && c.condition_satisfied);
        }
        let neg = Matrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 2.0]], &cfg).unwrap();
        assert!(matches!(check_entrywise_power_psd(&neg, &e("0.5"), &cfg), Err(Error::Domain(_))));
    }

    // Square root of entrywise-positive PSD matrices `1 1^T + eps v v^T`
    // leaves the cone for some draws.
    #[test]
    fn square_root_can_fail_in_dimension_three() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut found = None;
        for _ in 0..200 {
            let v: Vec<Real> = (0..3).map(|_| cfg.real(0.5 + 3.0 * rng.next_f64())).collect();
            let eps = cfg.real(0.01 + 0.5 * rng.next_f64());
            let m = Matrix::from_fn(3, 3, cfg.bits(), |i, j| {
                Complex::from_real(Float::with_val(cfg.bits(), &eps * &v[i]) * &v[j] + 1u32)
            });
            let c = check_entrywise_power_psd(&m, &e("1/2"), &cfg).unwrap();
            assert!(!c.condition_satisfied);
            if !c.verdict {
                found = Some(c.min_eig);
                break;
            }
        }
        assert!(found.expect("no failing draw").is_sign_negative());
    }
}
