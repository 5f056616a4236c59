use rug::ops::Pow;

use super::precision::Real;
use crate::error::{Error, Result};

/// How `0^0` is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ZeroPowZero {
    #[default]
    Reject,
    One,
}

/// `x^p` for `x >= 0`, computed as `exp(p log x)` with a single correctly
/// rounded MPFR call. `0^p = 0` for `p > 0`.
pub fn real_power(x: &Real, p: &Real) -> Result<Real> {
    real_power_with(x, p, ZeroPowZero::Reject)
}

pub fn real_power_with(x: &Real, p: &Real, zero_pow_zero: ZeroPowZero) -> Result<Real> {
    if x.is_nan() || p.is_nan() {
        return Err(Error::Domain("NaN operand".into()));
    }
    if x.is_sign_negative() && !x.is_zero() {
        return Err(Error::Domain(format!("negative base {}", x.to_f64())));
    }
    if x.is_zero() {
        if p.is_zero() {
            return match zero_pow_zero {
                ZeroPowZero::One => Ok(Real::with_val(x.prec(), 1)),
                ZeroPowZero::Reject => Err(Error::Singularity("0^0 is undefined".into())),
            };
        }
        if p.is_sign_negative() {
            return Err(Error::Singularity(format!("0^{}", p.to_f64())));
        }
        return Ok(Real::new(x.prec()));
    }
    let mut out = x.clone();
    out = out.pow(p);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecisionConfig;

    /// Newton iteration on y^2 = 2 at 80 digits.
    fn sqrt2_newton() -> Real {
        let cfg = PrecisionConfig::with_digits(80).unwrap();
        let two = cfg.real(2);
        let mut y = cfg.real(1.5);
        for _ in 0..12 {
            y = (y.clone() + &two / y.clone()) / 2u32;
        }
        y
    }

    #[test]
    fn trivial_values() {
        let cfg = PrecisionConfig::default();
        assert_eq!(real_power(&cfg.real(4), &cfg.real(0.5)).unwrap(), 2);
        let x = cfg.real(7) / cfg.real(3);
        assert_eq!(real_power(&x, &cfg.one()).unwrap(), x);
        assert_eq!(real_power(&cfg.zero(), &cfg.real(0.3)).unwrap(), 0);
    }

    #[test]
    fn sqrt_two_matches_newton_oracle() {
        let cfg = PrecisionConfig::default();
        let got = real_power(&cfg.real(2), &cfg.real(0.5)).unwrap();
        let oracle = sqrt2_newton();
        let err = (Real::with_val(oracle.prec(), &got - &oracle) / &oracle).abs();
        assert!(err < cfg.pow10_neg(58), "relative error {}", err.to_f64());
        assert!(got.to_string_radix(10, Some(20)).starts_with("1.414213562373095048"));
    }

    #[test]
    fn errors() {
        let cfg = PrecisionConfig::default();
        assert!(matches!(real_power(&cfg.real(-1), &cfg.real(2)), Err(Error::Domain(_))));
        assert!(matches!(real_power(&cfg.zero(), &cfg.real(-1)), Err(Error::Singularity(_))));
        assert!(matches!(real_power(&cfg.zero(), &cfg.zero()), Err(Error::Singularity(_))));
        assert_eq!(real_power_with(&cfg.zero(), &cfg.zero(), ZeroPowZero::One).unwrap(), 1);
    }
}
