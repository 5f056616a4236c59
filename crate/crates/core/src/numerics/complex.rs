use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rug::Float;
use serde::{Deserialize, Serialize};

use super::precision::{real_to_string, PrecisionConfig, Real};
use crate::error::{Error, Result};

/// Extended-precision complex number, stored as a pair of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Complex { re: Float::with_val(prec, 1), im: Float::new(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Real {
        Float::with_val(self.prec(), &self.re * &self.re + &self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.re.clone().hypot(&self.im)
    }

    pub fn scale(&self, r: &Real) -> Complex {
        let prec = self.prec();
        Complex { re: Float::with_val(prec, &self.re * r), im: Float::with_val(prec, &self.im * r) }
    }

    pub fn recip(&self) -> Result<Complex> {
        if self.is_zero() {
            return Err(Error::Singularity("reciprocal of zero".into()));
        }
        let n = self.norm_sqr();
        Ok(Complex { re: self.re.clone() / &n, im: -(self.im.clone() / &n) })
    }

    pub fn div(&self, other: &Complex) -> Result<Complex> {
        Ok(self * &other.recip()?)
    }

    /// `self += a * b` with one rounding per component.
    pub fn add_mul(&mut self, a: &Complex, b: &Complex) {
        let prec = self.prec();
        let re = Float::with_val(prec, &a.re * &b.re - &a.im * &b.im);
        let im = Float::with_val(prec, &a.re * &b.im + &a.im * &b.re);
        self.re += re;
        self.im += im;
    }

    pub fn with_prec(&self, prec: u32) -> Complex {
        Complex { re: Float::with_val(prec, &self.re), im: Float::with_val(prec, &self.im) }
    }

    pub fn to_json(&self, cfg: &PrecisionConfig) -> ScalarJson {
        ScalarJson { digits: cfg.digits(), re: real_to_string(&self.re), im: real_to_string(&self.im) }
    }

    pub fn from_json(json: &ScalarJson) -> Result<Complex> {
        let cfg = PrecisionConfig::with_digits(json.digits)?;
        Ok(Complex { re: cfg.parse_real(&json.re)?, im: cfg.parse_real(&json.im)? })
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12);
        let re = self.re.to_string_radix(10, Some(digits));
        if self.im.is_zero() {
            write!(f, "{re}")
        } else {
            let im = self.im.to_string_radix(10, Some(digits));
            write!(f, "({re}, {im})")
        }
    }
}

/// Wire format of a scalar: `{"digits": 60, "re": "...", "im": "..."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub digits: u32,
    pub re: String,
    pub im: String,
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        let prec = self.prec();
        Complex {
            re: Float::with_val(prec, &self.re + &rhs.re),
            im: Float::with_val(prec, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        let prec = self.prec();
        Complex {
            re: Float::with_val(prec, &self.re - &rhs.re),
            im: Float::with_val(prec, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let prec = self.prec();
        Complex {
            re: Float::with_val(prec, &self.re * &rhs.re - &self.im * &rhs.im),
            im: Float::with_val(prec, &self.re * &rhs.im + &self.im * &rhs.re),
        }
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, rhs: &Complex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
