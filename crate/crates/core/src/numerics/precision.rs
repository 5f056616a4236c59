use rug::Float;
use rug::Assign;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extended-precision real. Every value carries its own binary precision;
/// a [`PrecisionConfig`] decides what that precision is when values are
/// created.
pub type Real = Float;

pub const DEFAULT_DIGITS: u32 = 60;
pub const DEFAULT_TOL_EXPONENT: u32 = 10;

/// Extra binary digits carried beyond the requested decimal digits.
const GUARD_BITS: u32 = 32;

/// Working precision and tolerance convention for one run.
///
/// Approximate comparisons use `tau = 10^-(digits - tol_exponent)` scaled by
/// `max(1, operand scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPrecision", into = "RawPrecision")]
pub struct PrecisionConfig {
    digits: u32,
    tol_exponent: u32,
}

#[derive(Serialize, Deserialize)]
struct RawPrecision {
    digits: u32,
    tol_exponent: u32,
}

impl TryFrom<RawPrecision> for PrecisionConfig {
    type Error = Error;
    fn try_from(raw: RawPrecision) -> Result<Self> {
        PrecisionConfig::new(raw.digits, raw.tol_exponent)
    }
}

impl From<PrecisionConfig> for RawPrecision {
    fn from(cfg: PrecisionConfig) -> Self {
        RawPrecision { digits: cfg.digits, tol_exponent: cfg.tol_exponent }
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { digits: DEFAULT_DIGITS, tol_exponent: DEFAULT_TOL_EXPONENT }
    }
}

impl PrecisionConfig {
    pub fn new(digits: u32, tol_exponent: u32) -> Result<Self> {
        if digits < 20 {
            return Err(Error::InvalidPrecision(format!("digits must be >= 20, got {digits}")));
        }
        if tol_exponent < 5 || 2 * tol_exponent > digits {
            return Err(Error::InvalidPrecision(format!(
                "tol_exponent must lie in [5, digits/2], got {tol_exponent} for {digits} digits"
            )));
        }
        Ok(PrecisionConfig { digits, tol_exponent })
    }

    /// Precision with the default tolerance exponent.
    pub fn with_digits(digits: u32) -> Result<Self> {
        Self::new(digits, DEFAULT_TOL_EXPONENT)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn tol_exponent(&self) -> u32 {
        self.tol_exponent
    }

    /// Same tolerance exponent, `delta` more (or fewer) decimal digits.
    pub fn shifted(&self, delta: i32) -> Result<Self> {
        let digits = self.digits as i64 + delta as i64;
        if digits < 0 {
            return Err(Error::InvalidPrecision(format!("digits would become {digits}")));
        }
        Self::new(digits as u32, self.tol_exponent)
    }

    /// Binary precision of working values.
    pub fn bits(&self) -> u32 {
        // log2(10) = 3.3219...; round up and add guard bits.
        (self.digits * 33_220).div_ceil(10_000) + GUARD_BITS
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.bits())
    }

    pub fn one(&self) -> Real {
        self.real(1)
    }

    /// Parses a decimal string at working precision.
    pub fn parse_real(&self, s: &str) -> Result<Real> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }

    /// `10^-exponent` at working precision.
    pub fn pow10_neg(&self, exponent: u32) -> Real {
        let mut v = Float::with_val(self.bits(), Float::u_pow_u(10, exponent));
        v.recip_mut();
        v
    }

    /// Unscaled tolerance `tau = 10^-(digits - tol_exponent)`.
    pub fn tau(&self) -> Real {
        self.pow10_neg(self.digits - self.tol_exponent)
    }

    /// `tau * max(1, |scale|)`.
    pub fn tol(&self, scale: &Real) -> Real {
        let mut s = scale.clone().abs();
        if s < 1 {
            s.assign(1);
        }
        s * self.tau()
    }

    /// Nominal unit roundoff at the requested decimal digits, `10^-digits`.
    pub fn epsilon(&self) -> Real {
        self.pow10_neg(self.digits)
    }

    /// Decimal digits needed so that printing then parsing a working value
    /// is the identity.
    pub fn roundtrip_digits(&self) -> usize {
        roundtrip_digits(self.bits())
    }
}

pub(crate) fn roundtrip_digits(bits: u32) -> usize {
    // ceil(bits * log10(2)) + 1
    ((bits as u64 * 30_103).div_ceil(100_000) + 1) as usize
}

/// Formats a real so that parsing it at the same binary precision gives the
/// same value back.
pub fn real_to_string(x: &Real) -> String {
    x.to_string_radix(10, Some(roundtrip_digits(x.prec())))
}

/// Largest of `1` and the absolute values given.
pub fn scale_of<'a>(values: impl IntoIterator<Item = &'a Real>, prec: u32) -> Real {
    let mut s = Float::with_val(prec, 1);
    for v in values {
        let a = v.clone().abs();
        if a > s {
            s = a;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_invariants() {
        assert!(PrecisionConfig::new(19, 5).is_err());
        assert!(PrecisionConfig::new(20, 4).is_err());
        assert!(PrecisionConfig::new(20, 11).is_err());
        assert!(PrecisionConfig::new(20, 10).is_ok());
        let cfg = PrecisionConfig::default();
        assert_eq!(cfg.digits(), 60);
        assert_eq!(cfg.tol_exponent(), 10);
        assert!(cfg.bits() >= 200);
    }

    #[test]
    fn tau_matches_convention() {
        let cfg = PrecisionConfig::with_digits(40).unwrap();
        let expected = cfg.parse_real("1e-30").unwrap();
        assert_eq!(cfg.tau(), expected);
        let scaled = cfg.tol(&cfg.real(-250));
        assert_eq!(scaled, expected * 250u32);
        assert_eq!(cfg.tol(&cfg.real(0.5)), cfg.tau());
    }

    #[test]
    fn serde_rejects_bad_config() {
        let bad: std::result::Result<PrecisionConfig, _> =
            serde_json::from_str(r#"{"digits": 10, "tol_exponent": 5}"#);
        assert!(bad.is_err());
        let good: PrecisionConfig =
            serde_json::from_str(r#"{"digits": 30, "tol_exponent": 8}"#).unwrap();
        assert_eq!(good.digits(), 30);
    }

    #[test]
    fn decimal_roundtrip_is_identity() {
        let cfg = PrecisionConfig::default();
        let x = cfg.real(2).sqrt() / cfg.real(7);
        let s = real_to_string(&x);
        assert_eq!(cfg.parse_real(&s).unwrap(), x);
    }
}
