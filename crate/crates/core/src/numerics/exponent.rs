use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::precision::{PrecisionConfig, Real};
use crate::error::{Error, Result};

/// A positive exponent held as an exact rational.
///
/// Validity conditions such as "1/p is a natural number" are decided on the
/// rational, never with a tolerance. Decimal input like `0.95` is read as
/// the exact fraction `19/20`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Rational);

impl Exponent {
    pub fn new(value: Rational) -> Result<Self> {
        if value.cmp0() == Ordering::Less {
            return Err(Error::Domain(format!("exponent {value} is negative")));
        }
        Ok(Exponent(value))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(Rational::from((num, den)))
    }

    pub fn integer(n: u32) -> Self {
        Exponent(Rational::from(n))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Ordering::Greater
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    /// Membership in `{0, 1, 2, ...}`.
    pub fn is_natural(&self) -> bool {
        *self.0.denom() == 1 && self.0.cmp0() != Ordering::Less
    }

    pub fn recip(&self) -> Result<Exponent> {
        if self.is_zero() {
            return Err(Error::Singularity("reciprocal of exponent 0".into()));
        }
        Ok(Exponent(self.0.clone().recip()))
    }

    pub fn ge_int(&self, n: i64) -> bool {
        self.0 >= n
    }

    pub fn le_int(&self, n: i64) -> bool {
        self.0 <= n
    }

    pub fn cmp_ratio(&self, num: i64, den: i64) -> Ordering {
        self.0.cmp(&Rational::from((num, den)))
    }

    pub fn mul_int(&self, n: u32) -> Exponent {
        Exponent(Rational::from(&self.0 * n))
    }

    pub fn to_real(&self, cfg: &PrecisionConfig) -> Real {
        cfg.real(&self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid exponent {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n = Integer::from_str(n.trim()).map_err(|_| bad())?;
            let d = Integer::from_str(d.trim()).map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Exponent::new(Rational::from((n, d)));
        }
        let (mantissa, exp10) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let num = Integer::from_str(&digits).map_err(|_| bad())?;
        let scale = exp10 - frac_part.len() as i32;
        let value = if scale >= 0 {
            Rational::from(num * Integer::from(Integer::u_pow_u(10, scale as u32)))
        } else {
            Rational::from((num, Integer::from(Integer::u_pow_u(10, (-scale) as u32))))
        };
        Exponent::new(value)
    }
}

impl fmt::Display for Exponent {
    /// Terminating decimals print as decimals, everything else as `n/d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut den = self.0.denom().clone();
        let mut twos = 0u32;
        let mut fives = 0u32;
        while den.is_divisible_u(2) {
            den /= 2;
            twos += 1;
        }
        while den.is_divisible_u(5) {
            den /= 5;
            fives += 1;
        }
        if den != 1 {
            return write!(f, "{}/{}", self.0.numer(), self.0.denom());
        }
        let places = twos.max(fives);
        if places == 0 {
            return write!(f, "{}", self.0.numer());
        }
        let scaled = (self.0.numer() * Integer::from(Integer::u_pow_u(10, places)))
            / self.0.denom();
        let mut s = scaled.to_string();
        while s.len() <= places as usize {
            s.insert(0, '0');
        }
        let split = s.len() - places as usize;
        let out = format!("{}.{}", &s[..split], &s[split..]);
        write!(f, "{}", out.trim_end_matches('0').trim_end_matches('.'))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exactly() {
        let p: Exponent = "0.95".parse().unwrap();
        assert_eq!(p, Exponent::ratio(19, 20).unwrap());
        let q: Exponent = "1/3".parse().unwrap();
        assert!(q.recip().unwrap().is_natural());
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::integer(2));
        assert_eq!("1.5e1".parse::<Exponent>().unwrap(), Exponent::integer(15));
        assert_eq!("25e-2".parse::<Exponent>().unwrap(), Exponent::ratio(1, 4).unwrap());
        assert!("-1".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        assert!("1/0".parse::<Exponent>().is_err());
    }

    #[test]
    fn display_roundtrips() {
        for s in ["0.95", "1/3", "2", "0.005", "2/7", "12.5"] {
            let p: Exponent = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(p.to_string().parse::<Exponent>().unwrap(), p);
        }
    }

    #[test]
    fn naturality_is_exact() {
        assert!(Exponent::integer(0).is_natural());
        assert!(!"1.0000000000000000001".parse::<Exponent>().unwrap().is_natural());
        assert!(Exponent::ratio(2, 5).unwrap().recip().unwrap().ge_int(2));
    }
}
