//! Exact dyadic rationals `n / 2^k`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// `numerator / 2^exponent`, kept normalized (odd numerator or exponent 0),
/// so structural equality is numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a dyadic rational: {0:?}")]
pub struct ParseDyadicError(String);

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic::from_integer(0)
    }

    pub fn from_integer(n: i64) -> Dyadic {
        Dyadic {
            numerator: BigInt::from(n),
            exponent: 0,
        }
    }

    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Dyadic {
        Dyadic {
            numerator: numerator.into(),
            exponent,
        }
        .normalized()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    /// `k` in the denominator `2^k`.
    pub fn denominator_exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn half(&self) -> Dyadic {
        Dyadic {
            numerator: self.numerator.clone(),
            exponent: self.exponent + 1,
        }
        .normalized()
    }

    pub fn double(&self) -> Dyadic {
        if self.exponent > 0 {
            Dyadic {
                numerator: self.numerator.clone(),
                exponent: self.exponent - 1,
            }
        } else {
            Dyadic {
                numerator: &self.numerator << 1u32,
                exponent: 0,
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Shift down to 60 significant bits first so huge numerators and
        // exponents don't overflow the intermediate float.
        let bits = self.numerator.bits();
        let drop = bits.saturating_sub(60);
        let mantissa = (&self.numerator >> drop).to_f64().unwrap_or(0.0);
        mantissa * 2f64.powi(drop as i32 - self.exponent as i32)
    }

    fn normalized(mut self) -> Dyadic {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return self;
        }
        let twos = self.numerator.trailing_zeros().unwrap_or(0);
        let shift = twos.min(u64::from(self.exponent)) as u32;
        if shift > 0 {
            self.numerator >>= shift;
            self.exponent -= shift;
        }
        self
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent),
            &other.numerator << (e - other.exponent),
            e,
        )
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(rhs);
        Dyadic::new(a - b, e)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigInt::from(1) << self.exponent)
        }
    }
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let numerator: BigInt = num.parse().map_err(|_| err())?;
        let exponent = match den {
            None => 0,
            Some(d) => {
                let d: BigInt = d.parse().map_err(|_| err())?;
                let tz = d.trailing_zeros().ok_or_else(err)?;
                if !d.is_positive() || (&d >> tz) != BigInt::from(1) {
                    return Err(err());
                }
                u32::try_from(tz).map_err(|_| err())?
            }
        };
        Ok(Dyadic::new(numerator, exponent))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let four = Dyadic::from_integer(4);
        assert_eq!(four.half().to_string(), "2");
        assert_eq!(four.half().half().half().to_string(), "1/2");
        assert_eq!((&d("3/4") + &d("1/4")).to_string(), "1");
        assert_eq!((&d("3/4") - &d("1")).to_string(), "-1/4");
        assert_eq!(d("6/8"), d("3/4"));
        assert_eq!(d("0/16").denominator_exponent(), 0);
        assert_eq!(d("5/8").double(), d("5/4"));
        assert_eq!(d("3").double(), d("6"));
    }

    #[test]
    fn rejects_non_dyadic_denominators() {
        assert!("1/3".parse::<Dyadic>().is_err());
        assert!("1/0".parse::<Dyadic>().is_err());
        assert!("1/-2".parse::<Dyadic>().is_err());
        assert!("x".parse::<Dyadic>().is_err());
    }

    #[test]
    fn ordering() {
        assert!(d("7/8") < d("1"));
        assert!(d("-1/2") < d("0"));
        assert_eq!(d("2/4").cmp(&d("1/2")), Ordering::Equal);
    }

    #[test]
    fn float_conversion_handles_deep_denominators() {
        assert_eq!(d("3/4").to_f64(), 0.75);
        let deep = Dyadic::new(BigInt::from(3) << 300u32, 301);
        assert_eq!(deep.to_f64(), 1.5);
        let tiny = Dyadic::new(1, 400);
        assert_eq!(tiny.to_f64(), 2f64.powi(-400));
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(n in any::<i64>(), e in 0u32..200) {
            let x = Dyadic::new(n, e);
            prop_assert_eq!(x.to_string().parse::<Dyadic>().unwrap(), x);
        }

        #[test]
        fn add_then_sub(a in any::<i32>(), ea in 0u32..80, b in any::<i32>(), eb in 0u32..80) {
            let x = Dyadic::new(a, ea);
            let y = Dyadic::new(b, eb);
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(x.cmp(&y), (x.to_f64()).partial_cmp(&y.to_f64()).unwrap());
        }
    }
}
