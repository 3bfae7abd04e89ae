//! Exponents in `[1, ∞]` with an exact symbolic infinity.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An extended real number: either a finite `f64` or the symbol `+∞`.
///
/// Infinity is never approximated by a large float, so formulas can take
/// their exact algebraic limits through [`ExtendedReal::recip`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub const ONE: ExtendedReal = ExtendedReal::Finite(1.0);
    pub const TWO: ExtendedReal = ExtendedReal::Finite(2.0);

    /// Maps `f64::INFINITY` to the symbolic value; rejects NaN and `-∞`.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            return Err(Error::Domain(format!("{value} is not an extended real in (-inf, inf]")));
        }
        if value == f64::INFINITY {
            Ok(ExtendedReal::Infinity)
        } else {
            Ok(ExtendedReal::Finite(value))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    /// `1/p`, exactly `0` at infinity.
    pub fn recip(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => 1.0 / v,
            ExtendedReal::Infinity => 0.0,
        }
    }

    /// The value as an `f64` (`f64::INFINITY` for the symbol).
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    /// Checks `p >= 1`, the admissible range for Lebesgue exponents.
    pub fn require_lebesgue(self, what: &str) -> Result<Self> {
        match self {
            ExtendedReal::Finite(v) if !(v >= 1.0) => {
                Err(Error::Domain(format!("{what} = {v} must lie in [1, inf]")))
            }
            _ => Ok(self),
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        ExtendedReal::new(v).unwrap_or(ExtendedReal::Finite(v))
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.as_f64().partial_cmp(&other.as_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    /// Accepts `inf`, `infinity`, `∞` (case-insensitive) as the symbol and
    /// otherwise requires a finite decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if matches!(lower.as_str(), "inf" | "+inf" | "infinity" | "+infinity" | "∞") {
            return Ok(ExtendedReal::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse {t:?} as a number or `inf`")))?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("{t:?} is not finite; use `inf` for infinity")));
        }
        Ok(ExtendedReal::Finite(v))
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedReal, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}
