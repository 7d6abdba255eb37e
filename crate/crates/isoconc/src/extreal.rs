//! Extended real values: finite `f64` or `+inf`.
//!
//! Concentration lower bounds genuinely attain `+inf` (e.g. on spaces of
//! bounded diameter), so infinity is a tagged value here rather than a large
//! float. Arithmetic follows the usual extended-real conventions:
//! `x + inf = inf`, `c * inf = inf` for `c > 0`, and `x / inf = 0`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// A real number or the distinguished value `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Wraps a finite value. Panics on NaN; `f64::INFINITY` maps to `PosInf`.
    pub fn finite(x: f64) -> Self {
        assert!(!x.is_nan(), "ExtReal does not represent NaN");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    /// The finite value, if any.
    pub fn to_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInf => None,
        }
    }

    /// Collapses to `f64`, mapping `PosInf` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// `self + rhs` with `x + inf = inf`.
    pub fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(a + b),
            _ => ExtReal::PosInf,
        }
    }

    /// `c * self` for a nonnegative scalar; `0 * inf` is taken as `0`.
    pub fn scale(self, c: f64) -> ExtReal {
        assert!(c >= 0.0 && !c.is_nan(), "scale factor must be nonnegative");
        match self {
            ExtReal::Finite(x) => ExtReal::finite(c * x),
            ExtReal::PosInf => {
                if c == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }

    pub fn min(self, rhs: ExtReal) -> ExtReal {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max(self, rhs: ExtReal) -> ExtReal {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::finite(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // 17 significant digits round-trip f64 exactly.
            ExtReal::Finite(x) => write!(f, "{:.16e}", x),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => serializer.serialize_f64(*x),
            ExtReal::PosInf => serializer.serialize_str("inf"),
        }
    }
}

struct ExtRealVisitor;

impl<'de> Visitor<'de> for ExtRealVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a finite number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
        if v.is_nan() {
            Err(E::custom("NaN is not a valid extended real"))
        } else {
            Ok(ExtReal::finite(v))
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
        Ok(ExtReal::finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
        Ok(ExtReal::finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtReal, E> {
        match v {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            _ => Err(E::custom(format!("unrecognized extended real: {v:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ExtRealVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_on_top() {
        assert!(ExtReal::finite(1e308) < ExtReal::PosInf);
        assert!(ExtReal::PosInf <= ExtReal::PosInf);
        assert!(ExtReal::finite(-3.0) < ExtReal::finite(0.0));
    }

    #[test]
    fn extended_arithmetic() {
        assert_eq!(
            ExtReal::finite(2.0).add(ExtReal::PosInf),
            ExtReal::PosInf
        );
        assert_eq!(ExtReal::PosInf.scale(0.5), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.scale(0.0), ExtReal::Finite(0.0));
        assert_eq!(
            ExtReal::finite(1.0).add(ExtReal::finite(2.0)),
            ExtReal::Finite(3.0)
        );
    }

    #[test]
    fn serde_round_trip() {
        let vals = [ExtReal::finite(0.25), ExtReal::PosInf];
        for v in vals {
            let s = serde_json::to_string(&v).unwrap();
            let back: ExtReal = serde_json::from_str(&s).unwrap();
            assert_eq!(v, back);
        }
        assert_eq!(serde_json::to_string(&ExtReal::PosInf).unwrap(), "\"inf\"");
    }
}
