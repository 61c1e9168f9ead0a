use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::scalar::Scalar;

/// A real number extended with `+∞`.
///
/// Leakage values live here: the exponentiated ("ratio") form over any
/// [`Scalar`], and the logarithmic form in nats as `ExtReal<f64>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtReal<S> {
    Finite(S),
    Infinite,
}

/// A leakage value in nats.
pub type Nats = ExtReal<f64>;

/// Token used for `+∞` in CSV and JSON output.
pub const INF_TOKEN: &str = "inf";

impl<S> ExtReal<S> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }
}

impl<S: Scalar> ExtReal<S> {
    pub fn zero() -> Self {
        ExtReal::Finite(S::zero())
    }

    /// `num / den` under the conventions `0/0 = 1` and `a/0 = +∞` for `a > 0`.
    pub fn ratio(num: S, den: S) -> Self {
        if den.is_zero() {
            if num.is_zero() {
                ExtReal::Finite(S::one())
            } else {
                ExtReal::Infinite
            }
        } else {
            ExtReal::Finite(num / den)
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Natural logarithm of a ratio-domain value; `ln 0 = -∞` stays finite-tagged.
    pub fn ln(&self) -> Nats {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v.to_f64().ln()),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64(),
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    /// Exact textual form: fractions in rational mode, `inf` for `+∞`.
    pub fn to_literal(&self) -> String {
        match self {
            ExtReal::Finite(v) => v.to_literal(),
            ExtReal::Infinite => INF_TOKEN.to_string(),
        }
    }
}

impl Nats {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn exp(&self) -> ExtReal<f64> {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v.exp()),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    /// Converts nats to bits for display.
    pub fn to_bits(&self) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v / std::f64::consts::LN_2),
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    /// `|self - other| <= tol`, with `∞` equal only to `∞`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol,
            (ExtReal::Infinite, ExtReal::Infinite) => true,
            _ => false,
        }
    }
}

/// Display unit. Values are always stored in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unit {
    #[default]
    Nats,
    Bits,
}

impl Unit {
    pub fn suffix(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }

    pub fn convert(self, value: &Nats) -> Nats {
        match self {
            Unit::Nats => value.clone(),
            Unit::Bits => value.to_bits(),
        }
    }
}

/// Shortest round-trip text for a float, with `inf` for `+∞`.
pub fn format_f64(x: f64) -> String {
    if x == f64::INFINITY {
        INF_TOKEN.to_string()
    } else if x == f64::NEG_INFINITY {
        format!("-{INF_TOKEN}")
    } else {
        format!("{x:?}")
    }
}

impl<S: Scalar> PartialOrd for ExtReal<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl<S: Scalar> Add for ExtReal<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl<S: Scalar> fmt::Display for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str(INF_TOKEN),
        }
    }
}

impl Serialize for ExtReal<f64> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            ExtReal::Infinite => serializer.serialize_str(INF_TOKEN),
        }
    }
}

impl<'de> serde::Deserialize<'de> for ExtReal<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NatsVisitor;

        impl<'v> Visitor<'v> for NatsVisitor {
            type Value = ExtReal<f64>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the token \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(ExtReal::from_f64(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == INF_TOKEN {
                    Ok(ExtReal::Infinite)
                } else {
                    v.parse::<f64>()
                        .map(ExtReal::from_f64)
                        .map_err(|_| E::custom(format!("invalid extended real {v:?}")))
                }
            }

            fn visit_map<A: de::MapAccess<'v>>(self, map: A) -> Result<Self::Value, A::Error> {
                // arbitrary_precision numbers arrive as a single-entry map
                let value = serde_json::Value::deserialize(de::value::MapAccessDeserializer::new(map))
                    .map_err(de::Error::custom)?;
                value
                    .as_f64()
                    .map(ExtReal::from_f64)
                    .ok_or_else(|| de::Error::custom("expected a number"))
            }
        }

        deserializer.deserialize_any(NatsVisitor)
    }
}
