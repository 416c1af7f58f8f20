//! Confidence interval record shared by all methods.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    El,
    Normal,
    Bootstrap,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::El, Method::Normal, Method::Bootstrap];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::El => "el",
            Method::Normal => "normal",
            Method::Bootstrap => "bootstrap",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "el" => Ok(Method::El),
            "normal" => Ok(Method::Normal),
            "bootstrap" => Ok(Method::Bootstrap),
            other => Err(Error::Validation(format!(
                "unknown method {other:?} (expected el, normal or bootstrap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    /// May be `-inf` when the method reports a half-line.
    #[serde(with = "extended_real")]
    pub lower: f64,
    /// May be `+inf`.
    #[serde(with = "extended_real")]
    pub upper: f64,
    pub level: f64,
    pub method: Method,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

impl ConfidenceInterval {
    pub fn new(lower: f64, upper: f64, level: f64, method: Method) -> Self {
        debug_assert!(lower <= upper);
        Self {
            lower,
            upper,
            level,
            method,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}

/// Serde adapter writing non-finite reals as the strings `"inf"`, `"-inf"`
/// and `"nan"`, which JSON cannot represent as numbers.
pub mod extended_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Word(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Word(w) => match w.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("expected a real, got {other:?}"))),
            },
        }
    }
}

pub(crate) fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("level must lie in (0,1), got {level}")))
    }
}
