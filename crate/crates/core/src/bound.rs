//! Mafia-fraud bounds written as `2^-k` or as decimals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::attribute::Probability;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid bound syntax `{0}` (expected 2^-k or a decimal)")]
    Syntax(String),
    #[error("bound `{0}` is outside [0, 1]")]
    OutOfRange(String),
}

/// Upper bound `y` on mafia-fraud success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct MafiaBound {
    y: Probability,
    text: String,
}

impl MafiaBound {
    pub fn pow2(exp: i32) -> Result<Self, BoundError> {
        format!("2^{exp}").parse()
    }

    pub fn probability(&self) -> Probability {
        self.y
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl FromStr for MafiaBound {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let syntax = || BoundError::Syntax(s.to_string());
        let range = || BoundError::OutOfRange(s.to_string());
        if text.is_empty() {
            return Err(syntax());
        }
        let y = if let Some(exp) = text.strip_prefix("2^") {
            let exp = exp
                .strip_prefix('(')
                .and_then(|e| e.strip_suffix(')'))
                .unwrap_or(exp);
            let k: f64 = exp.parse().map_err(|_| syntax())?;
            if !k.is_finite() {
                return Err(syntax());
            }
            if k > 0.0 {
                return Err(range());
            }
            Probability::from_log2(k)
        } else {
            let v: f64 = text.parse().map_err(|_| syntax())?;
            if v.is_nan() || v.is_infinite() {
                return Err(syntax());
            }
            Probability::from_value(v).map_err(|_| range())?
        };
        Ok(MafiaBound {
            y,
            text: text.to_string(),
        })
    }
}

impl fmt::Display for MafiaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for MafiaBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for MafiaBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of bounds.
pub fn parse_list(text: &str) -> Result<Vec<MafiaBound>, BoundError> {
    text.split(',').map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(
            "2^-16".parse::<MafiaBound>().unwrap().probability().log2(),
            -16.0
        );
        assert_eq!(
            "2^(-3)".parse::<MafiaBound>().unwrap().probability().log2(),
            -3.0
        );
        assert_eq!(
            "0.25".parse::<MafiaBound>().unwrap().probability().log2(),
            -2.0
        );
        assert!("0".parse::<MafiaBound>().unwrap().probability().is_zero());
        assert_eq!("1".parse::<MafiaBound>().unwrap().probability().log2(), 0.0);
        assert!(matches!(
            "2^x".parse::<MafiaBound>(),
            Err(BoundError::Syntax(_))
        ));
        assert!(matches!(
            "abc".parse::<MafiaBound>(),
            Err(BoundError::Syntax(_))
        ));
        assert!(matches!(
            "1.5".parse::<MafiaBound>(),
            Err(BoundError::OutOfRange(_))
        ));
        assert!(matches!(
            "-0.1".parse::<MafiaBound>(),
            Err(BoundError::OutOfRange(_))
        ));
        assert!(matches!(
            "2^3".parse::<MafiaBound>(),
            Err(BoundError::OutOfRange(_))
        ));
    }

    #[test]
    fn list() {
        let l = parse_list("2^-1,2^-16,0.5").unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l[1].as_str(), "2^-16");
    }
}
