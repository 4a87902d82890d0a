//! Attribute domains, their orders and approximate-equality relations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default memory tolerance in bits.
pub const DEFAULT_MEMORY_TOLERANCE: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AttributeId {
    /// Mafia fraud resistance.
    PM,
    /// Distance fraud resistance.
    PD,
    /// Terrorist fraud resistance.
    PT,
    /// Bits exchanged during the fast phase.
    NBE,
    /// Cryptographic operations on the prover side.
    NC,
    /// Prover memory in bits.
    NM,
    /// Final slow phase.
    NS,
    /// Multiple-bit exchanges.
    NB,
}

impl AttributeId {
    pub const ALL: [AttributeId; 8] = [
        AttributeId::PM,
        AttributeId::PD,
        AttributeId::PT,
        AttributeId::NBE,
        AttributeId::NC,
        AttributeId::NM,
        AttributeId::NS,
        AttributeId::NB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AttributeId::PM => "PM",
            AttributeId::PD => "PD",
            AttributeId::PT => "PT",
            AttributeId::NBE => "NBE",
            AttributeId::NC => "NC",
            AttributeId::NM => "NM",
            AttributeId::NS => "NS",
            AttributeId::NB => "NB",
        }
    }

    pub fn is_probability(self) -> bool {
        matches!(self, AttributeId::PM | AttributeId::PD | AttributeId::PT)
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttributeId {
    type Err = AttributeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttributeId::ALL
            .iter()
            .copied()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| AttributeError::UnknownAttribute(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttributeError {
    #[error("unknown attribute id `{0}`")]
    UnknownAttribute(String),
    #[error("value {value} is outside the domain of {attr}")]
    Domain { attr: AttributeId, value: String },
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityRange(f64),
}

/// A success probability stored as its base-2 logarithm.
///
/// `p = 0` is represented by negative infinity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ONE: Probability = Probability(0.0);
    pub const ZERO: Probability = Probability(f64::NEG_INFINITY);

    pub fn from_value(p: f64) -> Result<Self, AttributeError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(AttributeError::ProbabilityRange(p));
        }
        if p == 0.0 {
            Ok(Probability::ZERO)
        } else {
            Ok(Probability(p.log2()))
        }
    }

    /// Builds a probability from its log2. Values above 0 are clamped to 0.
    pub fn from_log2(l: f64) -> Self {
        assert!(!l.is_nan(), "log2 probability is NaN");
        Probability(l.min(0.0))
    }

    /// `base^exp` computed in the log domain.
    pub fn pow(base: f64, exp: f64) -> Self {
        assert!((0.0..=1.0).contains(&base), "base {base} outside [0, 1]");
        if exp == 0.0 {
            return Probability::ONE;
        }
        if base == 0.0 {
            return Probability::ZERO;
        }
        Probability::from_log2(base.log2() * exp)
    }

    pub fn log2(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp2()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "2^{}", self.0)
        }
    }
}

/// A value of one attribute domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttributeValue {
    Prob(Probability),
    Count(u64),
    Flag(bool),
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Prob(p) => write!(f, "{p}"),
            AttributeValue::Count(c) => write!(f, "{c}"),
            AttributeValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

/// Shape of an approximate-equality relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxKind {
    /// `|log2 x - log2 y| < 1`, reflexive at zero.
    LogRatio,
    /// Plain equality.
    Exact,
    /// `|x - y| < tolerance`.
    Absolute(u64),
}

/// Total order plus approximate equality for one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxSpec {
    pub attribute: AttributeId,
    pub kind: ApproxKind,
}

impl ApproxSpec {
    pub fn for_attribute(attribute: AttributeId, tol: &Tolerances) -> Self {
        let kind = match attribute {
            AttributeId::PM | AttributeId::PD | AttributeId::PT => ApproxKind::LogRatio,
            AttributeId::NM => ApproxKind::Absolute(tol.memory_bits),
            AttributeId::NBE | AttributeId::NC | AttributeId::NS | AttributeId::NB => {
                ApproxKind::Exact
            }
        };
        ApproxSpec { attribute, kind }
    }

    pub fn all(tol: &Tolerances) -> [ApproxSpec; 8] {
        AttributeId::ALL.map(|a| ApproxSpec::for_attribute(a, tol))
    }

    fn check(&self, v: AttributeValue) -> Result<(), AttributeError> {
        let ok = matches!(
            (self.attribute, v),
            (
                AttributeId::PM | AttributeId::PD | AttributeId::PT,
                AttributeValue::Prob(_)
            ) | (
                AttributeId::NBE | AttributeId::NC | AttributeId::NM,
                AttributeValue::Count(_)
            ) | (AttributeId::NS | AttributeId::NB, AttributeValue::Flag(_))
        );
        if ok {
            Ok(())
        } else {
            Err(AttributeError::Domain {
                attr: self.attribute,
                value: v.to_string(),
            })
        }
    }

    /// The domain order: `x < y`.
    pub fn less(&self, x: AttributeValue, y: AttributeValue) -> Result<bool, AttributeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (x, y) {
            (AttributeValue::Prob(a), AttributeValue::Prob(b)) => a.0 < b.0,
            (AttributeValue::Count(a), AttributeValue::Count(b)) => a < b,
            (AttributeValue::Flag(a), AttributeValue::Flag(b)) => !a & b,
            _ => unreachable!(),
        })
    }

    pub fn approx(&self, x: AttributeValue, y: AttributeValue) -> Result<bool, AttributeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (self.kind, x, y) {
            (ApproxKind::LogRatio, AttributeValue::Prob(a), AttributeValue::Prob(b)) => {
                prob_approx(a.0, b.0)
            }
            (ApproxKind::Absolute(tol), AttributeValue::Count(a), AttributeValue::Count(b)) => {
                a.abs_diff(b) < tol
            }
            (_, a, b) => a == b,
        })
    }

    /// `x ≺ y`: strictly better and not approximately equal.
    pub fn strictly_precedes(
        &self,
        x: AttributeValue,
        y: AttributeValue,
    ) -> Result<bool, AttributeError> {
        Ok(self.less(x, y)? && !self.approx(x, y)?)
    }

    /// `x ≾ y`: strictly better or approximately equal.
    pub fn precedes_or_approx(
        &self,
        x: AttributeValue,
        y: AttributeValue,
    ) -> Result<bool, AttributeError> {
        Ok(self.less(x, y)? || self.approx(x, y)?)
    }
}

/// Run-level tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tolerances {
    pub memory_bits: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            memory_bits: DEFAULT_MEMORY_TOLERANCE,
        }
    }
}

pub fn approx_equal(
    attr: AttributeId,
    x: AttributeValue,
    y: AttributeValue,
    tol: &Tolerances,
) -> Result<bool, AttributeError> {
    ApproxSpec::for_attribute(attr, tol).approx(x, y)
}

pub fn strictly_precedes(
    attr: AttributeId,
    x: AttributeValue,
    y: AttributeValue,
    tol: &Tolerances,
) -> Result<bool, AttributeError> {
    ApproxSpec::for_attribute(attr, tol).strictly_precedes(x, y)
}

#[inline]
fn prob_approx(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() < 1.0
}

#[inline]
fn prob_weak(x: f64, y: f64) -> bool {
    x < y || prob_approx(x, y)
}

#[inline]
fn prob_strict(x: f64, y: f64) -> bool {
    x < y && !prob_approx(x, y)
}

/// The eight attributes of one protocol instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributeVector {
    pub p_m: Probability,
    pub p_d: Probability,
    pub p_t: Probability,
    /// Bits exchanged in the fast phase.
    pub e: u64,
    /// Cryptographic operations.
    pub c: u64,
    /// Memory in bits.
    pub m: u64,
    /// Final slow phase.
    pub s: bool,
    /// Multiple-bit exchanges.
    pub b: bool,
}

impl AttributeVector {
    pub fn get(&self, attr: AttributeId) -> AttributeValue {
        match attr {
            AttributeId::PM => AttributeValue::Prob(self.p_m),
            AttributeId::PD => AttributeValue::Prob(self.p_d),
            AttributeId::PT => AttributeValue::Prob(self.p_t),
            AttributeId::NBE => AttributeValue::Count(self.e),
            AttributeId::NC => AttributeValue::Count(self.c),
            AttributeId::NM => AttributeValue::Count(self.m),
            AttributeId::NS => AttributeValue::Flag(self.s),
            AttributeId::NB => AttributeValue::Flag(self.b),
        }
    }
}

/// `x ≺ y` over whole vectors: no worse everywhere, strictly better somewhere.
#[inline]
pub fn dominates(x: &AttributeVector, y: &AttributeVector, tol: &Tolerances) -> bool {
    let mem_weak = x.m < y.m || x.m.abs_diff(y.m) < tol.memory_bits;
    if !(prob_weak(x.p_m.0, y.p_m.0)
        && prob_weak(x.p_d.0, y.p_d.0)
        && prob_weak(x.p_t.0, y.p_t.0)
        && x.e <= y.e
        && x.c <= y.c
        && mem_weak
        && x.s <= y.s
        && x.b <= y.b)
    {
        return false;
    }
    prob_strict(x.p_m.0, y.p_m.0)
        || prob_strict(x.p_d.0, y.p_d.0)
        || prob_strict(x.p_t.0, y.p_t.0)
        || x.e < y.e
        || x.c < y.c
        || (x.m < y.m && x.m.abs_diff(y.m) >= tol.memory_bits)
        || (!x.s & y.s)
        || (!x.b & y.b)
}

/// Reference implementation of dominance through the per-attribute specs.
pub fn dominates_by_spec(x: &AttributeVector, y: &AttributeVector, tol: &Tolerances) -> bool {
    let specs = ApproxSpec::all(tol);
    let mut strict = false;
    for spec in specs {
        let (a, b) = (x.get(spec.attribute), y.get(spec.attribute));
        if !spec
            .precedes_or_approx(a, b)
            .expect("vector values are in domain")
        {
            return false;
        }
        strict |= spec
            .strictly_precedes(a, b)
            .expect("vector values are in domain");
    }
    strict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> AttributeValue {
        AttributeValue::Prob(Probability::from_value(v).unwrap())
    }

    #[test]
    fn probability_relation_examples() {
        let tol = Tolerances::default();
        assert!(approx_equal(AttributeId::PM, p(0.4), p(0.5), &tol).unwrap());
        assert!(!approx_equal(AttributeId::PM, p(0.25), p(0.5), &tol).unwrap());
        assert!(approx_equal(AttributeId::PM, p(0.0), p(0.0), &tol).unwrap());
        assert!(!approx_equal(AttributeId::PM, p(0.0), p(1e-300), &tol).unwrap());
        assert!(strictly_precedes(AttributeId::PM, p(0.1), p(0.5), &tol).unwrap());
        assert!(!strictly_precedes(AttributeId::PM, p(0.4), p(0.5), &tol).unwrap());
    }

    #[test]
    fn memory_and_flags() {
        let tol = Tolerances::default();
        let c = AttributeValue::Count;
        assert!(approx_equal(AttributeId::NM, c(0), c(1023), &tol).unwrap());
        assert!(!approx_equal(AttributeId::NM, c(0), c(1024), &tol).unwrap());
        let f = AttributeValue::Flag;
        assert!(!approx_equal(AttributeId::NS, f(false), f(true), &tol).unwrap());
        assert!(strictly_precedes(AttributeId::NS, f(false), f(true), &tol).unwrap());
        assert!(!strictly_precedes(AttributeId::NS, f(true), f(false), &tol).unwrap());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        let tol = Tolerances::default();
        let err = approx_equal(AttributeId::NM, p(0.5), AttributeValue::Count(3), &tol);
        assert!(matches!(err, Err(AttributeError::Domain { .. })));
        assert!("XX".parse::<AttributeId>().is_err());
        assert_eq!("nm".parse::<AttributeId>().unwrap(), AttributeId::NM);
    }

    #[test]
    fn probability_range() {
        assert!(Probability::from_value(1.5).is_err());
        assert!(Probability::from_value(-0.1).is_err());
        assert_eq!(Probability::from_value(0.25).unwrap().log2(), -2.0);
        assert!(Probability::from_value(0.0).unwrap().is_zero());
    }
}
